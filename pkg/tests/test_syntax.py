"""Every source file compiles and every source directory is a package."""
import py_compile
from pathlib import Path

SKIP_PARTS = {"venv", "__pycache__", "examples", ".hypothesis"}
PROJECT_ROOT = Path(__file__).parent.parent


def source_files():
    for py_file in sorted(PROJECT_ROOT.rglob("*.py")):
        if not SKIP_PARTS & set(py_file.relative_to(PROJECT_ROOT).parts):
            yield py_file


def test_sources_compile_and_packages_have_init():
    failures = []
    packages = set()
    for py_file in source_files():
        try:
            py_compile.compile(str(py_file), doraise=True)
        except py_compile.PyCompileError as e:
            failures.append(f"{py_file.relative_to(PROJECT_ROOT)}: {e.msg}")
        if py_file.parent != PROJECT_ROOT:
            packages.add(py_file.parent)
    failures += [f"{p.relative_to(PROJECT_ROOT)}: missing __init__.py" for p in sorted(packages)
                 if not (p / "__init__.py").exists()]
    assert {"forms", "lfun", "padic"} <= {p.name for p in packages}
    assert not failures, "\n".join(failures)


if __name__ == "__main__":
    test_sources_compile_and_packages_have_init()
    print("✓ Sources compile; forms, lfun and padic are packages")
