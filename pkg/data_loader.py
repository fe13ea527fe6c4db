"""Loading newform files, character files and job configs.

All inputs are strict JSON: NaN/Infinity and duplicate keys are rejected,
and a syntax error becomes a ParseError carrying the file and line.
Names that are not paths are looked up under ``config.DATA_DIR``
(``newforms/``, ``characters/``, ``jobs/``).
"""
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import config
from errors import ConfigError, MalformedSpec, ParseError
from forms.newform_data import ClassicalNewformData, generate_coefficients
from hecke_chars import HeckeCharacter, character_from_values, enumerate_characters, make_character
from quadfield import ImagQuadField
from validators import validate_character_spec, validate_job, validate_newform

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ─── Strict JSON ────────────────────────────────────────────────────────────

def _no_duplicates(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    result: Dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise ValueError(f"duplicate key {key!r}")
        result[key] = value
    return result


def _no_constants(name: str):
    raise ValueError(f"{name} is not allowed")


def read_json(path: PathLike) -> Any:
    """Parse a JSON file strictly."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text, object_pairs_hook=_no_duplicates, parse_constant=_no_constants)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, str(path), line=e.lineno) from e
    except ValueError as e:
        raise ParseError(str(e), str(path)) from e


def resolve_data_path(name: PathLike, kind: str, base_dir: Optional[Path] = None) -> Path:
    """
    Find a data file by path or by name.

    Args:
        name: a path, or a bare name such as ``11a``
        kind: subdirectory of the data directory ("newforms", "characters", "jobs")
        base_dir: directory of the referring job file, tried first for relative paths

    Raises:
        ConfigError: nothing matches
    """
    name = Path(name)
    candidates = [name]
    if base_dir is not None and not name.is_absolute():
        candidates.append(base_dir / name)
    data_dir = Path(config.DATA_DIR)
    candidates += [data_dir / kind / name, data_dir / kind / f"{name}.json", data_dir / name]
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    raise ConfigError(f"no {kind} file named {name} (looked in {', '.join(str(c) for c in candidates)})")


# ─── Newforms ───────────────────────────────────────────────────────────────

def _int_pairs(value: Any, what: str, path: Optional[str]) -> Dict[int, int]:
    """[[key, value], ...] or {"key": value} as an int -> int dict."""
    if value is None:
        return {}
    try:
        items = value.items() if isinstance(value, Mapping) else value
        return {int(k): int(v) for k, v in items}
    except (TypeError, ValueError) as e:
        raise ParseError(f"'{what}' must be pairs of integers: {e}", path) from e


def parse_newform(record: Mapping[str, Any], path: Optional[str] = None,
                  bound: Optional[int] = None) -> ClassicalNewformData:
    """
    Build newform data from a parsed record.

    Listed coefficients must agree with those generated from ``source``.

    Raises:
        ParseError: missing fields, or a listed a_ell disagreeing with the source
        InsufficientCoefficients: some a_ell with ell <= bound is missing
    """
    if not isinstance(record, Mapping):
        raise ParseError("a newform file holds one JSON object", path)
    missing = [key for key in ("label", "level", "weight") if key not in record]
    if missing:
        raise ParseError(f"missing {missing}", path)

    listed = _int_pairs(record.get("coefficients"), "coefficients", path)
    atkin_lehner = _int_pairs(record.get("atkin_lehner"), "atkin_lehner", path)
    source = record.get("source")
    bound = bound or int(record.get("bound") or 0) or max(listed, default=0)

    coefficients = dict(listed)
    if source:
        generated = generate_coefficients(source, bound)
        for ell, a in sorted(listed.items()):
            if ell in generated and generated[ell] != a:
                raise ParseError(f"a_{ell} = {a} disagrees with the value {generated[ell]} from the source", path)
        coefficients.update(generated)
        log.debug("%s: generated %d coefficients up to %d", record["label"], len(generated), bound)

    data = ClassicalNewformData(
        label=str(record["label"]),
        level=int(record["level"]),
        weight=int(record["weight"]),
        coefficients=coefficients,
        atkin_lehner=atkin_lehner,
        bound=bound,
        source=dict(source) if source else None,
    )
    data.require(bound)
    return data


def load_newform(name: PathLike, bound: Optional[int] = None, base_dir: Optional[Path] = None,
                 strict: bool = True) -> ClassicalNewformData:
    """
    Load and validate a newform file.

    Raises:
        ParseError: unreadable or inconsistent file
        InsufficientCoefficients: coefficients stop short of ``bound``
        MalformedSpec: validation errors (``strict`` only)
    """
    path = resolve_data_path(name, "newforms", base_dir)
    data = parse_newform(read_json(path), str(path), bound)
    result = validate_newform(data)
    for warning in result.warnings:
        log.warning("%s: %s", path, warning)
    if strict and not result:
        raise MalformedSpec(f"{path}: " + "; ".join(result.errors), error_code="INVALID_NEWFORM")
    return data


# ─── Characters ─────────────────────────────────────────────────────────────

def _conductor(spec: Any) -> Union[int, Tuple[int, int]]:
    if isinstance(spec, int):
        return spec
    if isinstance(spec, list) and len(spec) == 2 and all(isinstance(x, int) for x in spec):
        return spec[0], spec[1]
    raise MalformedSpec(f"conductor must be an integer or a pair [a, b] for a + b*omega, got {spec!r}")


def _roots(spec: Any) -> Any:
    """JSON roots of unity ([k, n] pairs) as tuples; 'trivial' and None pass through."""
    if spec is None or isinstance(spec, str):
        return spec
    return [tuple(root) for root in spec]


def parse_character_entry(entry: Mapping[str, Any], field: ImagQuadField) -> List[HeckeCharacter]:
    """One entry of a character file; ``"all": true`` expands to every primitive character."""
    result = validate_character_spec(dict(entry))
    if not result:
        raise MalformedSpec("; ".join(result.errors))
    conductor = _conductor(entry["conductor"])
    inf_type = tuple(entry.get("type", [0, 0]))
    label = entry.get("label")

    if entry.get("all"):
        chars = list(enumerate_characters(field, conductor, inf_type))
        if not chars:
            log.warning("no primitive character of conductor %s and type %s over %s", conductor, inf_type, field)
        if label:
            chars = [HeckeCharacter(psi.field, psi.conductor, psi.q, psi.r, psi.phases, psi.group, f"{label}.{i}")
                     for i, psi in enumerate(chars)]
        return chars
    if "values" in entry:
        values = {tuple(x): tuple(root) for x, root in entry["values"]}
        return [character_from_values(field, conductor, inf_type, values, label)]
    return [make_character(field, conductor, inf_type, _roots(entry.get("finite_part")), label)]


def parse_characters(record: Mapping[str, Any], field: Optional[ImagQuadField] = None,
                     path: Optional[str] = None) -> List[HeckeCharacter]:
    """
    Characters listed in a parsed character file.

    Raises:
        ConfigError: the file's field disagrees with ``field``
        MalformedSpec / UnitIncompatible: an entry describes no primitive character
    """
    if not isinstance(record, Mapping) or "characters" not in record:
        raise ParseError("a character file holds {\"field\": d, \"characters\": [...]}", path)
    d = record.get("field")
    if field is None:
        if d is None:
            raise ParseError("no field given", path)
        field = ImagQuadField(int(d))
    elif d is not None and int(d) != field.d:
        raise ConfigError(f"{path}: characters are over Q(sqrt({d})), the job is over {field}")

    chars: List[HeckeCharacter] = []
    for i, entry in enumerate(record["characters"]):
        try:
            chars.extend(parse_character_entry(entry, field))
        except MalformedSpec as e:
            raise MalformedSpec(f"{path or 'characters'}[{i}]: {e.message}", error_code=e.error_code) from e
    log.debug("%s: %d characters", path, len(chars))
    return chars


def load_characters(name: PathLike, field: Optional[ImagQuadField] = None,
                    base_dir: Optional[Path] = None) -> List[HeckeCharacter]:
    path = resolve_data_path(name, "characters", base_dir)
    return parse_characters(read_json(path), field, str(path))


# ─── Jobs ───────────────────────────────────────────────────────────────────

@dataclass
class JobConfig:
    """Everything one CLI run needs; merged from flags, the job file and the environment."""

    field_d: int
    newform: str
    characters: List[str] = field(default_factory=list)
    prec: int = config.DEFAULT_PRECISION
    split_point: Optional[str] = None
    fricke_sign: Optional[Union[int, str]] = None
    prime: Optional[int] = None
    stabilise: Optional[Union[str, Dict[str, str]]] = None
    out: Optional[str] = None
    cache_dir: Optional[str] = None
    tolerance: Optional[str] = None
    workers: int = config.WORKERS
    bound: Optional[int] = None
    flip_sign: bool = False
    base_dir: Optional[str] = None

    def quad_field(self) -> ImagQuadField:
        return ImagQuadField(self.field_d)

    def echo(self) -> Dict[str, Any]:
        """The config echo embedded in every report (stable across reruns)."""
        record = asdict(self)
        for key in ("out", "cache_dir", "workers", "base_dir"):
            record.pop(key)
        return record

    def stabilise_choices(self) -> Optional[Dict[Union[int, str], str]]:
        """Root choices keyed by the index of the prime above p."""
        if self.stabilise is None:
            return None
        if isinstance(self.stabilise, str):
            return {i: self.stabilise for i in range(2)}
        return {int(k): v for k, v in self.stabilise.items()}


_JOB_RENAMES = {"field": "field_d"}


def build_job(values: Mapping[str, Any], overrides: Optional[Mapping[str, Any]] = None,
              base_dir: Optional[Path] = None) -> JobConfig:
    """
    Merge job-file values with CLI overrides (overrides win; None means unset).

    Raises:
        ConfigError: the merged job fails validation
    """
    merged = dict(values)
    for key, value in (overrides or {}).items():
        if value is not None and value != ():
            merged[key] = value
    if isinstance(merged.get("characters"), str):
        merged["characters"] = [merged["characters"]]
    if "characters" in merged:
        merged["characters"] = list(merged["characters"])

    result = validate_job(merged)
    for warning in result.warnings:
        log.warning(warning)
    if not result:
        raise ConfigError("; ".join(result.errors))

    kwargs = {_JOB_RENAMES.get(k, k): v for k, v in merged.items()}
    if kwargs.get("split_point") is not None:
        kwargs["split_point"] = str(kwargs["split_point"])
    if kwargs.get("tolerance") is not None:
        kwargs["tolerance"] = str(kwargs["tolerance"])
    if base_dir is not None:
        kwargs["base_dir"] = str(base_dir)
    return JobConfig(**kwargs)


def load_job(name: Optional[PathLike], overrides: Optional[Mapping[str, Any]] = None) -> JobConfig:
    """Read a job file (if any) and apply overrides."""
    if name is None:
        return build_job({}, overrides)
    path = resolve_data_path(name, "jobs")
    values = read_json(path)
    if not isinstance(values, Mapping):
        raise ParseError("a job file holds one JSON object", str(path))
    return build_job(values, overrides, path.parent)


def job_characters(job: JobConfig, field: ImagQuadField) -> List[HeckeCharacter]:
    """All characters a job names, in file order; duplicates (by id) dropped."""
    base_dir = Path(job.base_dir) if job.base_dir else None
    seen, chars = set(), []
    for name in job.characters:
        for psi in load_characters(name, field, base_dir):
            if psi.id not in seen:
                seen.add(psi.id)
                chars.append(psi)
    return chars


def job_newform(job: JobConfig) -> ClassicalNewformData:
    base_dir = Path(job.base_dir) if job.base_dir else None
    return load_newform(job.newform, job.bound, base_dir)


def parse_all(job: JobConfig) -> Tuple[ImagQuadField, ClassicalNewformData, List[HeckeCharacter]]:
    """Parse every file a job references before anything is computed."""
    field_ = job.quad_field()
    return field_, job_newform(job), job_characters(job, field_)
