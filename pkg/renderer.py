"""Terminal rendering with Rich library."""
from typing import Any, Iterable, List, Optional, Sequence

import mpmath
from rich.console import Console
from rich.table import Table

from reports import ErrorReport, FEReport, LValueReport


def _short(x, digits: int = 12) -> str:
    if x is None:
        return "-"
    if isinstance(x, (int, str)):
        return str(x)
    return mpmath.nstr(x, digits)


class Renderer:
    """Terminal renderer using Rich library.

    Messages and tables go to stderr so that JSON-lines reports on stdout stay parseable.
    """

    def __init__(self, console: Optional[Console] = None, quiet: bool = False):
        """
        Initialize renderer.

        Args:
            console: Console to print on (defaults to stderr)
            quiet: Suppress everything except errors
        """
        self.console = console or Console(stderr=True)
        self.quiet = quiet

    def render_error(self, message: str):
        """
        Render error message.

        Args:
            message: Error message (may contain ERROR_CODE and ERROR_MESSAGE format)
        """
        if "ERROR_CODE:" in message and "ERROR_MESSAGE:" in message:
            error_code = None
            error_message = None
            for line in message.split("\n"):
                if line.startswith("ERROR_CODE:"):
                    error_code = line.replace("ERROR_CODE:", "").strip()
                elif line.startswith("ERROR_MESSAGE:"):
                    error_message = line.replace("ERROR_MESSAGE:", "").strip()

            if error_code and error_message:
                self.console.print(f"[bold red]Error Code:[/bold red] [yellow]{error_code}[/yellow]")
                self.console.print(f"[bold red]Error Message:[/bold red] {error_message}")
            else:
                self.console.print(f"[bold red]Error:[/bold red] {message}")
        else:
            self.console.print(f"[bold red]Error:[/bold red] {message}")

    def render_info(self, message: str):
        if not self.quiet:
            self.console.print(f"[bold blue]Info:[/bold blue] {message}")

    def render_warning(self, message: str):
        if not self.quiet:
            self.console.print(f"[bold yellow]Warning:[/bold yellow] {message}")

    def render_success(self, message: str):
        if not self.quiet:
            self.console.print(f"[bold green]Success:[/bold green] {message}")

    # ─── Tables ─────────────────────────────────────────────────────────────

    def render_table(self, title: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]):
        if self.quiet:
            return
        table = Table(title=title, header_style="bold cyan")
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*(_short(cell) for cell in row))
        self.console.print(table)

    def render_lvalues(self, reports: List[LValueReport]):
        self.render_table(
            "Twisted L-values",
            ["form", "character", "Lambda", "abs. error", "terms", "path"],
            [(r.form, r.character, r.value, r.certified_abs_error, r.terms_used, r.path) for r in reports],
        )

    def render_fe(self, reports: List[FEReport], title: str = "Functional equation"):
        rows = []
        for r in reports:
            verdict = "[green]pass[/green]" if r.passed else "[red]fail[/red]"
            rows.append((r.lhs.form, r.lhs.character, r.rhs.character, _short(r.residual, 5), _short(r.tolerance, 3), verdict))
        self.render_table(title, ["form", "character", "dual", "residual", "tolerance", "verdict"], rows)

    def render_summary(self, reports: List[FEReport], errors: Optional[List[ErrorReport]] = None):
        """One line: worst residual and the overall verdict."""
        errors = errors or []
        if not reports and not errors:
            self.render_info("nothing was checked")
            return
        worst = max((r.residual for r in reports), default=mpmath.mpf(0))
        failed = sum(1 for r in reports if not r.passed)
        line = (f"{len(reports)} checks, {failed} failed, {len(errors)} errors; "
                f"max residual {_short(worst, 5)}")
        if failed or errors:
            self.console.print(f"[bold red]FAIL:[/bold red] {line}")
        else:
            self.render_success(line)
