"""One line per acceptance criterion, printed at the end of the run."""

LINES: list[str] = []


def record(criterion: str, ok: bool | None, detail: str) -> None:
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    LINES.append(f"criterion {criterion}: {status}  {detail}")
