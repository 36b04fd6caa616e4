"""Collects one PASS/FAIL line per acceptance criterion."""

RESULTS: list[str] = []


def report(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    print(line)
    return line
