"""Shared list of acceptance result lines, printed at the end of the run."""
LINES = []


def record(number, title, passed, detail):
    LINES.append(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}")
    return passed
