"""Collects one PASS/FAIL line per acceptance criterion."""

from __future__ import annotations

import time
from contextlib import contextmanager

RESULTS: list = []


@contextmanager
def criterion(name: str):
    """Time a criterion body and record whether it raised."""
    info = {"detail": ""}
    t0 = time.perf_counter()
    try:
        yield info
    except BaseException as exc:
        _log(name, False, time.perf_counter() - t0, info["detail"] or f"{type(exc).__name__}: {exc}")
        raise
    _log(name, True, time.perf_counter() - t0, info["detail"])


def _log(name, ok, elapsed, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name} ({elapsed:.2f} s){' - ' + detail if detail else ''}"
    RESULTS.append(line)
    print(line)
