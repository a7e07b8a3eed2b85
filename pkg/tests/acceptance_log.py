"""Collects one verdict line per acceptance criterion for the terminal summary."""

import contextlib
import time

import pytest

LINES: list[str] = []


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record PASS/FAIL/SKIP for a criterion; the body fills ``info['detail']``."""
    info = {"detail": ""}
    start = time.perf_counter()
    try:
        yield info
    except pytest.skip.Exception as exc:
        LINES.append(f"[SKIP] criterion {number}: {title} ({exc})")
        raise
    except BaseException as exc:
        detail = info["detail"] or f"{type(exc).__name__}: {exc}".splitlines()[0]
        LINES.append(f"[FAIL] criterion {number}: {title} ({detail}; {time.perf_counter() - start:.1f}s)")
        raise
    LINES.append(f"[PASS] criterion {number}: {title} ({info['detail']}; {time.perf_counter() - start:.1f}s)")
    print(LINES[-1])
