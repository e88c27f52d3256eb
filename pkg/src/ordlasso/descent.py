"""Process-wide bookkeeping of objective monotonicity.

Every solver reports how many accepted steps it checked and how many moved
its objective the wrong way by more than a relative 1e-10. In strict mode
(the default) a violation raises :class:`DescentError` at the reporting
solver; otherwise it is only counted.
"""

import contextlib
import threading

TOLERANCE = 1e-10

_lock = threading.Lock()
_strict = True
_counts = {}


class DescentError(ArithmeticError):
    """An accepted step increased a minimized objective (or decreased a
    maximized one) beyond tolerance."""


def record(kind, n_checks, n_violations=0, worst=0.0):
    with _lock:
        entry = _counts.setdefault(kind, [0, 0, 0.0])
        entry[0] += int(n_checks)
        entry[1] += int(n_violations)
        entry[2] = max(entry[2], float(worst))
        strict = _strict
    if n_violations and strict:
        raise DescentError(
            f"{kind}: {n_violations} of {n_checks} accepted steps violated "
            f"monotone objective progress (worst excess {worst:.3e})"
        )


def check(kind, before, after, minimize=True):
    """Check one accepted step and record it."""
    excess = (after - before) if minimize else (before - after)
    bad = excess > TOLERANCE * max(1.0, abs(before))
    record(kind, 1, int(bad), excess if bad else 0.0)


def stats():
    with _lock:
        return {k: {"checks": v[0], "violations": v[1], "worst": v[2]}
                for k, v in _counts.items()}


def reset():
    with _lock:
        _counts.clear()


@contextlib.contextmanager
def lenient():
    """Count violations without raising."""
    global _strict
    with _lock:
        previous, _strict = _strict, False
    try:
        yield
    finally:
        with _lock:
            _strict = previous
