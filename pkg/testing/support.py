"""Shared helpers for the *_test.py scripts: import path, runner, raises."""
import os
import sys
import time
import traceback

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from realnum import SqrtRational, ThetaSystem  # noqa: E402

SQUAREFREE = [k for k in range(2, 51) if all(k % (p * p) for p in range(2, 8))]


def sqrt_system(*radicands):
    return ThetaSystem.from_scalars([SqrtRational(r) for r in radicands])


def raises(exc_type, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except exc_type as e:
        return e
    raise AssertionError(f"{getattr(fn, '__name__', fn)} did not raise {exc_type.__name__}")


def run_tests(namespace, title):
    """Run every test_* function in namespace; print PASS/FAIL lines, return the exit status."""
    tests = [(name, fn) for name, fn in namespace.items() if name.startswith('test_') and callable(fn)]
    print(f"Starting {title}...")
    failed = 0
    for name, fn in tests:
        start = time.perf_counter()
        try:
            fn()
            print(f"PASS {name} ({time.perf_counter() - start:.3f}s)")
        except Exception:
            failed += 1
            print(f"FAIL {name}")
            traceback.print_exc()
    print(f"{title} completed: {len(tests) - failed} passed, {failed} failed")
    return 1 if failed else 0
