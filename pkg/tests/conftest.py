import functools

import pytest

ACCEPTANCE: dict = {}


def criterion(number: int, text: str):
    """Record a PASS/FAIL line for an acceptance test, printed at the end of the run."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                out = fn(*args, **kwargs)
            except BaseException as exc:
                line = f"[{number:2d}] FAIL  {text}  ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
                ACCEPTANCE[number] = line
                print(line)
                raise
            line = f"[{number:2d}] PASS  {text}"
            ACCEPTANCE[number] = line
            print(line)
            return out

        return run

    return wrap


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])


@pytest.fixture
def rng():
    import random

    return random.Random(20261014)
