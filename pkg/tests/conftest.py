from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def rationals(lo=-20, hi=20, max_den=6):
    return st.builds(lambda n, d: Fraction(n, d), st.integers(lo * max_den, hi * max_den), st.integers(1, max_den))


def positive_rationals(max_num=40, max_den=6):
    return st.builds(Fraction, st.integers(1, max_num), st.integers(1, max_den))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(mod.RESULTS, key=lambda r: r.id):
        terminalreporter.write_line(r.line())
