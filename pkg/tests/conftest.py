import numpy as np
import pytest

from spmor import assemble_mna, mna_to_first_order, mna_to_second_order, parse_netlist

MIN_RC = "R r1 1 0 1\nC c1 1 0 1\nI i1 1 0 PORT 1\n"
MIN_RLC = "R r1 1 0 1\nC c1 1 0 1\nL l1 1 0 1\nI i1 1 0 PORT 1\n"
RC3 = """
R r1 1 2 1
R r2 2 3 1
C c1 1 0 1
C c2 2 0 1
C c3 3 0 1
I i1 1 0 PORT 1
"""
# RC3 has no DC path to ground, so s0 = 0 is a pole; this variant adds one.
RC3G = RC3 + "R r3 3 0 1\n"


def build(text):
    d = assemble_mna(parse_netlist(text))
    return d, mna_to_second_order(d), mna_to_first_order(d)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
