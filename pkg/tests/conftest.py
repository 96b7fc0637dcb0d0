import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fairsample import Instance, build_chimera, draw_couplings, eliminate_free_spins, filter_degeneracy

settings.register_profile("default", max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def two_spin(J=5):
    """Qubits 0 and 4 of one cell joined by a single coupler."""
    g = build_chimera(1, defect_qubits=[1, 2, 3, 5, 6, 7])
    return Instance(g, {(0, 4): J})


def uniform_instance(c, J):
    g = build_chimera(c)
    return Instance(g, {e: J for e in g.active_couplers})


def filtered_instances(c, count, start=0, n_gs=None):
    """First ``count`` accepted instances at size ``c`` drawn from seeds ``start, start+1, ...``."""
    g = build_chimera(c)
    out, s = [], start
    while len(out) < count:
        inst = eliminate_free_spins(draw_couplings(g, s), s)
        s += 1
        v = filter_degeneracy(inst)
        if v.accepted and (n_gs is None or v.n_gs in n_gs):
            out.append(inst)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def filtered_c2():
    return filtered_instances(2, 3)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
