import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fairsample import (SpinConfig, apply_noise, brute_force_enumerate, build_chimera, draw_couplings,
                        eliminate_free_spins, energy, exact_ground_states, frontier_enumerate, global_flip)
from fairsample.instances import OracleInfeasible
from fairsample.oracle import frontier_count
from conftest import uniform_instance


def trimmed_c2(seed, keep=28):
    """c = 2 lattice with ``32 - keep`` random qubits removed, random couplings."""
    rng = np.random.default_rng(seed)
    dead = rng.choice(32, size=32 - keep, replace=False)
    return draw_couplings(build_chimera(2, dead), rng)


def same(a, b):
    return a.min_energy == b.min_energy and a.count == b.count and a.configs == b.configs


@pytest.mark.parametrize("J", [5, -5])
def test_unfrustrated_cell(J):
    gs = brute_force_enumerate(uniform_instance(1, J))
    assert gs.min_energy == -80
    assert gs.count == 2
    assert gs.configs[1] == global_flip(gs.configs[0])


def test_ferromagnet_c2():
    inst = uniform_instance(2, 5)
    assert frontier_count(inst) == (-400, 2)
    gs = frontier_enumerate(inst)
    assert gs.configs == (SpinConfig(0, 32), SpinConfig(2**32 - 1, 32))


def test_generated_cell_fixture():
    inst = eliminate_free_spins(draw_couplings(build_chimera(1), 2024), 2024)
    gs = brute_force_enumerate(inst)
    assert (gs.min_energy, gs.count) == (-76, 2)
    assert [c.to_hex() for c in gs.configs] == ["8:3d", "8:c2"]


def test_filtered_c2_fixture(filtered_c2):
    inst = filtered_c2[0]
    assert inst.content_hash.startswith("6409f04d4061b8aa")
    gs = frontier_enumerate(inst)
    assert (gs.min_energy, gs.count) == (-284, 6)


def test_cap_overflow(filtered_c2):
    inst = filtered_c2[0]
    gs = frontier_enumerate(inst, cap=1)
    assert gs.status == "overflow" and gs.count == 6 and gs.configs == ()


def test_brute_force_limit():
    with pytest.raises(OracleInfeasible):
        brute_force_enumerate(draw_couplings(build_chimera(2), 0))


def test_frontier_limit():
    with pytest.raises(OracleInfeasible):
        frontier_count(draw_couplings(build_chimera(5), 0))


@settings(max_examples=30)
@given(st.integers(0, 2**32), st.booleans())
def test_oracles_agree(seed, trim):
    inst = trimmed_c2(seed, 24) if trim else draw_couplings(build_chimera(1), seed)
    a, b = brute_force_enumerate(inst), frontier_enumerate(inst)
    assert same(a, b)
    assert exact_ground_states(inst).configs == a.configs


@settings(max_examples=20)
@given(st.integers(0, 2**32))
def test_ground_states_closed_under_flip(seed):
    inst = eliminate_free_spins(draw_couplings(build_chimera(2), seed), seed)
    gs = frontier_enumerate(inst)
    assert gs.count % 2 == 0
    assert {global_flip(c) for c in gs.configs} == set(gs.configs)
    assert all(energy(inst, c) == gs.min_energy for c in gs.configs)
    assert gs.min_energy >= -int(np.abs(inst.coupling_values()).sum())


def test_lower_bound_tight_only_when_unfrustrated():
    assert frontier_count(uniform_instance(2, -6))[0] == -6 * 80
    inst = draw_couplings(build_chimera(2), 1)
    assert frontier_count(inst)[0] > -int(np.abs(inst.coupling_values()).sum())


def test_brute_force_on_noisy_instance():
    inst = draw_couplings(build_chimera(1), 4)
    noisy = apply_noise(inst, 0.2, 0.2, 5)
    gs = brute_force_enumerate(noisy)
    every = [energy(noisy, SpinConfig(b, 8)) for b in range(256)]
    assert gs.min_energy == pytest.approx(min(every), abs=1e-9)
    assert gs.count == sum(e <= min(every) + 1e-9 for e in every)


def test_frontier_with_defects():
    inst = draw_couplings(build_chimera(3, [0, 17, 40], [(8, 12)]), 6)
    gs = frontier_enumerate(inst)
    assert all(energy(inst, c) == gs.min_energy for c in gs.configs)
    assert frontier_count(inst) == (gs.min_energy, gs.count)
