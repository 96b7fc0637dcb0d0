import numpy as np
import pytest
from hypothesis import given, strategies as st

from fairsample import SpinConfig, apply_noise, build_chimera, delta_energy, draw_couplings, energy, global_flip
from conftest import two_spin, uniform_instance


def naive_energy(instance, config):
    s = dict(zip(instance.graph.active_qubits, config.spins().tolist()))
    e = 0
    for (i, j), J in instance.couplings.items():
        e -= J * s[i] * s[j]
    return e


configs = st.integers(1, 3).flatmap(
    lambda c: st.tuples(st.just(c), st.integers(0, 2**63), st.integers(0, 2 ** (8 * c * c) - 1)))


def test_two_spin_satisfied_bond():
    inst = two_spin(5)
    up = SpinConfig.from_spins([1, 1])
    assert energy(inst, up) == -5
    assert delta_energy(inst, up, 4) == 10


def test_flip_twice_negates_delta():
    inst = two_spin(5)
    up = SpinConfig.from_spins([1, 1])
    assert delta_energy(inst, up.flip(1), 4) == -10


def test_ferromagnet_cell():
    inst = uniform_instance(1, 5)
    assert energy(inst, SpinConfig.from_spins(np.ones(8, dtype=int))) == -80


def test_global_flip_example():
    cfg = global_flip(SpinConfig.from_spins([1, 1, -1]))
    assert cfg.spins().tolist() == [-1, -1, 1]


def test_hex_format():
    cfg = SpinConfig.from_spins([1, -1, -1, -1, 1])
    assert cfg.to_hex() == "5:11"
    assert SpinConfig.from_hex("5:11") == cfg
    with pytest.raises(ValueError):
        SpinConfig.from_hex("garbage")


def test_size_mismatch_rejected():
    with pytest.raises(ValueError):
        energy(two_spin(), SpinConfig(0, 3))


def test_inactive_qubit_rejected():
    with pytest.raises(ValueError):
        delta_energy(two_spin(), SpinConfig(0, 2), 1)


@given(configs)
def test_energy_matches_naive_and_is_integer(args):
    c, seed, bits = args
    inst = draw_couplings(build_chimera(c), seed)
    cfg = SpinConfig(bits, 8 * c * c)
    e = energy(inst, cfg)
    assert type(e) is int
    assert e == naive_energy(inst, cfg)
    assert abs(e) <= 7 * len(inst.couplings)


@given(configs, st.data())
def test_delta_matches_recompute(args, data):
    c, seed, bits = args
    inst = draw_couplings(build_chimera(c), seed)
    cfg = SpinConfig(bits, 8 * c * c)
    k = data.draw(st.integers(0, cfg.n - 1))
    q = inst.graph.active_qubits[k]
    assert delta_energy(inst, cfg, q) == energy(inst, cfg.flip(k)) - energy(inst, cfg)


@given(configs)
def test_global_flip_involution_and_invariance(args):
    c, seed, bits = args
    inst = draw_couplings(build_chimera(c), seed)
    cfg = SpinConfig(bits, 8 * c * c)
    assert global_flip(global_flip(cfg)) == cfg
    assert energy(inst, global_flip(cfg)) == energy(inst, cfg)


@given(configs)
def test_hex_round_trip(args):
    c, _, bits = args
    cfg = SpinConfig(bits, 8 * c * c)
    assert SpinConfig.from_hex(cfg.to_hex()) == cfg
    assert SpinConfig.from_spins(cfg.spins()) == cfg


@given(st.integers(0, 2**32), st.integers(0, 255))
def test_noisy_energy_is_float_and_delta_consistent(seed, bits):
    noisy = apply_noise(draw_couplings(build_chimera(1), seed), 0.5, 0.5, seed)
    cfg = SpinConfig(bits, 8)
    e = energy(noisy, cfg)
    assert isinstance(e, float)
    for k in range(8):
        d = delta_energy(noisy, cfg, noisy.graph.active_qubits[k])
        assert d == pytest.approx(energy(noisy, cfg.flip(k)) - e, abs=1e-9)
