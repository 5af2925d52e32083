import numpy as np
import pytest

from critbunch import (
    ChainConfig,
    FieldState,
    SectorTable,
    build_sector,
    correlation_series,
    first_order,
    g2,
    g2_specialized,
    intensity,
    needed_sectors,
    r_factor,
    second_order,
)
from critbunch.oracle import JointSimulator


def small_table(state, n=12, lam_ref=1.1, **kw):
    cfg = ChainConfig(n=n, lam_ref=lam_ref, **kw)
    return SectorTable.for_state(cfg, state)


# --- dense single-time oracles on the truncated Fock space -------------------


def _dense_ops(state):
    m1, m2 = len(state.c), len(state.d)
    a1 = np.diag(np.sqrt(np.arange(1, m1)), k=1)
    a2 = np.diag(np.sqrt(np.arange(1, m2)), k=1)
    big_a = np.kron(a1, np.eye(m2)) + 1j * np.kron(np.eye(m1), a2)
    psi = np.kron(state.c, state.d)
    return big_a, psi


def dense_intensity(state):
    big_a, psi = _dense_ops(state)
    return np.real(psi.conj() @ (big_a.conj().T @ big_a) @ psi)


def dense_second_moment(state):
    big_a, psi = _dense_ops(state)
    aa = big_a @ big_a
    return np.real(psi.conj() @ (aa.conj().T @ aa) @ psi)


# --- field states -------------------------------------------------------------


def test_field_state_validation():
    with pytest.raises(ValueError):
        FieldState(c=np.array([1.0, 1.0]), d=np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        FieldState(c=np.array([1.0]), d=np.array([1.0, 0.0]))


def test_coherent_truncation_tail():
    from math import factorial

    st = FieldState.coherent(1.0, cutoff=12)
    # dropped tail mass below 1e-10 at this cutoff
    raw = np.array([1.0 / np.sqrt(float(factorial(j))) for j in range(13)])
    assert 1.0 - np.sum(raw**2) / np.e < 1e-10
    assert np.sum(np.abs(st.c) ** 2) == pytest.approx(1.0, abs=1e-14)


# --- first order ---------------------------------------------------------------


def test_first_order_vacuum_is_zero():
    state = FieldState.vacuum()
    table = small_table(state)
    for t in (0.0, 1.7):
        assert first_order(state, table, t) == 0.0


def test_first_order_t0_matches_dense_oracle():
    rng = np.random.default_rng(21)
    for _ in range(8):
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        d = rng.normal(size=4) + 1j * rng.normal(size=4)
        state = FieldState.product(c, d)
        table = small_table(state)
        got = first_order(state, table, 0.0)
        assert got == pytest.approx(dense_intensity(state), abs=1e-12)


def test_first_order_decoupled_is_constant_as_printed():
    state = FieldState.half_half()
    table = small_table(state, eta1=0.0, eta2=0.0)
    vals = [first_order(state, table, t) for t in (0.0, 0.9, 7.7)]
    assert np.allclose(vals, vals[0], atol=1e-13)


def test_first_order_hermitian_consistency_without_exchange_channels():
    """first_order(-t) = conj(first_order(t)) holds whenever the photon-exchange
    channels carry no weight (e.g. Fock-spaced amplitudes); with inter-mode
    single-photon coherences the two-time function has no such symmetry."""
    state = FieldState.product([1.0, 0.0, 1.0], [0.0, 1.0])
    table = small_table(state, lam_ref=0.9)
    for t in (0.3, 1.1, 4.0):
        assert first_order(state, table, -t) == pytest.approx(
            np.conj(first_order(state, table, t)), abs=1e-13
        )


def test_first_order_lab_frame_phases():
    # lab frame multiplies e^{i w1 t}/e^{i w2 t} channel by channel; for a
    # state exciting only mode 1 the whole function just picks up e^{i w1 t}
    state = FieldState.product([1.0, 1.0], [1.0, 0.0])
    table = small_table(state, omega2=2.0, omega1=6.0)
    for t in (0.5, 2.2):
        lab = first_order(state, table, t, frame="lab")
        printed = first_order(state, table, t)
        assert lab == pytest.approx(printed * np.exp(1j * 6.0 * t), abs=1e-13)
    with pytest.raises(ValueError):
        first_order(state, table, 0.1, frame="rotating")


# --- second order ---------------------------------------------------------------


def test_second_order_vacuum_is_zero():
    state = FieldState.vacuum()
    table = small_table(state)
    assert second_order(state, table, 2.2) == 0.0


def test_second_order_half_half_closed_form():
    state = FieldState.half_half()
    table = small_table(state, n=16, lam_ref=1.0)
    s10 = build_sector(table.cfg, 1, 0)
    s01 = build_sector(table.cfg, 0, 1)
    for t in (0.0, 0.8, 3.3):
        r = r_factor(s10, s01, t)
        want = 0.5 * (1.0 + np.real(r * np.exp(1j * table.cfg.delta_omega * t)))
        got = second_order(state, table, t)
        assert got == pytest.approx(want, abs=1e-12)
        assert abs(got.imag) < 1e-12


def test_second_order_t0_matches_dense_moment():
    rng = np.random.default_rng(33)
    for _ in range(8):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        d = rng.normal(size=3) + 1j * rng.normal(size=3)
        state = FieldState.product(c, d)
        table = small_table(state)
        assert second_order(state, table, 0.0) == pytest.approx(
            dense_second_moment(state), abs=1e-10
        )


def test_second_order_is_real_for_random_states():
    rng = np.random.default_rng(8)
    for _ in range(6):
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        d = rng.normal(size=3) + 1j * rng.normal(size=3)
        state = FieldState.product(c, d)
        table = small_table(state, lam_ref=float(rng.uniform(0.5, 1.5)))
        for t in rng.uniform(0, 10, 3):
            assert abs(second_order(state, table, float(t)).imag) < 1e-12


def test_second_order_matches_joint_oracle():
    rng = np.random.default_rng(55)
    for _ in range(4):
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        d = rng.normal(size=3) + 1j * rng.normal(size=3)
        state = FieldState.product(c, d)
        cfg = ChainConfig(n=10, lam_ref=float(rng.uniform(0.6, 1.4)), omega2=2.5, omega1=7.5)
        labels = {(m, n) for m in range(3) for n in range(3)}
        table = SectorTable(cfg, labels)
        sim = JointSimulator(cfg, {mn: table.sector(mn) for mn in labels})
        for t in rng.uniform(0, 5, 2):
            _, s_joint = sim.two_time(state.c, state.d, float(t))
            assert second_order(state, table, float(t)) == pytest.approx(s_joint, abs=1e-8)


# --- g2 ---------------------------------------------------------------------


def test_g2_specialized_fixed_points():
    assert g2_specialized(1.0 + 0.0j, 0.0) == pytest.approx(1.0)
    assert g2_specialized(0.0 + 0.0j, 1.234) == pytest.approx(0.5)
    assert g2_specialized(1.0 + 0.0j, np.pi) == pytest.approx(0.0, abs=1e-15)
    assert np.isnan(g2_specialized(1.0 + 0.0j, np.pi / 2))


def test_g2_general_path_matches_specialized():
    state = FieldState.half_half()
    table = small_table(state, n=64, lam_ref=1.0)
    s10 = build_sector(table.cfg, 1, 0)
    s01 = build_sector(table.cfg, 0, 1)
    for t in (0.0, 0.37, 1.9, 11.0):
        r = r_factor(s10, s01, t)
        want = g2_specialized(r, table.cfg.delta_omega * t)
        assert g2(state, table, t) == pytest.approx(want, abs=1e-10)


def test_g2_at_zero_is_one_for_half_half():
    state = FieldState.half_half()
    table = small_table(state, n=128, lam_ref=1.0)
    assert g2(state, table, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_g2_decoupled_closed_form_and_periodicity():
    # chain decoupled: g2(t) = (1/2)(1+cos dw t)/(1-sin dw t), periodic in t
    state = FieldState.half_half()
    table = small_table(state, eta1=0.0, eta2=0.0, omega2=1.0, omega1=3.0)
    dw = table.cfg.delta_omega
    period = 2 * np.pi / dw
    for t in (0.1, 0.7, 2.0):
        want = 0.5 * (1 + np.cos(dw * t)) / (1 - np.sin(dw * t))
        assert g2(state, table, t) == pytest.approx(want, abs=1e-12)
        assert g2(state, table, t + period) == pytest.approx(g2(state, table, t), abs=1e-10)


def test_g2_flags_denominator_poles():
    state = FieldState.half_half()
    table = small_table(state, eta1=0.0, eta2=0.0, omega2=1.0, omega1=3.0)
    t_pole = (np.pi / 2) / table.cfg.delta_omega
    res = correlation_series(state, table, np.array([0.0, t_pole]))
    assert not res.flagged[0]
    assert res.flagged[1]
    assert np.isnan(res.g2[1])


def test_intensity_half_half_closed_form():
    state = FieldState.half_half()
    table = small_table(state, n=32, lam_ref=1.0)
    s10 = build_sector(table.cfg, 1, 0)
    s01 = build_sector(table.cfg, 0, 1)
    for t in (0.0, 0.6, 2.8):
        z = r_factor(s10, s01, t) * np.exp(1j * table.cfg.delta_omega * t)
        assert intensity(state, table, t) == pytest.approx(1.0 - z.imag, abs=1e-12)


# --- sector enumeration --------------------------------------------------------


def test_needed_sectors_vacuum_empty():
    assert needed_sectors(FieldState.vacuum()) == set()


def test_needed_sectors_half_half():
    pairs = needed_sectors(FieldState.half_half())
    assert ((1, 0), (0, 1)) in pairs
    labels = {mn for p in pairs for mn in p}
    assert labels <= {(m, n) for m in range(2) for n in range(2)}


def test_needed_sectors_closed_under_truncation():
    rng = np.random.default_rng(2)
    c = rng.normal(size=3) + 1j * rng.normal(size=3)
    d = rng.normal(size=3) + 1j * rng.normal(size=3)
    state = FieldState.product(c, d)
    labels = {mn for p in needed_sectors(state) for mn in p}
    assert labels <= {(m, n) for m in range(3) for n in range(3)}
    # a table built from exactly these labels must never raise KeyError
    table = SectorTable(ChainConfig(n=8, lam_ref=0.9), labels)
    correlation_series(state, table, np.linspace(0, 3, 5))


def test_missing_sector_reported():
    state = FieldState.half_half()
    table = SectorTable(ChainConfig(n=8, lam_ref=1.0), {(0, 0)})
    with pytest.raises(KeyError, match="missing from table"):
        table.sector((1, 0))
