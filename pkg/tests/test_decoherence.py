import numpy as np
import pytest
from hypothesis import given, strategies as st

from critbunch import (
    ChainConfig,
    ComplexSeries,
    build_sector,
    coeffs,
    cutoff_weight,
    decay_bound,
    r_factor,
    r_series,
    r_squared_fk,
    r_values,
    short_time_cutoff,
)

angles = st.floats(min_value=-2 * np.pi, max_value=2 * np.pi)


def pair(n=64, lam_ref=1.0, mn=(1, 0), mn_p=(0, 1), **kw):
    cfg = ChainConfig(n=n, lam_ref=lam_ref, **kw)
    return build_sector(cfg, *mn), build_sector(cfg, *mn_p)


def test_coeffs_equal_angles():
    a = 0.7
    q = coeffs(a, a)
    assert q.c_pp == 0.0 and q.c_mm == 0.0
    assert q.c_pm == pytest.approx(np.sin(a) ** 2)
    assert q.c_mp == pytest.approx(np.cos(a) ** 2)


def test_coeffs_zero_angles():
    q = coeffs(0.0, 0.0)
    assert (q.c_pp, q.c_mm, q.c_pm, q.c_mp) == (0.0, 0.0, 0.0, 1.0)


def test_coeffs_example_quad():
    q = coeffs(0.3, 0.1)
    assert q.c_pp == pytest.approx(np.sin(0.3) * np.cos(0.1) * np.sin(0.2))
    assert q.c_pp + q.c_mm + q.c_pm + q.c_mp == pytest.approx(1.0, abs=1e-12)


@given(angles, angles)
def test_coeffs_unitarity(a, ap):
    q = coeffs(a, ap)
    assert abs(q.c_pp + q.c_mm + q.c_pm + q.c_mp - 1.0) < 1e-12


def test_r_at_time_zero_is_one():
    s, sp = pair(n=256)
    assert r_factor(s, sp, 0.0) == pytest.approx(1.0 + 0.0j, abs=1e-12)


def test_r_identical_sectors_is_one_for_all_t():
    s, _ = pair(n=64)
    for t in (0.0, 0.3, 2.0, 17.5):
        assert r_factor(s, s, t) == pytest.approx(1.0 + 0.0j, abs=1e-12)


def test_r_modulus_bounded():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = 2 * int(rng.integers(3, 40))
        s, sp = pair(n=n, lam_ref=float(rng.uniform(0.1, 2.5)),
                     mn=(int(rng.integers(0, 3)), int(rng.integers(0, 3))),
                     mn_p=(int(rng.integers(0, 3)), int(rng.integers(0, 3))))
        t = float(rng.uniform(-30, 30))
        assert abs(r_factor(s, sp, t)) <= 1.0 + 1e-9


def test_r_conjugate_and_time_reversal_symmetry():
    s, sp = pair(n=48, lam_ref=1.3)
    for t in (0.4, 1.9, 8.2):
        r = r_factor(s, sp, t)
        assert r_factor(sp, s, t) == pytest.approx(np.conj(r), abs=1e-13)
        assert r_factor(s, sp, -t) == pytest.approx(np.conj(r), abs=1e-13)


def test_r_without_dressing_is_identity():
    s, sp = pair(n=32, lam_ref=0.7, eta1=0.0, eta2=0.0, mn=(2, 1), mn_p=(0, 3))
    ts = np.linspace(0, 20, 7)
    assert np.allclose(r_values(s, sp, ts), 1.0, atol=1e-12)


def test_fk_identity_randomized():
    # two independent evaluations of |r|^2: coefficient phase sums vs the
    # explicit squared-bracket product
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(60):
        n = 2 * int(rng.integers(2, 33))
        s, sp = pair(n=n, lam_ref=float(rng.uniform(0.1, 2.5)))
        t = float(rng.uniform(0, 20))
        worst = max(worst, abs(abs(r_factor(s, sp, t)) ** 2 - r_squared_fk(s, sp, t)))
    assert worst < 1e-10


def test_fk_at_zero_and_identical_sectors():
    s, sp = pair(n=40)
    assert r_squared_fk(s, sp, 0.0) == pytest.approx(1.0, abs=1e-12)
    for t in (0.9, 4.2):
        assert r_squared_fk(s, s, t) == pytest.approx(1.0, abs=1e-12)


def test_grid_mismatch_rejected():
    s, _ = pair(n=64)
    _, sp = pair(n=32)
    with pytest.raises(ValueError, match="grids differ"):
        r_factor(s, sp, 1.0)


def test_r_series_basics():
    s, sp = pair(n=32)
    one = r_series(s, sp, [0.0])
    assert one.values[0] == pytest.approx(1.0 + 0.0j, abs=1e-12)
    same = r_series(s, s, np.linspace(0, 5, 11))
    assert np.allclose(same.values, 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        r_series(s, sp, [])
    with pytest.raises(ValueError):
        r_series(s, sp, [0.0, 0.0])


def test_deep_decay_underflows_to_zero():
    # beyond ~e^-745 the linear-space value is unrepresentable; the log-space
    # product must come back as an exact 0, never NaN or junk
    cfg = ChainConfig(n=300000, lam_ref=1.0)
    s, sp = build_sector(cfg, 1, 0), build_sector(cfg, 0, 1)
    r = r_factor(s, sp, 40.0)
    assert r == 0.0 + 0.0j
    assert not np.isnan(r)


def test_cutoff_weight_matches_brute_sum():
    # E(k_c) is exactly sum_{m<=N_c} (2 pi m / N)^2
    for n, n_c in ((8000, 800), (500, 50), (64, 9)):
        brute = sum((2 * np.pi * m / n) ** 2 for m in range(1, n_c + 1))
        assert cutoff_weight(n, n_c) == pytest.approx(brute, rel=1e-12)


def test_decay_bound_reference_numbers():
    cfg = ChainConfig(n=8000, lam_ref=1.0)
    bp = decay_bound(cfg)  # k_c = 2 pi / 10
    assert bp.n_c == 800
    assert bp.e_kc == pytest.approx(105.47325461301162, rel=1e-12)
    lam10, lam01 = cfg.dressed(1, 0), cfg.dressed(0, 1)
    gamma_direct = 4.0 * (lam10 - lam01) ** 2 * bp.e_kc / (lam01 - 1.0) ** 2
    assert bp.gamma == pytest.approx(gamma_direct, rel=1e-14)
    assert bp.gamma == pytest.approx(1687.572073808186, rel=1e-12)


def test_decay_bound_equal_couplings_is_trivial():
    # eta1 = eta2 makes the two one-photon sectors identical: gamma = 0
    cfg = ChainConfig(n=200, lam_ref=1.0, eta1=0.1, eta2=0.1)
    bp = decay_bound(cfg)
    assert bp.gamma == 0.0
    assert np.all(bp.holds([0.5, 3.0], [1.0, 1.0]))


def test_decay_bound_undefined_at_dressed_criticality():
    # eta2 = 0 pins lam_{0,1} = lam_ref exactly
    cfg = ChainConfig(n=64, lam_ref=1.0, eta1=0.1, eta2=0.0)
    with pytest.raises(ValueError, match="undefined"):
        decay_bound(cfg)


def test_short_time_cutoff_value():
    cfg = ChainConfig(n=8000, lam_ref=1.0)
    lam10 = cfg.dressed(1, 0)
    assert short_time_cutoff(cfg) == pytest.approx(np.pi / (2 * abs(lam10 - 1.0)))


def test_complex_series_validation():
    with pytest.raises(ValueError):
        ComplexSeries(np.array([1.0, 0.5]), np.array([1.0 + 0j, 1.0 + 0j]))
    with pytest.raises(ValueError):
        ComplexSeries(np.array([]), np.array([]))
