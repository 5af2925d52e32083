"""Self-verification suites behind the ``verify`` subcommand.

Each check returns a row (name, max deviation, tolerance, passed, note).  The
suites mirror the package's layered validation: per-k matrix-exponential
oracle, the squared-bracket product identity, spin-chain exact
diagonalisation, the joint field x chain simulation, coefficient unitarity,
and the cutoff-weight arithmetic of the decay bound.

The printed Gaussian short-time envelope exp(-gamma t^2) is evaluated and
reported here as well, but as an informational row: with the documented rate
formula the envelope undercuts the actual |r|^2 by orders of magnitude at
small t (the rate extrapolates the small-k mixing-angle growth far beyond its
validity), so its status line carries the measured margin instead of gating
the exit code.  The acceptance suite asserts it as written and documents the
failure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlations import FieldState, SectorTable, second_order
from .decoherence import cutoff_weight, decay_bound, r_factor, r_squared_fk, r_values, short_time_cutoff
from .oracle import JointSimulator, _overlap_2x2_batch, spin_chain_ed
from .spectrum import ChainConfig, build_sector


@dataclass
class CheckRow:
    name: str
    max_dev: float
    tol: float
    passed: bool
    note: str = ""
    informational: bool = False


def _coeff_sum_with_mutation(alpha, alpha_p, mutate: bool):
    sa, ca = np.sin(alpha), np.cos(alpha)
    sp, cp = np.sin(alpha_p), np.cos(alpha_p)
    sd, cd = np.sin(alpha - alpha_p), np.cos(alpha - alpha_p)
    c_mm = -ca * sp * sd
    if mutate:
        c_mm = -c_mm
    return sa * cp * sd + c_mm + sa * sp * cd + ca * cp * cd


def check_per_k_oracle(samples: int = 10000, seed: int = 0, mutate: bool = False) -> CheckRow:
    """Closed-form per-k factor vs 2x2 eigendecomposition evolution."""
    rng = np.random.default_rng(seed)
    e1 = rng.uniform(0, 6, samples)
    e2 = rng.uniform(0, 6, samples)
    a1 = rng.uniform(-np.pi, np.pi, samples)
    a2 = rng.uniform(-np.pi, np.pi, samples)
    t = rng.uniform(-8, 8, samples)
    numeric = _overlap_2x2_batch(e1, a1, e2, a2, t)
    s1, sd = np.sin(a1), np.sin(a1 - a2)
    c1, cd = np.cos(a1), np.cos(a1 - a2)
    s2, c2 = np.sin(a2), np.cos(a2)
    c_mm = -c1 * s2 * sd
    if mutate:
        c_mm = -c_mm
    closed = (
        s1 * c2 * sd * np.exp(1j * (e1 + e2) * t)
        + c_mm * np.exp(-1j * (e1 + e2) * t)
        + s1 * s2 * cd * np.exp(1j * (e1 - e2) * t)
        + c1 * c2 * cd * np.exp(-1j * (e1 - e2) * t)
    )
    dev = float(np.max(np.abs(numeric - closed)))
    return CheckRow("per-k oracle vs closed form", dev, 1e-12, dev <= 1e-12,
                    note=f"{samples} random samples")


def check_unitarity(pairs: int = 200, seed: int = 1, mutate: bool = False) -> CheckRow:
    """r(0) = 1 and |r(t)| <= 1 over random sector pairs and couplings."""
    rng = np.random.default_rng(seed)
    worst0, worst1 = 0.0, 0.0
    for _ in range(pairs):
        n = 2 * int(rng.integers(3, 200))
        cfg = ChainConfig(n=n, lam_ref=float(rng.uniform(0.1, 2.5)))
        s = build_sector(cfg, int(rng.integers(0, 3)), int(rng.integers(0, 3)))
        sp = build_sector(cfg, int(rng.integers(0, 3)), int(rng.integers(0, 3)))
        if mutate:
            q = _coeff_sum_with_mutation(s.alpha, sp.alpha, mutate=True)
            worst0 = max(worst0, float(np.max(np.abs(np.prod(q) - 1.0))))
        else:
            worst0 = max(worst0, abs(r_factor(s, sp, 0.0) - 1.0))
        worst1 = max(worst1, abs(r_factor(s, sp, float(rng.uniform(-40, 40)))) - 1.0)
    passed = worst0 <= 1e-12 and worst1 <= 1e-9
    return CheckRow("unitarity r(0)=1, |r|<=1", max(worst0, worst1), 1e-9, passed,
                    note=f"{pairs} random sector pairs")


def check_fk_identity(samples: int = 200, seed: int = 2) -> CheckRow:
    """|r_factor|^2 vs the squared-bracket product, randomized small N."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        n = 2 * int(rng.integers(2, 33))
        cfg = ChainConfig(n=n, lam_ref=float(rng.uniform(0.1, 2.5)))
        s, sp = build_sector(cfg, 1, 0), build_sector(cfg, 0, 1)
        t = float(rng.uniform(0, 25))
        worst = max(worst, abs(abs(r_factor(s, sp, t)) ** 2 - r_squared_fk(s, sp, t)))
    return CheckRow("F_k product identity", worst, 1e-10, worst <= 1e-10,
                    note=f"{samples} random (N, lam, t) samples")


def check_spin_ed(n: int = 10, tol: float = 0.15) -> CheckRow:
    """Product formula vs 2^N exact diagonalisation at the critical point."""
    times = np.linspace(0, 5, 26)
    cfg = ChainConfig(n=n, lam_ref=1.0)
    s, sp = build_sector(cfg, 1, 0), build_sector(cfg, 0, 1)
    r_prod = np.abs(r_values(s, sp, times)) ** 2
    r_ed = np.abs(spin_chain_ed(n, cfg.dressed(1, 0), cfg.dressed(0, 1), times, lam_ref=1.0)) ** 2
    dev = float(np.max(np.abs(r_ed - r_prod)))
    return CheckRow(f"spin-chain ED consistency (N={n})", dev, tol, dev <= tol,
                    note="boundary-sector gap, finite-size")


def check_joint_two_time(trials: int = 6, seed: int = 3) -> CheckRow:
    """Analytic second-order sum vs exact joint evolution, random states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        cfg = ChainConfig(n=10, lam_ref=float(rng.uniform(0.5, 1.6)),
                          omega2=float(rng.uniform(1, 5)), omega1=float(rng.uniform(1, 5)))
        m1, m2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        state = FieldState.product(
            rng.normal(size=m1 + 1) + 1j * rng.normal(size=m1 + 1),
            rng.normal(size=m2 + 1) + 1j * rng.normal(size=m2 + 1),
        )
        labels = {(m, n) for m in range(m1 + 1) for n in range(m2 + 1)}
        table = SectorTable(cfg, labels)
        sim = JointSimulator(cfg, {mn: table.sector(mn) for mn in labels})
        for t in rng.uniform(0, 6, 2):
            _, s_joint = sim.two_time(state.c, state.d, float(t))
            worst = max(worst, abs(second_order(state, table, float(t)) - s_joint))
    return CheckRow("joint two-time cross-check", worst, 1e-8, worst <= 1e-8,
                    note=f"{trials} random truncated states")


def check_bound_arithmetic(n: int = 8000) -> CheckRow:
    """Cutoff weight E(k_c) vs its brute-force momentum sum."""
    worst = 0.0
    for n_c in (n // 10, n // 25, 7):
        brute = float(np.sum((2.0 * np.pi * np.arange(1, n_c + 1) / n) ** 2))
        worst = max(worst, abs(cutoff_weight(n, n_c) - brute) / brute)
    return CheckRow("cutoff weight E(k_c) arithmetic", worst, 1e-12, worst <= 1e-12,
                    note="closed form vs brute sum, relative")


def report_gaussian_envelope(n: int = 8000) -> CheckRow:
    """Informational: measured |r|^2 against the printed envelope exp(-gamma t^2)."""
    cfg = ChainConfig(n=n, lam_ref=1.0)
    bp = decay_bound(cfg)
    t_star = short_time_cutoff(cfg)
    times = np.geomspace(1e-3, t_star, 40)
    s, sp = build_sector(cfg, 1, 0), build_sector(cfg, 0, 1)
    r2 = np.abs(r_values(s, sp, times)) ** 2
    excess = float(np.max(r2 - (bp.envelope(times) + 1e-6)))
    return CheckRow(
        "gaussian envelope (documented rate)", excess, 0.0, excess <= 0.0,
        note=f"gamma={bp.gamma:.4g}; positive value = envelope undercut by that much",
        informational=True,
    )


def run_all(samples: int = 10000, ed_n: int = 10, mutate: bool = False) -> list[CheckRow]:
    rows = [
        check_per_k_oracle(samples=samples, mutate=mutate),
        check_unitarity(mutate=mutate),
        check_fk_identity(),
        check_spin_ed(n=ed_n),
        check_joint_two_time(),
        check_bound_arithmetic(),
        report_gaussian_envelope(),
    ]
    return rows


def failed(rows: list[CheckRow]) -> list[CheckRow]:
    return [r for r in rows if not r.passed and not r.informational]
