"""Decoherence factor of the dressed chain: product formula and decay bound.

The overlap r(t) = <G| exp(+i H1 t) exp(-i H2 t) |G> between the evolutions of
the reference ground state under two dressed sectors factorises over momentum
pairs.  Each factor is a four-term phase sum

    f_k(t) = sum_{a,b=+-} C_{a,b,k} exp(i (a*eps1_k + b*eps2_k) t)

whose real coefficients are trigonometric products of the sector mixing
angles and add up to 1, so r(0) = 1 and |r(t)| <= 1 mode by mode.

For N in the thousands the product of sub-unit factors underflows double
precision long before anything interesting stops happening, so products are
accumulated as complex logarithms in fixed ascending-k order and only
exponentiated at the end (an underflowing magnitude comes back as an exact
0.0, never as garbage).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectrum import ChainConfig, DressedSector, build_sector


@dataclass(frozen=True)
class CoeffQuad:
    """The four per-k overlap coefficients C_{+,+}, C_{-,-}, C_{+,-}, C_{-,+}."""

    c_pp: float
    c_mm: float
    c_pm: float
    c_mp: float

    def __post_init__(self):
        s = self.c_pp + self.c_mm + self.c_pm + self.c_mp
        if abs(s - 1.0) > 1e-12:
            raise ValueError(f"overlap coefficients must sum to 1, got {s!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.c_pp, self.c_mm, self.c_pm, self.c_mp])


def coeffs(alpha: float, alpha_p: float) -> CoeffQuad:
    """Overlap coefficients for one momentum, from the two sector angles."""
    sa, ca = np.sin(alpha), np.cos(alpha)
    sp, cp = np.sin(alpha_p), np.cos(alpha_p)
    sd, cd = np.sin(alpha - alpha_p), np.cos(alpha - alpha_p)
    return CoeffQuad(
        c_pp=sa * cp * sd,
        c_mm=-ca * sp * sd,
        c_pm=sa * sp * cd,
        c_mp=ca * cp * cd,
    )


def _check_pair(s: DressedSector, s_p: DressedSector) -> None:
    if not s.same_grid(s_p):
        raise ValueError(
            f"sector grids differ: ({s.m},{s.n}) has {len(s.k_grid)} momenta, "
            f"({s_p.m},{s_p.n}) has {len(s_p.k_grid)}"
        )


def _coeff_arrays(s: DressedSector, s_p: DressedSector):
    """Vectorised coefficient quads over the whole grid, shape (4, K)."""
    sa, ca = np.sin(s.alpha), np.cos(s.alpha)
    sp, cp = np.sin(s_p.alpha), np.cos(s_p.alpha)
    sd, cd = np.sin(s.alpha - s_p.alpha), np.cos(s.alpha - s_p.alpha)
    return np.stack([sa * cp * sd, -ca * sp * sd, sa * sp * cd, ca * cp * cd])


def _log_factors(s: DressedSector, s_p: DressedSector, times: np.ndarray) -> np.ndarray:
    """Complex log of the product of per-k factors; shape (T,).

    Accumulates in fixed ascending-k order: linear products over blocks of
    modes, extracting the magnitude into a running log after every block so
    the product can sink arbitrarily far below the double-precision floor
    without underflowing (|f_k| <= 1 for every mode).  Chunked over time so
    intermediates stay small.
    """
    c = _coeff_arrays(s, s_p)
    e_plus = s.eps + s_p.eps
    e_minus = s.eps - s_p.eps
    n_k = len(s.eps)
    out = np.empty(times.shape, dtype=complex)
    t_chunk = max(1, int(4e6 // max(n_k, 1)))
    k_block = 256  # a block's product stays far above the underflow floor
    with np.errstate(divide="ignore", invalid="ignore"):
        for lo in range(0, len(times), t_chunk):
            t = times[lo : lo + t_chunk, None]
            log_mag = np.zeros(t.shape[0])
            phasor = np.ones(t.shape[0], dtype=complex)
            for kb in range(0, n_k, k_block):
                sl = slice(kb, kb + k_block)
                ph_plus = np.exp(1j * e_plus[sl] * t)
                ph_minus = np.exp(1j * e_minus[sl] * t)
                f = (
                    c[0, sl] * ph_plus
                    + c[1, sl] * np.conj(ph_plus)
                    + c[2, sl] * ph_minus
                    + c[3, sl] * np.conj(ph_minus)
                )
                block = f.prod(axis=1)
                mag = np.abs(block)
                log_mag += np.log(mag)
                phasor *= np.where(mag > 0.0, block / np.where(mag > 0.0, mag, 1.0), 1.0)
            out[lo : lo + t_chunk] = log_mag + 1j * np.angle(phasor)
    return out


def r_factor(s: DressedSector, s_p: DressedSector, t: float) -> complex:
    """Decoherence factor r^{(m,n)}_{(m',n')}(t) on the sectors' common grid."""
    _check_pair(s, s_p)
    log_r = _log_factors(s, s_p, np.atleast_1d(float(t)))[0]
    if log_r.real == -np.inf:
        return 0.0 + 0.0j
    return complex(np.exp(log_r))


def r_values(s: DressedSector, s_p: DressedSector, times) -> np.ndarray:
    """Vectorised r(t) over a time array (plain ndarray, no series wrapper)."""
    _check_pair(s, s_p)
    times = np.asarray(times, dtype=float)
    log_r = _log_factors(s, s_p, times)
    with np.errstate(invalid="ignore"):
        vals = np.exp(log_r)
    vals[np.real(log_r) == -np.inf] = 0.0
    return vals


@dataclass(frozen=True)
class ComplexSeries:
    """A complex-valued function sampled on a strictly increasing time grid.

    Times are in units of 1/B.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.size == 0:
            raise ValueError("time grid must not be empty")
        if t.ndim != 1 or v.shape != t.shape:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


def r_series(s: DressedSector, s_p: DressedSector, times) -> ComplexSeries:
    """Decoherence-factor series; enforces the unit-modulus invariant."""
    vals = r_values(s, s_p, times)
    if np.any(np.abs(vals) > 1.0 + 1e-9):
        raise AssertionError("decoherence factor exceeded unit modulus")
    return ComplexSeries(times=np.asarray(times, dtype=float), values=vals)


def r_squared_fk(s: DressedSector, s_p: DressedSector, t: float) -> float:
    """|r(t)|^2 as the product of the explicit per-k brackets

        F_k = [sin^2(da) cos(e+ t) + cos^2(da) cos(e- t)]^2
            + [sin(sa) sin(da) sin(e+ t) - cos(sa) cos(da) sin(e- t)]^2

    with da/sa the difference/sum of the two mixing angles and e+- the
    sum/difference of the sector energies.  Algebraically identical to
    |r_factor|^2; evaluated independently as a cross-check of the
    coefficient route.
    """
    _check_pair(s, s_p)
    t = float(t)
    da = s.alpha - s_p.alpha
    sa = s.alpha + s_p.alpha
    e_plus = (s.eps + s_p.eps) * t
    e_minus = (s.eps - s_p.eps) * t
    re = np.sin(da) ** 2 * np.cos(e_plus) + np.cos(da) ** 2 * np.cos(e_minus)
    im = np.sin(sa) * np.sin(da) * np.sin(e_plus) - np.cos(sa) * np.cos(da) * np.sin(e_minus)
    f_k = re * re + im * im
    with np.errstate(divide="ignore"):
        log_f = np.log(f_k)
    total = log_f.sum()
    return 0.0 if total == -np.inf else float(np.exp(total))


# --- short-time Gaussian decay bound ----------------------------------------


@dataclass(frozen=True)
class BoundParams:
    """Cutoff data and Gaussian decay rate of the short-time bound.

    gamma multiplies t^2 (t in 1/B), i.e. the bound reads |r|^2 <= exp(-gamma t^2).
    """

    k_c: float
    n_c: int
    e_kc: float
    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("decay rate must be non-negative")

    def envelope(self, t) -> np.ndarray:
        """exp(-gamma t^2)."""
        t = np.asarray(t, dtype=float)
        return np.exp(-self.gamma * t * t)

    def holds(self, t, r_squared, tol: float = 1e-6):
        """Predicate |r|^2(t) <= exp(-gamma t^2) + tol.

        Only meaningful on the short-time window near criticality; outside it
        the inequality is not claimed.
        """
        return np.asarray(r_squared) <= self.envelope(t) + tol


def cutoff_weight(n: int, n_c: int) -> float:
    """Spectral weight E(k_c) = 4 pi^2 N_c (N_c+1) (2 N_c+1) / (6 N^2).

    Equals sum_{m=1}^{N_c} (2 pi m / N)^2 on the integer momentum grid.
    """
    return 4.0 * np.pi**2 * n_c * (n_c + 1) * (2 * n_c + 1) / (6.0 * n**2)


def decay_bound(cfg: ChainConfig, k_c: float = 2.0 * np.pi / 10.0) -> BoundParams:
    """Gaussian rate gamma = 4 B^2 (lam10 - lam01)^2 E(k_c) / (lam01 - 1)^2."""
    lam10 = cfg.dressed(1, 0)
    lam01 = cfg.dressed(0, 1)
    if lam01 == 1.0:
        raise ValueError("bound undefined at exact dressed criticality (lam_{0,1} = 1)")
    n_c = int(round(cfg.n * k_c / (2.0 * np.pi)))
    e_kc = cutoff_weight(cfg.n, n_c)
    gamma = 4.0 * cfg.b**2 * (lam10 - lam01) ** 2 * e_kc / (lam01 - 1.0) ** 2
    return BoundParams(k_c=k_c, n_c=n_c, e_kc=e_kc, gamma=gamma)


def short_time_cutoff(cfg: ChainConfig) -> float:
    """End of the short-time window: first zero of sin(2 B t |lam10 - 1|).

    The bound's derivation linearises that sine, so it is only asserted for
    t in (0, t*] with t* = pi / (2 B |lam10 - 1|).
    """
    lam10 = cfg.dressed(1, 0)
    if lam10 == 1.0:
        raise ValueError("short-time window undefined: lam_{1,0} = 1 exactly")
    return np.pi / (2.0 * cfg.b * abs(lam10 - 1.0))


def sector_pair(cfg: ChainConfig, mn, mn_p) -> tuple[DressedSector, DressedSector]:
    """Convenience: the two dressed sectors for a decoherence-factor pair."""
    return build_sector(cfg, *mn), build_sector(cfg, *mn_p)
