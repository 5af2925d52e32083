"""Two-mode field correlations dressed by the chain's decoherence factors.

The combined-mode operator is A = a1 + i a2.  With the chain prepared in the
reference ground state and the two field modes in arbitrary pure states
``sum_m c_m |m>`` and ``sum_n d_n |n>``, the first- and second-order two-time
correlation functions are finite sums of decoherence factors
``r^{(m,n)}_{(m',n')}(t)`` with amplitude-bilinear weights.  This module
assembles those sums literally, term by term, with out-of-range Fock indices
contributing exactly zero (guards, not padding).

Frames: the printed form of the first-order sum ("as-printed") carries no
free-evolution phases; the optional "lab" frame multiplies e^{i omega1 t} /
e^{i omega2 t} onto the mode-1/mode-2 channels.  The second-order sum only
ever involves the relative phase e^{+-i (omega1-omega2) t} and is frame
independent.

The degree of coherence is g2(t) = second / (I(0) * I(t)) where I is the
equal-time intensity <A^dag A>(t).  I's photon-exchange channel is weighted
so that the half-half input state reduces *exactly* to the closed form

    g2(t) = (1/2) (1 + Re(r e^{i dw t})) / (1 - Im(r e^{i dw t})),

which is the reproduction target of this package (see g2_specialized); the
same convention makes the decoupled-chain limit (all r = 1) come out as
(1/2)(1+cos)/(1-sin), whose poles are reported as flagged samples rather
than fabricated values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .decoherence import ComplexSeries, r_values
from .spectrum import ChainConfig, DressedSector, build_sector

_NORM_TOL = 1e-12
_DEN_TOL = 1e-12


@dataclass(frozen=True)
class FieldState:
    """Truncated pure states of the two modes: amplitudes over Fock levels 0..M."""

    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        d = np.asarray(self.d, dtype=complex)
        for name, a in (("c", c), ("d", d)):
            if a.ndim != 1 or len(a) < 2:
                raise ValueError(f"amplitude vector {name} needs truncation M >= 1")
            nrm = np.sum(np.abs(a) ** 2)
            if abs(nrm - 1.0) > _NORM_TOL:
                raise ValueError(f"amplitude vector {name} is not normalised: |.|^2 = {nrm!r}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def vacuum(cls) -> "FieldState":
        v = np.array([1.0, 0.0])
        return cls(c=v, d=v)

    @classmethod
    def half_half(cls) -> "FieldState":
        v = np.array([1.0, 1.0]) / np.sqrt(2.0)
        return cls(c=v, d=v)

    @classmethod
    def coherent(cls, alpha: complex, cutoff: int = 12) -> "FieldState":
        """Both modes in |alpha>, truncated at ``cutoff`` and renormalised.

        cutoff=12 keeps the dropped tail mass below 1e-10 for alpha = 1.
        """
        m = np.arange(cutoff + 1)
        amps = np.array([alpha**j / np.sqrt(factorial(j)) for j in m], dtype=complex)
        amps /= np.sqrt(np.sum(np.abs(amps) ** 2))
        return cls(c=amps, d=amps)

    @classmethod
    def product(cls, c, d) -> "FieldState":
        c = np.asarray(c, dtype=complex)
        d = np.asarray(d, dtype=complex)
        return cls(c=c / np.sqrt(np.sum(np.abs(c) ** 2)),
                   d=d / np.sqrt(np.sum(np.abs(d) ** 2)))


@dataclass(frozen=True)
class Term:
    """One summand: weight * r^{sup}_{sub}(t) * exp(i phase * dw * t).

    ``sup is None`` marks a constant term (no decoherence factor); ``lab_mode``
    tags which free-evolution phase the lab frame would attach (first order
    only; 0 = none).
    """

    weight: complex
    sup: tuple | None
    sub: tuple | None
    phase: int = 0
    lab_mode: int = 0


def _amp(a: np.ndarray, i: int) -> complex:
    return a[i] if 0 <= i < len(a) else 0.0


def first_order_terms(state: FieldState) -> list[Term]:
    """Summands of <A^dag(t) A(0)>."""
    c, d = state.c, state.d
    terms = []
    for m in range(len(c)):
        for n in range(len(d)):
            w_mn = abs(c[m]) ** 2 * abs(d[n]) ** 2
            if w_mn != 0 and m >= 1:
                terms.append(Term(w_mn * m, (m, n), (m - 1, n), lab_mode=1))
            if w_mn != 0 and n >= 1:
                terms.append(Term(w_mn * n, (m, n), (m, n - 1), lab_mode=2))
            # photon-exchange channels
            if m >= 1:
                w = -1j * np.conj(_amp(c, m - 1)) * c[m] * np.conj(_amp(d, n + 1)) * d[n]
                w *= np.sqrt(m * (n + 1))
                if w != 0:
                    terms.append(Term(w, (m - 1, n + 1), (m - 1, n), lab_mode=2))
            if n >= 1:
                w = 1j * np.conj(_amp(c, m + 1)) * c[m] * np.conj(_amp(d, n - 1)) * d[n]
                w *= np.sqrt((m + 1) * n)
                if w != 0:
                    terms.append(Term(w, (m + 1, n - 1), (m, n - 1), lab_mode=1))
    return terms


def second_order_terms(state: FieldState) -> list[Term]:
    """Summands of <A^dag A^dag(t) A(t) A>, grouped exactly as the analytic sum."""
    c, d = state.c, state.d
    terms = []
    for m in range(len(c)):
        for n in range(len(d)):
            w_mn = abs(c[m]) ** 2 * abs(d[n]) ** 2
            if w_mn != 0:
                if (m + n) * (m + n - 1) != 0:
                    terms.append(Term(w_mn * (m + n) * (m + n - 1), None, None))
                if m * n != 0:
                    terms.append(Term(w_mn * m * n, (m - 1, n), (m, n - 1), phase=-1))
                    terms.append(Term(w_mn * m * n, (m, n - 1), (m - 1, n), phase=+1))
            # single-exchange group, raising mode 1
            w1 = 1j * np.conj(_amp(c, m + 1)) * c[m] * np.conj(_amp(d, n - 1)) * d[n]
            if n >= 1 and w1 != 0:
                root = np.sqrt((m + 1) * n)
                if m + n - 1 != 0:
                    terms.append(Term(w1 * (m + n - 1) * root, None, None))
                if m >= 1:
                    terms.append(Term(w1 * m * root, (m, n - 1), (m - 1, n), phase=+1))
                if n >= 2:
                    terms.append(Term(w1 * (n - 1) * root, (m + 1, n - 2), (m, n - 1), phase=+1))
            # single-exchange group, raising mode 2
            w2 = -1j * np.conj(_amp(c, m - 1)) * c[m] * np.conj(_amp(d, n + 1)) * d[n]
            if m >= 1 and w2 != 0:
                root = np.sqrt(m * (n + 1))
                if m + n - 1 != 0:
                    terms.append(Term(w2 * (m + n - 1) * root, None, None))
                if m >= 2:
                    terms.append(Term(w2 * (m - 1) * root, (m - 2, n + 1), (m - 1, n), phase=-1))
                if n >= 1:
                    terms.append(Term(w2 * n * root, (m - 1, n), (m, n - 1), phase=-1))
            # double-exchange groups
            if n >= 2:
                w = -np.conj(_amp(c, m + 2)) * c[m] * np.conj(_amp(d, n - 2)) * d[n]
                w *= np.sqrt((m + 2) * (m + 1) * n * (n - 1))
                if w != 0:
                    terms.append(Term(w, (m + 1, n - 2), (m, n - 1), phase=+1))
            if m >= 2:
                w = -np.conj(_amp(c, m - 2)) * c[m] * np.conj(_amp(d, n + 2)) * d[n]
                w *= np.sqrt((m - 1) * m * (n + 1) * (n + 2))
                if w != 0:
                    terms.append(Term(w, (m - 2, n + 1), (m - 1, n), phase=-1))
    return terms


def intensity_terms(state: FieldState) -> list[Term]:
    """Summands of the equal-time intensity I(t) = <A^dag A>(t).

    The photon-exchange channel enters with weight 2 so that the half-half
    state reduces exactly to I(t) = 1 - Im(r^{(1,0)}_{(0,1)} e^{i dw t}),
    the denominator of the closed-form g2.
    """
    c, d = state.c, state.d
    terms = []
    n_phot = sum(
        abs(c[m]) ** 2 * abs(d[n]) ** 2 * (m + n)
        for m in range(len(c))
        for n in range(len(d))
    )
    if n_phot != 0:
        terms.append(Term(n_phot, None, None))
    for m in range(len(c)):
        for n in range(len(d)):
            if n >= 1:
                w = 2j * np.conj(_amp(c, m + 1)) * c[m] * np.conj(_amp(d, n - 1)) * d[n]
                w *= np.sqrt((m + 1) * n)
                if w != 0:
                    terms.append(Term(w, (m + 1, n - 1), (m, n), phase=+1))
            if m >= 1:
                w = -2j * np.conj(_amp(c, m - 1)) * c[m] * np.conj(_amp(d, n + 1)) * d[n]
                w *= np.sqrt(m * (n + 1))
                if w != 0:
                    terms.append(Term(w, (m - 1, n + 1), (m, n), phase=-1))
    return terms


def needed_sectors(state: FieldState) -> set:
    """Every decoherence-factor index pair the correlation sums can touch.

    Closed over first order, second order and the equal-time intensity, so a
    table built from these pairs never misses an entry.
    """
    pairs = set()
    for t in first_order_terms(state) + second_order_terms(state) + intensity_terms(state):
        if t.sup is not None:
            pairs.add((t.sup, t.sub))
    return pairs


def sector_labels(pairs) -> set:
    return {mn for pair in pairs for mn in pair}


class SectorTable:
    """Dressed sectors of one chain configuration, with cached r lookups."""

    def __init__(self, cfg: ChainConfig, labels=()):
        self.cfg = cfg
        self._sectors: dict[tuple, DressedSector] = {}
        self.ensure(labels)

    def ensure(self, labels) -> "SectorTable":
        for mn in labels:
            if mn not in self._sectors:
                self._sectors[mn] = build_sector(self.cfg, *mn)
        return self

    @classmethod
    def for_state(cls, cfg: ChainConfig, state: FieldState) -> "SectorTable":
        return cls(cfg, sector_labels(needed_sectors(state)))

    def sector(self, mn: tuple) -> DressedSector:
        try:
            return self._sectors[mn]
        except KeyError:
            raise KeyError(f"sector {mn} missing from table; build it via ensure()") from None

    def r_grid(self, pairs, times: np.ndarray) -> dict:
        """r(t) arrays for every index pair, deduplicated via conjugation."""
        times = np.asarray(times, dtype=float)
        out = {}
        for pair in sorted(set(pairs)):
            if pair in out:
                continue
            sup, sub = pair
            swapped = (sub, sup)
            if swapped in out:
                out[pair] = np.conj(out[swapped])
                continue
            if sup == sub:
                out[pair] = np.ones(times.shape, dtype=complex)
                continue
            out[pair] = r_values(self.sector(sup), self.sector(sub), times)
        return out


def _eval_terms(
    terms: list[Term],
    rgrid: dict,
    times: np.ndarray,
    delta_omega: float,
    frame: str = "as-printed",
    omega1: float = 0.0,
    omega2: float = 0.0,
) -> np.ndarray:
    total = np.zeros(times.shape, dtype=complex)
    for term in terms:
        val = np.full(times.shape, term.weight, dtype=complex)
        if term.sup is not None:
            val = val * rgrid[(term.sup, term.sub)]
        if term.phase:
            val = val * np.exp(1j * term.phase * delta_omega * times)
        if frame == "lab" and term.lab_mode:
            w = omega1 if term.lab_mode == 1 else omega2
            val = val * np.exp(1j * w * times)
        total += val
    return total


def _frame_check(frame: str) -> str:
    if frame not in ("as-printed", "lab"):
        raise ValueError(f"frame must be 'as-printed' or 'lab', got {frame!r}")
    return frame


@dataclass(frozen=True)
class CorrelationResult:
    """Batch correlation output for one state and time grid."""

    g1: ComplexSeries
    g2num: ComplexSeries
    times: np.ndarray
    g2: np.ndarray
    flagged: np.ndarray = field(repr=False)
    frame: str = "as-printed"


def correlation_series(
    state: FieldState,
    table: SectorTable,
    times,
    frame: str = "as-printed",
) -> CorrelationResult:
    """First order, second order and g2 over a time grid (single r pass)."""
    _frame_check(frame)
    times = np.asarray(times, dtype=float)
    t1 = first_order_terms(state)
    t2 = second_order_terms(state)
    ti = intensity_terms(state)
    pairs = {(t.sup, t.sub) for t in t1 + t2 + ti if t.sup is not None}
    table.ensure(sector_labels(pairs))
    rgrid = table.r_grid(pairs, times)
    dw = table.cfg.delta_omega
    g1 = _eval_terms(t1, rgrid, times, dw, frame, table.cfg.omega1, table.cfg.omega2)
    g2num = _eval_terms(t2, rgrid, times, dw)
    inten = _eval_terms(ti, rgrid, times, dw)

    rgrid0 = table.r_grid(pairs, np.zeros(1))
    i0 = _eval_terms(ti, rgrid0, np.zeros(1), dw)[0]
    den = np.real(i0) * np.real(inten)
    flagged = np.abs(den) <= _DEN_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = np.where(flagged, np.nan, np.real(g2num) / np.where(flagged, 1.0, den))
    return CorrelationResult(
        g1=ComplexSeries(times, g1),
        g2num=ComplexSeries(times, g2num),
        times=times,
        g2=g2,
        flagged=flagged,
        frame=frame,
    )


# --- scalar entry points ------------------------------------------------------


def first_order(state: FieldState, table: SectorTable, t: float, frame: str = "as-printed") -> complex:
    """<A^dag(t) A(0)> at a single time."""
    res = correlation_series(state, table, np.array([float(t)]), frame)
    return complex(res.g1.values[0])


def second_order(state: FieldState, table: SectorTable, t: float) -> complex:
    """<A^dag A^dag(t) A(t) A> at a single time (analytically real)."""
    res = correlation_series(state, table, np.array([float(t)]))
    return complex(res.g2num.values[0])


def intensity(state: FieldState, table: SectorTable, t: float) -> float:
    """Equal-time intensity I(t), in the closed-form-matching convention."""
    times = np.array([float(t)])
    ti = intensity_terms(state)
    pairs = {(x.sup, x.sub) for x in ti if x.sup is not None}
    table.ensure(sector_labels(pairs))
    rgrid = table.r_grid(pairs, times)
    return float(np.real(_eval_terms(ti, rgrid, times, table.cfg.delta_omega)[0]))


def g2(state: FieldState, table: SectorTable, t: float) -> float:
    """Second-order degree of coherence; NaN marks a flagged denominator."""
    res = correlation_series(state, table, np.array([float(t)]))
    return float(res.g2[0])


def g2_specialized(r_value: complex, phase: float) -> float:
    """Closed form for both modes in (|0>+|1>)/sqrt(2):

        g2 = (1/2) (1 + Re(r e^{i phase})) / (1 - Im(r e^{i phase})).

    Returns NaN when the denominator underflows (|1 - Im| <= 1e-12).
    """
    z = r_value * np.exp(1j * phase)
    den = 1.0 - z.imag
    if abs(den) <= _DEN_TOL:
        return float("nan")
    return 0.5 * (1.0 + z.real) / den
