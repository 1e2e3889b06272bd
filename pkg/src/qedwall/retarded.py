"""Closed-form retarded atom-wall energy shift and dipole-quadrupole mixing amplitude.

Every quantity here is defined up to a distance-independent constant: the
free-space shift is not included and gets added by the caller (see
:mod:`qedwall.static`).  Energies in atomic units with e = 1; chi = 2 |E_q| Z.

The T/U combinations that cancel to leading order at large chi are switched
to their Laurent expansions above ``CHI_HANDOFF``; the two agree to ~1e-12
there, while direct evaluation loses about chi^2 * 1e-16 relative accuracy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import hydrogen
from .errors import DegenerateChannelError, DomainError
from .hydrogen import AtomicConstants, DEFAULT_CONSTANTS, MixingChannel, VirtualChannel
from .specfun import t_function, u_function

CHI_HANDOFF = 100.0
CHI_WARN = 1e8


@dataclass(frozen=True)
class SignedGap:
    """Energy gap E_q = E_q - E_n with its sign function and step function."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise DomainError("gap must be finite")
        if self.value == 0:
            raise DegenerateChannelError("zero energy gap")

    @property
    def epsilon(self) -> int:
        return 1 if self.value > 0 else -1

    @property
    def theta_neg(self) -> int:
        return 1 if self.value < 0 else 0

    def chi(self, distance):
        return 2.0 * abs(self.value) * np.asarray(distance, dtype=float)


def _gap(gap) -> SignedGap:
    return gap if isinstance(gap, SignedGap) else SignedGap(float(gap))


def _distance(z):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("distance must be positive and finite")
    return arr


# ---------------------------------------------------------------------------
# Laurent arithmetic for the large-chi forms
# ---------------------------------------------------------------------------

_LAURENT_ORDER = 10


def _t_series() -> dict[int, Fraction]:
    # T ~ sum_k (-1)^k (2k)! chi^-(2k+1)
    return {2 * k + 1: Fraction((-1) ** k * math.factorial(2 * k)) for k in range(_LAURENT_ORDER)}


def _u_series() -> dict[int, Fraction]:
    # U = T' ~ sum_k (-1)^(k+1) (2k+1)! chi^-(2k+2)
    return {2 * k + 2: Fraction((-1) ** (k + 1) * math.factorial(2 * k + 1)) for k in range(_LAURENT_ORDER)}


def _combine(*parts: tuple[dict[int, Fraction], dict[int, Fraction] | None]) -> list[tuple[int, float]]:
    """Sum of poly_i(1/chi) * series_i; each dict maps inverse power -> coefficient."""
    total: dict[int, Fraction] = {}
    for poly, series in parts:
        for p, c in poly.items():
            if series is None:
                total[p] = total.get(p, Fraction(0)) + c
                continue
            for s, d in series.items():
                total[p + s] = total.get(p + s, Fraction(0)) + c * d
    cutoff = 2 * _LAURENT_ORDER - 2
    return sorted((p, float(c)) for p, c in total.items() if c != 0 and p <= cutoff)


_T, _U = _t_series(), _u_series()
F = Fraction
# Each entry: (direct evaluation, Laurent coefficients).  Polynomials are in 1/chi.
_SMOOTH = {
    # T/chi - 1/chi^2
    "B": _combine(({1: F(1)}, _T), ({2: F(-1)}, None)),
    # 1/chi^2 + (2 - chi^2) T / chi^3 - 2 U / chi^2
    "A": _combine(({2: F(1)}, None), ({3: F(2), 1: F(-1)}, _T), ({2: F(-2)}, _U)),
    # 2/chi^3 - T/chi^2 + U/chi
    "M1": _combine(({3: F(2)}, None), ({2: F(-1)}, _T), ({1: F(1)}, _U)),
    # -4/chi^3 + 3 (chi^2 - 2) T / chi^4 + (6 - chi^2) U / chi^3
    "M2": _combine(({3: F(-4)}, None), ({2: F(3), 4: F(-6)}, _T), ({3: F(6), 1: F(-1)}, _U)),
}


def _smooth_direct(kind: str, x: np.ndarray) -> np.ndarray:
    t = t_function(x)
    u = u_function(x)
    if kind == "B":
        return t / x - 1.0 / x**2
    if kind == "A":
        return 1.0 / x**2 + (2.0 - x**2) * t / x**3 - 2.0 * u / x**2
    if kind == "M1":
        return 2.0 / x**3 - t / x**2 + u / x
    if kind == "M2":
        return -4.0 / x**3 + 3.0 * (x**2 - 2.0) * t / x**4 + (6.0 - x**2) * u / x**3
    raise KeyError(kind)


def _smooth_laurent(kind: str, x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    return sum(c * inv**p for p, c in _SMOOTH[kind])


def smooth_part(kind: str, chi) -> np.ndarray:
    """Non-oscillatory T/U combination ``kind`` in {"B", "A", "M1", "M2"}.

    Direct evaluation below ``CHI_HANDOFF``, Laurent series above it.
    """
    x = np.atleast_1d(np.asarray(chi, dtype=float))
    out = np.empty_like(x)
    lo = x <= CHI_HANDOFF
    if np.any(lo):
        out[lo] = _smooth_direct(kind, x[lo])
    if np.any(~lo):
        out[~lo] = _smooth_laurent(kind, x[~lo])
    return out if np.ndim(chi) else float(out[0])


# oscillatory pieces multiplying pi * Theta(-E_q); Taylor series below x = 1
# where the closed forms cancel.

_SERIES_CUT = 1.0
_SERIES_TERMS = 12


def _series(coeffs, x, start_power):
    out = np.zeros_like(x)
    for k, c in reversed(list(enumerate(coeffs))):
        out = out * x * x + c
    return out * x**start_power


# h = (1 - cos x)/x = sum_{k>=1} (-1)^(k+1) x^(2k-1) / (2k)!
_H2_SERIES = [(-1) ** (k + 1) * (2 * k - 1) * (2 * k - 2) / math.factorial(2 * k) for k in range(2, _SERIES_TERMS + 2)]
# g = (1 - cos x - x sin x)/x^2 = sum_{m>=0} (-1)^(m+1) (2m+1) x^(2m) / (2m+2)!
_G_SERIES = [(-1) ** (m + 1) * (2 * m + 1) / math.factorial(2 * m + 2) for m in range(_SERIES_TERMS)]
_G2_SERIES = [
    (-1) ** (m + 1) * (2 * m + 1) * (2 * m) * (2 * m - 1) / math.factorial(2 * m + 2)
    for m in range(1, _SERIES_TERMS + 1)
]


def _piecewise(x, closed, coeffs, start_power):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    lo = x < _SERIES_CUT
    out[lo] = _series(coeffs, x[lo], start_power)
    out[~lo] = closed(x[~lo])
    return out


def _h(x):
    # (1 - cos x)/x
    return 2.0 * np.sin(np.asarray(x) / 2) ** 2 / x


def _h2(x):
    # d^2/dx^2 (1 - cos x)/x
    def closed(x):
        return np.cos(x) / x - 2.0 * np.sin(x) / x**2 + 4.0 * np.sin(x / 2) ** 2 / x**3

    return _piecewise(x, closed, _H2_SERIES, 1)


def _g(x):
    # (1 - cos x - x sin x)/x^2
    def closed(x):
        return (2.0 * np.sin(x / 2) ** 2 - x * np.sin(x)) / x**2

    return _piecewise(x, closed, _G_SERIES, 0)


def _g2(x):
    # d^2/dx^2 of _g
    def closed(x):
        s, c = np.sin(x), np.cos(x)
        return s / x + 3.0 * c / x**2 - 6.0 * s / x**3 + 12.0 * np.sin(x / 2) ** 2 / x**4

    return _piecewise(x, closed, _G2_SERIES, 0)


def _maybe_scalar(arr, like):
    return arr if np.ndim(like) else float(np.asarray(arr).reshape(-1)[0])


def _warn_chi(x):
    if np.any(x > CHI_WARN):
        warnings.warn(f"chi > {CHI_WARN:g}: closed forms rely on the large-chi expansion", RuntimeWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# channel brackets
# ---------------------------------------------------------------------------

def _bracket_b(x, eps, th):
    # -I_1/E - 1/chi^2
    return (eps - 1) * math.pi / (2 * x) + smooth_part("B", x) + math.pi * th * _h(x)


def _bracket_a(x, eps, th):
    # I_2/E
    return (eps - 1) * math.pi / x**3 + smooth_part("A", x) + math.pi * th * _h2(x)


def _bracket_m1(x, eps, th):
    # 2 eps/chi^3 + J_1/E^2
    return (eps - 1) * math.pi / (2 * x**2) + eps * smooth_part("M1", x) + math.pi * th * _g(x)


def _bracket_m2(x, eps, th):
    # -J_2/E^2
    return (eps - 1) * 3 * math.pi / x**4 + eps * smooth_part("M2", x) + math.pi * th * _g2(x)


# ---------------------------------------------------------------------------
# the four L-integrals
# ---------------------------------------------------------------------------

def i1(gap, z):
    """int_0^inf dL cos(2 L Z) ln|E_q + L|, Z-independent part dropped."""
    g = _gap(gap)
    x = g.chi(_distance(z))
    _warn_chi(x)
    e, eps, th = g.value, g.epsilon, g.theta_neg
    out = e * (math.pi * (1 - eps) / (2 * x) - t_function(x) / x - math.pi * th * _h(x))
    return _maybe_scalar(out, z)


def i2(gap, z):
    """-d^2 I_1 / d chi^2."""
    g = _gap(gap)
    x = g.chi(_distance(z))
    _warn_chi(x)
    e, eps, th = g.value, g.epsilon, g.theta_neg
    out = e * _bracket_a(x, eps, th)
    return _maybe_scalar(out, z)


def j1(gap, z):
    """int_0^inf dL L sin(2 L Z) ln|E_q + L|, Z-independent part dropped."""
    g = _gap(gap)
    x = g.chi(_distance(z))
    _warn_chi(x)
    e, eps, th = g.value, g.epsilon, g.theta_neg
    out = e**2 * (_bracket_m1(x, eps, th) - 2.0 * eps / x**3)
    return _maybe_scalar(out, z)


def j2(gap, z):
    """-d^2 J_1 / d chi^2."""
    g = _gap(gap)
    x = g.chi(_distance(z))
    _warn_chi(x)
    e, eps, th = g.value, g.epsilon, g.theta_neg
    out = -(e**2) * _bracket_m2(x, eps, th)
    return _maybe_scalar(out, z)


# ---------------------------------------------------------------------------
# assembled shifts
# ---------------------------------------------------------------------------

def channel_energy_shift(channel: VirtualChannel, z):
    """Contribution of one virtual level to the retarded shift."""
    g = _gap(channel.gap)
    x = g.chi(_distance(z))
    _warn_chi(x)
    e, eps, th = g.value, g.epsilon, g.theta_neg
    b = channel.d_par_sq - 2.0 * channel.d_z_sq
    a = channel.d_par_sq + 2.0 * channel.d_z_sq
    out = e**3 * (b * _bracket_b(x, eps, th) - a * _bracket_a(x, eps, th)) / (2.0 * math.pi)
    return _maybe_scalar(out, z)


def channel_mixing_element(channel: MixingChannel, z):
    """Contribution of one virtual level to the retarded mixing amplitude."""
    g = _gap(channel.gap)
    x = g.chi(_distance(z))
    _warn_chi(x)
    e, eps, th = g.value, g.epsilon, g.theta_neg
    out = e**4 * (channel.t1 * _bracket_m1(x, eps, th) + channel.t2 * _bracket_m2(x, eps, th)) / (4.0 * math.pi)
    return _maybe_scalar(out, z)


def _sum(terms: Iterable, z):
    total = np.zeros(np.shape(z))
    for t in terms:
        total = total + t
    return _maybe_scalar(total, z)


def energy_shift(
    reference,
    z,
    channels: Sequence[VirtualChannel] | None = None,
    *,
    n_max: int = 2,
    constants: AtomicConstants = DEFAULT_CONSTANTS,
):
    """Retarded distance-dependent shift of ``reference`` (a.u.).

    Parameters
    ----------
    reference : LevelLabel or str
        Reference level; only used to build the channel table when
        ``channels`` is None.
    z : float or array_like
        Distance from the wall in bohr.
    channels : sequence of VirtualChannel, optional
        Explicit channel table.  Defaults to
        ``hydrogen.dipole_channels(reference, n_max, constants)``.

    Returns
    -------
    float or ndarray
        The shift with the distance-independent constant removed.
    """
    if channels is None:
        channels = hydrogen.dipole_channels(reference, n_max, constants)
    z = _distance(z) if np.ndim(z) else float(_distance(z))
    return _sum((channel_energy_shift(ch, z) for ch in channels), z)


def mixing_element(
    m,
    n,
    z,
    channels: Sequence[MixingChannel] | None = None,
    *,
    n_max: int = 2,
    constants: AtomicConstants = DEFAULT_CONSTANTS,
):
    """Retarded dipole-quadrupole mixing amplitude <m|dH|n> (a.u.).

    Gaps are measured from ``n``.  With ``channels`` None the table comes from
    ``hydrogen.mixing_channels(m, n, n_max, constants)``.
    """
    if channels is None:
        channels = hydrogen.mixing_channels(m, n, n_max, constants)
    z = _distance(z) if np.ndim(z) else float(_distance(z))
    return _sum((channel_mixing_element(ch, z) for ch in channels), z)
