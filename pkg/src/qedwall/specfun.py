"""Sine and cosine integrals and the auxiliary pair T(chi), U(chi).

For x <= 8 the integrals are summed from their Taylor series.  Above the
switchover the auxiliary functions

    f(x) = int_0^inf sin(t) / (t + x) dt,   g(x) = int_0^inf cos(t) / (t + x) dt

are evaluated from the continued fraction of ``exp(w) E1(w)`` at ``w = -i x``
(``g + i f``), and

    Si(x) = pi/2 - f cos(x) - g sin(x),   Ci(x) = f sin(x) - g cos(x).

With these, T(chi) = sin Ci - cos Si + (pi/2) cos reduces identically to f(chi)
and U = dT/dchi to -g(chi), so neither carries cancellation at large chi.

All functions accept scalars or arrays and return the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
SWITCHOVER = 8.0

_TAYLOR_TERMS = 45
_CF_MAXITER = 400
_CF_TOL = 2e-16


@dataclass(frozen=True)
class Chi:
    """Dimensionless retardation parameter chi = 2 |gap| Z."""

    value: float

    def __post_init__(self):
        if not (self.value > 0 and np.isfinite(self.value)):
            raise DomainError(f"chi must be positive and finite, got {self.value!r}")

    @classmethod
    def from_gap(cls, gap: float, distance: float) -> "Chi":
        return cls(2.0 * abs(gap) * distance)

    def __float__(self) -> float:
        return float(self.value)


def _as_array(x, *, strict_positive: bool, name: str) -> np.ndarray:
    if isinstance(x, Chi):
        x = x.value
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: non-finite argument")
    if strict_positive:
        if np.any(arr <= 0):
            raise DomainError(f"{name}: argument must be > 0")
    elif np.any(arr < 0):
        raise DomainError(f"{name}: argument must be >= 0")
    return arr


def _taylor_si_ci(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Si = sum (-1)^k x^(2k+1) / ((2k+1)(2k+1)!),  Ci - gamma - ln x = sum_{k>=1} (-1)^k x^(2k) / (2k (2k)!)
    si = np.zeros_like(x)
    cin = np.zeros_like(x)
    term = x.copy()  # x^(2k+1)/(2k+1)!
    for k in range(_TAYLOR_TERMS):
        si += term / (2 * k + 1)
        # advance to x^(2k+2)/(2k+2)! for the cosine part
        term = -term * x / (2 * k + 2)
        cin += term / (2 * k + 2)
        term = term * x / (2 * k + 3)
    with np.errstate(divide="ignore"):
        ci = EULER_GAMMA + np.log(x) + cin
    return si, ci


def _aux_fg(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Auxiliary f, g by modified Lentz evaluation of the E1 continued fraction."""
    w = -1j * x
    b = w + 1.0
    c = np.full(x.shape, 1e300, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    for k in range(1, _CF_MAXITER):
        a = -float(k * k)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < _CF_TOL):
            break
    return h.imag, h.real


def aux_f(x):
    """Auxiliary function f(x) = int_0^inf sin t / (t + x) dt for x > 0."""
    arr = _as_array(x, strict_positive=True, name="aux_f")
    out = np.empty_like(arr)
    lo = arr <= SWITCHOVER
    if np.any(lo):
        xs = arr[lo]
        si, ci = _taylor_si_ci(xs)
        out[lo] = np.sin(xs) * ci - np.cos(xs) * (si - np.pi / 2)
    if np.any(~lo):
        out[~lo] = _aux_fg(arr[~lo])[0]
    return out if out.ndim else float(out)


def aux_g(x):
    """Auxiliary function g(x) = int_0^inf cos t / (t + x) dt for x > 0."""
    arr = _as_array(x, strict_positive=True, name="aux_g")
    out = np.empty_like(arr)
    lo = arr <= SWITCHOVER
    if np.any(lo):
        xs = arr[lo]
        si, ci = _taylor_si_ci(xs)
        out[lo] = -np.cos(xs) * ci - np.sin(xs) * (si - np.pi / 2)
    if np.any(~lo):
        out[~lo] = _aux_fg(arr[~lo])[1]
    return out if out.ndim else float(out)


def sine_integral(x):
    """Si(x) = int_0^x sin(t)/t dt for x >= 0."""
    arr = _as_array(x, strict_positive=False, name="sine_integral")
    out = np.zeros_like(arr)
    lo = (arr > 0) & (arr <= SWITCHOVER)
    hi = arr > SWITCHOVER
    if np.any(lo):
        out[lo] = _taylor_si_ci(arr[lo])[0]
    if np.any(hi):
        xs = arr[hi]
        f, g = _aux_fg(xs)
        out[hi] = np.pi / 2 - f * np.cos(xs) - g * np.sin(xs)
    return out if out.ndim else float(out)


def cosine_integral(x):
    """Ci(x) = -int_x^inf cos(t)/t dt for x > 0 (log-singular at the origin)."""
    arr = _as_array(x, strict_positive=True, name="cosine_integral")
    out = np.empty_like(arr)
    lo = arr <= SWITCHOVER
    if np.any(lo):
        out[lo] = _taylor_si_ci(arr[lo])[1]
    if np.any(~lo):
        xs = arr[~lo]
        f, g = _aux_fg(xs)
        out[~lo] = f * np.sin(xs) - g * np.cos(xs)
    return out if out.ndim else float(out)


def t_function(chi):
    """T(chi) = sin(chi) Ci(chi) - cos(chi) Si(chi) + (pi/2) cos(chi).

    Tends to pi/2 as chi -> 0 and to 1/chi - 2/chi^3 + ... for large chi.
    """
    arr = _as_array(chi, strict_positive=True, name="t_function")
    return aux_f(arr)


def u_function(chi):
    """U(chi) = dT/dchi = cos(chi) Ci(chi) + sin(chi) Si(chi) - (pi/2) sin(chi)."""
    arr = _as_array(chi, strict_positive=True, name="u_function")
    out = aux_g(arr)
    return -out
