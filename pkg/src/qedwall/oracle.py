"""Brute-force reference computations used to validate the closed forms.

Nothing here shares code with the closed-form path beyond the channel
tables: wavefunctions are written out by hand, integrals are done by
quadrature, and special functions come from high-precision series.
Everything is slow by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureError

# ---------------------------------------------------------------------------
# high-precision Si / Ci
# ---------------------------------------------------------------------------

SERIES_DIGITS = 50


def si_series(x, digits: int = SERIES_DIGITS) -> mpmath.mpf:
    """Si(x) summed term by term from its Taylor series at ``digits`` precision."""
    with mpmath.workdps(digits + int(abs(float(x)) / 2.3) + 10):
        x = mpmath.mpf(x)
        term = x
        total = mpmath.mpf(0)
        k = 0
        eps = mpmath.mpf(10) ** (-(digits + 5))
        while True:
            add = term / (2 * k + 1)
            total += add
            if abs(add) < eps * max(abs(total), 1) and k > 2:
                break
            term *= -x * x / ((2 * k + 2) * (2 * k + 3))
            k += 1
        return +total


def ci_series(x, digits: int = SERIES_DIGITS) -> mpmath.mpf:
    """Ci(x) = gamma + ln x + sum_k (-1)^k x^(2k) / (2k (2k)!) at ``digits`` precision."""
    if x <= 0:
        raise DomainError("Ci needs x > 0")
    with mpmath.workdps(digits + int(abs(float(x)) / 2.3) + 10):
        x = mpmath.mpf(x)
        term = -x * x / 2
        total = mpmath.mpf(0)
        k = 1
        eps = mpmath.mpf(10) ** (-(digits + 5))
        while True:
            add = term / (2 * k)
            total += add
            if abs(add) < eps * max(abs(total), 1) and k > 2:
                break
            term *= -x * x / ((2 * k + 1) * (2 * k + 2))
            k += 1
        return +(mpmath.euler + mpmath.log(x) + total)


ASYMPTOTIC_ABOVE = 700.0


def _tu_asymptotic(x: mpmath.mpf, digits: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """T ~ sum (-1)^k (2k)!/x^(2k+1), U ~ -sum (-1)^k (2k+1)!/x^(2k+2), optimally truncated."""
    eps = mpmath.mpf(10) ** (-(digits + 5))
    t = u = mpmath.mpf(0)
    term = 1 / x  # (2k)!/x^(2k+1)
    k = 0
    while True:
        nxt = term * (2 * k + 1) / x  # (2k+1)!/x^(2k+2)
        t += (-1) ** k * term
        u -= (-1) ** k * nxt
        if abs(nxt) < eps * abs(t):
            break
        new = nxt * (2 * k + 2) / x
        if new > nxt:  # past the smallest term
            break
        term = new
        k += 1
    return t, u


def t_series(chi, digits: int = SERIES_DIGITS) -> mpmath.mpf:
    """T(chi) from the Taylor series of Si, Ci, or the asymptotic series above 700."""
    with mpmath.workdps(digits + 10):
        x = mpmath.mpf(chi)
        if x > ASYMPTOTIC_ABOVE:
            return +_tu_asymptotic(x, digits)[0]
        return +(mpmath.sin(x) * ci_series(x, digits) - mpmath.cos(x) * si_series(x, digits) + mpmath.pi / 2 * mpmath.cos(x))


def u_series(chi, digits: int = SERIES_DIGITS) -> mpmath.mpf:
    """U(chi), same two regimes as :func:`t_series`."""
    with mpmath.workdps(digits + 10):
        x = mpmath.mpf(chi)
        if x > ASYMPTOTIC_ABOVE:
            return +_tu_asymptotic(x, digits)[1]
        return +(mpmath.cos(x) * ci_series(x, digits) + mpmath.sin(x) * si_series(x, digits) - mpmath.pi / 2 * mpmath.sin(x))


# ---------------------------------------------------------------------------
# principal-value frequency integral
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PVSpec:
    """Settings for the symmetric-excision principal value.

    ``excision`` is the largest half-width; the extrapolation uses
    ``excision / 2**k`` for k < ``order``.
    """

    excision: float = 1e-2
    cutoff: float | None = None
    order: int = 4

    def __post_init__(self):
        if self.excision <= 0 or self.order < 1:
            raise DomainError("excision must be positive and order >= 1")


NUMERATORS = {"1": lambda w: np.ones_like(w), "omega2": lambda w: w * w}


def pv_log_form(gap: float, lower: float, upper: float, numerator: str = "1") -> float:
    """Analytic principal value of int_lower^upper num(w) / (gap + w) dw."""
    def prim(w):
        a = math.log(abs(gap + w))
        if numerator == "1":
            return a
        if numerator == "omega2":
            return w * w / 2 - gap * w + gap * gap * a
        raise DomainError(f"unknown numerator {numerator!r}")

    return prim(upper) - prim(lower)


def pv_omega_integral(
    gap: float,
    lower: float,
    upper: float | None = None,
    numerator: str = "1",
    spec: PVSpec = PVSpec(),
) -> float:
    """Principal value of int_lower^upper num(w) / (gap + w) dw.

    A pole at w0 = -gap inside the range is excised symmetrically; the
    excised integral has an error series in odd powers of the half-width,
    which Richardson extrapolation removes.
    """
    if lower < 0:
        raise DomainError("lower limit must be >= 0")
    if gap == 0:
        raise DomainError("gap must be nonzero")
    upper = upper if upper is not None else (spec.cutoff or 10.0 * max(abs(gap), 1.0) + lower)
    if upper <= lower:
        raise DomainError("upper limit must exceed the lower one")
    num = NUMERATORS.get(numerator)
    if num is None:
        raise DomainError(f"unknown numerator {numerator!r}")

    def f(w):
        return num(np.asarray(w, dtype=float)) / (gap + w)

    w0 = -gap
    if not (lower < w0 < upper):
        val, err = integrate.quad(f, lower, upper, epsabs=0, epsrel=1e-13, limit=400)
        return float(val)
    room = min(w0 - lower, upper - w0)
    if spec.excision >= room:
        raise QuadratureError(f"excision {spec.excision} overlaps an integration limit (room {room})")
    widths = [spec.excision / 2**k for k in range(spec.order)]
    left = integrate.quad(f, lower, w0 - widths[0], epsabs=0, epsrel=1e-13, limit=400)[0]
    right = integrate.quad(f, w0 + widths[0], upper, epsabs=0, epsrel=1e-13, limit=400)[0]
    estimates = []
    for k, d in enumerate(widths):
        if k:
            prev = widths[k - 1]
            left += integrate.quad(f, w0 - prev, w0 - d, epsabs=0, epsrel=1e-13)[0]
            right += integrate.quad(f, w0 + d, w0 + prev, epsabs=0, epsrel=1e-13)[0]
        estimates.append(left + right)
    # Richardson on odd powers d, d^3, d^5, ...
    table = [estimates]
    for level in range(1, spec.order):
        p = 2 * level - 1
        fac = 2.0**p
        prev = table[-1]
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1) for i in range(len(prev) - 1)])
    return float(table[-1][0])


# ---------------------------------------------------------------------------
# oscillatory L integrals
# ---------------------------------------------------------------------------

KERNELS: dict[str, tuple[int, str]] = {
    # name: (power of L, trig)
    "cos": (0, "cos"),
    "Lsin": (1, "sin"),
    "L2cos": (2, "cos"),
    "L3sin": (3, "sin"),
}


STABILITY = 1e-6


def _lobe_sum(kernel: str, gap: float, z: float, lobes: int) -> float:
    power, trig = KERNELS[kernel]
    k = 2.0 * z
    fn = np.cos if trig == "cos" else np.sin

    def f(L):
        return L**power * fn(k * L) * np.log(abs(gap + L))

    half = math.pi / k
    offset = 0.5 if trig == "cos" else 1.0
    sing = -gap if gap < 0 else None
    j0 = 0
    if sing is not None:
        j0 = max(0, int(math.floor(sing / half - offset)) + 1)
    first = (j0 + offset) * half
    cuts = [0.0] + [(j + offset) * half for j in range(j0) if (j + offset) * half > 0] + [first]
    if sing is not None and 0 < sing < first:
        cuts.append(sing)
    cuts = sorted(set(cuts))
    head = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, err, *rest = integrate.quad(f, a, b, epsabs=0, epsrel=1e-13, limit=400, full_output=1)
        if len(rest) > 1 and err > 1e-10 * max(abs(val), 1e-300):
            raise QuadratureError(f"integral on [{a}, {b}] did not converge: {rest[1]}")
        head += val
    partial = np.empty(lobes)
    total = head
    for i in range(lobes):
        a = (j0 + offset + i) * half
        total += integrate.quad(f, a, a + half, epsabs=0, epsrel=1e-13, limit=200)[0]
        partial[i] = total
    # Euler: repeated averaging of consecutive partial sums
    s = partial
    while s.size > 1:
        s = 0.5 * (s[1:] + s[:-1])
    return float(s[0])


def oscillatory_L_integral(
    kernel: str,
    gap: float,
    z_a: float,
    z_b: float,
    *,
    lobes: int = 48,
    scale: float = 1.0,
) -> float:
    """Difference F(z_a) - F(z_b) of F(z) = int_0^inf L^p trig(2 L z) ln|gap + L| dL.

    ``kernel`` is one of "cos", "Lsin", "L2cos", "L3sin".  The integrals
    diverge; partial sums over half-periods are summed by repeated
    averaging, which assigns them their Abel value.  ``scale`` multiplies
    the logarithm (a linearity check).

    Raises
    ------
    QuadratureError
        If the averaged sums with ``lobes`` and ``lobes - 8`` half-periods
        disagree by more than ``STABILITY`` relative.  Roundoff limits the
        result to ~1e-7 when it is 1e-4 of a single half-period integral
        (positive gaps at chi ~ 1e3 with the L^3 kernel).
    """
    if kernel not in KERNELS:
        raise DomainError(f"kernel must be one of {sorted(KERNELS)}")
    if z_a == z_b:
        raise DomainError("the two distances must differ")
    if min(z_a, z_b) <= 0 or gap == 0:
        raise DomainError("distances must be positive and the gap nonzero")
    out = []
    for n in (lobes, lobes - 8):
        out.append(_lobe_sum(kernel, gap, z_a, n) - _lobe_sum(kernel, gap, z_b, n))
    if abs(out[0] - out[1]) > STABILITY * abs(out[0]):
        raise QuadratureError(f"lobe acceleration unstable: partial results {out}")
    return scale * out[0]


# ---------------------------------------------------------------------------
# explicit n <= 2 spinor wavefunctions and 3-D quadrature
# ---------------------------------------------------------------------------

_S3 = math.sqrt(1.0 / 3.0)
_S23 = math.sqrt(2.0 / 3.0)

# (n, l) -> list of (coef, m_l, spin) for each (label, mu)
SPINORS: dict[tuple[str, float], tuple[int, int, tuple[tuple[float, int, int], ...]]] = {
    ("1S", 0.5): (1, 0, ((1.0, 0, +1),)),
    ("1S", -0.5): (1, 0, ((1.0, 0, -1),)),
    ("2S1/2", 0.5): (2, 0, ((1.0, 0, +1),)),
    ("2S1/2", -0.5): (2, 0, ((1.0, 0, -1),)),
    ("2P1/2", 0.5): (2, 1, ((-_S3, 0, +1), (_S23, 1, -1))),
    ("2P1/2", -0.5): (2, 1, ((-_S23, -1, +1), (_S3, 0, -1))),
    ("2P3/2", 1.5): (2, 1, ((1.0, 1, +1),)),
    ("2P3/2", 0.5): (2, 1, ((_S23, 0, +1), (_S3, 1, -1))),
    ("2P3/2", -0.5): (2, 1, ((_S3, -1, +1), (_S23, 0, -1))),
    ("2P3/2", -1.5): (2, 1, ((1.0, -1, -1),)),
}


def _radial(n: int, l: int, r):
    if (n, l) == (1, 0):
        return 2.0 * np.exp(-r)
    if (n, l) == (2, 0):
        return (2.0 - r) * np.exp(-r / 2) / (2.0 * math.sqrt(2.0))
    if (n, l) == (2, 1):
        return r * np.exp(-r / 2) / (2.0 * math.sqrt(6.0))
    raise DomainError(f"no explicit radial function for n={n}, l={l}")


def _ylm(l: int, m: int, ct, phi):
    st = np.sqrt(np.clip(1.0 - ct * ct, 0.0, None))
    if l == 0:
        return np.full(np.broadcast(ct, phi).shape, 1.0 / math.sqrt(4 * math.pi), dtype=complex)
    if l == 1 and m == 0:
        return math.sqrt(3 / (4 * math.pi)) * ct + 0j * phi
    if l == 1 and m == 1:
        return -math.sqrt(3 / (8 * math.pi)) * st * np.exp(1j * phi)
    if l == 1 and m == -1:
        return math.sqrt(3 / (8 * math.pi)) * st * np.exp(-1j * phi)
    raise DomainError(f"no explicit Y_{l}{m}")


@dataclass(frozen=True)
class Grid3D:
    n_r: int = 60
    n_u: int = 48
    n_phi: int = 24


@lru_cache(maxsize=16)
def _grid(n_r: int, n_u: int, n_phi: int, alpha: float):
    t, wt = np.polynomial.laguerre.laggauss(n_r)
    r = t / alpha
    wr = wt * np.exp(t) / alpha  # undo the Laguerre weight; integrand carries its own decay
    u, wu = np.polynomial.legendre.leggauss(n_u)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    R, U, PHI = np.meshgrid(r, u, phi, indexing="ij")
    W = np.einsum("i,j,k->ijk", wr * r * r, wu, np.full(n_phi, 2 * math.pi / n_phi))
    return R, U, PHI, W


def spinor_matrix_element(
    bra: tuple[str, float],
    operator: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    ket: tuple[str, float],
    grid: Grid3D = Grid3D(),
) -> complex:
    """<bra| O(x, y, z) |ket> by direct 3-D quadrature over explicit spinors."""
    nb, lb, cb = SPINORS[bra]
    nk, lk, ck = SPINORS[ket]
    alpha = 1.0 / nb + 1.0 / nk
    R, U, PHI, W = _grid(grid.n_r, grid.n_u, grid.n_phi, alpha)
    st = np.sqrt(1 - U * U)
    X, Y, Zc = R * st * np.cos(PHI), R * st * np.sin(PHI), R * U
    op = operator(X, Y, Zc)
    total = 0j
    for spin in (+1, -1):
        left = sum(c * _ylm(lb, m, U, PHI) for c, m, s in cb if s == spin)
        right = sum(c * _ylm(lk, m, U, PHI) for c, m, s in ck if s == spin)
        if isinstance(left, int) or isinstance(right, int):
            continue
        total += np.sum(np.conj(left) * right * _radial(nb, lb, R) * _radial(nk, lk, R) * op * W)
    return complex(total)


def _members(level: str):
    return [key for key in SPINORS if key[0] == level]


def mixing_products_bruteforce(m: str, n: str, q_level: str, grid: Grid3D = Grid3D()) -> tuple[float, float]:
    """(p_zq2, p_rparz) for one intermediate level, both orderings, by 3-D quadrature.

    ``m`` and ``n`` are level names with projection +1/2 (e.g. "2P3/2").
    """
    bra, ket = (m, 0.5), (n, 0.5)
    x = lambda X, Y, Z: X  # noqa: E731
    y = lambda X, Y, Z: Y  # noqa: E731
    z = lambda X, Y, Z: Z  # noqa: E731
    q2 = lambda X, Y, Z: X * X + Y * Y - 2 * Z * Z  # noqa: E731
    xz = lambda X, Y, Z: X * Z  # noqa: E731
    yz = lambda X, Y, Z: Y * Z  # noqa: E731
    pzq = prz = 0j
    for q in _members(q_level):
        e = lambda a, b, c: spinor_matrix_element(a, b, c, grid)  # noqa: E731
        pzq += e(bra, z, q) * e(q, q2, ket) + e(bra, q2, q) * e(q, z, ket)
        for lin, quad in ((x, xz), (y, yz)):
            prz += e(bra, lin, q) * e(q, quad, ket) + e(bra, quad, q) * e(q, lin, ket)
    return float(pzq.real), float(prz.real)


def dipole_strength_bruteforce(reference: str, q_level: str, grid: Grid3D = Grid3D()) -> tuple[float, float]:
    """(sum |<ref|r_par|q>|^2, sum |<ref|z|q>|^2) over the projections of ``q_level``."""
    ref = (reference, 0.5)
    dpar = dz = 0.0
    for q in _members(q_level):
        dpar += abs(spinor_matrix_element(ref, lambda X, Y, Z: X, q, grid)) ** 2
        dpar += abs(spinor_matrix_element(ref, lambda X, Y, Z: Y, q, grid)) ** 2
        dz += abs(spinor_matrix_element(ref, lambda X, Y, Z: Z, q, grid)) ** 2
    return dpar, dz


# ---------------------------------------------------------------------------
# closure sums
# ---------------------------------------------------------------------------

CLOSURE_OPERATORS = {
    "rpar2+2z2": lambda X, Y, Z: X * X + Y * Y + 2 * Z * Z,
    "3z(rpar2+2z2)": lambda X, Y, Z: 3 * Z * (X * X + Y * Y + 2 * Z * Z),
    "zero": lambda X, Y, Z: 0 * X,
}


@dataclass(frozen=True)
class ClosureResult:
    direct: float
    partial: float

    @property
    def gap(self) -> float:
        return self.direct - self.partial

    @property
    def fraction(self) -> float:
        return self.partial / self.direct if self.direct else float("nan")


def closure_expectation(operator: str, m, n, n_max: int = 2) -> ClosureResult:
    """Direct <m|A B|n> by 3-D quadrature vs the bound-state sum over <m|A|q><q|B|n>.

    ``rpar2+2z2`` factorizes as x.x + y.y + 2 z.z; ``3z(rpar2+2z2)`` as
    3 z.(rpar2 + 2 z2).  The partial sum runs over shells 1..n_max.
    """
    from . import hydrogen as hy

    if operator not in CLOSURE_OPERATORS:
        raise DomainError(f"operator must be one of {sorted(CLOSURE_OPERATORS)}")
    lm, ln = hy.LevelLabel.parse(m), hy.LevelLabel.parse(n)
    direct = spinor_matrix_element((lm.value, 0.5), CLOSURE_OPERATORS[operator], (ln.value, 0.5)).real
    bra, ket = hy.reference_state(lm), hy.reference_state(ln)
    if operator == "zero":
        return ClosureResult(float(direct), 0.0)
    if operator == "rpar2+2z2":
        pairs = [(hy.X, hy.X, 1.0), (hy.Y, hy.Y, 1.0), (hy.Z, hy.Z, 2.0)]
    else:
        pairs = [(hy.Z, hy.MIRROR3, 3.0)]
    partial = 0j
    for q in hy.virtual_states(n_max):
        for a, b, w in pairs:
            partial += w * hy.matrix_element(bra, a, q) * hy.matrix_element(q, b, ket)
    return ClosureResult(float(direct), float(partial.real))
