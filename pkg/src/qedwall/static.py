"""Nonretarded image-charge interaction of the n = 2 manifold.

The mirror potential is diagonalized in the basis (2S_1/2, 2P_1/2, 2P_3/2),
all with magnetic projection +1/2, with free-space energies measured from
2P_1/2.  From it follow the adiabatic branches, the asymptotic admixture
coefficients, the 2S quenching rate and the distance at which it doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import optimize
from scipy.special import sph_harm_y

from . import hydrogen
from .errors import DomainError, OutOfRegimeError, TrackingError
from .hydrogen import DEFAULT_CONSTANTS, AtomicConstants, LevelLabel

BASIS = (LevelLabel.S12, LevelLabel.P12, LevelLabel.P32)
BRANCH_NAMES = ("S1/2", "P1/2", "P3/2")
HIGH_ORDER_BELOW = 300.0
MIN_TRACKING_DISTANCE = 20.0
AMBIGUITY = 1e-6


def mirror_potential_exact(x, y, z, distance):
    """Image-charge potential of the electron at (x, y, z) relative to the nucleus.

    The nucleus sits at height ``distance`` above a perfectly conducting
    plane; z points away from the wall.
    """
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    if not distance > 0:
        raise DomainError("distance must be positive")
    if np.any(z <= -distance):
        raise DomainError("electron at or behind the wall")
    # 0.5 * (-1/(2(z+Z)) + 2/sqrt(x^2+y^2+(z+2Z)^2) - 1/(2Z)), regrouped so the
    # O(1/Z) and O(1/Z^2) pieces cancel analytically rather than in floating point
    s = z / distance
    t = (x * x + y * y + z * z) / distance**2
    w = s + t / 4.0
    q = np.sqrt(1.0 + w)
    h = 0.5 * w * w * (q + 2.0) / (q * (1.0 + q) ** 2)  # 1/sqrt(1+w) - 1 + w/2
    g = -s * s / (2.0 * (1.0 + s))  # 1/2 - 1/(2(1+s)) - s/2
    out = 0.5 / distance * (h + g - t / 8.0)
    return out if out.ndim else float(out)


def mirror_potential_multipole(x, y, z, distance, order: int = 4):
    """Expansion of the image potential through Z^-order."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    r = np.sqrt(x * x + y * y + z * z)
    safe = np.where(r > 0, r, 1.0)
    total = np.zeros(np.broadcast(x, y, z).shape)
    for p in range(3, order + 1):
        op = hydrogen.mirror_operator(p)
        total = total + r ** op.degree * op.angular(x / safe, y / safe, z / safe) / distance**p
    return total if total.ndim else float(total)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def free_energies(constants: AtomicConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Diagonal free-space energies of (2S, 2P_1/2, 2P_3/2) measured from 2P_1/2."""
    base = constants.level_energy(LevelLabel.P12)
    return np.array([constants.level_energy(lab) - base for lab in BASIS])


@lru_cache(maxsize=None)
def multipole_coefficients(order: int) -> np.ndarray:
    """<i| Z^p V_p |j> in the n = 2, mu = +1/2 basis for a single order p."""
    states = [hydrogen.coupled_state(lab, 0.5) for lab in BASIS]
    op = hydrogen.mirror_operator(order)
    out = np.empty((3, 3))
    for i, bra in enumerate(states):
        for j, ket in enumerate(states):
            out[i, j] = hydrogen._real(hydrogen.matrix_element(bra, op, ket), "multipole element")
    return 0.5 * (out + out.T)


def default_order(distance: float) -> int:
    return 6 if distance < HIGH_ORDER_BELOW else 4


def interaction_matrix(distance: float, order: int | None = None) -> np.ndarray:
    """Image-potential matrix through Z^-order (no free-space part)."""
    if not distance > 0:
        raise DomainError("distance must be positive")
    order = default_order(distance) if order is None else int(order)
    if order < 3:
        raise DomainError("expansion order must be >= 3")
    return sum(multipole_coefficients(p) / distance**p for p in range(3, order + 1))


def multipole_matrix(
    distance: float,
    order: int | None = None,
    constants: AtomicConstants = DEFAULT_CONSTANTS,
) -> np.ndarray:
    """Free-space intervals plus the image potential, basis (2S, 2P_1/2, 2P_3/2).

    ``order`` defaults to 6 below Z = 300 and 4 above.
    """
    return np.diag(free_energies(constants)) + interaction_matrix(distance, order)


def exact_interaction_matrix(distance: float, n_r: int = 160, n_u: int = 96) -> np.ndarray:
    """Image-potential matrix from the unexpanded potential (slow check path).

    Axial symmetry removes the azimuthal integral.  The electron density
    beyond 0.9 Z is dropped, which requires Z >= 40.
    """
    if distance < 40:
        raise OutOfRegimeError("exact matrix elements need Z >= 40")
    states = [hydrogen.coupled_state(lab, 0.5) for lab in BASIS]
    rmax = 0.9 * distance
    xr, wr = np.polynomial.legendre.leggauss(n_r)
    # cluster radial nodes toward the nucleus
    t = 0.5 * (xr + 1.0)
    r = rmax * t**2
    wr = wr * 0.5 * rmax * 2.0 * t
    u, wu = np.polynomial.legendre.leggauss(n_u)
    rr, uu = np.meshgrid(r, u, indexing="ij")
    w2 = np.outer(wr, wu) * rr**2 * 2.0 * np.pi
    pot = mirror_potential_exact(rr * np.sqrt(1 - uu**2), 0.0, rr * uu, distance)

    theta = np.arccos(uu)

    def component(state, ml):
        radial = hydrogen.radial_wavefunction(state.n, state.l, rr)
        return radial * sph_harm_y(state.l, ml, theta, 0.0)

    out = np.zeros((3, 3))
    for i, bra in enumerate(states):
        for j, ket in enumerate(states):
            total = 0.0
            for cb, mlb, msb in bra.components:
                for ck, mlk, msk in ket.components:
                    if msb != msk or mlb != mlk:
                        continue
                    integrand = np.conj(component(bra, mlb)) * pot * component(ket, mlk)
                    total += cb * ck * float(np.real(np.sum(integrand * w2)))
            out[i, j] = total
    return 0.5 * (out + out.T)


# ---------------------------------------------------------------------------
# adiabatic branches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoupledState:
    """One adiabatic eigenstate at a given distance."""

    distance: float
    coefficients: tuple[float, float, float]
    eigenvalue: float
    shift: float
    label: str

    @property
    def weights(self) -> tuple[float, float, float]:
        return tuple(c * c for c in self.coefficients)


def _diagonalize(distance, order, constants):
    h = multipole_matrix(distance, order, constants)
    vals, vecs = np.linalg.eigh(h)
    return h, vals, vecs


def adiabatic_spectrum(
    z_grid: Sequence[float],
    *,
    order: int | None = None,
    constants: AtomicConstants = DEFAULT_CONSTANTS,
) -> list[tuple[CoupledState, CoupledState, CoupledState]]:
    """Adiabatic branches along a distance grid, tracked by eigenvector overlap.

    The grid must be strictly monotone with all points above 20 bohr.  Each
    returned triple is ordered as (S1/2, P1/2, P3/2) branches; at the largest
    distance the branches are named after their dominant free state.

    Raises
    ------
    TrackingError
        If two eigenvectors overlap the previous branch vector equally
        within 1e-6.
    """
    z = np.asarray(z_grid, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise DomainError("grid must be a non-empty 1-D sequence")
    if np.any(z <= MIN_TRACKING_DISTANCE):
        raise DomainError(f"all distances must exceed {MIN_TRACKING_DISTANCE} bohr")
    d = np.diff(z)
    if z.size > 1 and not (np.all(d < 0) or np.all(d > 0)):
        raise DomainError("grid must be strictly monotone")
    ascending = z.size > 1 and d[0] > 0
    walk = z[::-1] if ascending else z
    free = free_energies(constants)

    rows = []
    prev = None
    for dist in walk:
        _, vals, vecs = _diagonalize(float(dist), order, constants)
        if prev is None:
            perm = [int(np.argmax(np.abs(vecs[k, :]))) for k in range(3)]
            if len(set(perm)) != 3:
                raise TrackingError(f"cannot name branches at Z = {dist}: dominant components coincide")
        else:
            ov = np.abs(prev.T @ vecs)
            perm = []
            for b in range(3):
                order_b = np.argsort(ov[b])[::-1]
                if ov[b, order_b[0]] - ov[b, order_b[1]] < AMBIGUITY:
                    raise TrackingError(
                        f"branch {BRANCH_NAMES[b]} ambiguous at Z = {dist}: overlaps {ov[b].round(9).tolist()}"
                    )
                perm.append(int(order_b[0]))
            if len(set(perm)) != 3:
                raise TrackingError(f"branch assignment collided at Z = {dist}: overlaps {ov.round(6).tolist()}")
        cur = vecs[:, perm].copy()
        for b in range(3):
            ref = prev[:, b] @ cur[:, b] if prev is not None else cur[b, b]
            if ref < 0:
                cur[:, b] *= -1
        triple = tuple(
            CoupledState(
                float(dist),
                tuple(float(c) for c in cur[:, b]),
                float(vals[perm[b]]),
                float(vals[perm[b]] - free[b]),
                BRANCH_NAMES[b],
            )
            for b in range(3)
        )
        rows.append(triple)
        prev = cur
    return rows[::-1] if ascending else rows


def s_branch(distance: float, *, order: int | None = None, constants: AtomicConstants = DEFAULT_CONSTANTS, start: float = 5000.0) -> CoupledState:
    """S1/2 branch at one distance, followed adiabatically in from ``start``."""
    if distance >= start:
        return adiabatic_spectrum([distance], order=order, constants=constants)[0][0]
    grid = np.geomspace(start, distance, max(64, int(400 * math.log(start / distance)) + 2))
    return adiabatic_spectrum(grid, order=order, constants=constants)[-1][0]


def fig1_rows(z_grid: Sequence[float], *, order: int | None = None, constants: AtomicConstants = DEFAULT_CONSTANTS) -> list[dict[str, float]]:
    """S1/2-branch admixtures along a grid, rows sorted by ascending distance.

    Tracking runs on a dense internal grid so coarse output grids do not
    jump across the narrow S/P1/2 avoided crossing.
    """
    z = np.unique(np.asarray(z_grid, dtype=float))
    if z.size == 0:
        return []
    top = max(float(z[-1]), 5000.0)
    dense = np.unique(np.concatenate([z, np.geomspace(top, z[0], 4000)]))[::-1]
    spec = adiabatic_spectrum(dense, order=order, constants=constants)
    lookup = {row[0].distance: row[0] for row in spec}
    out = []
    for dist in z:
        st = lookup[float(dist)]
        a_s, a12, a32 = st.weights
        out.append(
            {"z_au": float(dist), "aS_sq": a_s, "a12_sq": a12, "a32_sq": a32, "branch_eigenvalue_au": st.shift}
        )
    return out


# ---------------------------------------------------------------------------
# asymptotic admixtures and decay
# ---------------------------------------------------------------------------

def validity_window(constants: AtomicConstants = DEFAULT_CONSTANTS) -> tuple[float, float]:
    """(lower, upper) distances where the leading-order admixtures apply.

    Both 1/L >> Z >> L^(-1/4) and 1/F >> Z >> F^(-1/4) must hold.
    """
    lamb, fs = constants.lamb_shift, constants.fine_structure
    return max(lamb**-0.25, fs**-0.25), min(1.0 / lamb, 1.0 / fs)


def _check_window(distance, constants):
    lo, hi = validity_window(constants)
    d = np.asarray(distance, dtype=float)
    if np.any(d <= lo) or np.any(d >= hi):
        raise OutOfRegimeError(f"Z must lie in ({lo:.1f}, {hi:.4g}) for the asymptotic admixtures")


@dataclass(frozen=True)
class Admixtures:
    """Leading-order eigenvector components of the three coupled states."""

    a: tuple[float, float, float]
    b: tuple[float, float, float]
    c: tuple[float, float, float]


def asymptotic_admixtures(distance: float, constants: AtomicConstants = DEFAULT_CONSTANTS) -> Admixtures:
    """Leading inverse-power admixture coefficients (a, b, c).

    b_3/2 carries the printed +1/(2 sqrt 2 F Z^3); diagonalization gives the
    opposite sign with denominator L + F in the default level convention.
    """
    _check_window(distance, constants)
    lamb, fs, z = constants.lamb_shift, constants.fine_structure, float(distance)
    k = 15.0 / z**4
    a = (1.0, math.sqrt(3.0) / 2.0 * k / lamb, math.sqrt(1.5) * k / fs)
    b = (-math.sqrt(0.75) * k / lamb, 1.0, 1.0 / (2.0 * math.sqrt(2.0) * fs * z**3))
    c = (-math.sqrt(1.5) * k / fs, 1.0 / (2.0 * math.sqrt(2.0) * (lamb + fs) * z**3), 1.0)
    return Admixtures(a, b, c)


def xi_prefactor(constants: AtomicConstants = DEFAULT_CONSTANTS) -> float:
    """(675/2) (1/F^2 + 1/(2 L^2))."""
    return 337.5 * (1.0 / constants.fine_structure**2 + 0.5 / constants.lamb_shift**2)


def xi(distance, constants: AtomicConstants = DEFAULT_CONSTANTS):
    """Total P admixture |a_1/2|^2 + |a_3/2|^2 at leading order."""
    _check_window(distance, constants)
    d = np.asarray(distance, dtype=float)
    out = xi_prefactor(constants) / d**8
    return out if out.ndim else float(out)


def gamma_coefficient(constants: AtomicConstants = DEFAULT_CONSTANTS) -> float:
    """Coefficient of Z^-8 in the effective decay rate."""
    return constants.gamma_2p * xi_prefactor(constants)


def gamma_eff(distance, constants: AtomicConstants = DEFAULT_CONSTANTS):
    """Effective 2S decay rate Gamma_2S + Gamma_2P * Xi (a.u.)."""
    return constants.gamma_2s + constants.gamma_2p * xi(distance, constants)


@dataclass(frozen=True)
class DecayProfile:
    distance: float
    xi: float
    gamma_eff: float


def decay_profile(distance: float, constants: AtomicConstants = DEFAULT_CONSTANTS) -> DecayProfile:
    x = xi(distance, constants)
    return DecayProfile(float(distance), x, constants.gamma_2s + constants.gamma_2p * x)


def doubling_distance(constants: AtomicConstants = DEFAULT_CONSTANTS, rtol: float = 1e-9) -> float:
    """Distance where the effective rate equals twice the 2S width (bisection)."""
    lo, hi = validity_window(constants)
    lo, hi = lo * (1 + 1e-9), hi * (1 - 1e-9)

    def excess(z):
        return gamma_eff(z, constants) - 2.0 * constants.gamma_2s

    if excess(lo) <= 0 or excess(hi) >= 0:
        raise OutOfRegimeError("doubling distance lies outside the admixture validity window")
    while hi - lo > rtol * lo:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# commensurability
# ---------------------------------------------------------------------------

MEASURES = ("differential", "diagonal", "offdiagonal")


def interaction_measure(distance: float, measure: str, target: str) -> float:
    """Leading-order interaction compared with L (target "lamb") or F ("fine").

    differential: |<S|V|S> - <P1/2|V|P1/2>| for both targets.
    diagonal:     |<S|V|S>| for both targets.
    offdiagonal:  |<S|V|P1/2>| for "lamb", |<S|V|P3/2>| for "fine".
    """
    v3 = multipole_coefficients(3) / distance**3
    v4 = multipole_coefficients(4) / distance**4
    if measure == "differential":
        return abs(v3[0, 0] - v3[1, 1])
    if measure == "diagonal":
        return abs(v3[0, 0])
    if measure == "offdiagonal":
        return abs(v4[0, 1]) if target == "lamb" else abs(v4[0, 2])
    raise DomainError(f"unknown measure {measure!r}; choose from {MEASURES}")


@dataclass(frozen=True)
class Commensurability:
    measure: str
    lamb_distance: float
    fine_distance: float


def commensurability_distances(
    measure: str = "differential",
    constants: AtomicConstants = DEFAULT_CONSTANTS,
    bracket: tuple[float, float] = (1.0, 1e5),
) -> Commensurability:
    """Distances where the chosen interaction measure equals L and F."""
    roots = {}
    for target, value in (("lamb", constants.lamb_shift), ("fine", constants.fine_structure)):
        def f(logz):
            return math.log(interaction_measure(math.exp(logz), measure, target) / value)

        a, b = math.log(bracket[0]), math.log(bracket[1])
        if f(a) * f(b) > 0:
            raise OutOfRegimeError(
                f"no root for measure {measure!r} vs {target} in {bracket}: "
                f"ratios {math.exp(f(a)):.3g}, {math.exp(f(b)):.3g}"
            )
        roots[target] = math.exp(optimize.brentq(f, a, b, xtol=1e-14))
    return Commensurability(measure, roots["lamb"], roots["fine"])


def nonretarded_shift(reference, distance, *, order: int = 3, constants: AtomicConstants = DEFAULT_CONSTANTS):
    """First-order image-potential shift <ref|V|ref> through Z^-order."""
    idx = BASIS.index(LevelLabel.parse(reference))
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise DomainError("distance must be positive")
    out = sum(multipole_coefficients(p)[idx, idx] / d**p for p in range(3, order + 1))
    return out if np.ndim(out) else float(out)
