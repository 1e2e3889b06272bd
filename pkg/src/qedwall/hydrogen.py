"""Hydrogen n=2 fine-structure states, matrix elements and virtual-channel tables.

Atomic units throughout (hbar = e = m_e = 1).  Bound Schroedinger-Pauli states
are built from the nonrelativistic radial functions; the n=2 manifold is coupled
to (l, j, mu) with Condon-Shortley Clebsch-Gordan coefficients, other shells are
kept in the uncoupled |n l m_l m_s> basis (their fine structure is irrelevant
next to the gross-structure gaps).

Energies are measured from 2S_{1/2}.  Under the default ``"paper"``
convention the 2P_{1/2} level sits at -L and 2P_{3/2} at +F; the
``"physical"`` convention places 2P_{3/2} at F - L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate, special

from .errors import DegenerateChannelError, DomainError, QuadratureError

HARTREE_MHZ = 6579683920.502  # E_h / h in MHz

CONVENTIONS = ("paper", "physical")


@dataclass(frozen=True)
class AtomicConstants:
    """Free-space level intervals and decay widths, atomic units.

    ``convention`` selects where 2P_{3/2} sits relative to 2S_{1/2}: ``"paper"``
    uses +F (the denominators of the asymptotic admixture formulas), ``"physical"``
    uses F - L.
    """

    lamb_shift: float = 1.61e-7
    fine_structure: float = 1.66e-6
    gamma_2s: float = 1.99e-16
    gamma_2p: float = 1.51e-8
    au_to_mhz: float = HARTREE_MHZ
    convention: str = "paper"

    CONFIG_KEYS = {
        "lamb_shift_au": "lamb_shift",
        "fine_structure_au": "fine_structure",
        "gamma_2s_au": "gamma_2s",
        "gamma_2p_au": "gamma_2p",
        "au_to_mhz": "au_to_mhz",
        "convention": "convention",
    }

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise DomainError(f"unknown level convention {self.convention!r}")
        if not (self.fine_structure > self.lamb_shift > 0):
            raise DomainError("constants must satisfy F > L > 0")
        if self.gamma_2s <= 0 or self.gamma_2p <= 0:
            raise DomainError("decay widths must be positive")

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "AtomicConstants":
        """Build from configuration keys (``lamb_shift_au`` etc.); unknown keys are ignored."""
        kwargs = {}
        for key, attr in cls.CONFIG_KEYS.items():
            if key in values and values[key] is not None:
                raw = values[key]
                kwargs[attr] = str(raw).strip() if attr == "convention" else float(raw)
        return cls(**kwargs)

    def as_config(self) -> dict[str, object]:
        return {key: getattr(self, attr) for key, attr in self.CONFIG_KEYS.items()}

    def level_energy(self, label: "LevelLabel") -> float:
        if label is LevelLabel.S12:
            return 0.0
        if label is LevelLabel.P12:
            return -self.lamb_shift
        if self.convention == "paper":
            return self.fine_structure
        return self.fine_structure - self.lamb_shift

    def to_mhz(self, energy_au):
        return np.asarray(energy_au) * self.au_to_mhz if np.ndim(energy_au) else float(energy_au) * self.au_to_mhz


DEFAULT_CONSTANTS = AtomicConstants()


class LevelLabel(Enum):
    """The three n=2 fine-structure levels, magnetic projection mu = +1/2."""

    S12 = "2S1/2"
    P12 = "2P1/2"
    P32 = "2P3/2"

    @property
    def l(self) -> int:
        return 0 if self is LevelLabel.S12 else 1

    @property
    def j(self) -> float:
        return 1.5 if self is LevelLabel.P32 else 0.5

    @property
    def parity(self) -> int:
        return (-1) ** self.l

    @classmethod
    def parse(cls, text: "str | LevelLabel") -> "LevelLabel":
        if isinstance(text, LevelLabel):
            return text
        key = str(text).strip().upper().replace("_", "").replace("/", "")
        aliases = {
            "2S": cls.S12, "S": cls.S12, "2S12": cls.S12, "S12": cls.S12,
            "2P12": cls.P12, "P12": cls.P12,
            "2P32": cls.P32, "P32": cls.P32,
        }
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown level label {text!r}") from None


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Operator:
    """A homogeneous polynomial r^degree * angular(x, y, z) in the electron coordinate.

    ``angular`` is evaluated on unit vectors.  Equality and hashing use ``name``
    only, so matrix-element caches key on it.
    """

    name: str
    degree: int
    angular: Callable = field(compare=False, hash=False, repr=False)


X = Operator("x", 1, lambda x, y, z: x)
Y = Operator("y", 1, lambda x, y, z: y)
Z = Operator("z", 1, lambda x, y, z: z)
RPAR2 = Operator("rpar2", 2, lambda x, y, z: x * x + y * y)
Z2 = Operator("z2", 2, lambda x, y, z: z * z)
XZ = Operator("xz", 2, lambda x, y, z: x * z)
YZ = Operator("yz", 2, lambda x, y, z: y * z)
QUAD = Operator("rpar2-2z2", 2, lambda x, y, z: x * x + y * y - 2 * z * z)
R2 = Operator("r2", 2, lambda x, y, z: np.ones_like(z))
MIRROR3 = Operator("rpar2+2z2", 2, lambda x, y, z: x * x + y * y + 2 * z * z)
MIRROR4 = Operator("z(rpar2+2z2)", 3, lambda x, y, z: z * (x * x + y * y + 2 * z * z))


@lru_cache(maxsize=None)
def mirror_operator(order: int) -> Operator:
    """The 1/Z^order coefficient of the image-charge potential.

    The potential of electron and proton interacting with their images is
    expanded as sum_p Z^-p * r^(p-1) * w_p(cos theta) with
    w_p(u) = (-1)^(p-1)/2 * [ P_(p-1)(u) / 2^(p-1) - u^(p-1)/2 ].
    """
    if order < 3:
        raise DomainError("image-potential expansion starts at order 3")
    k = order - 1
    leg = special.legendre(k)
    sign = (-1) ** k

    def angular(x, y, z):
        return 0.5 * sign * (leg(z) / 2**k - z**k / 2)

    return Operator(f"mirror{order}", k, angular)


# ---------------------------------------------------------------------------
# radial functions
# ---------------------------------------------------------------------------

def _check_nl(n: int, l: int) -> None:
    if int(n) != n or int(l) != l or n < 1 or not (0 <= l < n):
        raise DomainError(f"invalid quantum numbers n={n}, l={l}")


def radial_wavefunction(n: int, l: int, r):
    """Normalized hydrogen radial function R_nl(r), positive at small r."""
    _check_nl(n, l)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    rho = 2.0 * r / n
    norm = math.sqrt((2.0 / n) ** 3 * math.factorial(n - l - 1) / (2 * n * math.factorial(n + l)))
    out = norm * np.exp(-rho / 2) * rho**l * special.eval_genlaguerre(n - l - 1, 2 * l + 1, rho)
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def radial_integral(n1: int, l1: int, n2: int, l2: int, k: int) -> float:
    """int_0^inf R_{n1 l1}(r) r^k R_{n2 l2}(r) r^2 dr by adaptive quadrature."""
    _check_nl(n1, l1)
    _check_nl(n2, l2)
    if k < 0:
        raise DomainError("power must be non-negative")

    def f(r):
        return radial_wavefunction(n1, l1, r) * radial_wavefunction(n2, l2, r) * r ** (k + 2)

    decay = 1.0 / n1 + 1.0 / n2
    breaks = [0.0, 10.0 / decay, 40.0 / decay, 120.0 / decay, np.inf]
    total = 0.0
    abserr = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        # roundoff warnings near nodes are judged by the error estimate below
        val, err, _, *warn = integrate.quad(f, a, b, epsabs=1e-300, epsrel=1e-13, limit=200, full_output=1)
        total += val
        abserr += err
    if abserr > 1e-10 * max(abs(total), 1.0):
        raise QuadratureError(
            f"radial integral ({n1}{l1}|r^{k}|{n2}{l2}) did not converge: value {total}, error {abserr}"
        )
    return total


# ---------------------------------------------------------------------------
# angular integrals on the unit sphere
# ---------------------------------------------------------------------------

_N_THETA = 28
_N_PHI = 32
_u, _wu = np.polynomial.legendre.leggauss(_N_THETA)
_phi = 2 * np.pi * np.arange(_N_PHI) / _N_PHI
_U, _PHI = np.meshgrid(_u, _phi, indexing="ij")
_THETA = np.arccos(_U)
_W = np.outer(_wu, np.full(_N_PHI, 2 * np.pi / _N_PHI))
_SIN = np.sqrt(1 - _U**2)
_ZERO_TOL = 1e-13
_XH, _YH, _ZH = _SIN * np.cos(_PHI), _SIN * np.sin(_PHI), _U


@lru_cache(maxsize=None)
def _ylm(l: int, m: int) -> np.ndarray:
    return special.sph_harm_y(l, m, _THETA, _PHI)


@lru_cache(maxsize=None)
def _operator_grid(op: Operator) -> np.ndarray:
    return np.asarray(op.angular(_XH, _YH, _ZH), dtype=complex) * _W


@lru_cache(maxsize=None)
def angular_integral(op: Operator, l1: int, m1: int, l2: int, m2: int) -> complex:
    """<l1 m1| angular(op) |l2 m2> over the unit sphere (Condon-Shortley Y_lm).

    The grid integrates the polynomial integrands exactly, so anything at
    rounding level is a selection-rule zero and is returned as exactly 0.
    """
    val = complex(np.sum(np.conj(_ylm(l1, m1)) * _operator_grid(op) * _ylm(l2, m2)))
    re = val.real if abs(val.real) > _ZERO_TOL else 0.0
    im = val.imag if abs(val.imag) > _ZERO_TOL else 0.0
    return complex(re, im)


# ---------------------------------------------------------------------------
# basis states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisState:
    """A bound state expanded in |n l m_l> x |m_s>.

    ``components`` holds (coefficient, m_l, m_s) with m_s = +-0.5.  ``level``
    names the degenerate manifold the state belongs to (e.g. ``"2P3/2"``,
    ``"3D"``); ``energy`` is measured from 2S_{1/2}.
    """

    n: int
    l: int
    level: str
    energy: float
    components: tuple
    j: float | None = None
    mu: float | None = None

    @property
    def parity(self) -> int:
        return (-1) ** self.l


def clebsch_spin_half(l: int, j: float, mu: float) -> tuple[tuple[float, int, float], ...]:
    """Components (coef, m_l, m_s) of |l 1/2; j mu> in the Condon-Shortley phase convention."""
    if abs(abs(j - l) - 0.5) > 1e-12 or abs(mu) > j + 1e-12:
        raise DomainError(f"invalid coupling l={l}, j={j}, mu={mu}")
    out = []
    denom = 2 * l + 1
    for ms in (0.5, -0.5):
        ml = mu - ms
        if abs(ml) > l + 1e-12:
            continue
        if j > l:
            c = math.sqrt((l + mu + 0.5) / denom) if ms > 0 else math.sqrt((l - mu + 0.5) / denom)
        else:
            c = -math.sqrt((l - mu + 0.5) / denom) if ms > 0 else math.sqrt((l + mu + 0.5) / denom)
        if c != 0.0:
            out.append((c, int(round(ml)), ms))
    return tuple(out)


def coupled_state(label: LevelLabel, mu: float = 0.5, constants: AtomicConstants = DEFAULT_CONSTANTS) -> BasisState:
    return BasisState(
        n=2,
        l=label.l,
        level=label.value,
        energy=constants.level_energy(label),
        components=clebsch_spin_half(label.l, label.j, mu),
        j=label.j,
        mu=mu,
    )


def ground_state(mu: float = 0.5) -> BasisState:
    """1S_{1/2}; energy measured from 2S like every other state."""
    return BasisState(1, 0, "1S1/2", -3.0 / 8.0, clebsch_spin_half(0, 0.5, mu), j=0.5, mu=mu)


def reference_state(reference, constants: AtomicConstants = DEFAULT_CONSTANTS) -> BasisState:
    if isinstance(reference, BasisState):
        return reference
    return coupled_state(LevelLabel.parse(reference), 0.5, constants)


_L_LETTERS = "SPDFGHIK"


def gross_energy(n: int) -> float:
    """Bohr energy of shell n measured from n=2."""
    return 1.0 / 8.0 - 1.0 / (2.0 * n * n)


@lru_cache(maxsize=None)
def virtual_states(n_max: int, constants: AtomicConstants = DEFAULT_CONSTANTS) -> tuple[BasisState, ...]:
    """Complete bound basis for shells 1..n_max (n=2 in the coupled basis)."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    states = []
    for n in range(1, n_max + 1):
        if n == 2:
            for label in LevelLabel:
                j = label.j
                for mu in np.arange(-j, j + 1):
                    states.append(coupled_state(label, float(mu), constants))
            continue
        for l in range(n):
            level = f"{n}{_L_LETTERS[l]}"
            for ml in range(-l, l + 1):
                for ms in (0.5, -0.5):
                    states.append(BasisState(n, l, level, gross_energy(n), ((1.0, ml, ms),)))
    return tuple(states)


def matrix_element(bra: BasisState, op: Operator, ket: BasisState) -> complex:
    """<bra| op |ket> for a spin-independent polynomial operator."""
    radial = None
    total = 0j
    scale = 0.0
    for cb, mlb, msb in bra.components:
        for ck, mlk, msk in ket.components:
            if msb != msk:
                continue
            ang = angular_integral(op, bra.l, mlb, ket.l, mlk)
            if ang == 0:
                continue
            if radial is None:
                radial = radial_integral(bra.n, bra.l, ket.n, ket.l, op.degree)
            term = np.conj(cb) * ck * ang
            total += term
            scale += abs(term)
    if radial is None or abs(total) <= _ZERO_TOL * scale:
        # Clebsch-Gordan combinations that cancel are zeros, not rounding noise
        return 0j
    return total * radial


def _levels(states: Iterable[BasisState]) -> dict[str, list[BasisState]]:
    grouped: dict[str, list[BasisState]] = {}
    for s in states:
        grouped.setdefault(s.level, []).append(s)
    return grouped


# ---------------------------------------------------------------------------
# channel tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VirtualChannel:
    """One virtual level: its gap from the reference and summed squared dipole elements."""

    gap: float
    d_par_sq: float
    d_z_sq: float
    label: str = ""

    def __post_init__(self):
        if self.gap == 0:
            raise DegenerateChannelError(f"channel {self.label!r} has zero gap")
        if self.d_par_sq < 0 or self.d_z_sq < 0:
            raise DomainError("squared matrix elements must be non-negative")


@dataclass(frozen=True)
class MixingChannel:
    """Dipole-quadrupole products for one virtual level, both operator orderings summed.

    p_zq2   = <m|z|q><q|rpar^2 - 2z^2|n> + <m|rpar^2 - 2z^2|q><q|z|n>
    p_rparz = <m|rpar|q>.<q|rpar z|n> + <m|rpar z|q>.<q|rpar|n>
    """

    gap: float
    p_zq2: float
    p_rparz: float
    label: str = ""

    def __post_init__(self):
        if self.gap == 0:
            raise DegenerateChannelError(f"channel {self.label!r} has zero gap")

    @property
    def t1(self) -> float:
        return self.p_zq2

    @property
    def t2(self) -> float:
        return self.p_zq2 - 2.0 * self.p_rparz


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise DomainError(f"{what} is not real in the chosen phase convention: {value}")
    return float(value.real)


def dipole_channels(reference, n_max: int = 2, constants: AtomicConstants = DEFAULT_CONSTANTS) -> list[VirtualChannel]:
    """Dipole-coupled virtual levels up to shell ``n_max`` for the reference state.

    Levels degenerate with the reference are excluded (reduced resolvent); levels
    with no dipole coupling are dropped.
    """
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    ref = reference_state(reference, constants)
    channels = []
    for level, members in _levels(virtual_states(n_max, constants)).items():
        gap = members[0].energy - ref.energy
        if gap == 0 or abs(members[0].l - ref.l) != 1:
            continue
        dpar = dz = 0.0
        for q in members:
            dpar += abs(matrix_element(ref, X, q)) ** 2 + abs(matrix_element(ref, Y, q)) ** 2
            dz += abs(matrix_element(ref, Z, q)) ** 2
        if dpar + dz > 1e-24:
            channels.append(VirtualChannel(gap, dpar, dz, level))
    return channels


def _quadrupole_ls(l: int) -> set[int]:
    return {l, l + 2} | ({l - 2} if l >= 2 else set())


def mixing_channels(m, n, n_max: int = 2, constants: AtomicConstants = DEFAULT_CONSTANTS) -> list[MixingChannel]:
    """Dipole-quadrupole channels for the admixture of ``m`` into reference ``n``.

    Gaps are E_q - E_n.  Every level allowed by the orbital selection rules
    is kept, including those whose products vanish by angular-momentum
    algebra (e.g. 2P_{1/2} for the 2P_{1/2}-2S pair).
    """
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    bra = reference_state(m, constants)
    ket = reference_state(n, constants)
    if bra.parity == ket.parity:
        raise DomainError("mixing requires states of opposite parity")
    direct_ls = {bra.l - 1, bra.l + 1} & _quadrupole_ls(ket.l)
    swapped_ls = _quadrupole_ls(bra.l) & {ket.l - 1, ket.l + 1}
    channels = []
    for level, members in _levels(virtual_states(n_max, constants)).items():
        gap = members[0].energy - ket.energy
        lq = members[0].l
        if gap == 0 or (lq not in direct_ls and lq not in swapped_ls):
            continue
        pzq = 0j
        prz = 0j
        for q in members:
            pzq += matrix_element(bra, Z, q) * matrix_element(q, QUAD, ket)
            pzq += matrix_element(bra, QUAD, q) * matrix_element(q, Z, ket)
            for lin, quad in ((X, XZ), (Y, YZ)):
                prz += matrix_element(bra, lin, q) * matrix_element(q, quad, ket)
                prz += matrix_element(bra, quad, q) * matrix_element(q, lin, ket)
        channels.append(MixingChannel(gap, _real(pzq, "p_zq2"), _real(prz, "p_rparz"), level))
    return channels


# ---------------------------------------------------------------------------
# polarizabilities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polarizabilities:
    """Static polarizabilities along and across the wall normal.

    pi_par = sum_q d_par_sq / E_q and pi_perp = sum_q 2 d_z_sq / E_q, i.e. the
    +-omega symmetric sum 1/(E_q + omega) + 1/(E_q - omega) at omega = 0.
    """

    pi_par: float
    pi_perp: float
    channels: tuple[VirtualChannel, ...] = ()

    def pi_of_omega(self, omega: float) -> float:
        """Dynamic scalar polarizability (1/3) sum_{q,+-} |d_q|^2 / (E_q +- omega)."""
        total = 0.0
        for ch in self.channels:
            if abs(abs(ch.gap) - abs(omega)) < 1e-12:
                raise DegenerateChannelError(f"omega={omega} sits on the pole of channel {ch.label}")
            d2 = ch.d_par_sq + ch.d_z_sq
            total += d2 * (1.0 / (ch.gap + omega) + 1.0 / (ch.gap - omega)) / 3.0
        return total


def polarizabilities_from_channels(channels: Sequence[VirtualChannel]) -> Polarizabilities:
    pi_par = pi_perp = 0.0
    for ch in channels:
        if abs(ch.gap) < 1e-12:
            raise DegenerateChannelError(f"channel {ch.label!r} has |gap| < 1e-12")
        pi_par += ch.d_par_sq / ch.gap
        pi_perp += 2.0 * ch.d_z_sq / ch.gap
    return Polarizabilities(pi_par, pi_perp, tuple(channels))


def static_polarizabilities(reference, n_max: int = 2, constants: AtomicConstants = DEFAULT_CONSTANTS) -> Polarizabilities:
    return polarizabilities_from_channels(dipole_channels(reference, n_max, constants))


def with_constants(constants: AtomicConstants, **changes) -> AtomicConstants:
    return replace(constants, **changes)
