"""Long-range (chi >> 1) tails of the retarded shift and mixing amplitude.

Every tail is a finite list of :class:`TailTerm` objects of the form
``coefficient * osc(2 E_q Z) / Z**power``; the list depends only on the
channel table, so it doubles as the term breakdown reported by the CLI.

Two printed coefficients are not consistent with the closed forms they
approximate.  ``strict_paper=True`` reproduces them as printed:

* the |<n|z|q>|^2 sine coefficient of the energy tail, printed as
  E_q sin/Z^2; the expansion of the full result gives E_q sin/(2 Z^2);
* the last oscillatory term of the r_par . r_par z group of the mixing
  tail, printed with an extra E_q^4; the expansion gives 3 cos/(16 Z^4).

The default (``strict_paper=False``) uses the expanded values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import hydrogen
from .errors import OutOfRegimeError
from .hydrogen import DEFAULT_CONSTANTS, AtomicConstants, LevelLabel, MixingChannel, VirtualChannel
from .retarded import mixing_element

CHI_MIN = 10.0
OSCILLATORS = ("cos", "sin", "none")


@dataclass(frozen=True)
class TailTerm:
    """One term ``coefficient * osc(frequency * Z) / Z**power_of_z``."""

    power_of_z: int
    oscillatory: str
    coefficient: float
    frequency: float = 0.0
    channel: str = ""
    group: str = ""

    def __post_init__(self):
        if self.oscillatory not in OSCILLATORS:
            raise ValueError(f"oscillatory must be one of {OSCILLATORS}")
        if self.power_of_z not in (1, 2, 3, 4, 5):
            raise ValueError("power_of_z must lie in 1..5")
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.oscillatory == "cos":
            osc = np.cos(self.frequency * z)
        elif self.oscillatory == "sin":
            osc = np.sin(self.frequency * z)
        else:
            osc = 1.0
        return self.coefficient * osc / z**self.power_of_z

    def as_row(self) -> dict[str, object]:
        return {
            "channel": self.channel,
            "group": self.group,
            "power": self.power_of_z,
            "oscillator": self.oscillatory,
            "frequency": self.frequency,
            "coefficient": self.coefficient,
        }


def evaluate(terms: Sequence[TailTerm], z):
    """Sum of the given terms at distance ``z``."""
    total = sum((t(z) for t in terms), np.zeros(np.shape(z)))
    return total if np.ndim(z) else float(total)


def _check_regime(gaps: Sequence[float], z) -> None:
    if not gaps:
        return
    chi_min = 2.0 * min(abs(g) for g in gaps) * float(np.min(z))
    if not chi_min > CHI_MIN:
        raise OutOfRegimeError(f"chi_min = {chi_min:.4g} <= {CHI_MIN}; long-range tail not applicable")


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def energy_tail_terms(channels: Sequence[VirtualChannel], *, strict_paper: bool = False) -> list[TailTerm]:
    """Term list of the energy tail for a channel table."""
    z_sin = 1.0 if strict_paper else 0.5
    terms: list[TailTerm] = []
    pi_par = pi_perp = 0.0
    for ch in channels:
        e, w, lab = ch.gap, 2.0 * ch.gap, ch.label
        pi_par += ch.d_par_sq / e
        pi_perp += 2.0 * ch.d_z_sq / e
        if e > 0:
            continue
        dp, dz = ch.d_par_sq, ch.d_z_sq
        terms += [
            TailTerm(1, "cos", dp * e**2 / 2.0, w, lab, "par"),
            TailTerm(2, "sin", -dp * e / 4.0 - dz * z_sin * e, w, lab, "par+z"),
            TailTerm(3, "cos", -dp / 8.0 - dz / 4.0, w, lab, "par+z"),
        ]
    terms.append(TailTerm(4, "none", -(2.0 * pi_par + pi_perp) / (8.0 * math.pi), 0.0, "all", "casimir-polder"))
    return terms


def energy_tail(
    reference,
    z,
    channels: Sequence[VirtualChannel] | None = None,
    *,
    n_max: int = 2,
    constants: AtomicConstants = DEFAULT_CONSTANTS,
    strict_paper: bool = False,
):
    """Long-range tail of the retarded shift of ``reference``.

    Raises
    ------
    OutOfRegimeError
        If ``2 min|E_q| Z <= 10``.
    """
    if channels is None:
        channels = hydrogen.dipole_channels(reference, n_max, constants)
    _check_regime([c.gap for c in channels], z)
    return evaluate(energy_tail_terms(channels, strict_paper=strict_paper), z)


def leading_oscillation_2s(constants: AtomicConstants = DEFAULT_CONSTANTS) -> TailTerm:
    """Dominant 1/Z term of the 2S tail from the 2P_1/2 level (both projections)."""
    for ch in hydrogen.dipole_channels(LevelLabel.S12, 2, constants):
        if ch.label == LevelLabel.P12.value:
            return energy_tail_terms([ch])[0]
    raise LookupError("no 2P_1/2 channel")  # pragma: no cover


# ---------------------------------------------------------------------------
# mixing
# ---------------------------------------------------------------------------

def mixing_tail_terms(channels: Sequence[MixingChannel], *, strict_paper: bool = False) -> list[TailTerm]:
    """Term list of the mixing tail; products already include the h.c. ordering."""
    terms: list[TailTerm] = []
    for ch in channels:
        e, w, lab = ch.gap, 2.0 * ch.gap, ch.label
        r, q = ch.p_rparz, ch.p_zq2
        if e < 0:
            last = 3.0 * e**4 / 16.0 if strict_paper else 3.0 / 16.0
            terms += [
                TailTerm(1, "sin", -r * e**3 / 4.0, w, lab, "rpar.rparz"),
                TailTerm(2, "cos", -3.0 * r * e**2 / 8.0, w, lab, "rpar.rparz"),
                TailTerm(3, "sin", 3.0 * r * e / 8.0, w, lab, "rpar.rparz"),
                TailTerm(4, "cos", r * last, w, lab, "rpar.rparz"),
                TailTerm(2, "cos", q * e**2 / 8.0, w, lab, "z.q2"),
                TailTerm(3, "sin", -3.0 * q * e / 16.0, w, lab, "z.q2"),
                TailTerm(4, "cos", -3.0 * q / 32.0, w, lab, "z.q2"),
            ]
        terms.append(TailTerm(5, "none", (-q / 8.0 + 3.0 * r / 8.0) / (math.pi * e), 0.0, lab, "static"))
    return terms


def mixing_tail(
    m,
    n,
    z,
    channels: Sequence[MixingChannel] | None = None,
    *,
    n_max: int = 2,
    constants: AtomicConstants = DEFAULT_CONSTANTS,
    strict_paper: bool = False,
):
    """Long-range tail of the mixing amplitude <m|dH|n>.

    Raises
    ------
    OutOfRegimeError
        If ``2 min|E_q| Z <= 10``.
    """
    if channels is None:
        channels = hydrogen.mixing_channels(m, n, n_max, constants)
    _check_regime([c.gap for c in channels], z)
    return evaluate(mixing_tail_terms(channels, strict_paper=strict_paper), z)


@dataclass(frozen=True)
class CancellationReport:
    """Size of the oscillatory tail coefficients of one channel relative to the table."""

    channel: str
    max_oscillatory: float
    scale: float

    @property
    def relative(self) -> float:
        return self.max_oscillatory / self.scale if self.scale else 0.0

    def vanishes(self, tol: float = 1e-14) -> bool:
        return self.relative < tol


def oscillatory_cancellation(m, n, channel: str, *, n_max: int = 2, constants: AtomicConstants = DEFAULT_CONSTANTS) -> CancellationReport:
    """Check whether the oscillatory products of ``channel`` vanish for the pair (m, n).

    The scale is the largest dipole-quadrupole product anywhere in the table.
    """
    label = LevelLabel.parse(channel).value if channel.startswith("2") else channel
    table = hydrogen.mixing_channels(m, n, n_max, constants)
    scale = max(max(abs(c.p_zq2), abs(c.p_rparz)) for c in table)
    hits = [c for c in table if c.label == label]
    if not hits:
        return CancellationReport(label, 0.0, scale)
    ch = hits[0]
    return CancellationReport(label, max(abs(ch.p_zq2), abs(ch.p_rparz)), scale)


# ---------------------------------------------------------------------------
# admixture coefficients
# ---------------------------------------------------------------------------

def _check_lamb_regime(z, constants: AtomicConstants) -> None:
    if not 2.0 * constants.lamb_shift * float(np.min(z)) > CHI_MIN:
        raise OutOfRegimeError("admixture tails need 2 L Z > 10")


def admixture_tail_a12(z, constants: AtomicConstants = DEFAULT_CONSTANTS):
    """Printed long-range 2P_1/2 admixture 3 sqrt(3) / (pi L F Z^5)."""
    _check_lamb_regime(z, constants)
    z = np.asarray(z, dtype=float)
    out = 3.0 * math.sqrt(3.0) / (math.pi * constants.lamb_shift * constants.fine_structure * z**5)
    return out if out.ndim else float(out)


def admixture_tail_a32(z, constants: AtomicConstants = DEFAULT_CONSTANTS):
    """Long-range 2P_3/2 admixture -sqrt(3/2) 3 L^3 sin(2 L Z) / (F Z)."""
    _check_lamb_regime(z, constants)
    z = np.asarray(z, dtype=float)
    lamb, fs = constants.lamb_shift, constants.fine_structure
    out = -math.sqrt(1.5) * 3.0 * lamb**3 * np.sin(2.0 * lamb * z) / (fs * z)
    return out if out.ndim else float(out)


def perturbative_admixture(
    m,
    z,
    *,
    n_max: int = 2,
    constants: AtomicConstants = DEFAULT_CONSTANTS,
    method: str = "retarded",
    strict_paper: bool = False,
):
    """First-order admixture of level ``m`` into 2S: <m|dH|2S> / (E_2S - E_m).

    ``method`` selects the full retarded amplitude ("retarded") or its
    long-range tail ("tail").
    """
    m = LevelLabel.parse(m)
    n = LevelLabel.S12
    channels = hydrogen.mixing_channels(m, n, n_max, constants)
    if method == "retarded":
        amp = mixing_element(m, n, z, channels)
    elif method == "tail":
        amp = mixing_tail(m, n, z, channels, strict_paper=strict_paper)
    else:
        raise ValueError(f"unknown method {method!r}")
    return amp / (constants.level_energy(n) - constants.level_energy(m))
