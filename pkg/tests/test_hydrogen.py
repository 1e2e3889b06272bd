import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from sympy.physics.quantum.cg import CG

from qedwall import hydrogen as hy
from qedwall import oracle
from qedwall.errors import DegenerateChannelError, DomainError
from qedwall.hydrogen import DEFAULT_CONSTANTS, AtomicConstants, LevelLabel, MixingChannel, VirtualChannel


def approx(expected, **kw):
    kw.setdefault("abs", 0.0)
    return pytest.approx(expected, **kw)


L, F = DEFAULT_CONSTANTS.lamb_shift, DEFAULT_CONSTANTS.fine_structure


class TestConstants:
    def test_defaults(self):
        c = AtomicConstants()
        assert (c.lamb_shift, c.fine_structure, c.gamma_2s, c.gamma_2p) == (1.61e-7, 1.66e-6, 1.99e-16, 1.51e-8)

    def test_mhz_pair(self):
        assert DEFAULT_CONSTANTS.to_mhz(-4.52e-9) == approx(-29.7, rel=1e-2)

    @pytest.mark.parametrize("kw", [{"lamb_shift": 2e-6}, {"lamb_shift": -1.0}, {"gamma_2p": 0.0}, {"convention": "x"}])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            AtomicConstants(**kw)

    def test_round_trip(self):
        c = AtomicConstants(lamb_shift=1.7e-7, convention="physical")
        assert AtomicConstants.from_mapping(c.as_config()) == c

    def test_level_energies(self):
        assert DEFAULT_CONSTANTS.level_energy(LevelLabel.P12) == -L
        assert DEFAULT_CONSTANTS.level_energy(LevelLabel.P32) == F
        assert AtomicConstants(convention="physical").level_energy(LevelLabel.P32) == F - L


class TestLevelLabel:
    @pytest.mark.parametrize("text,label", [("2S", LevelLabel.S12), ("2p1/2", LevelLabel.P12), ("P32", LevelLabel.P32)])
    def test_parse(self, text, label):
        assert LevelLabel.parse(text) is label

    def test_unknown(self):
        with pytest.raises(DomainError):
            LevelLabel.parse("3D5/2")


class TestRadial:
    def test_origin(self):
        assert hy.radial_wavefunction(1, 0, 0.0) == approx(2.0, abs=1e-15)

    @pytest.mark.parametrize("n,l", [(1, 0), (2, 0), (2, 1), (3, 2), (5, 3)])
    def test_normalized(self, n, l):
        val = integrate.quad(lambda r: hy.radial_wavefunction(n, l, r) ** 2 * r * r, 0, np.inf)[0]
        assert val == approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n,l", [(0, 0), (2, 2), (3, -1)])
    def test_invalid(self, n, l):
        with pytest.raises(DomainError):
            hy.radial_wavefunction(n, l, 1.0)

    def test_negative_radius(self):
        with pytest.raises(DomainError):
            hy.radial_wavefunction(1, 0, -1.0)

    def test_2s_2p_dipole(self):
        # closed form: int r^3 R20 R21 dr = -3 sqrt(3)
        r = sympy.symbols("r", positive=True)
        r20 = (2 - r) * sympy.exp(-r / 2) / (2 * sympy.sqrt(2))
        r21 = r * sympy.exp(-r / 2) / (2 * sympy.sqrt(6))
        exact = float(sympy.integrate(r**3 * r20 * r21, (r, 0, sympy.oo)))
        assert abs(hy.radial_integral(2, 0, 2, 1, 1) - exact) < 1e-9
        assert abs(abs(exact) - 3 * math.sqrt(3)) < 1e-12

    def test_expectations(self):
        assert hy.radial_integral(2, 1, 2, 1, 1) == approx(5.0, abs=1e-9)
        assert hy.radial_integral(2, 0, 2, 0, 2) == approx(42.0, abs=1e-9)


def _cg_split():
    """(d_par_sq, d_z_sq) per 2P level for 2S1/2, mu=+1/2, from Clebsch-Gordan algebra."""
    radial_sq = 27.0
    out = {}
    for j, name in ((sympy.Rational(1, 2), "2P1/2"), (sympy.Rational(3, 2), "2P3/2")):
        dpar = dz = 0.0
        for mu2 in range(-int(2 * j), int(2 * j) + 1, 2):
            mu = sympy.Rational(mu2, 2)
            ml = mu - sympy.Rational(1, 2)  # spin-up component overlaps 2S spin up
            if abs(ml) > 1:
                continue
            c = float(CG(1, ml, sympy.Rational(1, 2), sympy.Rational(1, 2), j, mu).doit())
            # |<Y00| x|Y1m>|^2 + |<Y00| y |Y1m>|^2 = 1/3 for m = +-1; |<Y00| z |Y10>|^2 = 1/3
            if ml == 0:
                dz += radial_sq * c * c / 3
            else:
                dpar += radial_sq * c * c / 3
        out[name] = (dpar, dz)
    return out


class TestDipoleChannels:
    def test_s12_nmax2(self):
        ch = hy.dipole_channels(LevelLabel.S12, 2)
        assert [c.label for c in ch] == ["2P1/2", "2P3/2"]
        assert sum(c.d_par_sq + c.d_z_sq for c in ch) == approx(27.0, abs=1e-9)
        gaps = {c.label: c.gap for c in ch}
        assert gaps == {"2P1/2": -L, "2P3/2": F}

    def test_angular_split(self):
        ref = _cg_split()
        for c in hy.dipole_channels(LevelLabel.S12, 2):
            assert c.d_par_sq == approx(ref[c.label][0], abs=1e-9)
            assert c.d_z_sq == approx(ref[c.label][1], abs=1e-9)

    def test_against_bruteforce(self):
        for c in hy.dipole_channels(LevelLabel.S12, 2):
            dpar, dz = oracle.dipole_strength_bruteforce("2S1/2", c.label)
            assert (c.d_par_sq, c.d_z_sq) == approx((dpar, dz), abs=1e-9)

    @pytest.mark.parametrize("ref", list(LevelLabel))
    @pytest.mark.parametrize("n_max", [2, 3])
    def test_nonnegative(self, ref, n_max):
        assert all(c.d_par_sq >= 0 and c.d_z_sq >= 0 for c in hy.dipole_channels(ref, n_max))

    def test_completeness(self):
        assert {c.label for c in hy.dipole_channels(LevelLabel.P12, 2)} == {"1S", "2S1/2"}
        assert "3D" in {c.label for c in hy.dipole_channels(LevelLabel.P12, 3)}
        assert not any("D" in c.label for c in hy.dipole_channels(LevelLabel.P32, 2))

    def test_nmax_domain(self):
        with pytest.raises(DomainError):
            hy.dipole_channels(LevelLabel.S12, 1)

    def test_sum_rule_partial_sums_monotone(self):
        totals = [sum(c.d_par_sq + c.d_z_sq for c in hy.dipole_channels(LevelLabel.P12, n)) for n in range(2, 7)]
        assert all(b >= a for a, b in zip(totals, totals[1:]))
        r2 = hy.radial_integral(2, 1, 2, 1, 2)
        assert totals[-1] < r2


class TestMixingChannels:
    def test_cancellation_pair(self):
        ch = {c.label: c for c in hy.mixing_channels(LevelLabel.P12, LevelLabel.S12, 2)}
        assert ch["2P1/2"].p_zq2 == 0.0 and ch["2P1/2"].p_rparz == 0.0
        assert ch["2P3/2"].p_zq2 != 0.0
        assert ch["2P3/2"].p_zq2 == approx(-24 * math.sqrt(3), rel=1e-12)
        assert ch["2P3/2"].p_rparz == approx(12 * math.sqrt(3), rel=1e-12)

    def test_zero_channel(self):
        c = MixingChannel(0.1, 0.0, 0.0)
        assert c.t1 == 0.0 and c.t2 == 0.0

    def test_t_combinations(self):
        c = MixingChannel(-0.2, 3.0, 1.25)
        assert c.t1 == 3.0 and c.t2 == 0.5

    def test_p32_against_bruteforce(self):
        for c in hy.mixing_channels(LevelLabel.P32, LevelLabel.S12, 2):
            if c.label == "1S":
                continue
            pzq, prz = oracle.mixing_products_bruteforce("2P3/2", "2S1/2", c.label)
            t1 = pzq
            t2 = pzq - 2 * prz
            assert c.t1 == approx(t1, abs=1e-8)
            assert c.t2 == approx(t2, abs=1e-8)

    def test_same_parity(self):
        with pytest.raises(DomainError):
            hy.mixing_channels(LevelLabel.P12, LevelLabel.P32, 2)

    @pytest.mark.parametrize("m,n", [(LevelLabel.P12, LevelLabel.S12), (LevelLabel.P32, LevelLabel.S12)])
    def test_product_symmetry(self, m, n):
        # swapping bra and ket conjugates each product; all are real
        fwd = {c.label: c for c in hy.mixing_channels(m, n, 3)}
        back = {c.label: c for c in hy.mixing_channels(n, m, 3)}
        for label in set(fwd) & set(back):
            assert fwd[label].p_zq2 == approx(back[label].p_zq2, abs=1e-10)
            assert fwd[label].p_rparz == approx(back[label].p_rparz, abs=1e-10)

    def test_gap_from_reference(self):
        ch = {c.label: c.gap for c in hy.mixing_channels(LevelLabel.P32, LevelLabel.S12, 2)}
        assert ch["2P1/2"] == -L and ch["2P3/2"] == F


class TestPolarizabilities:
    def test_ground_state_symmetric(self):
        p = hy.static_polarizabilities(hy.ground_state(), 4)
        assert abs(p.pi_par - p.pi_perp) < 1e-12 * abs(p.pi_par)
        assert p.pi_of_omega(0.0) == approx(p.pi_par, rel=1e-12)

    def test_ground_state_partial_sums(self):
        vals = [hy.static_polarizabilities(hy.ground_state(), n).pi_of_omega(0.0) for n in range(2, 8)]
        assert all(v > 0 for v in vals)
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 4.5  # bound + continuum total

    def test_2s_nmax2(self):
        ch = hy.dipole_channels(LevelLabel.S12, 2)
        p = hy.static_polarizabilities(LevelLabel.S12, 2)
        assert p.pi_par == approx(sum(c.d_par_sq / c.gap for c in ch), rel=1e-12)
        assert p.pi_perp == approx(sum(2 * c.d_z_sq / c.gap for c in ch), rel=1e-12)
        assert p.pi_par < 0 and p.pi_perp < 0
        assert p.pi_par == approx(-6 / L + 12 / F, rel=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateChannelError):
            hy.polarizabilities_from_channels([VirtualChannel(1e-13, 1.0, 1.0)])
        with pytest.raises(DegenerateChannelError):
            VirtualChannel(0.0, 1.0, 1.0)

    def test_pole(self):
        p = hy.static_polarizabilities(LevelLabel.S12, 2)
        with pytest.raises(DegenerateChannelError):
            p.pi_of_omega(L)


@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_angular_integral_real_for_dipole(a, b, c):
    # <Y_00| n.r |Y_1m> with real combinations of Cartesian operators stays linear
    op = hy.Operator(f"lin{a},{b},{c}", 1, lambda x, y, z: a * x + b * y + c * z)
    val = hy.angular_integral(op, 0, 0, 1, 0)
    assert val == approx(c / math.sqrt(3), abs=1e-12)
