from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bilap.errors import DimensionError, DomainError
from bilap.function_norms import (
    ExponentTuple,
    besov_norm,
    evaluate_norm,
    fefferman_stein_check,
    hardy_mixed_norm,
    hom_sobolev_norm,
    lebesgue_norm,
    maximal_function,
    mixed_norm,
    triebel_lizorkin_norm,
)
from bilap.lab.families import FamilySpec, build_family
from bilap.littlewood_paley import build_lp_family, psi_hat
from bilap.spectral_core import SpectralField, TorusGrid

from conftest import band_field

seeds = st.integers(0, 2**32 - 1)
exponents = st.floats(0.5, 6.0)


class TestLebesgue:
    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.7])
    def test_plateau(self, p):
        g = TorusGrid(1, 64, 8.0)
        v = np.zeros(64)
        v[10:30] = 1.0
        assert abs(lebesgue_norm(SpectralField(g, space=v), p) - (20 * g.spacing) ** (1 / p)) < 1e-13

    def test_gaussian(self):
        g = TorusGrid(1, 512, 40.0)
        x = g.coordinates()[0] - 20.0
        f = SpectralField(g, space=np.exp(-x * x))
        assert abs(lebesgue_norm(f, 2) - (np.pi / 2) ** 0.25) < 1e-8

    @given(seeds, st.one_of(st.just(0.0), st.floats(1e-6, 5), st.floats(-5, -1e-6)), exponents)
    def test_homogeneous(self, seed, c, p):
        f = band_field(TorusGrid(1, 32), seed)
        assert np.isclose(lebesgue_norm(f * c, p), abs(c) * lebesgue_norm(f, p), rtol=1e-12, atol=1e-300)

    def test_rejects_bad_exponent(self, grid1):
        with pytest.raises(DomainError):
            lebesgue_norm(band_field(grid1, 0), 0.0)
        with pytest.raises(DomainError):
            lebesgue_norm(band_field(grid1, 0), np.inf)


class TestMixed:
    @pytest.mark.parametrize("p,q", [(2.0, 2.0), (3.0, 1.5), (1.2, 4.0), (0.75, 2.0)])
    def test_product_gaussian(self, p, q):
        g = TorusGrid(2, 256, 24.0)
        t, x = (c - 12.0 for c in g.coordinates())
        f = SpectralField(g, space=np.exp(-t * t - x * x))
        exact = (np.pi / q) ** (1 / (2 * q)) * (np.pi / p) ** (1 / (2 * p))
        assert abs(mixed_norm(f, p, q) - exact) < 1e-6

    @given(seeds, exponents)
    def test_equal_exponents(self, seed, p):
        f = band_field(TorusGrid(2, 16, 3.0), seed)
        assert abs(mixed_norm(f, p, p) / lebesgue_norm(f, p) - 1) < 1e-12

    def test_single_row(self):
        g = TorusGrid(2, 16, 4.0)
        v = np.zeros(g.shape)
        v[3] = np.linspace(0, 1, 16)
        f = SpectralField(g, space=v)
        row = (np.sum(v[3] ** 1.5) * g.spacing) ** (1 / 1.5)
        assert abs(mixed_norm(f, 3.0, 1.5) - g.spacing ** (1 / 3.0) * row) < 1e-14

    def test_needs_two_dims(self, grid1):
        with pytest.raises(DimensionError):
            mixed_norm(band_field(grid1, 0), 2, 2)

    @given(seeds, seeds, st.floats(0.5, 4.0), st.floats(0.5, 4.0))
    def test_quasi_triangle(self, s1, s2, p, q):
        g = TorusGrid(2, 16)
        f, h = band_field(g, s1), band_field(g, s2)
        r = min(p, q, 1.0)
        assert mixed_norm(f + h, p, q) ** r <= (mixed_norm(f, p, q) ** r + mixed_norm(h, p, q) ** r) * (1 + 1e-12)


class TestSobolevType:
    def test_zero_order(self, grid1):
        f = band_field(grid1, 1)
        assert hom_sobolev_norm(f, 0.0, 1.7) == lebesgue_norm(f, 1.7)

    @pytest.mark.parametrize("s,p", [(0.5, 2.0), (1.3, 1.5), (2.0, 4.0)])
    def test_single_mode(self, s, p):
        g = TorusGrid(1, 32, 3.0)
        k = 4
        xi = 2 * np.pi * k / 3.0
        f = SpectralField(g, space=np.exp(1j * xi * g.coordinates()[0]))
        assert abs(hom_sobolev_norm(f, s, p) - xi**s * 3.0 ** (1 / p)) < 1e-12 * xi**s

    @given(seeds, st.floats(0, 2), st.floats(1.0, 4.0))
    def test_besov_equals_tl_on_diagonal(self, seed, s, p):
        f = band_field(TorusGrid(1, 64), seed)
        a, b = besov_norm(f, s, p, p), triebel_lizorkin_norm(f, s, p, p)
        assert abs(a - b) < 1e-12 * a

    def test_single_mode_besov(self):
        g = TorusGrid(1, 64)
        f = SpectralField(g, space=np.exp(3j * g.coordinates()[0]))
        s, p, q = 0.8, 2.0, 1.5
        weights = [(2.0 ** (j * s) * psi_hat(3 * 2.0**-j)) for j in range(-5, 10)]
        expected = sum(w**q for w in weights) ** (1 / q) * (2 * np.pi) ** (1 / p)
        assert abs(besov_norm(f, s, p, q) - expected) < 1e-12

    def test_monotone_in_s(self):
        g = TorusGrid(1, 64)
        f = band_field(g, 2)
        c = f.freq.copy()
        c[np.abs(g.wavenumbers()[0]) < 2] = 0
        f = SpectralField(g, freq=c)
        vals = [triebel_lizorkin_norm(f, s, 2.0, 2.0) for s in np.linspace(0, 2, 9)]
        assert np.all(np.diff(vals) > 0)
        vals = [besov_norm(f, s, 1.5, 3.0) for s in np.linspace(0, 2, 9)]
        assert np.all(np.diff(vals) > 0)

    @pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
    def test_sobolev_tl_comparable_and_stable(self, p):
        fam = FamilySpec("gaussian", 50, 3)
        ratios = {}
        for n in (256, 512):
            g = TorusGrid(1, n)
            fs = build_family(fam, g, band=63)
            ratios[n] = [hom_sobolev_norm(f, 1.0, p) / triebel_lizorkin_norm(f, 1.0, p, 2.0) for f in fs]
        lo, hi = min(ratios[256]), max(ratios[256])
        assert 0.2 < lo and hi < 5.0
        assert abs(min(ratios[512]) / lo - 1) < 0.1 and abs(max(ratios[512]) / hi - 1) < 0.1


class TestHardy:
    def test_zero(self, grid2):
        assert hardy_mixed_norm(SpectralField.zeros(grid2), 2.0, 2.0) == 0.0

    def test_single_mode(self):
        g = TorusGrid(2, 32, 4.0)
        t, x = g.coordinates()
        xi = np.array([2 * np.pi / 4.0 * 3, 2 * np.pi / 4.0 * 2])
        f = SpectralField(g, space=np.exp(1j * (xi[0] * t + xi[1] * x)))
        r = np.linalg.norm(xi)
        level = np.sqrt(sum(psi_hat(r * 2.0**-j) ** 2 for j in range(-6, 12)))
        assert abs(hardy_mixed_norm(f, 3.0, 1.5) - level * 4.0 ** (1 / 1.5) * 4.0 ** (1 / 3.0)) < 1e-12

    @pytest.mark.parametrize("p,q", [(2.0, 2.0), (1.5, 3.0), (3.0, 1.5)])
    def test_comparable_to_mixed(self, p, q):
        g = TorusGrid(2, 64, 8.0)
        ratios = [hardy_mixed_norm(f, p, q) / mixed_norm(f, p, q)
                  for f in build_family(FamilySpec("gaussian", 50, 0, {"max_modulation": 4.0}), g)]
        assert 0.2 < min(ratios) and max(ratios) < 5.0

    def test_needs_two_dims(self, grid1):
        with pytest.raises(DimensionError):
            hardy_mixed_norm(band_field(grid1, 0), 2, 2)


def brute_maximal(values):
    """Largest centered periodic cube average over half-widths 0, 1, 2, 4, ..."""
    n = values.shape[0]
    d = values.ndim
    out = np.abs(values).copy()
    rho = 1
    while rho <= n // 2:
        size = min(2 * rho + 1, n)
        offs = np.arange(size) - (size // 2)
        for idx in np.ndindex(values.shape):
            sl = np.ix_(*[(np.array(idx[a]) + offs) % n for a in range(d)])
            out[idx] = max(out[idx], np.mean(np.abs(values)[sl]))
        rho *= 2
    return out


class TestMaximal:
    def test_constant(self, grid2):
        f = SpectralField(grid2, space=np.full(grid2.shape, 3.0))
        assert np.allclose(maximal_function(f).space, 3.0, atol=1e-14)

    @given(seeds)
    def test_dominates_modulus(self, seed):
        f = band_field(TorusGrid(2, 16), seed)
        assert np.all(maximal_function(f).space.real >= np.abs(f.space) - 1e-15)

    @given(seeds, seeds)
    def test_sublinear(self, s1, s2):
        g = TorusGrid(2, 16)
        f, h = band_field(g, s1), band_field(g, s2)
        lhs = maximal_function(f + h).space.real
        rhs = maximal_function(f).space.real + maximal_function(h).space.real
        assert np.all(lhs <= rhs + 1e-12)

    @pytest.mark.parametrize("dim", [1, 2])
    def test_spike_against_brute_force(self, dim):
        g = TorusGrid(dim, 32 if dim == 1 else 16)
        v = np.zeros(g.shape)
        v[(5,) * dim] = 1.0
        f = SpectralField(g, space=v)
        assert np.allclose(maximal_function(f).space.real, brute_maximal(v), atol=1e-14)

    def test_random_against_brute_force(self, rng):
        v = rng.standard_normal((16, 16))
        f = SpectralField(TorusGrid(2, 16), space=v)
        assert np.allclose(maximal_function(f).space.real, brute_maximal(v), atol=1e-13)


class TestFeffermanStein:
    def test_constant(self, grid2):
        f = SpectralField(grid2, space=np.full(grid2.shape, 2.0))
        assert abs(fefferman_stein_check([f], 2, 3, 2) - 1) < 1e-14

    def test_translation(self):
        g = TorusGrid(2, 32, 8.0)
        f = build_family(FamilySpec("nonnegative", 1, 2), g)[0]
        moved = SpectralField(g, space=np.roll(f.space, (7, -3), axis=(0, 1)))
        assert abs(fefferman_stein_check([moved], 2, 3, 2) / fefferman_stein_check([f], 2, 3, 2) - 1) < 1e-12

    def test_at_least_one(self):
        g = TorusGrid(2, 32, 8.0)
        assert fefferman_stein_check(build_family(FamilySpec("nonnegative", 16, 0), g), 2, 3, 2) >= 1.0

    def test_bounded_and_stable(self):
        fam = FamilySpec("nonnegative", 16, 0)
        a = fefferman_stein_check(build_family(fam, TorusGrid(2, 64, 16.0)), 2, 3, 2)
        b = fefferman_stein_check(build_family(fam, TorusGrid(2, 128, 16.0)), 2, 3, 2)
        assert a < 10 and abs(b / a - 1) < 0.2

    @pytest.mark.parametrize("p,q,r", [(1.0, 2, 2), (2, np.inf, 2), (2, 2, 0.5)])
    def test_domain(self, grid2, p, q, r):
        with pytest.raises(DomainError):
            fefferman_stein_check([band_field(grid2, 0)], p, q, r)


class TestExponentTuple:
    def test_holder(self):
        et = ExponentTuple(3.0, 6.0, 1.0, q1=2.0, q2=2.0, mode="mixed", dim=2)
        assert abs(et.p - 2.0) < 1e-15 and abs(et.q - 1.0) < 1e-15

    def test_gate(self):
        assert abs(ExponentTuple(1.5, 1.5, 1.0).gate() - 1 / 3) < 1e-15
        assert ExponentTuple(4.0, 4.0, 0.1).gate() == 0.0
        ExponentTuple(1.2, 1.2, 2.0).validate()  # even integer skips the gate
        with pytest.raises(ValueError, match="gate"):
            ExponentTuple(1.2, 1.2, 0.5).validate()

    @pytest.mark.parametrize("kw", [dict(p1=1.0, p2=2.0, s=1.0), dict(p1=2.0, p2=2.0, s=1.0, nu=2.0),
                                    dict(p1=2.0, p2=2.0, s=1.0, mode="mixed", dim=2),
                                    dict(p1=2.0, p2=2.0, s=1.0, q1=2.0, q2=2.0, mode="mixed", dim=1),
                                    dict(p1=2.0, p2=2.0, s=1.0, mode="weird")])
    def test_violations(self, kw):
        assert ExponentTuple(**kw).violations()
        with pytest.raises(ValueError):
            ExponentTuple(**kw).validate()


class TestRegistry:
    def test_lookup(self, grid2):
        f = band_field(grid2, 1)
        assert evaluate_norm("Mixed", f, p=2, q=3) == mixed_norm(f, 2, 3)
        assert evaluate_norm("HomSobolev", f, s=1, p=2) == hom_sobolev_norm(f, 1, 2)
        fam = build_lp_family(grid2)
        assert evaluate_norm("HardyMixed", f, p=2, q=2) == hardy_mixed_norm(f, 2, 2, fam)

    def test_errors(self, grid2):
        with pytest.raises(ValueError, match="unknown"):
            evaluate_norm("Nope", band_field(grid2, 1))
        with pytest.raises(ValueError, match="needs"):
            evaluate_norm("Besov", band_field(grid2, 1), s=1)
