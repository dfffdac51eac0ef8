"""Linear Fourier multipliers and bilinear multiplier operators.

Every operator acts on the frequency side of a :class:`SpectralField`.
Symbols are evaluated at exact lattice frequencies.

Bilinear operators follow ``h^(zeta) = sum_{xi + eta = zeta} m(xi, eta)
f^(xi) g^(eta)``; only pairs where both input coefficients are non-zero are
visited, which makes the cost scale with the occupied bands rather than
with ``N^(2d)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gamma, hyp1f1

from .errors import DomainError
from .spectral_core import (
    SpectralField,
    TorusGrid,
    check_band_limit,
    mean_project,
    read_blap,
)

__all__ = [
    "RadialMultiplier",
    "fractional_derivative",
    "riesz_potential",
    "bessel_potential",
    "riesz_transform",
    "partial_derivative",
    "apply_linear",
    "BilinearSymbol",
    "one_symbol",
    "kenig_stein_symbol",
    "coifman_meyer_symbol",
    "tabulated_symbol",
    "symbol_from_label",
    "apply_bilinear",
    "bilinear_fractional",
    "calculus_deviations",
    "commutation_check",
    "riesz_kernel_constant",
    "pointwise_bound_constant",
    "gaussian_riesz_potential",
    "gaussian_pointwise_bound",
]


# --------------------------------------------------------------------------
# linear multipliers


@dataclass(frozen=True)
class RadialMultiplier:
    """A linear multiplier ``D^s``, ``I_nu``, ``J^s``, ``R_j`` or ``d_j``.

    ``zero_mode_rule`` is ``"zero"`` for the homogeneous operators, whose
    symbols are singular or vanish at the origin, and ``"keep"`` otherwise.
    """

    kind: str
    param: float
    zero_mode_rule: str

    def symbol(self, grid: TorusGrid) -> np.ndarray:
        r = grid.frequency_norm()
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "derivative":
                out = r**self.param
            elif self.kind == "riesz_potential":
                if not 0 < self.param < grid.dim:
                    raise DomainError(f"Riesz potential order must lie in (0, {grid.dim}), got {self.param}")
                out = r ** (-self.param)
            elif self.kind == "inhomogeneous":
                out = (1.0 + r**2) ** (self.param / 2)
            elif self.kind in ("riesz_transform", "partial"):
                axis = int(self.param)
                if not 0 <= axis < grid.dim:
                    raise DomainError(f"axis {axis} out of range for dim {grid.dim}")
                xi = grid.frequencies()[axis]
                # +i xi_j / |xi| here is the -i xi_j / |xi| symbol read against
                # the exp(-i x.xi) synthesis kernel; with it d_j I_1 = R_j exactly
                out = 1j * xi / r if self.kind == "riesz_transform" else 1j * xi
            else:
                raise ValueError(f"unknown multiplier kind {self.kind!r}")
        out = np.asarray(out, dtype=complex)
        if self.zero_mode_rule == "zero":
            out.flat[0] = 0.0
        return out


def fractional_derivative(s: float) -> RadialMultiplier:
    return RadialMultiplier("derivative", float(s), "zero")


def riesz_potential(nu: float) -> RadialMultiplier:
    if not nu > 0:
        raise DomainError(f"Riesz potential order must be positive, got {nu}")
    return RadialMultiplier("riesz_potential", float(nu), "zero")


def bessel_potential(s: float) -> RadialMultiplier:
    """The inhomogeneous derivative ``J^s`` with symbol ``(1+|xi|^2)^(s/2)``."""
    return RadialMultiplier("inhomogeneous", float(s), "keep")


def riesz_transform(axis: int) -> RadialMultiplier:
    return RadialMultiplier("riesz_transform", axis, "zero")


def partial_derivative(axis: int) -> RadialMultiplier:
    return RadialMultiplier("partial", axis, "zero")


def apply_linear(mult: RadialMultiplier, f: SpectralField) -> SpectralField:
    freq = mult.symbol(f.grid) * f.freq
    return SpectralField(f.grid, freq=freq, mean_projected=mult.zero_mode_rule == "zero" or f.mean_projected)


# --------------------------------------------------------------------------
# bilinear symbols


def _norm(v: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(v * v, axis=-1))


@dataclass(frozen=True)
class BilinearSymbol:
    """A symbol ``m(xi, eta)`` of homogeneity order ``-nu``.

    ``evaluator`` receives two arrays of shape ``(..., d)`` holding physical
    frequencies and returns an array of shape ``(...)``.  At the origin the
    value ``origin_value`` is used; by default 0 when ``nu > 0`` and the
    evaluator's own value when ``nu == 0``.
    """

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    nu: float = 0.0
    label: str = ""
    origin_value: complex | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def order(self) -> float:
        return -self.nu

    def __call__(self, xi, eta) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        xi, eta = np.broadcast_arrays(xi, eta)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.asarray(self.evaluator(xi, eta), dtype=complex)
        at_origin = np.all(xi == 0, axis=-1) & np.all(eta == 0, axis=-1)
        if np.any(at_origin):
            if self.origin_value is not None:
                value = self.origin_value
            elif self.nu > 0:
                value = 0.0
            else:
                value = None
            if value is not None:
                out = np.where(at_origin, value, out)
        return out

    def size_constant(self, grid: TorusGrid) -> float:
        """Smallest ``C`` with ``|m| <= C (|xi| + |eta|)^(-nu)`` on the lattice."""
        xi = np.moveaxis(grid.frequencies(), 0, -1).reshape(-1, grid.dim)
        best = 0.0
        for start in range(0, len(xi), 256):
            a = xi[start:start + 256, None, :]
            b = xi[None, :, :]
            vals = np.abs(self(a, b))
            weight = (_norm(a) + _norm(b)) ** self.nu
            mask = weight > 0
            best = max(best, float(np.max(vals[mask] * weight[mask])))
        return best

    def scaled(self, factor: float) -> "BilinearSymbol":
        ev = self.evaluator
        return BilinearSymbol(lambda a, b: factor * ev(a, b), self.nu, f"{factor:g}*{self.label}", None)


def one_symbol() -> BilinearSymbol:
    return BilinearSymbol(lambda a, b: np.ones(a.shape[:-1]), 0.0, "one", 1.0)


def kenig_stein_symbol(nu: float) -> BilinearSymbol:
    """``(|xi|^2 + |eta|^2)^(-nu/2)``, the bilinear fractional integral."""
    nu = float(nu)

    def ev(a, b):
        return (np.sum(a * a, axis=-1) + np.sum(b * b, axis=-1)) ** (-nu / 2)

    return BilinearSymbol(ev, nu, f"ks_frac:{nu:g}", 0.0 if nu > 0 else 1.0)


def coifman_meyer_symbol(nu: float) -> BilinearSymbol:
    """A non-radial homogeneous symbol of order ``-nu``.

    ``(|xi|^2 + |eta|^2)^(-nu/2) * (|xi|^2 - xi.eta + |eta|^2) / (|xi|^2 + |eta|^2)``
    is smooth off the origin, symmetric and takes values in
    ``[1/2, 3/2] * (|xi|^2 + |eta|^2)^(-nu/2)``.
    """
    nu = float(nu)

    def ev(a, b):
        r2 = np.sum(a * a, axis=-1) + np.sum(b * b, axis=-1)
        cross = np.sum(a * b, axis=-1)
        return r2 ** (-nu / 2) * (r2 - cross) / r2

    return BilinearSymbol(ev, nu, f"cm_nu:{nu:g}", 0.0 if nu > 0 else 1.0)


def tabulated_symbol(table: np.ndarray, period: float, nu: float = 0.0, label: str = "table") -> BilinearSymbol:
    """Symbol given by values on the ``(xi, eta)`` lattice product.

    ``table`` has ``2d`` axes of length ``N`` in FFT order: the first ``d``
    index ``xi``, the last ``d`` index ``eta``.  Frequencies off the table
    evaluate to 0.
    """
    table = np.asarray(table, dtype=complex)
    n = table.shape[0]
    d = table.ndim // 2
    dxi = 2 * np.pi / period

    def ev(a, b):
        ka = np.rint(a / dxi).astype(np.int64)
        kb = np.rint(b / dxi).astype(np.int64)
        k = np.concatenate([ka, kb], axis=-1)
        inside = np.all((k >= -(n // 2)) & (k < n - n // 2), axis=-1)
        idx = tuple(np.moveaxis(k % n, -1, 0))
        return np.where(inside, table[idx], 0.0)

    return BilinearSymbol(ev, nu, label, complex(table[(0,) * (2 * d)]), meta={"dim": d})


def symbol_from_label(label: str) -> BilinearSymbol:
    """Resolve ``one``, ``cm_nu:<nu>``, ``ks_frac:<nu>`` or ``table:<path>``."""
    if label == "one":
        return one_symbol()
    name, _, arg = label.partition(":")
    if name == "ks_frac":
        return kenig_stein_symbol(float(arg))
    if name == "cm_nu":
        return coifman_meyer_symbol(float(arg))
    if name == "table":
        values, period = read_blap(arg)
        return tabulated_symbol(values, period, label=label)
    raise ValueError(f"unknown symbol label {label!r}")


# --------------------------------------------------------------------------
# bilinear application


def _lattice(grid: TorusGrid) -> np.ndarray:
    return np.moveaxis(grid.wavenumbers(), 0, -1).reshape(-1, grid.dim)


def apply_bilinear(m: BilinearSymbol, f: SpectralField, g: SpectralField, check: bool = True,
                   chunk: int = 2**21) -> SpectralField:
    """``T_m(f, g)`` grouped by output frequency.

    Output frequencies outside the grid band are dropped, exactly as in
    :func:`dealiased_product`.
    """
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    if check:
        check_band_limit(f)
        check_band_limit(g)
    grid = f.grid
    n, d = grid.n, grid.dim
    k = _lattice(grid)
    fa = f.freq.reshape(-1)
    gb = g.freq.reshape(-1)
    ia = np.flatnonzero(fa)
    ib = np.flatnonzero(gb)
    out_re = np.zeros(n**d)
    out_im = np.zeros(n**d)
    if len(ia) == 0 or len(ib) == 0:
        return SpectralField(grid, freq=np.zeros(grid.shape, complex))
    kb = k[ib]
    eta = kb * grid.dxi
    gvals = gb[ib]
    strides = n ** np.arange(d - 1, -1, -1)
    rows = max(1, chunk // len(ib))
    for start in range(0, len(ia), rows):
        sel = ia[start:start + rows]
        ka = k[sel]
        xi = ka * grid.dxi
        w = m(xi[:, None, :], eta[None, :, :]) * fa[sel][:, None] * gvals[None, :]
        zeta = ka[:, None, :] + kb[None, :, :]
        inside = np.all((zeta >= -(n // 2)) & (zeta < n - n // 2), axis=-1)
        flat = ((zeta % n) * strides).sum(axis=-1)[inside]
        w = w[inside]
        out_re += np.bincount(flat, weights=w.real, minlength=n**d)
        out_im += np.bincount(flat, weights=w.imag, minlength=n**d)
    return SpectralField(grid, freq=(out_re + 1j * out_im).reshape(grid.shape))


def bilinear_fractional(nu: float, f: SpectralField, g: SpectralField, check: bool = True) -> SpectralField:
    """The bilinear fractional integral with symbol ``(|xi|^2+|eta|^2)^(-nu/2)``."""
    d = f.grid.dim
    if not 0 < nu < 2 * d:
        raise DomainError(f"nu must lie in (0, {2 * d}), got {nu}")
    return apply_bilinear(kenig_stein_symbol(nu), f, g, check=check)


# --------------------------------------------------------------------------
# linear calculus identities


def _maxdiff(a: SpectralField, b: SpectralField) -> float:
    return float(np.max(np.abs(a.space - b.space)))


def calculus_deviations(f: SpectralField, s: float, nu: float | None = None, axis: int = 0) -> dict:
    """Max-abs deviations of the linear calculus identities on ``f``.

    Keys: ``"DsI_nu"`` (``D^s I_nu = I_{nu-s}``, needs ``0 < s < nu``) and,
    for ``d >= 2``, ``"dI1_R"`` (``d_j I_1 = R_j``) and ``"DsR_RDs"``.
    """
    f = mean_project(f)
    out = {}
    if nu is not None:
        lhs = apply_linear(fractional_derivative(s), apply_linear(riesz_potential(nu), f))
        rhs = apply_linear(riesz_potential(nu - s), f)
        out["DsI_nu"] = _maxdiff(lhs, rhs)
    if f.grid.dim >= 2:
        rj = riesz_transform(axis)
        ds = fractional_derivative(s)
        out["DsR_RDs"] = _maxdiff(apply_linear(ds, apply_linear(rj, f)), apply_linear(rj, apply_linear(ds, f)))
        di1 = apply_linear(partial_derivative(axis), apply_linear(riesz_potential(1.0), f))
        out["dI1_R"] = _maxdiff(di1, apply_linear(rj, f))
    return out


def commutation_check(s: float, axis: int, f: SpectralField) -> float:
    """Largest deviation in ``D^s R_j = R_j D^s`` and ``d_j I_1 = R_j``."""
    if f.grid.dim < 2:
        raise DomainError("Riesz transform identities need dim >= 2")
    dev = calculus_deviations(f, s, axis=axis)
    return max(dev["DsR_RDs"], dev["dI1_R"])


# --------------------------------------------------------------------------
# pointwise bound for nonnegative Gaussian mixtures on the whole space


def riesz_kernel_constant(dim: int, alpha: float) -> float:
    """``c`` with ``I_alpha f = c int |x-y|^(alpha-dim) f(y) dy`` for symbol ``|xi|^-alpha``."""
    return gamma((dim - alpha) / 2) / (np.pi ** (dim / 2) * 2**alpha * gamma(alpha / 2))


def pointwise_bound_constant(dim: int, nu: float) -> float:
    """Kernel comparison constant ``kappa`` in ``I_nu(f,g) <= kappa I_{nu/2}f I_{nu/2}g``.

    From ``|y|^2 + |z|^2 >= 2|y||z|``; the ratio of the two sides tends to
    ``kappa`` far from the supports, so no smaller constant works.
    """
    if not 0 < nu < 2 * dim:
        raise DomainError(f"nu must lie in (0, {2 * dim}), got {nu}")
    c2 = riesz_kernel_constant(2 * dim, nu)
    c1 = riesz_kernel_constant(dim, nu / 2)
    return c2 * 2.0 ** (nu / 2 - dim) / c1**2


def gaussian_riesz_potential(r, dim: int, alpha: float, width: float = 1.0) -> np.ndarray:
    """``I_alpha`` of ``exp(-|y|^2 / (2 width^2))`` on ``R^dim`` at radius ``r``."""
    if not 0 < alpha < dim:
        raise DomainError(f"alpha must lie in (0, {dim}), got {alpha}")
    r = np.asarray(r, dtype=float) / width
    base = 2.0 ** (-alpha / 2) * gamma((dim - alpha) / 2) / gamma(dim / 2)
    return width**alpha * base * hyp1f1((dim - alpha) / 2, dim / 2, -0.5 * r * r)


def gaussian_pointwise_bound(points, centers_f, amps_f, centers_g, amps_g, width: float, nu: float):
    """Both sides of ``I_nu(f,g) <= I_{nu/2}f * I_{nu/2}g`` for Gaussian mixtures.

    ``f = sum a_i exp(-|x - y_i|^2 / (2 width^2))`` and likewise ``g``; all
    amplitudes must be nonnegative.  ``points`` has shape ``(P, d)``, the
    centers ``(K, d)``.  Returns ``(lhs, rhs)`` evaluated exactly on ``R^d``.
    """
    points = np.atleast_2d(np.asarray(points, float))
    cf = np.atleast_2d(np.asarray(centers_f, float))
    cg = np.atleast_2d(np.asarray(centers_g, float))
    af = np.asarray(amps_f, float)
    ag = np.asarray(amps_g, float)
    if np.any(af < 0) or np.any(ag < 0):
        raise DomainError("the pointwise bound needs nonnegative amplitudes")
    d = points.shape[1]
    df = np.sqrt(np.sum((points[:, None, :] - cf[None]) ** 2, axis=-1))
    dg = np.sqrt(np.sum((points[:, None, :] - cg[None]) ** 2, axis=-1))
    pf = gaussian_riesz_potential(df, d, nu / 2, width) @ af
    pg = gaussian_riesz_potential(dg, d, nu / 2, width) @ ag
    joint = np.sqrt(df[:, :, None] ** 2 + dg[:, None, :] ** 2)
    lhs = np.einsum("pij,i,j->p", gaussian_riesz_potential(joint, 2 * d, nu, width), af, ag)
    return lhs, pf * pg
