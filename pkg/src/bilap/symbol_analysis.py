"""Regularity of bilinear symbols: dyadic rescaled pieces and product Sobolev norms.

A piece ``m_k^nu(xi, eta) = 2^(k nu) m(2^k xi, 2^k eta) Psi(xi, eta)`` is
tabulated on ``[-2, 2)^(2d)``.  Its product Sobolev norm

    ( int int (1+|x|^2)^r1 (1+|y|^2)^r2 |h^(x, y)|^2 dx dy )^(1/2)

uses the unitary Fourier transform ``h^ = (2 pi)^(-d) int h exp(-i(x.xi + y.eta))``
approximated by an FFT over the table, so ``r1 = r2 = 0`` reproduces the
Riemann L^2 norm of the table exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .function_norms import maximal_function
from .littlewood_paley import phi_hat
from .operators import BilinearSymbol, apply_bilinear
from .spectral_core import SpectralField

__all__ = [
    "AnnulusWindow",
    "RescaledPiece",
    "rescaled_piece",
    "tabulate_piece",
    "product_sobolev_norm",
    "RegularityReport",
    "regularity_score",
    "DivergenceScan",
    "divergence_scan",
    "ClassReport",
    "class_mnu_check",
    "maximal_domination_check",
    "algebra_constant",
    "sign_symbol",
]

BOX = 4.0  # side of the tabulation cube [-2, 2)


@dataclass(frozen=True)
class AnnulusWindow:
    """Radial window on ``R^(2d)`` supported in ``1/2 <= |(xi, eta)| <= 2``."""

    dim: int

    def radial(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return phi_hat(rho) - phi_hat(2.0 * rho)

    def __call__(self, xi, eta) -> np.ndarray:
        rho = np.sqrt(np.sum(xi * xi, axis=-1) + np.sum(eta * eta, axis=-1))
        return self.radial(rho)


@dataclass(frozen=True)
class RescaledPiece:
    """Table of a symbol piece on the ``res^(2d)`` grid over ``[-2, 2)^(2d)``.

    ``rule`` evaluates the same piece at arbitrary ``(xi, eta)``; it is used
    when the piece is applied as a multiplier rather than measured.
    """

    k: int
    nu: float
    dim: int
    res: int
    values: np.ndarray
    rule: Callable = field(repr=False, compare=False, default=None)

    @property
    def spacing(self) -> float:
        return BOX / self.res

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spacing ** (2 * self.dim)))

    def as_symbol(self, label: str = "piece") -> BilinearSymbol:
        return BilinearSymbol(self.rule, 0.0, label, 0.0)


def _table_points(dim: int, res: int) -> tuple[np.ndarray, np.ndarray]:
    ax = -BOX / 2 + BOX * np.arange(res) / res
    grids = np.meshgrid(*([ax] * (2 * dim)), indexing="ij")
    pts = np.stack(grids, axis=-1)
    return pts[..., :dim], pts[..., dim:]


def tabulate_piece(rule: Callable, dim: int, res: int, k: int = 0, nu: float = 0.0) -> RescaledPiece:
    """Tabulate an arbitrary rule ``(xi, eta) -> value`` on the standard cube."""
    if res < 8 or res & (res - 1):
        raise ValueError(f"res must be a power of two >= 8, got {res}")
    xi, eta = _table_points(dim, res)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(rule(xi, eta), dtype=complex)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    return RescaledPiece(k, nu, dim, res, vals, rule)


def rescaled_piece(m: BilinearSymbol, nu: float, k: int, w: AnnulusWindow | None = None,
                   res: int = 128, dim: int = 1) -> RescaledPiece:
    """``2^(k nu) m(2^k xi, 2^k eta) Psi(xi, eta)`` on the tabulation cube."""
    w = w if w is not None else AnnulusWindow(dim)
    if res < 32:
        raise ValueError(f"res must be at least 32, got {res}")
    scale = 2.0**k
    weight = 2.0 ** (k * nu)

    def rule(xi, eta):
        win = w(xi, eta)
        inside = win != 0
        out = np.zeros(win.shape, complex)
        if np.any(inside):
            out[inside] = weight * m(scale * xi[inside], scale * eta[inside]) * win[inside]
        return out

    return tabulate_piece(rule, w.dim, res, k, nu)


def _weighted_sum(piece: RescaledPiece, r1: float, r2: float) -> float:
    d, res = piece.dim, piece.res
    D = 2 * d
    delta = piece.spacing
    hat = np.fft.fftn(piece.values) * (delta**D / (2 * np.pi) ** (D / 2))
    x = 2 * np.pi * np.fft.fftfreq(res, d=delta)
    x2 = x * x
    # w1 = 1 + |x|^2 over the xi axes, w2 = 1 + |y|^2 over the eta axes
    w1 = np.ones(())
    w2 = np.ones(())
    for a in range(d):
        shape = [1] * D
        shape[a] = res
        w1 = w1 + x2.reshape(shape)
        shape = [1] * D
        shape[d + a] = res
        w2 = w2 + x2.reshape(shape)
    weight = w1**r1 * w2**r2
    return float(np.sum(weight * np.abs(hat) ** 2) * (2 * np.pi / BOX) ** D)


def product_sobolev_norm(piece: RescaledPiece, r1: float, r2: float) -> float:
    if r1 < 0 or r2 < 0:
        raise DomainError(f"smoothness indices must be nonnegative, got {(r1, r2)}")
    return float(np.sqrt(_weighted_sum(piece, r1, r2)))


# --------------------------------------------------------------------------
# scores and scans


@dataclass(frozen=True)
class RegularityReport:
    ks: tuple
    norms: tuple
    sup: float
    argmax: int
    interior: bool
    spread: float

    def to_dict(self) -> dict:
        return {"ks": list(self.ks), "norms": list(self.norms), "sup": self.sup,
                "argmax": self.argmax, "interior": self.interior, "spread": self.spread}


def regularity_score(m: BilinearSymbol, nu: float, r: float, k_range=(-3, 3), res: int = 128,
                     dim: int = 1) -> RegularityReport:
    """``sup_k ||m_k^nu||_{W^{(r,r),2}}`` over ``k_range`` (inclusive).

    ``interior`` is true when the sup sits strictly inside the range or the
    norms are flat (relative spread below 1e-9), and false when it is
    attained at an endpoint, a hint of growth beyond the sampled scales.
    """
    ks = tuple(range(int(k_range[0]), int(k_range[1]) + 1))
    w = AnnulusWindow(dim)
    norms = tuple(product_sobolev_norm(rescaled_piece(m, nu, k, w, res, dim), r, r) for k in ks)
    arr = np.asarray(norms)
    i = int(np.argmax(arr))
    spread = float((arr.max() - arr.min()) / arr.max()) if arr.max() > 0 else 0.0
    interior = spread < 1e-9 or 0 < i < len(ks) - 1
    return RegularityReport(ks, norms, float(arr.max()), ks[i], interior, spread)


@dataclass(frozen=True)
class DivergenceScan:
    resolutions: tuple
    norms: tuple
    growth: tuple
    diverging: bool

    def to_dict(self) -> dict:
        return {"resolutions": list(self.resolutions), "norms": list(self.norms),
                "growth": list(self.growth), "diverging": self.diverging}


def divergence_scan(m: BilinearSymbol, nu: float, r: float, k: int = 0,
                    resolutions=(64, 128, 256, 512), dim: int = 1, threshold: float = 2.0) -> DivergenceScan:
    """Norm of one piece under resolution doubling.

    The symbol is flagged when the norm grows by more than ``threshold``
    on two consecutive doublings.
    """
    w = AnnulusWindow(dim)
    norms = tuple(product_sobolev_norm(rescaled_piece(m, nu, k, w, res, dim), r, r) for res in resolutions)
    growth = tuple(b / a if a > 0 else np.inf for a, b in zip(norms, norms[1:]))
    diverging = any(g1 > threshold and g2 > threshold for g1, g2 in zip(growth, growth[1:]))
    return DivergenceScan(tuple(resolutions), norms, growth, diverging)


def sign_symbol(axis: int = 0) -> BilinearSymbol:
    """``sign(xi_axis)``: bounded, homogeneous of order 0, discontinuous."""
    return BilinearSymbol(lambda a, b: np.sign(a[..., axis]) + 0.0 * b[..., 0], 0.0, f"sign_xi{axis}", 0.0)


# --------------------------------------------------------------------------
# class M_nu


@dataclass(frozen=True)
class ClassReport:
    nu: float
    ks: tuple
    orders: tuple  # multi-indices over the 2d coordinates
    constants: dict  # multi-index -> tuple of per-k constants
    uniform: dict  # multi-index -> max over k
    variation: dict  # multi-index -> (max - min) / max over k
    k_independent: bool

    def to_dict(self) -> dict:
        key = lambda a: "".join(map(str, a))  # noqa: E731
        return {
            "nu": self.nu,
            "ks": list(self.ks),
            "constants": {key(a): list(v) for a, v in self.constants.items()},
            "uniform": {key(a): v for a, v in self.uniform.items()},
            "variation": {key(a): v for a, v in self.variation.items()},
            "k_independent": self.k_independent,
        }


def _derivative(func, pts: np.ndarray, alpha: tuple, h: float) -> np.ndarray:
    """Nested central differences of order ``alpha`` at ``pts``."""
    offsets = [np.zeros(len(alpha))]
    weights = [1.0]
    for axis, count in enumerate(alpha):
        for _ in range(count):
            new_off, new_w = [], []
            for o, c in zip(offsets, weights):
                for sgn in (1.0, -1.0):
                    shifted = o.copy()
                    shifted[axis] += sgn * h
                    new_off.append(shifted)
                    new_w.append(c * sgn / (2 * h))
            offsets, weights = new_off, new_w
    out = np.zeros(len(pts), dtype=complex)
    for o, c in zip(offsets, weights):
        out += c * func(pts + o)
    return out


def _annulus_samples(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    D = 2 * dim
    dirs = rng.standard_normal((count, D))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.concatenate([[1.0], np.exp(rng.uniform(np.log(0.5), np.log(2.0), count - 1))])
    return dirs * radii[:, None]


def class_mnu_check(phi_family: Callable[[int], Callable], nu: float, max_order: int = 2,
                    ks=(-2, -1, 0, 1, 2), dim: int = 1, samples: int = 400, seed: int = 0,
                    tolerance: float = 0.2) -> ClassReport:
    """Estimate the constants of ``|d^beta d^gamma Phi^k| <= C (|xi|+|eta|)^(nu-|beta|-|gamma|)``.

    ``phi_family(k)`` returns a rule taking points of shape ``(P, 2d)``.
    Samples lie in the annulus ``2^k [1/2, 2]`` (radius ``2^k`` included),
    derivatives use central differences with step ``2^k / 256``.
    """
    D = 2 * dim
    base = _annulus_samples(dim, samples, np.random.default_rng(seed))
    orders = tuple(a for n in range(max_order + 1)
                   for a in itertools.product(range(n + 1), repeat=D) if sum(a) == n)
    constants = {a: [] for a in orders}
    for k in ks:
        scale = 2.0**k
        pts = base * scale
        rule = phi_family(k)
        size = np.linalg.norm(pts[:, :dim], axis=1) + np.linalg.norm(pts[:, dim:], axis=1)
        h = scale / 256.0
        for a in orders:
            der = np.abs(_derivative(rule, pts, a, h))
            constants[a].append(float(np.max(der / size ** (nu - sum(a)))))
    uniform = {a: max(v) for a, v in constants.items()}
    variation = {a: (max(v) - min(v)) / max(v) if max(v) > 1e-12 else 0.0 for a, v in constants.items()}
    k_independent = all(v < tolerance for v in variation.values())
    return ClassReport(float(nu), tuple(ks), orders, {a: tuple(v) for a, v in constants.items()},
                       uniform, variation, k_independent)


# --------------------------------------------------------------------------
# maximal domination


def maximal_domination_check(sigma: RescaledPiece, f: SpectralField, g: SpectralField, j: int,
                             l: float, r: float, check: bool = True) -> SpectralField:
    """Pointwise ratio ``|T_{sigma_j}(f, g)| / (||sigma|| (M|f|^l)^(1/l) (M|g|^l)^(1/l))``.

    ``sigma_j(xi, eta) = sigma(2^-j xi, 2^-j eta)`` is the multiplier of the
    kernel ``2^(2jd) sigma^(2^j(x - y1), 2^j(x - y2))`` up to the fixed
    normalization of the Fourier transform.
    """
    d = f.grid.dim
    lo = max(1.0, d / r)
    if not lo < l < 2:
        raise DomainError(f"l must lie in ({lo:g}, 2), got {l}")
    if sigma.rule is None:
        raise ValueError("sigma needs an evaluation rule")
    scale = 2.0 ** (-j)
    rule = sigma.rule
    sym = BilinearSymbol(lambda a, b: rule(scale * a, scale * b), 0.0, f"sigma_{j}", 0.0)
    lhs = np.abs(apply_bilinear(sym, f, g, check=check).space)
    norm = product_sobolev_norm(sigma, r, r)
    mf = maximal_function(SpectralField(f.grid, space=np.abs(f.space) ** l)).space.real ** (1 / l)
    mg = maximal_function(SpectralField(g.grid, space=np.abs(g.space) ** l)).space.real ** (1 / l)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mf * mg > 0, lhs / (norm * mf * mg), 0.0)
    return SpectralField(f.grid, space=ratio)


# --------------------------------------------------------------------------
# multiplication algebra


def algebra_constant(pairs, r: float) -> float:
    """``max ||h1 h2|| / (||h1|| ||h2||)`` in ``W^{(r,r),2}`` over tabulated pairs."""
    best = 0.0
    for h1, h2 in pairs:
        prod = RescaledPiece(0, 0.0, h1.dim, h1.res, h1.values * h2.values)
        den = product_sobolev_norm(h1, r, r) * product_sobolev_norm(h2, r, r)
        best = max(best, product_sobolev_norm(prod, r, r) / den)
    return best
