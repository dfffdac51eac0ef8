"""Lebesgue, mixed, Sobolev, Besov, Triebel-Lizorkin and mixed Hardy norms.

Integrals are uniform Riemann sums weighted by the grid cell volume, which
is spectrally accurate for smooth periodic integrands.  Exponents below 1
give quasi-norms and are handled the same way.

The maximal operator averages ``|f|`` over centered cubes whose half-width
is ``0, 1, 2, 4, ..., N/2`` cells (periodic wrap) and takes the largest
average.  The zero half-width cube is the point itself, so ``M f >= |f|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from .errors import DimensionError, DomainError
from .littlewood_paley import LPFamily, build_lp_family
from .operators import apply_linear, fractional_derivative
from .spectral_core import SpectralField, mean_project

__all__ = [
    "ExponentTuple",
    "lebesgue_norm",
    "mixed_norm",
    "hom_sobolev_norm",
    "besov_norm",
    "triebel_lizorkin_norm",
    "hardy_mixed_norm",
    "maximal_function",
    "fefferman_stein_check",
    "NORMS",
    "evaluate_norm",
]


@dataclass(frozen=True)
class ExponentTuple:
    """Exponents of a Leibniz-type estimate.

    ``mode`` is ``"lebesgue"`` (``p = q`` unused) or ``"mixed"`` (outer ``p``
    in t, inner ``q`` in x).  ``dim`` is the dimension entering the s-gate.
    """

    p1: float
    p2: float
    s: float
    nu: float = 0.0
    q1: float | None = None
    q2: float | None = None
    mode: str = "lebesgue"
    dim: int = 1

    @property
    def p(self) -> float:
        return 1.0 / (1.0 / self.p1 + 1.0 / self.p2)

    @property
    def q(self) -> float | None:
        if self.q1 is None or self.q2 is None:
            return None
        return 1.0 / (1.0 / self.q1 + 1.0 / self.q2)

    def gate(self) -> float:
        """Lower bound on ``s`` required unless ``s`` is a positive even integer."""
        d = self.dim
        bound = max(0.0, d / self.p - d)
        if self.mode == "mixed":
            bound = max(bound, d / self.q - d)
        return bound

    def gate_margin(self) -> float:
        return self.s - self.gate()

    def violations(self) -> list[str]:
        out = []
        if self.mode not in ("lebesgue", "mixed"):
            out.append(f"mode must be 'lebesgue' or 'mixed', got {self.mode!r}")
            return out
        for name in ("p1", "p2") + (("q1", "q2") if self.mode == "mixed" else ()):
            v = getattr(self, name)
            if v is None:
                out.append(f"{name} is required in {self.mode} mode")
            elif not 1.0 < v < math.inf:
                out.append(f"{name}={v} must lie in (1, inf)")
        if out:
            return out
        if self.mode == "mixed" and self.dim != 2:
            out.append("mixed mode needs dim = 2")
        if not 0.0 <= self.nu < 2 * self.dim:
            out.append(f"nu={self.nu} must lie in [0, {2 * self.dim})")
        even = self.s > 0 and float(self.s).is_integer() and int(self.s) % 2 == 0
        if not even and not self.s > self.gate():
            out.append(f"s={self.s} fails the gate s > {self.gate():g} (and is not a positive even integer)")
        return out

    def validate(self) -> "ExponentTuple":
        bad = self.violations()
        if bad:
            raise ValueError("invalid exponent tuple: " + "; ".join(bad))
        return self


# --------------------------------------------------------------------------
# Lebesgue-type norms


def _check_exponent(name: str, v: float) -> None:
    if not 0 < v < math.inf:
        raise DomainError(f"{name} must be a positive finite exponent, got {v}")


def _abs(f) -> np.ndarray:
    return np.abs(f.space if isinstance(f, SpectralField) else np.asarray(f))


def lebesgue_norm(f: SpectralField, p: float) -> float:
    """``(sum |f|^p * cell_volume)^(1/p)``."""
    _check_exponent("p", p)
    a = _abs(f)
    return float(np.sum(a**p) * f.grid.cell_volume) ** (1.0 / p)


def _mixed(values: np.ndarray, spacing: float, p: float, q: float) -> float:
    rows = (np.sum(values**q, axis=1) * spacing) ** (1.0 / q)
    return float(np.sum(rows**p) * spacing) ** (1.0 / p)


def mixed_norm(f: SpectralField, p: float, q: float) -> float:
    """``L^p_t L^q_x`` norm: inner sum over axis 1, outer over axis 0."""
    if f.grid.dim != 2:
        raise DimensionError(f"mixed norms need dim = 2, got {f.grid.dim}")
    _check_exponent("p", p)
    _check_exponent("q", q)
    return _mixed(_abs(f), f.grid.spacing, p, q)


def _space_norm(f: SpectralField, p: float, q: float | None) -> float:
    return lebesgue_norm(f, p) if q is None else mixed_norm(f, p, q)


def hom_sobolev_norm(f: SpectralField, s: float, p: float, q: float | None = None) -> float:
    """``||D^s f||`` in ``L^p`` (or ``L^p L^q`` when ``q`` is given)."""
    df = apply_linear(fractional_derivative(s), mean_project(f)) if s != 0 else f
    return _space_norm(df, p, q)


# --------------------------------------------------------------------------
# Littlewood-Paley norms


def _pieces(f: SpectralField, fam: LPFamily):
    r = f.grid.frequency_norm()
    scale = f.grid.n**f.grid.dim
    for j in fam.scales:
        mult = fam.psi(r, j)
        if np.any(mult):
            yield j, np.abs(np.fft.ifftn(mult * f.freq) * scale)


def _family(f: SpectralField, fam: LPFamily | None) -> LPFamily:
    return fam if fam is not None else build_lp_family(f.grid)


def besov_norm(f: SpectralField, s: float, p: float, q: float, fam: LPFamily | None = None) -> float:
    """``(sum_j (2^(js) ||Delta_j f||_p)^q)^(1/q)``."""
    _check_exponent("q", q)
    fam = _family(f, fam)
    total = 0.0
    for j, a in _pieces(mean_project(f), fam):
        norm = float(np.sum(a**p) * f.grid.cell_volume) ** (1.0 / p)
        total += (2.0 ** (j * s) * norm) ** q
    return total ** (1.0 / q)


def triebel_lizorkin_norm(f: SpectralField, s: float, p: float, q: float,
                          fam: LPFamily | None = None) -> float:
    """``|| (sum_j (2^(js) |Delta_j f|)^q)^(1/q) ||_p``."""
    _check_exponent("p", p)
    _check_exponent("q", q)
    fam = _family(f, fam)
    acc = np.zeros(f.grid.shape)
    for j, a in _pieces(mean_project(f), fam):
        acc += (2.0 ** (j * s) * a) ** q
    return float(np.sum(acc ** (p / q)) * f.grid.cell_volume) ** (1.0 / p)


def hardy_mixed_norm(f: SpectralField, p: float, q: float, fam: LPFamily | None = None) -> float:
    """Mixed norm of the square function ``(sum_j |Delta_j f|^2)^(1/2)``."""
    if f.grid.dim != 2:
        raise DimensionError(f"mixed Hardy norms need dim = 2, got {f.grid.dim}")
    fam = _family(f, fam)
    acc = np.zeros(f.grid.shape)
    for _, a in _pieces(mean_project(f), fam):
        acc += a * a
    return mixed_norm(SpectralField(f.grid, space=np.sqrt(acc)), p, q)


# --------------------------------------------------------------------------
# maximal operator


def _half_widths(n: int) -> list[int]:
    out = [0]
    w = 1
    while w <= n // 2:
        out.append(w)
        w *= 2
    return out


def maximal_function(f) -> SpectralField:
    """Centered dyadic-cube maximal function of ``|f|`` (periodic)."""
    a = _abs(f)
    grid = f.grid
    out = a.copy()
    for rho in _half_widths(grid.n)[1:]:
        size = min(2 * rho + 1, grid.n)
        avg = uniform_filter(a, size=size, mode="wrap")
        np.maximum(out, avg, out=out)
    return SpectralField(grid, space=out)


def fefferman_stein_check(fs, p: float, q: float, r: float) -> float:
    """``||(sum_j (M f_j)^r)^(1/r)||_{L^pL^q} / ||(sum_j |f_j|^r)^(1/r)||_{L^pL^q}``."""
    for name, v in (("p", p), ("q", q), ("r", r)):
        if not 1.0 < v < math.inf:
            raise DomainError(f"{name} must lie in (1, inf), got {v}")
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one field")
    grid = fs[0].grid
    if grid.dim != 2:
        raise DimensionError("the mixed Fefferman-Stein check needs dim = 2")
    top = np.zeros(grid.shape)
    bot = np.zeros(grid.shape)
    for f in fs:
        top += maximal_function(f).space.real ** r
        bot += _abs(f) ** r
    h = grid.spacing
    return _mixed(top ** (1.0 / r), h, p, q) / _mixed(bot ** (1.0 / r), h, p, q)


# --------------------------------------------------------------------------
# registry for config-driven requests

NORMS = {
    "Lebesgue": (lebesgue_norm, ("p",)),
    "Mixed": (mixed_norm, ("p", "q")),
    "HomSobolev": (hom_sobolev_norm, ("s", "p")),
    "Besov": (besov_norm, ("s", "p", "q")),
    "TriebelLizorkin": (triebel_lizorkin_norm, ("s", "p", "q")),
    "HardyMixed": (hardy_mixed_norm, ("p", "q")),
}


def evaluate_norm(kind: str, f: SpectralField, **params) -> float:
    """Evaluate a norm by registry name, e.g. ``evaluate_norm("Besov", f, s=1, p=2, q=2)``."""
    try:
        func, names = NORMS[kind]
    except KeyError:
        raise ValueError(f"unknown norm kind {kind!r}; known: {sorted(NORMS)}") from None
    missing = [n for n in names if n not in params]
    if missing:
        raise ValueError(f"{kind} needs parameters {missing}")
    return func(f, *(params[n] for n in names))
