"""Reproducible test-function families.

Gaussian members are built from their analytic Fourier transform sampled
on the frequency lattice, which is the exact spectrum of the periodized
Gaussian.  Spectra are cut to a fixed absolute band ``|k_i| <= band``, so
the same member is the same trigonometric polynomial on every refinement
of the grid and norms can be compared across resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..spectral_core import SpectralField, TorusGrid

__all__ = [
    "GaussianSpec",
    "gaussian_field",
    "FamilySpec",
    "build_family",
    "build_pairs",
    "random_band_limited",
    "mode_field",
    "bump_tensor_field",
    "default_band",
]


def default_band(grid: TorusGrid) -> int:
    """Largest band whose pairwise sums still fit on the grid."""
    return grid.n // 4 - 1


@dataclass(frozen=True)
class GaussianSpec:
    """``amp * exp(-|x - c|^2 / (2 width^2)) * cos(modulation . (x - c))`` with ``c = center``."""

    center: tuple
    width: float
    modulation: tuple = (0.0,)
    amp: float = 1.0

    def scaled(self, lam: float) -> "GaussianSpec":
        """The dilate ``x -> f(lam x)`` about the origin."""
        return GaussianSpec(tuple(c / lam for c in self.center), self.width / lam,
                            tuple(a * lam for a in self.modulation), self.amp)


def _gaussian_hat(grid: TorusGrid, center, width: float, shift) -> np.ndarray:
    xi = grid.frequencies()
    d = grid.dim
    c = np.broadcast_to(np.asarray(center, float), (d,))
    a = np.broadcast_to(np.asarray(shift, float), (d,))
    r2 = sum((xi[i] - a[i]) ** 2 for i in range(d))
    phase = sum((xi[i] - a[i]) * c[i] for i in range(d))
    return (2 * np.pi * width**2) ** (d / 2) * np.exp(-0.5 * width**2 * r2 - 1j * phase)


def gaussian_field(grid: TorusGrid, spec: GaussianSpec, band: int | None = None) -> SpectralField:
    band = default_band(grid) if band is None else band
    mod = np.broadcast_to(np.asarray(spec.modulation, float), (grid.dim,))
    # cos(a.(x - c)) splits into the two shifted spectra
    c = np.broadcast_to(np.asarray(spec.center, float), (grid.dim,))
    ph = np.exp(-1j * float(mod @ c))
    hat = 0.5 * (ph * _gaussian_hat(grid, spec.center, spec.width, mod)
                 + np.conj(ph) * _gaussian_hat(grid, spec.center, spec.width, -mod))
    coeffs = spec.amp * hat / grid.volume
    mask = np.all(np.abs(grid.wavenumbers()) <= band, axis=0)
    return SpectralField(grid, freq=np.where(mask, coeffs, 0.0))


def random_band_limited(grid: TorusGrid, rng: np.random.Generator, band: int | None = None,
                        decay: float = 0.0) -> SpectralField:
    """Zero-mean field with complex normal coefficients on ``|k_i| <= band``.

    ``decay`` damps coefficients by ``exp(-decay |k|)``; the field is scaled
    to unit sup norm.
    """
    band = default_band(grid) if band is None else band
    k = grid.wavenumbers()
    mask = np.all(np.abs(k) <= band, axis=0)
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    c = c * mask * np.exp(-decay * np.sqrt(np.sum(k * k, axis=0)))
    c.flat[0] = 0.0
    f = SpectralField(grid, freq=c, mean_projected=True)
    peak = f.max_abs()
    return f * (1.0 / peak) if peak > 0 else f


def _bump_coefficients(grid: TorusGrid, center: float, width: float, band: int) -> np.ndarray:
    """1-d Fourier coefficients of ``exp(-1 / (1 - t^2))``, ``t = (x - center) / width``.

    Computed from a fixed fine sampling so the truncated series does not
    depend on the grid resolution.
    """
    fine = 4096
    x = np.arange(fine) * (grid.period / fine)
    t = ((x - center + grid.period / 2) % grid.period - grid.period / 2) / width
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.where(np.abs(t) < 1, np.exp(-1.0 / (1.0 - t * t)), 0.0)
    c = np.fft.fft(vals) / fine
    k = np.fft.fftfreq(grid.n, d=1.0 / grid.n).round().astype(int)
    return np.where(np.abs(k) <= band, c[k % fine], 0.0)


def bump_tensor_field(grid: TorusGrid, centers, widths, amp: float = 1.0, band: int | None = None) -> SpectralField:
    """``amp * prod_i b((x_i - c_i) / w_i)`` with the compact bump ``b``."""
    band = default_band(grid) if band is None else band
    coeffs = np.array(amp, dtype=complex)
    for c, w in zip(np.broadcast_to(centers, (grid.dim,)), np.broadcast_to(widths, (grid.dim,))):
        coeffs = np.multiply.outer(coeffs, _bump_coefficients(grid, float(c), float(w), band))
    return SpectralField(grid, freq=coeffs)


def mode_field(grid: TorusGrid, k) -> SpectralField:
    c = np.zeros(grid.shape, complex)
    idx = tuple(np.asarray(np.broadcast_to(k, (grid.dim,))) % grid.n)
    c[idx] = 1.0
    return SpectralField(grid, freq=c, mean_projected=bool(np.any(np.asarray(k) != 0)))


@dataclass(frozen=True)
class FamilySpec:
    """Recipe for a list of fields.

    kind is ``gaussian`` (random centers, widths, modulations),
    ``nonnegative`` (unmodulated Gaussians), ``bump`` (tensor products of
    compactly supported bumps, band-truncated), ``random`` (band-limited
    noise) or ``modepair`` (``params["a"]`` and ``params["b"]``).
    """

    kind: str = "gaussian"
    count: int = 50
    seed: int = 0
    params: dict = field(default_factory=dict)

    def widths(self, grid: TorusGrid) -> tuple[float, float]:
        base = grid.period / 16.0
        lo, hi = self.params.get("width_range", (0.8, 1.2))
        return lo * base, hi * base

    def gaussian_specs(self, grid: TorusGrid, count: int | None = None) -> list[GaussianSpec]:
        count = self.count if count is None else count
        rng = np.random.default_rng(self.seed)
        d = grid.dim
        lo, hi = self.widths(grid)
        spread = self.params.get("spread", 0.125) * grid.period
        max_mod = self.params.get("max_modulation", 2.0) if self.kind == "gaussian" else 0.0
        specs = []
        for _ in range(count):
            center = tuple(grid.period / 2 + rng.uniform(-spread, spread, d))
            width = float(rng.uniform(lo, hi))
            mod = tuple(rng.uniform(0.0, max_mod, d) / width * 0.5)
            amp = float(rng.uniform(0.5, 2.0))
            specs.append(GaussianSpec(center, width, mod, amp))
        return specs


def build_family(spec: FamilySpec, grid: TorusGrid, band: int | None = None) -> list[SpectralField]:
    if spec.kind in ("gaussian", "nonnegative"):
        return [gaussian_field(grid, g, band) for g in spec.gaussian_specs(grid)]
    if spec.kind == "bump":
        rng = np.random.default_rng(spec.seed)
        lo, hi = spec.widths(grid)
        spread = spec.params.get("spread", 0.125) * grid.period
        return [bump_tensor_field(grid, grid.period / 2 + rng.uniform(-spread, spread, grid.dim),
                                  3 * rng.uniform(lo, hi, grid.dim), rng.uniform(0.5, 2.0), band)
                for _ in range(spec.count)]
    if spec.kind == "random":
        rng = np.random.default_rng(spec.seed)
        return [random_band_limited(grid, rng, band, spec.params.get("decay", 0.0)) for _ in range(spec.count)]
    if spec.kind == "modepair":
        return [mode_field(grid, spec.params["a"]), mode_field(grid, spec.params["b"])]
    raise ValueError(f"unknown family kind {spec.kind!r}")


def build_pairs(spec: FamilySpec, grid: TorusGrid, band: int | None = None):
    """``count`` pairs ``(f, g)`` drawn from a family of twice the size."""
    doubled = FamilySpec(spec.kind, 2 * spec.count, spec.seed, spec.params)
    fields = build_family(doubled, grid, band)
    return list(zip(fields[0::2], fields[1::2]))
