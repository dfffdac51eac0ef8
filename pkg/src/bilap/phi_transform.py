"""Self-dual phi-transform over dyadic cubes and the discrete square function.

At scale ``j`` the cubes have side ``2^-j`` and there are ``M_j = 2^j L``
of them per axis, so ``2^j L`` must be an integer for every scale in use.
The coefficient of the cube ``Q`` with lower-left corner ``x_Q`` is

    c_Q = |Q|^(1/2) (psi_{2^-j} * f)(x_Q)

with the normalized generator ``sum_j psi_hat(2^-j xi)^2 = 1``.  The
convolution is a trigonometric polynomial of degree below ``M_j / 2``, so
its corner values come exactly from an ``M_j``-point inverse FFT; corners
need not sit on the field grid.  Synthesis ``sum_Q c_Q psi_Q`` reverses
each step, and both the frame identity ``sum |c_Q|^2 = ||f||_2^2`` and the
reproducing formula hold to rounding on the covered band.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DimensionError, ScaleRangeError
from .function_norms import hardy_mixed_norm, mixed_norm
from .littlewood_paley import LPFamily, build_lp_family
from .spectral_core import SpectralField, TorusGrid, mean_project, resize_spectrum

__all__ = [
    "DyadicCube",
    "CoefficientTree",
    "analyze",
    "synthesize",
    "discrete_square_function",
    "embedding_ratio",
    "reverse_embedding_ratio",
    "check_generator",
]


@dataclass(frozen=True)
class DyadicCube:
    j: int
    corner: tuple

    def side(self) -> float:
        return 2.0 ** (-self.j)

    def volume(self, dim: int) -> float:
        return 2.0 ** (-self.j * dim)

    def lower_left(self) -> tuple:
        return tuple(c * self.side() for c in self.corner)


def _cubes_per_axis(j: int, period: float) -> int:
    m = 2.0**j * period
    if abs(m - round(m)) > 1e-9 or round(m) < 1:
        raise ScaleRangeError(f"2^{j} * L = {m:g} is not a positive integer; dyadic cubes do not tile the torus")
    return int(round(m))


@dataclass(frozen=True)
class CoefficientTree:
    """Coefficients ``c_Q`` per scale, each an ``M_j^d`` array indexed by corner."""

    grid: TorusGrid
    scales: tuple
    coeffs: dict

    def total_energy(self) -> float:
        return float(sum(np.sum(np.abs(c) ** 2) for c in self.coeffs.values()))

    def scaled(self, factor: complex) -> "CoefficientTree":
        return CoefficientTree(self.grid, self.scales, {j: factor * c for j, c in self.coeffs.items()})

    def cubes(self):
        for j in self.scales:
            c = self.coeffs[j]
            for idx in zip(*np.nonzero(c)):
                yield DyadicCube(j, tuple(int(i) for i in idx)), complex(c[idx])

    @classmethod
    def empty(cls, grid: TorusGrid, scales) -> "CoefficientTree":
        scales = tuple(scales)
        coeffs = {j: np.zeros((_cubes_per_axis(j, grid.period),) * grid.dim, complex) for j in scales}
        return cls(grid, scales, coeffs)

    def with_cube(self, cube: DyadicCube, value: complex) -> "CoefficientTree":
        coeffs = {j: c.copy() for j, c in self.coeffs.items()}
        coeffs[cube.j][cube.corner] = value
        return CoefficientTree(self.grid, self.scales, coeffs)

    def to_csv(self, path) -> None:
        """Rows ``j, corner..., re, im`` for every stored cube."""
        d = self.grid.dim
        names = ["corner_t", "corner_x"] if d == 2 else ["corner_x"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["j"] + names + ["re", "im"])
            for j in self.scales:
                c = self.coeffs[j]
                for idx in np.ndindex(c.shape):
                    v = complex(c[idx])
                    w.writerow([j] + list(idx) + [repr(v.real), repr(v.imag)])


def check_generator(fam: LPFamily) -> None:
    if not fam.normalized:
        raise ValueError("the phi-transform needs the normalized generator (build_lp_family(..., normalized=True))")


def _covered(f: SpectralField, fam: LPFamily) -> None:
    support = np.abs(f.freq) > 0
    support.flat[0] = False
    if not np.any(support):
        return
    r = f.grid.frequency_norm()[support]
    err = np.max(np.abs(fam.partition(r) - 1.0))
    if err > 1e-12:
        raise ScaleRangeError(f"spectrum not covered by scales {fam.j_min}..{fam.j_max} (partition error {err:.2e})")


def analyze(f: SpectralField, gen: LPFamily | None = None) -> CoefficientTree:
    grid = f.grid
    if grid.dim != 2:
        raise DimensionError(f"the phi-transform works on dim = 2, got {grid.dim}")
    gen = gen if gen is not None else build_lp_family(grid, normalized=True)
    check_generator(gen)
    f = mean_project(f)
    _covered(f, gen)
    r = grid.frequency_norm()
    d = grid.dim
    coeffs = {}
    nonzero = r[r > 0]
    scales = tuple(j for j in gen.scales if np.any(gen.psi(nonzero, j)))
    for j in scales:
        m = _cubes_per_axis(j, grid.period)
        spec = resize_spectrum(gen.psi(r, j) * f.freq, m)
        samples = np.fft.ifftn(spec) * m**d
        coeffs[j] = 2.0 ** (-j * d / 2) * samples
    return CoefficientTree(grid, scales, coeffs)


def synthesize(tree: CoefficientTree, gen: LPFamily | None = None) -> SpectralField:
    grid = tree.grid
    gen = gen if gen is not None else build_lp_family(grid, normalized=True)
    check_generator(gen)
    r = grid.frequency_norm()
    d = grid.dim
    out = np.zeros(grid.shape, complex)
    for j in tree.scales:
        c = tree.coeffs[j]
        m = c.shape[0]
        spec = np.fft.fftn(c) * (2.0 ** (j * d / 2) / m**d)
        out += gen.psi(r, j) * resize_spectrum(spec, grid.n)
    out.flat[0] = 0.0
    return SpectralField(grid, freq=out, mean_projected=True)


def discrete_square_function(tree: CoefficientTree) -> SpectralField:
    """``(sum_Q (|Q|^(-1/2) |c_Q|)^2 chi_Q)^(1/2)`` sampled on the field grid."""
    grid = tree.grid
    d = grid.dim
    acc = np.zeros(grid.shape)
    i = np.arange(grid.n)
    for j in tree.scales:
        c = tree.coeffs[j]
        m = c.shape[0]
        cell = (i * m) // grid.n
        vals = 2.0 ** (j * d) * np.abs(c) ** 2
        acc += vals[np.ix_(*([cell] * d))]
    return SpectralField(grid, space=np.sqrt(acc))


def embedding_ratio(f: SpectralField, p: float, q: float, fam: LPFamily | None = None) -> float:
    """``||f||_{L^pL^q} / ||f||_{H^{p,q}}``."""
    f = mean_project(f)
    hardy = hardy_mixed_norm(f, p, q, fam)
    if hardy < 1e-14:
        raise DegenerateInput(f"Hardy norm {hardy:.3e} too small for a meaningful ratio")
    return mixed_norm(f, p, q) / hardy


def reverse_embedding_ratio(f: SpectralField, p: float, q: float, fam: LPFamily | None = None) -> float:
    """``||f||_{H^{p,q}} / ||f||_{L^pL^q}``, measured but not bounded for ``min(p, q) <= 1``."""
    f = mean_project(f)
    base = mixed_norm(f, p, q)
    if base < 1e-14:
        raise DegenerateInput(f"mixed norm {base:.3e} too small for a meaningful ratio")
    return hardy_mixed_norm(f, p, q, fam) / base
