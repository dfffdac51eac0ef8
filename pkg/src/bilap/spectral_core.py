"""Periodic grids, dual-representation fields and exact spectral products.

Conventions
-----------
The torus is ``[0, L)^d`` sampled at ``x_j = j L / N``.  Frequencies live on
the lattice ``xi = 2 pi k / L`` with ``-N/2 <= k_i < N/2``, stored in numpy
FFT order.  The forward transform uses the ``exp(-i x.xi)`` sign and is
normalized so that the pure mode ``exp(i xi.x)`` has coefficient exactly 1::

    c_k = N^{-d} sum_j f(x_j) exp(-i xi_k . x_j)
    f(x_j) = sum_k c_k exp(i xi_k . x_j)

With this normalization Parseval reads
``sum |f|^2 * cell_volume == L^d * sum |c|^2``.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import BandLimitExceeded, DimensionError

__all__ = [
    "TorusGrid",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
    "mean_project",
    "band_limit",
    "resize_spectrum",
    "dealiased_product",
    "check_band_limit",
    "save_field",
    "load_field",
    "write_blap",
    "read_blap",
    "export_csv",
]

BLAP_MAGIC = b"BLAP1"


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the torus ``[0, period)^dim``."""

    dim: int
    n: int
    period: float = 2 * np.pi

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DimensionError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"points per axis must be a power of two >= 8, got {self.n}")
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def spacing(self) -> float:
        return self.period / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.period**self.dim

    @property
    def dxi(self) -> float:
        """Lattice spacing in frequency."""
        return 2 * np.pi / self.period

    def refined(self, factor: int = 2) -> "TorusGrid":
        return TorusGrid(self.dim, self.n * factor, self.period)

    def coordinates(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.n) * self.spacing
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))

    @cached_property
    def _wavenumbers(self) -> np.ndarray:
        k = np.fft.fftfreq(self.n, d=1.0 / self.n).round().astype(np.int64)
        grids = np.meshgrid(*([k] * self.dim), indexing="ij")
        out = np.stack(grids)
        out.flags.writeable = False
        return out

    def wavenumbers(self) -> np.ndarray:
        """Integer lattice ``k`` with shape ``(dim, N, ..., N)`` in FFT order."""
        return self._wavenumbers

    def frequencies(self) -> np.ndarray:
        """Physical frequencies ``2 pi k / L``, shape ``(dim, N, ..., N)``."""
        return self._wavenumbers * self.dxi

    @cached_property
    def _freq_norm(self) -> np.ndarray:
        out = np.sqrt(np.sum(self.frequencies() ** 2, axis=0))
        out.flags.writeable = False
        return out

    def frequency_norm(self) -> np.ndarray:
        return self._freq_norm


class SpectralField:
    """Complex field on a torus grid carried in space and frequency form.

    Either representation may be missing; it is computed on first access
    and cached.  Arrays handed out are read-only so a field can be shared
    between threads without copying.
    """

    __slots__ = ("grid", "_space", "_freq", "mean_projected")

    def __init__(self, grid: TorusGrid, space=None, freq=None, mean_projected: bool = False):
        if space is None and freq is None:
            raise ValueError("need space or frequency values")
        self.grid = grid
        self._space = _frozen(space, grid.shape) if space is not None else None
        self._freq = _frozen(freq, grid.shape, complex) if freq is not None else None
        self.mean_projected = bool(mean_projected)
        if self.mean_projected and self._freq is not None and self._freq.flat[0] != 0:
            raise ValueError("mean_projected field must have a zero mean coefficient")

    @classmethod
    def from_space(cls, grid: TorusGrid, values) -> "SpectralField":
        return cls(grid, space=values)

    @classmethod
    def from_freq(cls, grid: TorusGrid, coefficients, mean_projected: bool = False) -> "SpectralField":
        return cls(grid, freq=coefficients, mean_projected=mean_projected)

    @classmethod
    def from_function(cls, grid: TorusGrid, func) -> "SpectralField":
        return cls(grid, space=func(*grid.coordinates()))

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpectralField":
        return cls(grid, freq=np.zeros(grid.shape, complex), mean_projected=True)

    @property
    def has_space(self) -> bool:
        return self._space is not None

    @property
    def has_freq(self) -> bool:
        return self._freq is not None

    @property
    def space(self) -> np.ndarray:
        if self._space is None:
            self._space = _frozen(np.fft.ifftn(self._freq) * self.grid.n**self.grid.dim, self.grid.shape)
        return self._space

    @property
    def freq(self) -> np.ndarray:
        if self._freq is None:
            self._freq = _frozen(np.fft.fftn(self._space) / self.grid.n**self.grid.dim, self.grid.shape, complex)
        return self._freq

    def __repr__(self):
        reps = "+".join(n for n, a in (("space", self._space), ("freq", self._freq)) if a is not None)
        return f"SpectralField(dim={self.grid.dim}, n={self.grid.n}, L={self.grid.period:g}, {reps})"

    # arithmetic on the frequency side keeps everything exact and lazy
    def _combine(self, other, op):
        if isinstance(other, SpectralField):
            _same_grid(self, other)
            freq = op(self.freq, other.freq)
            mp = self.mean_projected and other.mean_projected
        else:
            freq = op(self.freq, other)
            mp = self.mean_projected
        return SpectralField(self.grid, freq=freq, mean_projected=mp)

    def __add__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        return self._combine(other, np.add)

    def __sub__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        return self._combine(other, np.subtract)

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            return NotImplemented
        return self._combine(scalar, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def with_space(self) -> "SpectralField":
        self.space
        return self

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.space)))

    def l2_norm(self) -> float:
        """L^2 norm from the spectrum (Parseval)."""
        return float(np.sqrt(self.grid.volume * np.sum(np.abs(self.freq) ** 2)))


def _frozen(values, shape, dtype=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if dtype is None and not np.iscomplexobj(arr):
        arr = arr.astype(float)
    arr.flags.writeable = False
    return arr


def _same_grid(f: SpectralField, g: SpectralField) -> None:
    if f.grid != g.grid:
        raise ValueError(f"fields live on different grids: {f.grid} vs {g.grid}")


def forward_transform(f: SpectralField) -> SpectralField:
    """Return ``f`` with its spectrum populated (idempotent)."""
    f.freq
    return f


def inverse_transform(f: SpectralField) -> SpectralField:
    """Return ``f`` with its space samples populated (idempotent)."""
    f.space
    return f


def mean_project(f: SpectralField) -> SpectralField:
    """Zero the k = 0 coefficient (the quotient by constants)."""
    if f.mean_projected:
        return f
    c = f.freq.copy()
    c.flat[0] = 0.0
    return SpectralField(f.grid, freq=c, mean_projected=True)


def band_limit(f: SpectralField, kmax: int) -> SpectralField:
    """Keep only modes with ``|k_i| <= kmax`` on every axis."""
    mask = np.all(np.abs(f.grid.wavenumbers()) <= kmax, axis=0)
    return SpectralField(f.grid, freq=np.where(mask, f.freq, 0.0), mean_projected=f.mean_projected)


def band_excess(f: SpectralField, cutoff: float) -> float:
    """Fraction of spectral energy in modes with some ``|k_i| >= cutoff``."""
    energy = np.abs(f.freq) ** 2
    total = energy.sum()
    if total == 0:
        return 0.0
    outside = np.any(np.abs(f.grid.wavenumbers()) >= cutoff, axis=0)
    return float(energy[outside].sum() / total)


def check_band_limit(f: SpectralField, rtol: float = 1e-10) -> None:
    """Raise :class:`BandLimitExceeded` unless ``f`` lives in ``|k_i| < N/3``."""
    excess = band_excess(f, f.grid.n / 3)
    if excess > rtol:
        raise BandLimitExceeded(
            f"{excess:.3e} of spectral energy lies at |k_i| >= N/3 = {f.grid.n / 3:.2f}"
        )


def _axis_take(n_old: int, n_new: int) -> tuple[np.ndarray, np.ndarray]:
    """Index maps moving wavenumbers between FFT orderings of two sizes."""
    keep = min(n_old, n_new)
    k = np.arange(-(keep // 2), keep - keep // 2)
    return k % n_old, k % n_new


def resize_spectrum(coefficients: np.ndarray, n_new: int) -> np.ndarray:
    """Zero-pad or truncate an FFT-ordered spectrum to ``n_new`` per axis.

    Wavenumbers are preserved; truncation keeps ``-n_new/2 <= k < n_new/2``.
    """
    n_old = coefficients.shape[0]
    d = coefficients.ndim
    src, dst = _axis_take(n_old, n_new)
    out = np.zeros((n_new,) * d, dtype=complex)
    out[np.ix_(*([dst] * d))] = coefficients[np.ix_(*([src] * d))]
    return out


def dealiased_product(f: SpectralField, g: SpectralField, check: bool = True) -> SpectralField:
    """Exact pointwise product of two band-limited fields.

    Both spectra are zero padded to ``2N``, multiplied in space and
    truncated back, which equals the discrete convolution of the spectra
    restricted to the output lattice.
    """
    _same_grid(f, g)
    if check:
        check_band_limit(f)
        check_band_limit(g)
    grid = f.grid
    big = 2 * grid.n
    scale = big**grid.dim
    a = np.fft.ifftn(resize_spectrum(f.freq, big)) * scale
    b = np.fft.ifftn(resize_spectrum(g.freq, big)) * scale
    c = np.fft.fftn(a * b) / scale
    return SpectralField(grid, freq=resize_spectrum(c, grid.n))


# --------------------------------------------------------------------------
# serialization


def write_blap(path, values: np.ndarray, period: float) -> None:
    """Write a cubic complex array in the ``BLAP1`` binary layout."""
    values = np.asarray(values, dtype=complex)
    n = values.shape[0]
    if any(s != n for s in values.shape):
        raise ValueError("BLAP1 stores arrays with equal extent on every axis")
    path = Path(path)
    header = BLAP_MAGIC + struct.pack("<I", values.ndim) + struct.pack(f"<{values.ndim}I", *values.shape)
    header += struct.pack("<d", float(period))
    payload = np.ascontiguousarray(values).astype("<c16").tobytes()
    try:
        path.write_bytes(header + payload)
    except OSError as exc:
        raise OSError(f"cannot write field to {path}: {exc}") from exc


def read_blap(path) -> tuple[np.ndarray, float]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read field from {path}: {exc}") from exc
    if raw[:5] != BLAP_MAGIC:
        raise ValueError(f"{path}: not a BLAP1 file")
    (dim,) = struct.unpack_from("<I", raw, 5)
    shape = struct.unpack_from(f"<{dim}I", raw, 9)
    offset = 9 + 4 * dim
    (period,) = struct.unpack_from("<d", raw, offset)
    offset += 8
    count = int(np.prod(shape))
    if offset + 16 * count != len(raw):
        raise ValueError(f"{path}: payload size does not match header")
    data = np.frombuffer(raw, dtype="<c16", count=count, offset=offset)
    return data.reshape(shape).astype(complex), period


def save_field(path, f: SpectralField) -> None:
    """Store the space samples of ``f``."""
    write_blap(path, f.space, f.grid.period)


def load_field(path) -> SpectralField:
    values, period = read_blap(path)
    grid = TorusGrid(values.ndim, values.shape[0], period)
    return SpectralField.from_space(grid, values)


def export_csv(path, f: SpectralField, representation: str = "space") -> None:
    """Write ``index columns, re, im`` rows for one representation."""
    values = f.space if representation == "space" else f.freq
    d = f.grid.dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"i{a}" for a in range(d)] + ["re", "im"])
        for idx in np.ndindex(values.shape):
            v = complex(values[idx])
            w.writerow(list(idx) + [repr(v.real), repr(v.imag)])
