"""Fourier spectral toolbox on the periodic interval [0, L).

Equispaced grids, FFT differentiation, rectangle-rule quadrature (spectrally
accurate for periodic integrands), and the parity-adapted trigonometric bases
(cosine / sine / full) that block-diagonalize Hill operators with even
potentials.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisError, ParameterError

EVEN = "even"
ODD = "odd"
NONE = "none"

PARITIES = (EVEN, ODD, NONE)

#: relative tolerance for the parity self-consistency check of a RealField
PARITY_RTOL = 1e-10


@dataclass(frozen=True)
class PeriodicGrid:
    """Equispaced nodes x_j = j*L/N, j = 0..N-1, on the period cell [0, L)."""

    length: float
    size: int

    def __post_init__(self):
        if not (np.isfinite(self.length) and self.length > 0.0):
            raise ParameterError(f"grid length must be positive and finite, got {self.length}")
        if not isinstance(self.size, (int, np.integer)) or self.size < 8 or self.size % 2:
            raise ParameterError(f"grid size must be an even integer >= 8, got {self.size}")
        object.__setattr__(self, "size", int(self.size))

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.size) * (self.length / self.size)

    @property
    def spacing(self) -> float:
        return self.length / self.size

    @property
    def rfft_wavenumbers(self) -> np.ndarray:
        """Wavenumbers 2*pi*n/L for the rfft layout n = 0..N/2."""
        return 2.0 * np.pi * np.arange(self.size // 2 + 1) / self.length


def build_grid(length: float, size: int) -> PeriodicGrid:
    """Validate (L, N) and return the periodic grid."""
    return PeriodicGrid(length, size)


def _reverse(values: np.ndarray) -> np.ndarray:
    # values of x -> -x on the periodic grid: index j -> (N - j) mod N
    n = values.shape[0]
    return values[(-np.arange(n)) % n]


def parity_defect(values: np.ndarray, parity: str) -> float:
    """Max-norm deviation of ``values`` from the requested symmetry class."""
    if parity == NONE:
        return 0.0
    rev = _reverse(values)
    if parity == EVEN:
        return float(np.max(np.abs(values - rev)))
    if parity == ODD:
        return float(np.max(np.abs(values + rev)))
    raise ParameterError(f"unknown parity {parity!r}")


@dataclass(frozen=True)
class RealField:
    """Real grid function with an optional declared parity.

    Parity is validated on construction: the mismatch against the reflected
    samples must stay below PARITY_RTOL * max|values|.  Values are stored
    read-only; all operations return new fields.
    """

    grid: PeriodicGrid
    values: np.ndarray
    parity: str = NONE

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != (self.grid.size,):
            raise ParameterError(
                f"field has {vals.shape} values for a grid of size {self.grid.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise ParameterError("field values must be finite")
        if self.parity not in PARITIES:
            raise ParameterError(f"unknown parity {self.parity!r}")
        scale = float(np.max(np.abs(vals)))
        defect = parity_defect(vals, self.parity)
        if defect > PARITY_RTOL * scale:
            raise ParameterError(
                f"declared parity {self.parity!r} violated: defect {defect:.3e} "
                f"exceeds {PARITY_RTOL:.0e} * max|values| = {PARITY_RTOL * scale:.3e}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def sample_function(grid: PeriodicGrid, fn, parity: str = NONE) -> RealField:
    """Sample fn on the grid nodes and tag the result with ``parity``."""
    return RealField(grid, np.asarray([fn(x) for x in grid.nodes], dtype=float), parity)


def project_parity(field: RealField, parity: str) -> RealField:
    """Symmetric/antisymmetric part of a field; idempotent on its own output."""
    if parity == NONE:
        return RealField(field.grid, field.values, NONE)
    rev = _reverse(field.values)
    if parity == EVEN:
        return RealField(field.grid, 0.5 * (field.values + rev), EVEN)
    if parity == ODD:
        return RealField(field.grid, 0.5 * (field.values - rev), ODD)
    raise ParameterError(f"unknown parity {parity!r}")


_DERIVATIVE_PARITY = {EVEN: ODD, ODD: EVEN, NONE: NONE}


def first_derivative(field: RealField) -> RealField:
    """Spectral d/dx.  Flips parity; the Nyquist mode is annihilated."""
    xi = field.grid.rfft_wavenumbers
    coef = np.fft.rfft(field.values) * (1j * xi)
    coef[-1] = 0.0  # odd-order derivative of the sawtooth mode is not representable
    vals = np.fft.irfft(coef, n=field.grid.size)
    return RealField(field.grid, vals, _DERIVATIVE_PARITY[field.parity])


def second_derivative(field: RealField) -> RealField:
    """Spectral d^2/dx^2.  Preserves parity."""
    xi = field.grid.rfft_wavenumbers
    coef = np.fft.rfft(field.values) * (-(xi**2))
    vals = np.fft.irfft(coef, n=field.grid.size)
    return RealField(field.grid, vals, field.parity)


def integrate(field: RealField) -> float:
    """Rectangle rule (L/N) * sum, spectrally accurate on the period cell."""
    return float(field.grid.spacing * np.sum(field.values))


def inner(f: RealField, g: RealField) -> float:
    """Discrete L2 inner product (L/N) * sum f_j g_j."""
    if f.grid != g.grid:
        raise ParameterError("inner product requires a common grid")
    return float(f.grid.spacing * np.dot(f.values, g.values))


def l2_norm(field: RealField) -> float:
    return float(np.sqrt(field.grid.spacing * np.dot(field.values, field.values)))


def resample(field: RealField, new_size: int) -> RealField:
    """Trigonometric interpolation onto a grid with ``new_size`` nodes.

    Exact for band-limited fields; downsampling truncates the spectrum.
    """
    grid = field.grid
    new_grid = PeriodicGrid(grid.length, new_size)
    n, m = grid.size, new_grid.size
    coef = np.fft.rfft(field.values)
    if m >= n:
        out = np.zeros(m // 2 + 1, dtype=complex)
        out[: n // 2] = coef[: n // 2]
        out[n // 2] = 0.5 * coef[n // 2]  # split the Nyquist cosine between +/- modes
    else:
        out = coef[: m // 2 + 1].copy()
        out[m // 2] = out[m // 2].real  # target Nyquist mode carries no phase
    vals = np.fft.irfft(out * (m / n), n=m)
    return RealField(new_grid, vals, field.parity)


COSINE = "cosine"
SINE = "sine"
FULL = "full_fourier"

_BASIS_KINDS = (COSINE, SINE, FULL)
_BASIS_PARITY = {COSINE: EVEN, SINE: ODD, FULL: NONE}


@dataclass(frozen=True)
class ParityBasis:
    """Discrete-orthonormal trigonometric basis on a periodic grid.

    cosine:       cos(2*pi*n*x/L), n = 0..N/2          (even subspace, N/2+1)
    sine:         sin(2*pi*n*x/L), n = 1..N/2-1        (odd subspace,  N/2-1)
    full_fourier: cosine block followed by sine block   (dimension N)

    Columns are normalized against the quadrature inner product
    (L/N) * sum_j, so analysis/synthesis are transposes of each other up to
    the quadrature weight.
    """

    kind: str
    grid: PeriodicGrid

    def __post_init__(self):
        if self.kind not in _BASIS_KINDS:
            raise BasisError(f"unknown basis kind {self.kind!r}")

    @property
    def dimension(self) -> int:
        n = self.grid.size
        if self.kind == COSINE:
            return n // 2 + 1
        if self.kind == SINE:
            return n // 2 - 1
        return n

    @property
    def parity(self) -> str:
        return _BASIS_PARITY[self.kind]

    def frequencies(self) -> np.ndarray:
        """Wavenumber of each column (2*pi*n/L)."""
        n = self.grid.size
        two_pi_over_l = 2.0 * np.pi / self.grid.length
        cos_part = two_pi_over_l * np.arange(n // 2 + 1)
        sin_part = two_pi_over_l * np.arange(1, n // 2)
        if self.kind == COSINE:
            return cos_part
        if self.kind == SINE:
            return sin_part
        return np.concatenate([cos_part, sin_part])

    def matrix(self) -> np.ndarray:
        """Synthesis matrix: (N, dimension), column n = basis function at nodes."""
        x = self.grid.nodes
        length, n = self.grid.length, self.grid.size
        cols = []
        if self.kind in (COSINE, FULL):
            for m in range(n // 2 + 1):
                scale = np.sqrt((1.0 if m in (0, n // 2) else 2.0) / length)
                cols.append(scale * np.cos(2.0 * np.pi * m * x / length))
        if self.kind in (SINE, FULL):
            for m in range(1, n // 2):
                cols.append(np.sqrt(2.0 / length) * np.sin(2.0 * np.pi * m * x / length))
        return np.column_stack(cols)

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Coefficients of a grid function (exact for fields in the subspace)."""
        return self.grid.spacing * (self.matrix().T @ values)

    def synthesize(self, coefficients: np.ndarray) -> np.ndarray:
        """Grid values of a coefficient vector."""
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (self.dimension,):
            raise ParameterError(
                f"expected {self.dimension} coefficients, got {coefficients.shape}"
            )
        return self.matrix() @ coefficients

    def field(self, coefficients: np.ndarray) -> RealField:
        return RealField(self.grid, self.synthesize(coefficients), self.parity)
