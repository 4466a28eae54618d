"""Multitaper estimate of the evolutionary spectral density on a time-frequency grid.

At each block center t and angular frequency w the estimate is the average of
the K squared tapered transforms over the length-N block around t. Grid
conventions: I = max(2, floor(log2 T)) non-overlapping blocks, frequencies
spaced B = 2*pi*(K+1)/(N+1) apart with a 0.7*B buffer at both band edges.
"""

import math
from dataclasses import dataclass

import numpy as np

from .backend import multitaper_grid
from .tapers import TaperSet, TaperSpec, compute_dpss

__all__ = [
    "TFGrid",
    "SpectralEstimate",
    "build_grid",
    "default_tapers",
    "estimate_at",
    "estimate_grid",
    "write_estimate_csv",
    "read_estimate_csv",
]

DEFAULT_TAPER_COUNT = 5
DEFAULT_BUFFER_FRAC = 0.7


@dataclass(frozen=True)
class TFGrid:
    """Block centers and frequency samples for the estimate table."""

    block_centers: np.ndarray
    freqs: np.ndarray
    N: int
    spacing: float
    buffer: float

    def __post_init__(self):
        object.__setattr__(self, "block_centers", np.asarray(self.block_centers, dtype=np.int64))
        object.__setattr__(self, "freqs", np.asarray(self.freqs, dtype=float))
        if self.I < 2 or self.J < 2:
            raise ValueError(f"grid needs I >= 2 and J >= 2, got I={self.I}, J={self.J}")
        tol = 1e-9
        if self.freqs[0] < self.buffer - tol or self.freqs[-1] > np.pi - self.buffer + tol:
            raise ValueError("frequencies must lie within the buffered band")
        if self.J > 1 and not np.allclose(np.diff(self.freqs), self.spacing, atol=tol):
            raise ValueError("frequencies must be evenly spaced by the stated spacing")

    @property
    def I(self) -> int:
        return len(self.block_centers)

    @property
    def J(self) -> int:
        return len(self.freqs)


@dataclass
class SpectralEstimate:
    """Grid of nonnegative spectral density estimates and the taper count used."""

    grid: TFGrid
    values: np.ndarray
    K: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.I, self.grid.J):
            raise ValueError(
                f"estimate shape {self.values.shape} does not match grid "
                f"({self.grid.I}, {self.grid.J})"
            )


def build_grid(T: int, K: int, blocks: int | None = None,
               buffer_frac: float = DEFAULT_BUFFER_FRAC) -> TFGrid:
    """Default time-frequency grid for a length-T series with K tapers.

    Block count I = max(2, floor(log2 T)) unless overridden; block length is
    the largest odd N <= floor(T/I); frequencies run from the buffer up to
    pi - buffer in steps of B = 2*pi*(K+1)/(N+1).
    """
    if T < 32:
        raise ValueError(f"series length T must be >= 32, got {T}")
    if K < 1:
        raise ValueError(f"taper count K must be >= 1, got {K}")
    if not 0.5 <= buffer_frac <= 1.0:
        raise ValueError(f"buffer_frac must lie in [0.5, 1.0], got {buffer_frac}")
    I = int(blocks) if blocks is not None else max(2, int(math.floor(math.log2(T))))
    if I < 2:
        raise ValueError(f"block count must be >= 2, got {I}")
    N = T // I
    if N % 2 == 0:
        N -= 1
    if N < 2 * K + 1:
        raise ValueError(
            f"block length N={N} violates N >= 2K+1 = {2 * K + 1}; "
            f"reduce the block count or the taper count"
        )
    spacing = 2.0 * np.pi * (K + 1) / (N + 1)
    buffer = buffer_frac * spacing
    J = 1 + int(math.floor((np.pi - 2.0 * buffer) / spacing))
    if J < 2:
        raise ValueError(
            f"only {J} frequencies fit between the buffers (B={spacing:.4f}, "
            f"buffer={buffer:.4f}); J >= 2 is required"
        )
    freqs = buffer + spacing * np.arange(J)
    centers = np.arange(I) * N + (N - 1) // 2
    return TFGrid(block_centers=centers, freqs=freqs, N=N, spacing=spacing, buffer=buffer)


def default_tapers(N: int, K: int = DEFAULT_TAPER_COUNT) -> TaperSet:
    """Taper set paired with the default grid: W = (K+1)*pi/N for K tapers."""
    return compute_dpss(TaperSpec(N=N, W=(K + 1) * np.pi / N, K=K))


def _values_of(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x), dtype=float)


def _check_block(t: int, N: int, T: int) -> None:
    half = (N - 1) // 2
    if t - half < 0 or t + half > T - 1:
        raise ValueError(
            f"block [{t - half}, {t + half}] around t={t} falls outside the series [0, {T - 1}]"
        )


def estimate_at(x, t: int, w: float, ts: TaperSet) -> float:
    """Spectral density estimate at a single block center t and frequency w."""
    values = _values_of(x)
    _check_block(t, ts.N, len(values))
    out = multitaper_grid(values, np.array([t]), ts.tapers, np.array([float(w)]))
    return float(out[0, 0])


def estimate_grid(x, grid: TFGrid, ts: TaperSet) -> SpectralEstimate:
    """Spectral density estimates at every (block center, frequency) of the grid."""
    if ts.N != grid.N:
        raise ValueError(f"taper length {ts.N} does not match grid block length {grid.N}")
    expected = 2.0 * np.pi * (ts.K + 1) / (grid.N + 1)
    if not math.isclose(grid.spacing, expected, rel_tol=1e-9):
        raise ValueError(
            f"grid spacing {grid.spacing:.6f} was built for a different taper count "
            f"(expected {expected:.6f} for K={ts.K})"
        )
    values = _values_of(x)
    for t in (grid.block_centers[0], grid.block_centers[-1]):
        _check_block(int(t), grid.N, len(values))
    est = multitaper_grid(values, grid.block_centers, ts.tapers, grid.freqs)
    return SpectralEstimate(grid=grid, values=est, K=ts.K)


def write_estimate_csv(est: SpectralEstimate, path) -> None:
    """CSV export: header row of frequencies, first column of block centers."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t_center," + ",".join(repr(float(w)) for w in est.grid.freqs) + "\n")
        for t, row in zip(est.grid.block_centers, est.values):
            fh.write(f"{int(t)}," + ",".join(repr(float(v)) for v in row) + "\n")


def read_estimate_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read back an estimate CSV as (block_centers, freqs, values)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        freqs = np.array(header[1:], dtype=float)
        centers, rows = [], []
        for line in fh:
            if not line.strip():
                continue
            cells = line.strip().split(",")
            centers.append(int(cells[0]))
            rows.append(np.array(cells[1:], dtype=float))
    return np.array(centers), freqs, np.vstack(rows)
