"""Discrete prolate spheroidal (Slepian) tapers and their spectral window.

Tapers are the top-K eigenvectors of the index-limited sinc concentration
operator on [-W, W], computed through the commuting tridiagonal operator
(stable at large N), re-centered to lags u in [-(N-1)/2, (N-1)/2] and scaled
so that 2*pi*sum(g^2) = 1. Concentration eigenvalues are recovered as
quadratic forms against the sinc matrix; the matrix is Toeplitz, so the
matvec goes through an FFT.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal, matmul_toeplitz

__all__ = [
    "TaperSpec",
    "TaperSet",
    "compute_dpss",
    "spectral_window",
    "l1_concentration",
    "width_Bg",
    "sinc_matrix",
    "save_tapers",
    "load_tapers",
]


@dataclass(frozen=True)
class TaperSpec:
    """Taper family parameters: length N (odd), angular half-bandwidth W, count K."""

    N: int
    W: float
    K: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"taper length N must be an integer >= 3, got {self.N}")
        if self.N % 2 == 0:
            raise ValueError(f"taper length N must be odd, got {self.N}")
        # lower bound inclusive so the K = floor(NW/pi) boundary is representable
        if not (2.0 * np.pi / self.N * (1.0 - 1e-12) <= self.W < np.pi):
            raise ValueError(
                f"half-bandwidth W must satisfy 2*pi/N <= W < pi, got W={self.W} for N={self.N}"
            )
        # tolerance absorbs round-off when W was derived as K*pi/N
        kmax = int(np.floor(self.N * self.W / np.pi + 1e-9))
        if int(self.K) != self.K or not 1 <= self.K <= kmax:
            raise ValueError(
                f"taper count K must satisfy 1 <= K <= floor(N*W/pi) = {kmax}, got {self.K}"
            )

    @property
    def lags(self) -> np.ndarray:
        """Centered lag grid u = -(N-1)/2 .. (N-1)/2."""
        return np.arange(self.N) - (self.N - 1) // 2


class TaperSet:
    """K tapers with their concentration eigenvalues and time-domain widths.

    Immutable after construction; ``eigenvalues`` is computed on first access
    (the tradeoff sweeps never need it).
    """

    def __init__(self, spec: TaperSpec, tapers: np.ndarray, eigenvalues=None):
        tapers = np.asarray(tapers, dtype=float)
        if tapers.shape != (spec.K, spec.N):
            raise ValueError(f"expected tapers of shape {(spec.K, spec.N)}, got {tapers.shape}")
        self.spec = spec
        self.tapers = tapers
        self.tapers.setflags(write=False)
        self._eigenvalues = None if eigenvalues is None else np.asarray(eigenvalues, dtype=float)

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def K(self) -> int:
        return self.spec.K

    @property
    def W(self) -> float:
        return self.spec.W

    @property
    def lags(self) -> np.ndarray:
        return self.spec.lags

    @property
    def eigenvalues(self) -> np.ndarray:
        if self._eigenvalues is None:
            self._eigenvalues = _concentration_eigenvalues(self.tapers, self.spec.W)
        return self._eigenvalues

    @property
    def widths(self) -> np.ndarray:
        """Per-taper time-domain width sum(|u| * |g_k(u)|)."""
        return np.abs(self.tapers) @ np.abs(self.lags)


def sinc_matrix(N: int, W: float) -> np.ndarray:
    """Dense concentration operator S[u,u'] = sin(W(u-u'))/(pi(u-u')), S[u,u] = W/pi."""
    du = np.arange(N)[:, None] - np.arange(N)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.sin(W * du) / (np.pi * du)
    s[np.diag_indices(N)] = W / np.pi
    return s


def _sinc_column(N: int, W: float) -> np.ndarray:
    u = np.arange(N)
    col = np.empty(N)
    col[0] = W / np.pi
    col[1:] = np.sin(W * u[1:]) / (np.pi * u[1:])
    return col


def _concentration_eigenvalues(tapers: np.ndarray, W: float) -> np.ndarray:
    # quadratic form v^T S v on unit-norm vectors; Toeplitz S applied via FFT
    norms = np.sum(tapers**2, axis=1)
    col = _sinc_column(tapers.shape[1], W)
    sv = matmul_toeplitz((col, col), tapers.T)
    return np.einsum("kn,nk->k", tapers, sv) / norms


def compute_dpss(spec: TaperSpec) -> TaperSet:
    """Compute the top-K Slepian tapers for ``spec``.

    The tridiagonal commuting operator gives the eigenvectors; signs follow a
    fixed convention (positive sum for even k, positive first-half mass for
    odd k) so outputs are deterministic.
    """
    N, W, K = spec.N, spec.W, spec.K
    u = np.arange(N)
    diag = ((N - 1) / 2.0 - u) ** 2 * np.cos(W)
    off = u[1:] * (N - u[1:]) / 2.0
    # subset extraction beats the full decomposition only for small K/N
    if K > N // 8:
        _, vecs = eigh_tridiagonal(diag, off)
        vecs = vecs[:, -K:]
    else:
        _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(N - K, N - 1))
    vecs = vecs[:, ::-1].T  # K x N, most concentrated first

    half = (N - 1) // 2
    for k in range(K):
        mass = vecs[k].sum() if k % 2 == 0 else vecs[k, :half].sum()
        if mass < 0:
            vecs[k] = -vecs[k]

    # density-calibrated normalization: 2*pi*sum(g^2) = 1
    tapers = vecs / np.sqrt(2.0 * np.pi * np.sum(vecs**2, axis=1, keepdims=True))
    return TaperSet(spec, tapers)


def spectral_window(ts: TaperSet, lambdas) -> np.ndarray:
    """Averaged squared taper transforms rho_K at the given angular frequencies."""
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    phases = np.exp(-1j * np.outer(ts.lags, lam))
    g = ts.tapers @ phases
    return (g.real**2 + g.imag**2).mean(axis=0)


def l1_concentration(ts: TaperSet) -> float:
    """L1 distance between rho_K and the ideal band-pass (1/2W) on [-W, W].

    rho_K is even (tapers are symmetric or antisymmetric), so the integral is
    taken over [0, pi] and doubled, split at the band edge W.
    """
    W = ts.spec.W
    ideal = 1.0 / (2.0 * W)

    def inside(lam):
        return abs(spectral_window(ts, lam)[0] - ideal)

    def outside(lam):
        return spectral_window(ts, lam)[0]

    a, _ = quad(inside, 0.0, W, epsrel=1e-4, epsabs=1e-12, limit=200)
    b, _ = quad(outside, W, np.pi, epsrel=1e-4, epsabs=1e-12, limit=200)
    return 2.0 * (a + b)


def width_Bg(ts: TaperSet) -> float:
    """Worst-case taper width B_g = max_k sum(|u| * |g_k(u)|)."""
    return float(ts.widths.max())


def save_tapers(ts: TaperSet, path) -> None:
    """Write a taper cache: header line ``N,W,K`` then K rows of N floats."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{ts.N},{float(ts.W)!r},{ts.K}\n")
        for row in ts.tapers:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_tapers(path) -> TaperSet:
    """Read a taper cache written by :func:`save_tapers`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if len(header) != 3:
            raise ValueError(f"malformed taper cache header in {path}")
        N, W, K = int(header[0]), float(header[1]), int(header[2])
        rows = [np.array(line.strip().split(","), dtype=float) for line in fh if line.strip()]
    tapers = np.vstack(rows)
    if tapers.shape != (K, N):
        raise ValueError(f"taper cache body {tapers.shape} does not match header ({K}, {N})")
    return TaperSet(TaperSpec(N=N, W=W, K=K), tapers)
