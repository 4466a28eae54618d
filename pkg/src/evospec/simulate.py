"""Sample-path generation: stationary ARMA models and uniformly modulated variants.

The recursion convention is X(t) = sum_i ar[i] X(t-i) + Z(t) + sum_j ma[j] Z(t-j)
with Gaussian innovations. An optional Gaussian-bump envelope c(t) multiplies the
base path; the printed form of the reference example uses a growing exponent
(sign +1), which is the default, and the sign is configurable.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "GaussianBump",
    "ModelSpec",
    "TimeSeries",
    "ar_root_margin",
    "simulate",
    "model_catalog",
    "MODEL_IDS",
]

MODEL_IDS = "abcdefgh"


@dataclass(frozen=True)
class GaussianBump:
    """Envelope c(t) = exp(sign * (t - T/2)^2 / (2 a^2))."""

    a: float
    sign: int = 1

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError(f"envelope scale a must be positive, got {self.a}")
        if self.sign not in (-1, 1):
            raise ValueError(f"envelope sign must be +1 or -1, got {self.sign}")

    def values(self, T: int) -> np.ndarray:
        t = np.arange(T, dtype=float)
        return np.exp(self.sign * (t - T / 2.0) ** 2 / (2.0 * self.a**2))


@dataclass(frozen=True)
class ModelSpec:
    """ARMA coefficients, innovation scale and optional modulation envelope."""

    ar: tuple = ()
    ma: tuple = ()
    noise_sd: float = 1.0
    envelope: Optional[GaussianBump] = None

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(c) for c in self.ar))
        object.__setattr__(self, "ma", tuple(float(c) for c in self.ma))
        if self.noise_sd <= 0:
            raise ValueError(f"noise_sd must be positive, got {self.noise_sd}")
        margin = ar_root_margin(self.ar)
        if margin <= 0:
            raise ValueError(
                f"AR polynomial is not stationary (root margin {margin:.4g}); "
                f"all roots of 1 - sum(ar[i] z^i) must lie outside the unit circle"
            )


@dataclass
class TimeSeries:
    """Real-valued samples at unit spacing, with provenance metadata."""

    values: np.ndarray
    origin: int = 0
    meta: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("time series values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("time series contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)


def ar_root_margin(ar) -> float:
    """min |root| - 1 for the AR characteristic polynomial 1 - sum ar[i] z^i.

    Positive means stationary; returns +inf for an empty AR part.
    """
    ar = tuple(float(c) for c in ar)
    if not ar:
        return math.inf
    # 1 - ar1 z - ... - arp z^p with np.roots' descending-power convention
    coeffs = np.r_[-np.asarray(ar)[::-1], 1.0]
    roots = np.roots(coeffs)
    if len(roots) == 0:
        return math.inf
    return float(np.min(np.abs(roots))) - 1.0


def simulate(model: ModelSpec, T: int, seed) -> TimeSeries:
    """Generate T samples of X(t) = c(t) Y(t) with Y the ARMA path for ``model``.

    A burn-in of max(1000, 50 (p+q)) samples from zero initial state is
    discarded. Identical (model, T, seed) gives identical output.
    """
    if T < 1:
        raise ValueError(f"series length T must be >= 1, got {T}")
    p, q = len(model.ar), len(model.ma)
    burn = max(1000, 50 * (p + q))
    rng = np.random.default_rng(seed)
    z = rng.normal(0.0, model.noise_sd, size=burn + T)
    a_poly = np.r_[1.0, -np.asarray(model.ar)] if p else np.array([1.0])
    b_poly = np.r_[1.0, np.asarray(model.ma)] if q else np.array([1.0])
    y = lfilter(b_poly, a_poly, z)[burn:]
    if model.envelope is not None:
        y = y * model.envelope.values(T)
    return TimeSeries(y, origin=0, meta=f"simulated ar={model.ar} ma={model.ma} T={T}")


def model_catalog(model_id: str, modulated: bool = False, a: float = 200.0,
                  sign: int = 1) -> ModelSpec:
    """The benchmark models (a)-(h).

    (a)-(g) are the stationary ARMA family; ``modulated=True`` wraps them in
    the Gaussian-bump envelope for power studies. (h) is the modulated AR(2)
    with sd-100 innovations and always carries the envelope.
    """
    base = {
        "a": ((), ()),
        "b": ((0.9,), ()),
        "c": ((-0.9,), ()),
        "d": ((), (0.8,)),
        "e": ((), (-0.8,)),
        "f": ((-0.4,), (-0.8,)),
        "g": ((1.385929, -0.9604), ()),
        "h": ((0.8, -0.4), ()),
    }
    if model_id not in base:
        raise ValueError(f"unknown model id {model_id!r}; expected one of {', '.join(MODEL_IDS)}")
    ar, ma = base[model_id]
    if model_id == "h":
        return ModelSpec(ar=ar, ma=ma, noise_sd=100.0, envelope=GaussianBump(a, sign))
    env = GaussianBump(a, sign) if modulated else None
    return ModelSpec(ar=ar, ma=ma, noise_sd=1.0, envelope=env)
