"""Monetary value distributions: fitting, moments, quantiles and sampling.

Five families are supported.  ``Point`` is a fixed amount; ``Gamma`` and
``Normal`` are usually authored from an expert's minimum/maximum guess through
:func:`fit_from_range`; ``Uniform`` and ``Triangular`` are convenience forms.

Sampling never returns a negative amount.  A candidate below zero is rejected
and redrawn from the next block of the same stream, so the sampled law of a
``Normal`` is the normal truncated at zero.  For the moment ratios used in
practice (mean several sd above zero) the difference is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import stats

from .rng import RngStream

__all__ = [
    "DistributionError",
    "RangeError",
    "DomainError",
    "Point",
    "Gamma",
    "Normal",
    "Uniform",
    "Triangular",
    "DistributionSpec",
    "FAMILIES",
    "fit_from_range",
    "analytic_moments",
    "quantile",
    "sample",
    "sample_many",
]

# Range rule: an expert min/max range is read as mean +/- 3 sd.
RANGE_SDS = 6.0


class DistributionError(ValueError):
    """Invalid distribution parameters."""


class RangeError(DistributionError):
    """A fitting range with min >= max."""


class DomainError(DistributionError):
    """Parameters outside a family's support (e.g. negative min for Gamma)."""


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class Point:
    value: float

    def __post_init__(self) -> None:
        if not _finite(self.value):
            raise DistributionError(f"point value must be finite, got {self.value}")

    @property
    def mean(self) -> float:
        return float(self.value)

    @property
    def variance(self) -> float:
        return 0.0

    def ppf(self, p: float) -> float:
        return float(self.value)


@dataclass(frozen=True)
class Gamma:
    """Gamma in shape/scale form.

    ``bounds`` remembers the (min, max) range the distribution was fitted
    from, if any, so it can be written back the way it was authored.
    """

    shape: float
    scale: float
    bounds: Optional[tuple[float, float]] = field(default=None)

    def __post_init__(self) -> None:
        if not _finite(self.shape, self.scale) or self.shape <= 0 or self.scale <= 0:
            raise DistributionError(f"gamma needs shape > 0 and scale > 0, got ({self.shape}, {self.scale})")

    @property
    def mean(self) -> float:
        if self.bounds is not None:
            return (self.bounds[0] + self.bounds[1]) / 2.0
        return self.shape * self.scale

    @property
    def variance(self) -> float:
        # A fitted gamma reports its target moments, which shape * scale only
        # reproduces up to rounding.
        if self.bounds is not None:
            return ((self.bounds[1] - self.bounds[0]) / RANGE_SDS) ** 2
        return self.shape * self.scale**2

    def ppf(self, p: float) -> float:
        return float(stats.gamma.ppf(p, self.shape, scale=self.scale))

    def _candidates(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # Marsaglia & Tsang (2000).  One block per attempt: words 0-1 feed a
        # Box-Muller normal, word 2 the acceptance test, word 3 the
        # u**(1/shape) boost used when shape < 1.
        a = self.shape if self.shape >= 1.0 else self.shape + 1.0
        d = a - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        x = _box_muller(u[:, 0], u[:, 1])
        v = 1.0 + c * x
        ok = v > 0.0
        v3 = np.where(ok, v, 1.0) ** 3
        with np.errstate(divide="ignore"):
            accept = ok & (np.log1p(-u[:, 2]) < 0.5 * x * x + d - d * v3 + d * np.log(v3))
        draws = d * v3
        if self.shape < 1.0:
            draws = draws * (1.0 - u[:, 3]) ** (1.0 / self.shape)
        return draws * self.scale, accept


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float
    bounds: Optional[tuple[float, float]] = field(default=None)

    def __post_init__(self) -> None:
        if not _finite(self.mu, self.sigma) or self.sigma <= 0:
            raise DistributionError(f"normal needs a finite mean and sd > 0, got ({self.mu}, {self.sigma})")

    @property
    def mean(self) -> float:
        return float(self.mu)

    @property
    def variance(self) -> float:
        return float(self.sigma) ** 2

    def ppf(self, p: float) -> float:
        # Quantile of the law actually sampled (normal truncated at zero).
        below = stats.norm.cdf(0.0, self.mu, self.sigma)
        return float(stats.norm.ppf(below + p * (1.0 - below), self.mu, self.sigma))

    def _candidates(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        draws = self.mu + self.sigma * _box_muller(u[:, 0], u[:, 1])
        return draws, np.ones(draws.shape, dtype=bool)


@dataclass(frozen=True)
class Uniform:
    low: float
    high: float

    def __post_init__(self) -> None:
        if not _finite(self.low, self.high) or not self.low < self.high:
            raise DistributionError(f"uniform needs low < high, got ({self.low}, {self.high})")

    @property
    def mean(self) -> float:
        return (self.low + self.high) / 2.0

    @property
    def variance(self) -> float:
        return (self.high - self.low) ** 2 / 12.0

    def ppf(self, p: float) -> float:
        return self.low + p * (self.high - self.low)

    def _candidates(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        draws = self.low + (self.high - self.low) * u[:, 0]
        return draws, np.ones(draws.shape, dtype=bool)


@dataclass(frozen=True)
class Triangular:
    low: float
    mode: float
    high: float

    def __post_init__(self) -> None:
        if not _finite(self.low, self.mode, self.high) or not (
            self.low <= self.mode <= self.high and self.low < self.high
        ):
            raise DistributionError(
                f"triangular needs low <= mode <= high and low < high, got ({self.low}, {self.mode}, {self.high})"
            )

    @property
    def mean(self) -> float:
        return (self.low + self.mode + self.high) / 3.0

    @property
    def variance(self) -> float:
        a, m, b = self.low, self.mode, self.high
        return (a * a + m * m + b * b - a * m - a * b - m * b) / 18.0

    def ppf(self, p):
        a, m, b = self.low, self.mode, self.high
        split = (m - a) / (b - a)
        p = np.asarray(p, dtype=float)
        left = a + np.sqrt(p * (b - a) * (m - a))
        right = b - np.sqrt((1.0 - p) * (b - a) * (b - m))
        out = np.where(p < split, left, right)
        return float(out) if out.ndim == 0 else out

    def _candidates(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        draws = self.ppf(u[:, 0])
        return draws, np.ones(draws.shape, dtype=bool)


DistributionSpec = Union[Point, Gamma, Normal, Uniform, Triangular]

FAMILIES = ("gamma", "normal", "uniform", "triangular")


def _box_muller(u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
    return np.sqrt(-2.0 * np.log1p(-u0)) * np.cos(2.0 * np.pi * u1)


def fit_from_range(kind: str, min: float, max: float) -> DistributionSpec:
    """Fit a distribution to an expert's minimum/maximum range.

    Gamma and Normal are moment-matched to mean ``(min+max)/2`` and sd
    ``(max-min)/6``.  Uniform spans the range exactly; Triangular peaks at
    the midpoint.

    >>> g = fit_from_range("gamma", 10_000, 100_000)
    >>> round(g.shape, 3), round(g.scale, 3)
    (13.444, 4090.909)
    """
    kind = kind.lower()
    if kind not in FAMILIES:
        raise DistributionError(f"cannot fit {kind!r} from a range; expected one of {', '.join(FAMILIES)}")
    lo, hi = float(min), float(max)
    if not _finite(lo, hi):
        raise DistributionError(f"range bounds must be finite, got ({lo}, {hi})")
    if lo >= hi:
        raise RangeError(f"range needs min < max, got min={lo:g}, max={hi:g}")
    mean = (lo + hi) / 2.0
    sd = (hi - lo) / RANGE_SDS
    if kind == "gamma":
        if lo < 0:
            raise DomainError(f"gamma range needs min >= 0, got min={lo:g}")
        return Gamma(shape=mean**2 / sd**2, scale=sd**2 / mean, bounds=(lo, hi))
    if kind == "normal":
        return Normal(mean, sd, bounds=(lo, hi))
    if kind == "uniform":
        return Uniform(lo, hi)
    return Triangular(lo, mean, hi)


def analytic_moments(spec: DistributionSpec) -> tuple[float, float]:
    """Closed-form ``(mean, variance)`` of the (untruncated) distribution."""
    return spec.mean, spec.variance


def quantile(spec: DistributionSpec, p: float) -> float:
    """The ``p``-quantile of the law that :func:`sample` draws from."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"quantile level must be in [0, 1], got {p}")
    return float(spec.ppf(p))


# Normal means further below zero than this reject nearly every candidate.
_MAX_NEGATIVE_Z = 5.0


def sample_many(spec: DistributionSpec, streams: RngStream) -> np.ndarray:
    """One draw from each stream of the batch, advancing each stream.

    Each attempt consumes exactly one block of the stream it belongs to;
    rejected or negative candidates are retried on the next block.  Point
    values consume nothing.
    """
    n = len(streams)
    if isinstance(spec, Point):
        return np.full(n, spec.mean)
    if isinstance(spec, Normal) and spec.mu < -_MAX_NEGATIVE_Z * spec.sigma:
        raise DomainError("normal has essentially no mass above zero; monetary draws must be non-negative")
    out = np.empty(n)
    pending = np.arange(n)
    while pending.size:
        draws, accept = spec._candidates(streams.uniforms(pending))
        accept &= draws >= 0.0
        out[pending[accept]] = draws[accept]
        pending = pending[~accept]
    return out


def sample(spec: DistributionSpec, stream: RngStream) -> float:
    """A single draw from a single stream."""
    if len(stream) != 1:
        raise ValueError(f"sample() takes a single stream, got a batch of {len(stream)}; use sample_many")
    return float(sample_many(spec, stream)[0])
