"""Angle arithmetic, the wrapped Cauchy law and circular correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DegenerateSample, InvalidShape

TWO_PI = 2.0 * math.pi


def wrap(theta):
    """Map angles to the canonical range ``[0, 2*pi)``.

    ``np.mod`` can return exactly ``2*pi`` for tiny negative inputs; those
    are folded back to 0.
    """
    out = np.mod(theta, TWO_PI)
    if np.ndim(out) == 0:
        out = float(out)
        return 0.0 if out >= TWO_PI else out
    out[out >= TWO_PI] = 0.0
    return out


def unit_complex(theta):
    return np.exp(1j * np.asarray(theta, dtype=float))


def angle(z):
    """Argument of a complex number, canonicalised to ``[0, 2*pi)``."""
    return wrap(np.angle(z))


def deg2rad(values):
    return wrap(np.deg2rad(np.asarray(values, dtype=float)))


def rad2deg(values):
    return np.rad2deg(np.asarray(values, dtype=float))


def circular_mean(theta) -> float:
    theta = np.asarray(theta, dtype=float)
    return wrap(math.atan2(np.sin(theta).sum(), np.cos(theta).sum()))


def resultant_length(theta) -> float:
    theta = np.asarray(theta, dtype=float)
    return float(np.hypot(np.cos(theta).mean(), np.sin(theta).mean()))


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id)``.

    Streams are values: ``generator()`` builds a fresh PCG64 generator from a
    ``SeedSequence`` whose spawn key is ``(stream_id, *path)``, so the same
    stream always yields the same draws regardless of scheduling.
    """

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = field(default=())

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
        return np.random.Generator(np.random.PCG64(seq))

    def substream(self, k: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, (*self.path, k))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class WCParams:
    """Wrapped Cauchy parameters: mean direction ``mu`` and concentration ``delta``."""

    mu: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.delta < 1.0):
            raise InvalidShape(f"wrapped Cauchy concentration must lie in [0, 1), got {self.delta}")
        object.__setattr__(self, "mu", wrap(float(self.mu)))

    def density(self, theta):
        return wc_density(theta, self)

    def sample(self, n: int, rng) -> np.ndarray:
        return wc_sample(self, n, rng)

    def label(self) -> str:
        return f"WC({self.delta:g})"


def wc_density(theta, params: WCParams):
    d = params.delta
    c = np.cos(np.asarray(theta, dtype=float) - params.mu)
    out = (1.0 - d * d) / (TWO_PI * (1.0 - 2.0 * d * c + d * d))
    return float(out) if np.ndim(out) == 0 else out


def wc_cdf(theta, delta: float):
    """CDF of WC(0, delta) on ``[0, 2*pi)``.

    Uses ``theta/(2 pi) + atan2(delta sin theta, 1 - delta cos theta)/pi``,
    equal to the usual ``arctan(c tan(theta/2))/pi`` form but continuous
    through ``theta = pi`` because ``1 - delta cos theta > 0``.
    """
    theta = np.asarray(theta, dtype=float)
    out = theta / TWO_PI + np.arctan2(delta * np.sin(theta), 1.0 - delta * np.cos(theta)) / math.pi
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def wc_sample(params: WCParams, n: int, rng) -> np.ndarray:
    """Draw ``n`` angles by wrapping Cauchy(mu, -log delta) onto the circle."""
    gen = _as_generator(rng)
    if params.delta == 0.0:
        return wrap(gen.uniform(0.0, TWO_PI, size=n))
    scale = -math.log(params.delta)
    return wrap(params.mu + scale * gen.standard_cauchy(size=n))


def wc_charfn(t: int, delta: float) -> float:
    if t < 0:
        raise ValueError("frequency must be nonnegative")
    return float(delta) ** int(t)


def circular_correlation(a, b) -> tuple[float, float]:
    """Jammalamadaka-Sarma circular correlation and its asymptotic p-value.

    The p-value is two-sided, from the normal approximation of
    ``sqrt(n * l20 * l02 / l22) * rho``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("inputs must be 1-d arrays of equal length")
    n = a.size
    if n < 3:
        raise ValueError("need at least 3 pairs")
    sa = np.sin(a - circular_mean(a))
    sb = np.sin(b - circular_mean(b))
    den = math.sqrt(float(np.sum(sa * sa) * np.sum(sb * sb)))
    # a constant series leaves only rounding noise of order 1e-16 per term
    if den <= n * 1e-20:
        raise DegenerateSample("circular correlation undefined for a constant series")
    rho = float(np.sum(sa * sb) / den)
    rho = min(1.0, max(-1.0, rho))
    l20 = np.mean(sa**2)
    l02 = np.mean(sb**2)
    l22 = np.mean(sa**2 * sb**2)
    if l22 <= 0.0:
        return rho, 0.0
    z = math.sqrt(n * l20 * l02 / l22) * rho
    return rho, float(2.0 * stats.norm.sf(abs(z)))
