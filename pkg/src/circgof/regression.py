"""Circular-circular Mobius regression with wrapped Cauchy errors.

The model is ``Y = beta0 * (x + beta1) / (1 + conj(beta1) x) * eps`` with
``beta0 = e^{i theta0}``, ``beta1 = r e^{i theta1}`` and ``eps ~ WC(0, delta)``,
all quantities living on the unit circle.  Angles are handled in radians.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .circular import TWO_PI, WCParams, wrap
from .errors import DegenerateData, SingularMap

SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class ModelParams:
    theta0: float
    theta1: float
    r: float
    delta: float

    def __post_init__(self):
        if not self.r >= 0.0:
            raise ValueError(f"r must be nonnegative, got {self.r}")
        if not (0.0 <= self.delta < 1.0):
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")
        object.__setattr__(self, "theta0", wrap(float(self.theta0)))
        object.__setattr__(self, "theta1", wrap(float(self.theta1)))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def beta0(self) -> complex:
        return complex(math.cos(self.theta0), math.sin(self.theta0))

    @property
    def beta1(self) -> complex:
        return self.r * complex(math.cos(self.theta1), math.sin(self.theta1))

    @classmethod
    def from_betas(cls, beta0: complex, beta1: complex, delta: float) -> "ModelParams":
        return cls(math.atan2(beta0.imag, beta0.real), math.atan2(beta1.imag, beta1.real), abs(beta1), delta)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta0, self.theta1, self.r, self.delta)


@dataclass(frozen=True)
class PairedSample:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = wrap(np.asarray(self.x, dtype=float).ravel().copy())
        y = wrap(np.asarray(self.y, dtype=float).ravel().copy())
        if x.shape != y.shape:
            raise ValueError(f"x and y differ in length ({x.size} vs {y.size})")
        if x.size < 1:
            raise DegenerateData("empty sample")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.x.size


def _default_grid() -> tuple[tuple[float, float, float, float], ...]:
    angles = (0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0)
    return tuple(itertools.product(angles, angles, (0.1, 0.5, 2.0), (0.2, 0.5, 0.8)))


@dataclass(frozen=True)
class FitConfig:
    """Multistart Nelder-Mead settings.

    Every start (``warm_starts`` first, then ``grid``) is run to ``xtol``.
    With ``coarse_xtol`` set, all starts are first run only to that looser
    tolerance and the best ``refine_keep`` of them are then refined to
    ``xtol``; this is the cheap mode used for bootstrap refits.
    """

    grid: tuple[tuple[float, float, float, float], ...] = field(default_factory=_default_grid)
    warm_starts: tuple[ModelParams, ...] = ()
    coarse_xtol: float | None = None
    refine_keep: int = 3
    xtol: float = 1e-8
    maxiter: int = 2000
    step: float = 0.5
    tie_tol: float = 1e-9
    polish: int = 2
    polish_xtol: float = 1e-12

    def with_warm_start(self, params: ModelParams) -> "FitConfig":
        return replace(self, warm_starts=(*self.warm_starts, params))


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    loglik: float
    converged: bool
    n_restarts_used: int
    fitted: np.ndarray
    residuals: np.ndarray


def _to_internal(theta0, theta1, r, delta) -> list[float]:
    r = min(max(r, _kernels.R_MIN), _kernels.R_MAX)
    delta = min(max(delta, _kernels.DELTA_MIN), _kernels.DELTA_MAX)
    return [theta0, theta1, math.log(r), math.log(delta / (1.0 - delta))]


def _data_arrays(data: PairedSample):
    x, y = data.x, data.y
    return np.cos(x), np.sin(x), np.cos(y - x), np.sin(y - x)


def mobius_apply(params: ModelParams, x):
    """Angle of ``beta0 (x + beta1) / (1 + conj(beta1) x)`` for covariate angles ``x``."""
    x = np.asarray(x, dtype=float)
    z = np.exp(1j * x)
    den = 1.0 + np.conj(params.beta1) * z
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise SingularMap("Mobius map is singular at a covariate value")
    out = wrap(np.angle(params.beta0 * (z + params.beta1) / den))
    return float(out) if np.ndim(out) == 0 else out


# the conditional mean direction of Y given x is the Mobius image of x
conditional_mean = mobius_apply


def inverse_mobius(params: ModelParams, y):
    """Inverse map: the covariate angle whose image is ``y`` (requires ``r != 1``)."""
    w = np.exp(1j * np.asarray(y, dtype=float)) / params.beta0
    b = params.beta1
    out = wrap(np.angle((w - b) / (1.0 - np.conj(b) * w)))
    return float(out) if np.ndim(out) == 0 else out


def residual_angles(data: PairedSample, params: ModelParams) -> np.ndarray:
    return wrap(data.y - mobius_apply(params, data.x))


def log_likelihood(params: ModelParams, data: PairedSample) -> float:
    """Wrapped Cauchy log-likelihood, including the ``-n log(2 pi)`` term."""
    if params.delta == 0.0:
        return -len(data) * math.log(TWO_PI)
    cx, sx, cd, sd = _data_arrays(data)
    return float(_kernels.loglik_natural(params.theta0, params.theta1, params.r, params.delta, cx, sx, cd, sd))


REFIT_CONFIG = FitConfig(coarse_xtol=1e-2, polish=0)


def fit_mle(data: PairedSample, config: FitConfig | None = None) -> FitResult:
    """Maximum-likelihood fit by multistart Nelder-Mead.

    The best restart wins; near-ties (within ``config.tie_tol``) go to the
    smaller ``r`` and then to the earlier start.
    """
    config = config or FitConfig()
    n = len(data)
    if n < 4:
        raise DegenerateData(f"need at least 4 observations to fit 4 parameters, got {n}")
    cx, sx, cd, sd = _data_arrays(data)

    grid = np.array([_to_internal(*g) for g in config.grid], dtype=float).reshape(-1, 4)
    warm = np.array([_to_internal(*p.as_tuple()) for p in config.warm_starts], dtype=float).reshape(-1, 4)
    starts = np.vstack([warm, grid])
    step = np.full(4, config.step)
    if config.coarse_xtol is None:
        xs, fs, _, conv = _kernels.multistart(starts, step, cx, sx, cd, sd, config.xtol, config.maxiter)
    else:
        xs, fs, _, _ = _kernels.multistart(starts, step, cx, sx, cd, sd, config.coarse_xtol, config.maxiter)
        keep = np.sort(np.argsort(fs, kind="stable")[: config.refine_keep])
        xs, fs, _, conv = _kernels.multistart(xs[keep], 0.1 * step, cx, sx, cd, sd, config.xtol, config.maxiter)

    lls = -fs
    best_ll = np.max(lls)
    best = None
    for i in range(len(lls)):
        if lls[i] < best_ll - config.tie_tol:
            continue
        r_i = _kernels.unpack(xs[i])[2]
        if best is None or r_i < best[0]:
            best = (r_i, i)
    x_best = xs[best[1]]
    best_ll = lls[best[1]]
    for _ in range(config.polish):
        # restarting from the optimum with a small simplex tightens sharp optima
        xp, fp, _, _ = _kernels.nelder_mead(x_best, step * 0.02, cx, sx, cd, sd, config.polish_xtol, config.maxiter)
        if not fp <= -best_ll:
            break
        x_best = xp
        best_ll = -fp
    th0, th1, r, d = _kernels.unpack(x_best)
    params = ModelParams(th0, th1, r, d)
    fitted = mobius_apply(params, data.x)
    return FitResult(
        params=params,
        loglik=log_likelihood(params, data),
        converged=bool(np.any(conv)),
        n_restarts_used=len(starts),
        fitted=np.atleast_1d(fitted),
        residuals=wrap(data.y - fitted),
    )


ErrorSampler = Callable[[int, np.random.Generator], np.ndarray]


def error_sampler(law) -> ErrorSampler:
    """Adapt a WCParams / AlternativeSpec (anything with ``sample``) to a sampler."""
    return lambda n, gen: law.sample(n, gen)


def simulate_model(params: ModelParams, x, errors, rng) -> np.ndarray:
    """Responses ``mobius(x) + eps (mod 2 pi)`` with ``eps`` from ``errors``.

    ``errors`` is either a callable ``(n, generator) -> angles`` or a law
    object with a ``sample`` method; ``None`` means WC(params.delta).
    """
    from .circular import _as_generator

    x = np.atleast_1d(np.asarray(x, dtype=float))
    gen = _as_generator(rng)
    if errors is None:
        errors = WCParams(0.0, params.delta)
    draw = errors if callable(errors) else error_sampler(errors)
    eps = np.asarray(draw(x.size, gen), dtype=float)
    return wrap(mobius_apply(params, x) + eps)


def finite_difference_gradient(params: ModelParams, data: PairedSample, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of the log-likelihood in ``(theta0, theta1, r, delta)``."""
    cx, sx, cd, sd = _data_arrays(data)
    p = np.array(params.as_tuple())
    grad = np.empty(4)
    for k in range(4):
        up = p.copy()
        dn = p.copy()
        up[k] += h
        dn[k] -= h
        fu = _kernels.loglik_natural(*up, cx, sx, cd, sd)
        fd = _kernels.loglik_natural(*dn, cx, sx, cd, sd)
        grad[k] = (fu - fd) / (2.0 * h)
    return grad


def paired(x: Sequence[float], y: Sequence[float]) -> PairedSample:
    return PairedSample(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
