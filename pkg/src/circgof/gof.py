"""Residual-based goodness-of-fit statistics for the WC error hypothesis.

``tn_statistic`` is the weighted characteristic-function distance with
Poisson weights; Kuiper and Watson act on the probability-integral
transform of the residuals under WC(delta_hat).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .circular import wc_cdf

DEFAULT_LAMBDAS = (0.3, 0.5, 1.0)
T_CAP = 500


@dataclass(frozen=True)
class WeightSpec:
    lam: float
    tail_mass_tol: float = 1e-12

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("Poisson mean must be positive")

    @property
    def t_max(self) -> int:
        return _t_max(self.lam, self.tail_mass_tol)

    def weights(self) -> np.ndarray:
        return _weights(self.lam, self.t_max)


@functools.lru_cache(maxsize=None)
def _t_max(lam: float, tol: float) -> int:
    if tol <= 0.0:
        return T_CAP
    t = 0
    while t < T_CAP and stats.poisson.sf(t, lam) >= tol:
        t += 1
    return t


@functools.lru_cache(maxsize=None)
def _weights(lam: float, t_max: int) -> np.ndarray:
    w = stats.poisson.pmf(np.arange(t_max + 1), lam)
    w.flags.writeable = False
    return w


def stat_name(lam: float) -> str:
    return f"Tn({lam:g})"


@dataclass(frozen=True)
class GofStatistics:
    tn: dict[float, float] = field(default_factory=dict)
    kn: float = float("nan")
    wn: float = float("nan")

    def as_dict(self) -> dict[str, float]:
        out = {stat_name(lam): v for lam, v in self.tn.items()}
        out["Kn"] = self.kn
        out["Wn"] = self.wn
        return out


def tn_statistic(residuals, delta_hat: float, weight: WeightSpec | float) -> float:
    """``n * sum_t |phi_n(t) - delta_hat**t|**2 * w(t)`` for ``t = 0..T_max``."""
    if not isinstance(weight, WeightSpec):
        weight = WeightSpec(float(weight))
    theta = np.asarray(residuals, dtype=float)
    n = theta.size
    w = weight.weights()
    t = np.arange(w.size)
    ecf = np.exp(1j * np.multiply.outer(t, theta)).mean(axis=1)
    dist = np.abs(ecf - float(delta_hat) ** t) ** 2
    return float(n * np.dot(dist, w))


def pit_transform(residuals, delta_hat: float) -> np.ndarray:
    return np.sort(np.atleast_1d(wc_cdf(np.asarray(residuals, dtype=float), delta_hat)))


def _kuiper(u: np.ndarray) -> float:
    n = u.size
    j = np.arange(1, n + 1)
    return float(np.max(u - (j - 1) / n) + np.max(j / n - u))


def _watson(u: np.ndarray) -> float:
    n = u.size
    j = np.arange(1, n + 1)
    dev = (u - (2 * j - 1) / (2 * n)) - (u.mean() - 0.5)
    return float(1.0 / (12 * n) + np.sum(dev * dev))


def kuiper_statistic(residuals, delta_hat: float) -> float:
    return _kuiper(pit_transform(residuals, delta_hat))


def watson_statistic(residuals, delta_hat: float) -> float:
    return _watson(pit_transform(residuals, delta_hat))


def kuiper_from_pit(u) -> float:
    return _kuiper(np.sort(np.asarray(u, dtype=float)))


def watson_from_pit(u) -> float:
    return _watson(np.sort(np.asarray(u, dtype=float)))


def compute_statistics(residuals, delta_hat: float, lambdas=DEFAULT_LAMBDAS) -> GofStatistics:
    u = pit_transform(residuals, delta_hat)
    return GofStatistics(
        tn={float(lam): tn_statistic(residuals, delta_hat, WeightSpec(float(lam))) for lam in lambdas},
        kn=_kuiper(u),
        wn=_watson(u),
    )


def statistic_names(lambdas=DEFAULT_LAMBDAS) -> list[str]:
    return [stat_name(lam) for lam in lambdas] + ["Kn", "Wn"]

