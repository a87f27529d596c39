"""Parametric bootstrap p-values and warp-speed size/power estimation.

Every replicate ``i`` draws from its own stream ``RngStream(seed, i)`` and
results are collected by index, so reports do not depend on the number of
worker processes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .alternatives import AlternativeSpec
from .circular import TWO_PI, RngStream, WCParams
from .errors import FitFailure
from .gof import DEFAULT_LAMBDAS, GofStatistics, compute_statistics, statistic_names
from .regression import REFIT_CONFIG, FitConfig, FitResult, ModelParams, PairedSample, fit_mle, simulate_model

log = logging.getLogger(__name__)

Innovation = Union[WCParams, AlternativeSpec]


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 1000
    seed: int = 0
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    threads: int = 1
    fit: FitConfig = field(default_factory=FitConfig)
    refit: FitConfig = REFIT_CONFIG

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("B must be at least 1")


@dataclass
class TestReport:
    observed: GofStatistics
    replicate_values: dict[str, np.ndarray]
    p_values: dict[str, float]
    fit: FitResult
    seed: int
    B: int
    redraws: int = 0

    __test__ = False  # not a pytest class

    def to_dict(self, include_replicates: bool = False) -> dict:
        p = self.fit.params
        out = {
            "seed": self.seed,
            "B": self.B,
            "redraws": self.redraws,
            "fit": {
                "theta0": p.theta0,
                "theta1": p.theta1,
                "r": p.r,
                "delta": p.delta,
                "loglik": self.fit.loglik,
                "converged": self.fit.converged,
            },
            "observed": self.observed.as_dict(),
            "p_values": dict(self.p_values),
        }
        if include_replicates:
            out["replicate_values"] = {k: v.tolist() for k, v in self.replicate_values.items()}
        return out


def bootstrap_p_value(observed: float, replicates: np.ndarray) -> float:
    replicates = np.asarray(replicates)
    return float((1 + np.count_nonzero(replicates >= observed)) / (replicates.size + 1))


def _statistics_vector(fit: FitResult, lambdas) -> np.ndarray:
    s = compute_statistics(fit.residuals, fit.params.delta, lambdas)
    return np.array(list(s.as_dict().values()))


def _null_replicate(x, params, lambdas, refit, stream):
    """Simulate under WC(delta_hat) around the fitted map, refit, compute statistics."""
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    y = simulate_model(params, x, WCParams(0.0, params.delta), gen)
    res = fit_mle(PairedSample(x, y), refit.with_warm_start(params))
    return res


def _classical_chunk(args):
    x, params, lambdas, refit, seed, indices = args
    out = []
    redraws = 0
    for i in indices:
        base = RngStream(seed, i)
        res = _null_replicate(x, params, lambdas, refit, base)
        if not res.converged:
            redraws += 1
            res = _null_replicate(x, params, lambdas, refit, base.substream(1))
            if not res.converged:
                raise FitFailure(f"bootstrap replicate {i} failed to converge twice (seed {seed})")
        out.append((i, _statistics_vector(res, lambdas)))
    return out, redraws


def _chunks(n: int, parts: int) -> list[list[int]]:
    size = max(1, math.ceil(n / max(parts * 4, 1)))
    return [list(range(s, min(n, s + size))) for s in range(0, n, size)]


def _run(fn: Callable, jobs: Sequence, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def classical_bootstrap(data: PairedSample, config: BootstrapConfig | None = None, fit: FitResult | None = None) -> TestReport:
    """Parametric bootstrap test of WC errors in the Mobius regression.

    Fits the data, computes the observed statistics, then for each replicate
    simulates responses from the fitted map with WC(delta_hat) errors,
    refits (warm start at the fitted parameters plus the coarse grid) and
    recomputes the statistics.  p-values are ``(1 + #{S* >= S}) / (B + 1)``.
    """
    config = config or BootstrapConfig()
    if fit is None:
        fit = fit_mle(data, config.fit)
    if not fit.converged:
        raise FitFailure("fit of the observed data did not converge")
    names = statistic_names(config.lambdas)
    observed = compute_statistics(fit.residuals, fit.params.delta, config.lambdas)
    jobs = [
        (data.x, fit.params, config.lambdas, config.refit, config.seed, idx)
        for idx in _chunks(config.B, config.threads)
    ]
    results = _run(_classical_chunk, jobs, config.threads)
    reps = np.empty((config.B, len(names)))
    redraws = 0
    for chunk, k in results:
        redraws += k
        for i, vec in chunk:
            reps[i] = vec
    obs = observed.as_dict()
    replicate_values = {name: reps[:, j] for j, name in enumerate(names)}
    p_values = {name: bootstrap_p_value(obs[name], replicate_values[name]) for name in names}
    return TestReport(observed, replicate_values, p_values, fit, config.seed, config.B, redraws)


@dataclass(frozen=True)
class ScenarioConfig:
    """One cell of the size/power study.

    ``beta0`` is the rotation angle theta0; ``beta1 = beta1_r * e^{i beta1_theta}``.
    Covariates are redrawn from U(0, 2 pi) in every Monte Carlo iteration.
    """

    beta0: float
    beta1_r: float
    beta1_theta: float
    n: int
    innovation: Innovation
    B: int = 1000
    alphas: tuple[float, ...] = (0.05,)
    seed: int = 0
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    threads: int = 1
    fit: FitConfig = REFIT_CONFIG

    def model(self) -> ModelParams:
        # delta is irrelevant here: the innovations come from ``innovation``
        return ModelParams(self.beta0, self.beta1_theta, self.beta1_r, 0.0)

    def label(self) -> str:
        return self.innovation.label()


@dataclass
class PowerResult:
    scenario: ScenarioConfig
    statistics: dict[str, np.ndarray]
    bootstrap: dict[str, np.ndarray]
    rates: dict[float, dict[str, float]]
    redraws: int = 0


def _warp_iteration(scenario: ScenarioConfig, model: ModelParams, refit: FitConfig, stream: RngStream):
    gen = stream.generator()
    x = gen.uniform(0.0, TWO_PI, size=scenario.n)
    y = simulate_model(model, x, scenario.innovation, gen)
    fit = fit_mle(PairedSample(x, y), scenario.fit)
    if not fit.converged:
        return None
    boot = _null_replicate(x, fit.params, scenario.lambdas, refit, gen)
    if not boot.converged:
        return None
    return _statistics_vector(fit, scenario.lambdas), _statistics_vector(boot, scenario.lambdas)


def _warp_chunk(args):
    scenario, indices = args
    model = scenario.model()
    refit = scenario.fit
    out = []
    redraws = 0
    for i in indices:
        base = RngStream(scenario.seed, i)
        res = _warp_iteration(scenario, model, refit, base)
        if res is None:
            redraws += 1
            res = _warp_iteration(scenario, model, refit, base.substream(1))
            if res is None:
                raise FitFailure(f"warp-speed iteration {i} failed to converge twice (seed {scenario.seed})")
        out.append((i, *res))
    return out, redraws


def critical_value(boot: np.ndarray, alpha: float) -> float:
    """The (1 - alpha) empirical quantile: smallest c with F_B(c) >= 1 - alpha."""
    return float(np.quantile(boot, 1.0 - alpha, method="inverted_cdf"))


def rejection_rates(stat: np.ndarray, boot: np.ndarray, alphas) -> dict[float, float]:
    return {float(a): float(np.mean(stat >= critical_value(boot, a))) for a in alphas}


def warp_speed_power(scenario: ScenarioConfig) -> PowerResult:
    """Warp-speed bootstrap: one bootstrap replicate per Monte Carlo sample.

    Rejection rate for each statistic is the fraction of Monte Carlo
    statistics at or above the (1 - alpha) quantile of the pooled bootstrap
    statistics.
    """
    names = statistic_names(scenario.lambdas)
    jobs = [(scenario, idx) for idx in _chunks(scenario.B, scenario.threads)]
    results = _run(_warp_chunk, jobs, scenario.threads)
    S = np.empty((scenario.B, len(names)))
    Sb = np.empty((scenario.B, len(names)))
    redraws = 0
    for chunk, k in results:
        redraws += k
        for i, s, sb in chunk:
            S[i] = s
            Sb[i] = sb
    stats_ = {name: S[:, j] for j, name in enumerate(names)}
    boots = {name: Sb[:, j] for j, name in enumerate(names)}
    rates = {float(a): {} for a in scenario.alphas}
    for name in names:
        for a, v in rejection_rates(stats_[name], boots[name], scenario.alphas).items():
            rates[a][name] = v
    return PowerResult(scenario, stats_, boots, rates, redraws)
