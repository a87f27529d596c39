"""Alternative innovation laws for the power study.

Families: wrapped normal (WN), von Mises (VM), cardioid, Cartwright's
power-of-cosine, Jones-Pewsey (JP) and Batschelet.  WN and VM have exact
samplers; the remaining four are drawn by inverting a tabulated CDF.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PchipInterpolator

from .circular import TWO_PI, _as_generator, wrap
from .errors import InvalidShape

FAMILIES = ("WN", "VM", "Cardioid", "Cartwright", "JonesPewsey", "Batschelet")

_ALIASES = {
    "WN": "WN",
    "VM": "VM",
    "CA": "Cardioid",
    "C": "Cardioid",
    "CARDIOID": "Cardioid",
    "CW": "Cartwright",
    "CARTWRIGHT": "Cartwright",
    "JP": "JonesPewsey",
    "JONESPEWSEY": "JonesPewsey",
    "BA": "Batschelet",
    "BATSCHELET": "Batschelet",
}

_SHORT = {
    "WN": "WN",
    "VM": "VM",
    "Cardioid": "Ca",
    "Cartwright": "CW",
    "JonesPewsey": "JP",
    "Batschelet": "Ba",
}

# WN series is cut once rho**(k*k) falls below this
WN_TERM_TOL = 1e-16
# JP with |psi| below this is treated as its von Mises limit
JP_PSI_EPS = 1e-6

TABLE_CELLS = 2048
BISECT_TOL = 1e-9
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class AlternativeSpec:
    """An alternative error law.

    ``shape1``/``shape2`` hold the family parameters: WN ``rho``; VM
    ``kappa``; Cardioid ``rho``; Cartwright ``zeta``; JonesPewsey
    ``(kappa, psi)``; Batschelet ``(kappa, nu)``.
    """

    family: str
    mu: float = 0.0
    shape1: float = 0.0
    shape2: float = 0.0

    def __post_init__(self):
        fam = _ALIASES.get(self.family.upper().replace("-", "").replace("_", ""))
        if fam is None:
            raise InvalidShape(f"unknown family {self.family!r}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "mu", wrap(float(self.mu)))
        object.__setattr__(self, "shape1", float(self.shape1))
        object.__setattr__(self, "shape2", float(self.shape2))
        _validate(self)

    def density(self, theta):
        return alt_density(self, theta)

    def sample(self, n: int, rng) -> np.ndarray:
        return alt_sample(self, n, rng)

    def cdf(self, theta):
        """CDF over ``[0, 2*pi)`` by quadrature of the density."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.array(
            [integrate.quad(lambda t: alt_density(self, t), 0.0, th, epsabs=1e-13, limit=200)[0] for th in theta]
        )
        return out

    def label(self) -> str:
        short = _SHORT[self.family]
        if self.family in ("JonesPewsey", "Batschelet"):
            return f"{short}({self.shape1:g},{self.shape2:g})"
        return f"{short}({self.shape1:g})"


def parse_alternative(text: str):
    """Parse labels like ``WN(0.7)``, ``JP(2,1.5)`` or ``WC(0.5)``.

    Returns a :class:`WCParams` for ``WC`` and an :class:`AlternativeSpec`
    otherwise.
    """
    from .circular import WCParams

    m = re.fullmatch(r"\s*([A-Za-z_-]+)\s*\(\s*([^)]*)\)\s*", text)
    if not m:
        raise InvalidShape(f"cannot parse innovation law {text!r}")
    name = m.group(1)
    try:
        args = [float(a) for a in m.group(2).split(",") if a.strip()]
    except ValueError:
        raise InvalidShape(f"cannot parse parameters in {text!r}") from None
    if name.upper() == "WC":
        if len(args) != 1:
            raise InvalidShape("WC takes one parameter")
        return WCParams(0.0, args[0])
    if not args:
        raise InvalidShape(f"{text!r}: missing parameters")
    return AlternativeSpec(name, 0.0, *args)


def _validate(spec: AlternativeSpec):
    f, a, b = spec.family, spec.shape1, spec.shape2
    ok = {
        "WN": 0.0 < a < 1.0,
        "VM": a > 0.0,
        # rho = 1/2 is kept: it is a proper density and is used in the power tables
        "Cardioid": abs(a) <= 0.5,
        "Cartwright": a > 0.0,
        "JonesPewsey": a >= 0.0 and math.isfinite(b),
        "Batschelet": a >= 0.0 and -1.0 <= b <= 1.0,
    }[f]
    if not ok:
        raise InvalidShape(f"invalid parameters for {f}: ({a}, {b})")


def _jp_base(x, kappa, psi):
    return np.cosh(kappa * psi) + np.sinh(kappa * psi) * np.cos(x)


@functools.lru_cache(maxsize=None)
def _normaliser(family: str, a: float, b: float) -> float:
    """Normalising constant for the families that need quadrature."""
    if family == "JonesPewsey":
        # 2*pi * P_{1/psi}(cosh(kappa psi)) via the Laplace integral
        f = lambda x: _jp_base(x, a, b) ** (1.0 / b)  # noqa: E731
    elif family == "Batschelet":
        f = lambda x: math.exp(a * math.cos(x + b * math.sin(x)))  # noqa: E731
    else:
        raise KeyError(family)
    val, _ = integrate.quad(f, 0.0, TWO_PI, epsabs=1e-14, epsrel=1e-13, limit=400)
    return val


def _centred_density(spec: AlternativeSpec, x):
    f, a, b = spec.family, spec.shape1, spec.shape2
    if f == "WN":
        kmax = int(math.floor(math.sqrt(math.log(WN_TERM_TOL) / math.log(a)))) + 1
        k = np.arange(1, kmax + 1)
        terms = a ** (k * k)
        s = np.cos(np.multiply.outer(x, k)) @ terms
        return (1.0 + 2.0 * s) / TWO_PI
    if f == "VM" or (f == "JonesPewsey" and abs(b) < JP_PSI_EPS):
        return np.exp(a * (np.cos(x) - 1.0)) / (TWO_PI * special.i0e(a))
    if f == "Cardioid":
        return (1.0 + 2.0 * a * np.cos(x)) / TWO_PI
    if f == "Cartwright":
        logc = (1.0 / a - 1.0) * math.log(2.0) + 2.0 * special.gammaln(1.0 / a + 1.0)
        logc -= math.log(math.pi) + special.gammaln(2.0 / a + 1.0)
        return np.exp(logc) * np.power(np.maximum(1.0 + np.cos(x), 0.0), 1.0 / a)
    if f == "JonesPewsey":
        return _jp_base(x, a, b) ** (1.0 / b) / _normaliser(f, a, b)
    if f == "Batschelet":
        return np.exp(a * np.cos(x + b * np.sin(x))) / _normaliser(f, a, b)
    raise KeyError(f)


def alt_density(spec: AlternativeSpec, theta):
    x = np.asarray(theta, dtype=float) - spec.mu
    out = _centred_density(spec, x)
    return float(out) if np.ndim(out) == 0 else out


class _InverseCdfTable:
    """Inverse CDF of a centred density on ``[0, 2*pi)``.

    Cell masses come from 16-point Gauss-Legendre on a uniform grid.  A
    monotone (PCHIP) interpolant of the cumulative table gives a first guess
    which is then refined by bisection inside its cell.
    """

    def __init__(self, spec: AlternativeSpec, cells: int = TABLE_CELLS):
        self.spec = spec
        self.edges = np.linspace(0.0, TWO_PI, cells + 1)
        h = self.edges[1] - self.edges[0]
        nodes = self.edges[:-1, None] + 0.5 * h * (_GL_NODES[None, :] + 1.0)
        mass = 0.5 * h * (_centred_density(spec, nodes) @ _GL_WEIGHTS)
        cum = np.concatenate([[0.0], np.cumsum(mass)])
        self.total = cum[-1]
        self.cum = cum / self.total
        self.cum[-1] = 1.0
        keep = np.concatenate([[True], np.diff(self.cum) > 0])
        self._guess = PchipInterpolator(self.cum[keep], self.edges[keep])

    def _partial(self, lo, x):
        """Normalised mass on ``[lo, x]`` (elementwise)."""
        half = 0.5 * (x - lo)
        pts = (lo + half)[:, None] + half[:, None] * _GL_NODES[None, :]
        return half * (_centred_density(self.spec, pts) @ _GL_WEIGHTS) / self.total

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        k = np.clip(np.searchsorted(self.cum, u, side="right") - 1, 0, len(self.edges) - 2)
        lo = self.edges[k].copy()
        hi = self.edges[k + 1].copy()
        target = u - self.cum[k]
        mid = np.clip(self._guess(u), lo, hi)
        while True:
            below = self._partial(self.edges[k], mid) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo) < BISECT_TOL:
                break
            mid = 0.5 * (lo + hi)
        return 0.5 * (lo + hi)


@functools.lru_cache(maxsize=64)
def _table(spec: AlternativeSpec) -> _InverseCdfTable:
    return _InverseCdfTable(spec)


def alt_sample(spec: AlternativeSpec, n: int, rng) -> np.ndarray:
    gen = _as_generator(rng)
    f, a, b = spec.family, spec.shape1, spec.shape2
    if f == "WN":
        sigma = math.sqrt(-2.0 * math.log(a))
        return wrap(spec.mu + sigma * gen.standard_normal(n))
    if f == "VM" or (f == "JonesPewsey" and abs(b) < JP_PSI_EPS):
        # numpy implements the Best-Fisher rejection sampler
        return wrap(gen.vonmises(spec.mu, a, size=n))
    centred = spec if spec.mu == 0.0 else AlternativeSpec(f, 0.0, a, b)
    return wrap(spec.mu + _table(centred)(gen.uniform(size=n)))
