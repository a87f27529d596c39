"""Compiled likelihood and simplex kernels for the Mobius regression fit.

The optimizer works in an unconstrained space ``p = (theta0, theta1, log r,
logit delta)``.  Data enter as the unit vectors ``e^{i theta_x}`` and
``e^{i (theta_y - theta_x)}`` so that each likelihood term costs one log.
"""

import math

import numpy as np
from numba import njit

LOG_2PI = math.log(2.0 * math.pi)

R_MIN = 1e-12
R_MAX = 1e12
DELTA_MIN = 1e-12
DELTA_MAX = 1.0 - 1e-12


@njit(cache=True)
def unpack(p):
    r = math.exp(p[2])
    if r < R_MIN:
        r = R_MIN
    elif r > R_MAX:
        r = R_MAX
    if p[3] >= 0.0:
        d = 1.0 / (1.0 + math.exp(-p[3]))
    else:
        e = math.exp(p[3])
        d = e / (1.0 + e)
    if d < DELTA_MIN:
        d = DELTA_MIN
    elif d > DELTA_MAX:
        d = DELTA_MAX
    return p[0], p[1], r, d


@njit(cache=True)
def loglik_natural(theta0, theta1, r, delta, cx, sx, cd, sd):
    """Log-likelihood including the ``-n log 2 pi`` constant."""
    n = cx.shape[0]
    c0 = math.cos(theta0)
    s0 = math.sin(theta0)
    c1 = math.cos(theta1)
    s1 = math.sin(theta1)
    d2 = delta * delta
    twod = 2.0 * delta
    acc = 0.0
    for j in range(n):
        # w = 1 + r e^{i(theta_x - theta1)}
        wr = 1.0 + r * (cx[j] * c1 + sx[j] * s1)
        wi = r * (sx[j] * c1 - cx[j] * s1)
        m2 = wr * wr + wi * wi
        if m2 < 1e-300:
            return -np.inf
        # w^2
        qr = wr * wr - wi * wi
        qi = 2.0 * wr * wi
        # e^{i(theta_y - theta_x - theta0)}
        er = cd[j] * c0 + sd[j] * s0
        ei = sd[j] * c0 - cd[j] * s0
        cosres = (er * qr - ei * qi) / m2
        acc += math.log(1.0 - twod * cosres + d2)
    return n * math.log(1.0 - d2) - acc - n * LOG_2PI


@njit(cache=True)
def negll(p, cx, sx, cd, sd):
    theta0, theta1, r, delta = unpack(p)
    v = loglik_natural(theta0, theta1, r, delta, cx, sx, cd, sd)
    if not math.isfinite(v):
        return np.inf
    return -v


@njit(cache=True)
def nelder_mead(x0, step, cx, sx, cd, sd, xtol, maxiter):
    """Nelder-Mead minimisation of ``negll`` from ``x0``.

    Returns ``(x, f, iterations, converged)``.  Converged means every vertex
    lies within ``xtol`` (max-norm) of the best vertex.
    """
    dim = x0.shape[0]
    sim = np.empty((dim + 1, dim))
    fs = np.empty(dim + 1)
    for i in range(dim + 1):
        for k in range(dim):
            sim[i, k] = x0[k]
        if i > 0:
            sim[i, i - 1] += step[i - 1]
        fs[i] = negll(sim[i], cx, sx, cd, sd)

    centroid = np.empty(dim)
    xr = np.empty(dim)
    xe = np.empty(dim)
    xc = np.empty(dim)
    it = 0
    converged = False
    while True:
        # insertion sort, stable so ties keep vertex order
        for i in range(1, dim + 1):
            fk = fs[i]
            row = sim[i].copy()
            j = i - 1
            while j >= 0 and fs[j] > fk:
                fs[j + 1] = fs[j]
                sim[j + 1] = sim[j]
                j -= 1
            fs[j + 1] = fk
            sim[j + 1] = row

        diam = 0.0
        for i in range(1, dim + 1):
            for k in range(dim):
                dk = abs(sim[i, k] - sim[0, k])
                if dk > diam:
                    diam = dk
        if diam < xtol:
            converged = True
            break
        if it >= maxiter:
            break
        it += 1

        for k in range(dim):
            acc = 0.0
            for i in range(dim):
                acc += sim[i, k]
            centroid[k] = acc / dim

        for k in range(dim):
            xr[k] = 2.0 * centroid[k] - sim[dim, k]
        fr = negll(xr, cx, sx, cd, sd)
        if fr < fs[0]:
            for k in range(dim):
                xe[k] = 3.0 * centroid[k] - 2.0 * sim[dim, k]
            fe = negll(xe, cx, sx, cd, sd)
            if fe < fr:
                sim[dim] = xe
                fs[dim] = fe
            else:
                sim[dim] = xr
                fs[dim] = fr
            continue
        if fr < fs[dim - 1]:
            sim[dim] = xr
            fs[dim] = fr
            continue
        if fr < fs[dim]:
            for k in range(dim):
                xc[k] = 1.5 * centroid[k] - 0.5 * sim[dim, k]
            fc = negll(xc, cx, sx, cd, sd)
            if fc <= fr:
                sim[dim] = xc
                fs[dim] = fc
                continue
        else:
            for k in range(dim):
                xc[k] = 0.5 * centroid[k] + 0.5 * sim[dim, k]
            fc = negll(xc, cx, sx, cd, sd)
            if fc < fs[dim]:
                sim[dim] = xc
                fs[dim] = fc
                continue
        for i in range(1, dim + 1):
            for k in range(dim):
                sim[i, k] = sim[0, k] + 0.5 * (sim[i, k] - sim[0, k])
            fs[i] = negll(sim[i], cx, sx, cd, sd)

    return sim[0].copy(), fs[0], it, converged


@njit(cache=True)
def multistart(starts, step, cx, sx, cd, sd, xtol, maxiter):
    m = starts.shape[0]
    dim = starts.shape[1]
    xs = np.empty((m, dim))
    fs = np.empty(m)
    its = np.empty(m, dtype=np.int64)
    conv = np.empty(m, dtype=np.bool_)
    for i in range(m):
        x, f, it, ok = nelder_mead(starts[i], step, cx, sx, cd, sd, xtol, maxiter)
        xs[i] = x
        fs[i] = f
        its[i] = it
        conv[i] = ok
    return xs, fs, its, conv


@njit(cache=True)
def profile_scan(theta1s, rs, cx, sx, cd, sd):
    """Moment-profiled starts over a ``(theta1, r)`` grid.

    For fixed ``(theta1, r)`` the partial residuals ``theta_y - g(x)``
    (``g`` the Mobius angle without rotation) should be WC(theta0, delta), so
    ``theta0`` and ``delta`` are taken from their mean resultant vector.
    Returns internal-space starts and their log-likelihoods.
    """
    n = cx.shape[0]
    m = theta1s.shape[0] * rs.shape[0]
    starts = np.empty((m, 4))
    lls = np.empty(m)
    k = 0
    for a in range(theta1s.shape[0]):
        c1 = math.cos(theta1s[a])
        s1 = math.sin(theta1s[a])
        for b in range(rs.shape[0]):
            r = rs[b]
            mr = 0.0
            mi = 0.0
            for j in range(n):
                wr = 1.0 + r * (cx[j] * c1 + sx[j] * s1)
                wi = r * (sx[j] * c1 - cx[j] * s1)
                m2 = wr * wr + wi * wi
                if m2 < 1e-300:
                    continue
                qr = (wr * wr - wi * wi) / m2
                qi = 2.0 * wr * wi / m2
                mr += cd[j] * qr - sd[j] * qi
                mi += cd[j] * qi + sd[j] * qr
            mr /= n
            mi /= n
            theta0 = math.atan2(mi, mr)
            d = math.sqrt(mr * mr + mi * mi)
            if d < 0.01:
                d = 0.01
            elif d > 0.99:
                d = 0.99
            starts[k, 0] = theta0
            starts[k, 1] = theta1s[a]
            starts[k, 2] = math.log(r)
            starts[k, 3] = math.log(d / (1.0 - d))
            lls[k] = loglik_natural(theta0, theta1s[a], r, d, cx, sx, cd, sd)
            k += 1
    return starts, lls
