"""Generalized inverse Gaussian variates.

Density ``f(x) ∝ x^(p-1) exp(-(chi/x + psi*x)/2)`` on ``x > 0``.

Draws use the ratio-of-uniforms family of Hörmann & Leydold (2014): the
mode-shifted variant when ``p >= 1`` or ``omega > 1``, the unshifted one for
moderate ``omega`` and a piecewise-constant/exponential hat otherwise. The
two-parameter standardized form with ``omega = sqrt(chi*psi)`` is sampled
and rescaled by ``sqrt(chi/psi)``; negative ``p`` goes through the symmetry
``GIG(p, omega) = 1 / GIG(-p, omega)``.

For very small ``omega`` (below ``SMALL_OMEGA``) those hats lose accuracy,
and neither the Gamma nor the inverse Gamma limit is adequate when ``|p|``
is small, since both walls of the density matter. There ``u = log y`` has
the concave log-density ``p u - omega cosh(u)`` and is drawn exactly by
rejection from a three-piece exponential hat built from tangents.
"""

from __future__ import annotations

import math

import numpy as np

SMALL_OMEGA = 1e-8
_EXP_MAX = 700.0


def _mode(lam: float, omega: float) -> float:
    if lam >= 1.0:
        return (math.sqrt((lam - 1.0) ** 2 + omega * omega) + (lam - 1.0)) / omega
    return omega / (math.sqrt((1.0 - lam) ** 2 + omega * omega) + (1.0 - lam))


def _rou_shift(lam: float, omega: float, rng: np.random.Generator) -> float:
    t = 0.5 * (lam - 1.0)
    s = 0.25 * omega
    xm = _mode(lam, omega)
    nc = t * math.log(xm) - s * (xm + 1.0 / xm)
    # extremes of the shifted bounding rectangle are roots of a depressed cubic
    a = -(2.0 * (lam + 1.0) / omega + xm)
    b = 2.0 * (lam - 1.0) * xm / omega - 1.0
    c = xm
    p = b - a * a / 3.0
    q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c
    fi = math.acos(max(-1.0, min(1.0, -q / (2.0 * math.sqrt(-(p * p * p) / 27.0)))))
    fak = 2.0 * math.sqrt(-p / 3.0)
    y1 = fak * math.cos(fi / 3.0) - a / 3.0
    y2 = fak * math.cos(fi / 3.0 + 4.0 / 3.0 * math.pi) - a / 3.0
    uplus = (y1 - xm) * math.exp(t * math.log(y1) - s * (y1 + 1.0 / y1) - nc)
    uminus = (y2 - xm) * math.exp(t * math.log(y2) - s * (y2 + 1.0 / y2) - nc)
    rand = rng.random
    while True:
        u = uminus + rand() * (uplus - uminus)
        v = rand()
        if v == 0.0:
            continue
        x = u / v + xm
        if x <= 0.0:
            continue
        if math.log(v) <= t * math.log(x) - s * (x + 1.0 / x) - nc:
            return x


def _rou_noshift(lam: float, omega: float, rng: np.random.Generator) -> float:
    t = 0.5 * (lam - 1.0)
    s = 0.25 * omega
    xm = _mode(lam, omega)
    nc = t * math.log(xm) - s * (xm + 1.0 / xm)
    ym = ((lam + 1.0) + math.sqrt((lam + 1.0) ** 2 + omega * omega)) / omega
    um = math.exp(0.5 * (lam + 1.0) * math.log(ym) - s * (ym + 1.0 / ym) - nc)
    rand = rng.random
    while True:
        u = um * rand()
        v = rand()
        if u == 0.0 or v == 0.0:
            continue
        x = u / v
        if math.log(v) <= t * math.log(x) - s * (x + 1.0 / x) - nc:
            return x


def _hat_small_omega(lam: float, omega: float, rng: np.random.Generator) -> float:
    # for 0 <= lam < 1 and small omega
    xm = _mode(lam, omega)
    x0 = omega / (1.0 - lam)
    k0 = math.exp((lam - 1.0) * math.log(xm) - 0.5 * omega * (xm + 1.0 / xm))
    a0 = k0 * x0
    if x0 >= 2.0 / omega:
        k1 = 0.0
        a1 = 0.0
        k2 = x0 ** (lam - 1.0)
        a2 = k2 * 2.0 * math.exp(-omega * x0 / 2.0) / omega
    else:
        k1 = math.exp(-omega)
        if lam == 0.0:
            a1 = k1 * math.log(2.0 / (omega * omega))
        else:
            a1 = k1 / lam * ((2.0 / omega) ** lam - x0 ** lam)
        k2 = (2.0 / omega) ** (lam - 1.0)
        a2 = k2 * 2.0 * math.exp(-1.0) / omega
    total = a0 + a1 + a2
    lo = max(x0, 2.0 / omega)
    rand = rng.random
    while True:
        v = total * rand()
        if v <= a0:
            x = x0 * v / a0
            hx = k0
        elif v - a0 <= a1:
            v -= a0
            if lam == 0.0:
                x = omega * math.exp(math.exp(omega) * v)
                hx = k1 / x
            else:
                x = (x0 ** lam + lam / k1 * v) ** (1.0 / lam)
                hx = k1 * x ** (lam - 1.0)
        else:
            v -= a0 + a1
            arg = math.exp(-omega / 2.0 * lo) - omega / (2.0 * k2) * v
            if arg <= 0.0:
                continue
            x = -2.0 / omega * math.log(arg)
            hx = k2 * math.exp(-omega / 2.0 * x)
        if x <= 0.0:
            continue
        u = rand() * hx
        if u > 0.0 and math.log(u) <= (lam - 1.0) * math.log(x) - omega / 2.0 * (x + 1.0 / x):
            return x


def _standard(lam: float, omega: float, rng: np.random.Generator) -> float:
    # lam >= 0 here
    if lam >= 1.0 or omega > 1.0:
        return _rou_shift(lam, omega, rng)
    if omega >= min(0.5, 2.0 / 3.0 * math.sqrt(1.0 - lam)):
        return _rou_noshift(lam, omega, rng)
    return _hat_small_omega(lam, omega, rng)


def _log_density_u(u: float, p: float, log_omega: float) -> float:
    # p u - omega cosh(u), overflow-safe
    a, b = log_omega + u, log_omega - u
    if a > _EXP_MAX or b > _EXP_MAX:
        return -math.inf
    return p * u - 0.5 * (math.exp(a) + math.exp(b))


def _wall(g, u_m: float, g_m: float, direction: float) -> float:
    """Point on one side of the mode where the log-density has dropped by 1."""
    step = 1.0
    while g(u_m + direction * step) > g_m - 1.0:
        step *= 2.0
    lo, hi = 0.0, step
    # bisection keeps this robust where the density is extremely flat
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(u_m + direction * mid) > g_m - 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return u_m + direction * hi


def _log_small_omega(p: float, log_omega: float, rng: np.random.Generator) -> float:
    """Exact draw of ``log y`` for the standardized GIG with tiny omega."""
    omega = math.exp(log_omega)

    def g(u):
        return _log_density_u(u, p, log_omega)

    def dg(u):
        a, b = log_omega + u, log_omega - u
        return p - 0.5 * (math.exp(min(a, _EXP_MAX)) - math.exp(min(b, _EXP_MAX)))

    u_m = math.asinh(p / omega) if abs(p) < 1e300 * omega else math.copysign(math.log(2.0 * abs(p)) - log_omega, p)
    g_m = g(u_m)
    u_l = _wall(g, u_m, g_m, -1.0)
    u_r = _wall(g, u_m, g_m, 1.0)
    s_l, s_r = dg(u_l), -dg(u_r)  # both > 0 by concavity
    z_l = u_l + (g_m - g(u_l)) / s_l
    z_r = u_r - (g_m - g(u_r)) / s_r
    a_l, a_m, a_r = 1.0 / s_l, z_r - z_l, 1.0 / s_r
    total = a_l + a_m + a_r
    rand = rng.random
    while True:
        v = total * rand()
        w = rand()
        if w == 0.0:
            continue
        if v < a_l:
            u = z_l + math.log(w) / s_l
            hat = g_m + s_l * (u - z_l)
        elif v < a_l + a_m:
            u = z_l + (v - a_l)
            hat = g_m
        else:
            u = z_r - math.log(w) / s_r
            hat = g_m - s_r * (u - z_r)
        e = rand()
        if e > 0.0 and math.log(e) <= g(u) - hat:
            return u


def rgig(p: float, chi: float, psi: float, rng: np.random.Generator) -> float:
    """One GIG(p, chi, psi) draw.

    Boundary cases: ``chi == 0`` (with ``p > 0``) is Gamma(p, rate psi/2);
    ``psi == 0`` (with ``p < 0``) is inverse Gamma(-p, scale chi/2).
    """
    p = float(p)
    chi = float(chi)
    psi = float(psi)
    if chi < 0 or psi < 0 or not (math.isfinite(chi) and math.isfinite(psi)):
        raise ValueError(f"invalid GIG parameters chi={chi}, psi={psi}")
    if chi == 0.0 or psi == 0.0:
        if p > 0 and psi > 0:
            return rng.gamma(p, 2.0 / psi)
        if p < 0 and chi > 0:
            g = rng.gamma(-p)
            return chi / (2.0 * g) if g > 0 else math.inf
        raise ValueError(f"improper GIG: p={p}, chi={chi}, psi={psi}")
    log_omega = 0.5 * (math.log(chi) + math.log(psi))
    log_alpha = 0.5 * (math.log(chi) - math.log(psi))
    if log_omega < math.log(SMALL_OMEGA):
        return math.exp(min(log_alpha + _log_small_omega(p, log_omega, rng), 709.0))
    omega = math.exp(log_omega)
    alpha = math.exp(log_alpha)
    x = _standard(abs(p), omega, rng)
    return alpha / x if p < 0 else alpha * x


def rgig_vec(p, chi, psi, rng: np.random.Generator) -> np.ndarray:
    """Elementwise :func:`rgig` over broadcast parameter arrays."""
    p, chi, psi = np.broadcast_arrays(np.asarray(p, float), np.asarray(chi, float), np.asarray(psi, float))
    out = np.empty(p.shape)
    flat = out.reshape(-1)
    for i, (pi, ci, si) in enumerate(zip(p.ravel(), chi.ravel(), psi.ravel())):
        flat[i] = rgig(pi, ci, si, rng)
    return out


def gig_mean(p: float, chi: float, psi: float) -> float:
    """``E[X]`` via Bessel functions; used by tests and diagnostics."""
    from scipy.special import kve

    omega = math.sqrt(chi * psi)
    return math.sqrt(chi / psi) * kve(p + 1.0, omega) / kve(p, omega)
