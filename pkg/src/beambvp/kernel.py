"""Green's function of the clamped-slope beam problem and the nonlocal kernel.

For u''''(t) + y(t) = 0 with u'(0) = u'(1) = u''(0) = 0 and
u(0) = integral_0^1 a(s) u(s) ds, the solution is

    u(t) = integral_0^1 [ G(t, s) + W(s) ] y(s) ds,

with the triangular Green's function G and the t-independent nonlocal
weight W(s) = (1/(1-alpha)) integral_0^1 a(tau) G(tau, s) dtau,
alpha = integral_0^1 a. This module evaluates G, its envelopes, the
weight, and the cone constants that control positivity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolation, InvalidConfig, NegativeWeight, OutOfDomain
from .expressions import Expression
from .quadrature import Quadrature, integrate, integrate_on

ALPHA_MARGIN = 1e-12


def green(t, s):
    """G(t, s), piecewise cubic with the kink on the diagonal s = t.

    Accepts scalars or broadcastable arrays; on the diagonal both branch
    formulas agree. Raises OutOfDomain off the unit square.
    """
    t = np.asarray(t)
    s = np.asarray(s)
    if np.any(t < 0) or np.any(t > 1) or np.any(s < 0) or np.any(s > 1):
        raise OutOfDomain("green(t, s) requires 0 <= t, s <= 1")
    base = t**3 * (1.0 - s) ** 2
    hump = np.where(s <= t, (t - s) ** 3, np.zeros_like(base))
    g = (base - hump) / 6.0
    return g if g.ndim else float(g)


def rho(t):
    """Lower-envelope profile min(t^3, t^2(1-t))/6."""
    t = np.asarray(t)
    if np.any(t < 0) or np.any(t > 1):
        raise OutOfDomain("rho(t) requires 0 <= t <= 1")
    r = np.minimum(t**3, t**2 * (1.0 - t)) / 6.0
    return r if r.ndim else float(r)


def upper_envelope(s):
    """s(1-s)^2 / 6, the uniform upper bound on G(., s)."""
    s = np.asarray(s)
    v = s * (1.0 - s) ** 2 / 6.0
    return v if v.ndim else float(v)


def lower_envelope(t, s):
    """rho(t) s(1-s)^2, the uniform lower bound on G."""
    return rho(t) * np.asarray(s) * (1.0 - np.asarray(s)) ** 2


def strip_lower_bound(theta, s):
    """(theta^3/6) s(1-s)^2, valid for all t in [theta, 1-theta]."""
    s = np.asarray(s)
    v = theta**3 / 6.0 * s * (1.0 - s) ** 2
    return v if v.ndim else float(v)


@dataclass(frozen=True)
class ConeConstants:
    """Moments of the boundary weight a and the derived cone ratio.

    alpha = integral_0^1 a, beta = integral over the inner strip
    [theta, 1-theta], gamma = theta^3 (1 - alpha + beta): every
    nonnegative forcing produces a solution whose minimum on the strip
    dominates gamma times its sup norm.
    """

    theta: float
    alpha: float
    beta: float
    gamma: float


def cone_constants(a: Expression, theta: float, q: Quadrature) -> ConeConstants:
    """Compute (alpha, beta, gamma) for the weight a at a given strip.

    Raises NegativeWeight if a is negative at any node and
    HypothesisViolation unless 0 < alpha < 1.
    """
    if not 0.0 < theta < 0.5:
        raise InvalidConfig(f"theta must lie in (0, 1/2), got {theta}")
    values = np.asarray(a(q.nodes))
    if np.any(values < 0.0):
        where = float(q.nodes[int(np.argmin(values))])
        raise NegativeWeight(f"a(t) < 0 at t = {where}")
    alpha = integrate(a, q)
    # margin of 1e-12: 1 - alpha divides the kernel weight, and quadrature
    # rounding can land an inadmissible weight a hair inside the open window
    if not ALPHA_MARGIN < alpha < 1.0 - ALPHA_MARGIN:
        raise HypothesisViolation(
            f"integral of a over [0,1] is {alpha}; the problem requires 0 < alpha < 1"
        )
    beta = integrate_on(a, theta, 1.0 - theta, q)
    gamma = theta**3 * (1.0 - alpha + beta)
    return ConeConstants(theta, alpha, beta, gamma)


def kernel_weight(s, a: Expression, alpha: float, q: Quadrature):
    """Nonlocal weight W(s) = (1/(1-alpha)) integral a(tau) G(tau, s) dtau.

    alpha = 0 (identically zero weight) is admitted here so kernel-level
    tests can exercise the plain Green's function.
    """
    if alpha != 0.0 and not 0.0 < alpha < 1.0:
        raise HypothesisViolation(f"alpha = {alpha} outside [0, 1)")
    s_arr = np.atleast_1d(np.asarray(s))
    tau = q.nodes.astype(s_arr.dtype, copy=False)
    coeff = np.asarray(a(tau)) * q.weights.astype(s_arr.dtype, copy=False)
    w = coeff @ green(tau[:, None], s_arr[None, :]) / (1.0 - alpha)
    return w if np.ndim(s) else float(w[0])


def kernel_eval(t, s, a: Expression, alpha: float, q: Quadrature):
    """Full kernel G(t, s) + W(s); s may be a scalar or 1-d array."""
    return green(t, s) + kernel_weight(s, a, alpha, q)
