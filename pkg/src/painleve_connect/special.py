"""Airy function Ai, the Allen-Cahn heteroclinic profile, and the radial weight mu.

Ai is evaluated by its Maclaurin series on [-7, 6] (summed in 50-digit decimal
arithmetic, since the two series cancel catastrophically for positive x) and by
the classical asymptotic expansions outside that window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

import numpy as np

GAMMA_ONE_THIRD = Decimal("2.67893853470774763365569294097467764412868938")
GAMMA_TWO_THIRDS = Decimal("1.35411793942640041694528802815451378551932727")

X_SWITCH = 6.0
X_SWITCH_NEG = -7.0

_PREC = 50


def _airy_origin_constants() -> tuple[Decimal, Decimal]:
    with localcontext() as ctx:
        ctx.prec = _PREC
        three = Decimal(3)
        c1 = 1 / (three ** (Decimal(2) / 3) * GAMMA_TWO_THIRDS)
        c2 = 1 / (three ** (Decimal(1) / 3) * GAMMA_ONE_THIRD)
    return c1, c2


AI0_DEC, NEG_AIP0_DEC = _airy_origin_constants()
AI0 = float(AI0_DEC)            # Ai(0)
AIP0 = -float(NEG_AIP0_DEC)     # Ai'(0)


def _maclaurin(x: float) -> tuple[float, float]:
    """Ai(x), Ai'(x) from the power series about 0."""
    with localcontext() as ctx:
        ctx.prec = _PREC
        X = Decimal(x)
        x3 = X ** 3
        tiny = Decimal(10) ** (-_PREC + 5)
        # f = sum t_k, g = sum s_k and their derivatives a_k, b_k
        t, s = Decimal(1), X
        a, b = Decimal(0), Decimal(1)
        f, g, fp, gp = t, s, a, b
        k = 0
        while True:
            k += 1
            t = t * x3 / ((3 * k - 1) * (3 * k))
            s = s * x3 / ((3 * k) * (3 * k + 1))
            a = X * X / 2 if k == 1 else a * x3 / ((3 * k - 3) * (3 * k - 1))
            b = b * x3 / ((3 * k - 2) * (3 * k))
            f += t
            g += s
            fp += a
            gp += b
            if k > 3 and max(abs(t), abs(s), abs(a), abs(b)) < tiny:
                break
        ai = AI0_DEC * f - NEG_AIP0_DEC * g
        aip = AI0_DEC * fp - NEG_AIP0_DEC * gp
    return float(ai), float(aip)


def _asymptotic_coefficients(kmax: int = 80) -> tuple[list[float], list[float]]:
    u = [1.0]
    for k in range(1, kmax):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, kmax)]
    return u, v


_U, _V = _asymptotic_coefficients()


def _truncated_sum(coef: list[float], zeta: float, start: int = 0, step: int = 1) -> float:
    """Alternating sum of coef[k] zeta^-k over k = start, start+step, ..., stopped at the smallest term."""
    total = 0.0
    prev = math.inf
    sign = 1.0
    for k in range(start, len(coef), step):
        term = coef[k] / zeta ** k
        if abs(term) > prev:
            break
        total += sign * term
        sign = -sign
        prev = abs(term)
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def _asymptotic_positive(x: float) -> tuple[float, float]:
    zeta = 2.0 / 3.0 * x ** 1.5
    pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    ai = pref * x ** -0.25 * _truncated_sum(_U, zeta)
    aip = -pref * x ** 0.25 * _truncated_sum(_V, zeta)
    return ai, aip


def _asymptotic_negative(x: float) -> tuple[float, float]:
    z = -x
    zeta = 2.0 / 3.0 * z ** 1.5
    c, s = math.cos(zeta - math.pi / 4), math.sin(zeta - math.pi / 4)
    ue, uo = _truncated_sum(_U, zeta, 0, 2), _truncated_sum(_U, zeta, 1, 2)
    ve, vo = _truncated_sum(_V, zeta, 0, 2), _truncated_sum(_V, zeta, 1, 2)
    rp = 1.0 / math.sqrt(math.pi)
    ai = rp * z ** -0.25 * (c * ue + s * uo)
    aip = rp * z ** 0.25 * (s * ve - c * vo)
    return ai, aip


def _airy_pair(x: float) -> tuple[float, float]:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"Airy argument must be finite, got {x}")
    if x > X_SWITCH:
        return _asymptotic_positive(x)
    if x < X_SWITCH_NEG:
        return _asymptotic_negative(x)
    return _maclaurin(x)


def airy_ai(x):
    """Ai(x) for a scalar or array argument."""
    if np.ndim(x) == 0:
        return _airy_pair(x)[0]
    return np.array([_airy_pair(v)[0] for v in np.ravel(x)]).reshape(np.shape(x))


def airy_ai_prime(x):
    """Ai'(x) for a scalar or array argument."""
    if np.ndim(x) == 0:
        return _airy_pair(x)[1]
    return np.array([_airy_pair(v)[1] for v in np.ravel(x)]).reshape(np.shape(x))


def heteroclinic(x):
    """The Allen-Cahn kink tanh(x / sqrt(2)), solving u'' = u^3 - u."""
    return np.tanh(np.asarray(x, dtype=float) / math.sqrt(2.0))


@dataclass(frozen=True)
class GLParams:
    epsilon: float
    chi: float = 0.5

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.chi < 1:
            raise ValueError("chi must lie in (0, 1)")

    @property
    def rho(self) -> float:
        """Radius of the circle where mu vanishes."""
        return math.sqrt(math.log(1.0 / self.chi))

    @property
    def mu1(self) -> float:
        """Radial slope of mu at rho (negative)."""
        return -2.0 * self.rho * self.chi


def mu_rad(params: GLParams, r):
    return np.exp(-np.asarray(r, dtype=float) ** 2) - params.chi


def mu(params: GLParams, x1, x2):
    return np.exp(-(np.asarray(x1, dtype=float) ** 2 + np.asarray(x2, dtype=float) ** 2)) - params.chi


def mu_rad_prime(params: GLParams, r):
    r = np.asarray(r, dtype=float)
    return -2.0 * r * np.exp(-r ** 2)
