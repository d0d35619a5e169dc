"""Scalar special functions and root finding used by every other module.

All computations are plain double precision; the quantities handled elsewhere
in the package span roughly 1e-11 .. 1e9, comfortably inside double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BracketError, ConvergenceError, DomainError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Tolerance:
    """Stopping thresholds for iterative scalar solvers."""

    absolute: float = 0.0
    relative: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self) -> None:
        if self.absolute < 0.0 or self.relative < 0.0:
            raise DomainError("tolerances must be nonnegative")
        if self.absolute == 0.0 and self.relative == 0.0:
            raise DomainError("at least one of absolute/relative must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be a positive integer")


def gaussian_q(x: float) -> float:
    """Standard normal upper-tail probability Q(x) = P(Z > x).

    Strictly decreasing with range (0, 1); saturates gracefully for extreme
    arguments (returns 0.0 / 1.0 once erfc under/overflows).
    """
    return 0.5 * math.erfc(x / _SQRT2)


def _normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


# Rational approximation to the standard normal quantile (P. J. Acklam),
# |relative error| < 1.15e-9; refined below by Newton steps on gaussian_q.
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425


def _normal_quantile_guess(p: float) -> float:
    """Initial guess for the standard normal quantile at probability p."""
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        return (
            (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
            * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
        )
    q = math.sqrt(-2.0 * math.log(1.0 - p))
    return -(
        ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
    ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)


def gaussian_q_inv(eps: float) -> float:
    """Inverse of gaussian_q: the x with Q(x) = eps, for eps in (0, 1).

    Negative for eps > 0.5, zero at eps = 0.5, positive for eps < 0.5.
    Accuracy target |Q(x) - eps| <= 1e-12 * eps, reached by Newton iterations
    on gaussian_q from a rational initial guess; a bisection fallback
    guarantees termination if Newton misbehaves.
    """
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    if eps == 0.5:
        return 0.0

    # Q^{-1}(eps) = -Phi^{-1}(eps); evaluating the lower-tail branch keeps
    # full precision for tiny eps.
    x = -_normal_quantile_guess(eps)
    for _ in range(4):
        err = gaussian_q(x) - eps
        if abs(err) <= 1e-14 * eps:
            return x
        step = err / _normal_pdf(x)
        if not math.isfinite(step):
            break
        x += step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            return x
    if abs(gaussian_q(x) - eps) <= 1e-12 * eps:
        return x

    # Bisection fallback; Q is strictly decreasing on the bracket.
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gaussian_q(mid) > eps:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def find_root_monotone(
    f: Callable[[float], float], lo: float, hi: float, tol: Tolerance
) -> float:
    """Bisection root of a monotone scalar function on [lo, hi].

    Requires f(lo) and f(hi) to bracket a sign change. Converges when either
    |f(mid)| <= tol.absolute or the bracket width falls below
    tol.absolute + tol.relative * |mid|.
    """
    if not (lo < hi):
        raise DomainError(f"invalid bracket [{lo}, {hi}]")
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}"
        )
    increasing = flo < 0.0
    for _ in range(tol.max_iterations):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0 or abs(fmid) <= tol.absolute:
            return mid
        if (fmid < 0.0) == increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol.absolute + tol.relative * abs(mid):
            return 0.5 * (lo + hi)
    raise ConvergenceError(
        f"bisection did not converge within {tol.max_iterations} iterations"
    )
