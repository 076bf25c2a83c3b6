"""Floating-point evaluation of the inverse Gudermannian and the circle group law.

``lam(x) = arctanh(sin x)`` maps the circle onto the extended real line
(``+inf`` at ``pi/2``, ``-inf`` at ``-pi/2``); ``lam_inv(y) = arcsin(tanh y)``
maps back. Adding in the Mercator coordinate and mapping back gives
:func:`mercator_add`, which extends continuously to the whole torus except
the two points ``(pi/2, -pi/2)`` and ``(-pi/2, pi/2)``.
"""

from __future__ import annotations

import cmath
import math

from . import tolerances
from .errors import DomainError, InvariantError, PunctureError

__all__ = [
    "FORMULAS",
    "reduce_angle",
    "lambda_num",
    "lambda_inv_num",
    "mercator_add",
    "mercator_add_log_form",
    "cayley_transform",
    "cayley_lambda_check",
    "aberration_sine",
]

FORMULAS = ("arctanh-sin", "log-tan-sec", "half-log-ratio")

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


def reduce_angle(x: float) -> float:
    """Representative of ``x`` modulo ``2*pi`` in ``(-pi, pi]``."""
    if not math.isfinite(x):
        raise DomainError(f"angle must be finite, got {x!r}")
    r = math.remainder(x, TWO_PI)
    return math.pi if r == -math.pi else r


def _near(r: float, target: float) -> bool:
    return abs(r - target) <= tolerances.SINGULAR_ULPS * math.ulp(target)


def _singular_sign(r: float) -> int:
    """+1 / -1 if the reduced angle sits on +pi/2 / -pi/2, else 0."""
    if _near(r, HALF_PI):
        return 1
    if _near(r, -HALF_PI):
        return -1
    return 0


def lambda_num(x: float, formula: str = "arctanh-sin") -> float:
    """Evaluate ``lam(x)`` with one of its three classical representations.

    Parameters
    ----------
    x : float
        Angle in radians; reduced modulo ``2*pi`` first.
    formula : {"arctanh-sin", "log-tan-sec", "half-log-ratio"}
        ``arctanh(sin x)``, ``log|tan x + sec x|`` or
        ``0.5 * log|(1 + sin x) / (1 - sin x)|``.

    Returns
    -------
    float
        ``+inf`` at ``x = pi/2``, ``-inf`` at ``x = -pi/2`` (mod ``2*pi``).
    """
    if formula not in FORMULAS:
        raise ValueError(f"unknown formula {formula!r}; choose from {FORMULAS}")
    r = reduce_angle(x)
    sign = _singular_sign(r)
    if sign:
        return math.copysign(math.inf, sign)

    if formula == "log-tan-sec":
        # 1/(sec x + tan x) = sec x - tan x, so lam(x) = -lam(-x) keeps the sum free of cancellation
        c = math.cos(r)
        t = math.sin(abs(r)) / c
        value = math.log(abs(t + 1.0 / c))
        return value if r >= 0 else -value
    s = math.sin(r)
    if abs(s) == 1.0:
        return _near_pole(r)
    if formula == "arctanh-sin":
        return math.atanh(s)
    return 0.5 * math.log(abs((1.0 + s) / (1.0 - s)))


def _near_pole(r: float) -> float:
    # sin rounds to +-1 within ~1e-8 of a pole; lam(x) = 2 artanh(tan(x/2)) stays exact there
    if r > HALF_PI:
        r = math.pi - r
    elif r < -HALF_PI:
        r = -math.pi - r
    return 2.0 * math.atanh(math.tan(0.5 * r))


def lambda_inv_num(y: float) -> float:
    """``arcsin(tanh y)`` in ``[-pi/2, pi/2]``; ``+-inf`` map to ``+-pi/2``.

    Evaluated as ``2 * atan(tanh(y / 2))``, the same function without the
    precision loss of ``arcsin`` near ``+-1``.
    """
    if math.isnan(y):
        raise DomainError("lambda_inv_num of NaN")
    return 2.0 * math.atan(math.tanh(0.5 * y))


def _check_puncture(rx: float, ry: float) -> None:
    sx, sy = _singular_sign(rx), _singular_sign(ry)
    if sx and sy == -sx:
        raise PunctureError(
            f"({rx!r}, {ry!r}) is the puncture ({'+' if sx > 0 else '-'}pi/2, "
            f"{'-' if sx > 0 else '+'}pi/2) of the torus; the Mercator sum is undefined there"
        )


def mercator_add(x: float, y: float) -> float:
    """Circle-valued Mercator sum ``lam_inv(lam(x) + lam(y))`` extended to the torus.

    Computed as ``2 * atan2(sin((x + y) / 2), cos((x - y) / 2))`` and returned
    in ``(-pi, pi]``. Raises :class:`PunctureError` at the two excluded points.
    """
    rx, ry = reduce_angle(x), reduce_angle(y)
    _check_puncture(rx, ry)
    return reduce_angle(2.0 * math.atan2(math.sin(0.5 * (rx + ry)), math.cos(0.5 * (rx - ry))))


def mercator_add_log_form(x: float, y: float) -> float:
    """The complex-logarithm closed form ``i log((c - i s) / (c + i s))`` reduced to ``(-pi, pi]``.

    Here ``c = cos((x - y)/2)`` and ``s = sin((x + y)/2)``. Kept to cross-check
    :func:`mercator_add`.
    """
    rx, ry = reduce_angle(x), reduce_angle(y)
    _check_puncture(rx, ry)
    c = math.cos(0.5 * (rx - ry))
    s = math.sin(0.5 * (rx + ry))
    w = 1j * cmath.log(complex(c, -s) / complex(c, s))
    return reduce_angle(w.real)


def cayley_transform(z: complex) -> complex:
    """``C(z) = (z - i) / (z + i)``."""
    return (z - 1j) / (z + 1j)


def cayley_lambda_check(x: float) -> float:
    """Residual ``|Re(-log(i C(e^{ix}))) - lam(x)|``.

    ``i C(e^{ix}) = cos x / (1 + sin x)`` is real, so the imaginary part of the
    logarithm must be a multiple of ``pi`` (zero on ``|x| < pi/2``);
    an :class:`InvariantError` is raised otherwise.
    """
    r = reduce_angle(x)
    if _singular_sign(r):
        raise DomainError(f"x = {x!r} is a singular point of lambda")
    w = -cmath.log(1j * cayley_transform(cmath.exp(1j * r)))
    branch = w.imag / math.pi
    if abs(branch - round(branch)) * math.pi > tolerances.ROUND_TRIP:
        raise InvariantError(f"imaginary part {w.imag!r} of -log(iC(e^ix)) does not vanish")
    return abs(w.real - lambda_num(r))


def aberration_sine(x: float, y: float) -> float:
    """``(sin x + sin y) / (1 + sin x sin y)``, the sine of the Mercator sum."""
    sx, sy = math.sin(x), math.sin(y)
    den = 1.0 + sx * sy
    if den == 0.0:
        raise PunctureError(f"1 + sin x sin y vanishes at ({x!r}, {y!r}): a puncture of the torus")
    return (sx + sy) / den
