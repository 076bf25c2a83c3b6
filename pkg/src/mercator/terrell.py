"""Apparent (Terrell) rotation of an object passing the observer at constant speed.

Geometry: the observer sits at the origin, the object moves along +x on a
line ``y = y0 > 0``. ``psi`` is the angle between the incoming light ray and
the direction of motion (``pi/2`` at closest approach) and
``psi_tilde = psi - pi/2``. The object appears rotated counterclockwise by
``phi``, obtainable two ways:

* aberration formula: ``cos(phi + psi) = (cos psi - v) / (1 - v cos psi)``;
* Mercator addition: ``phi + psi_tilde = arcsin(v) (+)_M psi_tilde``.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from .errors import DomainError, VelocityError
from .gudermann import mercator_add

__all__ = [
    "RotationResult",
    "RotationRow",
    "TABLE_HEADER",
    "check_velocity",
    "rapidity_angle",
    "to_psi_tilde",
    "rotation_taylor",
    "rotation_fgl",
    "rotation_table",
    "format_table",
]

TABLE_HEADER = ("v", "nu", "psi_tilde", "phi_taylor", "phi_fgl", "abs_diff")


def check_velocity(v: float) -> float:
    v = float(v)
    if not (abs(v) < 1.0):
        raise VelocityError(f"|v| must be < 1 (units of c), got {v!r}")
    return v


def rapidity_angle(v: float) -> float:
    """``nu = arcsin v``, the velocity expressed as an angle."""
    return math.asin(check_velocity(v))


def to_psi_tilde(psi: float) -> float:
    if not (0.0 < psi < math.pi):
        raise DomainError(f"observation angle psi must lie in (0, pi), got {psi!r}")
    return psi - 0.5 * math.pi


def _check_psi_tilde(psi_tilde: float) -> float:
    if not (-0.5 * math.pi < psi_tilde < 0.5 * math.pi):
        raise DomainError(f"sight angle psi_tilde must lie in (-pi/2, pi/2), got {psi_tilde!r}")
    return float(psi_tilde)


@dataclass(frozen=True)
class RotationResult:
    phi: float
    apparent_angle: float
    route: str


def rotation_taylor(v: float, psi: float) -> RotationResult:
    """Rotation from the aberration formula.

    ``phi + psi`` is taken as the principal ``arccos`` in ``[0, pi]``: with
    ``psi`` in ``(0, pi)`` and the right-hand side in ``(-1, 1)`` this is the
    only solution, the same one the principal ``arcsin`` of the sine form picks.
    """
    v = check_velocity(v)
    if not (0.0 < psi < math.pi):
        raise DomainError(f"observation angle psi must lie in (0, pi), got {psi!r}")
    c = math.cos(psi)
    aberrated = math.acos((c - v) / (1.0 - v * c))
    return RotationResult(aberrated - psi, aberrated - 0.5 * math.pi, "taylor")


def rotation_fgl(v: float, psi_tilde: float) -> RotationResult:
    """Rotation from the Mercator group law: ``apparent = arcsin(v) (+)_M psi_tilde``."""
    nu = rapidity_angle(v)
    psi_tilde = _check_psi_tilde(psi_tilde)
    apparent = mercator_add(nu, psi_tilde)
    return RotationResult(apparent - psi_tilde, apparent, "fgl")


@dataclass(frozen=True)
class RotationRow:
    v: float
    nu: float
    psi_tilde: float
    phi_taylor: float
    phi_fgl: float

    @property
    def abs_diff(self) -> float:
        return abs(self.phi_taylor - self.phi_fgl)

    def as_tuple(self):
        return (self.v, self.nu, self.psi_tilde, self.phi_taylor, self.phi_fgl, self.abs_diff)


def _row(v: float, psi_tilde: float) -> RotationRow:
    fgl = rotation_fgl(v, psi_tilde)
    taylor = rotation_taylor(v, psi_tilde + 0.5 * math.pi)
    return RotationRow(v, math.asin(v), psi_tilde, taylor.phi, fgl.phi)


def rotation_table(
    velocities: Sequence[float],
    sight_angles: Sequence[float],
    workers: int = 1,
) -> List[RotationRow]:
    """Both routes for every ``(v, psi_tilde)`` pair, velocities outermost.

    A bad element raises the same exception type with the row index prepended.
    """
    pairs = [(v, t) for v in velocities for t in sight_angles]

    def work(item):
        k, (v, t) = item
        try:
            return _row(v, t)
        except DomainError as exc:
            raise type(exc)(f"row {k}: {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(work, enumerate(pairs)))
    return [work(item) for item in enumerate(pairs)]


def format_table(rows: Iterable[RotationRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    for row in rows:
        writer.writerow([f"{x:.17g}" for x in row.as_tuple()])
    return buf.getvalue()
