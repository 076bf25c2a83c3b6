"""Light-travel-time rendering of a wireframe moving along +x.

Each vertex of a rigid mesh is placed on its (Lorentz-contracted) worldline,
the emission time of the light that reaches the origin at reception time
``T`` is solved for, and the resulting apparent direction is projected by a
pinhole camera. The companion oracle renders the static mesh rotated by the
predicted Terrell angle and placed at the apparent position of its centre;
:func:`frame_mismatch` measures how far apart the two images are.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import tolerances
from .errors import DomainError, InvariantError
from .terrell import check_velocity, rotation_fgl

logger = logging.getLogger(__name__)

__all__ = [
    "Mesh",
    "MotionState",
    "Camera",
    "Frame",
    "FramePair",
    "MISMATCH_HEADER",
    "world_vertex_position",
    "retarded_emission_time",
    "time_for_sight_angle",
    "render_apparent",
    "render_rotated_oracle",
    "frame_mismatch",
    "render_sequence",
    "format_mismatch_csv",
    "frame_to_svg",
    "frame_to_ppm",
    "auto_camera",
]

MISMATCH_HEADER = ("psi_tilde", "T", "mismatch", "phi_predicted")


@dataclass(frozen=True, eq=False)
class Mesh:
    """Rest-frame vertices (relative to the object centre) and index-pair edges."""

    vertices: np.ndarray
    edges: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        if len(verts) == 0:
            raise ValueError("mesh needs at least one vertex")
        if not np.all(np.isfinite(verts)):
            raise ValueError("mesh vertices must be finite")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (0 <= i < len(verts) and 0 <= j < len(verts)):
                raise ValueError(f"edge ({i}, {j}) out of range for {len(verts)} vertices")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return self.edges == other.edges and np.array_equal(self.vertices, other.vertices)

    @classmethod
    def cube(cls, side: float = 1.0) -> "Mesh":
        h = 0.5 * side
        verts = [(sx * h, sy * h, sz * h) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
        edges = [
            (i, j)
            for i in range(8)
            for j in range(i + 1, 8)
            if sum(a != b for a, b in zip(verts[i], verts[j])) == 1
        ]
        return cls(np.array(verts), tuple(edges))

    @property
    def size(self) -> float:
        """Largest distance between two vertices."""
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((d * d).sum(axis=-1)).max())

    def mirrored_x(self) -> "Mesh":
        return Mesh(self.vertices * np.array([-1.0, 1.0, 1.0]), self.edges)

    def to_dict(self) -> dict:
        return {
            "vertices": [[float(c) for c in v] for v in self.vertices],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mesh":
        return cls(np.array(data["vertices"], dtype=float), tuple(map(tuple, data.get("edges", []))))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Mesh":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def sample_points(self, subdivide: int = 0) -> Tuple[np.ndarray, List[Tuple[int, ...]]]:
        """Vertices followed by ``subdivide`` interior points per edge, plus one polyline per edge."""
        if subdivide < 0:
            raise ValueError("subdivide must be >= 0")
        points = [self.vertices]
        polylines = []
        nxt = len(self.vertices)
        fractions = np.arange(1, subdivide + 1) / (subdivide + 1)
        for i, j in self.edges:
            if subdivide:
                a, b = self.vertices[i], self.vertices[j]
                points.append(a + fractions[:, None] * (b - a))
            polylines.append((i, *range(nxt, nxt + subdivide), j))
            nxt += subdivide
        return np.concatenate(points), polylines


@dataclass(frozen=True)
class MotionState:
    v: float
    y0: float
    z_offset: float = 0.0

    def __post_init__(self):
        check_velocity(self.v)
        if not self.y0 > 0:
            raise DomainError(f"closest-approach distance y0 must be > 0, got {self.y0!r}")

    @property
    def contraction(self) -> float:
        return math.sqrt(1.0 - self.v * self.v)


def _normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = math.sqrt(float(v @ v))
    if n == 0.0:
        raise ValueError("zero vector cannot be normalized")
    return v / n


@dataclass(frozen=True, eq=False)
class Camera:
    """Pinhole camera at the origin with gnomonic projection.

    ``up`` is re-orthogonalised against ``forward``; image x runs along
    ``forward x up`` and image coordinates are scaled so the horizontal field
    of view maps to ``[-1, 1]``.
    """

    forward: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))
    up: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    field_of_view: float = math.radians(60.0)
    width: int = 512
    height: int = 512

    def __post_init__(self):
        f = _normalize(self.forward)
        u = np.asarray(self.up, dtype=float)
        u = u - (u @ f) * f
        if math.sqrt(float(u @ u)) < 1e-12:
            raise ValueError("camera up vector is parallel to forward")
        u = _normalize(u)
        if not (0.0 < self.field_of_view < math.pi):
            raise ValueError("field_of_view must lie in (0, pi)")
        if self.width < 1 or self.height < 1:
            raise ValueError("resolution must be positive")
        object.__setattr__(self, "forward", f)
        object.__setattr__(self, "up", u)

    @property
    def right(self) -> np.ndarray:
        return np.cross(self.forward, self.up)

    def project(self, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Image coordinates of unit directions and a mask of those in front of the camera."""
        d = np.asarray(directions, dtype=float)
        depth = d @ self.forward
        visible = depth > 0
        scale = math.tan(0.5 * self.field_of_view)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (d @ self.right) / depth / scale
            y = (d @ self.up) / depth / scale
        pts = np.stack([x, y], axis=-1)
        pts[~visible] = np.nan
        return pts, visible


@dataclass(eq=False)
class Frame:
    points: np.ndarray
    directions: np.ndarray
    polylines: List[Tuple[int, ...]]
    visible: np.ndarray
    metadata: Dict[str, object]
    mode: str = "svg-wireframe"

    @property
    def drawn_polylines(self) -> List[Tuple[int, ...]]:
        return [p for p in self.polylines if all(self.visible[k] for k in p)]

    def same_as(self, other: "Frame") -> bool:
        """Bit-level equality of geometry and metadata."""
        return (
            self.polylines == other.polylines
            and np.array_equal(self.points, other.points, equal_nan=True)
            and np.array_equal(self.directions, other.directions)
            and np.array_equal(self.visible, other.visible)
            and self.metadata == other.metadata
        )


@dataclass
class FramePair:
    apparent: Frame
    oracle: Frame
    mismatch: float


def world_vertex_position(a, motion: MotionState, t) -> np.ndarray:
    """Lab position at time ``t`` of the point with rest-frame offset ``a``.

    Offsets are contracted by ``sqrt(1 - v^2)`` along x; the centre crosses
    ``x = 0`` at ``t = 0``. Accepts a single 3-vector or an ``(n, 3)`` array.
    """
    a = np.asarray(a, dtype=float)
    t = np.asarray(t, dtype=float)
    x = motion.v * t + a[..., 0] * motion.contraction
    y = motion.y0 + a[..., 1] + np.zeros_like(x)
    z = motion.z_offset + a[..., 2] + np.zeros_like(x)
    return np.stack([x, y, z], axis=-1)


def _retarded_times(a: np.ndarray, motion: MotionState, T: float) -> np.ndarray:
    # |p(t)| = T - t squared: (1-v^2) t^2 - 2 (T + v c) t + (T^2 - c^2 - r^2) = 0,
    # discriminant/4 = (v T + c)^2 + (1 - v^2) r^2, retarded solution is the smaller root
    v = motion.v
    c = a[..., 0] * motion.contraction
    b = motion.y0 + a[..., 1]
    d = motion.z_offset + a[..., 2]
    r2 = b * b + d * d
    A = 1.0 - v * v
    B = T + v * c
    root = np.sqrt((v * T + c) ** 2 + A * r2)
    C = (T - c) * (T + c) - r2
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(B > 0, C / (B + root), (B - root) / A)
    return t


def _distance(p: np.ndarray) -> np.ndarray:
    return np.sqrt(p[..., 0] * p[..., 0] + p[..., 1] * p[..., 1] + p[..., 2] * p[..., 2])


def _check_residual(p: np.ndarray, t: np.ndarray, T: float) -> None:
    residual = np.abs(_distance(p) - (T - t))
    bound = tolerances.RETARDED_RESIDUAL * max(1.0, abs(T))
    if np.any(residual > bound):
        raise InvariantError(f"light-travel-time residual {residual.max():.3g} exceeds {bound:.3g}")


def retarded_emission_time(a, motion: MotionState, T: float):
    """Emission time ``t_e <= T`` with ``|position(t_e)| = T - t_e``.

    The quadratic is solved in the cancellation-free form (smaller root from
    the product of roots when ``B > 0``). Vectorised over leading axes of ``a``.
    """
    a = np.asarray(a, dtype=float)
    t = _retarded_times(a, motion, float(T))
    _check_residual(world_vertex_position(a, motion, t), t, float(T))
    return float(t) if t.ndim == 0 else t


def _perpendicular_distance(motion: MotionState) -> float:
    return math.hypot(motion.y0, motion.z_offset)


def time_for_sight_angle(motion: MotionState, psi_tilde: float) -> float:
    """Reception time at which the object's centre is seen at sight angle ``psi_tilde``.

    The retarded centre ``(v t_e, y0, z)`` satisfies ``tan psi_tilde = v t_e / rho``
    with ``rho`` its distance from the x-axis.
    """
    if not (-0.5 * math.pi < psi_tilde < 0.5 * math.pi):
        raise DomainError(f"sight angle must lie in (-pi/2, pi/2), got {psi_tilde!r}")
    rho = _perpendicular_distance(motion)
    if motion.v == 0.0:
        if psi_tilde != 0.0:
            raise DomainError("a resting object is only ever seen at sight angle 0")
        t_e = 0.0
    else:
        t_e = rho * math.tan(psi_tilde) / motion.v
    return t_e + math.hypot(motion.v * t_e, rho)


def _sight_angle_at(motion: MotionState, T: float) -> float:
    t_e = float(_retarded_times(np.zeros(3), motion, T))
    return math.atan2(motion.v * t_e, _perpendicular_distance(motion))


def _build_frame(world: np.ndarray, polylines, camera: Camera, metadata: dict, mode: str) -> Frame:
    dist = _distance(world)
    directions = world / dist[:, None]
    points, visible = camera.project(directions)
    if not visible.all():
        hidden = [int(k) for k in np.flatnonzero(~visible)]
        metadata["warnings"] = [f"{len(hidden)} point(s) behind camera: {hidden}"]
        logger.warning("frame has %d point(s) behind the camera", len(hidden))
    return Frame(points, directions, list(polylines), visible, metadata, mode)


def render_apparent(
    mesh: Mesh,
    motion: MotionState,
    camera: Camera,
    T: float,
    subdivide: int = 0,
    mode: str = "svg-wireframe",
) -> Frame:
    """What the observer at the origin sees at reception time ``T``."""
    pts, polylines = mesh.sample_points(subdivide)
    t = _retarded_times(pts, motion, float(T))
    world = world_vertex_position(pts, motion, t)
    _check_residual(world, t, float(T))
    psi_tilde = _sight_angle_at(motion, float(T))
    metadata = {
        "v": motion.v,
        "psi_tilde": psi_tilde,
        "T": float(T),
        "phi_predicted": rotation_fgl(motion.v, psi_tilde).phi,
    }
    return _build_frame(world, polylines, camera, metadata, mode)


def _rotation_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    k = _normalize(axis)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def render_rotated_oracle(
    mesh: Mesh,
    motion: MotionState,
    camera: Camera,
    psi_tilde: float,
    subdivide: int = 0,
    mode: str = "svg-wireframe",
) -> Frame:
    """The predicted image: the resting mesh turned counterclockwise by the Terrell angle.

    The rotation axis is perpendicular to the plane spanned by the direction
    of motion and the line of sight (``+z`` when ``z_offset == 0``), and the
    rotated mesh sits at the retarded position of the centre.
    """
    T = time_for_sight_angle(motion, psi_tilde)
    phi = rotation_fgl(motion.v, psi_tilde).phi
    t_c = float(_retarded_times(np.zeros(3), motion, T))
    centre = world_vertex_position(np.zeros(3), motion, t_c)
    axis = np.cross(np.array([1.0, 0.0, 0.0]), centre)
    R = _rotation_matrix(axis, phi)
    pts, polylines = mesh.sample_points(subdivide)
    world = centre + pts @ R.T
    metadata = {"v": motion.v, "psi_tilde": float(psi_tilde), "T": T, "phi_predicted": phi}
    return _build_frame(world, polylines, camera, metadata, mode)


def _angles_between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    cross = np.cross(a, b)
    return np.arctan2(_distance(cross), np.sum(a * b, axis=-1))


def frame_mismatch(a: Frame, b: Frame) -> float:
    """Largest angular offset between corresponding points, in units of the angular size of ``b``."""
    if a.polylines != b.polylines or a.directions.shape != b.directions.shape:
        raise ValueError("frames do not share mesh topology")
    offsets = _angles_between(a.directions, b.directions)
    d = b.directions
    pairwise = _angles_between(d[:, None, :], d[None, :, :])
    size = float(pairwise.max())
    if size == 0.0:
        raise ValueError("reference frame has zero angular size")
    return float(offsets.max()) / size


def auto_camera(mesh: Mesh, motion: MotionState, psi_tilde: float, width=512, height=512) -> Camera:
    """Camera aimed at the apparent centre with a field of view about three object widths across."""
    T = time_for_sight_angle(motion, psi_tilde)
    t_c = float(_retarded_times(np.zeros(3), motion, T))
    centre = world_vertex_position(np.zeros(3), motion, t_c)
    dist = float(_distance(centre))
    fov = min(2.0 * math.atan(1.5 * mesh.size / dist), math.radians(170.0))
    return Camera(centre, np.array([0.0, 0.0, 1.0]), fov, width, height)


def _render_pair(mesh, motion, camera, psi_tilde, subdivide, mode) -> FramePair:
    cam = camera if camera is not None else auto_camera(mesh, motion, psi_tilde)
    T = time_for_sight_angle(motion, psi_tilde)
    apparent = render_apparent(mesh, motion, cam, T, subdivide, mode)
    oracle = render_rotated_oracle(mesh, motion, cam, psi_tilde, subdivide, mode)
    return FramePair(apparent, oracle, frame_mismatch(apparent, oracle))


def render_sequence(
    mesh: Mesh,
    motion: MotionState,
    camera: Optional[Camera],
    sight_angles: Sequence[float],
    subdivide: int = 0,
    mode: str = "svg-wireframe",
    workers: int = 1,
) -> Tuple[List[FramePair], str]:
    """Apparent/oracle frame pairs for each sight angle, and the mismatch CSV.

    ``camera=None`` aims a separate :func:`auto_camera` at every frame.
    Output order follows ``sight_angles`` for any number of workers.
    """

    def work(item):
        k, psi_tilde = item
        try:
            return _render_pair(mesh, motion, camera, float(psi_tilde), subdivide, mode)
        except DomainError as exc:
            raise type(exc)(f"sight angle #{k}: {exc}") from exc

    items = list(enumerate(sight_angles))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(work, items))
    else:
        pairs = [work(item) for item in items]
    return pairs, format_mismatch_csv(pairs)


def format_mismatch_csv(pairs: Sequence[FramePair]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MISMATCH_HEADER)
    for p in pairs:
        m = p.oracle.metadata
        writer.writerow(
            [f"{x:.17g}" for x in (m["psi_tilde"], m["T"], p.mismatch, m["phi_predicted"])]
        )
    return buf.getvalue()


# --- file output -----------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _svg_group(frame: Frame, stroke: str, dash: str = "") -> List[str]:
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    lines = [f'<g fill="none" stroke="{stroke}" stroke-width="0.004"{extra}>']
    polylines = frame.drawn_polylines
    for poly in polylines:
        coords = " ".join(f"{_fmt(frame.points[k, 0])},{_fmt(-frame.points[k, 1])}" for k in poly)
        lines.append(f'<polyline points="{coords}"/>')
    if not frame.polylines:
        for k in np.flatnonzero(frame.visible):
            x, y = frame.points[k]
            lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(-y)}" r="0.008" fill="{stroke}"/>')
    lines.append("</g>")
    return lines


def frame_to_svg(frame: Frame, overlay: Optional[Frame] = None) -> str:
    """SVG text; y is flipped so image-up is screen-up. ``overlay`` is drawn dashed in red."""
    m = frame.metadata
    head = (
        f"<!-- v={m['v']:.17g} psi_tilde={m['psi_tilde']:.17g} "
        f"T={m['T']:.17g} phi_predicted={m['phi_predicted']:.17g} -->"
    )
    lines = [
        head,
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1 -1 2 2" width="512" height="512">',
        '<rect x="-1" y="-1" width="2" height="2" fill="white"/>',
    ]
    lines += _svg_group(frame, "black")
    if overlay is not None:
        lines += _svg_group(overlay, "red", "0.02 0.01")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _to_pixels(points: np.ndarray, width: int, height: int) -> np.ndarray:
    scale = 0.5 * (width - 1)
    px = 0.5 * (width - 1) + points[:, 0] * scale
    py = 0.5 * (height - 1) - points[:, 1] * scale
    return np.stack([px, py], axis=-1)


def _draw_segment(img: np.ndarray, p: np.ndarray, q: np.ndarray, channels) -> None:
    h, w = img.shape[:2]
    n = int(math.ceil(max(abs(q[0] - p[0]), abs(q[1] - p[1]))))
    if n > 4 * (w + h):
        # clip absurdly long segments (points far outside the view) to a bounded sample count
        n = 4 * (w + h)
    s = np.linspace(0.0, 1.0, n + 1)
    xs = np.rint(p[0] + s * (q[0] - p[0])).astype(np.int64)
    ys = np.rint(p[1] + s * (q[1] - p[1])).astype(np.int64)
    keep = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
    for c in channels:
        img[ys[keep], xs[keep], c] = 255


def _draw_frame(img: np.ndarray, frame: Frame, channels) -> None:
    h, w = img.shape[:2]
    pix = _to_pixels(np.nan_to_num(frame.points), w, h)
    if not frame.polylines:
        for k in np.flatnonzero(frame.visible):
            _draw_segment(img, pix[k], pix[k], channels)
    for poly in frame.drawn_polylines:
        for a, b in zip(poly[:-1], poly[1:]):
            _draw_segment(img, pix[a], pix[b], channels)


def frame_to_ppm(frame: Frame, width: int, height: int, overlay: Optional[Frame] = None) -> bytes:
    """Binary P6 image: black background, white wireframe, overlay in the green channel."""
    img = np.zeros((height, width, 3), dtype=np.uint8)
    _draw_frame(img, frame, (0, 1, 2))
    if overlay is not None:
        _draw_frame(img, overlay, (1,))
    return f"P6\n{width} {height}\n255\n".encode("ascii") + img.tobytes()
