"""Field layouts, layout file I/O, synthetic benchmark layouts and the
batch efficiency engine.

The batch engine vectorizes the projection and culling of all N-1
candidate occluders per subject with numpy; only the few surviving quads
go through the polygon clipper.  Results are deterministic and assembled
in heliostat order regardless of the worker count.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .clip import Region, difference, region_area
from .linalg3 import Vec3
from .polygon2d import Point2, Polygon2, ring_signed_area
from .shading import Heliostat, ProjectedQuad, _MIN_QUAD_AREA
from .solar import SunState

__all__ = [
    "HeliostatSpec",
    "FieldLayout",
    "FieldReport",
    "LayoutError",
    "load_layout",
    "save_layout",
    "synthetic_field",
    "evaluate_field",
    "format_report",
    "write_report",
]

_PERP_TOL = 1e-12


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class HeliostatSpec:
    id: str
    center: Vec3
    width: float
    height: float
    receiver: str
    spin: float = 0.0


@dataclass(frozen=True)
class FieldLayout:
    latitude_deg: float
    receivers: Tuple[Tuple[str, Vec3], ...]
    heliostats: Tuple[HeliostatSpec, ...]

    def receiver_map(self) -> Dict[str, Vec3]:
        return dict(self.receivers)

    def to_heliostats(self) -> List[Heliostat]:
        recv = self.receiver_map()
        return [
            Heliostat(
                id=h.id,
                center=h.center,
                width=h.width,
                height=h.height,
                aim=recv[h.receiver],
                spin=h.spin,
            )
            for h in self.heliostats
        ]

    def validate(self) -> None:
        recv = {}
        for rid, pos in self.receivers:
            if rid in recv:
                raise LayoutError(f"duplicate receiver id: {rid!r}")
            recv[rid] = pos
        seen = set()
        for h in self.heliostats:
            if h.id in seen:
                raise LayoutError(f"duplicate heliostat id: {h.id!r}")
            seen.add(h.id)
            if h.receiver not in recv:
                raise LayoutError(
                    f"heliostat {h.id!r} references unknown receiver {h.receiver!r}"
                )
            if h.width <= 0 or h.height <= 0:
                raise LayoutError(f"heliostat {h.id!r} has non-positive dimensions")
            if recv[h.receiver].z <= h.center.z:
                raise LayoutError(
                    f"heliostat {h.id!r}: receiver {h.receiver!r} not above center"
                )


@dataclass(frozen=True)
class HeliostatRecord:
    id: str
    efficiency: float
    area_reflecting: float
    area_total: float


@dataclass(frozen=True)
class FieldReport:
    sun: SunState
    date_label: str
    records: Tuple[HeliostatRecord, ...]
    average: float
    duration: float


# ---------------------------------------------------------------------------
# layout file format


def _parse_fields(parts: Sequence[str], lineno: int) -> Dict[str, str]:
    out = {}
    for part in parts:
        if "=" not in part:
            raise LayoutError(f"line {lineno}: malformed field {part!r}")
        key, value = part.split("=", 1)
        out[key] = value
    return out


def load_layout(path: str) -> FieldLayout:
    """Read a layout file; see the package README for the line format."""
    latitude: Optional[float] = None
    receivers: List[Tuple[str, Vec3]] = []
    heliostats: List[HeliostatSpec] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            kind = parts[0]
            try:
                fields = _parse_fields(parts[1:], lineno)
                if kind == "plant":
                    latitude = float(fields["lat"])
                elif kind == "receiver":
                    receivers.append(
                        (
                            fields["id"],
                            Vec3(float(fields["x"]), float(fields["y"]), float(fields["z"])),
                        )
                    )
                elif kind == "heliostat":
                    heliostats.append(
                        HeliostatSpec(
                            id=fields["id"],
                            center=Vec3(
                                float(fields["x"]), float(fields["y"]), float(fields["z"])
                            ),
                            width=float(fields["w"]),
                            height=float(fields["h"]),
                            receiver=fields["receiver"],
                            spin=float(fields.get("phi", "0.0")),
                        )
                    )
                else:
                    raise LayoutError(f"line {lineno}: unknown record type {kind!r}")
            except KeyError as exc:
                raise LayoutError(f"line {lineno}: missing field {exc}") from None
            except ValueError as exc:
                if isinstance(exc, LayoutError):
                    raise
                raise LayoutError(f"line {lineno}: {exc}") from None
    if latitude is None:
        raise LayoutError("missing 'plant lat=...' line")
    layout = FieldLayout(
        latitude_deg=latitude, receivers=tuple(receivers), heliostats=tuple(heliostats)
    )
    layout.validate()
    return layout


def save_layout(layout: FieldLayout, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"plant lat={layout.latitude_deg:.9g}\n")
        for rid, pos in layout.receivers:
            fh.write(
                f"receiver id={rid} x={pos.x:.9g} y={pos.y:.9g} z={pos.z:.9g}\n"
            )
        for h in layout.heliostats:
            line = (
                f"heliostat id={h.id} x={h.center.x:.9g} y={h.center.y:.9g} "
                f"z={h.center.z:.9g} w={h.width:.9g} h={h.height:.9g} "
                f"receiver={h.receiver}"
            )
            if h.spin != 0.0:
                line += f" phi={h.spin:.9g}"
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# synthetic benchmark layouts


@dataclass(frozen=True)
class RadialStaggerSpec:
    """Parameters of the deterministic radially staggered north field."""

    start_radius: float = 120.0
    radial_step: float = 17.0
    arc_spacing: float = 17.5
    sector_deg: float = 130.0
    mirror_width: float = 12.88
    mirror_height: float = 9.489
    pivot_height: float = 5.0
    tower_height: float = 150.0
    latitude_deg: float = 38.23
    seed: int = 1


def synthetic_field(n: int, spec: RadialStaggerSpec = RadialStaggerSpec()) -> FieldLayout:
    """Deterministic radially staggered layout with n heliostats.

    Stand-in for the unpublished benchmark field: concentric staggered
    arcs in a northern sector, spacing growing gently with radius, no
    overlapping mirrors.
    """
    if n < 1:
        raise LayoutError("synthetic field needs n >= 1")
    diag = math.hypot(spec.mirror_width, spec.mirror_height)
    if spec.radial_step <= diag or spec.arc_spacing <= diag:
        raise LayoutError("infeasible spacing: step must exceed mirror diagonal")
    rng = np.random.default_rng(spec.seed)
    sector = math.radians(spec.sector_deg)
    centers: List[Tuple[float, float]] = []
    ring = 0
    r = spec.start_radius
    while len(centers) < n:
        # radial pitch grows with radius so far rings keep clearing the
        # shallow sight lines to the tower
        if ring > 0:
            r += spec.radial_step * (1.0 + 0.25 * r / spec.tower_height)
        arc = spec.arc_spacing * (1.0 + 0.05 * ring / 10.0)
        d_az = arc / r
        count = max(1, int(sector / d_az))
        offset = 0.5 * d_az if ring % 2 else 0.0
        jitter = rng.uniform(-0.05, 0.05, size=count) * d_az
        for i in range(count):
            az = -sector / 2.0 + offset + i * d_az + jitter[i]
            if az > sector / 2.0:
                continue
            centers.append((r * math.cos(az), -r * math.sin(az)))
            if len(centers) >= n:
                break
        ring += 1
    pts = np.array(centers)
    if len(pts) > 1:
        # pairwise separation must exceed the mirror diagonal
        d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        np.fill_diagonal(d2, np.inf)
        if d2.min() <= diag * diag:
            raise LayoutError("infeasible spacing: generated mirrors overlap")
    heliostats = tuple(
        HeliostatSpec(
            id=f"h{i:04d}",
            center=Vec3(float(x), float(y), spec.pivot_height),
            width=spec.mirror_width,
            height=spec.mirror_height,
            receiver="tower",
        )
        for i, (x, y) in enumerate(centers)
    )
    layout = FieldLayout(
        latitude_deg=spec.latitude_deg,
        receivers=(("tower", Vec3(0.0, 0.0, spec.tower_height)),),
        heliostats=heliostats,
    )
    layout.validate()
    return layout


# ---------------------------------------------------------------------------
# batch engine


class OrientedField:
    """Immutable array view of a whole oriented field for one sun state."""

    def __init__(self, layout: FieldLayout, sun: SunState):
        helios = layout.to_heliostats()
        self.ids = [h.id for h in helios]
        self.sun = sun
        n = len(helios)
        self.n = n
        self.centers = np.array([h.center.as_array() for h in helios]).reshape(n, 3)
        self.aims = np.array([h.aim.as_array() for h in helios]).reshape(n, 3)
        self.dims = np.array([[h.width, h.height] for h in helios]).reshape(n, 2)
        spins = np.array([h.spin for h in helios])

        u_s = sun.u_s.as_array()
        to_t = self.aims - self.centers
        dist = np.linalg.norm(to_t, axis=1)
        if np.any(dist == 0.0):
            raise ValueError("heliostat at receiver")
        u_t = to_t / dist[:, None]
        n_raw = u_t - u_s
        self.normals = n_raw / np.linalg.norm(n_raw, axis=1)[:, None]

        nx, ny, nz = self.normals.T
        rho = np.hypot(nx, ny)
        alpha = np.where(rho > 0.0, np.arctan2(nx, -ny), 0.0)
        beta = np.arctan2(rho, nz)
        self.rotations = _rotations_zxz(alpha, beta, spins)

        hw = self.dims[:, 0] / 2.0
        hh = self.dims[:, 1] / 2.0
        local = np.stack(
            [
                np.stack([-hw, hh, np.zeros(n)], axis=1),
                np.stack([-hw, -hh, np.zeros(n)], axis=1),
                np.stack([hw, -hh, np.zeros(n)], axis=1),
                np.stack([hw, hh, np.zeros(n)], axis=1),
            ],
            axis=1,
        )  # (n, 4, 3)
        self.corners = (
            np.einsum("nji,naj->nai", self.rotations, local) + self.centers[:, None, :]
        )


def _rotations_zxz(alpha, beta, gamma) -> np.ndarray:
    """(n,3,3) stack of Rz(gamma) @ Rx(beta) @ Rz(alpha)."""
    n = len(alpha)
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    z = np.zeros(n)
    o = np.ones(n)
    rz_a = np.stack(
        [ca, sa, z, -sa, ca, z, z, z, o], axis=1
    ).reshape(n, 3, 3)
    rx_b = np.stack(
        [o, z, z, z, cb, sb, z, -sb, cb], axis=1
    ).reshape(n, 3, 3)
    rz_g = np.stack(
        [cg, sg, z, -sg, cg, z, z, z, o], axis=1
    ).reshape(n, 3, 3)
    return rz_g @ rx_b @ rz_a


def subject_quads(
    of: OrientedField, j: int, use_culling: bool = True
) -> List[ProjectedQuad]:
    """Surviving occluder quads for subject j, in field order (block
    before shadow per occluder), as polygons in the subject's local plane.

    Occluders entirely inside the valid projection region go through the
    vectorized fast path; the rare occluder straddling a region boundary
    is clipped in 3D by the scalar projection routines.
    """
    from .shading import block_image, shadow_image

    n_c = of.normals[j]
    x_c = of.centers[j]
    rot = of.rotations[j]
    hx, hy = of.dims[j] / 2.0
    plane_d = float(n_c @ x_c)
    u_s = of.sun.u_s.as_array()
    corners = of.corners  # (n, 4, 3)
    side = corners @ n_c - plane_d  # (n, 4), positive on the front side

    def local_xy(pts):
        return np.einsum("ij,naj->nai", rot, pts - x_c)[:, :, :2]

    # shadow projection along the light direction: only the part of the
    # occluder on the front side of the subject plane casts on the mirror
    denom_s = float(n_c @ u_s)
    if abs(denom_s) >= _PERP_TOL:
        shadow_full = np.all(side >= 0.0, axis=1)
        shadow_part = ~shadow_full & np.any(side >= 0.0, axis=1)
        t_s = -side / denom_s
        shadow_xy = local_xy(corners + t_s[:, :, None] * u_s)
    else:
        shadow_full = np.zeros(of.n, dtype=bool)
        shadow_part = shadow_full.copy()
        shadow_xy = np.zeros((of.n, 4, 2))

    # block projection from the aim point: a corner has a finite image
    # only inside the slab 0 < side < side(aim)
    side_t = float(n_c @ of.aims[j]) - plane_d
    if side_t > 0.0:
        upper = side_t * (1.0 - 1e-9)
        block_full = np.all((side > 0.0) & (side < upper), axis=1)
        block_part = (
            ~block_full
            & ~np.all(side <= 0.0, axis=1)
            & ~np.all(side >= upper, axis=1)
        )
        d = of.aims[j] - corners  # (n, 4, 3)
        dist = np.linalg.norm(d, axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            u_ta = d / dist[:, :, None]
            denom_b = u_ta @ n_c  # (n, 4)
            t_b = -side / denom_b
        block_full &= np.all(dist > 0.0, axis=1) & np.all(
            np.abs(denom_b) >= _PERP_TOL, axis=1
        )
        with np.errstate(invalid="ignore"):
            block_xy = local_xy(corners + t_b[:, :, None] * u_ta)
    else:
        block_full = np.zeros(of.n, dtype=bool)
        block_part = block_full.copy()
        block_xy = np.zeros((of.n, 4, 2))

    shadow_full[j] = shadow_part[j] = False
    block_full[j] = block_part[j] = False

    if use_culling:
        shadow_full &= ~_culled(shadow_xy, hx, hy)
        block_full &= ~_culled(block_xy, hx, hy)

    n_c_v = Vec3(float(n_c[0]), float(n_c[1]), float(n_c[2]))
    target_v = Vec3(
        float(of.aims[j][0]), float(of.aims[j][1]), float(of.aims[j][2])
    )

    def to_local(pts) -> np.ndarray:
        arr = np.array([p.as_array() for p in pts])
        return (arr - x_c) @ rot.T[:, :2]

    partial_any = shadow_part | block_part
    quads: List[ProjectedQuad] = []
    for i in range(of.n):
        ring_b = block_xy[i] if block_full[i] else None
        ring_s = shadow_xy[i] if shadow_full[i] else None
        if partial_any[i]:
            cs = [
                Vec3(float(c[0]), float(c[1]), float(c[2])) for c in corners[i]
            ]
            if block_part[i]:
                pts = block_image(cs, n_c_v, plane_d, target_v)
                if pts is not None:
                    r = to_local(pts)
                    if not use_culling or _keep(r, hx, hy):
                        ring_b = r
            if shadow_part[i]:
                pts = shadow_image(cs, n_c_v, plane_d, of.sun.u_s)
                if pts is not None:
                    r = to_local(pts)
                    if not use_culling or _keep(r, hx, hy):
                        ring_s = r
        if ring_b is not None:
            q = _quad_poly(ring_b)
            if q is not None:
                quads.append(ProjectedQuad(source_id=of.ids[i], kind="block", ring=q))
        if ring_s is not None:
            q = _quad_poly(ring_s)
            if q is not None:
                quads.append(ProjectedQuad(source_id=of.ids[i], kind="shadow", ring=q))
    return quads


def _keep(xy: np.ndarray, hx: float, hy: float) -> bool:
    xs, ys = xy[:, 0], xy[:, 1]
    return not (
        np.all(xs > hx) or np.all(xs < -hx) or np.all(ys > hy) or np.all(ys < -hy)
    )


def _culled(xy: np.ndarray, hx: float, hy: float) -> np.ndarray:
    xs = xy[:, :, 0]
    ys = xy[:, :, 1]
    return (
        np.all(xs > hx, axis=1)
        | np.all(xs < -hx, axis=1)
        | np.all(ys > hy, axis=1)
        | np.all(ys < -hy, axis=1)
    )


def _quad_poly(xy: np.ndarray) -> Optional[Polygon2]:
    from .clip import _collapse_ring

    ring = _collapse_ring([(float(x), float(y)) for x, y in xy])
    if len(ring) < 3:
        return None
    if abs(ring_signed_area(ring)) < _MIN_QUAD_AREA:
        return None
    if ring_signed_area(ring) < 0:
        ring = ring[::-1]
    return Polygon2(tuple(Point2(x, y) for x, y in ring))


def _subject_efficiency(of: OrientedField, j: int, use_culling: bool = True) -> float:
    hx, hy = of.dims[j] / 2.0
    outline = Polygon2(
        (Point2(-hx, hy), Point2(-hx, -hy), Point2(hx, -hy), Point2(hx, hy))
    )
    residual = Region.from_polygon(outline)
    for quad in subject_quads(of, j, use_culling=use_culling):
        residual = difference(residual, quad.ring)
        if not residual.components:
            break
    area = of.dims[j, 0] * of.dims[j, 1]
    return min(1.0, max(0.0, region_area(residual) / area))


_POOL_FIELD: Optional[OrientedField] = None


def _pool_init(of: OrientedField) -> None:
    global _POOL_FIELD
    _POOL_FIELD = of


def _pool_eval(args) -> float:
    j, use_culling = args
    return _subject_efficiency(_POOL_FIELD, j, use_culling)


def default_workers() -> int:
    return int(os.environ.get("HELIOSHADE_WORKERS", "1"))


def evaluate_field(
    layout: FieldLayout,
    sun: SunState,
    workers: Optional[int] = None,
    use_culling: bool = True,
    date_label: str = "",
) -> FieldReport:
    """Blocking-and-shadowing efficiency of every heliostat in the layout.

    Orientation happens once for the whole field; per-subject evaluations
    are independent and may fan out to a process pool.  Results are
    identical for any worker count.
    """
    if workers is None:
        workers = default_workers()
    start = time.perf_counter()
    of = OrientedField(layout, sun)
    n = of.n
    if n == 0:
        return FieldReport(sun=sun, date_label=date_label, records=(), average=1.0, duration=0.0)
    if workers > 1 and n > 1:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(workers, initializer=_pool_init, initargs=(of,)) as pool:
            effs = pool.map(_pool_eval, [(j, use_culling) for j in range(n)], chunksize=max(1, n // (4 * workers)))
    else:
        effs = [_subject_efficiency(of, j, use_culling) for j in range(n)]
    duration = time.perf_counter() - start
    records = tuple(
        HeliostatRecord(
            id=of.ids[j],
            efficiency=effs[j],
            area_reflecting=effs[j] * of.dims[j, 0] * of.dims[j, 1],
            area_total=of.dims[j, 0] * of.dims[j, 1],
        )
        for j in range(n)
    )
    average = sum(r.efficiency for r in records) / n
    return FieldReport(
        sun=sun, date_label=date_label, records=records, average=average, duration=duration
    )


def format_report(report: FieldReport, include_timing: bool = True) -> str:
    """Plain-text report: header, one line per heliostat, average last.

    All reals use 9 significant digits.  The timing line is the only
    run-dependent content; omit it when byte-stable output is needed.
    """
    lines = [
        f"# sun eta={math.degrees(report.sun.eta):.9g} "
        f"theta={math.degrees(report.sun.theta):.9g} deg",
        f"# date {report.date_label or 'n/a'}",
    ]
    if include_timing:
        lines.append(f"# elapsed {report.duration:.9g} s")
    lines.append("# id efficiency area_reflecting area_total")
    for r in report.records:
        lines.append(
            f"{r.id} {r.efficiency:.9g} {r.area_reflecting:.9g} {r.area_total:.9g}"
        )
    lines.append(f"# average {report.average:.9g}")
    return "\n".join(lines) + "\n"


def write_report(report: FieldReport, path: str, include_timing: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_report(report, include_timing=include_timing))
