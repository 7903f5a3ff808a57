"""Projection of neighbor mirrors onto the subject plane and the
iterative-subtraction efficiency computation.

For a subject mirror the occluders are projected corner by corner: along
the light direction for shadowing, toward the subject's aim point for
blocking.  The projected quads are culled cheaply, then subtracted one by
one from the subject outline; the efficiency is the surviving area over
the total mirror area.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .clip import Region, difference, region_area
from .linalg3 import HeliostatFrame, Vec3, frame_from_normal, from_frame, to_frame
from .polygon2d import Point2, Polygon2, signed_area
from .solar import SunState

__all__ = [
    "Heliostat",
    "ProjectedQuad",
    "EfficiencyResult",
    "orient",
    "project_shadow",
    "project_block",
    "cull",
    "efficiency",
]

# Projections with |n . u| below this are treated as perpendicular: the
# occluder edge-on to the subject casts no area.
_PERP_TOL = 1e-12

_MIN_QUAD_AREA = 1e-12


@dataclass(frozen=True)
class Heliostat:
    """Flat rectangular mirror: center, dimensions, aim point, spin angle.

    Orientation-dependent fields (normal, frame, plant-frame corners) are
    None until `orient` is called for a sun state.
    """

    id: str
    center: Vec3
    width: float  # L_x, m
    height: float  # L_y, m
    aim: Vec3
    spin: float = 0.0
    normal: Optional[Vec3] = None
    frame: Optional[HeliostatFrame] = None
    corners: Optional[Tuple[Vec3, ...]] = None

    def local_corners(self) -> Tuple[Vec3, ...]:
        """Corner coordinates in the local frame, counterclockwise."""
        hx, hy = self.width / 2.0, self.height / 2.0
        return (
            Vec3(-hx, hy, 0.0),
            Vec3(-hx, -hy, 0.0),
            Vec3(hx, -hy, 0.0),
            Vec3(hx, hy, 0.0),
        )

    def outline(self) -> Polygon2:
        """Subject polygon in its own plane (counterclockwise)."""
        return Polygon2(tuple(Point2(c.x, c.y) for c in self.local_corners()))

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class ProjectedQuad:
    source_id: str
    kind: str  # "shadow" | "block"
    ring: Polygon2  # in the subject's local plane


@dataclass(frozen=True)
class EfficiencyResult:
    subject_id: str
    efficiency: float
    residual: Region
    quads: Tuple[ProjectedQuad, ...]


def orient(h: Heliostat, sun: SunState) -> Heliostat:
    """Aim the mirror: normal along (u_t - u_s), frame and corners cached."""
    to_target = h.aim - h.center
    if to_target.norm() == 0.0:
        raise ValueError("heliostat at receiver")
    u_t = to_target.normalized()
    n = (u_t - sun.u_s).normalized()
    frame = frame_from_normal(n, h.spin, h.center)
    corners = tuple(from_frame(frame, c) for c in h.local_corners())
    return dataclasses.replace(h, normal=n, frame=frame, corners=corners)


def _clip_to_halfspace(
    pts: Sequence[Vec3], sides: Sequence[float]
) -> Tuple[List[Vec3], List[float]]:
    """Keep the part of a planar polygon with side value >= 0.

    `sides` are signed plane distances (up to a common factor); clipped
    edge crossings are interpolated.  Used when an occluder straddles the
    subject plane, where projecting the raw corners is meaningless.
    """
    out_p: List[Vec3] = []
    out_s: List[float] = []
    n = len(pts)
    for i in range(n):
        a, sa = pts[i], sides[i]
        b, sb = pts[(i + 1) % n], sides[(i + 1) % n]
        if sa >= 0.0:
            out_p.append(a)
            out_s.append(sa)
        if (sa > 0.0 and sb < 0.0) or (sa < 0.0 and sb > 0.0):
            t = sa / (sa - sb)
            out_p.append(a + t * (b - a))
            out_s.append(0.0)
    return out_p, out_s


def _quad_from_points(
    subject: Heliostat, pts: Sequence[Vec3], source_id: str, kind: str
) -> Optional[ProjectedQuad]:
    from .clip import _collapse_ring

    local = [to_frame(subject.frame, p) for p in pts]
    ring = _collapse_ring([(p.x, p.y) for p in local])
    if len(ring) < 3:
        return None
    poly = Polygon2(tuple(Point2(x, y) for x, y in ring))
    if abs(signed_area(poly)) < _MIN_QUAD_AREA:
        return None
    if signed_area(poly) < 0:
        poly = poly.reversed()
    return ProjectedQuad(source_id=source_id, kind=kind, ring=poly)


def project_shadow(
    subject: Heliostat, other: Heliostat, sun: SunState
) -> Optional[ProjectedQuad]:
    """Image of `other` on the subject plane along the light direction.

    None when the planes are mutually perpendicular to the light or the
    occluder sits entirely downstream of the subject (its shadow falls
    away from the mirror, never on it).
    """
    pts = shadow_image(
        list(other.corners), subject.normal, subject.normal.dot(subject.center), sun.u_s
    )
    if pts is None:
        return None
    return _quad_from_points(subject, pts, other.id, "shadow")


def shadow_image(
    corners: Sequence[Vec3], n_c: Vec3, plane_d: float, u_s: Vec3
) -> Optional[List[Vec3]]:
    """Plant-frame image of an occluder polygon along the light direction."""
    denom = n_c.dot(u_s)
    if abs(denom) < _PERP_TOL:
        return None
    sides = [n_c.dot(p) - plane_d for p in corners]
    if all(s < 0.0 for s in sides):
        return None
    if any(s < 0.0 for s in sides):
        # occluder straddles the subject plane: only the upstream part
        # casts a shadow on the mirror
        corners, sides = _clip_to_halfspace(corners, sides)
        if len(corners) < 3:
            return None
    return [p + (-s / denom) * u_s for p, s in zip(corners, sides)]


def project_block(subject: Heliostat, other: Heliostat) -> Optional[ProjectedQuad]:
    """Image of `other` on the subject plane as seen from the aim point.

    The projection center is the subject's aim point: the subject's
    reflected rays converge there, and `other` can only intercept them
    from between the subject plane and that point (projection parameter
    negative).  None when any sight line is perpendicular to the subject
    or the occluder lies behind the subject / beyond the receiver.
    """
    pts = block_image(
        list(other.corners),
        subject.normal,
        subject.normal.dot(subject.center),
        subject.aim,
    )
    if pts is None:
        return None
    return _quad_from_points(subject, pts, other.id, "block")


def block_image(
    corners: Sequence[Vec3], n_c: Vec3, plane_d: float, target: Vec3
) -> Optional[List[Vec3]]:
    """Plant-frame image of an occluder polygon projected from the aim point.

    A point q casts a finite image only inside the slab
    0 < side(q) < side(target): behind the subject plane it cannot block,
    and at or beyond the aim point's plane distance the image runs to
    infinity behind the projection center.  The occluder is clipped to
    that slab before projecting.
    """
    side_t = n_c.dot(target) - plane_d
    if side_t <= 0.0:
        return None
    upper = side_t * (1.0 - 1e-9)
    sides = [n_c.dot(p) - plane_d for p in corners]
    if any(s < 0.0 for s in sides):
        corners, sides = _clip_to_halfspace(corners, sides)
    if any(s > upper for s in sides):
        flipped = [upper - s for s in sides]
        corners, flipped = _clip_to_halfspace(list(corners), flipped)
        sides = [upper - s for s in flipped]
    if len(corners) < 3:
        return None
    if all(s <= 0.0 for s in sides):
        return None
    pts = []
    for p, s in zip(corners, sides):
        d = target - p
        dist = d.norm()
        if dist == 0.0:
            return None
        u_ta = d * (1.0 / dist)
        denom = n_c.dot(u_ta)
        if abs(denom) < _PERP_TOL:
            return None
        pts.append(p + (-s / denom) * u_ta)
    return pts


def cull(subject: Heliostat, quad: ProjectedQuad) -> bool:
    """Keep the quad unless all corners lie beyond one side of the mirror."""
    hx, hy = subject.width / 2.0, subject.height / 2.0
    xs = [p.x for p in quad.ring.ring]
    ys = [p.y for p in quad.ring.ring]
    if all(x > hx for x in xs) or all(x < -hx for x in xs):
        return False
    if all(y > hy for y in ys) or all(y < -hy for y in ys):
        return False
    return True


def candidate_quads(
    subject: Heliostat,
    field: Sequence[Heliostat],
    sun: SunState,
    use_culling: bool = True,
) -> List[ProjectedQuad]:
    """Projected block and shadow quads of every field mirror, in field
    order (block before shadow per occluder), optionally culled."""
    quads: List[ProjectedQuad] = []
    for other in field:
        if other.id == subject.id:
            continue
        for quad in (project_block(subject, other), project_shadow(subject, other, sun)):
            if quad is None:
                continue
            if use_culling and not cull(subject, quad):
                continue
            quads.append(quad)
    return quads


def efficiency(
    subject: Heliostat,
    field: Sequence[Heliostat],
    sun: SunState,
    use_culling: bool = True,
) -> EfficiencyResult:
    """Blocking-and-shadowing efficiency of `subject` against `field`.

    All heliostats must already be oriented for this sun state.  The
    residual region starts as the mirror outline and every surviving quad
    is subtracted in turn; the efficiency is its area over the mirror area.
    """
    quads = candidate_quads(subject, field, sun, use_culling=use_culling)
    residual = Region.from_polygon(subject.outline())
    for quad in quads:
        residual = difference(residual, quad.ring)
        if not residual.components:
            break
    e = region_area(residual) / subject.area
    e = min(1.0, max(0.0, e))
    return EfficiencyResult(
        subject_id=subject.id, efficiency=e, residual=residual, quads=tuple(quads)
    )
