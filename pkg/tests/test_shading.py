import math

import numpy as np
import pytest

from conftest import make_heliostat, oriented, random_config, simple_trio, sun_at
from helioshade.linalg3 import Vec3, to_frame
from helioshade.shading import (
    Heliostat,
    cull,
    efficiency,
    orient,
    project_block,
    project_shadow,
)
from helioshade.solar import sun_vector


def up_facing(hid, x, y, z=0.0, w=10.0, h=10.0):
    """Heliostat whose normal is +z at zenith sun: receiver straight above."""
    return make_heliostat(hid, x, y, z, w, h, Vec3(x, y, z + 100.0))


ZENITH = sun_vector(math.pi / 2.0, 0.0)


def test_orient_zenith_bisector():
    h = orient(up_facing("a", 0.0, 0.0), ZENITH)
    assert (h.normal.x, h.normal.y, h.normal.z) == pytest.approx(
        (0.0, 0.0, 1.0), abs=1e-12
    )


def test_orient_reflection_law_and_planarity(rng):
    for _ in range(200):
        field, sun = random_config(rng)
        h = orient(field[0], sun)
        u_t = (h.aim - h.center).normalized()
        # reflect the incoming light about the normal; must head to the aim
        d = sun.u_s - 2.0 * sun.u_s.dot(h.normal) * h.normal
        assert math.hypot(d.x - u_t.x, d.y - u_t.y, d.z - u_t.z) < 1e-10
        plane_d = h.normal.dot(h.center)
        for c in h.corners:
            assert abs(h.normal.dot(c) - plane_d) < 1e-9
            assert abs(to_frame(h.frame, c).z) < 1e-9


def test_orient_rejects_heliostat_at_receiver():
    h = make_heliostat("x", 1.0, 2.0, 3.0, 10.0, 10.0, Vec3(1.0, 2.0, 3.0))
    with pytest.raises(ValueError, match="heliostat at receiver"):
        orient(h, ZENITH)


def test_shadow_vertical_drop():
    subject = orient(up_facing("s", 0.0, 0.0, 0.0), ZENITH)
    other = orient(up_facing("o", 2.0, 0.0, 5.0), ZENITH)
    quad = project_shadow(subject, other, ZENITH)
    assert quad is not None and quad.kind == "shadow"
    # map the local-frame ring back to plant coordinates: it must be the
    # occluder rectangle dropped straight down onto z = 0
    from helioshade.linalg3 import from_frame

    plant = [from_frame(subject.frame, Vec3(p.x, p.y, 0.0)) for p in quad.ring.ring]
    xs = sorted(p.x for p in plant)
    ys = sorted(p.y for p in plant)
    assert (xs[0], xs[-1]) == pytest.approx((-3.0, 7.0), abs=1e-9)
    assert (ys[0], ys[-1]) == pytest.approx((-5.0, 5.0), abs=1e-9)
    for p in plant:
        assert abs(p.z) < 1e-9


def test_shadow_perpendicular_discarded():
    subject = orient(up_facing("s", 0.0, 0.0), ZENITH)
    other = orient(up_facing("o", 2.0, 0.0, 5.0), ZENITH)
    grazing = sun_vector(1e-13, 0.0)  # u_s horizontal: n_c . u_s ~ 0
    assert project_shadow(subject, other, grazing) is None


def test_shadow_downstream_occluder_discarded():
    subject = orient(up_facing("s", 0.0, 0.0, 10.0), ZENITH)
    below = orient(up_facing("o", 0.0, 0.0, 2.0), ZENITH)
    assert project_shadow(subject, below, ZENITH) is None


def test_block_symmetric_occlusion():
    aim = Vec3(0.0, 0.0, 100.0)
    subject = orient(make_heliostat("s", 0.0, 0.0, 0.0, 10.0, 10.0, aim), ZENITH)
    other = orient(make_heliostat("o", 0.0, 0.0, 50.0, 4.0, 4.0, Vec3(0, 0, 150)), ZENITH)
    quad = project_block(subject, other)
    assert quad is not None and quad.kind == "block"
    cx = sum(p.x for p in quad.ring.ring) / len(quad.ring.ring)
    cy = sum(p.y for p in quad.ring.ring) / len(quad.ring.ring)
    assert (cx, cy) == pytest.approx((0.0, 0.0), abs=1e-9)


def test_block_requires_occluder_between_subject_and_receiver():
    aim = Vec3(0.0, 0.0, 100.0)
    subject = orient(make_heliostat("s", 0.0, 0.0, 50.0, 10.0, 10.0, aim), ZENITH)
    behind = orient(make_heliostat("o", 0.0, 0.0, 10.0, 10.0, 10.0, aim), ZENITH)
    assert project_block(subject, behind) is None
    beyond = orient(make_heliostat("o2", 0.0, 0.0, 120.0, 10.0, 10.0, Vec3(0, 0, 300)), ZENITH)
    # above the aim point's plane distance: no finite image from the
    # projection center
    assert project_block(subject, beyond) is None


class _FakeQuad:
    def __init__(self, pts):
        from helioshade.polygon2d import Point2, Polygon2

        self.ring = Polygon2([Point2(x, y) for x, y in pts])
        self.source_id = "f"
        self.kind = "shadow"


def test_cull_rules():
    subject = orient(up_facing("s", 0.0, 0.0), ZENITH)  # 10 x 10
    far_right = _FakeQuad([(6.0, 0.0), (8.0, 0.0), (8.0, 2.0), (6.0, 2.0)])
    assert not cull(subject, far_right)
    split_right = _FakeQuad([(6.0, 6.0), (8.0, 6.0), (8.0, -6.0), (6.0, -6.0)])
    assert not cull(subject, split_right)  # all corners right of +Lx/2
    central = _FakeQuad([(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])
    assert cull(subject, central)


def test_efficiency_empty_field():
    subject = orient(up_facing("s", 0.0, 0.0), ZENITH)
    r = efficiency(subject, [subject], ZENITH)
    assert r.efficiency == 1.0
    assert r.quads == ()


def test_efficiency_fully_occluded():
    aim = Vec3(0.0, 0.0, 100.0)
    subject = orient(make_heliostat("s", 0.0, 0.0, 0.0, 4.0, 4.0, aim), ZENITH)
    lid = orient(make_heliostat("o", 0.0, 0.0, 1.0, 40.0, 40.0, Vec3(0, 0, 101)), ZENITH)
    r = efficiency(subject, [subject, lid], ZENITH)
    assert r.efficiency == 0.0
    assert not r.residual.components


def test_efficiency_in_unit_interval_and_monotone_under_insertion(rng):
    for _ in range(30):
        field, sun = random_config(rng)
        field = oriented(field, sun)
        prev = 1.0
        for k in range(1, len(field) + 1):
            e = efficiency(field[0], field[:k], sun).efficiency
            assert 0.0 <= e <= 1.0
            assert e <= prev + 1e-9
            prev = e


def test_golden_simple_case():
    field = simple_trio()
    sun = sun_at(21, 12.0, 40.08)
    e_noon = efficiency(oriented(field, sun)[0], oriented(field, sun), sun).efficiency
    assert e_noon == pytest.approx(0.76, abs=0.02)
    sun = sun_at(21, 15.25, 40.08)
    f = oriented(field, sun)
    assert efficiency(f[0], f, sun).efficiency == pytest.approx(0.31, abs=0.03)
