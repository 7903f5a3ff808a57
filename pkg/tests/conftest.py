"""Shared fixtures: the two bundled demonstration layouts and helpers for
building heliostats and random test configurations."""

import math
import os

import numpy as np
import pytest

from helioshade.linalg3 import Vec3
from helioshade.shading import Heliostat, orient
from helioshade.solar import solar_position, sun_vector

LAYOUT_DIR = os.path.join(os.path.dirname(__file__), "..", "layouts")
SIMPLE_PAIR = os.path.join(LAYOUT_DIR, "simple_pair.txt")
REAL_SCENARIO = os.path.join(LAYOUT_DIR, "real_scenario.txt")

JAN_21 = 21


def make_heliostat(hid, x, y, z, w, h, aim):
    return Heliostat(id=hid, center=Vec3(x, y, z), width=w, height=h, aim=aim)


def simple_trio():
    """Subject on the plant axis, two symmetric neighbors, 100 m tower."""
    aim = Vec3(0.0, 0.0, 100.0)
    return [
        make_heliostat("c", 108.0, 0.0, 5.0, 10.0, 10.0, aim),
        make_heliostat("h1", 100.0, 8.0, 5.0, 10.0, 10.0, aim),
        make_heliostat("h2", 100.0, -8.0, 5.0, 10.0, 10.0, aim),
    ]


NEIGHBOR_XY = [
    (614.21, -126.29), (607.84, -153.31), (647.73, -163.37), (654.50, -134.57),
    (623.77, -172.05), (636.90, -116.27), (591.95, -135.48), (672.18, -153.84),
    (600.33, -179.84), (619.41, -98.828), (639.74, -191.65), (597.56, -109.09),
    (660.03, -105.31), (585.22, -161.42), (664.56, -183.31), (678.53, -123.87),
    (615.45, -199.18), (641.64, -87.72), (689.94, -174.02), (697.15, -143.34),
    (577.40, -186.87), (602.03, -82.30), (560.90, -146.37), (569.25, -110.83),
]


def real_scenario_heliostats():
    """Subject s plus its 24 production-plant neighbors, 150 m tower."""
    aim = Vec3(0.0, 0.0, 150.0)
    field = [make_heliostat("s", 630.93, -144.41, 5.0, 12.88, 9.489, aim)]
    for i, (x, y) in enumerate(NEIGHBOR_XY):
        field.append(make_heliostat(f"n{i + 1:02d}", x, y, 5.0, 12.88, 9.489, aim))
    return field


def sun_at(day, hour, latitude_deg):
    eta, theta = solar_position(day, hour, math.radians(latitude_deg))
    return sun_vector(eta, theta)


def oriented(field, sun):
    return [orient(h, sun) for h in field]


def random_config(rng):
    """Random subject + 1..10 occluders near its tower sight line + sun.

    Occluders are dropped between the subject and the tower with lateral
    scatter so shadow/block images frequently land on (and overlap) the
    subject mirror.
    """
    tower = Vec3(0.0, 0.0, float(rng.uniform(80.0, 160.0)))
    r = float(rng.uniform(60.0, 400.0))
    az = float(rng.uniform(-math.pi, math.pi))
    sx, sy = r * math.cos(az), r * math.sin(az)
    sw = float(rng.uniform(6.0, 14.0))
    sh = float(rng.uniform(5.0, 11.0))
    subject = make_heliostat("subject", sx, sy, 5.0, sw, sh, tower)
    field = [subject]
    n_occ = int(rng.integers(1, 11))
    for i in range(n_occ):
        frac = float(rng.uniform(0.02, 0.35))
        jx = float(rng.normal(0.0, 6.0))
        jy = float(rng.normal(0.0, 6.0))
        ox = sx * (1.0 - frac) + jx
        oy = sy * (1.0 - frac) + jy
        field.append(
            make_heliostat(
                f"occ{i}",
                ox,
                oy,
                5.0,
                float(rng.uniform(6.0, 14.0)),
                float(rng.uniform(5.0, 11.0)),
                tower,
            )
        )
    eta = float(rng.uniform(math.radians(8.0), math.radians(75.0)))
    theta = float(rng.uniform(-math.pi, math.pi))
    return field, sun_vector(eta, theta)


@pytest.fixture
def rng():
    return np.random.default_rng(20140109)
