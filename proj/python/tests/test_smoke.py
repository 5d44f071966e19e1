import math

import numpy as np
import pytest

nw = pytest.importorskip("neelwall")


@pytest.fixture(scope="module")
def wall():
    return nw.solve_static(L=40.0, n=512)


def test_local_wall_matches_closed_form():
    p = nw.solve_static(L=40.0, n=1024, mode="local")
    assert np.max(np.abs(p.theta - np.arcsin(np.tanh(p.x)))) < 1e-6
    assert abs(p.energy() - 2.0) < 1e-8


def test_static_wall_is_odd_and_monotone(wall):
    th = wall.theta
    assert wall.residual < 1e-8
    assert np.all(np.diff(th) > -1e-12)
    assert abs(wall.wall_position()) < 1e-10
    e = nw.energy(wall.L, wall.remainder)
    assert e["total"] == pytest.approx(wall.energy())
    assert e["stray"] > 0


def test_mobility_slope(wall):
    r = nw.mobility(wall, 1.0, [5e-4, 1e-3, -5e-4, -1e-3])
    assert not r["failures"]
    assert r["beta_measured"] == pytest.approx(r["beta_predicted"], rel=0.05)
    assert r["slope"] < 0


def test_traveling_wall(wall):
    m = nw.solve_traveling(wall, 1e-3)
    assert m.c < 0
    assert abs(m.c) < 2e-3


def test_pencil_and_mode():
    a, b = nw.pencil_roots(3.0, 1.0)
    for z in (a, b):
        assert abs(z * z + z + 3.0) < 1e-13
    u, v, ue, ve = nw.damped_mode(2.0, 1.0, 1e-3, 2.0)
    assert abs(u - ue) < 1e-6


def test_spectrum_of_L():
    p = nw.solve_static(L=40.0, n=256)
    s = nw.spectrum(p, "L")
    assert abs(s["lambda0"]) < 1e-4
    assert s["Lambda0"] > 0.5


def test_profile_round_trip(tmp_path, wall):
    path = str(tmp_path / "wall.neelw")
    nw.store_profile(path, wall)
    back = nw.load_profile(path)
    assert np.array_equal(back.remainder, wall.remainder)
    (tmp_path / "bad").write_bytes(b"XXXX\n")
    with pytest.raises(nw.FormatError):
        nw.load_profile(str(tmp_path / "bad"))


def test_region_function():
    assert nw.S_func(0.0, 1 + 2j, 1.0) == pytest.approx(abs(1 - 2j))
    assert nw.S_func(math.pi / 2, 1 + 2j, 1.0) == pytest.approx(abs(2 + 2j))
