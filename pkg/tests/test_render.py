import json
import math
import os

import numpy as np
import pytest

from siegellab.maps import Sine, ZExp
from siegellab.render import (CLASS_BOUNDED, CLASS_ESCAPING, CLASS_TRAP_BASE,
                              TrapSpec, Window, classify_orbit, default_palette,
                              flat_palette, raster_to_rgb, render_dynamical,
                              render_parameter, write_image, write_ppm)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_window_pixel_centers_layout():
    w = Window(0j, 2.0, 2.0)
    grid = w.pixel_centers(4, 4)
    assert grid.shape == (4, 4)
    # top row has the largest imaginary part
    assert grid[0, 0].imag > grid[-1, 0].imag
    assert grid[0, 0].real < grid[0, -1].real
    # row slicing matches the full grid
    rows = w.pixel_centers(4, 4, 1, 3)
    assert np.array_equal(rows, grid[1:3])


def test_classify_escaping_and_trapped():
    f = Sine(GOLDEN)
    rec = classify_orbit(f, 10j, 100, 50.0)
    assert rec.kind == "escaping"
    f2 = ZExp(0.5)
    cv = f2.singular_data().critical_values[0]
    rec2 = classify_orbit(f2, cv, 500, 1e6, traps=TrapSpec(((0j, 0.05),)))
    assert rec2.kind == "trapped"
    assert rec2.trap_id == 0
    assert rec2.iterations < 200


def test_classify_bounded():
    f = Sine(GOLDEN)
    seed = f.singular_data().critical_values[0]
    rec = classify_orbit(f, seed, 300, 50.0)
    assert rec.kind == "bounded"


def test_classify_real_lambda_orbits_bounded():
    # for real lam > 0 the map sends (-inf, 0) into [-lam/e, 0), so the
    # critical orbit can never escape; lam=4 converges to the fixed point
    # -2 ln 2 and lam=8 to the 2-cycle {-2 ln 2, -4 ln 2}
    for lam in (4.0, 8.0):
        f = ZExp(lam)
        cv = f.singular_data().critical_values[0]
        rec = classify_orbit(f, cv, 300, 1e6)
        assert rec.kind == "bounded"
    z = -2 * math.log(2.0)
    assert abs(ZExp(4.0)(z) - z) < 1e-12
    f8 = ZExp(8.0)
    assert abs(f8(f8(z)) - z) < 1e-12


def test_render_dynamical_classes():
    f = Sine(GOLDEN)
    raster = render_dynamical(f, Window(0j, 6.0, 6.0), 32, 32, max_iter=60)
    assert raster.cls.shape == (32, 32)
    assert np.any(raster.cls == CLASS_ESCAPING)
    assert np.any(raster.cls == CLASS_BOUNDED)


def test_render_traps_marked():
    f = ZExp(0.5)
    raster = render_dynamical(f, Window(-0.3 + 0j, 1.0, 1.0), 24, 24,
                              max_iter=300, traps=TrapSpec(((0j, 0.05),)))
    assert np.any(raster.cls == CLASS_TRAP_BASE)


def test_render_deterministic_across_workers():
    f = Sine(GOLDEN)
    win = Window(0j, 6.0, 6.0)
    rasters = [render_dynamical(f, win, 48, 48, max_iter=80, workers=k)
               for k in (1, 4, 8)]
    for r in rasters[1:]:
        assert np.array_equal(rasters[0].cls, r.cls)
        assert np.array_equal(rasters[0].iters, r.iters)


def test_render_parameter_smoke():
    raster = render_parameter(Window(10.55 + 2.95j, 1.2, 1.2), 24, 24,
                              max_iter=100, escape_radius=1e6)
    assert raster.cls.shape == (24, 24)
    assert raster.meta["kind"] == "parameter"


def test_palettes():
    cls = np.array([[CLASS_BOUNDED, CLASS_ESCAPING], [CLASS_TRAP_BASE, CLASS_ESCAPING]],
                   dtype=np.int16)
    iters = np.array([[100, 3], [7, 50]], dtype=np.int32)
    rgb = default_palette(cls, iters, 100)
    assert rgb.shape == (2, 2, 3)
    assert rgb.dtype == np.uint8
    flat = flat_palette({CLASS_BOUNDED: (1, 2, 3)})
    rgb2 = flat(cls, iters, 100)
    assert tuple(rgb2[0, 0]) == (1, 2, 3)


def test_write_ppm_exact_bytes(tmp_path):
    rgb = np.zeros((2, 3, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 0, 0)
    path = str(tmp_path / "img.ppm")
    write_ppm(rgb, path)
    data = open(path, "rb").read()
    assert data == b"P6\n3 2\n255\n" + rgb.tobytes()


def test_write_image_sidecar(tmp_path):
    f = Sine(GOLDEN)
    raster = render_dynamical(f, Window(0j, 4.0, 4.0), 16, 16, max_iter=30)
    path = str(tmp_path / "out.ppm")
    write_image(raster, path=path)
    assert os.path.exists(path)
    meta = json.load(open(path + ".json"))
    assert meta["max_iter"] == 30
    assert meta["family"] == "sine"
