"""Tile-parallel escape/trap rasterization of dynamical and parameter planes.

Every pixel is classified independently, so the raster is byte-identical for
any tile size or worker count.  "Bounded" honestly conflates Siegel material,
Julia points and slow escapers: the Fatou/Julia distinction is not decidable
by finite iteration, and the sidecar metadata says so.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .maps import MapFamily, Sine, ZExp

CLASS_BOUNDED = 0
CLASS_ESCAPING = 1
CLASS_TRAP_BASE = 2  # trap j has class code 2 + j

#: Family-specific defaults: sine escapes decisively (growth ~ e^{|Im z|}/2),
#: while z*exp orbits can wander far along the negative axis before escaping.
DEFAULT_ESCAPE_RADIUS = {"sine": 50.0, "zexp": 1e6, "expaffine": 1e6}
DEFAULT_MAX_ITER = 1000

BOUNDED_NOTE = ("class 'bounded' conflates Siegel disk material, Julia points and "
                "slow escapers; finite iteration cannot separate them")


@dataclass(frozen=True)
class Window:
    """Axis-aligned view rectangle with exact, invertible pixel-center mapping."""

    center: complex
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("window extents must be positive")

    def pixel_centers(self, px_w: int, px_h: int, row0: int = 0, row1: int | None = None
                      ) -> np.ndarray:
        """Complex coordinates of pixel centers for rows row0..row1 (top row first)."""
        if row1 is None:
            row1 = px_h
        xs = self.center.real - self.width / 2 + (np.arange(px_w) + 0.5) * (self.width / px_w)
        ys = self.center.imag + self.height / 2 - (np.arange(row0, row1) + 0.5) * (
            self.height / px_h)
        return xs[None, :] + 1j * ys[:, None]


@dataclass(frozen=True)
class TrapSpec:
    """Disks absorbing orbits of attracting targets: list of (center, radius)."""

    disks: tuple = ()

    def __iter__(self):
        return iter(self.disks)

    def __len__(self):
        return len(self.disks)


@dataclass
class Raster:
    width: int
    height: int
    cls: np.ndarray    # int16, class codes per pixel
    iters: np.ndarray  # int32, first escape/trap step; max_iter for bounded
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CellRecord:
    kind: str          # "bounded" | "escaping" | "trapped"
    iterations: int
    trap_id: int | None = None


def classify_orbit(family: MapFamily, z0: complex, max_iter: int, escape_radius: float,
                   traps: TrapSpec | None = None) -> CellRecord:
    """Scalar orbit classification; identical rules to the raster kernels."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    traps = traps or TrapSpec()
    arr = np.array([z0], dtype=complex)
    cls, iters = _iterate(family.eval_array, arr, max_iter, escape_radius, traps)
    return _cell(int(cls[0]), int(iters[0]))


def _cell(code: int, n: int) -> CellRecord:
    if code == CLASS_BOUNDED:
        return CellRecord("bounded", n)
    if code == CLASS_ESCAPING:
        return CellRecord("escaping", n)
    return CellRecord("trapped", n, code - CLASS_TRAP_BASE)


def _iterate(step, z0: np.ndarray, max_iter: int, escape_radius: float,
             traps: TrapSpec) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized escape/trap iteration over a flat or 2-d array of seeds."""
    z = np.array(z0, dtype=complex)
    shape = z.shape
    z = z.ravel()
    cls = np.full(z.shape, CLASS_BOUNDED, dtype=np.int16)
    iters = np.full(z.shape, max_iter, dtype=np.int32)
    active = np.ones(z.shape, dtype=bool)
    for n in range(max_iter + 1):
        if not active.any():
            break
        za = z[active]
        bad = ~(np.isfinite(za.real) & np.isfinite(za.imag)) | (np.abs(za) > escape_radius)
        newly = np.zeros(za.shape, dtype=bool)
        if bad.any():
            idx = np.flatnonzero(active)[bad]
            cls[idx] = CLASS_ESCAPING
            iters[idx] = n
            newly |= bad
        for j, (c, r) in enumerate(traps):
            hit = (np.abs(za - c) <= r) & ~newly
            if hit.any():
                idx = np.flatnonzero(active)[hit]
                cls[idx] = CLASS_TRAP_BASE + j
                iters[idx] = n
                newly |= hit
        if newly.any():
            act_idx = np.flatnonzero(active)
            active[act_idx[newly]] = False
        if n == max_iter:
            break
        alive = np.flatnonzero(active)
        if len(alive):
            z[alive] = step(z[alive])
    return cls.reshape(shape), iters.reshape(shape)


def _render_tiled(kernel, px_w: int, px_h: int, meta: dict, workers: int = 1,
                  tile_rows: int = 64) -> Raster:
    cls = np.empty((px_h, px_w), dtype=np.int16)
    iters = np.empty((px_h, px_w), dtype=np.int32)
    tiles = [(r, min(r + tile_rows, px_h)) for r in range(0, px_h, tile_rows)]

    def run(tile):
        r0, r1 = tile
        c, it = kernel(r0, r1)
        cls[r0:r1] = c
        iters[r0:r1] = it

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, tiles))
    else:
        for t in tiles:
            run(t)
    return Raster(px_w, px_h, cls, iters, meta)


def render_dynamical(family: MapFamily, window: Window, px_w: int, px_h: int,
                     max_iter: int = DEFAULT_MAX_ITER, escape_radius: float | None = None,
                     traps: TrapSpec | None = None, workers: int = 1,
                     tile_rows: int = 64) -> Raster:
    """Classify the orbit of every pixel center under the map."""
    if escape_radius is None:
        escape_radius = DEFAULT_ESCAPE_RADIUS.get(family.name, 50.0)
    traps = traps or TrapSpec()

    def kernel(r0, r1):
        seeds = window.pixel_centers(px_w, px_h, r0, r1)
        return _iterate(family.eval_array, seeds, max_iter, escape_radius, traps)

    meta = {
        "kind": "dynamical",
        "family": family.name,
        "params": _family_params(family),
        "window": {"center": [window.center.real, window.center.imag],
                   "width": window.width, "height": window.height},
        "size": [px_w, px_h],
        "max_iter": max_iter,
        "escape_radius": escape_radius,
        "traps": [[c.real, c.imag, r] for c, r in traps] if len(traps) else [],
        "note": BOUNDED_NOTE,
    }
    return _render_tiled(kernel, px_w, px_h, meta, workers, tile_rows)


#: Default parameter-plane window: chosen by experiment (the paper gives no
#: coordinates); it contains a small Mandelbrot-like island of bounded
#: critical orbits well outside the unit circle.
DEFAULT_PARAMETER_WINDOW = Window(10.55 + 2.95j, 1.2, 1.2)


def render_parameter(window: Window, px_w: int, px_h: int,
                     max_iter: int = DEFAULT_MAX_ITER, escape_radius: float = 1e6,
                     workers: int = 1, tile_rows: int = 64) -> Raster:
    """Parameter plane of lam * z * e^z: iterate the free critical orbit.

    For each pixel lam, the orbit starts at the critical value -lam/e (the
    asymptotic value 0 is a fixed point, so the critical orbit is the only
    free singular orbit).
    """
    def kernel(r0, r1):
        lam = window.pixel_centers(px_w, px_h, r0, r1)
        z0 = -lam / math.e
        return _iterate_parameter(lam.ravel(), z0.ravel(), max_iter, escape_radius,
                                  lam.shape)

    meta = {
        "kind": "parameter",
        "family": "zexp",
        "window": {"center": [window.center.real, window.center.imag],
                   "width": window.width, "height": window.height},
        "size": [px_w, px_h],
        "max_iter": max_iter,
        "escape_radius": escape_radius,
        "note": BOUNDED_NOTE,
    }
    return _render_tiled(kernel, px_w, px_h, meta, workers, tile_rows)


def _iterate_parameter(lam: np.ndarray, z0: np.ndarray, max_iter: int,
                       escape_radius: float, shape) -> tuple[np.ndarray, np.ndarray]:
    z = z0.copy()
    cls = np.full(z.shape, CLASS_BOUNDED, dtype=np.int16)
    iters = np.full(z.shape, max_iter, dtype=np.int32)
    active = np.ones(z.shape, dtype=bool)
    for n in range(max_iter + 1):
        if not active.any():
            break
        za = z[active]
        bad = ~(np.isfinite(za.real) & np.isfinite(za.imag)) | (np.abs(za) > escape_radius)
        if bad.any():
            idx = np.flatnonzero(active)[bad]
            cls[idx] = CLASS_ESCAPING
            iters[idx] = n
            active[idx] = False
        if n == max_iter:
            break
        alive = np.flatnonzero(active)
        if len(alive):
            with np.errstate(over="ignore", invalid="ignore"):
                z[alive] = lam[alive] * z[alive] * np.exp(z[alive])
    return cls.reshape(shape), iters.reshape(shape)


def _family_params(family: MapFamily) -> dict:
    if isinstance(family, Sine):
        return {"theta": family.theta}
    if isinstance(family, ZExp):
        return {"lambda": [family.lam.real, family.lam.imag]}
    return {"lambda": [family.lam.real, family.lam.imag]}


# -- image output --------------------------------------------------------------


def default_palette(cls: np.ndarray, iters: np.ndarray, max_iter: int) -> np.ndarray:
    """Deterministic RGB mapping: bounded yellow, traps blue/green, escapes graded gray."""
    h, w = cls.shape
    rgb = np.zeros((h, w, 3), dtype=np.uint8)
    bounded = cls == CLASS_BOUNDED
    rgb[bounded] = (255, 215, 0)
    esc = cls == CLASS_ESCAPING
    if esc.any():
        shade = np.sqrt(np.clip(iters[esc] / max(max_iter, 1), 0.0, 1.0))
        g = (255 * (1.0 - 0.85 * shade)).astype(np.uint8)
        rgb[esc] = np.stack([g, g, g], axis=-1)
    trap_colors = [(30, 90, 200), (30, 180, 90), (200, 60, 150), (230, 140, 30)]
    for j in range(4):
        m = cls == CLASS_TRAP_BASE + j
        rgb[m] = trap_colors[j % len(trap_colors)]
    return rgb


def flat_palette(mapping: dict) -> "callable":
    """Palette from a fixed class->RGB dict, e.g. {CLASS_BOUNDED: (255, 255, 0)}."""
    def palette(cls, iters, max_iter):
        rgb = np.zeros((*cls.shape, 3), dtype=np.uint8)
        for code, color in mapping.items():
            rgb[cls == code] = color
        return rgb
    return palette


def raster_to_rgb(raster: Raster, palette=None) -> np.ndarray:
    palette = palette or default_palette
    return palette(raster.cls, raster.iters, raster.meta.get("max_iter", DEFAULT_MAX_ITER))


def write_ppm(rgb: np.ndarray, path: str) -> None:
    """Binary PPM (P6), bit-exact: header then raw RGB rows."""
    h, w, _ = rgb.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def write_image(raster: Raster, palette=None, path: str = "out.ppm",
                png: bool = False) -> None:
    """Write PPM (and optionally PNG) plus a JSON sidecar with all parameters."""
    rgb = raster_to_rgb(raster, palette)
    try:
        write_ppm(rgb, path)
        if png:
            from PIL import Image
            Image.fromarray(rgb).save(_with_suffix(path, ".png"))
        with open(path + ".json", "w") as fh:
            json.dump(raster.meta, fh, indent=2, sort_keys=True)
    except OSError as exc:
        raise IOError(f"could not write image to {path}: {exc}") from exc


def _with_suffix(path: str, suffix: str) -> str:
    stem = path.rsplit(".", 1)[0] if "." in path.rsplit("/", 1)[-1] else path
    return stem + suffix
