"""Occupancy rasters as binary PGM images with a text metadata sidecar.

Gray levels encode the probability that a cell is occupied (colored
black): 0 = certainly occupied, 255 = certainly free, linear in between.
Row 0 of the image is the top of the window (largest y), matching the
usual image convention.  The sidecar ``<path>.meta`` records the window
bounds and cell size so the raster can be georeferenced on load.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import GridSpec, Rect


@dataclass(frozen=True)
class RasterMeta:
    window: Rect
    cell_size: float

    def grid(self) -> GridSpec:
        return GridSpec(self.window, self.cell_size)


def _to_gray(prob_black: np.ndarray) -> np.ndarray:
    p = np.clip(np.asarray(prob_black, dtype=float), 0.0, 1.0)
    return np.round((1.0 - p) * 255.0).astype(np.uint8)


def write_pgm(path: str, prob_black: np.ndarray, grid: GridSpec,
              extra: dict[str, object] | None = None) -> None:
    """Write a probability-of-occupied raster indexed [iy, ix], y upward.

    ``extra`` entries are appended to the sidecar as ``key value`` lines
    (e.g. sample counts); they are informational and ignored on read.
    """
    gray = _to_gray(prob_black)
    ny, nx = gray.shape
    if (ny, nx) != (grid.ny, grid.nx):
        raise ValueError(f"raster shape {gray.shape} does not match grid "
                         f"({grid.ny}, {grid.nx})")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(gray[::-1].tobytes())  # flip so row 0 is the top
    w = grid.window
    with open(path + ".meta", "w", encoding="utf-8") as fh:
        fh.write(f"window {w.xmin!r} {w.ymin!r} {w.xmax!r} {w.ymax!r}\n")
        fh.write(f"cell_size {grid.cell_size!r}\n")
        for key, value in (extra or {}).items():
            fh.write(f"{key} {value}\n")


def read_pgm(path: str) -> tuple[np.ndarray, RasterMeta]:
    """Read a raster written by write_pgm: probability of occupied, y upward."""
    with open(path, "rb") as fh:
        data = fh.read()
    # Parse the three whitespace-separated header fields after the magic,
    # skipping '#' comments, then the single whitespace before pixel data.
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace byte before the pixel block
    nx, ny, maxval = fields
    if maxval != 255:
        raise ValueError(f"{path}: expected maxval 255, got {maxval}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=nx * ny, offset=pos)
    gray = pixels.reshape(ny, nx)[::-1]  # back to y-upward
    prob_black = 1.0 - gray.astype(float) / 255.0

    meta_path = path + ".meta"
    window = None
    cell = None
    with open(meta_path, "r", encoding="utf-8") as fh:
        for line in fh:
            toks = line.split()
            if not toks:
                continue
            if toks[0] == "window" and len(toks) == 5:
                window = Rect(*[float(t) for t in toks[1:5]])
            elif toks[0] == "cell_size" and len(toks) == 2:
                cell = float(toks[1])
    if window is None or cell is None:
        raise ValueError(f"{meta_path}: missing window or cell_size")
    meta = RasterMeta(window, cell)
    g = meta.grid()
    if (g.ny, g.nx) != (ny, nx):
        raise ValueError(f"{path}: image is {ny}x{nx} but metadata implies "
                         f"{g.ny}x{g.nx}")
    return prob_black, meta
