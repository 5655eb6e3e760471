"""Grayscale filter-grid rendering to standalone SVG."""

import math

import numpy as np

from .errors import ContractError


def render_grid_svg(matrix, cols, cell_px):
    """Render each column of a d x m matrix as a square grayscale tile.

    d must be a perfect square. Tiles are laid out row by row, `cols`
    per row, with no gaps; cell_px is the edge length of one tile in SVG
    user units. Every tile is min-max normalized on its own; constant
    tiles (all-zero columns included) come out uniform mid-gray.
    """
    M = np.asarray(matrix, dtype=np.float64)
    if M.ndim != 2:
        raise ContractError("expected a 2-D matrix of column filters")
    d, m = M.shape
    side = math.isqrt(d)
    if side * side != d:
        raise ContractError(f"column length {d} is not a perfect square")
    if cols < 1 or cell_px <= 0:
        raise ContractError("cols and cell_px must be positive")
    rows = -(-m // cols)
    px = cell_px / side
    width, height = cols * cell_px, rows * cell_px
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n',
    ]
    for idx in range(m):
        tile = M[:, idx].reshape(side, side)
        lo, hi = float(tile.min()), float(tile.max())
        x0 = (idx % cols) * cell_px
        y0 = (idx // cols) * cell_px
        for r in range(side):
            for c in range(side):
                if hi > lo:
                    level = int(round(255.0 * (tile[r, c] - lo) / (hi - lo)))
                else:
                    level = 128
                parts.append(
                    f'<rect x="{_fmt(x0 + c * px)}" y="{_fmt(y0 + r * px)}" '
                    f'width="{_fmt(px)}" height="{_fmt(px)}" '
                    f'fill="#{level:02x}{level:02x}{level:02x}"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def _fmt(x):
    return f"{x:.6g}"
