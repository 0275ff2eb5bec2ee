"""
Rasterization of planar shapes with holes onto node grids.

Shapes are described by signed distances (positive inside the outer region,
non-negative inside the hole). Nodes sit at integer multiples of h, so the
origin and the edges of axis-aligned rectangles are grid nodes.
"""

import math
import logging
from pathlib import Path
from typing import Callable, Tuple

import numpy as np
from scipy import ndimage

from src.models.entities import (
    BoundaryLayout,
    CellClass,
    GridDomain,
    Metric,
    ShapeKind,
    ShapeSpec,
)
from src.utils.validators import GeometryError, ParameterError, ResolutionError, require

logger = logging.getLogger(__name__)

# Nodes of clearance around the outer bounding box
MARGIN = 2
MIN_SEPARATION_CELLS = 2
MIN_HOLE_CELLS = 4

# 4-neighbourhood
CROSS = ndimage.generate_binary_structure(2, 1)

DIMENSION_COUNT = {
    ShapeKind.DISK: 1,
    ShapeKind.RECTANGLE: 2,
    ShapeKind.ANNULUS: 2,
    ShapeKind.DISK_MINUS_SQUARE: 2,
    ShapeKind.ELLIPSE_ANNULUS: 3,
}

SignedDistance = Callable[[np.ndarray, np.ndarray], np.ndarray]


def parse_shape(
    text: str,
    offset: float = 0.0,
    layout: BoundaryLayout = BoundaryLayout.INNER_NEUMANN_OUTER_DIRICHLET,
) -> ShapeSpec:
    """Parse ``kind:d1,d2,...`` into a ShapeSpec.

    Examples: ``disk:1``, ``rectangle:1,1``, ``annulus:1,0.3``,
    ``disk-minus-square:1,0.4``, ``ellipse-annulus:1.2,0.8,0.25``.
    """
    kind_text, _, dims_text = text.partition(":")
    try:
        kind = ShapeKind(kind_text.strip())
    except ValueError:
        known = ", ".join(k.value for k in ShapeKind)
        raise ParameterError(f"unknown shape '{kind_text}' (expected one of {known})")
    try:
        dims = tuple(float(d) for d in dims_text.split(",") if d.strip())
    except ValueError:
        raise ParameterError(f"shape dimensions must be numbers (got '{dims_text}')")

    spec = ShapeSpec(kind=kind, dims=dims, hole_offset=float(offset), layout=layout)
    validate_shape(spec)
    return spec


def validate_shape(shape: ShapeSpec) -> None:
    """Check dimension counts and positivity for a shape."""
    expected = DIMENSION_COUNT[shape.kind]
    require(len(shape.dims) == expected,
            f"{shape.kind.value} takes {expected} dimension(s) (got {len(shape.dims)})")
    require(all(d > 0 and math.isfinite(d) for d in shape.dims),
            f"shape dimensions must be positive (got {shape.dims})")
    require(shape.hole_offset == 0.0 or shape.has_hole,
            f"{shape.kind.value} has no hole to offset")


def _signed_distances(shape: ShapeSpec) -> Tuple[SignedDistance, SignedDistance, Tuple[float, float, float, float]]:
    """Signed distance to the outer region, to the hole, and the outer bounding box."""
    d = shape.dims
    c = shape.hole_offset

    def no_hole(X, Y):
        return np.full(X.shape, -np.inf)

    if shape.kind is ShapeKind.DISK:
        R = d[0]
        return (lambda X, Y: R - np.hypot(X, Y)), no_hole, (-R, R, -R, R)

    if shape.kind is ShapeKind.RECTANGLE:
        a, b = d
        return (lambda X, Y: np.minimum(np.minimum(X, a - X), np.minimum(Y, b - Y))), no_hole, (0.0, a, 0.0, b)

    if shape.kind is ShapeKind.ANNULUS:
        R, r_in = d
        return (lambda X, Y: R - np.hypot(X, Y)), (lambda X, Y: r_in - np.hypot(X - c, Y)), (-R, R, -R, R)

    if shape.kind is ShapeKind.DISK_MINUS_SQUARE:
        R, side = d
        half = side / 2.0
        return (
            (lambda X, Y: R - np.hypot(X, Y)),
            (lambda X, Y: half - np.maximum(np.abs(X - c), np.abs(Y))),
            (-R, R, -R, R),
        )

    a, b, r_in = d

    # (1 - rho) * min(a, b) bounds the distance to the ellipse from below
    def ellipse(X, Y):
        return (1.0 - np.sqrt((X / a) ** 2 + (Y / b) ** 2)) * min(a, b)

    return ellipse, (lambda X, Y: r_in - np.hypot(X - c, Y)), (-a, a, -b, b)


def build_domain(
    shape: ShapeSpec,
    h: float,
    metric: Metric = Metric.FLAT,
) -> GridDomain:
    """Rasterize a shape onto a node grid of spacing h.

    Interior nodes lie strictly inside the outer region and strictly outside
    the hole. Every non-interior 4-neighbour of an interior node is a
    boundary node; its component (outer or hole) and the shape's layout
    decide whether it is Dirichlet or Neumann.

    Args:
        shape: Shape with boundary layout
        h: Grid spacing
        metric: Flat, or the unit sphere in stereographic coordinates

    Returns:
        GridDomain

    Raises:
        GeometryError: hole touching the outer boundary, disconnected
            interior, or no Dirichlet node
        ResolutionError: hole narrower than 4 cells
    """
    validate_shape(shape)
    require(h > 0 and math.isfinite(h), f"grid spacing must be positive (got {h})")

    outer, hole, (x_min, x_max, y_min, y_max) = _signed_distances(shape)
    i0 = int(math.floor(x_min / h)) - MARGIN
    i1 = int(math.ceil(x_max / h)) + MARGIN
    j0 = int(math.floor(y_min / h)) - MARGIN
    j1 = int(math.ceil(y_max / h)) + MARGIN
    x = h * np.arange(i0, i1 + 1)
    y = h * np.arange(j0, j1 + 1)
    X, Y = np.meshgrid(x, y)

    sd_outer = outer(X, Y)
    sd_hole = hole(X, Y)
    interior = (sd_outer > 0) & (sd_hole < 0)
    hole_class = (sd_hole >= 0) & (sd_outer > 0)

    if shape.has_hole:
        _check_hole(shape, h, sd_outer, sd_hole)

    labels, components = ndimage.label(interior, structure=CROSS)
    if components != 1:
        raise GeometryError(f"interior of {shape.kind.value} has {components} connected components")

    boundary = ndimage.binary_dilation(interior, structure=CROSS) & ~interior
    on_hole = boundary & (sd_hole >= 0)
    on_outer = boundary & ~on_hole

    cell_class = np.full(X.shape, CellClass.EXTERIOR.value, dtype=np.int8)
    cell_class[interior] = CellClass.INTERIOR.value
    if shape.layout is BoundaryLayout.INNER_NEUMANN_OUTER_DIRICHLET:
        cell_class[on_outer] = CellClass.DIRICHLET.value
        cell_class[on_hole] = CellClass.NEUMANN.value
    elif shape.layout is BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN:
        cell_class[on_outer] = CellClass.NEUMANN.value
        cell_class[on_hole] = CellClass.DIRICHLET.value
    else:
        cell_class[boundary] = CellClass.NEUMANN.value

    dirichlet_count = int(np.sum(cell_class == CellClass.DIRICHLET.value))
    if dirichlet_count == 0 and shape.layout is not BoundaryLayout.NEUMANN_ONLY:
        raise GeometryError(
            f"{shape.kind.value} with layout {shape.layout.value} has no Dirichlet boundary"
        )

    domain = GridDomain(
        nx=len(x),
        ny=len(y),
        h=float(h),
        cell_class=cell_class,
        hole_class=hole_class,
        metric=metric,
        origin=(float(x[0]), float(y[0])),
        shape=shape,
    )
    logger.debug(
        f"  {shape.kind.value} {shape.dims} at h={h:g}: {int(interior.sum())} interior, "
        f"{dirichlet_count} Dirichlet, {int(np.sum(cell_class == CellClass.NEUMANN.value))} Neumann"
    )
    return domain


def _check_hole(shape: ShapeSpec, h: float, sd_outer: np.ndarray, sd_hole: np.ndarray) -> None:
    inside_hole = sd_hole >= 0
    if not inside_hole.any() or 2.0 * float(np.max(sd_hole)) < MIN_HOLE_CELLS * h:
        width = 2.0 * max(float(np.max(sd_hole)), 0.0)
        raise ResolutionError(
            f"hole of {shape.kind.value} is {width:.4g} wide, "
            f"below {MIN_HOLE_CELLS} cells at h={h:g}"
        )
    separation = float(np.min(sd_outer[inside_hole]))
    if separation < MIN_SEPARATION_CELLS * h:
        raise GeometryError(
            f"hole of {shape.kind.value} comes within {separation:.4g} of the outer boundary "
            f"(needs {MIN_SEPARATION_CELLS} cells at h={h:g})"
        )


def count_hole_components(domain: GridDomain) -> int:
    """Number of 4-connected hole components of a domain."""
    _, components = ndimage.label(domain.hole_class, structure=CROSS)
    return int(components)


def export_domain_pgm(domain: GridDomain, path: str) -> Path:
    """Write the cell classification as a plain (P2) PGM image.

    Gray levels: exterior 0, Neumann 96, Dirichlet 160, interior 255. The
    first image row is the largest y.
    """
    levels = np.zeros(domain.cell_class.shape, dtype=int)
    levels[domain.mask(CellClass.NEUMANN)] = 96
    levels[domain.mask(CellClass.DIRICHLET)] = 160
    levels[domain.interior] = 255

    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = [" ".join(str(v) for v in row) for row in levels[::-1]]
    out.write_text(f"P2\n{domain.nx} {domain.ny}\n255\n" + "\n".join(rows) + "\n")
    logger.info(f"Wrote domain mask to {out}")
    return out
