"""Uniform tensor-product grids on boxes with zero Dirichlet boundary.

Fields store interior nodal values only; the boundary value 0 is implicit.
Derivatives live on the dual cell lattice: axis ``i`` with ``n_i`` interior
nodes has ``n_i + 1`` cells, and the forward difference along ``i`` (averaged
over the transverse axes so every component is collocated at cell centers) is
exact for affine data away from the boundary layer.  Midpoint quadrature over
the same cells pairs with these gradients at second order for smooth fields.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, ContractError, ParameterError

_AXIS_LABELS = ("x", "y", "z")


class Grid:
    """Uniform grid on (0, L_1) x ... x (0, L_d), d in {1, 2, 3}, with u = 0 on
    the boundary.

    ``resolution[i]`` counts interior nodes on axis ``i``, so the spacing is
    ``h_i = L_i / (n_i + 1)``; node ``j`` sits at ``(j + 1) h_i`` and cell
    ``c`` spans ``[c h_i, (c + 1) h_i]``.
    """

    __slots__ = ("dim", "extents", "resolution", "spacing")

    def __init__(self, dim, extents, resolution):
        if dim not in (1, 2, 3):
            raise ConfigurationError(f"dim must be 1, 2 or 3, got {dim!r}")
        extents = tuple(float(L) for L in np.atleast_1d(extents))
        resolution = tuple(int(n) for n in np.atleast_1d(resolution))
        if len(extents) != dim:
            raise ConfigurationError(
                f"expected {dim} extents, got {len(extents)}")
        if len(resolution) != dim:
            raise ConfigurationError(
                f"expected {dim} resolution entries, got {len(resolution)}")
        for i, L in enumerate(extents):
            if not (np.isfinite(L) and L > 0.0):
                raise ConfigurationError(
                    f"extent along axis {i} ({_AXIS_LABELS[i]}) must be positive, got {L}")
        for i, n in enumerate(resolution):
            if n < 2:
                raise ConfigurationError(
                    f"resolution along axis {i} ({_AXIS_LABELS[i]}) must be >= 2, got {n}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "spacing",
                           tuple(L / (n + 1) for L, n in zip(extents, resolution)))

    def __setattr__(self, name, value):
        raise AttributeError("Grid is immutable")

    @property
    def node_count(self) -> int:
        """Total number of interior nodes."""
        return int(np.prod(self.resolution))

    @property
    def cell_shape(self) -> tuple[int, ...]:
        """Shape of the dual cell lattice, ``n_i + 1`` cells per axis."""
        return tuple(n + 1 for n in self.resolution)

    @property
    def cell_volume(self) -> float:
        """Volume of one cell, the midpoint quadrature weight."""
        return float(np.prod(self.spacing))

    def axis_nodes(self, axis: int) -> np.ndarray:
        """Interior node coordinates along ``axis``."""
        self._check_axis(axis)
        h = self.spacing[axis]
        return h * np.arange(1, self.resolution[axis] + 1)

    def axis_cell_centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along ``axis`` (includes boundary cells)."""
        self._check_axis(axis)
        h = self.spacing[axis]
        return h * (np.arange(self.resolution[axis] + 1) + 0.5)

    def node_mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of all interior nodes, ``ij`` indexing."""
        return tuple(np.meshgrid(*(self.axis_nodes(i) for i in range(self.dim)),
                                 indexing="ij"))

    def _check_axis(self, axis: int) -> None:
        if not 0 <= axis < self.dim:
            raise ParameterError(f"axis {axis} invalid for a {self.dim}d grid")

    def __eq__(self, other):
        return (isinstance(other, Grid)
                and self.dim == other.dim
                and self.extents == other.extents
                and self.resolution == other.resolution)

    def __hash__(self):
        return hash((self.dim, self.extents, self.resolution))

    def __repr__(self):
        return (f"Grid(dim={self.dim}, extents={self.extents}, "
                f"resolution={self.resolution})")


def build_grid(dim: int, extents, resolution) -> Grid:
    """Build a grid, validating dimension, extents and per-axis resolution."""
    return Grid(dim, extents, resolution)


class Field:
    """Interior nodal values of a function on a :class:`Grid`.

    Values are stored as a read-only array shaped like ``grid.resolution``;
    the implicit boundary value is 0, which is what puts the discrete function
    in the zero-trace space every operator family works in.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.asarray(values, dtype=float)
        if arr.shape != grid.resolution:
            if arr.size == grid.node_count:
                arr = arr.reshape(grid.resolution)
            else:
                raise ContractError(
                    f"field has {arr.size} values, grid has {grid.node_count} nodes")
        if not np.all(np.isfinite(arr)):
            raise ContractError("field values must be finite")
        arr = np.array(arr)  # defensive copy, then freeze
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)

    @classmethod
    def _wrap(cls, grid: Grid, arr: np.ndarray) -> "Field":
        """Wrap a freshly allocated array without copying (internal use)."""
        obj = object.__new__(cls)
        arr.setflags(write=False)
        object.__setattr__(obj, "grid", grid)
        object.__setattr__(obj, "values", arr)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    def scaled(self, t: float) -> "Field":
        return Field._wrap(self.grid, t * self.values)

    def __neg__(self) -> "Field":
        return self.scaled(-1.0)

    def __repr__(self):
        return f"Field(grid={self.grid!r}, |values|_max={np.abs(self.values).max():.3g})"


def zero_field(grid: Grid) -> Field:
    return Field._wrap(grid, np.zeros(grid.resolution))


def field_from_function(grid: Grid, fn) -> Field:
    """Sample ``fn(x)`` / ``fn(x, y)`` / ``fn(x, y, z)`` at the interior nodes."""
    return Field(grid, fn(*grid.node_mesh()))


class GradientField:
    """Cell-centered derivative components of a field, one array per axis."""

    __slots__ = ("grid", "components")

    def __init__(self, grid: Grid, components):
        components = tuple(np.asarray(c, dtype=float) for c in components)
        if len(components) != grid.dim:
            raise ContractError(
                f"expected {grid.dim} components, got {len(components)}")
        for c in components:
            if c.shape != grid.cell_shape:
                raise ContractError(
                    f"component shape {c.shape} does not match cell lattice {grid.cell_shape}")
            c.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):
        raise AttributeError("GradientField is immutable")


def _pad_zeros(values: np.ndarray, axis: int) -> np.ndarray:
    pad = [(0, 0)] * values.ndim
    pad[axis] = (1, 1)
    return np.pad(values, pad)


def axis_derivative_cells(grid: Grid, values: np.ndarray, axis: int) -> np.ndarray:
    """Forward difference along ``axis`` averaged onto the cell lattice.

    The zero boundary rows enter the difference along ``axis`` and the pair
    averages along every transverse axis, so the result has ``n_i + 1``
    entries per axis.
    """
    d = axis_edge_differences(grid, values, axis)
    return transverse_cell_average(grid, d, axis)


def axis_edge_differences(grid: Grid, values: np.ndarray, axis: int) -> np.ndarray:
    """Raw forward differences along ``axis`` on that axis's edge lattice.

    The result has ``n_i + 1`` entries along ``axis`` and ``n_j`` along every
    other axis; no transverse averaging is applied.
    """
    return np.diff(_pad_zeros(values, axis), axis=axis) / grid.spacing[axis]


def transverse_cell_average(grid: Grid, edge_values: np.ndarray, axis: int) -> np.ndarray:
    """Average edge data of ``axis`` onto the cell lattice (pair means with
    zero extension along every transverse axis)."""
    out = np.asarray(edge_values, dtype=float)
    for j in range(grid.dim):
        if j == axis:
            continue
        padded = _pad_zeros(out, j)
        lo = [slice(None)] * grid.dim
        hi = [slice(None)] * grid.dim
        lo[j] = slice(0, -1)
        hi[j] = slice(1, None)
        out = 0.5 * (padded[tuple(lo)] + padded[tuple(hi)])
    return out


def transverse_cell_average_adjoint(grid: Grid, cell_values: np.ndarray,
                                    axis: int) -> np.ndarray:
    """Adjoint of :func:`transverse_cell_average`: spread cell weights back to
    the edge lattice of ``axis``."""
    out = np.asarray(cell_values, dtype=float)
    for j in range(grid.dim):
        if j == axis:
            continue
        lo = [slice(None)] * grid.dim
        hi = [slice(None)] * grid.dim
        lo[j] = slice(0, -1)
        hi[j] = slice(1, None)
        out = 0.5 * (out[tuple(lo)] + out[tuple(hi)])
    return out


def axis_edge_differences_adjoint(grid: Grid, edge_values: np.ndarray,
                                  axis: int) -> np.ndarray:
    """Adjoint of :func:`axis_edge_differences` in the unweighted dot product."""
    h = grid.spacing[axis]
    lo = [slice(None)] * grid.dim
    hi = [slice(None)] * grid.dim
    lo[axis] = slice(0, -1)
    hi[axis] = slice(1, None)
    arr = np.asarray(edge_values, dtype=float)
    return (arr[tuple(lo)] - arr[tuple(hi)]) / h


def axis_square_cells(grid: Grid, values: np.ndarray, axis: int) -> np.ndarray:
    """Cell-collocated squared derivative: transverse average of (d_i u)^2.

    Squares are averaged, not the differences themselves: averaging signed
    differences first would cancel transverse sawtooth oscillations and give
    the discrete energy spurious flat directions in d >= 2.
    """
    d = axis_edge_differences(grid, values, axis)
    return transverse_cell_average(grid, d * d, axis)


def axis_product_cells(grid: Grid, u_values: np.ndarray, v_values: np.ndarray,
                       axis: int) -> np.ndarray:
    """Cell-collocated product of derivatives: transverse average of
    (d_i u)(d_i v); the exact derivative of :func:`axis_square_cells`."""
    du = axis_edge_differences(grid, u_values, axis)
    dv = axis_edge_differences(grid, v_values, axis)
    return transverse_cell_average(grid, du * dv, axis)


def axis_derivative_cells_adjoint(grid: Grid, cell_values: np.ndarray, axis: int) -> np.ndarray:
    """Adjoint of :func:`axis_derivative_cells` in the unweighted dot product.

    Needed wherever a cell quantity multiplying ``D_i v`` must be turned into
    a nodal one: ``sum(q * D_i v) == sum(adjoint(q) * v)`` for all nodal ``v``.
    """
    spread = transverse_cell_average_adjoint(grid, cell_values, axis)
    return axis_edge_differences_adjoint(grid, spread, axis)


def gradient(u: Field) -> GradientField:
    """Cell-centered gradient of a field; identically zero for the zero field."""
    comps = tuple(axis_derivative_cells(u.grid, u.values, i)
                  for i in range(u.grid.dim))
    return GradientField(u.grid, comps)


def integrate(grid: Grid, cell_values) -> float:
    """Midpoint-rule integral of data living on the cell lattice."""
    arr = np.asarray(cell_values, dtype=float)
    if arr.shape != grid.cell_shape:
        raise ContractError(
            f"cell data shape {arr.shape} does not match cell lattice {grid.cell_shape}")
    return float(arr.sum() * grid.cell_volume)


def integrate_nodal(grid: Grid, nodal_values) -> float:
    """Integral of nodal data under the cell-averaging quadrature.

    Averaging nodal values (zero on the boundary) onto cells and applying
    :func:`integrate` collapses to volume-weighted nodal summation, because
    every interior node meets exactly ``2**d`` cells.
    """
    arr = np.asarray(nodal_values, dtype=float)
    if arr.shape != grid.resolution:
        raise ContractError(
            f"nodal data shape {arr.shape} does not match grid {grid.resolution}")
    return float(arr.sum() * grid.cell_volume)


def gradient_square_cells(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Cell-collocated |grad u|^2 as the sum of per-axis averaged squares."""
    return sum(axis_square_cells(grid, values, i) for i in range(grid.dim))


def seminorm(u: Field, p: float) -> float:
    """Gradient seminorm ``(integral |grad u|^p)^(1/p)``; zero iff ``u == 0``.

    |grad u| per cell is assembled from the averaged squared differences, so
    for p = 2 this is exactly the classical nearest-neighbor Dirichlet form.
    """
    if not p > 1.0:
        raise ParameterError(f"seminorm exponent must exceed 1, got {p}")
    g2 = gradient_square_cells(u.grid, u.values)
    total = float(np.sum(g2 ** (p / 2.0)) * u.grid.cell_volume)
    return total ** (1.0 / p)


def axis_norm(u: Field, axis: int, p: float) -> float:
    """Single-axis derivative norm ``(integral |d_i u|^p)^(1/p)``."""
    u.grid._check_axis(axis)
    if not p > 1.0:
        raise ParameterError(f"axis norm exponent must exceed 1, got {p}")
    s = axis_square_cells(u.grid, u.values, axis)
    total = float(np.sum(s ** (p / 2.0)) * u.grid.cell_volume)
    return total ** (1.0 / p)


_CSV_HEADERS = ("x,u", "x,y,u", "x,y,z,u")


def dump_field_csv(u: Field, path) -> None:
    """Write ``x[,y[,z]],u`` rows, row-major over axes, 17 significant digits."""
    grid = u.grid
    coords = [grid.axis_nodes(i) for i in range(grid.dim)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_CSV_HEADERS[grid.dim - 1] + "\n")
        for idx in np.ndindex(grid.resolution):
            row = [f"{coords[i][idx[i]]:.17g}" for i in range(grid.dim)]
            row.append(f"{u.values[idx]:.17g}")
            fh.write(",".join(row) + "\n")


def load_field_csv(grid: Grid, path) -> Field:
    """Read a field dump back onto ``grid``; 17-digit rows round-trip exactly."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != _CSV_HEADERS[grid.dim - 1]:
            raise ContractError(f"unexpected field CSV header {header!r}")
        data = [line.strip().split(",") for line in fh if line.strip()]
    if len(data) != grid.node_count:
        raise ContractError(
            f"field CSV has {len(data)} rows, grid has {grid.node_count} nodes")
    values = np.empty(grid.resolution)
    coords = [grid.axis_nodes(i) for i in range(grid.dim)]
    tol = 1e-9 * min(grid.spacing)
    for row, idx in zip(data, np.ndindex(grid.resolution)):
        for i in range(grid.dim):
            if abs(float(row[i]) - coords[i][idx[i]]) > tol:
                raise ContractError(
                    f"row coordinate {row[i]} does not match grid node {coords[i][idx[i]]}")
        values[idx] = float(row[grid.dim])
    return Field(grid, values)
