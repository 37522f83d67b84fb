"""Deterministic grid numerics: quadrature, differentiation, eigensolver.

All coordinate-space data lives on a uniform `Grid` with an odd number of
points so composite Simpson applies without remainder panels.  Every
operation is a pure function of immutable inputs; nothing here keeps
state, so callers may evaluate concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import sturm_lowest

__all__ = [
    "Grid",
    "SampledFunction",
    "TridiagonalOperator",
    "make_grid",
    "simpson_weights",
    "integrate",
    "inner",
    "cumulative_integral",
    "derivative",
    "first_derivative",
    "second_derivative",
    "lowest_eigenvalues",
    "interior_window",
]


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform sample axis for all coordinate-space functions.

    Sample k sits at x_min + k*h exactly (computed by multiplication, so
    there is no accumulated drift), with h = (x_max - x_min)/(n_points - 1).
    n_points is odd so that Simpson panels tile the grid.
    """

    x_min: float
    x_max: float
    n_points: int
    x: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        samples = self.x_min + self.h * np.arange(self.n_points)
        samples.setflags(write=False)
        object.__setattr__(self, "x", samples)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid:
    """Validated Grid constructor.

    Raises
    ------
    ValueError
        If the range is invalid (x_min >= x_max or fewer than 3 points) or
        the point count is even.
    """
    if not x_min < x_max:
        raise ValueError(f"invalid range: need x_min < x_max, got [{x_min}, {x_max}]")
    if n_points < 3:
        raise ValueError(f"invalid range: need n_points >= 3, got {n_points}")
    if n_points % 2 == 0:
        raise ValueError(
            f"even point count: composite Simpson needs an odd n_points, got {n_points}"
        )
    return Grid(float(x_min), float(x_max), int(n_points))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Function samples over a Grid; length must equal grid.n_points."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {v.shape} does not match grid with {self.grid.n_points} points"
            )
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix: one diagonal, one off-diagonal band."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=np.float64)
        e = np.asarray(self.off_diagonal, dtype=np.float64)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diagonal must be a non-empty 1-D real vector")
        if e.shape != (d.size - 1,):
            raise ValueError(
                f"off_diagonal length {e.shape} must be diagonal length minus one ({d.size - 1})"
            )
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def size(self) -> int:
        return self.diagonal.size


def simpson_weights(grid: Grid) -> np.ndarray:
    """Composite Simpson weights (h/3)*(1, 4, 2, ..., 2, 4, 1)."""
    w = np.ones(grid.n_points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (grid.h / 3.0)


def integrate(f: SampledFunction):
    """Composite-Simpson integral over the full grid; exact for cubics."""
    val = simpson_weights(f.grid) @ f.values
    return complex(val) if np.iscomplexobj(f.values) else float(val)


def inner(f: SampledFunction, g: SampledFunction):
    """Quadrature inner product <f|g> = integral of conj(f)*g."""
    fg, gg = f.grid, g.grid
    if fg is not gg and (fg.x_min, fg.x_max, fg.n_points) != (gg.x_min, gg.x_max, gg.n_points):
        raise ValueError("inner product requires functions on the same grid")
    fv = np.conj(f.values) if np.iscomplexobj(f.values) else f.values
    val = simpson_weights(f.grid) @ (fv * g.values)
    return complex(val) if np.iscomplexobj(val) else float(val)


def cumulative_integral(f: SampledFunction) -> SampledFunction:
    """Running integral I(x_k) from x_min, with I(x_min) = 0.

    Even prefixes are composite Simpson; odd prefixes append a trapezoid
    panel (local O(h^3) error, negligible against the global tolerance).
    The last sample therefore reproduces integrate(f) exactly.
    """
    v = np.asarray(f.values, dtype=np.result_type(f.values, np.float64))
    out = np.zeros_like(v)
    h = f.grid.h
    panels = (h / 3.0) * (v[0:-2:2] + 4.0 * v[1:-1:2] + v[2::2])
    out[2::2] = np.cumsum(panels)
    out[1::2] = out[0:-1:2] + (h / 2.0) * (v[0:-1:2] + v[1::2])
    return SampledFunction(f.grid, out)


def first_derivative(values: np.ndarray, h: float, order: int = 2) -> np.ndarray:
    """Finite-difference d/dx on uniformly sampled values.

    order=2: central differences, one-sided second order at the ends.
    order=4: five-point central stencil, one-sided fourth order at the ends
    (used where a quadrature-grade derivative is needed).
    """
    v = np.asarray(values, dtype=np.result_type(values, np.float64))
    if v.size < (3 if order == 2 else 5):
        raise ValueError(f"order-{order} first derivative needs at least {3 if order == 2 else 5} samples")
    out = np.empty_like(v)
    if order == 2:
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
        return out
    if order == 4:
        out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
        out[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
        out[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h)
        out[-2] = (3.0 * v[-1] + 10.0 * v[-2] - 18.0 * v[-3] + 6.0 * v[-4] - v[-5]) / (12.0 * h)
        out[-1] = (25.0 * v[-1] - 48.0 * v[-2] + 36.0 * v[-3] - 16.0 * v[-4] + 3.0 * v[-5]) / (12.0 * h)
        return out
    raise ValueError(f"unsupported stencil order {order}; use 2 or 4")


def second_derivative(values: np.ndarray, h: float, order: int = 2) -> np.ndarray:
    """Finite-difference d^2/dx^2; order 2 (3-point) or 4 (5-point)."""
    v = np.asarray(values, dtype=np.result_type(values, np.float64))
    if v.size < (4 if order == 2 else 6):
        raise ValueError(f"order-{order} second derivative needs at least {4 if order == 2 else 6} samples")
    out = np.empty_like(v)
    h2 = h * h
    if order == 2:
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h2
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h2
        return out
    if order == 4:
        out[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2] + 16.0 * v[3:-1] - v[4:]) / (12.0 * h2)
        # one-sided fourth order needs six points
        out[0] = (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4] - 10.0 * v[5]) / (12.0 * h2)
        out[1] = (10.0 * v[0] - 15.0 * v[1] - 4.0 * v[2] + 14.0 * v[3] - 6.0 * v[4] + v[5]) / (12.0 * h2)
        out[-2] = (10.0 * v[-1] - 15.0 * v[-2] - 4.0 * v[-3] + 14.0 * v[-4] - 6.0 * v[-5] + v[-6]) / (12.0 * h2)
        out[-1] = (45.0 * v[-1] - 154.0 * v[-2] + 214.0 * v[-3] - 156.0 * v[-4] + 61.0 * v[-5] - 10.0 * v[-6]) / (12.0 * h2)
        return out
    raise ValueError(f"unsupported stencil order {order}; use 2 or 4")


def derivative(f: SampledFunction) -> SampledFunction:
    """Second-order d/dx: central interior, one-sided at the endpoints."""
    return SampledFunction(f.grid, first_derivative(f.values, f.grid.h, order=2))


def interior_window(n_points: int, fraction: float = 0.05) -> slice:
    """Index window excluding a boundary fraction on each side."""
    margin = int(np.ceil(fraction * n_points))
    return slice(margin, n_points - margin)


def lowest_eigenvalues(T: TridiagonalOperator, k: int, backend: str | None = None) -> np.ndarray:
    """k smallest eigenvalues of T, ascending, to 1e-10 relative accuracy.

    Sturm-sequence bisection (see kernels); no external solver involved,
    so results are reproducible bit for bit.
    """
    if not 1 <= k <= T.size:
        raise ValueError(f"k out of range: need 1 <= k <= {T.size}, got {k}")
    return sturm_lowest(T.diagonal, T.off_diagonal, int(k), backend=backend)
