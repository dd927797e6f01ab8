"""Uniform grids, immutable discrete fields and finite-difference operators.

Node ordering for 2D fields is frozen: ``index = i1 * n2 + i2``.  Differential
operators return 0 on boundary nodes; solvers pin those rows to Dirichlet data.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"Grid1D needs a < b, got a={self.a}, b={self.b}")
        if self.n < 3:
            raise ValueError(f"Grid1D needs n >= 3, got {self.n}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    def refined(self) -> "Grid1D":
        """Same interval with every cell halved (2n - 1 nodes)."""
        return Grid1D(self.a, self.b, 2 * self.n - 1)


@dataclass(frozen=True)
class Grid2D:
    x1min: float
    x1max: float
    x2min: float
    x2max: float
    n1: int
    n2: int

    def __post_init__(self):
        if not (self.x1min < self.x1max and self.x2min < self.x2max):
            raise ValueError("Grid2D needs x1min < x1max and x2min < x2max")
        if self.n1 < 3 or self.n2 < 3:
            raise ValueError(f"Grid2D needs n1, n2 >= 3, got {self.n1}, {self.n2}")

    @property
    def h1(self) -> float:
        return (self.x1max - self.x1min) / (self.n1 - 1)

    @property
    def h2(self) -> float:
        return (self.x2max - self.x2min) / (self.n2 - 1)

    @property
    def x1(self) -> np.ndarray:
        return np.linspace(self.x1min, self.x1max, self.n1)

    @property
    def x2(self) -> np.ndarray:
        return np.linspace(self.x2min, self.x2max, self.n2)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays of shape (n1, n2)."""
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    def boundary_mask(self) -> np.ndarray:
        m = np.zeros(self.shape, dtype=bool)
        m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
        return m

    def refined(self) -> "Grid2D":
        return Grid2D(self.x1min, self.x1max, self.x2min, self.x2max,
                      2 * self.n1 - 1, 2 * self.n2 - 1)

    def contains(self, p1: float, p2: float, tol: float = 1e-12) -> bool:
        s1 = tol * max(1.0, abs(self.x1min), abs(self.x1max))
        s2 = tol * max(1.0, abs(self.x2min), abs(self.x2max))
        return (self.x1min - s1 <= p1 <= self.x1max + s1
                and self.x2min - s2 <= p2 <= self.x2max + s2)


def _frozen(values, n: int) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.size != n:
        raise ValueError(f"expected {n} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("field values must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Field1D:
    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, self.grid.n))

    @classmethod
    def from_function(cls, grid: Grid1D, fn) -> "Field1D":
        return cls(grid, fn(grid.x))

    def __call__(self, x):
        """Piecewise-linear interpolant (exact at nodes)."""
        return np.interp(x, self.grid.x, self.values)


@dataclass(frozen=True)
class Field2D:
    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, self.grid.size))

    @classmethod
    def from_function(cls, grid: Grid2D, fn) -> "Field2D":
        X1, X2 = grid.mesh()
        return cls(grid, np.broadcast_to(fn(X1, X2), grid.shape))

    def as_array(self) -> np.ndarray:
        """Read-only (n1, n2) view; axis 0 is x1."""
        return self.values.reshape(self.grid.shape)


@dataclass(frozen=True)
class SolverConfig:
    abs_tol: float = 1e-10
    max_newton_iters: int = 30
    damping_min: float = 1.0 / 64.0
    linsolve_tol: float = 1e-10
    clamp_bound: float = 10.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be >= 1")
        if not 0 < self.damping_min <= 1:
            raise ValueError("damping_min must lie in (0, 1]")
        if not self.linsolve_tol > 0:
            raise ValueError("linsolve_tol must be positive")
        if not self.clamp_bound > 0:
            raise ValueError("clamp_bound must be positive")


# ---------------------------------------------------------------------------
# operators


def second_derivative_1d(f: Field1D) -> Field1D:
    v = f.values
    out = np.zeros_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / f.grid.h ** 2
    return Field1D(f.grid, out)


def laplacian_2d(f: Field2D) -> Field2D:
    g = f.grid
    u = f.as_array()
    out = np.zeros(g.shape)
    out[1:-1, 1:-1] = ((u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / g.h1 ** 2
                       + (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / g.h2 ** 2)
    return Field2D(g, out)


def _second_difference_matrix(n: int, h: float) -> sp.csr_matrix:
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    d2 = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    d2[0, :] = 0.0
    d2[n - 1, :] = 0.0
    return (d2 / h ** 2).tocsr()


def laplacian_matrix(grid: Grid2D) -> sp.csr_matrix:
    """Sparse 5-point Laplacian in frozen ordering with zero boundary rows."""
    d1 = _second_difference_matrix(grid.n1, grid.h1)
    d2 = _second_difference_matrix(grid.n2, grid.h2)
    L = sp.kron(d1, sp.identity(grid.n2)) + sp.kron(sp.identity(grid.n1), d2)
    interior = (~grid.boundary_mask()).reshape(-1).astype(float)
    return (sp.diags(interior) @ L).tocsr()


def sample(f: Field2D, p1: float, p2: float) -> float:
    """Bilinear interpolation of ``f`` at the point (p1, p2)."""
    return float(sample_many(f, np.array([p1]), np.array([p2]))[0])


def sample_many(f: Field2D, p1, p2) -> np.ndarray:
    g = f.grid
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    s1 = 1e-12 * max(1.0, abs(g.x1min), abs(g.x1max))
    s2 = 1e-12 * max(1.0, abs(g.x2min), abs(g.x2max))
    if (np.any(p1 < g.x1min - s1) or np.any(p1 > g.x1max + s1)
            or np.any(p2 < g.x2min - s2) or np.any(p2 > g.x2max + s2)):
        raise ValueError("sample point outside grid rectangle")
    r1 = np.clip((p1 - g.x1min) / g.h1, 0.0, g.n1 - 1)
    r2 = np.clip((p2 - g.x2min) / g.h2, 0.0, g.n2 - 1)
    i1 = np.minimum(np.floor(r1).astype(int), g.n1 - 2)
    i2 = np.minimum(np.floor(r2).astype(int), g.n2 - 2)
    t1 = r1 - i1
    t2 = r2 - i2
    u = f.as_array()
    return ((1 - t1) * (1 - t2) * u[i1, i2] + t1 * (1 - t2) * u[i1 + 1, i2]
            + (1 - t1) * t2 * u[i1, i2 + 1] + t1 * t2 * u[i1 + 1, i2 + 1])


def sup_norm(f: Field1D | Field2D) -> float:
    return float(np.max(np.abs(f.values)))


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def l2_norm_scaled(f: Field1D | Field2D) -> float:
    """Grid-weighted L2 norm with trapezoid weights (weights sum to the domain size)."""
    if isinstance(f, Field1D):
        w = _trapezoid_weights(f.grid.n, f.grid.h)
    else:
        g = f.grid
        w = np.outer(_trapezoid_weights(g.n1, g.h1), _trapezoid_weights(g.n2, g.h2)).reshape(-1)
    total = 0.0
    for wi, vi in zip(w, f.values):  # fixed sequential order for reproducibility
        total += wi * vi * vi
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# CSV field format: 17 significant digits, nodes in frozen order


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def field_to_csv(f: Field1D | Field2D) -> str:
    buf = io.StringIO()
    if isinstance(f, Field1D):
        buf.write("x,value\n")
        for x, v in zip(f.grid.x, f.values):
            buf.write(f"{_fmt(x)},{_fmt(v)}\n")
    else:
        buf.write("x1,x2,value\n")
        X1, X2 = f.grid.mesh()
        for a, b, v in zip(X1.reshape(-1), X2.reshape(-1), f.values):
            buf.write(f"{_fmt(a)},{_fmt(b)},{_fmt(v)}\n")
    return buf.getvalue()


def write_field_csv(f: Field1D | Field2D, path: str | Path) -> None:
    Path(path).write_text(field_to_csv(f))


def read_field_csv(path: str | Path) -> Field1D | Field2D:
    """Inverse of :func:`write_field_csv`; the grid is rebuilt from the node coordinates."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(c) for c in r] for r in body])
    if header == ["x", "value"]:
        x = data[:, 0]
        return Field1D(Grid1D(x[0], x[-1], len(x)), data[:, 1])
    if header == ["x1", "x2", "value"]:
        x1 = np.unique(data[:, 0])
        x2 = np.unique(data[:, 1])
        grid = Grid2D(x1[0], x1[-1], x2[0], x2[-1], len(x1), len(x2))
        if len(data) != grid.size:
            raise ValueError(f"{path}: row count does not match a tensor grid")
        return Field2D(grid, data[:, 2])
    raise ValueError(f"{path}: unrecognised field header {header}")
