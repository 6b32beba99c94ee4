"""Charts: named parametrisations of matrix groups over box domains.

A Chart wraps a parsed AST with vectorized evaluation, domain checks, and
finite-difference jacobians.  Built-in charts ship as chart-language files
under ``haarkit/data`` and go through the same parser as user charts.

Square charts tagged ``group: so(D)`` or ``o(D)`` are validated at load
time (orthogonality at 100 random domain points, det +1 for so).  A chart
whose matrix is 4 x 1 is interpreted as a unit-quaternion parametrisation
(w, x, y, z) of SO(3) and validated for unit norm instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .chartlang import ChartAst, ChartError, evaluate_expr, parse_chart, print_chart

DEFAULT_FD_STEP = 1e-5

BUILTIN_NAMES = ("so2-angle", "so2-shifted", "so3-euler", "so3-polar", "so3-quat")

_VALIDATION_POINTS = 100
_VALIDATION_SEED = 0x5EED


class DomainError(ValueError):
    """A coordinate tuple outside (or too close to the edge of) the domain."""


@dataclass(frozen=True, eq=False)
class Chart:
    """An immutable parametrisation p: U subset R^d -> matrices."""

    ast: ChartAst
    domain: np.ndarray = field(init=False)  # (d, 2) closed box

    def __post_init__(self):
        lo = [evaluate_expr(p.lower, {}) for p in self.ast.params]
        hi = [evaluate_expr(p.upper, {}) for p in self.ast.params]
        dom = np.array([lo, hi], dtype=float).T
        dom.setflags(write=False)
        object.__setattr__(self, "domain", dom)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_source(cls, source: str, validate: bool = True) -> "Chart":
        chart = cls(parse_chart(source))
        if validate:
            chart.validate()
        return chart

    @classmethod
    def from_file(cls, path, validate: bool = True) -> "Chart":
        return cls.from_source(Path(path).read_text(encoding="utf-8"), validate=validate)

    # -- basic facts -------------------------------------------------------

    @property
    def name(self) -> str:
        return self.ast.name

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.ast.params)

    @property
    def d(self) -> int:
        """Number of parameters."""
        return len(self.ast.params)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.ast.matrix), len(self.ast.matrix[0]))

    @property
    def group(self) -> str | None:
        return self.ast.group

    @property
    def is_quaternion(self) -> bool:
        """4 x 1 charts parametrize SO(3) through unit quaternions (w,x,y,z)."""
        return self.shape == (4, 1)

    @property
    def matrix_dim(self) -> int:
        """Dimension of the group elements the chart produces."""
        return 3 if self.is_quaternion else self.shape[0]

    def source(self) -> str:
        return print_chart(self.ast)

    def __repr__(self) -> str:
        tag = self.group or ("quaternion" if self.is_quaternion else "none")
        return f"Chart({self.name!r}, d={self.d}, shape={self.shape}, group={tag})"

    # -- domain ------------------------------------------------------------

    def contains(self, u) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all(u >= self.domain[:, 0]) and np.all(u <= self.domain[:, 1]))

    def check_point(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.d,):
            raise DomainError(f"chart {self.name!r} takes {self.d} coordinates, got shape {u.shape}")
        if not self.contains(u):
            raise DomainError(f"point {u.tolist()} outside the domain of chart {self.name!r}")
        return u

    def check_interior(self, u, margin: float) -> np.ndarray:
        u = self.check_point(u)
        if np.any(u - self.domain[:, 0] < margin) or np.any(self.domain[:, 1] - u < margin):
            raise DomainError(
                f"point {u.tolist()} within {margin:g} of the boundary of chart {self.name!r}")
        return u

    def random_interior(self, count: int, rng, margin: float = 1e-3) -> np.ndarray:
        """Uniform points in the domain shrunk by a relative margin per axis."""
        lo, hi = self.domain[:, 0], self.domain[:, 1]
        pad = margin * (hi - lo)
        return rng.uniform(lo + pad, hi - pad, size=(count, self.d))

    # -- evaluation --------------------------------------------------------

    def evaluate(self, u) -> np.ndarray:
        """p(u) as an ndarray of the chart's matrix shape."""
        u = self.check_point(u)
        env = dict(zip(self.params, u))
        rows, cols = self.shape
        out = np.empty((rows, cols))
        for i, row in enumerate(self.ast.matrix):
            for j, entry in enumerate(row):
                out[i, j] = evaluate_expr(entry, env)
        return out

    def evaluate_many(self, points) -> np.ndarray:
        """p at an (N, d) batch of points, returning (N, rows, cols).

        Points are not domain-checked; quadrature and sampling call this on
        nodes already known to lie inside.
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.d:
            raise DomainError(f"expected an (N, {self.d}) batch, got shape {pts.shape}")
        env = {name: pts[:, k] for k, name in enumerate(self.params)}
        rows, cols = self.shape
        out = np.empty((pts.shape[0], rows, cols))
        for i, row in enumerate(self.ast.matrix):
            for j, entry in enumerate(row):
                out[:, i, j] = evaluate_expr(entry, env)
        return out

    def quaternions_at(self, points) -> np.ndarray:
        """(N, 4) quaternion components of a 4 x 1 chart at an (N, d) batch."""
        if not self.is_quaternion:
            raise ValueError(f"chart {self.name!r} is not a quaternion chart")
        return self.evaluate_many(points)[:, :, 0]

    # -- derivatives -------------------------------------------------------

    def jacobian(self, u, step: float = DEFAULT_FD_STEP) -> list[np.ndarray]:
        """Central-difference partials [dp/du_1, ..., dp/du_d] at u."""
        u = self.check_interior(u, margin=step)
        out = []
        for j in range(self.d):
            shift = np.zeros(self.d)
            shift[j] = step
            out.append((self.evaluate(u + shift) - self.evaluate(u - shift)) / (2.0 * step))
        return out

    def jacobian_many(self, points, step: float = DEFAULT_FD_STEP) -> np.ndarray:
        """Batched central differences, returning (N, d, rows, cols)."""
        pts = np.asarray(points, dtype=float)
        rows, cols = self.shape
        out = np.empty((pts.shape[0], self.d, rows, cols))
        for j in range(self.d):
            shift = np.zeros(self.d)
            shift[j] = step
            out[:, j] = (self.evaluate_many(pts + shift) - self.evaluate_many(pts - shift)) / (2.0 * step)
        return out

    # -- validation --------------------------------------------------------

    def validate(self) -> None:
        """Structural checks plus random-point group/unit-norm validation."""
        rows, cols = self.shape
        if self.group is not None:
            dim = int(self.group[-2])
            if (rows, cols) != (dim, dim):
                raise ChartError(
                    f"chart {self.name!r} declares group {self.group} but its matrix is {rows}x{cols}", 1, 1)
            expected_d = 1 if dim == 2 else 3
            if self.d != expected_d:
                raise ChartError(
                    f"chart {self.name!r} declares group {self.group} but has {self.d} parameters; "
                    f"the group needs {expected_d}", 1, 1)
            rng = np.random.default_rng(_VALIDATION_SEED)
            pts = rng.uniform(self.domain[:, 0], self.domain[:, 1], size=(_VALIDATION_POINTS, self.d))
            mats = self.evaluate_many(pts)
            gram = np.einsum("nij,nkj->nik", mats, mats)
            err = float(np.abs(gram - np.eye(dim)).max())
            if err > 1e-9:
                raise ChartError(
                    f"chart {self.name!r} is not orthogonal on its domain "
                    f"(max |p p^T - I| = {err:.3g} over {_VALIDATION_POINTS} random points)", 1, 1)
            if self.group.startswith("so"):
                dets = np.linalg.det(mats)
                if float(np.abs(dets - 1.0).max()) > 1e-9:
                    raise ChartError(
                        f"chart {self.name!r} declares {self.group} but det p deviates from +1", 1, 1)
        elif self.is_quaternion:
            rng = np.random.default_rng(_VALIDATION_SEED)
            pts = rng.uniform(self.domain[:, 0], self.domain[:, 1], size=(_VALIDATION_POINTS, self.d))
            q = self.quaternions_at(pts)
            err = float(np.abs(np.einsum("ni,ni->n", q, q) - 1.0).max())
            if err > 1e-9:
                raise ChartError(
                    f"chart {self.name!r} is 4x1 (quaternion) but |q| deviates from 1 by {err:.3g}", 1, 1)


# ---------------------------------------------------------------------------
# Built-in charts


_builtin_cache: dict[str, Chart] = {}


def builtin_chart(name: str) -> Chart:
    """Load one of the built-in charts by tag (see BUILTIN_NAMES)."""
    if name not in BUILTIN_NAMES:
        raise KeyError(f"unknown built-in chart {name!r}; available: {', '.join(BUILTIN_NAMES)}")
    if name not in _builtin_cache:
        text = resources.files("haarkit").joinpath(f"data/{name}.chart").read_text(encoding="utf-8")
        _builtin_cache[name] = Chart.from_source(text)
    return _builtin_cache[name]


def load_chart(spec: str) -> Chart:
    """Load a chart from ``builtin:<tag>`` or a filesystem path."""
    if spec.startswith("builtin:"):
        return builtin_chart(spec[len("builtin:"):])
    return Chart.from_file(spec)


# ---------------------------------------------------------------------------
# Coordinate extraction for the built-in SO(3) charts.  These invert the
# parametrisations on their interiors and are used for chart cross-checks.


def euler_from_matrix(m) -> np.ndarray:
    """(alpha, beta, gamma) of the z-x-z Euler chart; requires 0 < beta < pi."""
    m = np.asarray(m, dtype=float)
    beta = float(np.arccos(np.clip(m[2, 2], -1.0, 1.0)))
    if min(beta, np.pi - beta) < 1e-12:
        raise ValueError("Euler angles degenerate at beta in {0, pi}")
    alpha = float(np.arctan2(m[0, 2], -m[1, 2]))
    gamma = float(np.arctan2(m[2, 0], m[2, 1]))
    return np.array([alpha, beta, gamma])


def polar_from_matrix(m) -> np.ndarray:
    """(phi, psi, alpha) of the axis-angle chart; requires 0 < alpha < pi.

    phi is taken in [0, 2*pi[, psi = arcsin(n_3) in [-pi/2, pi/2].
    """
    m = np.asarray(m, dtype=float)
    tr = float(np.trace(m))
    alpha = float(np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0)))
    if min(alpha, np.pi - alpha) < 1e-12:
        raise ValueError("axis-angle coordinates degenerate at alpha in {0, pi}")
    w = 0.5 * np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    n = w / np.sin(alpha)
    phi = float(np.arctan2(n[1], n[0])) % (2.0 * np.pi)
    psi = float(np.arcsin(np.clip(n[2], -1.0, 1.0)))
    return np.array([phi, psi, alpha])


def angle_from_matrix(m, lower: float = 0.0) -> float:
    """Rotation angle of a 2x2 rotation matrix, reduced to [lower, lower + 2*pi[."""
    m = np.asarray(m, dtype=float)
    angle = float(np.arctan2(m[1, 0], m[0, 0]))
    return (angle - lower) % (2.0 * np.pi) + lower


def hyperpolar_from_matrix(m) -> np.ndarray:
    """(theta, psi, phi) of the hyperpolar quaternion chart for a rotation.

    Takes the w >= 0 representative of the double cover; degenerate when
    the quaternion's i-axis component determines no azimuth (sin psi = 0)
    or the rotation is the identity (sin theta = 0).
    """
    from .groups import rotation_to_quat

    w, x, y, z = rotation_to_quat(m)
    theta = float(np.arccos(np.clip(w, -1.0, 1.0)))
    s = np.sin(theta)
    if s < 1e-12:
        raise ValueError("hyperpolar coordinates degenerate at the identity rotation")
    psi = float(np.arccos(np.clip(x / s, -1.0, 1.0)))
    if np.sin(psi) < 1e-12:
        raise ValueError("hyperpolar coordinates degenerate when the axis is +-e1")
    phi = float(np.arctan2(z, y)) % (2.0 * np.pi)
    return np.array([theta, psi, phi])
