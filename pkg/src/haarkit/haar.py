"""Haar densities in arbitrary charts and normalized integration.

The unnormalized density at u is |det M(u)| with

    M(u)_ij = <p(u)^-1 dp/du_j, xi_i>,

the bracket being the half-trace Frobenius product and (xi_i) an
orthonormal basis of the group's algebra.  For charts tagged as rotation
groups p^-1 is the transpose; untagged square charts go through an LU
solve.  A 4 x 1 chart is treated as a unit-quaternion parametrisation and
the same formula is evaluated in the quaternion algebra with the pure
imaginaries (i, j, k) as basis.

The sign of det M is an orientation artifact of basis and parameter
order, so the absolute value is taken before normalizing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charts import Chart, builtin_chart
from .groups import quat_conjugate, quat_mul, quat_rotation_matrices, so_algebra_basis
from .quadrature import DEFAULT_NODES, QuadratureRule

DEGENERATE_C = 1e-12

GROUP_TAGS = ("so2", "o2", "so3", "o3")


class NumericalError(RuntimeError):
    """A computation failed numerically (degenerate chart, NaN, no convergence)."""


def _rule_for(chart: Chart, rule) -> QuadratureRule:
    if isinstance(rule, QuadratureRule):
        return rule
    return QuadratureRule.for_domain(chart.domain, DEFAULT_NODES if rule is None else rule)


# ---------------------------------------------------------------------------
# Unnormalized density


def density_numeric_many(chart: Chart, points, basis=None, step: float = 1e-5) -> np.ndarray:
    """|det M| at an (N, d) batch of points (no domain checks)."""
    pts = np.asarray(points, dtype=float)
    if chart.is_quaternion:
        q = chart.quaternions_at(pts)
        dq = chart.jacobian_many(pts, step=step)[..., 0]  # (N, d, 4)
        tau = quat_mul(quat_conjugate(q)[:, None, :], dq)  # (N, d, 4)
        m = np.swapaxes(tau[..., 1:], 1, 2)  # components on (i, j, k); M_ij = <tau_j, xi_i>
        return np.abs(np.linalg.det(m))
    mats = chart.evaluate_many(pts)
    jac = chart.jacobian_many(pts, step=step)  # (N, d, D, D)
    if chart.group is not None:
        tau = np.einsum("nki,njkl->njil", mats, jac)
    else:
        tau = np.linalg.solve(mats[:, None, :, :], jac)
    if basis is None:
        basis = so_algebra_basis(chart.matrix_dim)
    xi = np.stack(basis)
    m = 0.5 * np.einsum("njkl,ikl->nij", tau, xi)
    return np.abs(np.linalg.det(m))


def density_numeric(chart: Chart, u, basis=None, step: float = 1e-5) -> float:
    """Unnormalized |det M(u)| at a single point of the closed domain.

    Finite differences may sample the chart expressions just outside the
    box near the boundary; the built-in charts extend smoothly.  A NaN or
    singular result (a chart that does not extend) raises NumericalError.
    """
    u = chart.check_point(u)
    value = float(density_numeric_many(chart, u[None, :], basis=basis, step=step)[0])
    if not np.isfinite(value):
        raise NumericalError(
            f"density of chart {chart.name!r} is not finite at {u.tolist()}")
    return value


# ---------------------------------------------------------------------------
# Normalized densities


@dataclass(frozen=True, eq=False)
class HaarDensity:
    """A chart with its normalized Haar density k(u) = |det M(u)| / C."""

    chart: Chart
    C: float
    mode: str  # "numeric" | "closed-form"
    algebra_basis: tuple = ()
    _closed_unnormalized: object = None  # (N, d) -> (N,), already scaled so C matches
    _grids: dict = field(default_factory=dict, repr=False)

    def density_many(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.mode == "closed-form":
            raw = self._closed_unnormalized(pts)
        else:
            raw = density_numeric_many(self.chart, pts, basis=self.algebra_basis or None)
        return raw / self.C

    def density(self, u) -> float:
        u = self.chart.check_point(u)
        return float(self.density_many(u[None, :])[0])

    __call__ = density

    def grid(self, rule=None):
        """Quadrature nodes with cached density and group elements.

        Returns (rule, weighted, elements): ``weighted`` are quadrature
        weights times normalized density, and ``elements`` the rotation
        matrices at the nodes (quaternion charts are pushed to matrices).
        """
        rule = _rule_for(self.chart, rule)
        key = rule.nodes_per_axis
        if key not in self._grids:
            k = self.density_many(rule.points)
            if self.chart.is_quaternion:
                elements = quat_rotation_matrices(self.chart.quaternions_at(rule.points))
            else:
                elements = self.chart.evaluate_many(rule.points)
            self._grids[key] = (rule, rule.weights * k, elements)
        return self._grids[key]


def normalize(chart: Chart, basis=None, rule=None) -> HaarDensity:
    """Normalize the numeric density of a chart by tensor-product quadrature."""
    rule = _rule_for(chart, rule)
    raw = density_numeric_many(chart, rule.points, basis=basis)
    if not np.all(np.isfinite(raw)):
        raise NumericalError(f"density of chart {chart.name!r} is not finite on the grid")
    c = float(rule.integrate(raw))
    if c < DEGENERATE_C:
        raise NumericalError(f"chart {chart.name!r} is degenerate: C = {c:.3g} below {DEGENERATE_C:g}")
    return HaarDensity(chart=chart, C=c, mode="numeric",
                       algebra_basis=tuple(basis) if basis is not None else ())


# Closed forms for the built-in charts: unnormalized integrand and exact C.
# The axis-angle density carries sin^2(alpha/2); the numeric engine above
# is the arbiter and the acceptance suite checks agreement at 1e-6.


def _closed_so2(pts):
    return np.ones(pts.shape[0])


def _closed_euler(pts):
    return np.sin(pts[:, 1])


def _closed_polar(pts):
    return np.cos(pts[:, 1]) * np.sin(pts[:, 2] / 2.0) ** 2


def _closed_quat(pts):
    return np.sin(pts[:, 0]) ** 2 * np.sin(pts[:, 1])


_CLOSED_FORMS = {
    "so2-angle": (_closed_so2, 2.0 * np.pi),
    "so2-shifted": (_closed_so2, 2.0 * np.pi),
    "so3-euler": (_closed_euler, 8.0 * np.pi**2),
    "so3-polar": (_closed_polar, 2.0 * np.pi**2),
    "so3-quat": (_closed_quat, 2.0 * np.pi**2),
}


def closed_form(tag: str) -> HaarDensity:
    """The reference density of a built-in chart with its exact constant."""
    if tag not in _CLOSED_FORMS:
        raise KeyError(f"no closed-form density for tag {tag!r}; "
                       f"available: {', '.join(sorted(_CLOSED_FORMS))}")
    fn, c = _CLOSED_FORMS[tag]
    return HaarDensity(chart=builtin_chart(tag), C=c, mode="closed-form",
                       _closed_unnormalized=fn)


def closed_form_density(tag: str, u) -> float:
    """Normalized closed-form density of a built-in chart at a point."""
    return closed_form(tag).density(u)


# ---------------------------------------------------------------------------
# Chart cross-validation


def _as_density(chart_or_density, rule=None) -> HaarDensity:
    if isinstance(chart_or_density, HaarDensity):
        return chart_or_density
    return normalize(chart_or_density, rule=rule)


def chart_change_check(c1, c2, phi, u, rule=None, step: float = 1e-5) -> float:
    """Residual |k1(u) - |det Dphi(u)| * k2(phi(u))| of a change of chart.

    ``phi`` maps coordinates of c1 to coordinates of c2; its jacobian is
    taken by central differences.  Accepts Chart or HaarDensity arguments;
    charts are normalized on the fly.
    """
    d1 = _as_density(c1, rule=rule)
    d2 = _as_density(c2, rule=rule)
    u = d1.chart.check_point(u)
    w = np.asarray(phi(u), dtype=float)
    if not d2.chart.contains(w):
        raise ValueError(f"phi({u.tolist()}) = {w.tolist()} lands outside chart {d2.chart.name!r}")
    d = u.shape[0]
    jac = np.empty((d, d))
    for j in range(d):
        shift = np.zeros(d)
        shift[j] = step
        jac[:, j] = (np.asarray(phi(u + shift), dtype=float) -
                     np.asarray(phi(u - shift), dtype=float)) / (2.0 * step)
    return float(abs(d1.density(u) - abs(np.linalg.det(jac)) * d2.density(w)))


# ---------------------------------------------------------------------------
# Normalized integration over SO / O groups


def _coset_reps(group_tag: str, dim: int):
    """Improper-coset factors: O(D) integrates (1/2)[f(g) + f(sigma g)]."""
    if group_tag not in GROUP_TAGS:
        raise KeyError(f"unknown group tag {group_tag!r}; expected one of {', '.join(GROUP_TAGS)}")
    expected = 2 if group_tag.endswith("2") else 3
    if dim != expected:
        raise ValueError(f"group {group_tag} needs {expected}x{expected} charts, got dimension {dim}")
    if group_tag.startswith("so"):
        return [None]
    sigma = np.diag([-1.0, 1.0]) if dim == 2 else -np.eye(3)
    return [None, sigma]


def _apply_f(f, mats: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        return np.asarray(f(mats), dtype=float)
    return np.asarray([f(m) for m in mats], dtype=float)


def integrate_scalar(f, group_tag: str, density: HaarDensity, rule=None,
                     vectorized: bool = False) -> float:
    """Normalized integral of a scalar function over the group.

    With ``vectorized=True`` the integrand receives the whole (N, D, D)
    stack of group elements and must return (N,) values; otherwise it is
    called once per element with a (D, D) matrix.
    """
    value = integrate_tensor(f, group_tag, density, rule=rule, vectorized=vectorized)
    return float(value)


def integrate_tensor(f, group_tag: str, density: HaarDensity, rule=None,
                     vectorized: bool = False) -> np.ndarray:
    """Entry-wise normalized integral of a tensor-valued function.

    Vectorized integrands map the (N, D, D) element stack to (N, *shape).
    """
    _, weighted, elements = density.grid(rule)
    reps = _coset_reps(group_tag, elements.shape[-1])
    total = None
    for sigma in reps:
        mats = elements if sigma is None else np.einsum("ij,njk->nik", sigma, elements)
        vals = _apply_f(f, mats, vectorized)
        part = np.tensordot(weighted, vals, axes=1)
        total = part if total is None else total + part
    return total / len(reps)
