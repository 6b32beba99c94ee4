"""Chart objects: domains, evaluation, finite-difference jacobians, validation.

Jacobian oracles are analytic: product-rule derivatives for the angle charts
and direct differentiation of the quaternion components.
"""

import numpy as np
import pytest

from haarkit.charts import (BUILTIN_NAMES, Chart, DomainError, angle_from_matrix,
                            builtin_chart, euler_from_matrix, hyperpolar_from_matrix,
                            load_chart, polar_from_matrix)
from haarkit.groups import hat, rodrigues

RNG = np.random.default_rng(77)

E1, E2, E3 = np.eye(3)


def rz(a):
    return rodrigues(E3, a).matrix


def rx(a):
    return rodrigues(E1, a).matrix


def test_builtin_charts_load_and_validate():
    for name in BUILTIN_NAMES:
        chart = builtin_chart(name)
        assert chart.d in (1, 3)
        assert chart.shape in ((2, 2), (3, 3), (4, 1))


def test_builtin_chart_is_cached():
    assert builtin_chart("so3-euler") is builtin_chart("so3-euler")


def test_builtin_chart_unknown_name():
    with pytest.raises(KeyError):
        builtin_chart("so3-cayley")


def test_load_chart_builtin_prefix_and_path(tmp_path):
    assert load_chart("builtin:so2-angle").name == "so2_angle"
    path = tmp_path / "own.chart"
    path.write_text(builtin_chart("so2-angle").source())
    assert load_chart(str(path)).name == "so2_angle"


def test_domain_membership():
    chart = builtin_chart("so3-euler")
    assert chart.contains([0.0, np.pi / 2, 0.0])
    assert chart.contains([-np.pi, 0.0, np.pi])  # closed box
    assert not chart.contains([0.0, -0.1, 0.0])
    with pytest.raises(DomainError):
        chart.check_point([0.0, 4.0, 0.0])
    with pytest.raises(DomainError):
        chart.check_interior([0.0, 0.0, 0.0], margin=1e-6)
    with pytest.raises(DomainError):
        chart.check_point([0.0, 1.0])  # wrong arity


def test_random_interior_stays_inside():
    chart = builtin_chart("so3-polar")
    pts = chart.random_interior(200, RNG)
    assert pts.shape == (200, 3)
    lo, hi = chart.domain[:, 0], chart.domain[:, 1]
    assert (pts > lo).all() and (pts < hi).all()


def test_euler_chart_is_zxz_product():
    chart = builtin_chart("so3-euler")
    for _ in range(10):
        a, b, g = chart.random_interior(1, RNG)[0]
        expected = rz(a) @ rx(b) @ rz(g)
        assert np.allclose(chart.evaluate([a, b, g]), expected, atol=1e-13)


def test_polar_chart_is_axis_angle():
    chart = builtin_chart("so3-polar")
    for _ in range(10):
        phi, psi, alpha = chart.random_interior(1, RNG)[0]
        n = np.array([np.cos(psi) * np.cos(phi), np.cos(psi) * np.sin(phi), np.sin(psi)])
        assert np.allclose(chart.evaluate([phi, psi, alpha]),
                           rodrigues(n, alpha).matrix, atol=1e-13)


def test_evaluate_many_matches_evaluate():
    chart = builtin_chart("so3-euler")
    pts = chart.random_interior(17, RNG)
    mats = chart.evaluate_many(pts)
    assert mats.shape == (17, 3, 3)
    assert np.allclose(mats[5], chart.evaluate(pts[5]))


def test_quaternion_chart_unit_norm():
    chart = builtin_chart("so3-quat")
    assert chart.is_quaternion
    pts = chart.random_interior(50, RNG)
    q = chart.quaternions_at(pts)
    assert q.shape == (50, 4)
    assert np.allclose(np.linalg.norm(q, axis=1), 1.0, atol=1e-13)


def test_euler_jacobian_product_rule():
    # p = Rz(a) Rx(b) Rz(g): da -> hat(e3) p, dg -> p hat(e3),
    # db -> Rz(a) hat(e1) Rx(b) Rz(g)
    chart = builtin_chart("so3-euler")
    u = np.array([0.4, 1.1, -0.8])
    a, b, g = u
    p = chart.evaluate(u)
    expected = [hat(E3) @ p,
                rz(a) @ hat(E1) @ rx(b) @ rz(g),
                p @ hat(E3)]
    jac = chart.jacobian(u)
    for got, ref in zip(jac, expected):
        assert np.allclose(got, ref, atol=1e-9)


def test_polar_jacobian_alpha_column():
    # d/dalpha exp(alpha hat(n)) = hat(n) exp(alpha hat(n))
    chart = builtin_chart("so3-polar")
    u = np.array([1.3, 0.4, 2.0])
    phi, psi, alpha = u
    n = np.array([np.cos(psi) * np.cos(phi), np.cos(psi) * np.sin(phi), np.sin(psi)])
    jac = chart.jacobian(u)
    assert np.allclose(jac[2], hat(n) @ chart.evaluate(u), atol=1e-9)


def test_jacobian_matches_higher_order_stencil():
    # 4th-order 5-point stencil at a coarser step, independent of the
    # 2nd-order central difference used internally
    for name in ("so3-polar", "so3-euler"):
        chart = builtin_chart(name)
        u = chart.random_interior(1, RNG, margin=0.05)[0]
        h = 1e-3
        for j in range(chart.d):
            e = np.zeros(chart.d)
            e[j] = 1.0
            stencil = (-chart.evaluate(u + 2 * h * e) + 8 * chart.evaluate(u + h * e)
                       - 8 * chart.evaluate(u - h * e) + chart.evaluate(u - 2 * h * e))
            ref = stencil / (12 * h)
            assert np.abs(chart.jacobian(u)[j] - ref).max() < 1e-8


def test_quaternion_jacobian_analytic():
    chart = builtin_chart("so3-quat")
    u = np.array([0.9, 1.2, 2.5])
    t, s, f = u
    expected = np.array([
        [-np.sin(t), 0.0, 0.0],
        [np.cos(t) * np.cos(s), -np.sin(t) * np.sin(s), 0.0],
        [np.cos(t) * np.sin(s) * np.cos(f), np.sin(t) * np.cos(s) * np.cos(f),
         -np.sin(t) * np.sin(s) * np.sin(f)],
        [np.cos(t) * np.sin(s) * np.sin(f), np.sin(t) * np.cos(s) * np.sin(f),
         np.sin(t) * np.sin(s) * np.cos(f)],
    ])
    jac = chart.jacobian_many(u[None])[0]
    assert jac.shape == (3, 4, 1)
    assert np.allclose(jac[:, :, 0].T, expected, atol=1e-9)


def test_validate_rejects_non_orthogonal_tagged_chart():
    src = """chart bad {
  params: t in [0, 1];
  group: so(2);
  matrix: [[1, t], [0, 1]];
}
"""
    with pytest.raises(ValueError, match="orthogonal"):
        Chart.from_source(src)
    Chart.from_source(src, validate=False)  # opt-out leaves the chart usable


def test_validate_rejects_improper_so_chart():
    src = """chart mirror {
  params: a in [0, 2*pi];
  group: so(2);
  matrix: [[cos(a), sin(a)], [sin(a), -cos(a)]];
}
"""
    with pytest.raises(ValueError, match="det p"):
        Chart.from_source(src)


def test_validate_rejects_non_unit_quaternion_chart():
    src = """chart stretched {
  params: t in [0, 1];
  matrix: [[1 + t], [0], [0], [0]];
}
"""
    with pytest.raises(ValueError, match="deviates from 1"):
        Chart.from_source(src)


def test_validate_rejects_group_dimension_mismatch():
    src = """chart wrong_dim {
  params: a in [0, 2*pi];
  group: so(3);
  matrix: [[cos(a), -sin(a)], [sin(a), cos(a)]];
}
"""
    with pytest.raises(ValueError):
        Chart.from_source(src)


def test_angle_from_matrix_round_trip():
    chart = builtin_chart("so2-angle")
    for a in (0.3, 2.0, 5.9):
        m = chart.evaluate([a])
        assert np.isclose(angle_from_matrix(m), a)
    assert np.isclose(angle_from_matrix(chart.evaluate([5.0]), lower=-np.pi),
                      5.0 - 2 * np.pi)


def test_euler_from_matrix_round_trip():
    chart = builtin_chart("so3-euler")
    for u in chart.random_interior(30, RNG, margin=0.05):
        m = chart.evaluate(u)
        assert np.allclose(euler_from_matrix(m), u, atol=1e-10)


def test_polar_from_matrix_round_trip():
    chart = builtin_chart("so3-polar")
    for u in chart.random_interior(30, RNG, margin=0.05):
        m = chart.evaluate(u)
        assert np.allclose(polar_from_matrix(m), u, atol=1e-8)


def test_hyperpolar_from_matrix_round_trip():
    chart = builtin_chart("so3-quat")
    for u in chart.random_interior(30, RNG, margin=0.05):
        q = chart.quaternions_at(u[None])[0]
        if q[0] < 0:
            continue  # inversion returns the w >= 0 sheet only
        from haarkit.groups import quat_rotation_matrices
        m = quat_rotation_matrices(q[None])[0]
        assert np.allclose(hyperpolar_from_matrix(m), u, atol=1e-8)


def test_hyperpolar_from_matrix_degenerate():
    with pytest.raises(ValueError):
        hyperpolar_from_matrix(np.eye(3))


def test_source_round_trip():
    chart = builtin_chart("so3-polar")
    again = Chart.from_source(chart.source())
    assert again.ast == chart.ast
