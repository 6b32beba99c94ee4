"""Command-line interface.

Exit codes: 0 success, 1 usage or input error (bad flags, malformed chart
or tensor files, points outside domains), 2 numerical failure (degenerate
normalization, non-convergence, under-resolved quadrature).  JSON output
carries 17 significant digits so values round-trip through text; human
tables use 9.  All angles are radians.  Identical argv (and seed) produce
byte-identical stdout.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .chartlang import ChartError
from .charts import (BUILTIN_NAMES, Chart, DomainError, angle_from_matrix,
                     euler_from_matrix, load_chart, polar_from_matrix)
from .haar import (GROUP_TAGS, NumericalError, chart_change_check, closed_form,
                   integrate_scalar, normalize)
from .orbit import OrbitSpec, covariance, mc_moments, moment
from .quadrature import QuadratureRule
from .reynolds import dim_invariants_closed, dim_invariants_quadrature, reynolds_continuous
from .sampling import SamplerConfig, canonical_chart_tag, sample
from .tensors import Tensor

JSON_DIGITS = 17
TABLE_DIGITS = 9


# ---------------------------------------------------------------------------
# Deterministic serialization


def format_float(value: float, digits: int = JSON_DIGITS) -> str:
    if value != value:
        return "NaN"
    text = format(float(value), f".{digits}g")
    return "0" if text == "-0" else text


def to_json(obj, digits: int = JSON_DIGITS) -> str:
    """Serialize with fixed float formatting so output is byte-stable."""
    if isinstance(obj, dict):
        items = ", ".join(f'"{k}": {to_json(v, digits)}' for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v, digits) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj, digits)
    if obj is None:
        return "null"
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _nested(array: np.ndarray):
    return array.tolist() if isinstance(array, np.ndarray) else array


# ---------------------------------------------------------------------------
# Shared argument plumbing


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors on exit code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")], dtype=float)
    except ValueError:
        raise ValueError(f"could not parse {text!r} as comma-separated reals") from None


def _chart_arg(spec: str) -> Chart:
    return load_chart(spec)


def _nodes_arg(args, chart: Chart) -> QuadratureRule:
    return QuadratureRule.for_domain(chart.domain, args.nodes)


def _builtin_tag(spec: str) -> str | None:
    tag = canonical_chart_tag(spec)
    return tag if tag in BUILTIN_NAMES else None


def _default_chart(group: str) -> str:
    return "so2-angle" if group.endswith("2") else "so3-quat"


# ---------------------------------------------------------------------------
# Subcommand handlers.  Each returns the stdout text.


def _cmd_density(args) -> str:
    chart = _chart_arg(args.chart)
    point = _parse_point(args.point)
    use_numeric = args.numeric or not args.closed_form
    record = {"chart": chart.name, "point": list(point)}
    if use_numeric:
        density = normalize(chart, rule=_nodes_arg(args, chart))
        record["density"] = density.density(point)
    if args.closed_form:
        tag = _builtin_tag(args.chart)
        if tag is None:
            raise ValueError("--closed-form needs a built-in chart (builtin:<tag>)")
        value = closed_form(tag).density(point)
        if use_numeric:
            record["closed_form_density"] = value
        else:
            record["density"] = value
    return to_json(record)


def _cmd_normalize(args) -> str:
    chart = _chart_arg(args.chart)
    rule = _nodes_arg(args, chart)
    density = normalize(chart, rule=rule)
    return to_json({"chart": chart.name, "C": density.C,
                    "nodes_per_axis": list(rule.nodes_per_axis)})


def _cmd_sample(args) -> str:
    config = SamplerConfig(group=args.group, chart=args.chart or "",
                           seed=args.seed, count=args.count)
    batch = sample(config)
    lines = []
    if args.format == "csv":
        for m in batch.matrices:
            lines.append(",".join(format_float(x) for x in m.ravel()))
    elif batch.quaternions is not None:
        for q in batch.quaternions:
            lines.append(to_json({"q": list(q)}))
    else:
        for m in batch.matrices:
            lines.append(to_json({"R": _nested(m)}))
    return "\n".join(lines)


def _cmd_check_chart(args) -> str:
    chart = _chart_arg(args.chart)  # load already runs structural validation
    rule = _nodes_arg(args, chart)
    density = normalize(chart, rule=rule)
    record = {"chart": chart.name, "parse": "ok", "d": chart.d,
              "shape": list(chart.shape), "group": chart.group or "none",
              "C": density.C}
    worst = 0.0
    group_tag = None
    if chart.group is not None:
        group_tag = chart.group.replace("(", "").replace(")", "")
    elif chart.is_quaternion:
        group_tag = "so3"
    if group_tag is not None:
        rng = np.random.default_rng(20240817)
        battery = [lambda m: np.trace(m, axis1=-2, axis2=-1),
                   lambda m: np.trace(m, axis1=-2, axis2=-1) ** 2]
        base = [integrate_scalar(f, group_tag, density, rule=rule, vectorized=True)
                for f in battery]
        dim = chart.matrix_dim
        for _ in range(3):
            h = np.linalg.qr(rng.normal(size=(dim, dim)))[0]
            if np.linalg.det(h) < 0:
                h[:, 0] = -h[:, 0]
            for f, ref in zip(battery, base):
                left = integrate_scalar(lambda m: f(np.einsum("ij,njk->nik", h, m)),
                                        group_tag, density, rule=rule, vectorized=True)
                right = integrate_scalar(lambda m: f(np.einsum("nij,jk->nik", m, h)),
                                         group_tag, density, rule=rule, vectorized=True)
                worst = max(worst, abs(left - ref), abs(right - ref))
        record["invariance_max_residual"] = worst
        record["invariance_tolerance"] = args.tolerance
        if worst > args.tolerance:
            raise NumericalError(
                f"invariance battery failed: residual {worst:.3g} above {args.tolerance:g}\n"
                + to_json(record))
    record["status"] = "ok"
    return to_json(record)


def _cmd_dim(args) -> str:
    # Exact sums exist only in 3D; planar groups fall back to quadrature.
    method = args.method or ("closed" if args.group in ("so3", "o3") else "quadrature")
    values = {}
    if method in ("closed", "both"):
        values["closed"] = dim_invariants_closed(args.group, args.order)
    if method in ("quadrature", "both"):
        values["quadrature"] = dim_invariants_quadrature(args.group, args.order)
    if args.format == "json":
        return to_json({"group": args.group, "order": args.order, **values})
    parts = []
    if "closed" in values:
        parts.append(str(values["closed"]))
    if "quadrature" in values:
        parts.append(format_float(values["quadrature"], TABLE_DIGITS))
    return "\n".join(parts)


def _cmd_reynolds(args) -> str:
    with open(args.tensor, "r", encoding="utf-8") as fh:
        tensor = Tensor.from_json(fh.read())
    chart = _chart_arg(args.chart or f"builtin:{_default_chart(args.group)}")
    rule = _nodes_arg(args, chart)
    density = normalize(chart, rule=rule)
    averaged = reynolds_continuous(args.group, density, rule, tensor)
    return averaged.to_json()


def _cmd_orbit_moments(args) -> str:
    if (args.seed_tensor is None) == (args.diag is None):
        raise ValueError("provide exactly one of --seed-tensor or --diag")
    if args.diag is not None:
        seed = Tensor.from_array(np.diag(_parse_point(args.diag)))
    else:
        with open(args.seed_tensor, "r", encoding="utf-8") as fh:
            seed = Tensor.from_json(fh.read())
    spec = OrbitSpec(group=args.group, representation=args.representation, seed=seed)
    chart = _chart_arg(args.chart or f"builtin:{_default_chart(args.group)}")
    rule = _nodes_arg(args, chart)
    density = normalize(chart, rule=rule)
    m1 = moment(spec, 1, density, rule=rule)
    m2 = moment(spec, 2, density, rule=rule)
    cov = covariance(spec, density, rule=rule)
    record = {"group": args.group, "representation": args.representation,
              "m1": _nested(m1.array), "m2": _nested(m2.array), "cov": _nested(cov.array)}
    if args.mc:
        config = SamplerConfig(group=args.group, chart=args.mc_chart or "",
                               seed=args.mc_seed, count=args.mc)
        mc1, se1 = mc_moments(spec, 1, config)
        mc2, se2 = mc_moments(spec, 2, config)
        record["mc_m1"] = _nested(mc1.array)
        record["mc_m2"] = _nested(mc2.array)
        record["mc_stderr"] = {"m1": _nested(se1.array), "m2": _nested(se2.array)}
    return to_json(record)


_COORDS_FROM_MATRIX = {
    "so2_angle": lambda m: np.array([angle_from_matrix(m, lower=0.0)]),
    "so2_shifted": lambda m: np.array([angle_from_matrix(m, lower=-np.pi)]),
    "so3_euler": euler_from_matrix,
    "so3_polar": polar_from_matrix,
}


def _auto_map(c1: Chart, c2: Chart):
    """Coordinate change c1 -> c2 through the group element itself."""
    if c1.is_quaternion or c2.is_quaternion:
        # The quaternion chart covers the rotations twice, so no bijective
        # coordinate change exists and the residual identity cannot hold.
        raise ValueError("--map auto is undefined for the double-cover quaternion chart")
    invert = _COORDS_FROM_MATRIX.get(c2.name)
    if invert is None:
        raise ValueError(f"--map auto needs a built-in target chart, not {c2.name!r}")

    def phi(u):
        return invert(c1.evaluate(u))

    return phi


def _cmd_chart_change(args) -> str:
    c1 = _chart_arg(args.chart1)
    c2 = _chart_arg(args.chart2)
    point = _parse_point(args.point)
    if args.map == "auto":
        phi = _auto_map(c1, c2)
    elif args.map.startswith("shift:"):
        offset = _parse_point(args.map[len("shift:"):])
        def phi(u):
            return u + offset
    else:
        raise ValueError(f"unknown --map {args.map!r}; use 'auto' or 'shift:dx1,dx2,...'")
    rule1 = QuadratureRule.for_domain(c1.domain, args.nodes)
    rule2 = QuadratureRule.for_domain(c2.domain, args.nodes)
    residual = chart_change_check(normalize(c1, rule=rule1), normalize(c2, rule=rule2),
                                  phi, point)
    return to_json({"chart1": c1.name, "chart2": c2.name, "point": list(point),
                    "residual": residual})


# ---------------------------------------------------------------------------
# Parser assembly


def build_parser() -> _Parser:
    parser = _Parser(prog="haarkit",
                     description="Uniform measures, sampling, and averaging on rotation groups.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--out", help="write output to this path instead of stdout")
        return p

    p = add("density", _cmd_density, "Evaluate the uniform density of a chart at a point.")
    p.add_argument("--chart", required=True, help="chart file path or builtin:<tag>")
    p.add_argument("--point", required=True, help="comma-separated chart coordinates (radians)")
    p.add_argument("--numeric", action="store_true", help="numeric density (default)")
    p.add_argument("--closed-form", action="store_true", help="reference closed-form density")
    p.add_argument("--nodes", type=int, default=32, help="quadrature nodes per axis (default 32)")

    p = add("normalize", _cmd_normalize, "Report the normalization constant C of a chart.")
    p.add_argument("--chart", required=True, help="chart file path or builtin:<tag>")
    p.add_argument("--nodes", type=int, default=32, help="quadrature nodes per axis (default 32)")

    p = add("sample", _cmd_sample, "Draw uniform group elements.")
    p.add_argument("--group", required=True, choices=GROUP_TAGS)
    p.add_argument("--chart", default="",
                   help="built-in chart tag or alias (euler, polar, quaternion, ...)")
    p.add_argument("-n", "--count", type=int, default=1, help="number of samples")
    p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="json lines or row-major csv")

    p = add("check-chart", _cmd_check_chart,
            "Parse a chart, validate it, normalize it, and test invariance.")
    p.add_argument("--chart", required=True, help="chart file path or builtin:<tag>")
    p.add_argument("--nodes", type=int, default=24, help="quadrature nodes per axis (default 24)")
    p.add_argument("--tolerance", type=float, default=1e-6,
                   help="invariance residual tolerance (default 1e-6)")

    p = add("dim", _cmd_dim, "Dimension of the invariant subspace of order-n tensors.")
    p.add_argument("--group", required=True, choices=GROUP_TAGS)
    p.add_argument("--order", required=True, type=int, help="tensor order n")
    p.add_argument("--method", choices=("closed", "quadrature", "both"), default=None,
                   help="closed-form sum, trace-formula quadrature, or both")
    p.add_argument("--format", choices=("plain", "json"), default="plain")

    p = add("reynolds", _cmd_reynolds, "Average a tensor over a group.")
    p.add_argument("--group", required=True, choices=GROUP_TAGS)
    p.add_argument("--tensor", required=True, help="tensor JSON file")
    p.add_argument("--chart", default="", help="chart to integrate in (default per group)")
    p.add_argument("--nodes", type=int, default=32, help="quadrature nodes per axis (default 32)")

    p = add("orbit-moments", _cmd_orbit_moments,
            "Quadrature and Monte Carlo moments of an orbit random variable.")
    p.add_argument("--group", required=True, choices=GROUP_TAGS)
    p.add_argument("--representation", choices=("sym2", "natural", "tensor"), default="sym2")
    p.add_argument("--seed-tensor", help="seed tensor JSON file")
    p.add_argument("--diag", help="diagonal seed matrix, e.g. 1,2,3 (sym2 shorthand)")
    p.add_argument("--chart", default="", help="chart to integrate in (default per group)")
    p.add_argument("--nodes", type=int, default=32, help="quadrature nodes per axis (default 32)")
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo sample count (0 disables)")
    p.add_argument("--mc-seed", type=int, default=0, help="Monte Carlo RNG seed")
    p.add_argument("--mc-chart", default="", help="sampling chart for Monte Carlo")

    p = add("chart-change", _cmd_chart_change,
            "Residual of the change-of-chart density identity at a point.")
    p.add_argument("--chart1", required=True, help="source chart (file or builtin:<tag>)")
    p.add_argument("--chart2", required=True, help="target chart (file or builtin:<tag>)")
    p.add_argument("--point", required=True, help="coordinates in chart1")
    p.add_argument("--map", default="auto",
                   help="'auto' (through the group element) or 'shift:dx1,dx2,...'")
    p.add_argument("--nodes", type=int, default=32, help="quadrature nodes per axis (default 32)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        text = args.handler(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ChartError, DomainError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
