"""Command-line surface: build rules, export node files, verify exactness,
print node-count bounds, and draw SVG scatter plots.

Exit codes: 0 success, 1 invalid arguments or unreadable input, 2 rule
construction failure, 3 verification failure, 4 file cannot be verified
(no metadata, or a family no oracle covers).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Dict, List, Optional, Tuple

import numpy as np

from .biangle import gauss_cubature_biangle
from .composed import composed_rule
from .opq1d import EigensolverError, jacobi_recurrence
from .oracle import (
    BiangleMomentOracle,
    ComposedMomentOracle,
    OracleConvergenceError,
    SquareMomentOracle,
    certify,
)
from .rules import ConstructionError, CubatureRule2D, WeightSpec
from .squaremin import minimal_rule_even, minimal_rule_odd, moller_bound

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONSTRUCTION = 2
EXIT_VERIFICATION = 3
EXIT_UNVERIFIABLE = 4

CSV_HEADER = "x1,x2,weight"

_JSON_FIELDS = (
    "family",
    "alpha",
    "beta",
    "gamma",
    "ell",
    "param_n_or_m",
    "degree",
    "node_count",
    "moller_bound",
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the contract reserves 2
    # for construction failures, so remap usage errors to 1
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def format_float(v: float) -> str:
    """Shortest decimal string that round-trips the 64-bit value."""
    return repr(float(v))


def _sorted_nodes(
    nodes: np.ndarray, weights: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((nodes[:, 1], nodes[:, 0]))
    return nodes[order], weights[order]


def rule_to_csv(nodes: np.ndarray, weights: np.ndarray) -> str:
    nodes, weights = _sorted_nodes(nodes, weights)
    lines = [CSV_HEADER]
    for (x1, x2), w in zip(nodes, weights):
        lines.append(
            "%s,%s,%s" % (format_float(x1), format_float(x2), format_float(w))
        )
    return "\n".join(lines) + "\n"


def rule_metadata(rule: CubatureRule2D) -> Dict[str, object]:
    """File metadata for a constructed rule.  The bound field is the
    node-count lower bound for the declared degree, for the reader's
    side-by-side comparison; Gauss rules on the curved domain undercut it."""
    spec = rule.spec
    return {
        "family": rule.family,
        "alpha": spec.alpha,
        "beta": spec.beta,
        "gamma": spec.gamma,
        "ell": spec.ell if rule.family == "composed" else None,
        "param_n_or_m": rule.param,
        "degree": rule.degree,
        "node_count": rule.node_count,
        "moller_bound": moller_bound((rule.degree + 1) // 2),
    }


def rule_to_json(meta: Dict[str, object], nodes: np.ndarray, weights: np.ndarray) -> str:
    nodes, weights = _sorted_nodes(nodes, weights)
    obj: Dict[str, object] = {k: meta[k] for k in _JSON_FIELDS}
    obj["nodes"] = [
        [float(x1), float(x2), float(w)] for (x1, x2), w in zip(nodes, weights)
    ]
    return json.dumps(obj) + "\n"


def parse_rule_file(
    path: str,
) -> Tuple[np.ndarray, np.ndarray, Optional[Dict[str, object]]]:
    """Read a rule file in either format.

    Returns (nodes, weights, metadata); metadata is None for CSV, which
    carries none.  Raises ValueError on malformed content.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        missing = [k for k in _JSON_FIELDS if k not in obj]
        if missing or "nodes" not in obj:
            raise ValueError("rule JSON missing fields: %s" % (missing + ["nodes"] if "nodes" not in obj else missing,))
        rows = obj["nodes"]
        nodes = np.array([[r[0], r[1]] for r in rows], dtype=float).reshape(-1, 2)
        weights = np.array([r[2] for r in rows], dtype=float)
        if int(obj["node_count"]) != len(rows):
            raise ValueError("node_count does not match the node list")
        meta = {k: obj[k] for k in _JSON_FIELDS}
        return nodes, weights, meta
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError("unrecognized rule file format")
    vals = [[float(c) for c in ln.split(",")] for ln in lines[1:]]
    if any(len(v) != 3 for v in vals):
        raise ValueError("CSV rows must have exactly three columns")
    arr = np.array(vals, dtype=float).reshape(-1, 3)
    return arr[:, :2], arr[:, 2], None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cubamin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="command", required=True)

    b = sub.add_parser("bound", help="print the node-count lower bound for degree 2n-1")
    b.add_argument("--n", type=int, required=True, help="half-degree parameter, n >= 1")

    bu = sub.add_parser("build", help="construct a rule and write it to a file")
    fam = bu.add_subparsers(dest="family", metavar="family", required=True)

    def out_opts(sp):
        sp.add_argument("--out", default=None, help="output path (default rule.FORMAT)")
        sp.add_argument("--format", choices=("csv", "json"), default="json")

    f_bi = fam.add_parser("biangle", help="Gauss rule on the parabolic domain")
    f_bi.add_argument("--weight", choices=("jacobi",), default="jacobi")
    f_bi.add_argument("--alpha", type=float, required=True)
    f_bi.add_argument("--beta", type=float, required=True)
    f_bi.add_argument("--gamma", type=float, required=True)
    f_bi.add_argument("--n", type=int, required=True)
    out_opts(f_bi)

    for name, help_text in (
        ("square-even", "minimal rule of degree 4m-1 on the square"),
        ("square-odd", "minimal rule of degree 4m+1 on the square"),
    ):
        sp = fam.add_parser(name, help=help_text)
        sp.add_argument("--alpha", type=float, required=True)
        sp.add_argument("--beta", type=float, required=True)
        sp.add_argument("--gamma", type=float, required=True)
        sp.add_argument("--m", type=int, required=True)
        out_opts(sp)

    f_co = fam.add_parser("composed", help="folded minimal rule of degree 4*ell*m-1")
    f_co.add_argument("--ell", type=int, required=True)
    f_co.add_argument("--m", type=int, required=True)
    f_co.add_argument("--alpha", type=float, required=True)
    f_co.add_argument("--beta", type=float, required=True)
    out_opts(f_co)

    v = sub.add_parser("verify", help="certify a rule file against reference moments")
    v.add_argument("rule_file")
    v.add_argument("--max-degree", type=int, default=None,
                   help="test through this total degree (default: declared)")
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--report", default=None, help="write a JSON report here")

    pl = sub.add_parser("plot", help="draw the nodes as an SVG scatter")
    pl.add_argument("rule_file")
    pl.add_argument("svg_file")
    pl.add_argument("--size", type=int, default=480, help="viewport side in pixels")

    return p


def _fail(message: str, code: int) -> int:
    print("cubamin: %s" % message, file=sys.stderr)
    return code


def cmd_bound(args) -> int:
    if args.n < 1:
        return _fail("--n must be >= 1", EXIT_USAGE)
    print(moller_bound(args.n))
    return EXIT_OK


def _validate_weight_params(alpha: float, beta: float, gamma: Optional[float]) -> Optional[str]:
    if alpha <= -1.0 or beta <= -1.0:
        return "alpha and beta must exceed -1"
    if gamma is not None and gamma not in (-0.5, 0.5):
        return "gamma must be -0.5 or 0.5"
    return None


def cmd_build(args) -> int:
    fam = args.family
    gamma = getattr(args, "gamma", None)
    msg = _validate_weight_params(args.alpha, args.beta, gamma)
    if msg is None and fam == "biangle" and args.n < 1:
        msg = "--n must be >= 1"
    if msg is None and fam != "biangle" and args.m < 1:
        msg = "--m must be >= 1"
    if msg is None and fam == "composed" and args.ell < 1:
        msg = "--ell must be >= 1"
    if msg is not None:
        return _fail(msg, EXIT_USAGE)

    try:
        if fam == "biangle":
            rc = jacobi_recurrence(args.alpha, args.beta, args.n + 1)
            rule = gauss_cubature_biangle(rc, args.n, gamma)
        elif fam == "square-even":
            spec = WeightSpec("square-W", alpha=args.alpha, beta=args.beta, gamma=gamma)
            rule = minimal_rule_even(spec, args.m)
        elif fam == "square-odd":
            rule = minimal_rule_odd(args.alpha, args.beta, gamma, args.m)
        else:
            rc = jacobi_recurrence(args.alpha, args.beta, args.m + 1)
            rule = composed_rule(rc, args.ell, args.m, args.alpha, args.beta)
    except (ConstructionError, EigensolverError, ValueError) as exc:
        # nothing has been opened for writing yet, so no partial file
        return _fail("construction failed: %s" % exc, EXIT_CONSTRUCTION)

    meta = rule_metadata(rule)
    if fam == "biangle":
        # the curved-domain builder keeps only the base recurrence; the
        # file format wants the Jacobi parameters, which the flags carry
        meta["alpha"] = args.alpha
        meta["beta"] = args.beta
    if args.format == "csv":
        payload = rule_to_csv(rule.nodes, rule.weights)
    else:
        payload = rule_to_json(meta, rule.nodes, rule.weights)
    out = args.out if args.out is not None else "rule.%s" % args.format
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(payload)
    print(
        "wrote %s: %s, %d nodes, degree %d"
        % (out, rule.family, rule.node_count, rule.degree)
    )
    return EXIT_OK


def oracle_for(meta: Dict[str, object], max_degree: int):
    """Moment oracle and reconstruction spec for a file's metadata, or None
    when no oracle covers the family."""
    fam = meta["family"]
    alpha, beta = meta["alpha"], meta["beta"]
    gamma = meta["gamma"]
    if alpha is None or beta is None or gamma is None:
        return None
    if fam == "biangle":
        rc = jacobi_recurrence(float(alpha), float(beta), max_degree // 2 + 4)
        spec = WeightSpec(
            "biangle-gamma", alpha=alpha, beta=beta, gamma=gamma, rc=rc
        )
        return BiangleMomentOracle(rc, float(gamma)), spec, "biangle"
    if fam in ("square-even", "square-odd"):
        spec = WeightSpec("square-W", alpha=alpha, beta=beta, gamma=gamma)
        return SquareMomentOracle(float(alpha), float(beta), float(gamma)), spec, "square"
    if fam == "composed":
        ell = int(meta["ell"])
        spec = WeightSpec(
            "square-W-ell", alpha=alpha, beta=beta, gamma=-0.5, ell=ell
        )
        return ComposedMomentOracle(ell, float(alpha), float(beta)), spec, "square"
    return None


def cmd_verify(args) -> int:
    try:
        nodes, weights, meta = parse_rule_file(args.rule_file)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail("cannot read rule file: %s" % exc, EXIT_USAGE)
    if meta is None:
        return _fail(
            "CSV files carry no weight-family metadata; nothing to verify against",
            EXIT_UNVERIFIABLE,
        )
    declared = int(meta["degree"])
    max_degree = args.max_degree if args.max_degree is not None else declared
    picked = oracle_for(meta, max_degree)
    if picked is None:
        return _fail(
            "no moment oracle for family %r" % (meta["family"],), EXIT_UNVERIFIABLE
        )
    oracle, spec, domain = picked
    try:
        rule = CubatureRule2D(
            nodes=nodes,
            weights=weights,
            degree=declared,
            domain=domain,
            spec=spec,
            param=int(meta["param_n_or_m"]),
            family=str(meta["family"]),
        )
    except (ConstructionError, ValueError) as exc:
        return _fail("rule file fails basic validation: %s" % exc, EXIT_USAGE)
    try:
        report = certify(rule, oracle, max_degree, rel_tol=args.tol)
    except OracleConvergenceError as exc:
        return _fail("moment oracle did not converge: %s" % exc, EXIT_UNVERIFIABLE)

    ok = report.certified_degree >= declared
    if args.report is not None:
        payload = json.dumps(
            {
                "declared_degree": declared,
                "max_degree_tested": report.max_degree_tested,
                "certified_degree": report.certified_degree,
                "worst_rel_error": report.worst_rel_error,
                "ok": ok,
                "failures": [[i, j, rel] for (i, j, rel) in report.failures],
            }
        ) + "\n"
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    print(
        "declared %d, certified %d through degree %d, worst rel err %.3e: %s"
        % (
            declared,
            report.certified_degree,
            report.max_degree_tested,
            report.worst_rel_error,
            "OK" if ok else "FAIL",
        )
    )
    return EXIT_OK if ok else EXIT_VERIFICATION


def _min_node_gap(nodes: np.ndarray) -> float:
    """Smallest pairwise distance, chunked to stay memory-light."""
    n = len(nodes)
    best = math.inf
    step = 512
    for i0 in range(0, n, step):
        a = nodes[i0 : i0 + step]
        for j0 in range(i0, n, step):
            b = nodes[j0 : j0 + step]
            d2 = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
            if i0 == j0:
                np.fill_diagonal(d2, np.inf)
            m = float(np.min(d2)) if d2.size else math.inf
            best = min(best, m)
    return math.sqrt(best) if best < math.inf else 0.0


def render_svg(
    nodes: np.ndarray, family: Optional[str], size: int
) -> str:
    """Scatter of the nodes inside the domain outline.

    family None (a CSV file) falls back on the bounding box: any node
    outside the unit square implies the curved domain.
    """
    curved = family == "biangle" or (
        family is None and bool(np.any(np.abs(nodes[:, 0]) > 1.0 + 1e-12))
    )
    if curved:
        xlo, xhi, ylo, yhi = -2.0, 2.0, -1.0, 1.0
    else:
        xlo, xhi, ylo, yhi = -1.0, 1.0, -1.0, 1.0
    margin = 0.05 * size
    scale = min(
        (size - 2 * margin) / (xhi - xlo), (size - 2 * margin) / (yhi - ylo)
    )
    cx, cy = 0.5 * (xlo + xhi), 0.5 * (ylo + yhi)

    def px(x: float, y: float) -> Tuple[float, float]:
        return (
            0.5 * size + (x - cx) * scale,
            0.5 * size - (y - cy) * scale,
        )

    def pt(x: float, y: float) -> str:
        return "%.4f %.4f" % px(x, y)

    gap = _min_node_gap(nodes)
    if gap > 0.0 and math.isfinite(gap):
        radius = max(0.35 * gap * scale, 0.75)
    else:
        radius = 0.02 * size

    parts: List[str] = []
    parts.append(
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (size, size, size, size)
    )
    parts.append('<rect width="%d" height="%d" fill="#ffffff"/>' % (size, size))
    if curved:
        # straight edges meet at the bottom vertex; the top arc x2 = x1^2/4
        # is exactly the quadratic Bezier with control point at that vertex
        d = "M %s L %s M %s L %s M %s Q %s %s" % (
            pt(0, -1), pt(2, 1),
            pt(0, -1), pt(-2, 1),
            pt(-2, 1), pt(0, -1), pt(2, 1),
        )
    else:
        d = "M %s L %s L %s L %s Z" % (
            pt(-1, -1), pt(1, -1), pt(1, 1), pt(-1, 1)
        )
    parts.append(
        '<path d="%s" fill="none" stroke="#000000" stroke-width="1"/>' % d
    )
    for x, y in nodes:
        u, v = px(float(x), float(y))
        parts.append(
            '<circle cx="%.4f" cy="%.4f" r="%.4f" fill="#000000"/>'
            % (u, v, radius)
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args) -> int:
    try:
        nodes, _, meta = parse_rule_file(args.rule_file)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail("cannot read rule file: %s" % exc, EXIT_USAGE)
    if len(nodes) == 0:
        return _fail("rule file has no nodes; nothing to plot", EXIT_USAGE)
    if args.size < 32:
        return _fail("--size must be at least 32", EXIT_USAGE)
    family = None if meta is None else str(meta["family"])
    svg = render_svg(nodes, family, args.size)
    with open(args.svg_file, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    print("wrote %s: %d nodes" % (args.svg_file, len(nodes)))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "bound":
        return cmd_bound(args)
    if args.command == "build":
        return cmd_build(args)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_plot(args)


if __name__ == "__main__":
    sys.exit(main())
