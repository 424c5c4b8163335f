"""Command-line interface.

Commands: gap, maxp, check, star, necklace, verify, oracle.  Input trees
come from Newick or edge-list files (``-`` reads stdin, ``--format auto``
sniffs a leading ``(``); maxp and check also accept a JSON distance matrix
``{"labels": [...], "dist": [[...]]}``.  Reports are printed as JSON
(default) or text; identical inputs and seed give byte-identical JSON.

Exit codes: 0 success, 2 input could not be parsed, 3 input parsed but a
value was invalid for the command, 4 internal error or failed cross-check.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional, Tuple, Union

from .errors import CapReached, InvalidMetric, NotATreeHost, TreeGapError
from .generic import gamma_T
from .metric import FiniteMetric, metric_from_tree
from .negtype import (
    build_necklace,
    build_star,
    generalized_roundness_check,
    has_p_negative_type,
    is_equality_witness,
    max_negative_type,
    star_max_p,
    tree_maxp_lower_bound,
    verify_enhanced_inequality,
    zeta_lower_bound,
)
from .oracle import brute_force_gamma, kkt_check_generic, minimize_gap_over_loads
from .tree import MetricTree, label_key
from .treeio import emit_newick, emit_report, parse_edge_list, parse_eta_list, parse_newick

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INTERNAL = 4

ORACLE_RTOL = 1e-7
BRUTE_FORCE_CAP = 9


class _ParsePhaseError(Exception):
    """Wrapper marking an error as belonging to input parsing (exit 2)."""

    def __init__(self, cause: Exception):
        super().__init__(str(cause))
        self.cause = cause


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _parse_metric_json(text: str) -> FiniteMetric:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidMetric(f"malformed JSON distance matrix: {exc}") from exc
    if not isinstance(payload, dict) or "labels" not in payload or "dist" not in payload:
        raise InvalidMetric('a JSON metric needs "labels" and "dist" keys')
    return FiniteMetric(payload["labels"], payload["dist"])


def _load_host(path: str, fmt: str, allow_metric: bool) -> Union[MetricTree, FiniteMetric]:
    try:
        text = _read_input(path)
    except OSError as exc:
        raise _ParsePhaseError(exc)
    stripped = text.strip()
    try:
        if fmt == "newick":
            return parse_newick(text)
        if fmt == "edgelist":
            return parse_edge_list(text)
        if stripped.startswith("(") or stripped.endswith(";"):
            return parse_newick(text)
        if stripped.startswith("{"):
            if allow_metric:
                return _parse_metric_json(text)
            raise InvalidMetric("this command reads trees, not distance matrices")
        return parse_edge_list(text)
    except TreeGapError as exc:
        raise _ParsePhaseError(exc)


def _require_tree(host: Union[MetricTree, FiniteMetric]) -> MetricTree:
    if not isinstance(host, MetricTree):
        raise NotATreeHost("this command needs a tree input, not a distance matrix")
    return host


def _tree_summary(tree: MetricTree, with_edge_list: bool = False) -> Dict:
    summary: Dict = {
        "n_vertices": len(tree.vertices),
        "n_edges": len(tree.edges),
        "root": str(tree.root),
        "total_weight": tree.total_weight(),
        "unit_weights": all(e.weight == 1.0 for e in tree.edges),
        "newick": emit_newick(tree),
    }
    if with_edge_list:
        lines = [f"# root {tree.root}"]
        lines += [f"{e.left}\t{e.right}\t{e.weight!r}" for e in tree.edges]
        summary["edge_list"] = "\n".join(lines) + "\n"
    return summary


def _empty_document() -> Dict:
    return {
        "tree_summary": None,
        "gamma": None,
        "delta_star": None,
        "generic_weights": None,
        "max_p": None,
        "checks": [],
    }


def _weights_payload(report) -> Dict:
    a = {
        str(v): float(w)
        for v, w in sorted(
            zip(report.simplex.a_team, report.weights.m), key=lambda vw: label_key(vw[0])
        )
    }
    b = {
        str(v): float(w)
        for v, w in sorted(
            zip(report.simplex.b_team, report.weights.n), key=lambda vw: label_key(vw[0])
        )
    }
    return {"a_team": a, "b_team": b}


def _gap_payload(tree: MetricTree, document: Dict, tol: float) -> None:
    report = gamma_T(tree)
    document["gamma"] = report.gamma
    document["delta_star"] = report.delta_star
    document["generic_weights"] = _weights_payload(report)
    document["checks"].append(
        {
            "name": "witness_gap_matches_closed_form",
            "passed": abs(report.witness_gap - report.gamma) <= 1e-10 * report.gamma,
            "witness_gap": report.witness_gap,
        }
    )
    if len(tree.vertices) <= BRUTE_FORCE_CAP:
        found = brute_force_gamma(tree)
        agree = abs(found.value - report.gamma) <= tol * report.gamma
        document["checks"].append(
            {
                "name": "brute_force_agrees",
                "passed": agree,
                "brute_force_value": found.value,
                "relative_tolerance": tol,
            }
        )


def _maxp_payload(
    host: Union[MetricTree, FiniteMetric], document: Dict, tol: float
) -> None:
    if isinstance(host, MetricTree):
        metric = metric_from_tree(host)
    else:
        metric = host
    payload: Dict = {}
    try:
        estimate = max_negative_type(metric, tol)
        payload["p_star"] = estimate.p_star
        payload["bracket_width"] = estimate.bracket_width
        payload["status_at_p_star"] = estimate.verdict_at_p_star.status
        payload["lambda_max_at_p_star"] = estimate.verdict_at_p_star.lambda_max
        payload["certified"] = True
    except CapReached as exc:
        payload["p_star"] = None
        payload["p_star_at_least"] = exc.cap
        payload["certified"] = False

    if isinstance(host, MetricTree):
        n = len(host.vertices)
        if n >= 2:
            gamma = gamma_T(host).gamma
            if n >= 3:
                zeta = zeta_lower_bound(metric, gamma)
                payload["zeta"] = zeta
                payload["strict_interval"] = [1.0 - zeta, 1.0 + zeta]
            if n >= 3 and all(e.weight == 1.0 for e in host.edges):
                payload["unweighted_lower_bound"] = tree_maxp_lower_bound(n)
    document["max_p"] = payload


def cmd_gap(args: argparse.Namespace) -> Tuple[Dict, int]:
    tree = _require_tree(_load_host(args.input, args.format, allow_metric=False))
    document = _empty_document()
    document["tree_summary"] = _tree_summary(tree)
    _gap_payload(tree, document, args.tol if args.tol is not None else ORACLE_RTOL)
    return document, EXIT_OK


def cmd_maxp(args: argparse.Namespace) -> Tuple[Dict, int]:
    host = _load_host(args.input, args.format, allow_metric=True)
    document = _empty_document()
    if isinstance(host, MetricTree):
        document["tree_summary"] = _tree_summary(host)
    _maxp_payload(host, document, args.tol if args.tol is not None else 1e-6)
    return document, EXIT_OK


def cmd_check(args: argparse.Namespace) -> Tuple[Dict, int]:
    if args.p is None:
        raise TreeGapError("check needs --p")
    host = _load_host(args.input, args.format, allow_metric=True)
    document = _empty_document()
    if isinstance(host, MetricTree):
        document["tree_summary"] = _tree_summary(host)
        metric = metric_from_tree(host)
    else:
        metric = host
    tol = args.tol if args.tol is not None else 1e-9
    verdict = has_p_negative_type(metric, args.p, tol)
    entry: Dict = {
        "name": "eigenvalue_verdict",
        "p": args.p,
        "status": verdict.status,
        "lambda_max": verdict.lambda_max,
        "passed": verdict.status != "fails",
    }
    if verdict.certificate is not None:
        entry["certificate"] = {
            str(v): float(x) for v, x in zip(metric.labels, verdict.certificate)
        }
    document["checks"].append(entry)
    ok, worst = generalized_roundness_check(metric, args.p, seed=args.seed)
    document["checks"].append(
        {
            "name": "roundness_sampling",
            "passed": ok,
            "worst_margin": worst,
        }
    )
    return document, EXIT_OK


def cmd_star(args: argparse.Namespace) -> Tuple[Dict, int]:
    if args.n is None:
        raise TreeGapError("star needs --n")
    exact = star_max_p(args.n)  # validates n >= 2
    tree = build_star(args.n)
    document = _empty_document()
    document["tree_summary"] = _tree_summary(tree, with_edge_list=True)
    _gap_payload(tree, document, args.tol if args.tol is not None else ORACLE_RTOL)
    _maxp_payload(tree, document, 1e-6)
    payload = document["max_p"]
    payload["closed_form_p_star"] = exact
    if payload.get("p_star") is not None:
        document["checks"].append(
            {
                "name": "bisection_matches_closed_form",
                "passed": abs(payload["p_star"] - exact) <= 1e-4,
                "difference": payload["p_star"] - exact,
            }
        )
    return document, EXIT_OK


def cmd_necklace(args: argparse.Namespace) -> Tuple[Dict, int]:
    if args.n is None:
        raise TreeGapError("necklace needs --n")
    tree = build_necklace(args.n)
    document = _empty_document()
    document["tree_summary"] = _tree_summary(tree, with_edge_list=True)
    document["gamma"] = gamma_T(tree).gamma
    document["delta_star"] = document["gamma"]
    document["checks"].append(
        {
            "name": "gamma_is_reciprocal_edge_count",
            "passed": document["gamma"] == 1.0 / len(tree.edges),
            "edge_count": len(tree.edges),
        }
    )
    _maxp_payload(tree, document, 1e-6)
    ceiling = star_max_p(args.n)
    payload = document["max_p"]
    payload["star_ceiling"] = ceiling
    if payload.get("p_star") is not None:
        document["checks"].append(
            {
                "name": "p_star_below_star_ceiling",
                "passed": payload["p_star"] <= ceiling + 1e-4,
                "ceiling": ceiling,
            }
        )
    return document, EXIT_OK


def cmd_verify(args: argparse.Namespace) -> Tuple[Dict, int]:
    tree = _require_tree(_load_host(args.input, args.format, allow_metric=False))
    try:
        rows = parse_eta_list(_read_input(args.eta))
    except TreeGapError as exc:
        raise _ParsePhaseError(exc)
    except OSError as exc:
        raise _ParsePhaseError(exc)
    points = [v for v, _ in rows]
    eta = [x for _, x in rows]
    margin = verify_enhanced_inequality(tree, points, eta)
    witness = is_equality_witness(tree, points, eta)
    scale = 0.5 * gamma_T(tree).gamma * sum(abs(x) for x in eta) ** 2
    document = _empty_document()
    document["tree_summary"] = _tree_summary(tree)
    document["gamma"] = gamma_T(tree).gamma
    document["checks"].append(
        {
            "name": "enhanced_inequality",
            "passed": margin >= -1e-9 * scale,
            "margin": margin,
            "equality_attained": witness,
        }
    )
    return document, EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> Tuple[Dict, int]:
    tree = _require_tree(_load_host(args.input, args.format, allow_metric=False))
    tol = args.tol if args.tol is not None else ORACLE_RTOL
    document = _empty_document()
    document["tree_summary"] = _tree_summary(tree)
    report = gamma_T(tree)
    document["gamma"] = report.gamma
    document["delta_star"] = report.delta_star
    document["generic_weights"] = _weights_payload(report)
    checks: List[Dict] = document["checks"]

    result = minimize_gap_over_loads(report.simplex)
    checks.append(
        {
            "name": "descent_on_generic_labeling_agrees",
            "passed": abs(result.value - report.gamma) <= tol * report.gamma,
            "minimum_found": result.value,
            "iterations": result.iterations,
            "converged": result.converged,
        }
    )
    if len(tree.vertices) <= BRUTE_FORCE_CAP:
        found = brute_force_gamma(tree)
        checks.append(
            {
                "name": "brute_force_agrees",
                "passed": abs(found.value - report.gamma) <= tol * report.gamma,
                "brute_force_value": found.value,
            }
        )
    else:
        checks.append(
            {
                "name": "brute_force_agrees",
                "passed": True,
                "skipped": f"tree exceeds {BRUTE_FORCE_CAP} vertices",
            }
        )
    kkt = kkt_check_generic(tree)
    checks.append(
        {
            "name": "stationarity_at_witness",
            "passed": kkt.consistent,
            "lambda_a": kkt.lambda_a,
            "lambda_b": kkt.lambda_b,
            "spread_a": kkt.spread_a,
            "spread_b": kkt.spread_b,
        }
    )
    code = EXIT_OK if all(c["passed"] for c in checks) else EXIT_INTERNAL
    return document, code


def _render_text(document: Dict) -> str:
    def fmt(x) -> str:
        if isinstance(x, float):
            return f"{x:.6g}"
        return str(x)

    lines: List[str] = []
    summary = document.get("tree_summary")
    if summary:
        lines.append(
            f"tree: {summary['n_vertices']} vertices, {summary['n_edges']} edges, "
            f"root {summary['root']}"
        )
    if document.get("gamma") is not None:
        lines.append(f"gamma = {fmt(document['gamma'])}")
    if document.get("delta_star") is not None:
        lines.append(f"delta_star = {fmt(document['delta_star'])}")
    weights = document.get("generic_weights")
    if weights:
        for team in ("a_team", "b_team"):
            pairs = ", ".join(f"{v}={fmt(w)}" for v, w in weights[team].items())
            lines.append(f"{team}: {pairs}")
    maxp = document.get("max_p")
    if maxp:
        for key, value in maxp.items():
            if isinstance(value, list):
                lines.append(f"{key} = [{', '.join(fmt(v) for v in value)}]")
            else:
                lines.append(f"{key} = {fmt(value)}")
    for check in document.get("checks", []):
        status = "PASS" if check.get("passed") else "FAIL"
        detail = ", ".join(
            f"{k}={fmt(v)}"
            for k, v in check.items()
            if k not in ("name", "passed") and not isinstance(v, dict)
        )
        lines.append(f"{status} {check['name']}" + (f" ({detail})" if detail else ""))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treegap",
        description=(
            "Gap and negative-type calculations for finite metric trees "
            "and finite metric spaces."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, needs_input: bool) -> None:
        if needs_input:
            p.add_argument("input", help="input file, or - for stdin")
        p.add_argument(
            "--format",
            choices=["newick", "edgelist", "auto"],
            default="auto",
            help="input grammar (auto sniffs a leading '(')",
        )
        p.add_argument(
            "--output", choices=["json", "text"], default="json", help="report style"
        )
        p.add_argument("--tol", type=float, default=None, help="command tolerance")
        p.add_argument("--seed", type=int, default=0, help="sampling seed")
        p.add_argument("--p", type=float, default=None, help="exponent for check")
        p.add_argument("--n", type=int, default=None, help="size for star/necklace")

    specs = [
        ("gap", cmd_gap, True, "closed-form gap with witness and cross-checks"),
        ("maxp", cmd_maxp, True, "bisection estimate of the maximal exponent"),
        ("check", cmd_check, True, "p-negative-type verdict at one exponent"),
        ("star", cmd_star, False, "build a star and report gap and maximal p"),
        ("necklace", cmd_necklace, False, "build a star chain and report"),
        ("verify", cmd_verify, True, "margin of the strengthened inequality"),
        ("oracle", cmd_oracle, True, "run the numerical cross-check suite"),
    ]
    for name, handler, needs_input, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        add_common(p, needs_input)
        if name == "verify":
            p.add_argument("eta", help="vertex<TAB>weight file of signed weights")
        p.set_defaults(handler=handler)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        document, code = args.handler(args)
    except _ParsePhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except TreeGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports everything
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.output == "text":
        sys.stdout.write(_render_text(document))
    else:
        sys.stdout.write(emit_report(document))
    return code


if __name__ == "__main__":
    sys.exit(main())
