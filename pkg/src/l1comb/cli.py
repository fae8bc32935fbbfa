"""Batch front-end: run pipelines from presentation files and emit
self-describing CSV reports with stable exit codes.

Exit codes: 0 all checks pass, 1 invariant violation, 2 input error,
3 resource cap exceeded.  Every CSV starts with ``# key: value`` comment
lines (seed, generating set, bicombing kind, tolerances); the timestamp line
is informational and excluded from determinism comparisons.
"""

from __future__ import annotations

import argparse
import math
import random
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from .groups import (
    BallCapError,
    DEFAULT_BALL_CAP,
    GroupPresentation,
    PresentationError,
    WordError,
    ball,
    parse_presentation,
)
from .bicombing import (
    TriplePolicy,
    antisymmetrize,
    boundary,
    combing_chain,
    empirical_area_constant,
    make_bicombing,
    quasi_geodesic_constants,
    translate_chain,
)
from .kernel import (
    cnd_min_eigenvalue,
    kernel_cross_validate,
    kernel_dump,
    kernel_from_bicombing,
)
from .espace import (
    BOUND_TOLERANCE,
    EVector,
    OpNormConfig,
    check_cocycle_identity,
    norm_e,
    op_norm_lower_bound,
    per_vector_bound_check,
    properness_report,
    uniform_bound,
)
from .actions import (
    ActionError,
    orbit_growth_report,
    orbit_kernel,
    parse_action,
    parse_quasitree_csv,
    validate_quasitree_kernel,
)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3

KIND_BY_FLAG = {
    "tree": "tree_geodesic",
    "shortlex": "shortlex",
    "shortlex-anti": "shortlex_antisymmetrized",
}


@dataclass
class RunConfig:
    command: str
    presentation_path: Path
    radius: int
    bicombing_kind: str
    seed: int
    tolerance: float
    out_dir: Path
    cap: int
    action_path: Path | None = None
    quasitree_path: Path | None = None
    sabotage_diagonal: int | None = None
    presentation: GroupPresentation = field(default=None, repr=False)


def _resolve_kind(flag: str, presentation: GroupPresentation) -> str:
    if flag != "auto":
        return KIND_BY_FLAG[flag]
    if presentation.reduction_mode == "free":
        return "tree_geodesic"
    return "shortlex_antisymmetrized"


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(float(value))  # normalizes numpy scalars
    return str(value)


def _write_csv(config: RunConfig, filename: str, columns: list[str],
               rows, extra: dict | None = None) -> Path:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = config.out_dir / filename
    pres = config.presentation
    header = {
        "command": config.command,
        "presentation": config.presentation_path,
        "generators": " ".join(pres.generators),
        "mode": pres.reduction_mode,
        "bicombing": config.bicombing_kind,
        "radius": config.radius,
        "seed": config.seed,
        "tolerance": config.tolerance,
        "cap": config.cap,
        "scope": ("ball-relative" if not pres.has_geodesic_normal_forms
                  else "word-canonical"),
    }
    header.update(extra or {})
    with path.open("w") as fh:
        for key, value in header.items():
            fh.write(f"# {key}: {value}\n")
        fh.write(f"# timestamp: {datetime.now(timezone.utc).isoformat()}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _word(w: str) -> str:
    return w or "e"


# -- commands -----------------------------------------------------------------


def cmd_ball(config: RunConfig) -> int:
    b = ball(config.presentation, config.radius, cap=config.cap)
    sizes = b.sphere_sizes()
    path = _write_csv(config, "ball.csv", ["sphere", "count"],
                      ((r, c) for r, c in enumerate(sizes)),
                      extra={"total": len(b)})
    print(f"ball radius {config.radius}: {len(b)} elements -> {path}")
    return EXIT_OK


def _stats_for_kind(spec, config: RunConfig):
    policy = TriplePolicy(seed=config.seed)
    scan = empirical_area_constant(spec, radius=config.radius, policy=policy)
    qg = quasi_geodesic_constants(spec, radius=config.radius)
    return (
        spec.kind,
        scan.value,
        _word(scan.witness[0]), _word(scan.witness[1]), _word(scan.witness[2]),
        qg.lambda_emp, qg.c_emp,
        scan.triples_scanned,
        "exhaustive" if scan.exhaustive else "sampled",
        qg.pairs_scanned,
    )


def cmd_bicombing_stats(config: RunConfig) -> int:
    pres = config.presentation
    # triple scans form q[x, y] for x, y in the scan ball, so the working ball
    # must reach the pairwise products
    ambient = config.radius if pres.has_geodesic_normal_forms else 2 * config.radius
    b = ball(pres, ambient, cap=config.cap)
    rows = []
    if config.bicombing_kind == "shortlex_antisymmetrized":
        raw = make_bicombing("shortlex", b)
        rows.append(_stats_for_kind(raw, config))
        rows.append(_stats_for_kind(antisymmetrize(raw), config))
    else:
        rows.append(_stats_for_kind(make_bicombing(config.bicombing_kind, b), config))
    path = _write_csv(
        config, "bicombing.csv",
        ["kind", "M_emp", "witness_x", "witness_y", "witness_z",
         "lambda_emp", "c_emp", "triples", "scan", "pairs"],
        rows, extra={"ambient_radius": ambient},
    )
    for row in rows:
        print(f"{row[0]}: M_emp = {row[1]} witness = ({row[2]}, {row[3]}, {row[4]})")
    print(f"-> {path}")
    return EXIT_OK


def cmd_norms(config: RunConfig) -> int:
    b = ball(config.presentation, config.radius, cap=config.cap)
    spec = make_bicombing(config.bicombing_kind, b)
    kernel = kernel_from_bicombing(spec)
    report = properness_report(kernel)
    rows = [
        (_word(r.word), r.distance, r.norm_f, r.norm_l1, r.norm_e, r.lower_bound)
        for r in report.rows
    ]
    path = _write_csv(
        config, "norms.csv",
        ["word", "d", "norm_f", "norm_l1", "norm_E", "lower_bound"],
        rows, extra={"displacement_constant": kernel.displacement_constant},
    )
    (config.out_dir / "kernel.csv").write_text(kernel_dump(kernel))
    print(f"{len(rows)} cocycle norm rows -> {path}")
    return EXIT_OK


def cmd_opnorm(config: RunConfig) -> int:
    b = ball(config.presentation, config.radius, cap=config.cap)
    spec = make_bicombing(config.bicombing_kind, b)
    kernel = kernel_from_bicombing(spec)
    s_radius = config.radius // 2
    v_radius = config.radius - s_radius
    upper = uniform_bound(kernel.displacement_constant)
    opt = OpNormConfig(seed=config.seed)
    rows = []
    for i in b.indices_within(s_radius):
        s = b.elements[i]
        res = op_norm_lower_bound(s, kernel, v_radius, opt)
        rows.append((_word(s), res.value, upper, res.iterations, res.seed))
    path = _write_csv(
        config, "opnorm.csv",
        ["word", "lower_bound_found", "theoretical_upper", "iters", "seed"],
        rows,
        extra={"s_radius": s_radius, "subspace_radius": v_radius,
               "displacement_constant": kernel.displacement_constant},
    )
    print(f"{len(rows)} operator-norm rows (upper bound {upper}) -> {path}")
    return EXIT_OK


def cmd_action(config: RunConfig) -> int:
    if config.quasitree_path is not None:
        data = parse_quasitree_csv(config.quasitree_path.read_text())
        report = validate_quasitree_kernel(data)
        rows = [("sandwich_and_cnd", "pass" if report.passed else "fail",
                 "; ".join(report.failures))]
        path = _write_csv(
            config, "quasitree.csv", ["check", "status", "witness"], rows,
            extra={"delta": report.delta, "min_eigenvalue": report.min_eigenvalue},
        )
        print(f"quasi-tree kernel: {'pass' if report.passed else 'fail'} -> {path}")
        for failure in report.failures:
            print(f"  {failure}")
        return EXIT_OK if report.passed else EXIT_INVARIANT
    if config.action_path is None:
        print("action command needs --action FILE or --quasitree FILE", file=sys.stderr)
        return EXIT_INPUT
    action = parse_action(config.action_path.read_text(), config.presentation)
    b = ball(config.presentation, config.radius, cap=config.cap)
    kernel = orbit_kernel(action, b)
    growth = orbit_growth_report(kernel)
    rows = [
        (_word(r.word), r.distance, r.norm_f, r.norm_l1, r.norm_e, r.lower_bound)
        for r in growth.norm_report.rows
    ]
    path = _write_csv(
        config, "action.csv",
        ["word", "d", "norm_f", "norm_l1", "norm_E", "lower_bound"],
        rows,
        extra={"target_rank": action.target_rank,
               "verdict": growth.verdict,
               "fitted_constant": growth.fitted_constant},
    )
    print(f"verdict: {growth.verdict} (fitted c = {growth.fitted_constant}) -> {path}")
    return EXIT_OK


# -- the verify suite -----------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str = ""


def _largest_radius_with(b, limit: int) -> int:
    r = 0
    for cand in range(b.radius + 1):
        if b.size_within(cand) <= limit:
            r = cand
    return r


def verify_suite(config: RunConfig) -> list[CheckResult]:
    """Invariant suite over one presentation/combing/radius: cocycle identity,
    norm formula, conditional negative definiteness, per-vector bound,
    properness, plus the structural chain checks feeding them."""
    pres = config.presentation
    results: list[CheckResult] = []
    b = ball(pres, config.radius, cap=config.cap)
    spec = make_bicombing(config.bicombing_kind, b)
    kernel = kernel_from_bicombing(spec)
    if config.sabotage_diagonal is not None:
        i = config.sabotage_diagonal
        kernel.values[i, i] = 1.0
        if kernel.twice is not None:
            kernel.twice[i, i] = 2
    rng = random.Random(config.seed)
    inner = config.radius // 2
    n_inner = b.size_within(inner)
    tol = config.tolerance

    def check(name, passed, witness=""):
        results.append(CheckResult(name, bool(passed), witness if not passed else ""))

    # ball structure
    bad = next((w for w in b.elements
                if b.canonical_index(w[::-1].swapcase()) is None), None)
    check("ball_inverse_closure", bad is None, f"inverse of {_word(bad or '')} missing")
    bad = None
    for i, nbrs in enumerate(b.adjacency):
        for letter, j in nbrs.items():
            if b.adjacency[j].get(letter.swapcase()) != i:
                bad = f"edge {_word(b.elements[i])} -{letter}-> {_word(b.elements[j])}"
                break
        if bad:
            break
    check("ball_adjacency_involutive", bad is None, bad or "")

    # chain structure
    bad = None
    for i in range(1, len(b.elements)):
        s = b.elements[i]
        bd = boundary(combing_chain(spec, "", s), b)
        if bd != {s: 1, "": -1}:
            bad = f"boundary of q[e,{_word(s)}] is {bd}"
            break
    check("boundary_identity", bad is None, bad or "")

    bad = None
    for _ in range(50):
        s = b.elements[rng.randrange(n_inner)]
        z = b.elements[rng.randrange(n_inner)]
        lhs = translate_chain(s, combing_chain(spec, "", z), b)
        rhs = combing_chain(spec, s, b.name(s + z))
        if lhs != rhs:
            bad = f"translate mismatch for s={_word(s)} z={_word(z)}"
            break
    check("equivariance", bad is None, bad or "")

    if spec.antisymmetrized:
        bad = None
        for _ in range(50):
            x = b.elements[rng.randrange(n_inner)]
            y = b.elements[rng.randrange(n_inner)]
            if (combing_chain(spec, x, y) + combing_chain(spec, y, x)).coeffs:
                bad = f"q[{_word(x)},{_word(y)}] + q[{_word(y)},{_word(x)}] != 0"
                break
        check("antisymmetry", bad is None, bad or "")

    bad = None
    for i in range(1, len(b.elements)):
        s = b.elements[i]
        if combing_chain(spec, "", s).l1_norm() < b.distances[i]:
            bad = f"||q[e,{_word(s)}]||_1 < d for {_word(s)}"
            break
    check("combing_lower_bound", bad is None, bad or "")

    # kernel structure
    import numpy as np

    diag = np.flatnonzero(np.diag(kernel.values))
    check("kernel_diagonal_zero", diag.size == 0,
          f"K({diag[0] if diag.size else 0},{diag[0] if diag.size else 0}) != 0")
    check("kernel_symmetry", np.array_equal(kernel.values, kernel.values.T), "K != K^T")
    neg = np.argwhere(kernel.values < 0)
    check("kernel_nonnegative", neg.size == 0,
          f"K{tuple(neg[0]) if neg.size else ()} < 0")

    r_cnd = _largest_radius_with(b, 600)
    ev = cnd_min_eigenvalue(kernel, range(b.size_within(r_cnd)))
    check("kernel_cnd", ev >= -tol,
          f"centered min eigenvalue {ev} on ball({r_cnd})")

    r_cv = _largest_radius_with(b, 200)
    try:
        disc = kernel_cross_validate(spec, radius=r_cv, kernel=kernel)
        check("kernel_cross_validation", disc == 0, f"discrepancy {disc}")
    except AssertionError as exc:
        check("kernel_cross_validation", False, str(exc))

    # cocycle and norms
    bad = None
    for i in range(n_inner):
        for j in range(n_inner):
            res = check_cocycle_identity(b.elements[i], b.elements[j], b)
            if res != 0:
                bad = f"residual {res} at ({_word(b.elements[i])}, {_word(b.elements[j])})"
                break
        if bad:
            break
    check("cocycle_identity", bad is None, bad or "")

    bad = None
    for i in range(1, len(b.elements)):
        s = b.elements[i]
        formula = math.sqrt(max(kernel.value(i, 0), 0.0)) + 2.0
        direct = norm_e(EVector({s: 1, "": -1}), kernel)
        if abs(direct - formula) > tol:
            bad = f"norm formula off by {abs(direct - formula)} at {_word(s)}"
            break
    check("norm_formula", bad is None, bad or "")

    outer = config.radius - inner
    n_outer = b.size_within(outer)
    bad = None
    for _ in range(100):
        s = b.elements[rng.randrange(n_inner)]
        support = rng.sample(range(n_outer), k=min(4, n_outer))
        coeffs = [rng.randint(-3, 3) for _ in support]
        coeffs[-1] -= sum(coeffs)
        v = EVector({b.elements[i]: c for i, c in zip(support, coeffs)})
        if not v.coeffs:
            continue
        res = per_vector_bound_check(s, v, kernel)
        if not res.passed:
            bad = (f"lhs {res.lhs} > rhs {res.rhs} for s={_word(s)} "
                   f"supp={[_word(w) for w in v.support()]}")
            break
    check("per_vector_bound", bad is None, bad or "")

    try:
        report = properness_report(kernel)
        worst = min(
            (r.norm_e - r.lower_bound for r in report.rows), default=0.0
        )
        check("properness_rows", worst >= -tol, f"worst margin {worst}")
    except AssertionError as exc:
        check("properness_rows", False, str(exc))

    return results


def cmd_verify(config: RunConfig) -> int:
    results = verify_suite(config)
    rows = [(r.name, "pass" if r.passed else "FAIL", r.witness) for r in results]
    path = _write_csv(config, "verify.csv", ["check", "status", "witness"], rows)
    failures = [r for r in results if not r.passed]
    for r in results:
        line = f"{'PASS' if r.passed else 'FAIL'} {r.name}"
        if not r.passed:
            line += f" [{r.witness}]"
        print(line)
    print(f"-> {path}")
    return EXIT_INVARIANT if failures else EXIT_OK


# -- entry point -----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l1comb",
        description="combings, displacement kernels and cocycle growth on "
                    "finitely presented groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ball", "bicombing-stats", "verify", "opnorm", "norms", "action"):
        p = sub.add_parser(name)
        p.add_argument("--presentation", required=True, type=Path)
        p.add_argument("--radius", type=int, default=3)
        p.add_argument("--bicombing", choices=["auto", *KIND_BY_FLAG], default="auto")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=Path("reports"))
        p.add_argument("--cap", type=int, default=DEFAULT_BALL_CAP)
        p.add_argument("--tol", type=float, default=BOUND_TOLERANCE)
        if name == "action":
            p.add_argument("--action", type=Path, default=None)
            p.add_argument("--quasitree", type=Path, default=None)
        if name == "verify":
            p.add_argument("--sabotage-diagonal", type=int, default=None,
                           help="verifier self-test: corrupt one kernel "
                                "diagonal entry and expect exit 1")
    return parser


_HANDLERS = {
    "ball": cmd_ball,
    "bicombing-stats": cmd_bicombing_stats,
    "verify": cmd_verify,
    "opnorm": cmd_opnorm,
    "norms": cmd_norms,
    "action": cmd_action,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = args.presentation.read_text()
    except OSError as exc:
        print(f"cannot read presentation: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        presentation = parse_presentation(text)
        if args.radius < 0:
            raise PresentationError("radius must be >= 0")
        config = RunConfig(
            command=args.command,
            presentation_path=args.presentation,
            radius=args.radius,
            bicombing_kind=_resolve_kind(args.bicombing, presentation),
            seed=args.seed,
            tolerance=args.tol,
            out_dir=args.out,
            cap=args.cap,
            action_path=getattr(args, "action", None),
            quasitree_path=getattr(args, "quasitree", None),
            sabotage_diagonal=getattr(args, "sabotage_diagonal", None),
            presentation=presentation,
        )
        if config.bicombing_kind == "tree_geodesic" and presentation.reduction_mode != "free":
            raise PresentationError("tree bicombing requires a free presentation")
        return _HANDLERS[args.command](config)
    except BallCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (PresentationError, WordError, ActionError, OSError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
