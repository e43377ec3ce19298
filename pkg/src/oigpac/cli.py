"""Command-line entry point.

Every subcommand writes ``results.json`` (summary) and ``results.csv`` (one
row per instance or trial) into ``--out``.  Exit status: 0 on success, 1 when
a verification fails, 2 on bad input (with a one-line JSON error on stderr).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from math import sqrt
from pathlib import Path

import numpy as np

from . import concentration, verify
from .hypothesis_space import InputError, index_to_labeling, labeling_to_index, load_class, load_sample, vc_dimension
from .losses import ZERO_ONE, load_loss_table
from .oig_agnostic import (
    BRUTE_FORCE_GUARD,
    ORIENT_GUARD,
    AgnosticOIGClassifier,
    compute_credits,
    max_density_bruteforce,
    orient_agnostic,
    phi_full,
)
from .oig_realizable import RealizableOIGClassifier, build_realizable_oig, orient_min_max_outdegree, transductive_error
from .rademacher import exact_rademacher, mc_rademacher, phi_rademacher_identity_check, vc_rademacher_bound
from .reduction import (
    k_agnostic,
    k_realizable,
    oig_agnostic_rate,
    oig_agnostic_sample_size,
    oig_realizable_sample_size,
    pac_budget,
    repeated_point_risk_excess,
    repeated_point_select,
    run_reduction_agnostic,
    run_reduction_realizable,
    validation_size,
)
from .sim import best_in_class, exact_risk, load_distribution, rng_for, wilson_interval


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _labeling_str(u) -> str:
    return "".join("+" if b == 1 else "-" for b in u)


def write_results(out: Path, summary: dict, rows: list[dict]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.json").write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    with (out / "results.csv").open("w", newline="") as fh:
        if rows:
            fields = list(rows[0])
            for r in rows[1:]:
                fields += [k for k in r if k not in fields]
            w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _jsonable(v) for k, v in r.items()})


def _load_class_and_sample(args):
    H = load_class(args.class_path)
    T, labels = load_sample(args.sample, H.domain_size)
    return H, T, labels


def _loss(spec: str):
    if spec == "zero-one":
        return ZERO_ONE
    if spec.startswith("table:"):
        return load_loss_table(spec[len("table:"):])
    raise InputError(f"unknown loss {spec!r}; use zero-one or table:<path>")


# -- subcommands ------------------------------------------------------------------

def cmd_oig_realizable(args):
    H, T, labels = _load_class_and_sample(args)
    G = build_realizable_oig(H, T)
    orient = orient_min_max_outdegree(G)
    out = orient.outdegree()
    learner = RealizableOIGClassifier(H)
    rows = []
    worst = Fraction(0)
    for j, v in enumerate(G.vertices):
        err = transductive_error(learner, T, v)
        worst = max(worst, err)
        rows.append(dict(vertex=_labeling_str(v), outdegree=int(out[j]), transductive_error=err))
    summary = dict(t_star=orient.achieved_max_outdegree, vertices=len(G.vertices), edges=len(G.edges),
                   max_outdeg_per_vertex={_labeling_str(v): int(out[j]) for j, v in enumerate(G.vertices)})
    if labels is not None:
        summary["transductive_error"] = transductive_error(learner, T, labels)
    else:
        summary["transductive_error"] = worst
        summary["transductive_error_is_worst_case"] = True
    return summary, rows, True


def cmd_oig_agnostic(args):
    H, T, labels = _load_class_and_sample(args)
    oig = compute_credits(H, T)
    if oig.n > ORIENT_GUARD:
        raise InputError(f"sample length {oig.n} exceeds the orientation guard {ORIENT_GUARD}")
    orient, t = orient_agnostic(oig)
    out = orient.outdegree()
    rows = [dict(vertex=_labeling_str(index_to_labeling(v, oig.n)), credit=int(oig.credits[v]),
                 outdegree=int(out[v]), excess=int(out[v] - oig.credits[v])) for v in range(oig.num_vertices)]
    summary = dict(t_star=t, phi_full=phi_full(oig).value, n=oig.n)
    if labels is not None:
        from .oig_agnostic import agnostic_transductive_excess

        summary["transductive_excess"] = agnostic_transductive_excess(AgnosticOIGClassifier(H), T, labels, H)
        summary["labels_vertex_excess"] = rows[labeling_to_index(labels)]["excess"]
    return summary, rows, True


def cmd_density(args):
    H, T, _ = _load_class_and_sample(args)
    oig = compute_credits(H, T)
    full = phi_full(oig)
    summary = dict(n=oig.n, phi_full=full.value, sum_credits=int(oig.credits.sum()))
    rows = []
    if oig.n <= BRUTE_FORCE_GUARD:
        U, best = max_density_bruteforce(oig)
        summary.update(max_phi=best.value, maximizer_size=len(U), maximum_at_full_cube=best == full)
        rows = [dict(vertex=_labeling_str(u)) for u in sorted(U)]
    if oig.n <= ORIENT_GUARD:
        summary["t_star"] = orient_agnostic(oig)[1]
    return summary, rows, True


def cmd_rademacher(args):
    H, T, _ = _load_class_and_sample(args)
    oig = compute_credits(H, T)
    Hres = oig.restriction_labelings()
    d = vc_dimension(H)
    summary = dict(n=len(T), vc=d, vc_bound=vc_rademacher_bound(d, len(T)))
    rows = []
    if not args.no_exact:
        summary["exact"] = exact_rademacher(Hres)
    if args.mc:
        trials, seed = args.mc
        est = mc_rademacher(Hres, trials, seed)
        summary.update(estimate=est.value, se=est.se, trials=trials, seed=seed)
        rows.append(dict(mode="monte_carlo", value=est.value, se=est.se))
    if "exact" in summary:
        rows.append(dict(mode="exact", value=summary["exact"], se=0))
    return summary, rows, True


def cmd_identity(args):
    H, T, _ = _load_class_and_sample(args)
    res = phi_rademacher_identity_check(compute_credits(H, T))
    summary = dict(n=len(T), equal=res.equal, phi_full=res.phi, half_n_rademacher=res.half_n_rademacher)
    return summary, [summary], res.equal


def cmd_bounds(args):
    if args.which == "azuma":
        b = concentration.azuma_additive(_need(args, "k"), _need(args, "c"), _need(args, "t"))
    elif args.which == "mazuma":
        b = concentration.azuma_multiplicative(_need(args, "mu"), _need(args, "delta_mult"), _need(args, "c"))
    else:
        b = concentration.hoeffding(_need(args, "t"), _need(args, "count"))
    summary = dict(which=args.which, probability_bound=b.probability_bound, **b.params)
    return summary, [summary], True


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise InputError(f"--{name.replace('_', '-')} is required for --which {args.which}")
    return v


def cmd_reduce(args):
    H = load_class(args.class_path)
    D = load_distribution(args.dist, H.domain_size)
    d = vc_dimension(H)
    n, delta = args.n, args.delta
    _unit("delta", delta)
    rows = []
    if args.mode == "realizable":
        rate = Fraction(d, n) if d else Fraction(1, n)
        k = args.k or k_realizable(float(rate), delta)
        threshold = Fraction(args.epsilon) if args.epsilon is not None else 8 * rate
        best, _ = best_in_class(D, H)
        if best != 0:
            raise InputError("realizable mode needs a distribution realized by the class")
        failures = 0
        for t in range(args.trials):
            X, y = D.sample(n + k, rng_for(args.seed, t))
            h = run_reduction_realizable(RealizableOIGClassifier(H), X, y, n, _loss(args.loss))
            r = exact_risk(h.predict(np.arange(H.domain_size)), D)
            failures += r > threshold
            rows.append(dict(trial=t, risk=r, excess=r, failed=r > threshold))
        budget = pac_budget("realizable", min(float(threshold), 1.0), delta, oig_realizable_sample_size(max(d, 1)))
        extra = dict(k=k, rate=rate, threshold=threshold, budget=budget)
    else:
        eps_ag = oig_agnostic_rate(max(d, 1), n)
        if eps_ag >= 1:
            raise InputError(f"n={n} is too small: the learner's rate 16 sqrt(d/n) is {eps_ag:.3f} >= 1")
        k = args.k or k_agnostic(eps_ag, delta)
        k_val = args.k_val or validation_size(k, delta, eps_ag)
        eps = args.epsilon if args.epsilon is not None else 4 * eps_ag
        best, _ = best_in_class(D, H)
        failures = 0
        if H.domain_size == 1 and len(H) == 2:
            # one-point domain: all trials advance together through the batched engine
            q = D.probs.get((0, 1), Fraction(0))
            draws = [rng_for(args.seed, t) for t in range(args.trials)]
            plus_S = np.array([rng.random(n + k) < float(q) for rng in draws])
            plus_val = np.array([rng.random(k_val) < float(q) for rng in draws])
            idx, p = repeated_point_select(plus_S, plus_val, n)
            for t in range(args.trials):
                ex = repeated_point_risk_excess(p[t], q)
                failures += ex > Fraction(eps)
                rows.append(dict(trial=t, selected=int(idx[t]), excess=ex, failed=ex > Fraction(eps)))
        else:
            if n + k > ORIENT_GUARD:
                raise InputError(f"n + k = {n + k} exceeds the orientation guard {ORIENT_GUARD}; pass a smaller --k")
            for t in range(args.trials):
                rng = rng_for(args.seed, t)
                X, y = D.sample(n + k, rng)
                Xv, yv = D.sample(k_val, rng)
                sel = run_reduction_agnostic(AgnosticOIGClassifier(H), X, y, Xv, yv, n)
                ex = exact_risk(sel.predictor, D) - best
                failures += ex > Fraction(eps)
                rows.append(dict(trial=t, selected=sel.index, excess=ex, failed=ex > Fraction(eps)))
        budget = pac_budget("agnostic", min(eps, 1.0), delta, oig_agnostic_sample_size(max(d, 1)))
        extra = dict(k=k, k_val=k_val, epsilon=eps, epsilon_ag=eps_ag, budget=budget)
    lo, hi = wilson_interval(failures, args.trials)
    summary = dict(mode=args.mode, n=n, delta=delta, vc=d, trials=args.trials, seed=args.seed,
                   failure_rate=failures / args.trials, wilson_ci=[lo, hi], within_delta=hi <= delta, **extra)
    return summary, rows, True


def _unit(name, v):
    if not 0 < v < 1:
        raise InputError(f"--{name} must lie in (0, 1)")


def cmd_sweep(args):
    H = load_class(args.class_path)
    d = vc_dimension(H)
    rng = rng_for(args.seed)
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        if H.domain_size >= n:
            T = tuple(range(n))
        else:
            T = tuple(int(v) for v in rng.integers(0, H.domain_size, size=n))
        oig = compute_credits(H, T)
        phi = phi_full(oig).value
        row = dict(n=n, vc=d, phi_full=phi, phi_over_n=phi / n, rademacher=exact_rademacher(oig.restriction_labelings()),
                   excess_bound=oig_agnostic_rate(d, n), phi_bound=16 * sqrt(n * d))
        if args.orient and n <= ORIENT_GUARD:
            row["t_star"] = orient_agnostic(oig)[1]
        rows.append(row)
    return dict(vc=d, n_min=args.n_min, n_max=args.n_max, rows=len(rows)), rows, True


VERIFY_NAMES = ["lemma4", "symmetrize", "identity", "bounds", "vc_rademacher", "realizable",
                "duality", "algorithm1", "algorithm2", "martingale", "wrappers"]


def _verify_kwargs(name, args) -> dict:
    kw = {}
    if args.seed is not None and name not in ("symmetrize", "wrappers"):
        kw["seed"] = args.seed
    if args.n is not None:
        if name in ("lemma4", "duality", "symmetrize"):
            kw["ns"] = (args.n,)
        elif name in ("identity", "vc_rademacher", "bounds"):
            kw["max_n"] = args.n
        elif name == "wrappers":
            kw["max_n"] = args.n
        elif name == "algorithm2":
            kw["n"] = args.n
    if args.trials is not None:
        key = {"lemma4": "classes_per_n", "duality": "classes_per_n", "identity": "count",
               "vc_rademacher": "count", "bounds": "classes", "realizable": "classes",
               "algorithm1": "trials", "algorithm2": "trials", "martingale": "traces"}.get(name)
        if key:
            kw[key] = args.trials
    return kw


def cmd_verify(args):
    names = VERIFY_NAMES if args.which == "all" else [args.which]
    reports = [verify.ALL_CHECKS[name](**_verify_kwargs(name, args)) for name in names]
    for r in reports:
        print(r.line(), file=sys.stderr)
    if len(reports) == 1:
        r = reports[0]
        summary = dict(check=r.name, **{"pass": r.passed}, **r.summary)
        return summary, r.rows, r.passed
    summary = {"pass": all(r.passed for r in reports),
                   "checks": {r.name: dict(**{"pass": r.passed}, **r.summary) for r in reports}}
    rows = [dict(check=r.name, passed=r.passed) for r in reports]
    return summary, rows, summary["pass"]


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oigpac", description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--config", help="JSON file of option values; command-line flags win")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_inputs(sp, sample=True):
        sp.add_argument("--class", dest="class_path", required=True, help="hypothesis class file")
        if sample:
            sp.add_argument("--sample", required=True, help="sample file: point index per line, optional label")
        return sp

    oig = sub.add_parser("oig", help="one-inclusion graph orientation")
    oig_sub = oig.add_subparsers(dest="variant", required=True, parser_class=_Parser)
    with_inputs(oig_sub.add_parser("realizable")).set_defaults(func=cmd_oig_realizable)
    with_inputs(oig_sub.add_parser("agnostic")).set_defaults(func=cmd_oig_agnostic)

    with_inputs(sub.add_parser("density", help="discounted density of the agnostic graph")).set_defaults(func=cmd_density)

    sp = with_inputs(sub.add_parser("rademacher", help="empirical Rademacher complexity"))
    sp.add_argument("--mc", nargs=2, type=int, metavar=("TRIALS", "SEED"))
    sp.add_argument("--no-exact", action="store_true")
    sp.set_defaults(func=cmd_rademacher)

    with_inputs(sub.add_parser("identity", help="full-cube density vs Rademacher")).set_defaults(func=cmd_identity)

    sp = sub.add_parser("verify", help="run an acceptance check")
    sp.add_argument("which", choices=VERIFY_NAMES + ["all"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("reduce", help="Monte-Carlo run of a transductive-to-PAC reduction")
    sp.add_argument("--mode", choices=["agnostic", "realizable"], required=True)
    sp.add_argument("--class", dest="class_path", required=True)
    sp.add_argument("--dist", required=True, help="CSV rows point,label,numerator,denominator")
    sp.add_argument("--epsilon", type=float, help="failure threshold (default: 4x or 8x the learner rate)")
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--k-val", type=int)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--loss", default="zero-one", help="zero-one or table:<path>")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("bounds", help="concentration tail bounds")
    sp.add_argument("--which", choices=["azuma", "mazuma", "hoeffding"], required=True)
    for name, typ in [("k", int), ("c", float), ("t", float), ("mu", float), ("delta-mult", float), ("count", int)]:
        sp.add_argument(f"--{name}", type=typ)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("sweep", help="density, Rademacher value and bounds across sample sizes")
    sp.add_argument("--class", dest="class_path", required=True)
    sp.add_argument("--n-min", type=int, default=1)
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--orient", action="store_true", help="also compute the optimal excess out-degree")
    sp.set_defaults(func=cmd_sweep)
    return p


def _subparser_chain(parser, argv):
    """Parsers touched by ``argv``, outermost first."""
    chain, cur = [parser], parser
    for tok in argv:
        for action in cur._actions:
            if isinstance(action, argparse._SubParsersAction) and tok in action.choices:
                cur = action.choices[tok]
                chain.append(cur)
                break
    return chain


def _explicit_dests(parser, argv) -> set[str]:
    dests = set()
    for p in _subparser_chain(parser, argv):
        for tok in argv:
            opt = tok.split("=", 1)[0]
            action = p._option_string_actions.get(opt)
            if action is not None:
                dests.add(action.dest)
    return dests


def parse(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise InputError(f"config file not found: {path}")
        try:
            config = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"config is not valid JSON: {exc.msg}") from None
        explicit = _explicit_dests(parser, argv)
        for key, value in config.items():
            dest = key.replace("-", "_")
            if dest == "class":
                dest = "class_path"
            if dest in explicit or dest in ("command", "variant", "func"):
                continue
            if not hasattr(args, dest):
                raise InputError(f"unknown config key {key!r}")
            setattr(args, dest, value)
    return args


def main(argv=None) -> int:
    try:
        args = parse(argv)
        summary, rows, ok = args.func(args)
        summary = dict(command=" ".join(filter(None, [args.command, getattr(args, "variant", None)])), **summary)
        write_results(Path(args.out), summary, rows)
        print(json.dumps(_jsonable(summary), sort_keys=True))
        return 0 if ok else 1
    except (InputError, FileNotFoundError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
