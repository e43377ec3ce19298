"""One runner per acceptance check.

Each runner returns a :class:`CheckReport`; the CLI writes its summary to
``results.json`` and its rows to ``results.csv``.  Default arguments are the
full-size acceptance settings.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import ceil, sqrt

import numpy as np

from .hypothesis_space import HypothesisClass, index_to_labeling, random_class, vc_dimension
from .learners import ERMClassifier, LastLabelClassifier, MonotoneWrapper, SymmetricWrapper
from .oig_agnostic import (
    AgnosticOIGClassifier,
    agnostic_oig_from_restriction,
    compute_credits,
    learner_excess_batch,
    max_density_bruteforce,
    orient_agnostic,
    phi_full,
    subset_table,
)
from .oig_realizable import (
    RealizableOIGClassifier,
    brute_force_min_max_outdegree,
    build_realizable_oig,
    orient_min_max_outdegree,
    transductive_error,
)
from .rademacher import exact_rademacher, within_vc_bound
from .reduction import (
    azuma_threshold,
    k_agnostic,
    k_realizable,
    oig_agnostic_rate,
    repeated_point_risk_excess,
    repeated_point_select,
    repeated_point_traces,
    run_reduction_realizable,
    validation_size,
)
from .sim import FiniteDistribution, exact_risk, rng_for, wilson_interval


@dataclass
class CheckReport:
    name: str
    passed: bool
    summary: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        keys = ", ".join(f"{k}={v}" for k, v in self.summary.items() if not isinstance(v, (list, dict)))
        return f"[{status}] {self.name}: {keys}"


def _class_suite(n: int, count: int, rng) -> list[HypothesisClass]:
    """``count`` random classes on ``n`` points plus the full class and a singleton."""
    suite = [HypothesisClass.full(n), HypothesisClass(n, (tuple([1] * n),))]
    for _ in range(count):
        size = int(rng.integers(1, 2**n + 1))
        suite.append(random_class(rng, n, size))
    return suite


def _fmt(x) -> str:
    return str(Fraction(x))


# -- density maximum at the full hypercube --------------------------------------------

def check_lemma4(ns=(1, 2, 3, 4), classes_per_n: int = 50, seed: int = 0) -> CheckReport:
    """Brute-force density maximum equals the density of the full hypercube."""
    rows, bad = [], 0
    for n in ns:
        rng = rng_for(seed, n)
        for c, H in enumerate(_class_suite(n, classes_per_n, rng)):
            oig = compute_credits(H, tuple(range(n)))
            U, best = max_density_bruteforce(oig)
            full = phi_full(oig)
            ok = best.value == full.value and len(U) == oig.num_vertices
            bad += not ok
            rows.append(dict(n=n, instance=c, class_size=len(H), max_phi=_fmt(best.value),
                             phi_full=_fmt(full.value), maximizer_size=len(U), ok=ok))
    return CheckReport("lemma4", bad == 0, dict(instances=len(rows), violations=bad), rows)


def check_duality(ns=(1, 2, 3, 4), classes_per_n: int = 50, seed: int = 0) -> CheckReport:
    """Optimal excess out-degree equals the ceiling of the density maximum."""
    rows, bad = [], 0
    for n in ns:
        rng = rng_for(seed, n)
        for c, H in enumerate(_class_suite(n, classes_per_n, rng)):
            oig = compute_credits(H, tuple(range(n)))
            _, best = max_density_bruteforce(oig)
            orient, t = orient_agnostic(oig)
            target = ceil(best.value)
            ok = t == target and orient.max_excess == t
            bad += not ok
            rows.append(dict(n=n, instance=c, max_phi=_fmt(best.value), t_star=t, ceil_phi=target, ok=ok))
    return CheckReport("duality", bad == 0, dict(instances=len(rows), violations=bad), rows)


# -- density of the full cube versus Rademacher complexity ----------------------------

def identity_instances(count: int = 200, max_n: int = 12, seed: int = 0):
    """Random ``(H, T)`` pairs with ``1 <= |T| <= max_n``; points may repeat."""
    rng = rng_for(seed)
    for j in range(count):
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(1, min(n, 10) + 1))
        size = int(rng.integers(1, min(2**m, 40) + 1))
        H = random_class(rng, m, size)
        T = tuple(int(v) for v in rng.integers(0, m, size=n))
        if j % 2 == 0 and m >= n:
            T = tuple(int(v) for v in rng.permutation(m)[:n])
        yield H, T


def _identity_rows(count, max_n, seed):
    for H, T in identity_instances(count, max_n, seed):
        oig = compute_credits(H, T)
        rad = exact_rademacher(oig.restriction_labelings())
        yield H, T, oig, rad


def check_identity(count: int = 200, max_n: int = 12, seed: int = 0) -> CheckReport:
    """Full-cube density equals ``(n/2)`` times the exact Rademacher complexity."""
    rows, bad = [], 0
    for H, T, oig, rad in _identity_rows(count, max_n, seed):
        phi = phi_full(oig).value
        rhs = Fraction(len(T), 2) * rad
        ok = phi == rhs
        bad += not ok
        rows.append(dict(n=len(T), class_size=len(H), phi_full=_fmt(phi), half_n_rademacher=_fmt(rhs), ok=ok))
    return CheckReport("identity", bad == 0, dict(instances=len(rows), violations=bad), rows)


def check_vc_rademacher(count: int = 200, max_n: int = 12, seed: int = 0) -> CheckReport:
    """Exact Rademacher complexity is at most ``31 sqrt(VC/n)``."""
    rows, bad = [], 0
    for H, T, oig, rad in _identity_rows(count, max_n, seed):
        d = vc_dimension(H)
        ok = within_vc_bound(rad, d, len(T))
        bad += not ok
        rows.append(dict(n=len(T), vc=d, rademacher=_fmt(rad), bound=31 * sqrt(d / len(T)), ok=ok))
    return CheckReport("vc_rademacher", bad == 0, dict(instances=len(rows), violations=bad), rows)


# -- agnostic learner bounds --------------------------------------------------------------

def check_bounds(classes: int = 50, max_n: int = 12, exhaustive_n: int = 8,
                 samples: int = 10_000, seed: int = 0) -> CheckReport:
    """Full-cube density and the learner's transductive excess against the VC rates."""
    rng = rng_for(seed)
    rows, bad_phi, bad_excess, checked = [], 0, 0, 0
    for c in range(classes):
        n = 1 + c % max_n
        size = int(rng.integers(1, min(2**n, 64) + 1))
        H = random_class(rng, n, size)
        T = tuple(int(v) for v in rng.permutation(n))
        d = vc_dimension(H)
        oig = compute_credits(H, T)
        phi = phi_full(oig).value
        phi_ok = phi <= 0 or phi * phi <= 256 * n * d
        bad_phi += not phi_ok
        if n <= exhaustive_n:
            ids = np.arange(1 << n)
        else:
            ids = rng.integers(0, 1 << n, size=samples)
        # same learner as AgnosticOIGClassifier, scored for all labelings at once
        num = learner_excess_batch(H, T, ids)
        worst = Fraction(int(num.max()), n)
        # excess num/n breaks the rate when num^2 > 256 d n
        nbad = int(np.count_nonzero((num > 0) & (num * num > 256 * d * n)))
        bad_excess += nbad
        checked += len(ids)
        rows.append(dict(instance=c, n=n, vc=d, phi_full=_fmt(phi), phi_bound=16 * sqrt(n * d),
                         labelings=len(ids), worst_excess=_fmt(worst),
                         excess_bound=oig_agnostic_rate(d, n), violations=nbad, ok=phi_ok and nbad == 0))
    summary = dict(classes=classes, labelings=checked, phi_violations=bad_phi, excess_violations=bad_excess)
    return CheckReport("bounds", bad_phi + bad_excess == 0, summary, rows)


# -- realizable orientation -----------------------------------------------------------------

def check_realizable(classes: int = 100, max_vertices: int = 12, max_n: int = 8, seed: int = 0) -> CheckReport:
    """Flow optimum equals the brute-force optimum, stays below VC, and bounds the error."""
    rng = rng_for(seed)
    rows, bad = [], 0
    for c in range(classes):
        m = int(rng.integers(1, max_n + 1))
        H = random_class(rng, m, int(rng.integers(1, min(2**m, max_vertices) + 1)))
        d = vc_dimension(H)
        n = int(rng.integers(1, max_n + 1))
        for T in (tuple(range(m)), tuple(int(v) for v in rng.integers(0, m, size=n))):
            G = build_realizable_oig(H, T)
            t = orient_min_max_outdegree(G).achieved_max_outdegree
            brute = brute_force_min_max_outdegree(G)
            learner = RealizableOIGClassifier(H)
            worst = max(transductive_error(learner, T, [h[x] for x in T]) for h in H)
            ok = t == brute and t <= d and worst <= Fraction(d, len(T))
            bad += not ok
            rows.append(dict(instance=c, n=len(T), vertices=len(G.vertices), edges=len(G.edges), vc=d,
                             t_star=t, brute_force=brute, worst_error=_fmt(worst), ok=ok))
    return CheckReport("realizable", bad == 0, dict(instances=len(rows), violations=bad), rows)


# -- potential under symmetrization ------------------------------------------------------------

def g_monotonicity(n: int) -> dict:
    """Count triples (restriction, U, i) where symmetrizing U lowers the potential.

    ``alpha`` is the density maximum of each restriction.  Restrictions with
    ``alpha <= 0`` are skipped and counted as degenerate.  Also counts the
    violations among density-maximizing ``U`` only.
    """
    N = 1 << n
    total = bad = bad_at_max = degenerate = 0
    example = None
    for hmask in range(1, 1 << N):
        oig = agnostic_oig_from_restriction([v for v in range(N) if hmask >> v & 1], n)
        s, member, edges, credit, size = subset_table(oig)
        num = edges - credit
        alpha = max(Fraction(int(a), int(b)) for a, b in zip(num, size))
        if alpha <= 0:
            degenerate += 1
            continue
        g = [Fraction(int(a)) - alpha * int(b) for a, b in zip(num, size)]
        is_max = [Fraction(int(a), int(b)) == alpha for a, b in zip(num, size)]
        bits = 1 << np.arange(N)
        for i in range(n):
            flip = np.arange(N) ^ (1 << i)
            sym = (member | member[:, flip]).astype(np.int64) @ bits
            for j, sj in enumerate(sym):
                total += 1
                if g[int(sj) - 1] < g[j]:
                    bad += 1
                    bad_at_max += is_max[j]
                    if example is None:
                        example = dict(
                            restriction=[index_to_labeling(v, n) for v in oig.restriction.tolist()],
                            U=[index_to_labeling(v, n) for v in np.flatnonzero(member[j]).tolist()],
                            i=i, alpha=_fmt(alpha), g_U=_fmt(g[j]), g_sym=_fmt(g[int(sj) - 1]),
                        )
    return dict(n=n, triples=total, violations=bad, violations_at_maximizers=bad_at_max,
                degenerate_alpha=degenerate, example=example)


def check_symmetrize(ns=(1, 2, 3)) -> CheckReport:
    """Symmetrizing any U never lowers the potential, for every restriction."""
    rows = [g_monotonicity(n) for n in ns]
    bad = sum(r["violations"] for r in rows)
    summary = dict(triples=sum(r["triples"] for r in rows), violations=bad,
                   violations_at_maximizers=sum(r["violations_at_maximizers"] for r in rows),
                   degenerate_alpha=sum(r["degenerate_alpha"] for r in rows))
    ex = next((r["example"] for r in rows if r["example"]), None)
    if ex:
        summary["example"] = ex
    flat = [{k: v for k, v in r.items() if k != "example"} for r in rows]
    return CheckReport("symmetrize", bad == 0, summary, flat)


# -- wrappers -------------------------------------------------------------------------------

def _samples(domain: int, size: int):
    for pts in product(range(domain), repeat=size):
        for labs in product((1, -1), repeat=size):
            yield np.array(pts), np.array(labs)


def check_wrappers(domain: int = 2, max_n: int = 3) -> CheckReport:
    """Permutation invariance of the wrappers and the exact monotonization identity."""
    H3 = HypothesisClass.full(3)
    rows, bad = [], 0
    sym_learners = {
        "symmetric(last_label)": SymmetricWrapper(LastLabelClassifier()),
        "monotone(symmetric(last_label))": MonotoneWrapper(SymmetricWrapper(LastLabelClassifier())),
        "monotone(erm)": MonotoneWrapper(ERMClassifier(H3)),
    }
    for name, est in sym_learners.items():
        checked = fails = 0
        for X, y in _samples(3, 3):
            ref = None
            for perm in permutations(range(3)):
                p = list(perm)
                out = est.fit(X[p], y[p]).predict_exact_proba(np.arange(3))
                ref = out if ref is None else ref
                fails += out != ref
                checked += 1
        bad += fails
        rows.append(dict(check="permutation", learner=name, cases=checked, violations=fails))
    H = HypothesisClass.full(domain)
    bases = {
        "last_label": LastLabelClassifier(),
        "erm": ERMClassifier(H),
        "agnostic_oig": AgnosticOIGClassifier(H),
    }
    for name, base in bases.items():
        wrapped = MonotoneWrapper(base)
        for n in range(1, max_n + 1):
            checked = fails = 0
            for X, y in _samples(domain, n + 1):
                lhs = transductive_error(wrapped, X, y)
                rhs = sum(
                    (transductive_error(base, np.delete(X, i), np.delete(y, i)) for i in range(n + 1)),
                    Fraction(0),
                ) / (n + 1)
                fails += lhs != rhs
                checked += 1
            bad += fails
            rows.append(dict(check="monotone_identity", learner=name, n=n, cases=checked, violations=fails))
    return CheckReport("wrappers", bad == 0, dict(cases=sum(r["cases"] for r in rows), violations=bad), rows)


# -- end-to-end reductions ----------------------------------------------------------------------

ONE_POINT = HypothesisClass.full(1)


def check_algorithm1(noise=(Fraction(1, 20), Fraction(1, 5), Fraction(2, 5)), trials: int = 2000,
                     d: int = 1, eps_ag: float = 1 / 8, delta: float = 0.1, seed: int = 0) -> CheckReport:
    """Validation-selection reduction with the one-point agnostic OIG learner.

    The sample size ``n`` solves ``16 sqrt(d/n) = eps_ag`` and the target is
    ``4 eps_ag``; ``k`` and ``k'`` are computed at ``eps_ag``.
    """
    n = ceil(256 * d / eps_ag**2)
    eps = 4 * oig_agnostic_rate(d, n)
    k = k_agnostic(eps_ag, delta)
    k_val = validation_size(k, delta, eps_ag)
    rows, all_ok = [], True
    for j, eta in enumerate(noise):
        q = 1 - Fraction(eta)  # the planted label is +1
        rng = rng_for(seed, j)
        plus_S = rng.random((trials, n + k)) < float(q)
        plus_val = rng.random((trials, k_val)) < float(q)
        _, p_sel = repeated_point_select(plus_S, plus_val, n)
        excess = [repeated_point_risk_excess(p, q) for p in p_sel]
        failures = sum(e > Fraction(eps) for e in excess)
        lo, hi = wilson_interval(failures, trials)
        ok = hi <= delta
        all_ok &= ok
        # selection step alone: excess above 3 eps_ag, whose stated bound is 2 delta but proven 3 delta
        selection = sum(e > 3 * Fraction(eps_ag) for e in excess)
        rows.append(dict(eta=_fmt(eta), trials=trials, failures=failures, rate=failures / trials,
                         wilson_low=lo, wilson_high=hi, selection_rate=selection / trials,
                         selection_bound=round(3 * delta, 12), max_excess=float(max(excess)),
                         mean_excess=float(sum(excess) / trials), ok=ok))
    summary = dict(n=n, epsilon=eps, epsilon_ag=eps_ag, delta=delta, k=k, k_val=k_val,
                   distributions=len(noise), worst_wilson_high=max(r["wilson_high"] for r in rows))
    return CheckReport("algorithm1", all_ok, summary, rows)


def realizable_distributions(m: int = 4) -> list[tuple[str, FiniteDistribution]]:
    """Three realizable distributions for thresholds on ``m`` points."""
    thresholds = HypothesisClass.thresholds(m)
    out = []
    specs = [
        (thresholds.members[m // 2], [Fraction(1, m)] * m),
        (thresholds.members[1], [Fraction(1, 2)] + [Fraction(1, 2 * (m - 1))] * (m - 1)),
        (thresholds.members[m - 1], [Fraction(1, 8)] * (m - 2) + [Fraction(m + 2, 16)] * 2),
    ]
    for h, marg in specs:
        probs = {(x, h[x]): p for x, p in enumerate(marg)}
        out.append(("".join("+" if b == 1 else "-" for b in h), FiniteDistribution(probs, m)))
    return out


def check_algorithm2(trials: int = 2000, m: int = 4, n: int = 20, delta: float = 0.1, seed: int = 0) -> CheckReport:
    """Median-aggregation reduction with the realizable OIG learner on thresholds."""
    H = HypothesisClass.thresholds(m)
    d = vc_dimension(H)
    rate = Fraction(d, n)
    k = k_realizable(float(rate), delta)
    rows, all_ok = [], True
    for j, (name, D) in enumerate(realizable_distributions(m)):
        failures, worst = 0, Fraction(0)
        for t in range(trials):
            X, y = D.sample(n + k, rng_for(seed, j, t))
            h = run_reduction_realizable(RealizableOIGClassifier(H), X, y, n)
            r = exact_risk(h.predict(np.arange(m)), D)
            worst = max(worst, r)
            failures += r > 8 * rate
        lo, hi = wilson_interval(failures, trials)
        ok = hi <= delta
        all_ok &= ok
        rows.append(dict(target=name, trials=trials, failures=failures, rate=failures / trials,
                         wilson_low=lo, wilson_high=hi, worst_risk=_fmt(worst), ok=ok))
    summary = dict(vc=d, n=n, rate=_fmt(rate), threshold=_fmt(8 * rate), k=k, delta=delta,
                   worst_wilson_high=max(r["wilson_high"] for r in rows))
    return CheckReport("algorithm2", all_ok, summary, rows)


def check_martingale(settings=((0.25, 0.2), (0.5, 0.1)), noise=(Fraction(1, 10), Fraction(1, 3)),
                     traces: int = 10_000, seed: int = 0) -> CheckReport:
    """Frequencies of the forward and backward deviation events stay below ``delta/2``."""
    rows, all_ok = [], True
    for a, (eps, delta) in enumerate(settings):
        n = ceil((16 / eps) ** 2)
        k = k_agnostic(eps, delta)
        dev = azuma_threshold(k, delta)
        for b, eta in enumerate(noise):
            tr = repeated_point_traces(1 - Fraction(eta), n, k, traces, seed=int(rng_for(seed, a, b).integers(2**31)))
            forward = int(np.count_nonzero(tr.risk_sum - tr.d_sum > dev))
            backward = int(np.count_nonzero(tr.d_sum > k * eps + dev))
            ok = forward / traces <= delta / 2 and backward / traces <= delta / 2
            all_ok &= ok
            rows.append(dict(epsilon=eps, delta=delta, eta=_fmt(eta), n=n, k=k, traces=traces,
                             deviation=dev, forward_rate=forward / traces, backward_rate=backward / traces,
                             mean_d_sum=float(tr.d_sum.mean()), mean_risk_sum=float(tr.risk_sum.mean()), ok=ok))
    return CheckReport("martingale", all_ok, dict(settings=len(settings) * len(noise), traces=traces), rows)


ALL_CHECKS = {
    "lemma4": check_lemma4,
    "identity": check_identity,
    "bounds": check_bounds,
    "vc_rademacher": check_vc_rademacher,
    "realizable": check_realizable,
    "duality": check_duality,
    "algorithm1": check_algorithm1,
    "algorithm2": check_algorithm2,
    "martingale": check_martingale,
    "symmetrize": check_symmetrize,
    "wrappers": check_wrappers,
}
