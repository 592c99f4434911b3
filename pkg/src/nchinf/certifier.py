"""Six equivalent characterizations of finite maximal subdiagonal algebras.

(a) A + A* is dense (exact)
(b) every strictly positive b factors as a* a, a invertible in A (empirical)
(c) A is logmodular (empirical)
(d) Szego's equality holds (optimizer)
(e) A is tau-maximal and has the unique state extension property (exact)
(f) unique state extension and density of A + A* (exact)

Exact verdicts are booleans.  Empirical and optimizer verdicts are one of
"true", "false", "inconclusive"; an inconclusive verdict is compatible with
anything.  A report is consistent when the exact verdicts agree with each
other and no conclusive empirical verdict disagrees with them.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from . import _linalg as la
from .algebra_core import MatrixAlgebra
from .determinant import random_unit_positive
from .factorization import factor_failure_ratio, logmodularity_check, unique_state_extension_check
from .subalgebra import (TracialSubalgebra, diagonal_algebra, l2_density_check, make_nest,
                         tau_maximality_check)
from .szego import SzegoOptions, checked_szego_infimum

TRUE, FALSE, INCONCLUSIVE = "true", "false", "inconclusive"
FAMILIES = ("nest", "span_perturbed_nest", "diagonal")

# failure ratio (certificate / tolerance) beyond which a battery is a certified failure
CERTIFIED_FAILURE_RATIO = 1e3

_STREAM_FACTOR, _STREAM_SZEGO = 1, 3


@dataclass
class CertificationReport:
    condition_a: bool
    condition_b: str
    condition_c: str
    condition_d: str
    condition_e: bool
    condition_f: bool
    consistency: bool
    evidence: dict = field(default_factory=dict)

    @property
    def conditions(self) -> dict:
        return {"a": self.condition_a, "b": self.condition_b, "c": self.condition_c,
                "d": self.condition_d, "e": self.condition_e, "f": self.condition_f}

    @property
    def falsification(self) -> bool:
        return not self.consistency

    @property
    def all_true(self) -> bool:
        return all(v is True or v == TRUE for v in self.conditions.values())

    @property
    def all_false(self) -> bool:
        return all(v is False or v == FALSE for v in self.conditions.values())

    def to_dict(self) -> dict:
        return {"format": 1, "conditions": self.conditions,
                "consistency": self.consistency, "evidence": self.evidence}


def _ratio_verdict(ok: bool, worst: float) -> str:
    if ok:
        return TRUE
    return FALSE if worst > CERTIFIED_FAILURE_RATIO else INCONCLUSIVE


def _factorization_battery(S: TracialSubalgebra, trials: int, seed: int):
    ratios = []
    for t in range(trials):
        b = random_unit_positive(S.alg, la.rng_for(seed, _STREAM_FACTOR, t))
        ratios.append(max(factor_failure_ratio(S, b, "right"), factor_failure_ratio(S, b, "left")))
    worst = max(ratios, default=0.0)
    passed = sum(r <= 1.0 for r in ratios)
    verdict = _ratio_verdict(passed == len(ratios), worst)
    return verdict, {"type": "empirical", "samples": trials, "passed": passed, "worst_ratio": worst}


def szego_battery(S: TracialSubalgebra, samples: int = 5, seed: int = 0):
    """Verdict of Szego's equality over sampled strictly positive h, with per-h summaries."""
    runs = []
    for k in range(samples):
        h = random_unit_positive(S.alg, la.rng_for(seed, _STREAM_SZEGO, k))
        res = checked_szego_infimum(S, h, SzegoOptions(seed=seed))
        runs.append({"status": res.status, "delta_h": res.delta_h, "upper_bound": res.upper_bound,
                     "lower_bound": res.lower_bound, "gap": res.gap})
    statuses = [r["status"] for r in runs]
    if "fails_certified" in statuses:
        verdict = FALSE
    elif statuses and all(s == "holds" for s in statuses):
        verdict = TRUE
    else:
        verdict = INCONCLUSIVE
    return verdict, {"type": "optimizer", "samples": runs}


def condition_report(S: TracialSubalgebra, trials: int = 20, seed: int = 0,
                     szego_h_samples: int = 5) -> CertificationReport:
    dense = l2_density_check(S)
    maximal = tau_maximality_check(S)
    unique = unique_state_extension_check(S)

    a = bool(dense)
    e = bool(maximal) and bool(unique)
    f = bool(unique) and a

    b, ev_b = _factorization_battery(S, trials, seed)
    ok_c, worst_c = logmodularity_check(S, trials=trials, seed=seed)
    c = _ratio_verdict(ok_c, worst_c)
    d, ev_d = szego_battery(S, szego_h_samples, seed)

    exact = {a, e, f}
    consistent = len(exact) == 1
    if consistent:
        expected = TRUE if a else FALSE
        consistent = all(v in (expected, INCONCLUSIVE) for v in (b, c, d))

    evidence = {
        "a": {"type": "exact", "check": "rank of A + A* equals n^2",
              "note": "in finite dimensions weak* density and L2 density coincide"},
        "b": ev_b,
        "c": {"type": "empirical", "samples": trials, "worst_ratio": worst_c},
        "d": ev_d,
        "e": {"type": "exact", "tau_maximal": bool(maximal),
              "annihilator_dim": maximal.dim_annihilator, "dim_A": maximal.dim_A,
              "unique_extension": bool(unique)},
        "f": {"type": "exact", "unique_extension": bool(unique), "dense": a,
              "selfadjoint_annihilator_dim": unique.dim_selfadjoint_annihilator},
        # Szego holding on every sample should come with unique extension
        "szego_implies_unique_extension": (d != TRUE) or bool(unique),
        "algebra": {"n": S.n, "kind": S.kind, "dim_A": S.dim_A, "dim_D": S.dim_D,
                    "dim_A0": S.dim_A0,
                    "blocks": list(S.block_sizes) if S.block_sizes is not None else None},
        "options": {"trials": trials, "seed": seed, "szego_h_samples": szego_h_samples},
    }
    if not evidence["szego_implies_unique_extension"]:
        consistent = False
    return CertificationReport(a, b, c, d, e, f, bool(consistent), evidence)


def random_composition(n: int, rng: np.random.Generator) -> list[int]:
    """Uniform over the 2^(n-1) compositions of n."""
    cuts = np.flatnonzero(rng.random(n - 1) < 0.5) + 1
    return [int(x) for x in np.diff(np.concatenate([[0], cuts, [n]]))]


def random_algebra(family: str, n: int, seed: int = 0) -> TracialSubalgebra:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    if not 1 <= n <= 12:
        raise ValueError("n must lie in 1..12")
    alg = MatrixAlgebra(n)
    if family == "diagonal":
        return diagonal_algebra(alg)
    S = make_nest(alg, random_composition(n, la.rng_for(seed, 0)))
    if family == "nest":
        return S
    u = unitary_group.rvs(n, random_state=la.rng_for(seed, 1)) if n > 1 else np.eye(1)
    T = S.conjugate(u)
    object.__setattr__(T, "block_sizes", S.block_sizes)
    return T


def falsification_fuzz(families=("nest",), n_range=(2, 6), trials: int = 10, seed: int = 0,
                       report_trials: int = 20, szego_h_samples: int = 5) -> dict:
    """Runs condition_report on generated algebras and tallies the outcomes.

    ``consistent_true`` / ``consistent_false`` count consistent reports whose
    exact verdicts are all true / all false; ``all_true`` / ``all_false``
    additionally require every empirical verdict to be conclusive.
    """
    lo, hi = n_range
    keys = ("reports", "consistent", "consistent_true", "consistent_false", "all_true", "all_false")
    summary = {**{k: 0 for k in keys}, "falsifications": 0,
               "inconclusive_conditions": {}, "per_family": {}, "falsification_cases": []}
    inconclusive = Counter()
    for family in families:
        fam = {k: 0 for k in keys}
        for t in range(trials):
            n = int(la.rng_for(seed, 7, t).integers(lo, hi + 1))
            alg_seed = int(la.rng_for(seed, 8, t).integers(2**31))
            S = random_algebra(family, n, alg_seed)
            rep = condition_report(S, trials=report_trials, seed=alg_seed,
                                   szego_h_samples=szego_h_samples)
            fam["reports"] += 1
            fam["consistent"] += rep.consistency
            fam["consistent_true"] += rep.consistency and rep.condition_a
            fam["consistent_false"] += rep.consistency and not rep.condition_a
            fam["all_true"] += rep.all_true
            fam["all_false"] += rep.all_false
            for k, v in rep.conditions.items():
                if v == INCONCLUSIVE:
                    inconclusive[k] += 1
            if rep.falsification:
                summary["falsification_cases"].append(
                    {"family": family, "n": n, "seed": alg_seed, "conditions": rep.conditions})
        summary["per_family"][family] = fam
        for k in keys:
            summary[k] += fam[k]
    summary["falsifications"] = len(summary["falsification_cases"])
    summary["inconclusive_conditions"] = dict(sorted(inconclusive.items()))
    return summary
