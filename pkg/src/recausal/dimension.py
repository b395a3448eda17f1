"""Solution-set dimension reports and the genericity probe."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .canon import classify_roots, smith_form
from .constraints import (
    ConstraintSystem,
    build_plain_system,
    build_predetermined_system,
    build_selectors,
    check_rank_bounds,
    frak_p_blocks,
    zeta_coefficients,
)
from .exactalg import RationalMatrix, det_adjugate
from .model import REModel, build_pi


@dataclass(frozen=True)
class Pipeline:
    model: REModel
    pi: object
    sf: object
    zc: object
    pb: object
    sel: object
    cs: ConstraintSystem
    plain_cs: ConstraintSystem


def run_pipeline(m: REModel) -> Pipeline:
    pp = build_pi(m)
    sf = smith_form(pp.pi)
    zc = zeta_coefficients(m)
    pb = frak_p_blocks(sf, pp.J1, m.H)
    sel = build_selectors(m, sf)
    plain_cs = build_plain_system(m, sf, zc, pb)
    if m.predetermined:
        cs = build_predetermined_system(m, sf, zc, pb, sel)
    else:
        cs = plain_cs
    return Pipeline(
        model=m, pi=pp, sf=sf, zc=zc, pb=pb, sel=sel, cs=cs, plain_cs=plain_cs
    )


@dataclass(frozen=True)
class DimensionReport:
    free_parameters: int
    kernel_dim: int
    rank_w: int
    upper_bound: int
    lower_bound: int
    special_case_used: str
    distinctness_guaranteed: bool
    flavor: str
    effective_unknowns: int
    bounds: dict


def dimension_report(m: REModel, pipe: Pipeline | None = None) -> DimensionReport:
    pipe = pipe or run_pipeline(m)
    cs = pipe.cs
    bounds = check_rank_bounds(
        pipe.plain_cs, pipe.sf, pipe.zc, pipe.pi.J1, m.H, m.s
    )
    if m.H == 0:
        special = "H=0"
    elif all(g == 0 for g in pipe.sf.g):
        special = "g=0"
    elif len(set(pipe.sf.g)) == 1 and pipe.sf.g[0] <= pipe.pi.J1:
        special = "g=const"
    elif all(g <= pipe.pi.J1 for g in pipe.sf.g):
        special = "g<=J1"
    else:
        special = "general"
    det, _ = det_adjugate(pipe.pi.pi)
    rc = classify_roots(det, m.xi)
    distinct = len(rc.unstable_roots) == 0
    return DimensionReport(
        free_parameters=cs.kernel_dim * m.q,
        kernel_dim=cs.kernel_dim,
        rank_w=cs.rank_w,
        upper_bound=bounds["upper_bound"],
        lower_bound=bounds["lower_bound"],
        special_case_used=special,
        distinctness_guaranteed=distinct,
        flavor=cs.flavor,
        effective_unknowns=cs.effective_unknowns,
        bounds=bounds,
    )


def _perturb(m: REModel, rng: random.Random, magnitude=Fraction(1, 64)) -> REModel:
    """Structure-preserving perturbation: nonzero entries of A_kh jitter, zeros stay."""
    new_a = {}
    for key, mat in m.A.items():
        rows = []
        for row in mat.entries:
            new_row = []
            for e in row:
                if e == 0:
                    new_row.append(Fraction(0))
                else:
                    new_row.append(
                        e + Fraction(rng.randint(-8, 8), 8) * magnitude
                    )
            rows.append(new_row)
        new_a[key] = RationalMatrix(rows)
    return REModel(
        s=m.s, K=m.K, H=m.H, q=m.q, A=new_a, gamma=m.gamma, wold=m.wold,
        xi=m.xi, r_hint=m.r_hint,
    )


def genericity_probe(m: REModel, trials: int = 10, seed: int = 0) -> dict:
    """Recompute rank_w at randomly perturbed parameter points.

    Reports the modal rank over the trials and flags the supplied point when
    its rank differs from the mode.
    """
    base = run_pipeline(m)
    rng = random.Random(seed)
    ranks = []
    failures = 0
    for _ in range(trials):
        try:
            pert = _perturb(m, rng)
            ranks.append(run_pipeline(pert).cs.rank_w)
        except Exception:
            failures += 1
    if not ranks:
        return {
            "base_rank": base.cs.rank_w, "modal_rank": None,
            "trials": trials, "failed_trials": failures, "non_generic": False,
        }
    modal = max(set(ranks), key=lambda r: (ranks.count(r), -r))
    return {
        "base_rank": base.cs.rank_w,
        "modal_rank": modal,
        "rank_histogram": {str(r): ranks.count(r) for r in sorted(set(ranks))},
        "trials": trials,
        "failed_trials": failures,
        "non_generic": base.cs.rank_w != modal,
    }
