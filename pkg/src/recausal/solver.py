"""Causal solution construction: factor pi(z), cancel unstable roots, verify.

The cancellation requirements ("tune the free parameters so that the unstable
part divides out") are implemented as an exact linear system in the entries of
the revision-loading stack h: divisibility remainders and forbidden low-order
series coefficients are linear functionals of h, so solvability, uniqueness,
and the solution family are all decided by exact rational elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .canon import RootClassification, SmithForm, classify_roots
from .constraints import ConstraintSystem
from .dimension import Pipeline, run_pipeline
from .exactalg import (
    Poly,
    PolyMatrix,
    RationalMatrix,
    det_adjugate,
    invert,
    rat,
    solve_affine,
    vstack,
)
from .model import REModel


class UnsupportedModelError(ValueError):
    pass


class FactorizationError(ArithmeticError):
    pass


_Z = sympy.Symbol("z")


def _split_phi(phi: Poly, xi, tol: float = 1e-9):
    """Split a monic polynomial with phi(0) != 0 into stable/unstable parts.

    Factors into irreducibles over Q first, then locates each irreducible
    factor's roots numerically; an irreducible factor with roots on both
    sides of the unit circle cannot be split exactly and is rejected.
    """
    if phi.is_constant():
        return Poly.const(1), Poly.const(1)
    expr = sum(
        sympy.Rational(c.numerator, c.denominator) * _Z**i
        for i, c in enumerate(phi.coeffs)
    )
    const, factors = sympy.Poly(expr, _Z, domain="QQ").factor_list()
    stable = Poly.const(1)
    unstable = Poly.const(1)
    for fac, exp in factors:
        coeffs = [
            Fraction(int(c.p), int(c.q)) for c in reversed(fac.all_coeffs())
        ]
        f = Poly(coeffs).monic()
        if f.is_constant():
            continue
        rc = classify_roots(f, xi, tol)
        if rc.zero_multiplicity:
            raise FactorizationError("phi factor vanishes at zero")
        if rc.stable_roots and rc.unstable_roots:
            raise FactorizationError(
                f"irreducible factor {f!r} has roots on both sides of the "
                "unit circle; no exact rational stable/unstable split exists"
            )
        target = stable if rc.stable_roots else unstable
        for _ in range(exp):
            if rc.stable_roots:
                stable = stable * f
            else:
                unstable = unstable * f
    # exact reconstruction check: the numeric clustering must not have lied
    if not (stable * unstable - phi.monic()).is_zero():
        raise FactorizationError("stable/unstable split does not reconstruct phi")
    return stable, unstable


@dataclass(frozen=True)
class Factorization:
    pi_u: PolyMatrix
    pi_s: PolyMatrix
    alpha_split: tuple   # (min(g_i, J1), max(g_i - J1, 0)) per i
    phi_split: tuple     # (stable_factor, unstable_factor) per i
    det_u: Poly
    adj_u: PolyMatrix
    det_s: Poly
    adj_s: PolyMatrix
    zero_pole_order: int  # multiplicity of z = 0 in det(pi_s)


def factor_stable_unstable(sf: SmithForm, J1: int, xi=1) -> Factorization:
    """pi = pi_u * pi_s with pi_u = P alpha_u Phi_u and pi_s = alpha_s Phi_s Q."""
    if J1 < 0:
        raise UnsupportedModelError(
            f"J1 = {J1} < 0: the system is dated strictly in the past; "
            "causal factorization is not defined for this configuration"
        )
    xi = rat(xi)
    splits = []
    alpha_split = []
    for gi, phi in zip(sf.g, sf.phi):
        gs, gu = min(gi, J1), max(gi - J1, 0)
        alpha_split.append((gs, gu))
        splits.append(_split_phi(phi, xi))
    diag_u = [
        Poly.monomial(gu) * un for (gs, gu), (st, un) in zip(alpha_split, splits)
    ]
    diag_s = [
        Poly.monomial(gs) * st for (gs, gu), (st, un) in zip(alpha_split, splits)
    ]
    pi_u = sf.P * PolyMatrix.diag(diag_u)
    pi_s = PolyMatrix.diag(diag_s) * sf.Q
    det_u, adj_u = det_adjugate(pi_u)
    det_s, adj_s = det_adjugate(pi_s)
    return Factorization(
        pi_u=pi_u, pi_s=pi_s, alpha_split=tuple(alpha_split),
        phi_split=tuple(splits), det_u=det_u, adj_u=adj_u,
        det_s=det_s, adj_s=adj_s,
        zero_pole_order=sum(gs for gs, _gu in alpha_split),
    )


def assemble_rhs(m: REModel, zc, J1: int, pi: PolyMatrix):
    """Affine map h_stack -> N(z; h), the s x q right-hand polynomial of the SDE.

    N(z; h) = pi(z) (sum_j h_j z^j) + (sum_i m_i z^{J1+i}) h_stack - w(z) z^{J1}.
    Returned as (constant s x q PolyMatrix, list of s x 1 PolyMatrix columns,
    one per unknown slot of a single h column); the map is identical across
    innovation columns.
    """
    if J1 < 0:
        raise UnsupportedModelError(f"J1 = {J1} < 0 is not supported by the solver")
    s, H = m.s, m.H
    const = m.wold_poly() * Poly.monomial(J1) * Fraction(-1)
    per_unknown = []
    for j in range(H):
        for r in range(s):
            col = [Poly() for _ in range(s)]
            for i in range(s):
                col[i] = col[i] + pi.entries[i][r].shift(j)
            for i_lag, mi in enumerate(zc.m):
                a = j * s + r
                for i in range(s):
                    c = mi.entries[i][a]
                    if c != 0:
                        col[i] = col[i] + Poly.monomial(J1 + i_lag, c)
            per_unknown.append(PolyMatrix([[p] for p in col]))
    return const, per_unknown


def _cancellation_rows(vec: PolyMatrix, fac: Factorization):
    """Linear functionals that must vanish for an s x 1 polynomial column.

    Returns the list of rational values: remainder coefficients of
    adj(pi_u) * vec modulo det(pi_u), then the series coefficients of
    z^0..z^{m-1} of adj(pi_s) * quotient (the z = 0 poles of pi_s).
    """
    num = fac.adj_u * vec
    d = fac.det_u
    deg_d = int(d.degree) if not d.is_constant() else 0
    out = []
    quo_entries = []
    for i in range(num.rows):
        q, r = num.entries[i][0].divmod(d)
        for k in range(deg_d):
            out.append(r[k])
        quo_entries.append([q])
    quo = PolyMatrix(quo_entries)
    m0 = fac.zero_pole_order
    if m0 > 0:
        low = fac.adj_s * quo
        for i in range(low.rows):
            for k in range(m0):
                out.append(low.entries[i][0][k])
    return out


@dataclass(frozen=True)
class SolutionReport:
    classification: str          # "no_causal_solution" | "determinate" | "indeterminate"
    indeterminacy_dim: int       # free parameters; 0 unless indeterminate
    h: RationalMatrix | None     # chosen loading stack, sH x q
    h_particular: RationalMatrix | None
    kernel: tuple                # kernel basis vectors (length sH), shared by columns
    transfer_num: PolyMatrix | None
    transfer_den: Poly | None
    A_theta: PolyMatrix | None
    pipeline: Pipeline
    factorization: Factorization | None
    kernel_point: str


def _zero_pattern_rows(m: REModel):
    """Unknown indices within one h column that predeterminedness forces to zero."""
    s, H = m.s, m.H
    rows = []
    for j in range(H):
        keep = sum(m.gamma[: j + 1])
        for r in range(keep, s):
            rows.append(j * s + r)
    return rows


def _min_norm_shift(X: RationalMatrix, kernel):
    """Project the particular solution onto the min-norm representative."""
    if not kernel:
        return X
    K = RationalMatrix([list(v) for v in kernel]).transpose()
    Kt = K.transpose()
    G = Kt * K
    coef, _ = solve_affine(G, Kt * X)
    return X - K * coef


def solve_causal(
    m: REModel, pipe: Pipeline | None = None, kernel_point: str = "min-norm"
) -> SolutionReport:
    """Solve the RE model exactly and classify the causal solution set."""
    pipe = pipe or run_pipeline(m)
    s, H, q = m.s, m.H, m.q
    det_pi, _ = det_adjugate(pipe.pi.pi)
    classify_roots(det_pi, m.xi)  # raises on boundary roots
    fac = factor_stable_unstable(pipe.sf, pipe.pi.J1, m.xi)
    const, per_unknown = assemble_rhs(m, pipe.zc, pipe.pi.J1, pipe.pi.pi)
    n_unknowns = s * H

    # rows: predetermined zero pattern, constraint system, cancellation
    rows = []
    rhs_rows = []
    for idx in _zero_pattern_rows(m):
        row = [Fraction(0)] * n_unknowns
        row[idx] = Fraction(1)
        rows.append(row)
        rhs_rows.append([Fraction(0)] * q)
    cs = pipe.cs
    if H > 0:
        m_stack = vstack(pipe.zc.padded(pipe.pb.width_blocks))
        c_full = cs.D * m_stack
        for i in range(c_full.rows):
            rows.append(list(c_full.entries[i]))
            rhs_rows.append(list(cs.rhs.entries[i]))

    canc_const = [
        _cancellation_rows(
            PolyMatrix([[const.entries[i][c]] for i in range(s)]), fac
        )
        for c in range(q)
    ]
    canc_basis = [_cancellation_rows(v, fac) for v in per_unknown]
    n_canc = len(canc_const[0]) if q else 0
    for r in range(n_canc):
        rows.append([canc_basis[a][r] for a in range(n_unknowns)])
        rhs_rows.append([-canc_const[c][r] for c in range(q)])

    M = RationalMatrix(rows) if rows else RationalMatrix.zero(0, n_unknowns)
    B = RationalMatrix(rhs_rows) if rhs_rows else RationalMatrix.zero(0, q)
    X, kernel = solve_affine(M, B)
    if X is None:
        return SolutionReport(
            classification="no_causal_solution", indeterminacy_dim=0,
            h=None, h_particular=None, kernel=tuple(kernel),
            transfer_num=None, transfer_den=None, A_theta=None,
            pipeline=pipe, factorization=fac, kernel_point=kernel_point,
        )
    if n_unknowns == 0:
        X = RationalMatrix.zero(0, q)
    h_particular = X
    if kernel:
        if kernel_point == "min-norm":
            chosen = _min_norm_shift(X, kernel)
        else:
            idx = int(kernel_point)
            shift = RationalMatrix([[kernel[idx][a]] * q for a in range(n_unknowns)])
            chosen = X + shift
    else:
        chosen = X
    num, den, a_theta = build_transfer(m, pipe, fac, const, per_unknown, chosen)
    classification = "determinate" if not kernel else "indeterminate"
    return SolutionReport(
        classification=classification,
        indeterminacy_dim=len(kernel) * q if kernel else 0,
        h=chosen, h_particular=h_particular, kernel=tuple(kernel),
        transfer_num=num, transfer_den=den, A_theta=a_theta,
        pipeline=pipe, factorization=fac, kernel_point=kernel_point,
    )


def _n_of_h(m: REModel, const, per_unknown, h: RationalMatrix) -> PolyMatrix:
    s, q = m.s, m.q
    entries = [[const.entries[i][c] for c in range(q)] for i in range(s)]
    for a, v in enumerate(per_unknown):
        for c in range(q):
            coef = h.entries[a][c]
            if coef != 0:
                for i in range(s):
                    entries[i][c] = entries[i][c] + v.entries[i][0] * coef
    return PolyMatrix(entries)


def build_transfer(m, pipe, fac: Factorization, const, per_unknown, h):
    """Transfer function y = (num / den) eps for a loading stack h.

    num is s x q polynomial, den a scalar polynomial with den(0) = 1 and all
    roots outside the unit circle; A_theta is the unstable-cancelled quotient.
    """
    N = _n_of_h(m, const, per_unknown, h)
    a_theta_entries = []
    for i in range(m.s):
        row = []
        for c in range(m.q):
            acc = Poly()
            for k in range(m.s):
                acc = acc + fac.adj_u.entries[i][k] * N.entries[k][c]
            row.append(acc.exact_div(fac.det_u))
        a_theta_entries.append(row)
    a_theta = PolyMatrix(a_theta_entries)
    num = fac.adj_s * a_theta
    den = fac.det_s
    m0 = fac.zero_pole_order
    if m0 > 0:
        z_m = Poly.monomial(m0)
        num = PolyMatrix([[e.exact_div(z_m) for e in row] for row in num.entries])
        den = den.exact_div(z_m)
    # cancel any common polynomial factor, then normalize den(0) = 1
    from .exactalg import poly_gcd

    common = den
    for row in num.entries:
        for e in row:
            common = poly_gcd(common, e)
            if common.is_constant():
                break
        if common.is_constant():
            break
    if not common.is_constant() and not common.is_zero():
        num = PolyMatrix([[e.exact_div(common) for e in row] for row in num.entries])
        den = den.exact_div(common)
    c0 = den[0]
    assert c0 != 0, "denominator vanishes at zero after pole cancellation"
    inv = Fraction(1) / c0
    num = num * inv
    den = den * inv
    return num, den, a_theta


def transfer_series(num: PolyMatrix, den: Poly, n: int):
    """First n power-series coefficient matrices of num/den (den(0) = 1)."""
    s, q = num.rows, num.cols
    out = []
    dcoef = den.coeffs
    for j in range(n):
        mat = [[Fraction(0)] * q for _ in range(s)]
        for i in range(s):
            for c in range(q):
                acc = num.entries[i][c][j]
                for l in range(1, min(j, len(dcoef) - 1) + 1):
                    acc -= dcoef[l] * out[j - l][i][c]
                mat[i][c] = acc
        out.append(mat)
    return [RationalMatrix(mtx) for mtx in out]


def verify_solution(m: REModel, sr: SolutionReport, max_lag: int = 50) -> dict:
    """Substitute the candidate solution into the model; residuals must vanish.

    Exact arithmetic throughout: any nonzero residual coefficient is reported
    with its lag and position.  Also checks the predetermined zero-revision
    pattern on the leading series coefficients.
    """
    if sr.transfer_num is None:
        raise ValueError("no transfer function to verify")
    series = transfer_series(sr.transfer_num, sr.transfer_den, max_lag + m.H + 1)
    failures = []
    for d in range(max_lag + 1):
        acc = RationalMatrix.zero(m.s, m.q)
        for (k, h), a_kh in m.A.items():
            if k <= d:
                acc = acc + a_kh * series[d - k + h]
        acc = acc + m.wold_coeff(d)
        if not acc.is_zero():
            for i in range(m.s):
                for c in range(m.q):
                    if acc.entries[i][c] != 0:
                        failures.append(
                            {"lag": d, "row": i, "col": c,
                             "value": str(acc.entries[i][c])}
                        )
                        break
                else:
                    continue
                break
    # predetermined zero-revision pattern: the MDS inputs eps^{j,s_i} of the
    # SDE ansatz must vanish for i > j, i.e. the matching rows of h are zero.
    # (The realized solution may still load contemporaneously on innovations
    # through the exogenous term, as in the paper's own predetermined example.)
    predet_failures = []
    if sr.h is not None:
        for j in range(m.H):
            first_forced = sum(m.gamma[: j + 1])
            for r in range(first_forced, m.s):
                if any(sr.h.entries[j * m.s + r][c] != 0 for c in range(m.q)):
                    predet_failures.append({"j": j, "row": r})
    # in the plain flavor the ansatz MDS are exactly the revisions of y, so
    # the leading series coefficients must reproduce h
    first_coeff_failures = []
    if sr.h is not None and not m.predetermined:
        for j in range(m.H):
            for r in range(m.s):
                for c in range(m.q):
                    if series[j].entries[r][c] != sr.h.entries[j * m.s + r][c]:
                        first_coeff_failures.append({"j": j, "row": r, "col": c})
    return {
        "ok": not failures and not predet_failures and not first_coeff_failures,
        "max_lag": max_lag,
        "failures": failures,
        "predetermined_failures": predet_failures,
        "first_coefficient_failures": first_coeff_failures,
        "wold_truncation": len(m.wold) - 1,
    }


def simulate(sr: SolutionReport, T: int, seed: int, truncation: int = 200) -> dict:
    """Monte Carlo cross-check: filter N(0, I) innovations through the transfer."""
    if sr.transfer_num is None:
        raise ValueError("no transfer function to simulate")
    series = transfer_series(sr.transfer_num, sr.transfer_den, truncation)
    coeffs = np.array(
        [[[float(e) for e in row] for row in mat.entries] for mat in series]
    )
    s, q = coeffs.shape[1], coeffs.shape[2]
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((T + truncation, q))
    y = np.zeros((T, s))
    for j in range(truncation):
        y += eps[truncation - j : truncation - j + T] @ coeffs[j].T
    out = {"T": T, "seed": seed, "truncation": truncation, "autocov": {}}
    for lag in range(3):
        prod = y[lag:].T @ y[: T - lag] / (T - lag)
        out["autocov"][lag] = prod.tolist()
    exact = []
    for lag in range(3):
        acc = np.zeros((s, s))
        for j in range(truncation - lag):
            acc += coeffs[j + lag] @ coeffs[j].T
        exact.append(acc.tolist())
    out["exact_autocov"] = {lag: exact[lag] for lag in range(3)}
    out["mc_standard_error"] = float(np.sqrt(1.0 / T)) * float(
        np.abs(np.array(exact[0])).max() + 1.0
    )
    return out
