"""Model specification, JSON (de)serialization, and construction of pi(z).

A model is the system

    sum_{k=0}^{K} sum_{h=0}^{H} A_kh E_{t-k}(y_{t+h-k}) = -u_t,

with s endogenous variables, q innovations, finite moving-average exogenous
process u_t = sum_j w_j eps_{t-j}, and predeterminedness multi-index
gamma = (s_0, ..., s_H) with sum(gamma) = s.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import Poly, PolyMatrix, RationalMatrix, det_adjugate, rat, rat_str

SCHEMA_VERSION = 1


class ModelFormatError(ValueError):
    pass


class RedundantPiError(ValueError):
    """pi(z) is identically zero or singular as a polynomial matrix."""


@dataclass(frozen=True)
class REModel:
    s: int
    K: int
    H: int
    q: int
    A: dict                 # (k, h) -> RationalMatrix, zero matrices omitted
    gamma: tuple            # (s_0, ..., s_H)
    wold: tuple             # (w_0, ..., w_L), each s x q
    xi: Fraction = Fraction(1)
    r_hint: int | None = None

    def a(self, k: int, h: int) -> RationalMatrix:
        return self.A.get((k, h), RationalMatrix.zero(self.s, self.s))

    @property
    def predetermined(self) -> bool:
        return any(si != 0 for si in self.gamma[1:])

    def wold_coeff(self, j: int) -> RationalMatrix:
        if 0 <= j < len(self.wold):
            return self.wold[j]
        return RationalMatrix.zero(self.s, self.q)

    def wold_poly(self) -> PolyMatrix:
        out = [[Poly() for _ in range(self.q)] for _ in range(self.s)]
        for i in range(self.s):
            for j in range(self.q):
                out[i][j] = Poly([w.entries[i][j] for w in self.wold])
        return PolyMatrix(out)


def _parse_matrix(obj, rows, cols, what) -> RationalMatrix:
    if not isinstance(obj, list) or len(obj) != rows:
        raise ModelFormatError(f"{what}: expected {rows} rows")
    out = []
    for row in obj:
        if not isinstance(row, list) or len(row) != cols:
            raise ModelFormatError(f"{what}: expected {cols} columns per row")
        try:
            out.append([rat(e) if isinstance(e, (str, int)) else _bad(e) for e in row])
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise ModelFormatError(f"{what}: malformed rational entry: {exc}") from exc
    return RationalMatrix(out)


def _bad(e):
    raise TypeError(f"rationals must be strings or integers, got {type(e).__name__}")


def parse_model(text: str) -> REModel:
    """Parse and validate a model from its JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    for key in ("s", "K", "H", "q", "gamma", "A", "wold"):
        if key not in doc:
            raise ModelFormatError(f"missing required field '{key}'")
    s, K, H, q = doc["s"], doc["K"], doc["H"], doc["q"]
    for name, v in (("s", s), ("K", K), ("H", H), ("q", q)):
        if not isinstance(v, int) or v < 0:
            raise ModelFormatError(f"'{name}' must be a non-negative integer")
    if s < 1:
        raise ModelFormatError("'s' must be positive")
    if q > s:
        raise ModelFormatError(f"stochastic singularity requires q <= s, got q={q} > s={s}")
    gamma = doc["gamma"]
    if not isinstance(gamma, list) or len(gamma) != H + 1:
        raise ModelFormatError(f"gamma must list H+1 = {H + 1} entries")
    if any(not isinstance(g, int) or g < 0 for g in gamma):
        raise ModelFormatError("gamma entries must be non-negative integers")
    if sum(gamma) != s:
        raise ModelFormatError(f"gamma sum mismatch: sum(gamma)={sum(gamma)} != s={s}")
    A = {}
    for item in doc["A"]:
        k, h = item.get("k"), item.get("h")
        if not isinstance(k, int) or not isinstance(h, int):
            raise ModelFormatError("each A entry needs integer 'k' and 'h'")
        if not (0 <= k <= K and 0 <= h <= H):
            raise ModelFormatError(f"A index (k={k}, h={h}) out of range")
        if (k, h) in A:
            raise ModelFormatError(f"duplicate A entry for (k={k}, h={h})")
        mat = _parse_matrix(item.get("matrix"), s, s, f"A[{k},{h}]")
        if not mat.is_zero():
            A[(k, h)] = mat
    if K > 0 and not any(k == K for (k, _h) in A):
        raise ModelFormatError(f"K={K} is not realized: all A_Kh are zero")
    if H > 0 and not any(h == H for (_k, h) in A):
        raise ModelFormatError(f"H={H} is not realized: all A_kH are zero")
    if not A:
        raise ModelFormatError("all coefficient matrices are zero")
    wold = tuple(
        _parse_matrix(w, s, q, f"wold[{j}]") for j, w in enumerate(doc["wold"])
    )
    if not wold:
        raise ModelFormatError("wold list must contain at least w_0")
    xi = rat(doc.get("xi", 1))
    if xi < 1:
        raise ModelFormatError("xi must be at least 1")
    r_hint = doc.get("r_hint")
    if r_hint is not None and (not isinstance(r_hint, int) or not (q <= r_hint <= s)):
        raise ModelFormatError("r_hint must satisfy q <= r_hint <= s")
    return REModel(
        s=s, K=K, H=H, q=q, A=A, gamma=tuple(gamma), wold=wold, xi=xi, r_hint=r_hint
    )


def _matrix_doc(m: RationalMatrix):
    return [[rat_str(e) for e in row] for row in m.entries]


def serialize_model(m: REModel) -> str:
    """Normalized JSON form: lowest terms, sorted (k, h), zero matrices omitted."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "s": m.s,
        "K": m.K,
        "H": m.H,
        "q": m.q,
        "gamma": list(m.gamma),
        "A": [
            {"k": k, "h": h, "matrix": _matrix_doc(m.A[(k, h)])}
            for (k, h) in sorted(m.A)
        ],
        "wold": [_matrix_doc(w) for w in m.wold],
        "xi": rat_str(m.xi),
    }
    if m.r_hint is not None:
        doc["r_hint"] = m.r_hint
    return json.dumps(doc, indent=2, sort_keys=True)


@dataclass(frozen=True)
class PiPolynomial:
    pi: PolyMatrix
    A_star: dict            # i -> RationalMatrix, J0 <= i <= J1
    J0: int
    J1: int


def build_pi(m: REModel) -> PiPolynomial:
    """Assemble A*_i = sum_k A_{k, k+i} and pi(z) = sum_i A*_i z^{J1 - i}."""
    stars = {}
    for i in range(-m.K, m.H + 1):
        acc = RationalMatrix.zero(m.s, m.s)
        for k in range(max(0, -i), min(m.K, m.H - i) + 1):
            acc = acc + m.a(k, k + i)
        if not acc.is_zero():
            stars[i] = acc
    if not stars:
        raise RedundantPiError(
            "pi(z) is identically zero (all diagonal sums A*_i vanish): "
            "system contains redundant equations"
        )
    J0 = min(stars)
    J1 = max(stars)
    entries = [[Poly() for _ in range(m.s)] for _ in range(m.s)]
    for r in range(m.s):
        for c in range(m.s):
            coeffs = [Fraction(0)] * (J1 - J0 + 1)
            for i, mat in stars.items():
                coeffs[J1 - i] = mat.entries[r][c]
            entries[r][c] = Poly(coeffs)
    pi = PolyMatrix(entries)
    det, _ = det_adjugate(pi)
    if det.is_zero():
        raise RedundantPiError(
            "det pi(z) is identically zero: system contains redundant equations"
        )
    return PiPolynomial(pi=pi, A_star=stars, J0=J0, J1=J1)


def validate_semantics(m: REModel) -> dict:
    """Point checks of the solvability assumptions; report style, no raise."""
    report = {"checks": [], "warnings": [], "ok": True}

    def check(name, ok, detail=""):
        report["checks"].append({"name": name, "ok": bool(ok), "detail": detail})
        if not ok:
            report["ok"] = False

    check("q_le_s", m.q <= m.s, f"q={m.q}, s={m.s}")
    check(
        "K_realized",
        m.K == 0 or any(k == m.K for (k, _h) in m.A),
        f"K={m.K}",
    )
    check(
        "H_realized",
        m.H == 0 or any(h == m.H for (_k, h) in m.A),
        f"H={m.H}",
    )
    check("gamma_sum", sum(m.gamma) == m.s, f"gamma={m.gamma}")
    try:
        pp = build_pi(m)
        from .canon import smith_form

        sf = smith_form(pp.pi)
        G = sum(sf.g)
        check("det_pi_nonzero", True, f"G = {G} zero(s) at zero, g = {sf.g}")
        if any(gi > pp.J1 for gi in sf.g):
            report["warnings"].append(
                f"partial multiplicities exceed J1={pp.J1}: g={sf.g} "
                "(finite non-causality structure present)"
            )
        if pp.J1 < 0:
            report["warnings"].append(
                f"J1={pp.J1} < 0: the system dates every equation in the strict past"
            )
    except RedundantPiError as exc:
        check("det_pi_nonzero", False, str(exc))
    return report
