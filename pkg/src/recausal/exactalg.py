"""Exact rational scalar, polynomial, and matrix arithmetic.

All coefficients are `fractions.Fraction` (arbitrary precision, stored in
lowest terms with positive denominator), so every operation in this module
is exact; no floating point appears anywhere.
"""

from __future__ import annotations

from fractions import Fraction

NEG_INF = float("-inf")  # degree of the zero polynomial


def rat(x) -> Fraction:
    """Coerce ints, strings like "p/q", and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to rational")


def rat_str(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class Poly:
    """Univariate polynomial over the rationals, coefficients lowest first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def const(c) -> "Poly":
        return Poly([rat(c)])

    @staticmethod
    def monomial(deg: int, c=1) -> "Poly":
        assert deg >= 0
        return Poly([0] * deg + [rat(c)])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def divmod(self, other: "Poly"):
        """Exact-coefficient polynomial long division: (quotient, remainder)."""
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        lead = other.coeffs[-1]
        if len(rem) - 1 < db:
            return Poly(), Poly(rem)
        quo = [Fraction(0)] * (len(rem) - db)
        for i in range(len(rem) - db - 1, -1, -1):
            c = rem[i + db] / lead
            if c == 0:
                continue
            quo[i] = c
            for j, b in enumerate(other.coeffs):
                rem[i + j] -= c * b
        return Poly(quo), Poly(rem[:db])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("polynomial division is not exact")
        return q

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Poly([c / lead for c in self.coeffs])

    def shift(self, k: int) -> "Poly":
        """Multiply by z^k (k >= 0)."""
        if self.is_zero():
            return self
        return Poly((Fraction(0),) * k + self.coeffs)

    def zero_multiplicity(self) -> int:
        """Order of the root z = 0."""
        if self.is_zero():
            raise ValueError("zero polynomial has no root multiplicity")
        m = 0
        while self.coeffs[m] == 0:
            m += 1
        return m

    def eval(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def bit_size(self) -> int:
        total = 0
        for c in self.coeffs:
            total += c.numerator.bit_length() + c.denominator.bit_length()
        return total

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(rat_str(c))
            elif i == 1:
                terms.append(f"{rat_str(c)}*z")
            else:
                terms.append(f"{rat_str(c)}*z^{i}")
        return "Poly(" + " + ".join(terms) + ")"


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to polynomial")


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor; gcd(0, 0) = 0."""
    a, b = _as_poly(a), _as_poly(b)
    while not b.is_zero():
        # monic normalization keeps coefficient growth in check
        a, b = b, (a % b).monic() if not (a % b).is_zero() else Poly()
    return a.monic()


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly()
    return (a * b).exact_div(poly_gcd(a, b)).monic()


class PolyMatrix:
    """Matrix of Poly entries, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        self.entries = [[_as_poly(e) for e in row] for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        assert all(len(row) == self.cols for row in self.entries)

    @staticmethod
    def identity(n: int) -> "PolyMatrix":
        return PolyMatrix(
            [[Poly.const(1 if i == j else 0) for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(rows: int, cols: int) -> "PolyMatrix":
        return PolyMatrix([[Poly() for _ in range(cols)] for _ in range(rows)])

    @staticmethod
    def diag(polys) -> "PolyMatrix":
        n = len(polys)
        return PolyMatrix(
            [[_as_poly(polys[i]) if i == j else Poly() for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def from_rational(m: "RationalMatrix") -> "PolyMatrix":
        return PolyMatrix([[Poly.const(e) for e in row] for row in m.entries])

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __add__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return PolyMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return PolyMatrix(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __neg__(self):
        return PolyMatrix([[-e for e in row] for row in self.entries])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return PolyMatrix([[e * other for e in row] for row in self.entries])
        assert self.cols == other.rows
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = Poly()
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    __rmul__ = __mul__

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def max_degree(self):
        degs = [e.degree for row in self.entries for e in row if not e.is_zero()]
        return max(degs) if degs else NEG_INF

    def coeff(self, k: int) -> "RationalMatrix":
        """Coefficient matrix of z^k."""
        return RationalMatrix([[e[k] for e in row] for row in self.entries])

    def coeff_list(self):
        """All coefficient matrices from z^0 up to the maximum degree."""
        top = self.max_degree()
        n = int(top) + 1 if top != NEG_INF else 1
        return [self.coeff(k) for k in range(n)]

    def trace(self) -> Poly:
        assert self.rows == self.cols
        acc = Poly()
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def __repr__(self):
        return f"PolyMatrix({self.entries!r})"


def det_adjugate(M: PolyMatrix):
    """Determinant and adjugate via the Faddeev-LeVerrier recursion.

    Returns (det M, adj M) with M * adj M = det(M) * I exactly.
    """
    if M.rows != M.cols:
        raise ValueError("det_adjugate requires a square matrix")
    n = M.rows
    if n == 0:
        return Poly.const(1), PolyMatrix([])
    N = PolyMatrix.identity(n)
    c = Poly.const(1)
    for k in range(1, n):
        MN = M * N
        c = MN.trace() * Fraction(-1, k)
        N = MN + PolyMatrix.diag([c] * n)
    MN = M * N
    det = MN.trace() * Fraction(1, n) if n > 0 else Poly.const(1)
    # det(M) = (-1)^n * c_n with the recursion above folded in; the trace
    # division gives det directly, and adj carries the matching sign
    adj = N if n % 2 == 1 else -N
    det = det if n % 2 == 1 else -det
    return det, adj


class RationalMatrix:
    """Matrix of Fraction entries, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        self.entries = [[rat(e) for e in row] for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        assert all(len(row) == self.cols for row in self.entries)

    @staticmethod
    def identity(n: int) -> "RationalMatrix":
        return RationalMatrix(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(rows: int, cols: int) -> "RationalMatrix":
        return RationalMatrix([[0] * cols for _ in range(rows)])

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __add__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return RationalMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return RationalMatrix(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __neg__(self):
        return RationalMatrix([[-e for e in row] for row in self.entries])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalMatrix([[e * other for e in row] for row in self.entries])
        assert self.cols == other.rows, (self.cols, other.rows)
        ot = other.entries
        out = []
        for i in range(self.rows):
            srow = self.entries[i]
            row = [Fraction(0)] * other.cols
            for k in range(self.cols):
                a = srow[k]
                if a == 0:
                    continue
                orow = ot[k]
                for j in range(other.cols):
                    if orow[j] != 0:
                        row[j] += a * orow[j]
            out.append(row)
        return RationalMatrix(out)

    __rmul__ = __mul__

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def is_zero(self) -> bool:
        return all(e == 0 for row in self.entries for e in row)

    def row(self, i: int):
        return list(self.entries[i])

    def submatrix(self, row_idx, col_idx) -> "RationalMatrix":
        return RationalMatrix(
            [[self.entries[i][j] for j in col_idx] for i in row_idx]
        )

    def __repr__(self):
        return f"RationalMatrix({self.entries!r})"


def hstack(mats) -> RationalMatrix:
    mats = list(mats)
    rows = mats[0].rows
    assert all(m.rows == rows for m in mats)
    return RationalMatrix(
        [sum((m.entries[i] for m in mats), []) for i in range(rows)]
    )


def vstack(mats) -> RationalMatrix:
    mats = list(mats)
    cols = mats[0].cols
    assert all(m.cols == cols for m in mats)
    return RationalMatrix([row for m in mats for row in m.entries])


def block_diag(mats) -> RationalMatrix:
    mats = list(mats)
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = [[Fraction(0)] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in mats:
        for i in range(m.rows):
            for j in range(m.cols):
                out[r0 + i][c0 + j] = m.entries[i][j]
        r0 += m.rows
        c0 += m.cols
    return RationalMatrix(out)


def _bit_size(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def _row_echelon(entries, ncols):
    """In-place exact row echelon; returns list of pivot columns.

    Pivot choice per column: smallest bit-size entry, ties by lowest row
    index, to limit coefficient blow-up deterministically.
    """
    nrows = len(entries)
    pivots = []
    piv_r = 0
    for c in range(ncols):
        best = None
        for r in range(piv_r, nrows):
            e = entries[r][c]
            if e != 0:
                key = _bit_size(e)
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            continue
        r = best[1]
        if r != piv_r:
            entries[piv_r], entries[r] = entries[r], entries[piv_r]
        prow = entries[piv_r]
        pv = prow[c]
        for r2 in range(nrows):
            if r2 == piv_r:
                continue
            f = entries[r2][c]
            if f == 0:
                continue
            ratio = f / pv
            row2 = entries[r2]
            for c2 in range(c, len(row2)):
                row2[c2] -= prow[c2] * ratio
        pivots.append(c)
        piv_r += 1
        if piv_r == nrows:
            break
    return pivots


def rank_kernel(M: RationalMatrix):
    """Exact rank and a basis of the right kernel."""
    entries = [list(row) for row in M.entries]
    pivots = _row_echelon(entries, M.cols)
    rank = len(pivots)
    pivot_set = set(pivots)
    free = [c for c in range(M.cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * M.cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            # reduced echelon rows: entry at pc is the only pivot in row r
            v[pc] = -entries[r][fc] / entries[r][pc]
        basis.append(v)
    return rank, basis


def rank_of(M: RationalMatrix) -> int:
    entries = [list(row) for row in M.entries]
    return len(_row_echelon(entries, M.cols))


def solve_affine(M: RationalMatrix, B: RationalMatrix):
    """General exact solve of M X = B for matrix right-hand sides.

    Returns (particular X or None if inconsistent, kernel basis vectors of M).
    """
    aug = [list(mrow) + list(brow) for mrow, brow in zip(M.entries, B.entries)]
    pivots = _row_echelon(aug, M.cols)
    rank = len(pivots)
    # consistency: any row with zero M-part must have zero B-part
    for r in range(len(aug)):
        if all(aug[r][c] == 0 for c in range(M.cols)):
            if any(aug[r][c] != 0 for c in range(M.cols, M.cols + B.cols)):
                _, kern = rank_kernel(M)
                return None, kern
    part = [[Fraction(0)] * B.cols for _ in range(M.cols)]
    for r, pc in enumerate(pivots):
        pv = aug[r][pc]
        for j in range(B.cols):
            part[pc][j] = aug[r][M.cols + j] / pv
    _, kern = rank_kernel(M)
    return RationalMatrix(part), kern


def pseudo_inverse_columns(M: RationalMatrix, ncols: int) -> RationalMatrix:
    """Moore-Penrose pseudo-inverse (A^T A)^{-1} A^T of the first ncols columns."""
    A = M.submatrix(range(M.rows), range(ncols))
    At = A.transpose()
    G = At * A
    X, _ = solve_affine(G, At)
    if X is None or rank_of(G) < ncols:
        raise ValueError("rank-deficient column block has no left inverse")
    return X


def invert(M: RationalMatrix) -> RationalMatrix:
    assert M.rows == M.cols
    X, _ = solve_affine(M, RationalMatrix.identity(M.rows))
    if X is None or rank_of(M) < M.rows:
        raise ValueError("matrix is singular")
    return X
