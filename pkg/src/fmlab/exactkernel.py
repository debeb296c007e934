"""Exact scalar arithmetic and dense linear algebra over the rationals.

Scalars are plain Python ints or ``fractions.Fraction`` values; arithmetic
mixes the two freely and results are normalized back to int whenever the
denominator is 1 (ints are much faster, and most structure constants are
0 or +-1).  Rationals serialize as "p/q" strings, with "/q" omitted when
the denominator is 1.

The rotation ring Q[c,s]/(c^2+s^2-1) is represented canonically as
a(c) + s*b(c) with a, b polynomials in c; the defining relation rewrites
s^2 -> 1 - c^2.  Evaluation at the path endpoints substitutes
(c,s) = (1,0) and (c,s) = (0,1).

Vectors are tuples, matrices are immutable row-major tuples of tuples.
All values are immutable after construction and every operation is a pure
function, so everything here is safe for unrestricted concurrent use.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence


def nq(x):
    """Normalize a scalar: Fractions with denominator 1 collapse to int."""
    if type(x) is int:
        return x
    if x.denominator == 1:
        return x.numerator
    return x


def rat(p, q=1):
    """Build an exact scalar p/q."""
    return nq(Fraction(p, q))


def rat_str(x) -> str:
    """Serialize an exact scalar as "p" or "p/q"."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def parse_rat(s) -> "int | Fraction":
    """Parse "p" or "p/q" (also accepts ints passed through JSON)."""
    if isinstance(s, int):
        return s
    if isinstance(s, str):
        if "/" in s:
            p, q = s.split("/")
            return nq(Fraction(int(p), int(q)))
        return int(s)
    raise ValueError("not a rational literal: %r" % (s,))


# ---------------------------------------------------------------------------
# rotation ring Q[c,s]/(c^2+s^2-1)
# ---------------------------------------------------------------------------


def _poly_trim(cs):
    cs = list(cs)
    while cs and not cs[-1]:
        cs.pop()
    return tuple(cs)


def _poly_add(p, q):
    n = max(len(p), len(q))
    return _poly_trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                       for i in range(n)])


def _poly_neg(p):
    return tuple(-x for x in p)


def _poly_mul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return _poly_trim(out)


def _poly_scale(p, k):
    if not k:
        return ()
    return tuple(x * k for x in p)


def _poly_eval(p, x):
    acc = 0
    for coeff in reversed(p):
        acc = acc * x + coeff
    return nq(Fraction(acc)) if not isinstance(acc, int) else acc


_ONE_MINUS_C2 = (1, 0, -1)  # 1 - c^2


class RotScalar:
    """Element a(c) + s*b(c) of Q[c,s]/(c^2+s^2-1), canonical form."""

    __slots__ = ("a", "b")

    def __init__(self, a=(), b=()):
        self.a = _poly_trim(a)
        self.b = _poly_trim(b)

    @staticmethod
    def from_rat(x) -> "RotScalar":
        x = nq(Fraction(x)) if not isinstance(x, int) else x
        return RotScalar((x,) if x else (), ())

    @staticmethod
    def c() -> "RotScalar":
        return RotScalar((0, 1), ())

    @staticmethod
    def s() -> "RotScalar":
        return RotScalar((), (1,))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, RotScalar):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self == RotScalar.from_rat(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RotScalar.from_rat(other)
        return RotScalar(_poly_add(self.a, other.a), _poly_add(self.b, other.b))

    __radd__ = __add__

    def __neg__(self):
        return RotScalar(_poly_neg(self.a), _poly_neg(self.b))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RotScalar.from_rat(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RotScalar(_poly_scale(self.a, other), _poly_scale(self.b, other))
        # (a1 + s b1)(a2 + s b2) = a1 a2 + s^2 b1 b2 + s (a1 b2 + b1 a2)
        #                        = a1 a2 + (1 - c^2) b1 b2 + s (a1 b2 + b1 a2)
        a = _poly_add(_poly_mul(self.a, other.a),
                      _poly_mul(_ONE_MINUS_C2, _poly_mul(self.b, other.b)))
        b = _poly_add(_poly_mul(self.a, other.b), _poly_mul(self.b, other.a))
        return RotScalar(a, b)

    __rmul__ = __mul__

    def __repr__(self):
        return "RotScalar(a=%r, b=%r)" % (list(self.a), list(self.b))


ROT_ZERO = RotScalar()
ROT_ONE = RotScalar.from_rat(1)


def rot_reduce(terms) -> RotScalar:
    """Reduce a polynomial in c, s to canonical a(c) + s*b(c) form.

    ``terms`` maps (c-exponent, s-exponent) to a rational coefficient.
    Idempotent on canonical forms and a ring homomorphism onto them.
    """
    out = ROT_ZERO
    for (i, j), coeff in terms.items():
        if not coeff:
            continue
        # s^j = s^(j mod 2) * (1 - c^2)^(j // 2)
        base = (1,)
        for _ in range(j // 2):
            base = _poly_mul(base, _ONE_MINUS_C2)
        mono = _poly_mul(base, _poly_scale(tuple([0] * i + [1]), coeff))
        if j % 2:
            out = out + RotScalar((), mono)
        else:
            out = out + RotScalar(mono, ())
    return out


def rot_eval(x: RotScalar, endpoint: str):
    """Evaluate at an endpoint: "start" is (c,s)=(1,0), "end" is (c,s)=(0,1)."""
    if endpoint == "start":
        return nq(Fraction(_poly_eval(x.a, 1)))
    if endpoint == "end":
        return nq(Fraction(_poly_eval(x.a, 0)) + Fraction(_poly_eval(x.b, 0)))
    raise ValueError("endpoint must be 'start' or 'end'")


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(u, k):
    return tuple(k * a for a in u)


def vec_is_zero(u):
    return all(not a for a in u)


def zero_vec(n):
    return (0,) * n


def unit_vec(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


class Matrix:
    """Immutable dense matrix with exact rational entries."""

    __slots__ = ("m", "n", "rows", "_vec")

    def __init__(self, rows: Iterable[Iterable], n: Optional[int] = None):
        rows = tuple(tuple(r) for r in rows)
        self.rows = rows
        self.m = len(rows)
        self._vec = None
        if rows:
            self.n = len(rows[0])
            if any(len(r) != self.n for r in rows):
                raise ValueError("ragged rows")
        else:
            if n is None:
                raise ValueError("empty matrix needs explicit column count")
            self.n = n

    @staticmethod
    def zeros(m: int, n: int) -> "Matrix":
        return Matrix([(0,) * n for _ in range(m)], n=n)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix([unit_vec(n, i) for i in range(n)], n=n)

    @staticmethod
    def from_cols(cols: Sequence[Sequence], m: Optional[int] = None) -> "Matrix":
        cols = [tuple(c) for c in cols]
        if cols:
            m = len(cols[0])
        elif m is None:
            raise ValueError("empty column list needs explicit row count")
        return Matrix([tuple(c[i] for c in cols) for i in range(m)], n=len(cols))

    def col(self, j: int):
        return tuple(r[j] for r in self.rows)

    def cols(self):
        return [self.col(j) for j in range(self.n)]

    def transpose(self) -> "Matrix":
        return Matrix([self.col(j) for j in range(self.n)], n=self.m)

    def __eq__(self, other):
        # tuple comparison runs at C speed; int == Fraction compares by value
        return (isinstance(other, Matrix) and self.m == other.m
                and self.n == other.n and self.rows == other.rows)

    def __hash__(self):
        return hash((self.m, self.n, self.rows))

    def __add__(self, other):
        if self.m != other.m or self.n != other.n:
            raise ValueError("shape mismatch in +")
        return Matrix([vec_add(a, b) for a, b in zip(self.rows, other.rows)], n=self.n)

    def __sub__(self, other):
        if self.m != other.m or self.n != other.n:
            raise ValueError("shape mismatch in -")
        return Matrix([vec_sub(a, b) for a, b in zip(self.rows, other.rows)], n=self.n)

    def __neg__(self):
        return Matrix([vec_scale(r, -1) for r in self.rows], n=self.n)

    def scale(self, k) -> "Matrix":
        return Matrix([vec_scale(r, k) for r in self.rows], n=self.n)

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.n != other.m:
            raise ValueError("shape mismatch in *: %dx%d by %dx%d"
                             % (self.m, self.n, other.m, other.n))
        orows = other.rows
        p = other.n
        out = []
        for arow in self.rows:
            acc = [0] * p
            for j, a in enumerate(arow):
                if a:
                    brow = orows[j]
                    for t in range(p):
                        b = brow[t]
                        if b:
                            acc[t] += a * b
            out.append(acc)
        return Matrix(out, n=p)

    def apply(self, v: Sequence):
        """Matrix-vector product."""
        if len(v) != self.n:
            raise ValueError("vector length mismatch")
        out = []
        for row in self.rows:
            s = 0
            for a, x in zip(row, v):
                if a and x:
                    s += a * x
            out.append(s)
        return tuple(out)

    def is_zero(self) -> bool:
        return all(vec_is_zero(r) for r in self.rows)

    def vec(self):
        """Row-major flattening (cached; matrices are immutable)."""
        if self._vec is None:
            self._vec = tuple(x for r in self.rows for x in r)
        return self._vec

    @staticmethod
    def from_vec(v: Sequence, m: int, n: int) -> "Matrix":
        if len(v) != m * n:
            raise ValueError("length mismatch in from_vec")
        return Matrix([tuple(v[i * n:(i + 1) * n]) for i in range(m)], n=n)

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product (self's indices outer)."""
        out = []
        for arow in self.rows:
            for brow in other.rows:
                row = []
                for a in arow:
                    if a:
                        row.extend(a * b for b in brow)
                    else:
                        row.extend([0] * other.n)
                out.append(row)
        return Matrix(out, n=self.n * other.n)

    @staticmethod
    def hstack(mats: Sequence["Matrix"]) -> "Matrix":
        m = mats[0].m
        if any(x.m != m for x in mats):
            raise ValueError("row count mismatch in hstack")
        return Matrix([sum((list(x.rows[i]) for x in mats), []) for i in range(m)],
                      n=sum(x.n for x in mats))

    @staticmethod
    def vstack(mats: Sequence["Matrix"]) -> "Matrix":
        n = mats[0].n
        if any(x.n != n for x in mats):
            raise ValueError("column count mismatch in vstack")
        rows = []
        for x in mats:
            rows.extend(x.rows)
        return Matrix(rows, n=n)

    @staticmethod
    def block_diag(mats: Sequence["Matrix"]) -> "Matrix":
        mtot = sum(x.m for x in mats)
        ntot = sum(x.n for x in mats)
        out = [[0] * ntot for _ in range(mtot)]
        r0 = c0 = 0
        for x in mats:
            for i, row in enumerate(x.rows):
                out[r0 + i][c0:c0 + x.n] = list(row)
            r0 += x.m
            c0 += x.n
        return Matrix(out, n=ntot)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], n=len(cols))

    def __repr__(self):
        return "Matrix(%d x %d)" % (self.m, self.n)


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------


def _rref(rows):
    """Reduced row echelon form of a list of row vectors.

    Returns (rref_rows, pivot_columns); zero rows are dropped.  The result
    is the canonical basis of the row span, so equal spans give equal
    outputs.
    """
    rows = [list(r) for r in rows if not vec_is_zero(r)]
    if not rows:
        return [], []
    n = len(rows[0])
    out = []
    pivots = []
    for r in rows:
        # reduce against current basis
        for ex, p in zip(out, pivots):
            c = r[p]
            if c:
                for j in range(n):
                    if ex[j]:
                        r[j] -= c * ex[j]
        # find pivot
        piv = None
        for j in range(n):
            if r[j]:
                piv = j
                break
        if piv is None:
            continue
        inv = Fraction(1, 1) / r[piv]
        r = [nq(x * inv) if x else 0 for x in r]
        # eliminate above
        for ex, p in zip(out, pivots):
            c = ex[piv]
            if c:
                for j in range(n):
                    if r[j]:
                        ex[j] = nq(ex[j] - c * r[j])
        out.append(r)
        pivots.append(piv)
    order = sorted(range(len(out)), key=lambda i: pivots[i])
    return [out[i] for i in order], [pivots[i] for i in order]


def mat_lincomb(mats: Sequence[Matrix], coeffs: Sequence, m: int, n: int) -> Matrix:
    """Linear combination of matrices, accumulated row-wise."""
    rows = [[0] * n for _ in range(m)]
    for mat, c in zip(mats, coeffs):
        if c:
            for i in range(m):
                src = mat.rows[i]
                dst = rows[i]
                for j in range(n):
                    if src[j]:
                        dst[j] += c * src[j]
    return Matrix(rows, n=n)


def rank(a: Matrix) -> int:
    rows, _ = _rref(a.rows)
    return len(rows)


def solve_linear(a: Matrix, b: Sequence):
    """Solve A x = b exactly; returns a solution tuple or None if inconsistent."""
    if a.m != len(b):
        raise ValueError("dimension mismatch in solve_linear")
    n = a.n
    aug = [list(r) + [bv] for r, bv in zip(a.rows, b)]
    rows, pivots = _rref(aug)
    x = [0] * n
    for r, p in zip(rows, pivots):
        if p == n:
            return None  # row (0 ... 0 | 1): inconsistent
        x[p] = r[n]
    return tuple(x)


def solve_multi(a: Matrix, rhs: Matrix):
    """Solve A x = b for every column b of ``rhs`` with one elimination.

    Returns a list with one entry per column: a solution tuple or None.
    """
    if a.m != rhs.m:
        raise ValueError("dimension mismatch in solve_multi")
    n = a.n
    k = rhs.n
    aug = [list(ra) + list(rb) for ra, rb in zip(a.rows, rhs.rows)]
    if not aug:
        return [(0,) * n for _ in range(k)]
    rows, pivots = _rref(aug)
    out = []
    for c in range(k):
        x = [0] * n
        ok = True
        for r, p in zip(rows, pivots):
            if p >= n:
                # zero A-part: the row reads 0 = r[n+c] for system c
                if r[n + c]:
                    ok = False
                    break
            else:
                x[p] = r[n + c]
        out.append(tuple(x) if ok else None)
    return out


def kernel_basis(a: Matrix):
    """Basis of the right kernel {x : A x = 0}."""
    rows, pivots = _rref(a.rows)
    n = a.n
    pivset = set(pivots)
    free = [j for j in range(n) if j not in pivset]
    out = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, p in zip(rows, pivots):
            v[p] = -r[f]
        out.append(tuple(v))
    return out


def infeasibility_certificate(a: Matrix, b: Sequence):
    """Row multipliers proving A x = b unsolvable, or None when solvable.

    Returns lam with lam . A = 0 and lam . b = 1; such a vector exists
    exactly when the system is inconsistent.
    """
    if solve_linear(a, b) is not None:
        return None
    for k in kernel_basis(a.transpose()):
        s = 0
        for c, x in zip(k, b):
            if c and x:
                s += c * x
        if s:
            inv = Fraction(1, 1) / s
            return tuple(nq(c * inv) if c else 0 for c in k)
    raise AssertionError("inconsistent system without a certificate")


def inverse(a: Matrix) -> Optional[Matrix]:
    """Exact inverse, or None when singular."""
    if a.m != a.n:
        return None
    n = a.n
    aug = [list(r) + list(unit_vec(n, i)) for i, r in enumerate(a.rows)]
    rows, pivots = _rref(aug)
    if len(rows) != n or pivots != list(range(n)):
        return None
    return Matrix([r[n:] for r in rows], n=n)


def express_in_list(vectors: Sequence[Sequence], v: Sequence):
    """Coefficients writing v as a combination of the given vectors, or None."""
    if not vectors:
        return None if not vec_is_zero(v) else ()
    a = Matrix.from_cols(vectors)
    return solve_linear(a, v)


class SpanSolver:
    """Factored span membership/coordinates for many queries.

    Stores a reduced echelon basis of the given vectors together with the
    expression of each echelon row in the original vectors, so each
    ``coords`` query is a single reduction pass.
    """

    __slots__ = ("ambient", "count", "rows", "pivots", "trans")

    def __init__(self, vectors: Sequence[Sequence], ambient: int):
        self.ambient = ambient
        vectors = [tuple(v) for v in vectors]
        self.count = len(vectors)
        self.rows = []
        self.pivots = []
        self.trans = []
        for idx, v in enumerate(vectors):
            r = list(v)
            t = [0] * self.count
            t[idx] = 1
            for ex, p, et in zip(self.rows, self.pivots, self.trans):
                c = r[p]
                if c:
                    for j in range(ambient):
                        if ex[j]:
                            r[j] -= c * ex[j]
                    for j in range(self.count):
                        if et[j]:
                            t[j] -= c * et[j]
            piv = next((j for j in range(ambient) if r[j]), None)
            if piv is None:
                continue
            inv = Fraction(1, 1) / r[piv]
            r = [nq(x * inv) if x else 0 for x in r]
            t = [nq(x * inv) if x else 0 for x in t]
            for ex, p, et in zip(self.rows, self.pivots, self.trans):
                c = ex[piv]
                if c:
                    for j in range(ambient):
                        if r[j]:
                            ex[j] = nq(ex[j] - c * r[j])
                    for j in range(self.count):
                        if t[j]:
                            et[j] = nq(et[j] - c * t[j])
            self.rows.append(r)
            self.pivots.append(piv)
            self.trans.append(t)

    @property
    def dim(self):
        return len(self.rows)

    def coords(self, v: Sequence):
        """Coefficients in the original vectors, or None if outside the span."""
        r = list(v)
        acc = [0] * self.count
        for ex, p, t in zip(self.rows, self.pivots, self.trans):
            c = r[p]
            if c:
                for j in range(self.ambient):
                    if ex[j]:
                        r[j] -= c * ex[j]
                for j in range(self.count):
                    if t[j]:
                        acc[j] += c * t[j]
        if any(r):
            return None
        return tuple(nq(x) if not isinstance(x, int) else x for x in acc)

    def member(self, v: Sequence) -> bool:
        r = list(v)
        for ex, p in zip(self.rows, self.pivots):
            c = r[p]
            if c:
                for j in range(self.ambient):
                    if ex[j]:
                        r[j] -= c * ex[j]
        return not any(r)


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------


class Subspace:
    """Subspace of Q^n, stored as its canonical reduced-echelon row basis."""

    __slots__ = ("ambient", "basis", "pivots")

    def __init__(self, ambient: int, basis, pivots):
        self.ambient = ambient
        self.basis = tuple(tuple(r) for r in basis)
        self.pivots = tuple(pivots)

    @staticmethod
    def span(vectors: Iterable[Sequence], ambient: int) -> "Subspace":
        rows, pivots = _rref(list(vectors))
        return Subspace(ambient, rows, pivots)

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace(n, Matrix.identity(n).rows, range(n))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: Sequence):
        """Remainder of v after subtracting its projection onto the span."""
        v = list(v)
        for r, p in zip(self.basis, self.pivots):
            c = v[p]
            if c:
                for j in range(self.ambient):
                    if r[j]:
                        v[j] = nq(v[j] - c * r[j])
        return tuple(v)

    def member(self, v: Sequence) -> bool:
        return vec_is_zero(self.reduce(v))

    def coords(self, v: Sequence):
        """Coordinates of v in the canonical basis (requires membership)."""
        if not self.member(v):
            raise ValueError("vector not in subspace")
        return tuple(v[p] for p in self.pivots)

    def from_coords(self, c: Sequence):
        out = [0] * self.ambient
        for k, row in zip(c, self.basis):
            if k:
                for j, x in enumerate(row):
                    if x:
                        out[j] += k * x
        return tuple(out)

    def contains(self, other: "Subspace") -> bool:
        return all(self.member(v) for v in other.basis)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.ambient == other.ambient
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace.span(list(self.basis) + list(other.basis), self.ambient)

    def __repr__(self):
        return "Subspace(dim %d of Q^%d)" % (self.dim, self.ambient)


def span(vectors: Iterable[Sequence], ambient: int) -> Subspace:
    return Subspace.span(vectors, ambient)


def member(s: Subspace, v: Sequence) -> bool:
    return s.member(v)


def quotient(ambient: Subspace, rel: Subspace):
    """Quotient of ``ambient`` by ``rel``.

    Returns (complement, projection, section): a canonical complement
    subspace, the projection matrix (quotient-dim x ambient-space-dim) and a
    section with projection @ section = identity; section @ projection fixes
    representatives modulo ``rel``.
    """
    if ambient.ambient != rel.ambient:
        raise ValueError("ambient dimension mismatch")
    if not ambient.contains(rel):
        raise ValueError("relation subspace not contained in ambient")
    n = ambient.ambient
    d = ambient.dim
    rel_coords = Subspace.span([ambient.coords(v) for v in rel.basis], d)
    pivset = set(rel_coords.pivots)
    free = [j for j in range(d) if j not in pivset]
    q = len(free)
    # coordinate map C: Q^n -> Q^d picking pivot columns of the ambient basis
    cmat = Matrix([[1 if j == p else 0 for j in range(n)] for p in ambient.pivots], n=n)
    # reduction-then-free-coordinates in ambient coordinates
    prows = []
    for k in free:
        prows.append(unit_vec(d, k))
    pred = []
    for j in range(d):
        col = rel_coords.reduce(unit_vec(d, j))
        pred.append([col[k] for k in free])
    pmat = Matrix.from_cols(pred, m=q) if d else Matrix.zeros(q, 0)
    projection = pmat * cmat
    # section: free coordinate k represents the ambient basis vector free[k]
    sec_cols = [ambient.basis[k] for k in free]
    section = Matrix.from_cols(sec_cols, m=n) if q else Matrix.zeros(n, 0)
    complement = Subspace.span(sec_cols, n)
    return complement, projection, section


def saturate(seeds: Sequence[Sequence], operators: Sequence[Matrix], ambient: int):
    """Smallest subspace containing ``seeds`` and invariant under ``operators``.

    Returns (vectors, subspace) where ``vectors`` lists, in deterministic
    insertion order, seed vectors and operator images that enlarged the span.
    """
    rows: list = []
    pivots: list = []
    kept = []

    def try_add(v):
        r = list(v)
        for ex, p in zip(rows, pivots):
            c = r[p]
            if c:
                for j in range(ambient):
                    if ex[j]:
                        r[j] -= c * ex[j]
        piv = None
        for j in range(ambient):
            if r[j]:
                piv = j
                break
        if piv is None:
            return False
        inv = Fraction(1, 1) / r[piv]
        r = [nq(x * inv) if x else 0 for x in r]
        for ex, p in zip(rows, pivots):
            c = ex[piv]
            if c:
                for j in range(ambient):
                    if r[j]:
                        ex[j] = nq(ex[j] - c * r[j])
        rows.append(r)
        pivots.append(piv)
        return True

    queue = []
    for v in seeds:
        if try_add(v):
            kept.append(tuple(v))
            queue.append(tuple(v))
    while queue:
        v = queue.pop(0)
        for op in operators:
            w = op.apply(v)
            if try_add(w):
                kept.append(w)
                queue.append(w)
    return kept, Subspace.span(list(rows), ambient)
