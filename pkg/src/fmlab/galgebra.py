"""Finite groups and finite-dimensional associative algebras with group action.

An algebra is given by its structure tensor on a fixed basis
(b_i * b_j = sum_k c[i][j][k] b_k) together with a finite group acting by
algebra automorphisms.  Validation is diagnostic: ``validate_algebra``
returns a list of violated invariants rather than raising.

Unit search: in finite dimension a single element u with u*b = b (left),
b*u = b (right) or both (two-sided) for every basis element b is a unit for
the whole algebra, so `find_unit` reduces to one exact linear solve per side.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .exactkernel import (Matrix, Subspace, kernel_basis, rank,
                          solve_linear, unit_vec, vec_scale, zero_vec)


class _MulRow:
    __slots__ = ("table", "i")

    def __init__(self, table, i):
        self.table = table
        self.i = i

    def __getitem__(self, j):
        return self.table.entry(self.i, j)

    def __len__(self):
        return self.table.dim


class MulTable:
    """Lazy structure tensor: entries are computed on demand and cached.

    Products in large matrix algebras touch very few basis pairs, so the
    full dim^3 tensor is never materialized.  Tables compare equal when
    their construction keys match.
    """

    __slots__ = ("dim", "fn", "key", "_cache")

    def __init__(self, dim, fn, key):
        self.dim = dim
        self.fn = fn
        self.key = key
        self._cache = {}

    def entry(self, i, j):
        v = self._cache.get((i, j))
        if v is None:
            v = tuple(self.fn(i, j))
            self._cache[(i, j)] = v
        return v

    def __getitem__(self, i):
        return _MulRow(self, i)

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if isinstance(other, MulTable):
            return self.key == other.key
        return NotImplemented

    def __hash__(self):
        return hash(self.key)


def _scaled_sum(mats, coeffs, dim):
    """Sum of coeff-scaled matrices, accumulated row-wise."""
    rows = [[0] * dim for _ in range(dim)]
    for m, c in zip(mats, coeffs):
        if c:
            for i in range(dim):
                src = m.rows[i]
                dst = rows[i]
                for j in range(dim):
                    if src[j]:
                        dst[j] += c * src[j]
    return Matrix(rows, n=dim)


class FinGroup:
    """Finite group given by an explicit Cayley table of element indices."""

    __slots__ = ("order", "cayley", "identity", "inverse", "name")

    def __init__(self, cayley: Sequence[Sequence[int]], name: str = "G"):
        self.cayley = tuple(tuple(r) for r in cayley)
        self.order = len(self.cayley)
        self.name = name
        errs = self._table_errors()
        if errs:
            raise ValueError("not a group: " + "; ".join(errs))
        self.identity = self._find_identity()
        self.inverse = tuple(self._find_inverse(g) for g in range(self.order))

    def _table_errors(self):
        n = self.order
        errs = []
        for row in self.cayley:
            if len(row) != n or any(not (0 <= x < n) for x in row):
                return ["malformed table"]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.cayley[self.cayley[a][b]][c] != self.cayley[a][self.cayley[b][c]]:
                        errs.append("associativity fails at (%d,%d,%d)" % (a, b, c))
                        return errs
        if self._find_identity() is None:
            errs.append("no identity element")
            return errs
        e = self._find_identity()
        for g in range(n):
            if not any(self.cayley[g][h] == e and self.cayley[h][g] == e for h in range(n)):
                errs.append("no inverse for element %d" % g)
        return errs

    def _find_identity(self) -> Optional[int]:
        for e in range(self.order):
            if all(self.cayley[e][g] == g and self.cayley[g][e] == g
                   for g in range(self.order)):
                return e
        return None

    def _find_inverse(self, g: int) -> int:
        for h in range(self.order):
            if self.cayley[g][h] == self.identity:
                return h
        raise ValueError("no inverse")

    def mul(self, a: int, b: int) -> int:
        return self.cayley[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def __eq__(self, other):
        return isinstance(other, FinGroup) and self.cayley == other.cayley

    def __hash__(self):
        return hash(self.cayley)

    def __repr__(self):
        return "FinGroup(%s, order %d)" % (self.name, self.order)


def trivial_group() -> FinGroup:
    return FinGroup([[0]], name="1")


def cyclic_group(n: int) -> FinGroup:
    return FinGroup([[(i + j) % n for j in range(n)] for i in range(n)],
                    name="Z%d" % n)


def symmetric_group_3() -> FinGroup:
    """S3 as permutations of {0,1,2} in a fixed element order."""
    import itertools
    perms = sorted(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]
    return FinGroup(table, name="S3")


class Algebra:
    """Finite-dimensional associative algebra with a G-action by automorphisms."""

    __slots__ = ("dim", "structure", "group", "action", "name",
                 "_left", "_right", "_unit_cache")

    def __init__(self, dim: int, structure, group: FinGroup, action=None,
                 name: str = "A"):
        self.dim = dim
        if isinstance(structure, MulTable):
            self.structure = structure
        else:
            self.structure = tuple(tuple(tuple(x for x in v) for v in row)
                                   for row in structure)
            if len(self.structure) != dim or any(
                    len(row) != dim or any(len(v) != dim for v in row)
                    for row in self.structure):
                raise ValueError("structure tensor has wrong shape")
        self.group = group
        if action is None:
            action = [Matrix.identity(dim) for _ in range(group.order)]
        self.action = tuple(action)
        self.name = name
        self._left = None
        self._right = None
        self._unit_cache = {}
        if len(self.action) != group.order or any(
                a.m != dim or a.n != dim for a in self.action):
            raise ValueError("action has wrong shape")

    # --- multiplication -----------------------------------------------------

    def mult(self, x: Sequence, y: Sequence):
        """Product of two coefficient vectors."""
        out = [0] * self.dim
        for i, xi in enumerate(x):
            if xi:
                row = self.structure[i]
                for j, yj in enumerate(y):
                    if yj:
                        cij = row[j]
                        f = xi * yj
                        for k, c in enumerate(cij):
                            if c:
                                out[k] += f * c
        return tuple(out)

    def left_mult(self, i: int) -> Matrix:
        """Matrix of left multiplication by basis element i."""
        if self._left is None:
            self._left = [None] * self.dim
        if self._left[i] is None:
            self._left[i] = Matrix.from_cols(
                [self.structure[i][j] for j in range(self.dim)], m=self.dim)
        return self._left[i]

    def right_mult(self, j: int) -> Matrix:
        """Matrix of right multiplication by basis element j."""
        if self._right is None:
            self._right = [None] * self.dim
        if self._right[j] is None:
            self._right[j] = Matrix.from_cols(
                [self.structure[i][j] for i in range(self.dim)], m=self.dim)
        return self._right[j]

    def left_mult_by(self, x: Sequence) -> Matrix:
        return _scaled_sum([self.left_mult(i) for i in range(self.dim)], x,
                           self.dim)

    def right_mult_by(self, x: Sequence) -> Matrix:
        return _scaled_sum([self.right_mult(j) for j in range(self.dim)], x,
                           self.dim)

    def __repr__(self):
        return "Algebra(%s, dim %d, |G|=%d)" % (self.name, self.dim, self.group.order)


def validate_algebra(a: Algebra, check_action: bool = True):
    """Diagnostic validation; returns the (possibly empty) list of violations."""
    errs = []
    d = a.dim
    for i in range(d):
        for j in range(d):
            ij = a.structure[i][j]
            for k in range(d):
                lhs = a.mult(ij, unit_vec(d, k))
                rhs = a.mult(unit_vec(d, i), a.structure[j][k])
                if lhs != rhs:
                    errs.append("associativity fails at basis triple (%d,%d,%d)" % (i, j, k))
    if check_action:
        g0 = a.group.identity
        if a.action[g0] != Matrix.identity(d):
            errs.append("identity group element does not act as identity")
        for g in range(a.group.order):
            ag = a.action[g]
            from .exactkernel import inverse as mat_inverse
            if mat_inverse(ag) is None:
                errs.append("action of g=%d is singular" % g)
                continue
            for i in range(d):
                for j in range(d):
                    lhs = ag.apply(a.mult(unit_vec(d, i), unit_vec(d, j)))
                    rhs = a.mult(ag.col(i), ag.col(j))
                    if lhs != rhs:
                        errs.append("action of g=%d is not multiplicative at (%d,%d)"
                                    % (g, i, j))
        for g in range(a.group.order):
            for h in range(a.group.order):
                if a.action[g] * a.action[h] != a.action[a.group.mul(g, h)]:
                    errs.append("action is not a group homomorphism at (%d,%d)" % (g, h))
    return errs


def check_quadratik(a: Algebra) -> bool:
    """True iff products of basis elements span the whole algebra."""
    prods = [a.structure[i][j] for i in range(a.dim) for j in range(a.dim)]
    return Subspace.span(prods, a.dim).dim == a.dim


def _unit_system(a: Algebra, side: str):
    d = a.dim
    rows = []
    rhs = []
    if side in ("left", "two"):
        # u * b_j = b_j:  sum_i u_i c[i][j][k] = delta_jk
        for j in range(d):
            for k in range(d):
                rows.append([a.structure[i][j][k] for i in range(d)])
                rhs.append(1 if j == k else 0)
    if side in ("right", "two"):
        # b_j * u = b_j:  sum_i u_i c[j][i][k] = delta_jk
        for j in range(d):
            for k in range(d):
                rows.append([a.structure[j][i][k] for i in range(d)])
                rhs.append(1 if j == k else 0)
    return Matrix(rows, n=d), rhs


def find_unit(a: Algebra, side: str = "two"):
    """Element acting as a left/right/two-sided unit on the basis, or None.

    A local unit for a basis is a unit for every element, so the returned
    element certifies the requested one-sided or two-sided unit property.
    """
    if side not in ("left", "right", "two"):
        raise ValueError("side must be left, right or two")
    if side in a._unit_cache:
        return a._unit_cache[side]
    if a.dim == 0:
        a._unit_cache[side] = ()
        return ()
    mat, rhs = _unit_system(a, side)
    sol = solve_linear(mat, rhs)
    a._unit_cache[side] = sol
    return sol


def unit_infeasibility_witness(a: Algebra, side: str):
    """Row multipliers certifying that no unit of the given side exists.

    Returns None when a unit exists; otherwise lam with lam . M = 0 and
    lam . rhs = 1 for the defining linear system (M, rhs).
    """
    if find_unit(a, side) is not None:
        return None
    from .exactkernel import infeasibility_certificate
    mat, rhs = _unit_system(a, side)
    return infeasibility_certificate(mat, rhs)


class AlgebraHom:
    """Linear map between algebras, on basis coordinates (columns = images)."""

    __slots__ = ("source", "target", "matrix", "name")

    def __init__(self, source: Algebra, target: Algebra, matrix: Matrix,
                 name: str = "f"):
        if matrix.m != target.dim or matrix.n != source.dim:
            raise ValueError("hom matrix has wrong shape")
        self.source = source
        self.target = target
        self.matrix = matrix
        self.name = name

    def apply(self, x: Sequence):
        return self.matrix.apply(x)

    def __repr__(self):
        return "AlgebraHom(%s: %s -> %s)" % (self.name, self.source.name,
                                             self.target.name)


def check_hom(f: AlgebraHom, check_equivariance: bool = True):
    """Verify multiplicativity (and equivariance) on all basis pairs."""
    errs = []
    s, t = f.source, f.target
    if s.group is not t.group and s.group != t.group:
        errs.append("source and target groups differ")
        return errs
    for i in range(s.dim):
        fi = f.matrix.col(i)
        for j in range(s.dim):
            lhs = f.apply(s.structure[i][j])
            rhs = t.mult(fi, f.matrix.col(j))
            if lhs != rhs:
                errs.append("multiplicativity fails at basis pair (%d,%d)" % (i, j))
    if check_equivariance:
        for g in range(s.group.order):
            if f.matrix * s.action[g] != t.action[g] * f.matrix:
                errs.append("equivariance fails at g=%d" % g)
    return errs


def compose_hom(g: AlgebraHom, f: AlgebraHom) -> AlgebraHom:
    """Composite g after f."""
    if f.target is not g.source and f.target.structure != g.source.structure:
        raise ValueError("middle algebras do not match")
    return AlgebraHom(f.source, g.target, g.matrix * f.matrix,
                      name="%s.%s" % (g.name, f.name))


def identity_hom(a: Algebra) -> AlgebraHom:
    return AlgebraHom(a, a, Matrix.identity(a.dim), name="id")


def hom_is_injective(f: AlgebraHom) -> bool:
    return not kernel_basis(f.matrix)


def hom_is_bijective(f: AlgebraHom) -> bool:
    return f.source.dim == f.target.dim and rank(f.matrix) == f.source.dim


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def _structure_from_mult(dim, mult):
    return [[list(mult(i, j)) for j in range(dim)] for i in range(dim)]


def rationals(group: Optional[FinGroup] = None) -> Algebra:
    """The base field Q as a one-dimensional algebra with trivial action."""
    g = group or trivial_group()
    return Algebra(1, [[[1]]], g, [Matrix.identity(1)] * g.order, name="Q")


def zero_algebra(group: Optional[FinGroup] = None) -> Algebra:
    g = group or trivial_group()
    return Algebra(0, [], g, [Matrix([], n=0) for _ in range(g.order)], name="0")


def group_algebra(h: FinGroup, group: Optional[FinGroup] = None,
                  action=None, name: Optional[str] = None) -> Algebra:
    """Group algebra Q[H]; basis indexed by group elements."""
    g = group or trivial_group()
    n = h.order

    def mult(i, j):
        return unit_vec(n, h.mul(i, j))

    return Algebra(n, _structure_from_mult(n, mult), g,
                   action, name=name or ("Q[%s]" % h.name))


def group_algebra_conj(h: FinGroup, name: Optional[str] = None) -> Algebra:
    """Q[H] with H itself acting by conjugation automorphisms."""
    n = h.order
    action = []
    for g in range(n):
        cols = [unit_vec(n, h.mul(h.mul(g, x), h.inv(g))) for x in range(n)]
        action.append(Matrix.from_cols(cols))
    return group_algebra(h, h, action, name=name or ("Q[%s]c" % h.name))


def group_algebra_z2_sign() -> Algebra:
    """Q[Z/2] with Z/2 acting by the sign automorphism u -> -u."""
    z2 = cyclic_group(2)
    sign = Matrix([[1, 0], [0, -1]])
    return group_algebra(z2, z2, [Matrix.identity(2), sign], name="Q[Z2]s")


def matrix_algebra(n: int, group: Optional[FinGroup] = None, action=None) -> Algebra:
    """M_n(Q); basis E_ij ordered row-major."""
    g = group or trivial_group()
    d = n * n

    def mult(a, b):
        i, j = divmod(a, n)
        k, l = divmod(b, n)
        if j != k:
            return zero_vec(d)
        return unit_vec(d, i * n + l)

    return Algebra(d, _structure_from_mult(d, mult), g, action, name="M%d" % n)


def matrix_algebra_over(a: Algebra, n: int, action=None,
                        name: Optional[str] = None) -> Algebra:
    """M_n(A): basis (E_ij, b_k) ordered with (i,j) outer, k inner.

    Large tables stay lazy; products only ever touch the few basis pairs a
    computation actually multiplies.
    """
    d = n * n * a.dim
    ad = a.dim

    def mult(x, y):
        ij, k = divmod(x, ad)
        i, j = divmod(ij, n)
        kl, t = divmod(y, ad)
        kk, l = divmod(kl, n)
        out = [0] * d
        if j != kk:
            return out
        prod = a.structure[k][t]
        base = (i * n + l) * ad
        for idx, c in enumerate(prod):
            if c:
                out[base + idx] = c
        return out

    if action is None:
        # entrywise action, trivial on the matrix factor
        action = [Matrix.identity(n * n).kron(a.action[g])
                  for g in range(a.group.order)]
    nm = name or ("M%d(%s)" % (n, a.name))
    if d > 64:
        key = ("matrix_over", n, a.dim, id(a))
        return Algebra(d, MulTable(d, mult, key), a.group, action, name=nm)
    return Algebra(d, _structure_from_mult(d, mult), a.group, action, name=nm)


def tensor_algebra(a: Algebra, b: Algebra, name: Optional[str] = None) -> Algebra:
    """A (x) B with the diagonal action; basis (i,j) with i outer."""
    if a.group != b.group:
        raise ValueError("tensor factors must share the group")
    da, db = a.dim, b.dim
    d = da * db

    def mult(x, y):
        i, j = divmod(x, db)
        k, l = divmod(y, db)
        pa = a.structure[i][k]
        pb = b.structure[j][l]
        out = [0] * d
        for u, cu in enumerate(pa):
            if cu:
                for v, cv in enumerate(pb):
                    if cv:
                        out[u * db + v] = cu * cv
        return out

    action = [a.action[g].kron(b.action[g]) for g in range(a.group.order)]
    return Algebra(d, _structure_from_mult(d, mult), a.group, action,
                   name=name or ("%s(x)%s" % (a.name, b.name)))


def epsilon_algebra(group: Optional[FinGroup] = None) -> Algebra:
    """One-dimensional algebra with zero square (not quadratik)."""
    g = group or trivial_group()
    return Algebra(1, [[[0]]], g, [Matrix.identity(1)] * g.order, name="eps")


def dual_numbers(group: Optional[FinGroup] = None) -> Algebra:
    """Q[e]/(e^2), basis (1, e); unital, non-semisimple."""
    g = group or trivial_group()
    st = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    return Algebra(2, st, g, [Matrix.identity(2)] * g.order, name="Q[e]")


def column_algebra(group: Optional[FinGroup] = None) -> Algebra:
    """{[[a,0],[b,0]]} in M_2(Q), basis (p, q): pp=p, qp=q, pq=qq=0.

    Has a right unit (p) and no left unit.
    """
    g = group or trivial_group()
    # st[i][j] = b_i * b_j: pp=p, pq=0, qp=q, qq=0
    st = [[[1, 0], [0, 0]], [[0, 1], [0, 0]]]
    return Algebra(2, st, g, [Matrix.identity(2)] * g.order, name="col")


def row_algebra(group: Optional[FinGroup] = None) -> Algebra:
    """{[[a,b],[0,0]]} in M_2(Q), basis (p, q): pp=p, pq=q, qp=qq=0.

    Has a left unit (p) and no right unit.
    """
    g = group or trivial_group()
    st = [[[1, 0], [0, 1]], [[0, 0], [0, 0]]]
    return Algebra(2, st, g, [Matrix.identity(2)] * g.order, name="row")


def product_qq(group: Optional[FinGroup] = None, swap: bool = False) -> Algebra:
    """Q x Q; with ``swap`` a Z/2 action exchanging the factors."""
    st = [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    if swap:
        z2 = cyclic_group(2)
        action = [Matrix.identity(2), Matrix([[0, 1], [1, 0]])]
        return Algebra(2, st, z2, action, name="QxQ")
    g = group or trivial_group()
    return Algebra(2, st, g, [Matrix.identity(2)] * g.order, name="QxQ")


def upper_triangular_2(group: Optional[FinGroup] = None) -> Algebra:
    """Upper triangular 2x2 matrices, basis (E11, E12, E22)."""
    g = group or trivial_group()
    e11, e12, e22 = unit_vec(3, 0), unit_vec(3, 1), unit_vec(3, 2)
    z = zero_vec(3)
    st = [
        [e11, e12, z],
        [z, z, e12],
        [z, z, e22],
    ]
    st = [[list(v) for v in row] for row in st]
    return Algebra(3, st, g, [Matrix.identity(3)] * g.order, name="UT2")


def m2_with_sign_action() -> Algebra:
    """M_2(Q) with Z/2 acting by conjugation with diag(1,-1)."""
    z2 = cyclic_group(2)
    d = Matrix([[1, 0], [0, -1]])
    # conjugation on basis E_ij (row-major): E_ij -> d E_ij d^{-1}
    cols = []
    for a in range(4):
        i, j = divmod(a, 2)
        sgn = d.rows[i][i] * d.rows[j][j]
        cols.append(vec_scale(unit_vec(4, a), sgn))
    conj = Matrix.from_cols(cols)
    return matrix_algebra(2, z2, [Matrix.identity(4), conj])


def algebra_hom_from_images(source: Algebra, target: Algebra, images,
                            name: str = "f") -> AlgebraHom:
    """Hom sending basis element i of the source to ``images[i]``."""
    return AlgebraHom(source, target, Matrix.from_cols(list(images), m=target.dim),
                      name=name)


def augmentation_hom(ga: Algebra, q: Algebra) -> AlgebraHom:
    """Group-algebra augmentation: every group basis element maps to 1."""
    if q.dim != 1:
        raise ValueError("target must be one-dimensional")
    return AlgebraHom(ga, q, Matrix([[1] * ga.dim]), name="aug")


def multiplication_hom(tens: Algebra, a: Algebra) -> AlgebraHom:
    """The product map A(x)A -> A, b_i (x) b_j -> b_i b_j."""
    if tens.dim != a.dim * a.dim:
        raise ValueError("source is not A(x)A for the given A")
    cols = [a.structure[i][j] for i in range(a.dim) for j in range(a.dim)]
    return AlgebraHom(tens, a, Matrix.from_cols(cols, m=a.dim), name="mult")
