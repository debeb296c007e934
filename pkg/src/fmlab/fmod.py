"""Functional modules: right modules with a distinguished functional space.

A module is a Q-vector space with a right action of the coefficient algebra
(one matrix per algebra basis element), a semilinear G-action, and a stored
generating list of functionals M -> A (each a coeff.dim x dim matrix).  The
functional space Theta is the span of the stored generators; constructors
complete the list under the left A-action (a.phi)(x) = a.phi(x) and the
G-action g(phi) = alpha_g . phi . S_{g^-1} by span saturation, so the stored
list always spans a closed space.

Basis conventions
-----------------
The standard module A^n is ordered coordinate-major: index i*dim(A) + k is
basis vector e_i (x) b_k.  A product G-action has the form mu_g (x) alpha_g
for rational n x n matrices mu_g (the "cfactor"); constructions that change
coefficients require the cfactor to be available.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .exactkernel import (Matrix, Subspace, inverse, quotient, saturate,
                          unit_vec, vec_is_zero, zero_vec)
from .galgebra import Algebra, AlgebraHom, tensor_algebra


@dataclass(frozen=True)
class StandardInfo:
    """Marks a module as the standard module A^n (with optional cfactor)."""
    n: int
    cfactor: Optional[tuple] = None  # tuple[Matrix] of n x n rational matrices


class FunctionalModule:
    """Right module over ``coeff`` with G-action and functional space."""

    __slots__ = ("coeff", "dim", "raction", "gaction", "functionals",
                 "standard", "name", "_theta", "_fsolver")

    def __init__(self, coeff: Algebra, dim: int, raction, gaction, functionals,
                 standard: Optional[StandardInfo] = None, name: str = "E",
                 complete: bool = True):
        self.coeff = coeff
        self.dim = dim
        self.raction = tuple(raction)
        self.gaction = tuple(gaction)
        self.functionals = tuple(functionals)
        self.standard = standard
        self.name = name
        self._theta = None
        self._fsolver = None
        if len(self.raction) != coeff.dim:
            raise ValueError("need one right-action matrix per algebra basis element")
        if len(self.gaction) != coeff.group.order:
            raise ValueError("need one action matrix per group element")
        for m in self.raction + self.gaction:
            if m.m != dim or m.n != dim:
                raise ValueError("action matrix has wrong shape")
        for f in self.functionals:
            if f.m != coeff.dim or f.n != dim:
                raise ValueError("functional matrix has wrong shape")
        if complete:
            self._complete_theta()

    # --- basic structure ----------------------------------------------------

    @property
    def group(self):
        return self.coeff.group

    def right_mult_by(self, a: Sequence) -> Matrix:
        """Matrix of the right action of the algebra element with coords a."""
        rows = [[0] * self.dim for _ in range(self.dim)]
        for k, ak in enumerate(a):
            if ak:
                mk = self.raction[k].rows
                for i in range(self.dim):
                    src = mk[i]
                    dst = rows[i]
                    for j in range(self.dim):
                        if src[j]:
                            dst[j] += ak * src[j]
        return Matrix(rows, n=self.dim)

    def theta_operators(self):
        """Operators on vectorized functionals spanning the Theta closure."""
        a = self.coeff
        q = self.dim
        ops = []
        iq = Matrix.identity(q)
        for i in range(a.dim):
            ops.append(a.left_mult(i).kron(iq))
        for g in range(self.group.order):
            gi = self.group.inv(g)
            ops.append(a.action[g].kron(self.gaction[gi].transpose()))
        return ops

    def _complete_theta(self):
        amb = self.coeff.dim * self.dim
        seeds = [f.vec() for f in self.functionals]
        kept, space = saturate(seeds, self.theta_operators(), amb)
        keptset = {tuple(v) for v in seeds}
        extra = [v for v in kept if v not in keptset]
        if extra:
            self.functionals = self.functionals + tuple(
                Matrix.from_vec(v, self.coeff.dim, self.dim) for v in extra)
        self._theta = None
        self._fsolver = None

    def theta(self):
        """(independent basis list, subspace) of the saturated Theta span."""
        if self._theta is None:
            amb = self.coeff.dim * self.dim
            space = Subspace.span([f.vec() for f in self.functionals], amb)
            basis = [Matrix.from_vec(v, self.coeff.dim, self.dim)
                     for v in space.basis]
            self._theta = (basis, space)
        return self._theta

    def theta_basis(self):
        return self.theta()[0]

    def theta_space(self) -> Subspace:
        return self.theta()[1]

    def theta_contains(self, phi: Matrix) -> bool:
        return self.theta_space().member(phi.vec())

    def functional_coords(self, phi: Matrix):
        """Coordinates of phi in the stored generating list, or None."""
        if self._fsolver is None:
            from .exactkernel import SpanSolver
            self._fsolver = SpanSolver([f.vec() for f in self.functionals],
                                       self.coeff.dim * self.dim)
        return self._fsolver.coords(phi.vec())

    def __repr__(self):
        return "FunctionalModule(%s over %s, dim %d, %d functionals)" % (
            self.name, self.coeff.name, self.dim, len(self.functionals))


def validate_module(e: FunctionalModule):
    """Check module axioms, semilinearity, functional linearity, Theta closure."""
    errs = []
    a = e.coeff
    d = e.dim
    for i in range(a.dim):
        for j in range(a.dim):
            lhs = e.right_mult_by(a.structure[i][j])
            rhs = e.raction[j] * e.raction[i]
            if lhs != rhs:
                errs.append("right action fails at basis pair (%d,%d)" % (i, j))
    g0 = e.group.identity
    if e.gaction[g0] != Matrix.identity(d):
        errs.append("identity group element does not act as identity")
    for g in range(e.group.order):
        if inverse(e.gaction[g]) is None:
            errs.append("module action of g=%d is singular" % g)
    for g in range(e.group.order):
        for h in range(e.group.order):
            if e.gaction[g] * e.gaction[h] != e.gaction[e.group.mul(g, h)]:
                errs.append("module action not a group homomorphism at (%d,%d)" % (g, h))
    for g in range(e.group.order):
        for i in range(a.dim):
            lhs = e.gaction[g] * e.raction[i]
            rhs = e.right_mult_by(a.action[g].col(i)) * e.gaction[g]
            if lhs != rhs:
                errs.append("semilinearity fails at (g=%d, basis %d)" % (g, i))
    for t, phi in enumerate(e.functionals):
        for i in range(a.dim):
            if phi * e.raction[i] != a.right_mult(i) * phi:
                errs.append("functional %d is not A-linear at basis %d" % (t, i))
    # closure of the stored span under the Theta operators
    space = e.theta_space()
    for op in e.theta_operators():
        for v in space.basis:
            if not space.member(op.apply(v)):
                errs.append("functional space is not closed")
                return errs
    return errs


# ---------------------------------------------------------------------------
# module homomorphisms
# ---------------------------------------------------------------------------


class ModuleHom:
    """A-linear map between functional modules over the same algebra."""

    __slots__ = ("source", "target", "matrix", "name")

    def __init__(self, source: FunctionalModule, target: FunctionalModule,
                 matrix: Matrix, name: str = "U"):
        if matrix.m != target.dim or matrix.n != source.dim:
            raise ValueError("module hom matrix has wrong shape")
        self.source = source
        self.target = target
        self.matrix = matrix
        self.name = name

    def apply(self, v):
        return self.matrix.apply(v)

    def __repr__(self):
        return "ModuleHom(%s: %s -> %s)" % (self.name, self.source.name,
                                            self.target.name)


def check_module_hom(h: ModuleHom, equivariant: bool = True):
    errs = []
    e, f = h.source, h.target
    if not same_algebra(e.coeff, f.coeff):
        errs.append("source and target coefficient algebras differ")
        return errs
    for i in range(e.coeff.dim):
        if h.matrix * e.raction[i] != f.raction[i] * h.matrix:
            errs.append("not A-linear at algebra basis %d" % i)
    if equivariant:
        for g in range(e.group.order):
            if h.matrix * e.gaction[g] != f.gaction[g] * h.matrix:
                errs.append("not equivariant at g=%d" % g)
    return errs


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def standard_module(a: Algebra, n: int, cfactor=None, gaction=None,
                    name: Optional[str] = None) -> FunctionalModule:
    """The module A^n with functionals given by left multiplications.

    ``cfactor`` supplies a product-form action mu_g (x) alpha_g; ``gaction``
    supplies arbitrary (semilinear) action matrices instead.  At most one of
    the two may be given.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if cfactor is not None and gaction is not None:
        raise ValueError("give either cfactor or gaction, not both")
    d = n * a.dim
    raction = [Matrix.identity(n).kron(a.right_mult(j)) for j in range(a.dim)]
    info_cf = None
    if gaction is None:
        if cfactor is None:
            cfactor = [Matrix.identity(n) for _ in range(a.group.order)]
        cfactor = list(cfactor)
        gaction = [cfactor[g].kron(a.action[g]) for g in range(a.group.order)]
        info_cf = tuple(cfactor)
    functionals = []
    for i in range(n):
        for k in range(a.dim):
            # phi_{e_i b_k}: e_j (x) b_l -> delta_ij b_k b_l
            cols = []
            for j in range(n):
                for l in range(a.dim):
                    cols.append(a.structure[k][l] if j == i else zero_vec(a.dim))
            functionals.append(Matrix.from_cols(cols, m=a.dim))
    return FunctionalModule(a, d, raction, gaction, functionals,
                            standard=StandardInfo(n, info_cf),
                            name=name or ("%s^%d" % (a.name, n)))


def zero_module(a: Algebra, name: Optional[str] = None) -> FunctionalModule:
    z = Matrix([], n=0)
    return FunctionalModule(a, 0, [z] * a.dim, [z] * a.group.order, [],
                            standard=StandardInfo(0, tuple(
                                Matrix.zeros(0, 0) for _ in range(a.group.order))),
                            name=name or "0")


def same_algebra(a, b) -> bool:
    """Structural identity of algebras including group and action."""
    return (a is b or (a.structure == b.structure
                       and a.group.cayley == b.group.cayley
                       and a.action == b.action))


def direct_sum(mods: Sequence[FunctionalModule],
               name: Optional[str] = None) -> FunctionalModule:
    """Direct sum; actions are block diagonal, functionals extend by zero."""
    if not mods:
        raise ValueError("need at least one summand")
    a = mods[0].coeff
    for m in mods[1:]:
        if not same_algebra(m.coeff, a):
            raise ValueError("mixed coefficient algebras in direct sum")
    dims = [m.dim for m in mods]
    raction = [Matrix.block_diag([m.raction[i] for m in mods])
               for i in range(a.dim)]
    gaction = [Matrix.block_diag([m.gaction[g] for m in mods])
               for g in range(a.group.order)]
    functionals = []
    for idx, m in enumerate(mods):
        before = sum(dims[:idx])
        after = sum(dims[idx + 1:])
        for f in m.functionals:
            functionals.append(Matrix.hstack(
                [Matrix.zeros(a.dim, before), f, Matrix.zeros(a.dim, after)]))
    std = None
    if all(m.standard is not None and m.standard.cfactor is not None for m in mods):
        n = sum(m.standard.n for m in mods)
        cf = tuple(Matrix.block_diag([m.standard.cfactor[g] for m in mods])
                   for g in range(a.group.order))
        std = StandardInfo(n, cf)
    return FunctionalModule(a, sum(dims), raction, gaction, functionals,
                            standard=std,
                            name=name or "(+)".join(m.name for m in mods))


def external_tensor(e: FunctionalModule, f: FunctionalModule,
                    name: Optional[str] = None):
    """External tensor product over A (x) B with the diagonal G-action.

    Returns (module, tensor_algebra).  Basis order: e-index outer.
    """
    ab = tensor_algebra(e.coeff, f.coeff)
    d = e.dim * f.dim
    raction = []
    for i in range(e.coeff.dim):
        for j in range(f.coeff.dim):
            raction.append(e.raction[i].kron(f.raction[j]))
    gaction = [e.gaction[g].kron(f.gaction[g]) for g in range(e.group.order)]
    functionals = [phi.kron(psi) for phi in e.functionals for psi in f.functionals]
    return FunctionalModule(ab, d, raction, gaction, functionals,
                            name=name or ("%s(x)%s" % (e.name, f.name))), ab


@dataclass
class InternalTensorInfo:
    """Construction data for an internal tensor product (change of coefficients)."""
    relations: Subspace
    projection: Matrix         # quotient-dim x (dimE * dimB)
    section: Matrix            # (dimE * dimB) x quotient-dim
    gen_index: dict            # (E-functional index, B-basis index) -> position


def internal_tensor(e: FunctionalModule, pi: AlgebraHom,
                    name: Optional[str] = None):
    """Change of coefficients along pi: the quotient of E (x) B by the span of
    xi a (x) b - xi (x) pi(a) b, with elementary functionals pushed down.

    Returns (module over pi.target, InternalTensorInfo).
    """
    a = e.coeff
    if pi.source is not a and pi.source.structure != a.structure:
        raise ValueError("hom source does not match module coefficients")
    b = pi.target
    db = b.dim
    d = e.dim * db

    def idx(i, j):
        return i * db + j

    rels = []
    for i in range(e.dim):
        for k in range(a.dim):
            ra = e.raction[k].col(i)  # e_i . a_k in E
            pik = pi.matrix.col(k)    # pi(a_k) in B
            for j in range(db):
                v = [0] * d
                for u, c in enumerate(ra):
                    if c:
                        v[idx(u, j)] += c
                w = b.mult(pik, unit_vec(db, j))
                for t, c in enumerate(w):
                    if c:
                        v[idx(i, t)] -= c
                if not vec_is_zero(v):
                    rels.append(v)
    rspace = Subspace.span(rels, d)

    # invariance of the relation span under the right B-action and G-action
    big_raction = [Matrix.identity(e.dim).kron(b.right_mult(j)) for j in range(db)]
    big_gaction = [e.gaction[g].kron(b.action[g]) for g in range(e.group.order)]
    for j, m in enumerate(big_raction):
        for v in rspace.basis:
            if not rspace.member(m.apply(v)):
                raise ValueError("relation subspace not invariant under right "
                                 "action of basis element %d" % j)
    for g, m in enumerate(big_gaction):
        for v in rspace.basis:
            if not rspace.member(m.apply(v)):
                raise ValueError("relation subspace not invariant under g=%d" % g)

    _, proj, sec = quotient(Subspace.full(d), rspace)
    qd = proj.m
    raction_q = [proj * m * sec for m in big_raction]
    gaction_q = [proj * m * sec for m in big_gaction]

    functionals = []
    gen_index = {}
    for t, phi in enumerate(e.functionals):
        for c in range(db):
            cols = []
            for i in range(e.dim):
                w = pi.matrix.apply(phi.col(i))
                for j in range(db):
                    cols.append(b.mult(unit_vec(db, c), b.mult(w, unit_vec(db, j))))
            big = Matrix.from_cols(cols, m=db)
            # elementary functionals kill the relations identically; a failure
            # here is a bug, not bad input
            for v in rspace.basis:
                assert vec_is_zero(big.apply(v)), \
                    "elementary functional does not kill relations"
            gen_index[(t, c)] = len(functionals)
            functionals.append(big * sec)

    mod = FunctionalModule(b, qd, raction_q, gaction_q, functionals,
                           name=name or ("%s(x)_%s %s" % (e.name, pi.name, b.name)))
    return mod, InternalTensorInfo(rspace, proj, sec, gen_index)


def internal_collapse_map(e: FunctionalModule, it_mod: FunctionalModule,
                          info: InternalTensorInfo) -> Matrix:
    """Canonical map E (x)_id A -> E, class of xi (x) a -> xi.a."""
    a = e.coeff
    cols = []
    for i in range(e.dim):
        for k in range(a.dim):
            cols.append(e.raction[k].col(i))
    big = Matrix.from_cols(cols, m=e.dim)
    return big * info.section


def check_cofull_module(e: FunctionalModule) -> bool:
    """True iff E is spanned by the vectors xi . phi(eta)."""
    if e.dim == 0:
        return True
    vecs = []
    for phi in e.theta_basis():
        for j in range(e.dim):
            w = phi.col(j)  # phi(eta_j) in A
            rm = e.right_mult_by(w)
            for i in range(e.dim):
                vecs.append(rm.col(i))
    return Subspace.span(vecs, e.dim).dim == e.dim


def check_cofull_functionals(e: FunctionalModule) -> bool:
    """True iff Theta is spanned by the functionals phi(xi) . tau."""
    space = e.theta_space()
    if space.dim == 0:
        return True
    a = e.coeff
    vecs = []
    for phi in e.theta_basis():
        for j in range(e.dim):
            w = phi.col(j)
            lm = a.left_mult_by(w)
            for tau in e.theta_basis():
                vecs.append((lm * tau).vec())
    return Subspace.span(vecs, a.dim * e.dim) == space


def same_module(e: FunctionalModule, f: FunctionalModule) -> bool:
    """Structural equality (same algebra data, actions and functional list)."""
    return (e.dim == f.dim and e.coeff.structure == f.coeff.structure
            and e.raction == f.raction and e.gaction == f.gaction
            and e.functionals == f.functionals)
