"""Compact operators on functional modules and their materialized algebras.

An elementary operator theta(eta, phi) sends xi to eta . phi(xi).  The span
of all of them over a module basis and a saturated functional basis is
closed under composition (theta_{a,p} theta_{b,q} = theta_{a.p(b), q}), so it
forms an algebra; ``kalgebra`` materializes it with structure constants and
the conjugation G-action so it can serve as a coefficient algebra itself.

``matrix_iso`` realizes the identification of K(A^n) with n x n matrices
over A.  It requires the left regular representation of A to be faithful
(an element with a right unit property guarantees this); otherwise A simply
is not isomorphic to K(A) and the construction reports the defect.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .exactkernel import Matrix, Subspace, inverse, unit_vec
from .galgebra import (Algebra, AlgebraHom, check_hom, find_unit,
                       matrix_algebra_over)
from .fmod import (FunctionalModule, check_cofull_functionals,
                   check_cofull_module, direct_sum, internal_tensor,
                   standard_module)


class CompactOp:
    """Finite sum of elementary operators together with its realized matrix."""

    __slots__ = ("module", "terms", "realized")

    def __init__(self, module: FunctionalModule, terms, realized: Matrix):
        self.module = module
        self.terms = tuple(terms)
        self.realized = realized

    def __repr__(self):
        return "CompactOp(%d terms on %s)" % (len(self.terms), self.module.name)


def theta(e: FunctionalModule, eta: Sequence, phi: Matrix,
          target: Optional[FunctionalModule] = None) -> CompactOp:
    """Elementary operator xi -> eta . phi(xi); eta may live in ``target``."""
    tgt = target or e
    # eta . b_k for each algebra basis element, reused across columns
    racts = [m.apply(eta) for m in tgt.raction]
    cols = []
    for j in range(e.dim):
        acc = [0] * tgt.dim
        for k in range(phi.m):
            wk = phi.rows[k][j]  # coefficient of b_k in phi(e_j)
            if wk:
                v = racts[k]
                for idx, x in enumerate(v):
                    if x:
                        acc[idx] += wk * x
        cols.append(acc)
    realized = Matrix.from_cols(cols, m=tgt.dim)
    return CompactOp(e, [(tuple(eta), phi)], realized)


def theta_realized(e: FunctionalModule, eta: Sequence, phi: Matrix,
                   target: Optional[FunctionalModule] = None) -> Matrix:
    return theta(e, eta, phi, target).realized


class CompactAlgebra:
    """K(E) with a chosen basis of elementary operators."""

    __slots__ = ("module", "algebra", "basis_ops", "provenance", "space",
                 "_solver")

    def __init__(self, module, algebra, basis_ops, provenance, space):
        self.module = module
        self.algebra = algebra
        self.basis_ops = tuple(basis_ops)
        self.provenance = tuple(provenance)
        self.space = space
        self._solver = None

    @property
    def dim(self):
        return self.algebra.dim

    def express(self, op: Matrix):
        """Coordinates of a realized operator in the chosen basis, or None."""
        if not self.basis_ops:
            return () if op.is_zero() else None
        if self._solver is None:
            from .exactkernel import SpanSolver
            self._solver = SpanSolver([m.vec() for m in self.basis_ops],
                                      self.module.dim * self.module.dim)
        return self._solver.coords(op.vec())

    def realize(self, coords: Sequence) -> Matrix:
        from .exactkernel import mat_lincomb
        return mat_lincomb(self.basis_ops, coords, self.module.dim,
                           self.module.dim)

    def __repr__(self):
        return "CompactAlgebra(K(%s), dim %d)" % (self.module.name, self.dim)


def kalgebra(e: FunctionalModule, check_composition: Optional[bool] = None,
             name: Optional[str] = None) -> CompactAlgebra:
    """Materialize K(E) on the span of theta(e_i, phi_t).

    Structure constants come from the composition rule
    theta_{a,p} theta_{b,q} = theta_{a.p(b),q}: after expressing every
    generating operator in the chosen basis once, each product is a plain
    linear combination, so no per-pair elimination is needed.
    ``check_composition`` additionally re-verifies the rule by honest matrix
    products on all basis pairs; by default it runs when the basis is small.
    """
    from .exactkernel import SpanSolver
    tb = e.theta_basis()
    amb = e.dim * e.dim
    basis_ops = []
    prov = []
    rows: list = []
    pivots: list = []

    def try_add(vecv):
        r = list(vecv)
        for ex, p in zip(rows, pivots):
            c = r[p]
            if c:
                for j in range(amb):
                    if ex[j]:
                        r[j] -= c * ex[j]
        piv = next((j for j in range(amb) if r[j]), None)
        if piv is None:
            return False
        from fractions import Fraction
        from .exactkernel import nq
        inv = Fraction(1, 1) / r[piv]
        r = [nq(x * inv) if x else 0 for x in r]
        for ex, p in zip(rows, pivots):
            c = ex[piv]
            if c:
                for j in range(amb):
                    if r[j]:
                        ex[j] = nq(ex[j] - c * r[j])
        rows.append(r)
        pivots.append(piv)
        return True

    realized_family = {}
    for i in range(e.dim):
        eta = unit_vec(e.dim, i)
        for t, phi in enumerate(tb):
            op = theta_realized(e, eta, phi)
            realized_family[(i, t)] = op
            if not op.is_zero() and try_add(op.vec()):
                basis_ops.append(op)
                prov.append((i, t))

    space = Subspace.span([m.vec() for m in basis_ops], amb)
    d = len(basis_ops)
    solver = SpanSolver([m.vec() for m in basis_ops], amb) if basis_ops else None

    # coordinates of every generating operator in the chosen basis
    fam_coords = {}
    for key, op in realized_family.items():
        if op.is_zero():
            fam_coords[key] = (0,) * d
            continue
        coords = solver.coords(op.vec()) if solver else None
        if coords is None:
            raise AssertionError("generating operator escapes the basis span")
        fam_coords[key] = coords

    if check_composition is None:
        check_composition = d <= 40
    if check_composition:
        for (i, t) in prov:
            phi_t = tb[t]
            for (j, u) in prov:
                w = phi_t.col(j)
                eta2 = e.right_mult_by(w).apply(unit_vec(e.dim, i))
                lhs = realized_family[(i, t)] * realized_family[(j, u)]
                rhs = theta_realized(e, eta2, tb[u])
                assert lhs == rhs, "composition rule fails; module data corrupt"

    def combo_coords(w_vec, u):
        acc = [0] * d
        for i2, c in enumerate(w_vec):
            if c:
                base = fam_coords[(i2, u)]
                for idx, x in enumerate(base):
                    if x:
                        acc[idx] += c * x
        from .exactkernel import nq
        return [nq(x) if not isinstance(x, int) else x for x in acc]

    structure = []
    for (i, t) in prov:
        row = []
        phi_t = tb[t]
        for (j, u) in prov:
            w = phi_t.col(j)
            eta2 = e.right_mult_by(w).apply(unit_vec(e.dim, i))
            row.append(combo_coords(eta2, u))
        structure.append(row)

    # theta-basis coordinates for the conjugation action g(phi)
    theta_solver = SpanSolver([phi.vec() for phi in tb], e.coeff.dim * e.dim) \
        if tb else None
    action = []
    for g in range(e.group.order):
        sg = e.gaction[g]
        sginv = e.gaction[e.group.inv(g)]
        ag = e.coeff.action[g]
        gphi_coords = []
        for phi in tb:
            gphi = ag * phi * sginv
            sigma = theta_solver.coords(gphi.vec())
            if sigma is None:
                raise ValueError("compact operators are not G-invariant")
            gphi_coords.append(sigma)
        cols = []
        for (i, t) in prov:
            v = sg.col(i)
            acc = [0] * d
            for u, su in enumerate(gphi_coords[t]):
                if su:
                    part = combo_coords(v, u)
                    for idx, x in enumerate(part):
                        if x:
                            acc[idx] += su * x
            from .exactkernel import nq
            cols.append([nq(x) if not isinstance(x, int) else x for x in acc])
        action.append(Matrix.from_cols(cols, m=d) if d else Matrix([], n=0))

    alg = Algebra(d, structure if d else [], e.group, action,
                  name=name or ("K(%s)" % e.name))
    return CompactAlgebra(e, alg, basis_ops, prov, space)


def corner_embedding(e: FunctionalModule):
    """The homomorphism a -> (xi + b -> 0 + a b) into K(E + A).

    Returns (hom, compact_algebra, sum_module).  Requires the products of A
    to span enough of A for the corner operators to be compact (quadratik).
    """
    a = e.coeff
    astd = standard_module(a, 1)
    eb = direct_sum([e, astd], name="%s(+)%s" % (e.name, a.name))
    k = kalgebra(eb)
    cols = []
    for i in range(a.dim):
        op = Matrix.block_diag([Matrix.zeros(e.dim, e.dim), a.left_mult(i)])
        coords = k.express(op)
        if coords is None:
            raise ValueError("corner operator of basis element %d is not "
                             "compact (algebra not quadratik?)" % i)
        cols.append(coords)
    hom = AlgebraHom(a, k.algebra, Matrix.from_cols(cols, m=k.dim), name="e")
    errs = check_hom(hom)
    if errs:
        raise AssertionError("corner embedding failed verification: %s" % errs)
    return hom, k, eb


@dataclass
class MatrixIso:
    """Invertible identification of a compact algebra with a matrix algebra."""
    kalg: CompactAlgebra
    matrix_side: Algebra
    forward: AlgebraHom    # K -> M_n(A)
    backward: AlgebraHom   # M_n(A) -> K


def _iso_from_realized(k: CompactAlgebra, abstract: Algebra, rho: Sequence[Matrix],
                       check_mult_pairs: bool = True) -> MatrixIso:
    """Build the iso between K and an abstract algebra realized by ``rho``."""
    d = abstract.dim
    if d != k.dim:
        raise ValueError("dimension mismatch: K has dim %d, abstract algebra %d"
                         % (k.dim, d))
    rho_vecs = [m.vec() for m in rho]
    if Subspace.span(rho_vecs, len(rho_vecs[0]) if rho_vecs else 0).dim != d:
        raise ValueError("realization is not faithful (left regular "
                         "representation fails to separate)")
    if check_mult_pairs:
        from .exactkernel import mat_lincomb
        for x in range(d):
            for y in range(d):
                prod = abstract.mult(unit_vec(d, x), unit_vec(d, y))
                img = mat_lincomb(rho, prod, rho[0].m, rho[0].n)
                assert rho[x] * rho[y] == img, \
                    "realization not multiplicative at (%d,%d)" % (x, y)
    from .exactkernel import SpanSolver
    rho_solver = SpanSolver(rho_vecs, len(rho_vecs[0]) if rho_vecs else 0)
    fwd_cols = []
    for op in k.basis_ops:
        coords = rho_solver.coords(op.vec())
        if coords is None:
            raise ValueError("compact operator outside the realized matrix "
                             "algebra")
        fwd_cols.append(coords)
    forward = AlgebraHom(k.algebra, abstract,
                         Matrix.from_cols(fwd_cols, m=d) if d else Matrix([], n=0),
                         name="miso")
    back = inverse(forward.matrix) if d else Matrix([], n=0)
    if back is None:
        raise ValueError("identification is not bijective")
    backward = AlgebraHom(abstract, k.algebra, back, name="miso_inv")
    for g in range(abstract.group.order):
        if forward.matrix * k.algebra.action[g] != abstract.action[g] * forward.matrix:
            raise AssertionError("identification is not equivariant at g=%d" % g)
    return MatrixIso(k, abstract, forward, backward)


def matrix_iso(e: FunctionalModule, k: Optional[CompactAlgebra] = None) -> MatrixIso:
    """Identify K(A^n) with M_n(A), transporting the conjugation action."""
    if e.standard is None:
        raise ValueError("matrix_iso needs a standard module A^n")
    a = e.coeff
    n = e.standard.n
    ad = a.dim
    if k is None:
        k = kalgebra(e)
    # realized matrix units: rho(E_ij (x) b_t) has L_{b_t} in block (i, j)
    rho = []
    for i in range(n):
        for j in range(n):
            for t in range(ad):
                block = Matrix.zeros(e.dim, e.dim)
                lt = a.left_mult(t)
                rows = [list(r) for r in block.rows]
                for r in range(ad):
                    for c in range(ad):
                        v = lt.rows[r][c]
                        if v:
                            rows[i * ad + r][j * ad + c] = v
                rho.append(Matrix(rows, n=e.dim))
    # transported action on the abstract matrix algebra
    from .exactkernel import SpanSolver
    rho_vecs = [m.vec() for m in rho]
    rho_solver = SpanSolver(rho_vecs, len(rho_vecs[0]) if rho_vecs else 0)
    action = []
    for g in range(e.group.order):
        sg, sginv = e.gaction[g], e.gaction[e.group.inv(g)]
        cols = []
        for m in rho:
            img = sg * m * sginv
            coords = rho_solver.coords(img.vec())
            if coords is None:
                raise ValueError("conjugation action does not preserve the "
                                 "matrix algebra")
            cols.append(coords)
        action.append(Matrix.from_cols(cols, m=n * n * ad))
    mn = matrix_algebra_over(a, n, action=action)
    return _iso_from_realized(k, mn, rho)


def block_matrix_iso(e: FunctionalModule, m: int, sum_module: FunctionalModule,
                     ke: CompactAlgebra, ksum: CompactAlgebra) -> MatrixIso:
    """Identify K(E^m) with M_m(K(E)) for ``sum_module`` = m copies of E."""
    d = e.dim
    rho = []
    for i in range(m):
        for j in range(m):
            for t in range(ke.dim):
                block = [[0] * sum_module.dim for _ in range(sum_module.dim)]
                op = ke.basis_ops[t]
                for r in range(d):
                    for c in range(d):
                        v = op.rows[r][c]
                        if v:
                            block[i * d + r][j * d + c] = v
                rho.append(Matrix(block, n=sum_module.dim))
    # transported action
    from .exactkernel import SpanSolver
    rho_vecs = [x.vec() for x in rho]
    rho_solver = SpanSolver(rho_vecs, len(rho_vecs[0]) if rho_vecs else 0)
    action = []
    for g in range(e.group.order):
        sg = sum_module.gaction[g]
        sginv = sum_module.gaction[sum_module.group.inv(g)]
        cols = []
        for x in rho:
            img = sg * x * sginv
            coords = rho_solver.coords(img.vec())
            if coords is None:
                raise ValueError("conjugation does not preserve the block algebra")
            cols.append(coords)
        action.append(Matrix.from_cols(cols, m=m * m * ke.dim))
    mm = matrix_algebra_over(ke.algebra, m, action=action,
                             name="M%d(%s)" % (m, ke.algebra.name))
    return _iso_from_realized(ksum, mm, rho, check_mult_pairs=(mm.dim <= 64))


def approx_unit_transfer_check(e: FunctionalModule, pi: AlgebraHom,
                               sides=("left", "right", "two")) -> dict:
    """Evaluate unit-transfer hypotheses and conclusions per side.

    For each requested side, records whether K(E) has a unit of that side and
    whether the side conditions hold (module cofullness for the left case,
    functional-space cofullness plus a left unit in A for the right case,
    all of them for the two-sided case), then computes K(E (x)_pi B) and
    reports whether the matching unit exists there.
    """
    ke = kalgebra(e)
    it, _ = internal_tensor(e, pi)
    kb = kalgebra(it)
    cof_e = check_cofull_module(e)
    cof_th = check_cofull_functionals(e)
    a_left = find_unit(e.coeff, "left") is not None
    report = {"module": e.name, "hom": pi.name, "sides": {}}
    for side in sides:
        unit_src = find_unit(ke.algebra, side)
        extra = {}
        if side == "left":
            extra["module_cofull"] = cof_e
        elif side == "right":
            extra["theta_cofull"] = cof_th
            extra["coeff_left_unit"] = a_left
        else:
            extra["module_cofull"] = cof_e
            extra["theta_cofull"] = cof_th
            extra["coeff_left_unit"] = a_left
        hyp_met = unit_src is not None and all(extra.values())
        unit_dst = find_unit(kb.algebra, side)
        report["sides"][side] = {
            "unit_in_source": unit_src is not None,
            "side_conditions": extra,
            "hypotheses_met": hyp_met,
            "unit_in_target": unit_dst is not None,
            "consistent": (not hyp_met) or unit_dst is not None,
        }
    return report
