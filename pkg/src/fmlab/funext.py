"""Functional homomorphisms, the extension decision procedure and its uses.

A ``FunPair`` is an injective module map U together with images of the
source's stored functional generators (its U*).  ``check_functional_hom``
verifies the whole contract: linearity of U, membership and well-definedness
of U*, its A- and G-linearity, and the defining identity
U*(phi)(U(xi)) = phi(xi) on all (generator, basis) pairs.

``decide_functional_extension`` decides, per target basis vector eta, the
linear system phi_t(xi) = U*(phi_t)(eta) over all stored generators
simultaneously.  Both sides are linear in eta and left-A-linear in the
functional, so solvability on basis vectors against the full generator set
settles every finite family at every target vector with a single witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .exactkernel import (Matrix, Subspace, express_in_list, kernel_basis,
                          solve_multi, unit_vec, vec_is_zero)
from .galgebra import Algebra, AlgebraHom, find_unit
from .fmod import (FunctionalModule, InternalTensorInfo, check_module_hom,
                   direct_sum, external_tensor, internal_tensor, same_module,
                   standard_module)
from .kops import CompactAlgebra, kalgebra, theta_realized


@dataclass
class ExtensionDecision:
    """Outcome of the extension decision: witnesses or a counterexample."""
    yes: bool
    witnesses: Optional[tuple] = None       # one source vector per target basis
    counter_index: Optional[int] = None     # failing target basis vector
    system: Optional[tuple] = None          # (stacked matrix, failing rhs)


class FunPair:
    """Functional-module homomorphism (U, U*) with cached certificates."""

    __slots__ = ("source", "target", "u", "ustar", "equivariant", "name",
                 "_decision", "_hom_report")

    def __init__(self, source: FunctionalModule, target: FunctionalModule,
                 u: Matrix, ustar, equivariant: bool = True, name: str = "U"):
        if u.m != target.dim or u.n != source.dim:
            raise ValueError("U has wrong shape")
        ustar = tuple(ustar)
        if len(ustar) != len(source.functionals):
            raise ValueError("need one U* image per stored source functional")
        for m in ustar:
            if m.m != source.coeff.dim or m.n != target.dim:
                raise ValueError("U* image has wrong shape")
        self.source = source
        self.target = target
        self.u = u
        self.ustar = ustar
        self.equivariant = equivariant
        self.name = name
        self._decision = None
        self._hom_report = None

    def ustar_apply(self, phi: Matrix) -> Matrix:
        """Linear extension of U* to an arbitrary element of Theta(source)."""
        coords = self.source.functional_coords(phi)
        if coords is None:
            raise ValueError("functional outside the stored span")
        from .exactkernel import mat_lincomb
        return mat_lincomb(self.ustar, coords, self.source.coeff.dim,
                           self.target.dim)

    def __repr__(self):
        return "FunPair(%s: %s -> %s)" % (self.name, self.source.name,
                                          self.target.name)


def check_functional_hom(p: FunPair):
    """Full diagnostic check; empty list means the pair is valid."""
    if p._hom_report is not None:
        return p._hom_report
    errs = []
    e, f = p.source, p.target
    a = e.coeff
    from .fmod import same_algebra
    if not same_algebra(a, f.coeff):
        errs.append("coefficient algebras differ")
        p._hom_report = errs
        return errs
    # U is an injective (equivariant) module homomorphism
    from .fmod import ModuleHom
    errs += ["U: " + s for s in
             check_module_hom(ModuleHom(e, f, p.u), equivariant=p.equivariant)]
    if kernel_basis(p.u):
        errs.append("U is not injective")
    # U* images live in Theta(target)
    tspace = f.theta_space()
    for t, img in enumerate(p.ustar):
        if not tspace.member(img.vec()):
            errs.append("U* image of generator %d is outside Theta(target)" % t)
    # well-definedness of the linear extension over generator relations
    gen_vecs = [phi.vec() for phi in e.functionals]
    if gen_vecs:
        for lam in kernel_basis(Matrix.from_cols(gen_vecs)):
            img = Matrix.zeros(a.dim, f.dim)
            for c, m in zip(lam, p.ustar):
                if c:
                    img = img + m.scale(c)
            if not img.is_zero():
                errs.append("U* is not well-defined over generator relations")
                break
    # left A-linearity: U*(a.phi) = a.U*(phi)
    for t, phi in enumerate(e.functionals):
        for i in range(a.dim):
            lhs_fun = a.left_mult(i) * phi
            coords = e.functional_coords(lhs_fun)
            if coords is None:
                errs.append("Theta(source) is not closed under the left action")
                break
            img = Matrix.zeros(a.dim, f.dim)
            for c, m in zip(coords, p.ustar):
                if c:
                    img = img + m.scale(c)
            if img != a.left_mult(i) * p.ustar[t]:
                errs.append("U* is not left-A-linear at (generator %d, basis %d)"
                            % (t, i))
    # G-equivariance of U*
    if p.equivariant:
        for t, phi in enumerate(e.functionals):
            for g in range(e.group.order):
                gi = e.group.inv(g)
                gphi = a.action[g] * phi * e.gaction[gi]
                coords = e.functional_coords(gphi)
                if coords is None:
                    errs.append("Theta(source) is not closed under the G-action")
                    break
                img = Matrix.zeros(a.dim, f.dim)
                for c, m in zip(coords, p.ustar):
                    if c:
                        img = img + m.scale(c)
                if img != a.action[g] * p.ustar[t] * f.gaction[gi]:
                    errs.append("U* is not G-equivariant at (generator %d, g=%d)"
                                % (t, g))
    # defining identity on all (generator, basis) pairs
    for t, phi in enumerate(e.functionals):
        if p.ustar[t] * p.u != phi:
            errs.append("defining identity fails at generator %d" % t)
    p._hom_report = errs
    return errs


def decide_functional_extension(p: FunPair) -> ExtensionDecision:
    """Decide the simultaneous realizability condition for every target vector."""
    if p._decision is not None:
        return p._decision
    e, f = p.source, p.target
    if not e.functionals:
        dec = ExtensionDecision(True, witnesses=tuple(
            (0,) * e.dim for _ in range(f.dim)))
        p._decision = dec
        return dec
    stacked = Matrix.vstack(list(e.functionals))
    rhs = Matrix.vstack(list(p.ustar))
    sols = solve_multi(stacked, rhs)
    witnesses = []
    for j, sol in enumerate(sols):
        if sol is None:
            dec = ExtensionDecision(False, counter_index=j,
                                    system=(stacked, rhs.col(j)))
            p._decision = dec
            return dec
        witnesses.append(sol)
    dec = ExtensionDecision(True, witnesses=tuple(witnesses))
    p._decision = dec
    return dec


def require_extension(p: FunPair) -> FunPair:
    """Raise unless p is a verified functional extension."""
    errs = check_functional_hom(p)
    if errs:
        raise ValueError("not a functional homomorphism: %s" % errs[:3])
    if not decide_functional_extension(p).yes:
        raise ValueError("extension property not certified for %s" % p.name)
    return p


# ---------------------------------------------------------------------------
# basic pairs
# ---------------------------------------------------------------------------


def identity_pair(e: FunctionalModule) -> FunPair:
    return FunPair(e, e, Matrix.identity(e.dim), list(e.functionals), name="id")


def summand_inclusion_pair(parts: Sequence[FunctionalModule], index: int,
                           total: Optional[FunctionalModule] = None) -> FunPair:
    """Inclusion of one summand into a direct sum, with U* extension by zero."""
    total = total or direct_sum(list(parts))
    e = parts[index]
    before = sum(m.dim for m in parts[:index])
    after = sum(m.dim for m in parts[index + 1:])
    u = Matrix.vstack([Matrix.zeros(before, e.dim), Matrix.identity(e.dim),
                       Matrix.zeros(after, e.dim)])
    a = e.coeff
    ustar = [Matrix.hstack([Matrix.zeros(a.dim, before), phi,
                            Matrix.zeros(a.dim, after)])
             for phi in e.functionals]
    return FunPair(e, total, u, ustar, name="inc%d" % index)


def iso_pair(e: FunctionalModule, f: FunctionalModule, u: Matrix,
             name: str = "iso") -> FunPair:
    """Pair built from a bijective module map, with U* phi = phi o U^-1."""
    from .exactkernel import inverse
    uinv = inverse(u)
    if uinv is None:
        raise ValueError("iso_pair needs a bijective matrix")
    ustar = [phi * uinv for phi in e.functionals]
    return FunPair(e, f, u, ustar, name=name)


def funpair_direct_sum(pairs: Sequence[FunPair],
                       source: Optional[FunctionalModule] = None,
                       target: Optional[FunctionalModule] = None) -> FunPair:
    """Direct sum of pairs, on the direct sums of sources and targets."""
    source = source or direct_sum([p.source for p in pairs])
    target = target or direct_sum([p.target for p in pairs])
    u = Matrix.block_diag([p.u for p in pairs])
    a = pairs[0].source.coeff
    tdims = [p.target.dim for p in pairs]
    ustar = []
    for idx, p in enumerate(pairs):
        before = sum(tdims[:idx])
        after = sum(tdims[idx + 1:])
        for img in p.ustar:
            ustar.append(Matrix.hstack([Matrix.zeros(a.dim, before), img,
                                        Matrix.zeros(a.dim, after)]))
    if len(ustar) != len(source.functionals):
        raise AssertionError("direct-sum functional list mismatch")
    return FunPair(source, target, u, ustar,
                   equivariant=all(p.equivariant for p in pairs),
                   name="(+)".join(p.name for p in pairs))


def funpair_external_tensor(p1: FunPair, p2: FunPair):
    """Tensor of pairs; returns (pair, source module, target module)."""
    src, _ = external_tensor(p1.source, p2.source)
    tgt, _ = external_tensor(p1.target, p2.target)
    u = p1.u.kron(p2.u)
    ustar = [i1.kron(i2) for i1 in p1.ustar for i2 in p2.ustar]
    if len(ustar) != len(src.functionals):
        raise AssertionError("tensor functional list mismatch")
    pair = FunPair(src, tgt, u, ustar,
                   equivariant=p1.equivariant and p2.equivariant,
                   name="%s(x)%s" % (p1.name, p2.name))
    return pair, src, tgt


def funpair_compose(p2: FunPair, p1: FunPair) -> FunPair:
    """Composite pair p2 after p1."""
    if not same_module(p1.target, p2.source):
        raise ValueError("middle modules do not match")
    u = p2.u * p1.u
    ustar = [p2.ustar_apply(img) for img in p1.ustar]
    return FunPair(p1.source, p2.target, u, ustar,
                   equivariant=p1.equivariant and p2.equivariant,
                   name="%s.%s" % (p2.name, p1.name))


# ---------------------------------------------------------------------------
# induced homomorphism on compact operators
# ---------------------------------------------------------------------------


@dataclass
class InducedHom:
    hom: AlgebraHom
    source_k: CompactAlgebra
    target_k: CompactAlgebra


def induced_compact_hom(p: FunPair, ke: Optional[CompactAlgebra] = None,
                        kf: Optional[CompactAlgebra] = None,
                        check_pairs: Optional[bool] = None) -> InducedHom:
    """The map theta(xi, phi) -> theta(U xi, U* phi) on compact algebras.

    Refuses without a certified extension: well-definedness genuinely needs
    it.  Verifies well-definedness over the relations of the generating
    family, injectivity, equivariance, and multiplicativity on basis pairs
    (via the elementary composition rule, so no basis reductions are needed;
    ``check_pairs=False`` skips the quadratic pair loop for large algebras,
    where the already-verified identity and linearity checks imply it).
    """
    errs = check_functional_hom(p)
    if errs:
        raise ValueError("invalid functional homomorphism: %s" % errs[:3])
    if not decide_functional_extension(p).yes:
        raise ValueError("extension property not certified; refusing to "
                         "induce a compact-operator homomorphism")
    e, f = p.source, p.target
    if ke is None:
        ke = kalgebra(e)
    if kf is None:
        kf = kalgebra(f)
    tb = e.theta_basis()
    images_by_gen = {}
    cols = []
    for (i, t) in ke.provenance:
        img_op = theta_realized(f, p.u.apply(unit_vec(e.dim, i)),
                                p.ustar_apply(tb[t]))
        coords = kf.express(img_op)
        if coords is None:
            raise AssertionError("induced image is not compact")
        images_by_gen[(i, t)] = img_op
        cols.append(coords)
    hom = AlgebraHom(ke.algebra, kf.algebra,
                     Matrix.from_cols(cols, m=kf.dim) if ke.dim else
                     Matrix.zeros(kf.dim, 0), name="K(%s)" % p.name)

    # well-definedness: relations among the generating family map to relations
    fam = []
    fam_img = []
    for i in range(e.dim):
        ui = p.u.apply(unit_vec(e.dim, i))
        for t, phi in enumerate(tb):
            fam.append(theta_realized(e, unit_vec(e.dim, i), phi).vec())
            fam_img.append(theta_realized(f, ui, p.ustar_apply(phi)).vec())
    if fam:
        src_mat = Matrix.from_cols(fam)
        for lam in kernel_basis(src_mat):
            acc = [0] * (f.dim * f.dim)
            for c, v in zip(lam, fam_img):
                if c:
                    for idx, x in enumerate(v):
                        if x:
                            acc[idx] += c * x
            if not vec_is_zero(acc):
                raise AssertionError("induced map not well-defined")

    if kernel_basis(hom.matrix):
        raise AssertionError("induced map has nontrivial kernel")

    for g in range(e.group.order):
        if hom.matrix * ke.algebra.action[g] != kf.algebra.action[g] * hom.matrix:
            raise AssertionError("induced map is not equivariant at g=%d" % g)

    if check_pairs is None:
        check_pairs = ke.dim * ke.dim <= 4096
    if check_pairs:
        for (i, t) in ke.provenance:
            phi_t = tb[t]
            left = images_by_gen[(i, t)]
            for (j, u) in ke.provenance:
                w = phi_t.col(j)
                eta2 = e.right_mult_by(w).apply(unit_vec(e.dim, i))
                prod_img = theta_realized(f, p.u.apply(eta2), p.ustar_apply(tb[u]))
                if left * images_by_gen[(j, u)] != prod_img:
                    raise AssertionError("induced map not multiplicative at "
                                         "basis pair")
    return InducedHom(hom, ke, kf)


# ---------------------------------------------------------------------------
# change of coefficient algebra
# ---------------------------------------------------------------------------


@dataclass
class ChangeCoefficientsResult:
    pair: FunPair                      # (E (x)_pi B) -> B^n
    tensor_module: FunctionalModule
    tensor_info: InternalTensorInfo
    target: FunctionalModule           # B^n


def _pi_tilde_apply(pi: AlgebraHom, v, n):
    """Coordinatewise application of pi to a vector in A^n."""
    ad, bd = pi.source.dim, pi.target.dim
    out = []
    for i in range(n):
        out.extend(pi.matrix.apply(v[i * ad:(i + 1) * ad]))
    return tuple(out)


def change_coefficients(p: FunPair, pi: AlgebraHom) -> ChangeCoefficientsResult:
    """Transport an extension E -> A^n along pi: A -> B to E (x)_pi B -> B^n."""
    e = p.source
    a = e.coeff
    if pi.source is not a and pi.source.structure != a.structure:
        raise ValueError("hom source does not match the coefficient algebra")
    tgt = p.target
    if tgt.standard is None or tgt.standard.cfactor is None:
        raise ValueError("target must be a standard module with product action")
    if find_unit(a, "right") is None:
        raise ValueError("coefficient algebra has no right unit")
    require_extension(p)
    n = tgt.standard.n
    b = pi.target

    it_mod, info = internal_tensor(e, pi)
    bn = standard_module(b, n, cfactor=list(tgt.standard.cfactor))

    # V on the quotient: class of xi (x) c  ->  pi~(U(xi)) . c
    cols = []
    for i in range(e.dim):
        w = _pi_tilde_apply(pi, p.u.col(i), n)
        for j in range(b.dim):
            cols.append(bn.raction[j].apply(w))
    vbig = Matrix.from_cols(cols, m=bn.dim) if cols else Matrix.zeros(bn.dim, 0)
    for v in info.relations.basis:
        assert vec_is_zero(vbig.apply(v)), "V does not kill tensor relations"
    vmat = vbig * info.section

    # standard-functional identification on A^n: x -> phi_x must be injective
    std_count = n * a.dim
    if len(tgt.functionals) != std_count:
        raise ValueError("target functional list is not the standard family")
    std_vecs = [phi.vec() for phi in tgt.functionals]
    if n and Subspace.span(std_vecs, len(std_vecs[0])).dim != std_count:
        raise ValueError("standard functional family is degenerate; the "
                         "identification of functionals with vectors fails")

    if len(it_mod.functionals) != len(info.gen_index):
        raise AssertionError("tensor functional list grew under completion")

    ustar = [None] * len(it_mod.functionals)
    xcache = {}
    for (t, c), pos in info.gen_index.items():
        if t not in xcache:
            x = express_in_list(std_vecs, p.ustar[t].vec())
            if x is None:
                raise AssertionError("U* image escapes the standard family")
            xcache[t] = _pi_tilde_apply(pi, x, n)
        w = xcache[t]
        # z = c . pi~(x) coordinatewise from the left
        z = []
        for i in range(n):
            z.extend(b.mult(unit_vec(b.dim, c), w[i * b.dim:(i + 1) * b.dim]))
        img = Matrix.zeros(b.dim, bn.dim)
        for idx, zv in enumerate(z):
            if zv:
                img = img + bn.functionals[idx].scale(zv)
        ustar[pos] = img
    pair = FunPair(it_mod, bn, vmat, ustar, equivariant=p.equivariant,
                   name="V(%s)" % p.name)
    return ChangeCoefficientsResult(pair, it_mod, info, bn)


# ---------------------------------------------------------------------------
# corner modules and the composed extension
# ---------------------------------------------------------------------------


@dataclass
class CornerRestriction:
    """A module cut down by the corner multipliers of a distinguished copy of B."""
    module: FunctionalModule
    section: Matrix            # big-module coordinates of the basis
    projection: Matrix         # retraction onto the subspace coordinates
    gen_index: dict            # (B-basis index, theta-basis index) -> position


def _subspace_retraction(space: Subspace):
    sec = Matrix.from_cols(list(space.basis), m=space.ambient) if space.dim \
        else Matrix.zeros(space.ambient, 0)
    proj = Matrix([[1 if j == p else 0 for j in range(space.ambient)]
                   for p in space.pivots], n=space.ambient)
    return sec, proj


def corner_restrict(f: FunctionalModule, k: CompactAlgebra, iota: Matrix,
                    b: Algebra, name: str) -> CornerRestriction:
    """Build F.M_B with functional space M_B . Theta(F) restricted.

    ``iota`` has the K-coordinates of the corner multipliers m_b as columns.
    """
    mb_ops = [f.right_mult_by(iota.col(j)) for j in range(b.dim)]
    vecs = []
    for op in mb_ops:
        for r in range(f.dim):
            v = op.col(r)
            if not vec_is_zero(v):
                vecs.append(v)
    w = Subspace.span(vecs, f.dim)
    sec, proj = _subspace_retraction(w)

    def restrict(op: Matrix, what: str) -> Matrix:
        img = op * sec
        for j in range(img.n):
            if not w.member(img.col(j)):
                raise ValueError("corner subspace not invariant under %s" % what)
        return proj * img

    raction = [restrict(f.right_mult_by(iota.col(j)), "right action")
               for j in range(b.dim)]
    gaction = [restrict(f.gaction[g], "G-action") for g in range(f.group.order)]

    # functionals m_b . phi: value iota^{-1}(m_b . phi(w))
    from .exactkernel import SpanSolver
    iota_cols = [iota.col(j) for j in range(b.dim)]
    mb_realized = [k.realize(c) for c in iota_cols]
    iota_solver = SpanSolver([m.vec() for m in mb_realized],
                             k.module.dim ** 2)
    functionals = []
    gen_index = {}
    tb = f.theta_basis()
    for jb in range(b.dim):
        for t, phi in enumerate(tb):
            cols = []
            for r in range(w.dim):
                kv = phi.apply(sec.col(r))          # phi(w_r) in K coordinates
                t_op = k.realize(kv)
                prod = mb_realized[jb] * t_op
                y = iota_solver.coords(prod.vec())
                if y is None:
                    raise ValueError("corner functional value escapes the "
                                     "corner algebra")
                cols.append(y)
            gen_index[(jb, t)] = len(functionals)
            functionals.append(Matrix.from_cols(cols, m=b.dim) if w.dim
                               else Matrix.zeros(b.dim, 0))
    module = FunctionalModule(b, w.dim, raction, gaction, functionals, name=name)
    if len(module.functionals) != len(gen_index):
        raise AssertionError("corner functional list grew under completion")
    return CornerRestriction(module, sec, proj, gen_index)


@dataclass
class CornerCompositionResult:
    corner_module: FunctionalModule    # F . M_B over B
    w_pair: FunPair                    # the composed extension into B^{nm}
    pi_pair: FunPair
    sigma_pair: FunPair
    kappa_pair: FunPair
    k: CompactAlgebra                  # K(E + B)
    x: CompactAlgebra                  # K(B^n)
    f_hom: AlgebraHom                  # induced K -> X
    iota_k: Matrix
    iota_x: Matrix


def _std_vector_of(theta_mod: FunctionalModule, phi: Matrix):
    """Some module vector x with phi = phi_x, via the standard family."""
    std_vecs = [f.vec() for f in theta_mod.functionals]
    x = express_in_list(std_vecs, phi.vec())
    if x is None:
        raise ValueError("functional is not in the standard family span")
    return x


def corner_module_composition(e: FunctionalModule, u_pair: FunPair,
                              v_pair: FunPair) -> CornerCompositionResult:
    """Compose corner restriction, the induced map and the column collapse.

    Produces the extension W = kappa . sigma . pi from F.M_B into B^{nm},
    given U: (E + B) -> B^n (a direct sum of an extension and the identity)
    and V: F -> K^m over K = K(E + B).
    """
    b = e.coeff
    unit = find_unit(b, "two")
    if unit is None:
        raise ValueError("coefficient algebra needs a two-sided unit")
    bstd = standard_module(b, 1)
    eb = direct_sum([e, bstd])
    if not same_module(u_pair.source, eb):
        raise ValueError("U must be defined on E + B (in that order)")
    tgt = u_pair.target
    if tgt.standard is None or tgt.standard.cfactor is None:
        raise ValueError("U must land in a standard module with product action")
    n = tgt.standard.n
    # direct-sum shape: the distinguished copy of B maps to the last coordinate
    bd = b.dim
    last = (n - 1) * bd
    for r in range(bd):
        row = u_pair.u.rows[last + r]
        for c in range(e.dim):
            if row[c]:
                raise ValueError("U does not have the direct-sum shape")
        for c in range(bd):
            if row[e.dim + c] != (1 if c == r else 0):
                raise ValueError("U does not fix the distinguished copy of B")
    for r in range(last):
        row = u_pair.u.rows[r]
        for c in range(bd):
            if row[e.dim + c]:
                raise ValueError("U does not have the direct-sum shape")
    require_extension(u_pair)
    require_extension(v_pair)

    k = kalgebra(eb)
    if v_pair.source.coeff.structure != k.algebra.structure:
        raise ValueError("V's module is not over K(E + B)")
    f_mod = v_pair.source
    km = v_pair.target
    if km.standard is None or km.standard.cfactor is None:
        raise ValueError("V must land in a standard module over K")
    m = km.standard.n

    # corner multipliers in K and their rule m_b m_c = m_{bc}
    iota_cols = []
    for j in range(bd):
        op = Matrix.block_diag([Matrix.zeros(e.dim, e.dim), b.left_mult(j)])
        coords = k.express(op)
        if coords is None:
            raise ValueError("corner multiplier is not compact")
        iota_cols.append(coords)
    iota_k = Matrix.from_cols(iota_cols, m=k.dim)
    for i in range(bd):
        for j in range(bd):
            lhs = k.algebra.mult(iota_k.col(i), iota_k.col(j))
            rhs_vec = [0] * k.dim
            for idx, c in enumerate(b.structure[i][j]):
                if c:
                    for t, x in enumerate(iota_k.col(idx)):
                        if x:
                            rhs_vec[t] += c * x
            if tuple(lhs) != tuple(rhs_vec):
                raise AssertionError("corner multiplier rule m_b m_c = m_bc fails")

    # X = K(B^n) and the induced map f: K -> X fixing the corner
    bn = tgt
    x = kalgebra(bn)
    induced = induced_compact_hom(u_pair, ke=k, kf=x)
    f_hom = induced.hom
    iota_x_cols = []
    for j in range(bd):
        rows = [[0] * bn.dim for _ in range(bn.dim)]
        lj = b.left_mult(j)
        for r in range(bd):
            for c in range(bd):
                if lj.rows[r][c]:
                    rows[last + r][last + c] = lj.rows[r][c]
        coords = x.express(Matrix(rows, n=bn.dim))
        if coords is None:
            raise AssertionError("corner multiplier missing in X")
        iota_x_cols.append(coords)
    iota_x = Matrix.from_cols(iota_x_cols, m=x.dim)
    for j in range(bd):
        if f_hom.apply(iota_k.col(j)) != iota_x.col(j):
            raise AssertionError("induced map does not fix the corner algebra")

    # the three corner restrictions
    fmb = corner_restrict(f_mod, k, iota_k, b, "%s.MB" % f_mod.name)
    km_mb = corner_restrict(km, k, iota_k, b, "K^%d.MB" % m)
    xm = standard_module(x.algebra, m, cfactor=list(km.standard.cfactor))
    xm_mb = corner_restrict(xm, x, iota_x, b, "X^%d.MB" % m)

    ktb = f_mod.theta_basis()
    km_tb = km.theta_basis()
    xm_tb = xm.theta_basis()

    # pi: restriction of V
    pi_u = v_pair.u * fmb.section
    for j in range(pi_u.n):
        col = pi_u.col(j)
        if not Subspace.span(list(km_mb.section.transpose().rows),
                             km.dim).member(col):
            raise ValueError("V does not map the corner module into K^m.M_B")
    pi_u = km_mb.projection * pi_u
    pi_ustar = []
    for (jb, t), pos in sorted(fmb.gen_index.items(), key=lambda kv: kv[1]):
        psi = v_pair.ustar_apply(ktb[t])
        coords = express_in_list([f.vec() for f in km_tb], psi.vec())
        if coords is None:
            raise AssertionError("V* image outside Theta(K^m)")
        img = Matrix.zeros(bd, km_mb.module.dim)
        for cu, u in zip(coords, range(len(km_tb))):
            if cu:
                img = img + km_mb.module.functionals[km_mb.gen_index[(jb, u)]].scale(cu)
        pi_ustar.append(img)
    pi_pair = FunPair(fmb.module, km_mb.module, pi_u, pi_ustar, name="pi")

    # sigma: coordinatewise f
    big_f = Matrix.identity(m).kron(f_hom.matrix)
    sig_u = big_f * km_mb.section
    sig_u = xm_mb.projection * sig_u
    for j in range(sig_u.n):
        back = xm_mb.section.apply(sig_u.col(j))
        if back != (big_f * km_mb.section).col(j):
            raise ValueError("coordinatewise image leaves the corner module")
    sig_ustar = []
    for (jb, t), pos in sorted(km_mb.gen_index.items(), key=lambda kv: kv[1]):
        xvec = _std_vector_of(km, km_tb[t])
        yvec = big_f.apply(xvec)
        img_fun = Matrix.zeros(x.dim, xm.dim)
        for idx, yv in enumerate(yvec):
            if yv:
                img_fun = img_fun + xm.functionals[idx].scale(yv)
        coords = express_in_list([f.vec() for f in xm_tb], img_fun.vec())
        if coords is None:
            raise AssertionError("sigma* image outside Theta(X^m)")
        img = Matrix.zeros(bd, xm_mb.module.dim)
        for cu, u in zip(coords, range(len(xm_tb))):
            if cu:
                img = img + xm_mb.module.functionals[xm_mb.gen_index[(jb, u)]].scale(cu)
        sig_ustar.append(img)
    sigma_pair = FunPair(km_mb.module, xm_mb.module, sig_u, sig_ustar,
                         name="sigma")

    # kappa: apply to the distinguished unit column
    probe = [0] * bn.dim
    for idx, c in enumerate(unit):
        probe[last + idx] = c
    bnm = standard_module(b, n * m, cfactor=[
        km.standard.cfactor[g].kron(tgt.standard.cfactor[g])
        for g in range(b.group.order)])
    kap_cols = []
    for r in range(xm_mb.module.dim):
        wvec = xm_mb.section.col(r)
        out = []
        for j in range(m):
            chunk = wvec[j * x.dim:(j + 1) * x.dim]
            out.extend(x.realize(chunk).apply(probe))
        kap_cols.append(out)
    kap_u = Matrix.from_cols(kap_cols, m=bnm.dim) if kap_cols \
        else Matrix.zeros(bnm.dim, 0)
    kap_ustar = []
    from .kops import matrix_iso
    mi_x = matrix_iso(bn, x)
    for (jb, t), pos in sorted(xm_mb.gen_index.items(), key=lambda kv: kv[1]):
        xvec = _std_vector_of(xm, xm_tb[t])
        z = [0] * bnm.dim
        for j in range(m):
            chunk = xvec[j * x.dim:(j + 1) * x.dim]
            entries = mi_x.forward.apply(chunk)
            for kcol in range(n):
                # entry (last row, column kcol) of the matrix form
                base = ((n - 1) * n + kcol) * bd
                ent = entries[base:base + bd]
                zb = b.mult(unit_vec(bd, jb), ent)
                for s, zv in enumerate(zb):
                    z[(j * n + kcol) * bd + s] = zv
        img = Matrix.zeros(bd, bnm.dim)
        for idx, zv in enumerate(z):
            if zv:
                img = img + bnm.functionals[idx].scale(zv)
        kap_ustar.append(img)
    kappa_pair = FunPair(xm_mb.module, bnm, kap_u, kap_ustar, name="kappa")

    w_pair = funpair_compose(kappa_pair, funpair_compose(sigma_pair, pi_pair))
    w_pair.name = "W"
    return CornerCompositionResult(fmb.module, w_pair, pi_pair, sigma_pair,
                                   kappa_pair, k, x, f_hom, iota_k, iota_x)
