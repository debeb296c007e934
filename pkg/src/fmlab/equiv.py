"""Finite-group constructions: averaging, plain-module extensions and the
non-canonical corner witness.

The averaging construction embeds a module E into |G| twisted copies of
itself: the shift action permutes the copies, the right action twists by
alpha_{g^-1}, the embedding stacks S_{g^-1}(xi) and its functional side
averages phi over the orbit with weight 1/|G|.  For plain modules A^n the
copies can be untwisted coordinatewise, giving an extension into the
standard module A^{n|G|} together with an isomorphism under which the
composite is exactly the inclusion of the first summand.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exactkernel import Matrix, inverse, nq, rank, unit_vec
from .galgebra import Algebra, AlgebraHom, check_hom, matrix_algebra_over
from .fmod import (FunctionalModule, direct_sum, same_module, standard_module,
                   validate_module)
from .funext import (FunPair, funpair_direct_sum, identity_pair,
                     induced_compact_hom, iso_pair, require_extension)
from .kops import block_matrix_iso, kalgebra, matrix_iso
from .witness import (Prop22Certificate, RotationPath, rotation_path,
                      verify_prop22)


@dataclass
class ShiftedSum:
    """|G| copies of a base module with the shift action and twisted data."""
    base: FunctionalModule
    module: FunctionalModule
    twisted: bool


def _shift_perm(group, h: int) -> Matrix:
    """Permutation matrix of the shift (xi_g) -> (xi_{h^-1 g}) on copies."""
    m = group.order
    rows = []
    for g in range(m):
        src = group.mul(group.inv(h), g)
        rows.append(unit_vec(m, src))
    return Matrix(rows, n=m)


def twisted_sum(e: FunctionalModule) -> ShiftedSum:
    """The |G|-fold sum with twisted right action and shifted G-action."""
    a = e.coeff
    grp = e.group
    m = grp.order
    d = e.dim
    raction = []
    for j in range(a.dim):
        blocks = [e.right_mult_by(a.action[grp.inv(g)].col(j))
                  for g in range(m)]
        raction.append(Matrix.block_diag(blocks))
    gaction = [
        _shift_perm(grp, h).kron(Matrix.identity(d)) for h in range(m)]
    functionals = []
    for g in range(m):
        ag = a.action[g]
        for phi in e.functionals:
            blocks = [ag * phi if g2 == g else Matrix.zeros(a.dim, d)
                      for g2 in range(m)]
            functionals.append(Matrix.hstack(blocks))
    mod = FunctionalModule(a, m * d, raction, gaction, functionals,
                           name="(+)_G %s~" % e.name)
    return ShiftedSum(e, mod, True)


@dataclass
class AverageExtensionResult:
    pair: FunPair
    target: ShiftedSum


def average_extension(e: FunctionalModule) -> AverageExtensionResult:
    """Embed E equivariantly into the twisted |G|-fold sum of itself."""
    grp = e.group
    m = grp.order
    ts = twisted_sum(e)
    u = Matrix.vstack([e.gaction[grp.inv(g)] for g in range(m)])
    w = Fraction(1, m)
    ustar = []
    for phi in e.functionals:
        ustar.append(Matrix.hstack([(phi * e.gaction[g]).scale(w)
                                    for g in range(m)]))
    pair = FunPair(e, ts.module, u, ustar, name="avg")
    return AverageExtensionResult(pair, ts)


def average_witness(e: FunctionalModule, g0: int, r: int):
    """The closed-form witness (1/|G|) S_{g0}(eta) for a basis target vector."""
    w = Fraction(1, e.group.order)
    return tuple(nq(w * x) for x in e.gaction[g0].col(r))


def amplify_nonequivariant(gamma: FunPair) -> FunPair:
    """Turn a non-equivariant extension E -> F into an equivariant one
    between the twisted sums, acting copy-by-copy."""
    e, f = gamma.source, gamma.target
    grp = e.group
    m = grp.order
    src = twisted_sum(e)
    tgt = twisted_sum(f)
    u = Matrix.block_diag([gamma.u] * m)
    a = e.coeff
    ustar = []
    for g in range(m):
        ag = a.action[g]
        for t in range(len(e.functionals)):
            blocks = [ag * gamma.ustar[t] if g2 == g
                      else Matrix.zeros(a.dim, f.dim) for g2 in range(m)]
            ustar.append(Matrix.hstack(blocks))
    return FunPair(src.module, tgt.module, u, ustar, name="amp(%s)" % gamma.name)


@dataclass
class PlainExtensionResult:
    """Extension of a plain module with arbitrary action into A^{n|G|}."""
    module: FunctionalModule          # (A^n, S)
    pi_pair: FunPair                  # into the standard module A^{n|G|}
    w_pair: FunPair                   # untwisting isomorphism
    v_pair: FunPair                   # composed with the slot rotation X
    x_mat: Matrix                     # |G| x |G| rational slot isomorphism
    mu: tuple                         # conjugated slot action X tau X^-1
    target_standard: FunctionalModule
    target_tensor: FunctionalModule   # slots (x) (A^n, S) with mu on slots
    include_first: Matrix

    def composite_is_first_inclusion(self) -> bool:
        return self.v_pair.u * self.pi_pair.u == self.include_first


def _slot_rotation(m: int) -> Matrix:
    """Deterministic rational matrix sending (1,...,1) to (1,0,...,0).

    First row is the normalized all-ones vector; the rest are standard basis
    vectors with their all-ones component removed, taken greedily by echelon
    pivoting.
    """
    w = Fraction(1, m)
    rows = [[nq(w)] * m]
    from .exactkernel import Subspace
    for i in range(m):
        cand = [nq(Fraction(1 if j == i else 0) - w) for j in range(m)]
        test = Subspace.span(rows + [cand], m)
        if test.dim > len(rows):
            rows.append(cand)
        if len(rows) == m:
            break
    x = Matrix(rows, n=m)
    if inverse(x) is None:
        raise AssertionError("slot rotation is singular")
    return x


def plain_module_extension(e: FunctionalModule) -> PlainExtensionResult:
    """Extension of (A^n, S) into the standard A^{n|G|} plus the untwisting.

    The composite of the extension with the untwisting isomorphism is the
    inclusion of the first summand, exactly.
    """
    if e.standard is None:
        raise ValueError("plain_module_extension needs a standard module A^n")
    a = e.coeff
    grp = e.group
    m = grp.order
    n = e.standard.n
    d = e.dim
    ident_n = Matrix.identity(n)

    # target1: standard A^{nm} with slot-permutation cfactor
    cfactor = [_shift_perm(grp, h).kron(ident_n) for h in range(m)]
    target1 = standard_module(a, n * m, cfactor=cfactor)

    untwist = [ident_n.kron(a.action[g]) for g in range(m)]
    pi_u = Matrix.vstack([untwist[g] * e.gaction[grp.inv(g)] for g in range(m)])
    w = Fraction(1, m)
    pi_ustar = []
    for phi in e.functionals:
        back = [ident_n.kron(a.action[grp.inv(g)]) for g in range(m)]
        pi_ustar.append(Matrix.hstack(
            [(phi * e.gaction[g] * back[g]).scale(w) for g in range(m)]))
    pi_pair = FunPair(e, target1, pi_u, pi_ustar, name="pi62")

    # target2: slots (x) (A^n, S) with the shift on slots
    raction2 = [Matrix.identity(m).kron(e.raction[j]) for j in range(a.dim)]
    gaction2 = [_shift_perm(grp, h).kron(e.gaction[h]) for h in range(m)]
    functionals2 = []
    for g in range(m):
        for phi in e.functionals:
            blocks = [phi if g2 == g else Matrix.zeros(a.dim, d)
                      for g2 in range(m)]
            functionals2.append(Matrix.hstack(blocks))
    target2 = FunctionalModule(a, m * d, raction2, gaction2, functionals2,
                               name="%s(x)Q^%d" % (e.name, m))
    w_mat = Matrix.block_diag(
        [e.gaction[g] * ident_n.kron(a.action[grp.inv(g)]) for g in range(m)])
    w_pair = iso_pair(target1, target2, w_mat, name="W")

    # slot rotation and the mu-twisted target
    x_mat = _slot_rotation(m)
    x_inv = inverse(x_mat)
    mu = tuple(x_mat * _shift_perm(grp, h) * x_inv for h in range(m))
    gaction3 = [mu[h].kron(e.gaction[h]) for h in range(m)]
    target3 = FunctionalModule(a, m * d, raction2, gaction3, functionals2,
                               name="%s(x)Q^%d/mu" % (e.name, m))
    v_mat = x_mat.kron(Matrix.identity(d)) * w_mat
    v_pair = iso_pair(target1, target3, v_mat, name="V62")

    include_first = Matrix.vstack([Matrix.identity(d),
                                   Matrix.zeros((m - 1) * d, d)])
    return PlainExtensionResult(e, pi_pair, w_pair, v_pair, x_mat, mu,
                                target1, target3, include_first)


# ---------------------------------------------------------------------------
# the non-canonical corner witness
# ---------------------------------------------------------------------------


@dataclass
class CornerWitness51:
    """Exact witness data for right-invertibility of a corner embedding
    into a matrix algebra with an arbitrary compatible action."""
    n: int
    copies: int
    maps: dict                      # named hom matrices of the diagram
    identities: dict                # named exact identities
    homotopy: RotationPath          # path from the doubled corner to the end
    invertibility: Optional[Prop22Certificate]

    def ok(self) -> bool:
        base = all(self.identities.values()) and self.homotopy.ok()
        if self.invertibility is not None:
            base = base and self.invertibility.ok()
        return base

    def to_doc(self) -> dict:
        from .exactkernel import rat_str
        return {
            "n": self.n,
            "copies": self.copies,
            "maps": {k: [[rat_str(x) for x in row] for row in m.rows]
                     for k, m in sorted(self.maps.items())},
            "identities": dict(sorted(self.identities.items())),
            "homotopy": self.homotopy.to_doc(),
            "invertibility": (None if self.invertibility is None else
                              dict(sorted(self.invertibility.identities.items()))),
        }


def _normalize_column_action(a: Algebra, n: int, gamma: Sequence[Matrix]):
    """Rescale each gamma_g by a character so the distinguished block is
    alpha_g when possible (conjugation only sees gamma up to scalars)."""
    ad = a.dim
    cut = (n - 1) * ad
    out = []
    for g in range(a.group.order):
        gm = gamma[g]
        ag = a.action[g]
        lam = None
        consistent = True
        for r in range(ad):
            for c in range(ad):
                x, y = gm.rows[cut + r][cut + c], ag.rows[r][c]
                if y:
                    cand = Fraction(x) / Fraction(y)
                    if lam is None:
                        lam = cand
                    elif lam != cand:
                        consistent = False
                elif x:
                    consistent = False
        if not consistent or lam is None or lam == 0:
            return list(gamma)
        out.append(gm.scale(nq(Fraction(1) / lam)))
    # the rescaled family must still be a group action; otherwise keep as-is
    probe = standard_module(a, n, gaction=out)
    if validate_module(probe):
        return list(gamma)
    return out


def _gamma_splits_off_base(a: Algebra, n: int, gamma: Sequence[Matrix]):
    """If the column action is gamma' + alpha (last coordinate), return gamma'."""
    if n < 1:
        return None
    ad = a.dim
    cut = (n - 1) * ad
    out = []
    for g in range(a.group.order):
        gm = gamma[g]
        for r in range(cut):
            for c in range(cut, n * ad):
                if gm.rows[r][c] or gm.rows[c][r]:
                    return None
        for r in range(ad):
            for c in range(ad):
                if gm.rows[cut + r][cut + c] != a.action[g].rows[r][c]:
                    return None
        out.append(gm.submatrix(range(cut), range(cut)))
    return out


def corner51_witness(a: Algebra, n: int, gamma_action: Sequence[Matrix],
                     name: str = "corner51") -> CornerWitness51:
    """Certify the corner diagram for (M_n(A), Gamma) with arbitrary Gamma.

    Preconditions checked: Gamma is a valid algebra action on M_n(A); the
    first-column module is Gamma-invariant (reported with a violating group
    element otherwise); the extracted column action is semilinear; and Gamma
    agrees with conjugation by the column action under the matrix
    identification.
    """
    from .galgebra import validate_algebra
    grp = a.group
    m = grp.order
    ad = a.dim
    mna = matrix_algebra_over(a, n, action=list(gamma_action))
    errs = validate_algebra(mna)
    if errs:
        raise ValueError("Gamma is not a valid algebra action: %s" % errs[:3])

    # first-column invariance and extraction of the column action
    col_idx = [(i * n) * ad + k2 for i in range(n) for k2 in range(ad)]
    col_set = set(col_idx)
    for g in range(m):
        gm = gamma_action[g]
        for src in col_idx:
            col = gm.col(src)
            for pos, val in enumerate(col):
                if val and pos not in col_set:
                    raise ValueError("column module is not invariant under "
                                     "g=%d" % g)
    gamma_col = []
    for g in range(m):
        gm = gamma_action[g]
        rows = [[gm.rows[ri][ci] for ci in col_idx] for ri in col_idx]
        gamma_col.append(Matrix(rows, n=n * ad))
    gamma_col = _normalize_column_action(a, n, gamma_col)

    e_col = standard_module(a, n, gaction=gamma_col)
    merrs = validate_module(e_col)
    if merrs:
        raise ValueError("column action is not semilinear: %s" % merrs[:3])

    k_col = kalgebra(e_col)
    mi_s = matrix_iso(e_col, k_col)
    identities = {}
    maps = {}
    # Gamma agrees with conjugation by the column action
    identities["gamma_is_conjugation"] = all(
        mi_s.matrix_side.action[g] == mna.action[g] for g in range(m))
    if not identities["gamma_is_conjugation"]:
        raise ValueError("Gamma does not agree with conjugation by the "
                         "column action")

    l62 = plain_module_extension(e_col)
    require_extension(l62.pi_pair)
    identities["composite_is_first_inclusion"] = \
        l62.composite_is_first_inclusion()

    k_t1 = kalgebra(l62.target_standard)
    mi_t = matrix_iso(l62.target_standard, k_t1)
    ind_f = induced_compact_hom(l62.pi_pair, ke=k_col, kf=k_t1)
    f_abs = AlgebraHom(mna, mi_t.matrix_side,
                       mi_t.forward.matrix * ind_f.hom.matrix
                       * mi_s.backward.matrix, name="f")
    if check_hom(f_abs):
        raise AssertionError("non-canonical corner embedding f is invalid")
    maps["f"] = f_abs.matrix

    kt3 = kalgebra(l62.target_tensor)
    ind_x = induced_compact_hom(l62.v_pair, ke=k_t1, kf=kt3)
    bmi = block_matrix_iso(e_col, m, l62.target_tensor, k_col, kt3)
    x_abs = AlgebraHom(mi_t.matrix_side, bmi.matrix_side,
                       bmi.forward.matrix * ind_x.hom.matrix
                       * mi_t.backward.matrix, name="x")
    if check_hom(x_abs):
        raise AssertionError("block identification x is invalid")
    maps["x"] = x_abs.matrix

    # canonical corner M_n(A) -> M_m(K) at block (0,0)
    kd = k_col.dim
    cc_cols = []
    for u in range(mna.dim):
        kc = mi_s.backward.matrix.col(u)
        vcol = [0] * bmi.matrix_side.dim
        for r, c in enumerate(kc):
            if c:
                vcol[0 * kd + r] = c
        cc_cols.append(vcol)
    cc = Matrix.from_cols(cc_cols, m=bmi.matrix_side.dim)
    identities["fx_is_canonical_corner"] = (x_abs.matrix * f_abs.matrix == cc)

    # e: A -> (M_n(A), Gamma), corner at the distinguished last coordinate
    # (equivariance forces the column action to fix that coordinate)
    last = n - 1
    e_cols = []
    for k2 in range(ad):
        vcol = [0] * mna.dim
        vcol[(last * n + last) * ad + k2] = 1
        e_cols.append(vcol)
    e_hom = AlgebraHom(a, mna, Matrix.from_cols(e_cols, m=mna.dim), name="e")
    if check_hom(e_hom):
        raise ValueError("the distinguished corner embedding is not "
                         "equivariant for the given Gamma")
    maps["e"] = e_hom.matrix

    # enlarged matrix pictures
    nm = n * m
    astd = standard_module(a, 1)
    nu_prime = [Matrix.block_diag([l62.target_standard.standard.cfactor[g],
                                   Matrix.identity(1)]) for g in range(m)]
    t1a = standard_module(a, nm + 1, cfactor=nu_prime)
    if not same_module(t1a, direct_sum([l62.target_standard, astd])):
        raise AssertionError("enlarged standard module mismatch")
    t3a = standard_module(a, nm + 1, gaction=[
        Matrix.block_diag([l62.target_tensor.gaction[g], astd.gaction[g]])
        for g in range(m)])
    if not same_module(t3a, direct_sum([l62.target_tensor, astd])):
        raise AssertionError("enlarged twisted module mismatch")

    v_plus = funpair_direct_sum([l62.v_pair, identity_pair(astd)],
                                source=t1a, target=t3a)
    kt1a = kalgebra(t1a)
    kt3a = kalgebra(t3a)
    mi_big_t1 = matrix_iso(t1a, kt1a)
    mi_big_s = matrix_iso(t3a, kt3a)
    ind_big = induced_compact_hom(v_plus, ke=kt1a, kf=kt3a)
    x_big = AlgebraHom(mi_big_t1.matrix_side, mi_big_s.matrix_side,
                       mi_big_s.forward.matrix * ind_big.hom.matrix
                       * mi_big_t1.backward.matrix, name="X")
    if check_hom(x_big) or rank(x_big.matrix) != x_big.source.dim:
        raise AssertionError("enlarged identification X is invalid")
    maps["X"] = x_big.matrix

    # y: upper-left enlargement M_{nm}(A) -> M_{nm+1}(A)
    y_cols = []
    for i in range(nm):
        for j in range(nm):
            for k2 in range(ad):
                vcol = [0] * mi_big_t1.matrix_side.dim
                vcol[(i * (nm + 1) + j) * ad + k2] = 1
                y_cols.append(vcol)
    y_hom = AlgebraHom(mi_t.matrix_side, mi_big_t1.matrix_side,
                       Matrix.from_cols(y_cols, m=mi_big_t1.matrix_side.dim),
                       name="y")
    if check_hom(y_hom):
        raise AssertionError("upper-left enlargement y is invalid")
    maps["y"] = y_hom.matrix

    # z: M_m(K) -> M_{nm+1}(A) through the block identification
    z_cols = []
    for j in range(m):
        for k2 in range(m):
            for r in range(kd):
                c = mi_s.forward.matrix.col(r)
                vcol = [0] * mi_big_s.matrix_side.dim
                for i in range(n):
                    for l in range(n):
                        for t in range(ad):
                            val = c[(i * n + l) * ad + t]
                            if val:
                                vcol[((j * n + i) * (nm + 1)
                                      + (k2 * n + l)) * ad + t] = val
                z_cols.append(vcol)
    z_hom = AlgebraHom(bmi.matrix_side, mi_big_s.matrix_side,
                       Matrix.from_cols(z_cols, m=mi_big_s.matrix_side.dim),
                       name="z")
    if check_hom(z_hom):
        raise AssertionError("block enlargement z is invalid")
    maps["z"] = z_hom.matrix

    identities["X_after_y_equals_z_after_x"] = (
        x_big.matrix * y_hom.matrix == z_hom.matrix * x_abs.matrix)

    # canonical corners at the start and at the added coordinate
    c1 = z_hom.matrix * x_abs.matrix * f_abs.matrix * e_hom.matrix
    r_cols = []
    f_cols = []
    for k2 in range(ad):
        vcol = [0] * mi_big_s.matrix_side.dim
        vcol[(nm * (nm + 1) + nm) * ad + k2] = 1
        r_cols.append(vcol)
        f_cols.append(list(vcol))
    r_hom = Matrix.from_cols(r_cols, m=mi_big_s.matrix_side.dim)
    f_corner = Matrix.from_cols(f_cols, m=mi_big_t1.matrix_side.dim)
    identities["X_after_F_equals_r"] = (x_big.matrix * f_corner == r_hom)
    efy = y_hom.matrix * f_abs.matrix * e_hom.matrix
    identities["X_after_efy_equals_start"] = (x_big.matrix * efy == c1)

    homotopy = rotation_path(
        [c1.col(k2) for k2 in range(ad)],
        [r_hom.col(k2) for k2 in range(ad)],
        nm + 1, ad, ("plane", last, nm),
        structure=a.structure, source_structure=a.structure)
    if not homotopy.ok():
        raise AssertionError("corner homotopy failed")
    maps["F"] = f_corner

    invert = None
    split = _gamma_splits_off_base(a, n, gamma_col)
    if split is not None and n >= 1:
        e_small = standard_module(a, n - 1, gaction=split)
        l62s = plain_module_extension(e_small)
        invert = verify_prop22(l62s.pi_pair)

    wit = CornerWitness51(n, m, maps, identities, homotopy, invert)
    if not wit.ok():
        raise AssertionError("corner witness failed: %s" % {
            k3: v3 for k3, v3 in identities.items() if not v3})
    return wit
