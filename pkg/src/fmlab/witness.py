"""Diagram-level certificates: rotation homotopies, corner invertibility
and the closure-class certifier.

Rotation paths are handled symbolically in Q[c,s]/(c^2+s^2-1): conjugating a
homomorphism by the block rotation [[c,s],[-s,c]] gives matrices over the
rotation ring whose endpoint evaluations must reproduce the two given maps,
and whose multiplicativity holds identically in the ring (the conjugator
satisfies R R^T = 1 exactly in the quotient).

``verify_prop22`` materializes every map in the corner-inversion diagram for
an extension V: E -> B^n and checks the five identity groups exactly; big
targets are kept as realized operators so no oversized structure tensors are
ever built.  ``certify_class_c`` walks a closure term, certifying at every
node a functional extension into a standard module, a unit for the node's
compact algebra, cofullness, and the corner-invertibility certificate.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exactkernel import (Matrix, ROT_ONE, ROT_ZERO, RotScalar, Subspace,
                          inverse, kernel_basis, rank, rat_str, rot_eval,
                          unit_vec, vec_is_zero)
from .galgebra import (Algebra, AlgebraHom, check_hom, find_unit,
                       matrix_algebra_over, tensor_algebra)
from .fmod import (FunctionalModule, check_cofull_functionals,
                   check_cofull_module, direct_sum, external_tensor,
                   standard_module)
from .funext import (FunPair, change_coefficients, check_functional_hom,
                     corner_module_composition, decide_functional_extension,
                     funpair_compose, funpair_direct_sum,
                     funpair_external_tensor, identity_pair,
                     induced_compact_hom, iso_pair, require_extension)
from .kops import CompactAlgebra, kalgebra, matrix_iso, theta_realized

_PAIR_LIMIT = 4096


# ---------------------------------------------------------------------------
# symbolic matrices over the rotation ring
# ---------------------------------------------------------------------------


class SymGrid:
    """Sparse N x N grid whose entries are coefficient vectors over the
    rotation ring (entry_dim = 1 gives plain rotation-ring matrices)."""

    __slots__ = ("n", "entry_dim", "data")

    def __init__(self, n: int, entry_dim: int, data=None):
        self.n = n
        self.entry_dim = entry_dim
        self.data = data or {}

    @staticmethod
    def from_coords(coords: Sequence, n: int, entry_dim: int) -> "SymGrid":
        data = {}
        for i in range(n):
            for j in range(n):
                base = (i * n + j) * entry_dim
                chunk = coords[base:base + entry_dim]
                if any(chunk):
                    data[(i, j)] = tuple(
                        x if isinstance(x, RotScalar) else RotScalar.from_rat(x)
                        for x in chunk)
        return SymGrid(n, entry_dim, data)

    def scale(self, k) -> "SymGrid":
        if isinstance(k, (int, Fraction)) and not k:
            return SymGrid(self.n, self.entry_dim)
        return SymGrid(self.n, self.entry_dim, {
            key: tuple(k * x for x in val) for key, val in self.data.items()})

    def add(self, other: "SymGrid") -> "SymGrid":
        data = dict(self.data)
        for key, val in other.data.items():
            if key in data:
                s = tuple(a + b for a, b in zip(data[key], val))
                if any(s):
                    data[key] = s
                else:
                    del data[key]
            else:
                data[key] = val
        return SymGrid(self.n, self.entry_dim, data)

    def mul(self, other: "SymGrid", structure=None) -> "SymGrid":
        """Grid product; ``structure`` multiplies entry vectors (None: 1-dim)."""
        out: dict = {}
        rows: dict = {}
        for (i, k), val in self.data.items():
            rows.setdefault(i, []).append((k, val))
        cols: dict = {}
        for (k, j), val in other.data.items():
            cols.setdefault(k, []).append((j, val))
        for i, row in rows.items():
            for k, aval in row:
                col = cols.get(k)
                if not col:
                    continue
                for j, bval in col:
                    if structure is None:
                        prod = (aval[0] * bval[0],)
                    else:
                        acc = [ROT_ZERO] * self.entry_dim
                        for s, a in enumerate(aval):
                            if a:
                                for t, b in enumerate(bval):
                                    if b:
                                        ab = a * b
                                        for w, c in enumerate(structure[s][t]):
                                            if c:
                                                acc[w] = acc[w] + ab * c
                        prod = tuple(acc)
                    if any(prod):
                        key = (i, j)
                        if key in out:
                            s2 = tuple(x + y for x, y in zip(out[key], prod))
                            if any(s2):
                                out[key] = s2
                            else:
                                del out[key]
                        else:
                            out[key] = prod
        return SymGrid(self.n, self.entry_dim, out)

    def conjugate(self, rot: dict, rot_t: dict) -> "SymGrid":
        """R . self . R^T for a sparse scalar rotation matrix R."""
        # left multiply
        mid: dict = {}
        for (u, j), val in self.data.items():
            for (i, r) in rot.get(u, ()):  # entries R[i][u] indexed by u
                term = tuple(r * x for x in val)
                key = (i, j)
                if key in mid:
                    mid[key] = tuple(a + b for a, b in zip(mid[key], term))
                else:
                    mid[key] = term
        out: dict = {}
        for (i, v), val in mid.items():
            if not any(val):
                continue
            for (j, r) in rot_t.get(v, ()):  # entries R^T[v][j] = R[j][v]
                term = tuple(r * x for x in val)
                key = (i, j)
                if key in out:
                    out[key] = tuple(a + b for a, b in zip(out[key], term))
                else:
                    out[key] = term
        out = {k: v for k, v in out.items() if any(v)}
        return SymGrid(self.n, self.entry_dim, out)

    def eval_endpoint(self, endpoint: str):
        """Rational coordinate vector at an endpoint of the path."""
        coords = [0] * (self.n * self.n * self.entry_dim)
        for (i, j), val in self.data.items():
            base = (i * self.n + j) * self.entry_dim
            for t, x in enumerate(val):
                coords[base + t] = rot_eval(x, endpoint)
        return tuple(coords)

    def __eq__(self, other):
        if not isinstance(other, SymGrid):
            return NotImplemented
        if self.n != other.n or self.entry_dim != other.entry_dim:
            return False
        keys = set(self.data) | set(other.data)
        zero = (ROT_ZERO,) * self.entry_dim
        for k in keys:
            if self.data.get(k, zero) != other.data.get(k, zero):
                return False
        return True


def plane_rotation(n: int, i: int, j: int):
    """Sparse rotation in coordinates (i, j): R[i][i]=c, R[i][j]=s, ...

    Returns (R, R^T) in the column-indexed sparse format used by SymGrid:
    column index u maps to a list of (row, entry).  In this format the data
    for right-multiplication by R^T coincides with the data for R, since
    both need the columns of R listed as (row, value).
    """
    c, s = RotScalar.c(), RotScalar.s()
    rot: dict = {}
    for u in range(n):
        if u == i:
            rot[u] = [(i, c), (j, -s)]
        elif u == j:
            rot[u] = [(i, s), (j, c)]
        else:
            rot[u] = [(u, ROT_ONE)]
    return rot, rot


def block_rotation(two_k: int):
    """Block rotation [[cI, sI], [-sI, cI]] on 2k coordinates."""
    if two_k % 2:
        raise ValueError("block rotation needs an even size")
    k = two_k // 2
    c, s = RotScalar.c(), RotScalar.s()
    rot: dict = {}
    for u in range(k):
        rot[u] = [(u, c), (u + k, -s)]
        rot[u + k] = [(u, s), (u + k, c)]
    return rot, rot


def _rotation_is_orthogonal(rot: dict, rot_t: dict, n: int) -> bool:
    """Check R R^T = 1 identically in the rotation ring."""
    a = SymGrid(n, 1, {(i, u): (val,) for u, lst in rot.items()
                       for (i, val) in lst})
    b = SymGrid(n, 1, {(u, j): (val,) for u, lst in rot_t.items()
                       for (j, val) in lst})
    prod = a.mul(b)
    ident = SymGrid(n, 1, {(i, i): (ROT_ONE,) for i in range(n)})
    return prod == ident


@dataclass
class RotationPath:
    """Certified homotopy between two maps by conjugation with a rotation."""
    grid_size: int
    entry_dim: int
    plane: tuple                      # ("plane", i, j) or ("block", k)
    source_images: tuple              # realized/abstract coords per basis
    target_images: tuple
    checks: dict

    def ok(self) -> bool:
        return all(self.checks.values())

    def to_doc(self) -> dict:
        """Serializable summary: plane, conjugator coefficients, checks."""
        from .exactkernel import rat_str
        c, s = RotScalar.c(), RotScalar.s()

        def rot_doc(x: RotScalar):
            return {"a": [rat_str(v) for v in x.a],
                    "b": [rat_str(v) for v in x.b]}

        return {
            "grid_size": self.grid_size,
            "entry_dim": self.entry_dim,
            "plane": list(self.plane),
            "conjugator_entries": {"cos": rot_doc(c), "sin": rot_doc(s),
                                   "neg_sin": rot_doc(-s)},
            "checks": dict(sorted(self.checks.items())),
        }


def rotation_path(source_images: Sequence, target_images: Sequence,
                  grid_size: int, entry_dim: int, plane,
                  structure=None, source_structure=None,
                  pair_limit: int = _PAIR_LIMIT,
                  sample_rng=None) -> RotationPath:
    """Certify source ~ target by the rotation in ``plane``.

    ``plane`` is ("plane", i, j) or ("block", k).  ``structure`` gives the
    entry-algebra structure constants (None for scalar entries).
    ``source_structure`` gives the source algebra's multiplication tensor,
    enabling the symbolic multiplicativity check on basis pairs; when the
    pair count exceeds ``pair_limit`` a deterministic sample is checked (the
    conjugator's exact orthogonality already implies the rest).
    """
    n = grid_size
    if plane[0] == "plane":
        rot, rot_t = plane_rotation(n, plane[1], plane[2])
    elif plane[0] == "block":
        rot, rot_t = block_rotation(n)
    else:
        raise ValueError("unknown rotation plane spec")
    checks = {}
    checks["conjugator_orthogonal"] = _rotation_is_orthogonal(rot, rot_t, n)

    grids = []
    for coords in source_images:
        g = SymGrid.from_coords(coords, n, entry_dim)
        grids.append(g.conjugate(rot, rot_t))

    start_ok = True
    end_ok = True
    for g, src, tgt in zip(grids, source_images, target_images):
        if g.eval_endpoint("start") != tuple(src):
            start_ok = False
        if g.eval_endpoint("end") != tuple(tgt):
            end_ok = False
    checks["start_endpoint"] = start_ok
    checks["end_endpoint"] = end_ok

    if source_structure is not None:
        d = len(grids)
        pairs = [(i, j) for i in range(d) for j in range(d)]
        if len(pairs) > pair_limit and sample_rng is not None:
            pairs = [(sample_rng.randrange(d), sample_rng.randrange(d))
                     for _ in range(pair_limit)]
        mult_ok = True
        for (i, j) in pairs:
            lhs = grids[i].mul(grids[j], structure)
            rhs = SymGrid(n, entry_dim)
            for w, cst in enumerate(source_structure[i][j]):
                if cst:
                    rhs = rhs.add(grids[w].scale(cst))
            if lhs != rhs:
                mult_ok = False
                break
        checks["multiplicative_identically"] = mult_ok

    return RotationPath(n, entry_dim, tuple(plane),
                        tuple(tuple(s) for s in source_images),
                        tuple(tuple(t) for t in target_images), checks)


# ---------------------------------------------------------------------------
# operator-valued homomorphisms (realized targets)
# ---------------------------------------------------------------------------


@dataclass
class OpHom:
    """Map from an abstract algebra into realized operators on a module."""
    source: Algebra
    images: tuple          # realized Matrix per source basis element
    module: FunctionalModule

    def apply(self, coords: Sequence) -> Matrix:
        from .exactkernel import mat_lincomb
        return mat_lincomb(self.images, coords, self.module.dim,
                           self.module.dim)


def check_ophom(h: OpHom, check_pairs: bool = True) -> list:
    """Multiplicativity, equivariance and injectivity for an OpHom."""
    errs = []
    s = h.source
    d = s.dim
    if check_pairs:
        for i in range(d):
            for j in range(d):
                prod = s.structure[i][j]
                rhs = h.apply(prod)
                if h.images[i] * h.images[j] != rhs:
                    errs.append("not multiplicative at (%d,%d)" % (i, j))
    for g in range(s.group.order):
        sg = h.module.gaction[g]
        sginv = h.module.gaction[h.module.group.inv(g)]
        for i in range(d):
            if sg * h.images[i] * sginv != h.apply(s.action[g].col(i)):
                errs.append("not equivariant at (g=%d, %d)" % (g, i))
                break
    vecs = [m.vec() for m in h.images]
    if vecs and Subspace.span(vecs, len(vecs[0])).dim != d:
        errs.append("not injective")
    return errs


def induced_compact_ophom(p: FunPair, ke: CompactAlgebra,
                          check_pairs_limit: int = _PAIR_LIMIT) -> OpHom:
    """Induced map on compacts, landing in realized operators on p's target.

    Verifies well-definedness over the generating family, multiplicativity
    on basis pairs through the elementary composition rule, injectivity and
    equivariance, all without building a structure tensor for the target.
    """
    errs = check_functional_hom(p)
    if errs:
        raise ValueError("invalid functional homomorphism: %s" % errs[:3])
    if not decide_functional_extension(p).yes:
        raise ValueError("extension property not certified")
    e, f = p.source, p.target
    tb = e.theta_basis()
    ustar_cache = {t: p.ustar_apply(phi) for t, phi in enumerate(tb)}

    images = {}
    for (i, t) in ke.provenance:
        images[(i, t)] = theta_realized(f, p.u.apply(unit_vec(e.dim, i)),
                                        ustar_cache[t])
    ophom = OpHom(ke.algebra, tuple(images[key] for key in ke.provenance), f)

    # well-definedness over the relations of the full generating family;
    # images are accumulated sparsely since the target can be large
    fam = []
    fam_img = []
    for i in range(e.dim):
        ui = p.u.apply(unit_vec(e.dim, i))
        for t, phi in enumerate(tb):
            fam.append(theta_realized(e, unit_vec(e.dim, i), phi).vec())
            img = theta_realized(f, ui, ustar_cache[t])
            fam_img.append({idx: x for idx, x in enumerate(img.vec()) if x})
    if fam:
        for lam in kernel_basis(Matrix.from_cols(fam)):
            acc: dict = {}
            for c, v in zip(lam, fam_img):
                if c:
                    for idx, x in v.items():
                        acc[idx] = acc.get(idx, 0) + c * x
            if any(acc.values()):
                raise AssertionError("induced map not well-defined")

    errs = check_ophom(ophom, check_pairs=False)
    if errs:
        raise AssertionError("induced operator map invalid: %s" % errs[:3])

    count = len(ke.provenance) ** 2
    budget = min(check_pairs_limit, max(256, 4_000_000 // max(1, f.dim ** 2)))
    pairs = [(a, b) for a in ke.provenance for b in ke.provenance]
    if count > budget:
        import random
        rng = random.Random(20240301)
        pairs = [(ke.provenance[rng.randrange(len(ke.provenance))],
                  ke.provenance[rng.randrange(len(ke.provenance))])
                 for _ in range(budget)]
    for (i, t), (j, u) in pairs:
        w = tb[t].col(j)
        eta2 = e.right_mult_by(w).apply(unit_vec(e.dim, i))
        prod_img = theta_realized(f, p.u.apply(eta2), ustar_cache[u])
        if images[(i, t)] * images[(j, u)] != prod_img:
            raise AssertionError("induced operator map not multiplicative")
    return ophom


# ---------------------------------------------------------------------------
# corner invertibility certificate
# ---------------------------------------------------------------------------


@dataclass
class Prop22Certificate:
    """Exact witnesses for the corner-inversion diagram of an extension."""
    module_name: str
    n: int
    maps: dict                 # name -> Matrix (hom data)
    identities: dict           # name -> bool
    rotation_z: RotationPath
    rotation_x: RotationPath

    def ok(self) -> bool:
        return (all(self.identities.values()) and self.rotation_z.ok()
                and self.rotation_x.ok())


def _corner_hom_into_matrix(b: Algebra, mn1: Algebra, n1: int, coord: int,
                            name: str) -> AlgebraHom:
    """b -> E_{coord,coord} (x) b inside an (n1 x n1) matrix algebra over b."""
    cols = []
    for k in range(b.dim):
        v = [0] * mn1.dim
        v[(coord * n1 + coord) * b.dim + k] = 1
        cols.append(v)
    return AlgebraHom(b, mn1, Matrix.from_cols(cols, m=mn1.dim), name=name)


def verify_prop22(v: FunPair) -> Prop22Certificate:
    """Certify invertibility data for the corner embedding attached to V.

    V must be a certified extension of a module E into a standard module B^n
    with product action.  The distinguished copy of B is placed first in
    B^{n+1} so the canonical corners in the diagram are upper-left blocks.
    Every identity is exact; any failure raises (it would be a bug, not an
    input defect).
    """
    e_mod = v.source
    b = e_mod.coeff
    tgt = v.target
    if tgt.standard is None or tgt.standard.cfactor is None:
        raise ValueError("V must land in a standard module with product action")
    require_extension(v)
    n = tgt.standard.n
    bd = b.dim
    order = b.group.order

    bstd = standard_module(b, 1)
    eb = direct_sum([e_mod, bstd], name="%s(+)B" % e_mod.name)
    ebdim = eb.dim

    # F = id_B (+) V with the B coordinate first
    tau = [Matrix.block_diag([Matrix.identity(1), tgt.standard.cfactor[g]])
           for g in range(order)]
    bn1 = standard_module(b, n + 1, cfactor=tau)
    fmat = Matrix.vstack([
        Matrix.hstack([Matrix.zeros(bd, e_mod.dim), Matrix.identity(bd)]),
        Matrix.hstack([v.u, Matrix.zeros(tgt.dim, bd)]),
    ])
    fustar = [Matrix.hstack([Matrix.zeros(bd, bd), img]) for img in v.ustar]
    fustar += [Matrix.hstack([phi, Matrix.zeros(bd, tgt.dim)])
               for phi in bstd.functionals]
    f_pair = FunPair(eb, bn1, fmat, fustar, name="F")
    require_extension(f_pair)

    k = kalgebra(eb)
    identities = {}
    maps = {}

    # e: corner embedding B -> K(E+B)
    e_cols = []
    for i in range(bd):
        op = Matrix.block_diag([Matrix.zeros(e_mod.dim, e_mod.dim),
                                b.left_mult(i)])
        coords = k.express(op)
        if coords is None:
            raise ValueError("corner operator not compact")
        e_cols.append(coords)
    e_hom = AlgebraHom(b, k.algebra, Matrix.from_cols(e_cols, m=k.dim), name="e")
    if check_hom(e_hom):
        raise AssertionError("corner embedding failed verification")
    maps["e"] = e_hom.matrix

    # f: K(E+B) -> M_{n+1}(B) induced by F
    kbn1 = kalgebra(bn1)
    ind_f = induced_compact_hom(f_pair, ke=k, kf=kbn1)
    miso1 = matrix_iso(bn1, kbn1)
    mn1 = miso1.matrix_side
    f_abs = AlgebraHom(k.algebra, mn1,
                       miso1.forward.matrix * ind_f.hom.matrix, name="f")
    if check_hom(f_abs):
        raise AssertionError("induced map into the matrix algebra is invalid")
    maps["f"] = f_abs.matrix

    # h: canonical corner into coordinate 0
    h_hom = _corner_hom_into_matrix(b, mn1, n + 1, 0, "h")
    if check_hom(h_hom):
        raise AssertionError("canonical corner h is invalid")
    maps["h"] = h_hom.matrix
    identities["f_after_e_equals_h"] = (f_abs.matrix * e_hom.matrix
                                        == h_hom.matrix)

    # E = id_{M_{n+1}} (x) e : M_{n+1}(B) -> M_{n+1}(K)
    adtau = []
    for g in range(order):
        tinv = inverse(tau[g])
        adtau.append(tau[g].kron(tinv.transpose()))
    mk = matrix_algebra_over(k.algebra, n + 1,
                             action=[adtau[g].kron(k.algebra.action[g])
                                     for g in range(order)],
                             name="M%d(K)" % (n + 1))
    e_cols_big = []
    for i in range(n + 1):
        for j in range(n + 1):
            for t in range(bd):
                vcol = [0] * mk.dim
                base = (i * (n + 1) + j) * k.dim
                for r, c in enumerate(e_hom.matrix.col(t)):
                    if c:
                        vcol[base + r] = c
                e_cols_big.append(vcol)
    e_map = AlgebraHom(mn1, mk, Matrix.from_cols(e_cols_big, m=mk.dim),
                       name="E")
    if check_hom(e_map):
        raise AssertionError("entrywise corner map E is invalid")
    maps["E"] = e_map.matrix

    # H: corner of M_{n+1}(K) at block (0,0)
    h_cols = []
    for r in range(k.dim):
        vcol = [0] * mk.dim
        vcol[0 * k.dim + r] = 1
        h_cols.append(vcol)
    h_big = AlgebraHom(k.algebra, mk, Matrix.from_cols(h_cols, m=mk.dim),
                       name="H")
    if check_hom(h_big):
        raise AssertionError("canonical corner H is invalid")
    maps["H"] = h_big.matrix
    identities["E_after_h_equals_H_after_e"] = (
        e_map.matrix * h_hom.matrix == h_big.matrix * e_hom.matrix)

    # doubled copies and the big sum; the big module carries the twisted
    # action I_2 (x) tau (x) (U + beta) permuting the n+1 coordinates
    nc = 2 * n + 2
    eb2 = direct_sum([eb, eb], name="(E+B)^2")
    keb2 = kalgebra(eb2)
    big_raction = [Matrix.identity(nc).kron(eb.raction[j])
                   for j in range(bd)]
    big_gaction = [Matrix.identity(2).kron(tau[g]).kron(eb.gaction[g])
                   for g in range(order)]
    big_functionals = []
    for slot in range(nc):
        for phi in eb.functionals:
            blocks = [phi if s2 == slot else Matrix.zeros(bd, ebdim)
                      for s2 in range(nc)]
            big_functionals.append(Matrix.hstack(blocks))
    big = FunctionalModule(b, nc * ebdim, big_raction, big_gaction,
                           big_functionals, name="(E+B)^%d" % nc)

    def placed(op: Matrix, ci: int, cj: int) -> Matrix:
        rows = [[0] * big.dim for _ in range(big.dim)]
        for r in range(ebdim):
            oprow = op.rows[r]
            for c in range(ebdim):
                if oprow[c]:
                    rows[ci * ebdim + r][cj * ebdim + c] = oprow[c]
        return Matrix(rows, n=big.dim)

    z_cols, zp_cols = [], []
    for t_op in k.basis_ops:
        lower = Matrix.block_diag([Matrix.zeros(ebdim, ebdim), t_op])
        upper = Matrix.block_diag([t_op, Matrix.zeros(ebdim, ebdim)])
        cz = keb2.express(lower)
        czp = keb2.express(upper)
        if cz is None or czp is None:
            raise AssertionError("corner placement not compact in (E+B)^2")
        z_cols.append(cz)
        zp_cols.append(czp)
    z_hom = AlgebraHom(k.algebra, keb2.algebra,
                       Matrix.from_cols(z_cols, m=keb2.dim), name="z")
    zp_hom = AlgebraHom(k.algebra, keb2.algebra,
                        Matrix.from_cols(zp_cols, m=keb2.dim), name="z'")
    if check_hom(z_hom) or check_hom(zp_hom):
        raise AssertionError("corner embeddings z, z' are invalid")
    maps["z"] = z_hom.matrix
    maps["z_prime"] = zp_hom.matrix

    # psi: (E+B)^2 -> (E+B)^{2n+2}; copy 1 identically, copy 2 through F
    psi_rows = [[0] * (2 * ebdim) for _ in range(big.dim)]
    for r in range(ebdim):
        psi_rows[r][r] = 1
    for j in range(n + 1):
        for r in range(bd):
            frow = fmat.rows[j * bd + r]
            target_row = (n + 1 + j) * ebdim + e_mod.dim + r
            for c in range(ebdim):
                if frow[c]:
                    psi_rows[target_row][ebdim + c] = frow[c]
    psi_mat = Matrix(psi_rows, n=2 * ebdim)
    psi_ustar = []
    for t, phi in enumerate(eb.functionals):
        img = Matrix.hstack([phi, Matrix.zeros(bd, (nc - 1) * ebdim)])
        psi_ustar.append(img)
    for t in range(len(eb.functionals)):
        fimg = f_pair.ustar[t]
        rows = [[0] * big.dim for _ in range(bd)]
        for j in range(n + 1):
            for r in range(bd):
                for c in range(bd):
                    val = fimg.rows[r][j * bd + c]
                    if val:
                        rows[r][(n + 1 + j) * ebdim + e_mod.dim + c] = val
        psi_ustar.append(Matrix(rows, n=big.dim))
    psi_pair = FunPair(eb2, big, psi_mat, psi_ustar, name="psi")
    require_extension(psi_pair)

    phi_op = induced_compact_ophom(psi_pair, ke=keb2)
    maps["phi_images"] = Matrix.from_cols([m.vec() for m in phi_op.images],
                                          m=big.dim * big.dim)

    # x, x': block placements of M_{n+1}(K) into operators on the big sum
    x_images, xp_images = [], []
    for i in range(n + 1):
        for j in range(n + 1):
            for r in range(k.dim):
                op = k.basis_ops[r]
                x_images.append(placed(op, n + 1 + i, n + 1 + j))
                xp_images.append(placed(op, i, j))
    x_op = OpHom(mk, tuple(x_images), big)
    xp_op = OpHom(mk, tuple(xp_images), big)
    small = mk.dim * mk.dim <= _PAIR_LIMIT
    if check_ophom(x_op, check_pairs=small) or \
            check_ophom(xp_op, check_pairs=small):
        raise AssertionError("block corner x or x' is invalid")

    # (3): phi . z = x . E . f on the basis of K(E+B)
    ok3 = True
    for r in range(k.dim):
        lhs = phi_op.apply(z_hom.matrix.col(r))
        rhs = x_op.apply(e_map.matrix.apply(f_abs.matrix.col(r)))
        if lhs != rhs:
            ok3 = False
            break
    identities["phi_after_z_equals_x_E_f"] = ok3

    # (5): phi . z' is the canonical upper-left corner embedding
    ok5 = True
    for r, t_op in enumerate(k.basis_ops):
        if phi_op.apply(zp_hom.matrix.col(r)) != placed(t_op, 0, 0):
            ok5 = False
            break
    identities["phi_after_zprime_is_upper_left_corner"] = ok5

    # (4): rotation paths z ~ z' and x ~ x'
    import random
    rng = random.Random(99173)
    rot_z = rotation_path(
        [Matrix.block_diag([Matrix.zeros(ebdim, ebdim), t]).vec()
         for t in k.basis_ops],
        [Matrix.block_diag([t, Matrix.zeros(ebdim, ebdim)]).vec()
         for t in k.basis_ops],
        2 * ebdim, 1, ("block", ebdim),
        source_structure=k.algebra.structure, sample_rng=rng)
    rot_x = rotation_path(
        [m.vec() for m in x_images], [m.vec() for m in xp_images],
        big.dim, 1, ("block", (n + 1) * ebdim),
        source_structure=mk.structure, sample_rng=rng)
    if not rot_z.ok() or not rot_x.ok():
        raise AssertionError("rotation path failed")
    identities["rotation_paths"] = True

    cert = Prop22Certificate(e_mod.name, n, maps, identities, rot_z, rot_x)
    if not cert.ok():
        raise AssertionError("corner certificate identities failed: %s" % {
            k2: v2 for k2, v2 in identities.items() if not v2})
    return cert


# ---------------------------------------------------------------------------
# class-C closure certification
# ---------------------------------------------------------------------------


class ClassCError(ValueError):
    """A closure-term node fails a hypothesis; carries the node path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__("%s (at %s)" % (message, "/".join(path) or "root"))


@dataclass
class ClosureTerm:
    """Expression tree over plain modules and the four closure operations."""
    kind: str                       # plain | direct_sum | internal_tensor |
                                    # external_tensor | corner_module
    algebra: Optional[str] = None   # plain: environment key ("$K" = ambient)
    n: int = 1                      # plain power / corner fiber count
    action: Optional[str] = None    # plain: cfactor spec key
    children: tuple = ()
    hom: Optional[str] = None       # internal_tensor: environment key

    def to_doc(self) -> dict:
        doc = {"kind": self.kind}
        if self.kind == "plain":
            doc.update({"algebra": self.algebra, "n": self.n})
            if self.action:
                doc["action"] = self.action
        elif self.kind in ("direct_sum", "external_tensor"):
            doc["children"] = [c.to_doc() for c in self.children]
        elif self.kind == "internal_tensor":
            doc["child"] = self.children[0].to_doc()
            doc["hom"] = self.hom
        elif self.kind == "corner_module":
            doc["child"] = self.children[0].to_doc()
            doc["fiber_count"] = self.n
        return doc

    @staticmethod
    def from_doc(doc: dict) -> "ClosureTerm":
        kind = doc["kind"]
        if kind == "plain":
            return ClosureTerm(kind, algebra=doc["algebra"], n=doc.get("n", 1),
                               action=doc.get("action"))
        if kind in ("direct_sum", "external_tensor"):
            return ClosureTerm(kind, children=tuple(
                ClosureTerm.from_doc(c) for c in doc["children"]))
        if kind == "internal_tensor":
            return ClosureTerm(kind, children=(ClosureTerm.from_doc(doc["child"]),),
                               hom=doc["hom"])
        if kind == "corner_module":
            return ClosureTerm(kind, children=(ClosureTerm.from_doc(doc["child"]),),
                               n=doc.get("fiber_count", 1))
        raise ValueError("unknown term kind %r" % kind)


@dataclass
class ClassCNode:
    kind: str
    module: FunctionalModule
    ext_pair: FunPair
    k_unit: tuple
    cofull_module: bool
    cofull_theta: bool
    prop22: Prop22Certificate
    children: list
    details: dict

    def to_doc(self) -> dict:
        def mat_doc(m: Matrix):
            return [[rat_str(x) for x in row] for row in m.rows]

        return {
            "kind": self.kind,
            "module_dim": self.module.dim,
            "coeff_dim": self.module.coeff.dim,
            "extension": {
                "target_n": self.ext_pair.target.standard.n,
                "u": mat_doc(self.ext_pair.u),
                "ustar": [mat_doc(m) for m in self.ext_pair.ustar],
            },
            "k_unit": [rat_str(x) for x in self.k_unit],
            "cofull_module": self.cofull_module,
            "cofull_theta": self.cofull_theta,
            "corner_invertibility": {
                "n": self.prop22.n,
                "identities": dict(sorted(self.prop22.identities.items())),
                "rotation_z": dict(sorted(self.prop22.rotation_z.checks.items())),
                "rotation_x": dict(sorted(self.prop22.rotation_x.checks.items())),
            },
            "details": self.details,
            "children": [c.to_doc() for c in self.children],
        }


@dataclass
class ClassCCertificate:
    term: ClosureTerm
    root: ClassCNode
    version: int = 1

    def to_doc(self) -> dict:
        body = {"format_version": self.version, "term": self.term.to_doc(),
                "certificate": self.root.to_doc()}
        digest = hashlib.sha256(
            json.dumps(body, sort_keys=True, separators=(",", ":"))
            .encode()).hexdigest()
        body["digest"] = digest
        return body

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True, indent=1)


def tensor_compact_iso(e: FunctionalModule, f: FunctionalModule,
                       tmod: FunctionalModule, ke: CompactAlgebra,
                       kf: CompactAlgebra, kt: CompactAlgebra):
    """Identify K(E (x) F) with K(E) (x) K(F) and transport the units.

    Returns (hom from the tensor of the compact algebras onto K(E (x) F),
    transported unit coordinates) after verifying the map is a bijective
    homomorphism and the transported element is a genuine two-sided unit.
    """
    kk = tensor_algebra(ke.algebra, kf.algebra)
    tb_e = e.theta_basis()
    tb_f = f.theta_basis()
    cols = []
    for (i, t) in ke.provenance:
        for (j, u) in kf.provenance:
            eta = [0] * tmod.dim
            eta[i * f.dim + j] = 1
            phi = tb_e[t].kron(tb_f[u])
            op = theta_realized(tmod, eta, phi)
            coords = kt.express(op)
            if coords is None:
                raise AssertionError("tensor of elementary operators is not "
                                     "compact on the tensor module")
            cols.append(coords)
    hom = AlgebraHom(kk, kt.algebra, Matrix.from_cols(cols, m=kt.dim),
                     name="K-tensor")
    errs = check_hom(hom)
    if errs:
        raise AssertionError("tensor identification invalid: %s" % errs[:3])
    if rank(hom.matrix) != kt.dim or kk.dim != kt.dim:
        raise AssertionError("tensor identification is not bijective")
    ue = find_unit(ke.algebra, "two")
    uf = find_unit(kf.algebra, "two")
    if ue is None or uf is None:
        return hom, None
    uu = [0] * kk.dim
    for i, a in enumerate(ue):
        if a:
            for j, c in enumerate(uf):
                if c:
                    uu[i * kf.dim + j] = a * c
    unit = hom.apply(uu)
    for r in range(kt.dim):
        er = unit_vec(kt.dim, r)
        if kt.algebra.mult(unit, er) != er or kt.algebra.mult(er, unit) != er:
            raise AssertionError("transported element is not a unit")
    return hom, tuple(unit)


def _leaf_extension(a: Algebra, n: int, cfactor, gaction):
    """Extension of a plain module into a standard module.

    Product actions extend by the identity; arbitrary actions go through the
    finite-group averaging construction.
    """
    if gaction is None:
        mod = standard_module(a, n, cfactor=cfactor)
        return mod, identity_pair(mod)
    from .equiv import plain_module_extension
    mod = standard_module(a, n, gaction=gaction)
    res = plain_module_extension(mod)
    return mod, res.pi_pair


def certify_class_c(term: ClosureTerm, env: dict,
                    ambient_k: Optional[Algebra] = None,
                    _path=()) -> "ClassCCertificate | ClassCNode":
    """Certify membership data for every node of a closure term.

    ``env`` maps names to algebras ("algebras"), homs ("homs") and action
    specs ("actions": name -> list of cfactor matrices or ("gaction", ...)).
    Inside a corner fiber the key "$K" resolves to the ambient compact
    algebra.  Raises ClassCError with the failing path on hypothesis failure.
    """
    path = list(_path)

    def fail(msg):
        raise ClassCError(path, msg)

    if term.kind == "plain":
        if term.algebra == "$K":
            if ambient_k is None:
                fail("$K used outside a corner fiber")
            alg = ambient_k
        else:
            alg = env["algebras"].get(term.algebra)
            if alg is None:
                fail("unknown algebra %r" % term.algebra)
        spec = None
        if term.action is not None:
            spec = env.get("actions", {}).get(term.action)
            if spec is None:
                fail("unknown action %r" % term.action)
        if find_unit(alg, "two") is None:
            fail("leaf algebra has no unit element")
        if spec is None:
            module, ext = _leaf_extension(alg, term.n, None, None)
        elif spec[0] == "cfactor":
            module, ext = _leaf_extension(alg, term.n, list(spec[1]), None)
        else:
            module, ext = _leaf_extension(alg, term.n, None, list(spec[1]))
        children = []
        details = {}
    elif term.kind == "direct_sum":
        children = [certify_class_c(c, env, ambient_k, _path=tuple(path) + (str(i),))
                    for i, c in enumerate(term.children)]
        module = direct_sum([c.module for c in children])
        ext = funpair_direct_sum([c.ext_pair for c in children], source=module)
        details = {}
    elif term.kind == "internal_tensor":
        child = certify_class_c(term.children[0], env, ambient_k,
                                _path=tuple(path) + ("0",))
        pi = env["homs"].get(term.hom)
        if pi is None:
            fail("unknown hom %r" % term.hom)
        if find_unit(pi.target, "two") is None:
            fail("target algebra of the change of coefficients has no unit")
        from .kops import approx_unit_transfer_check
        transfer = approx_unit_transfer_check(child.module, pi)
        res = change_coefficients(child.ext_pair, pi)
        module = res.tensor_module
        ext = res.pair
        children = [child]
        details = {"unit_transfer": {
            side: rep["consistent"]
            for side, rep in transfer["sides"].items()}}
    elif term.kind == "external_tensor":
        c1 = certify_class_c(term.children[0], env, ambient_k,
                             _path=tuple(path) + ("0",))
        c2 = certify_class_c(term.children[1], env, ambient_k,
                             _path=tuple(path) + ("1",))
        pair, src, tgt = funpair_external_tensor(c1.ext_pair, c2.ext_pair)
        module = src
        # restandardize the target (A^n1 (x) B^n2 -> (A(x)B)^{n1 n2})
        a1, a2 = c1.module.coeff, c2.module.coeff
        n1 = c1.ext_pair.target.standard.n
        n2 = c2.ext_pair.target.standard.n
        cf1 = c1.ext_pair.target.standard.cfactor
        cf2 = c2.ext_pair.target.standard.cfactor
        if cf1 is None or cf2 is None:
            fail("child extensions must land in product-action standard "
                 "modules")
        ab = tgt.coeff
        std = standard_module(ab, n1 * n2,
                              cfactor=[cf1[g].kron(cf2[g])
                                       for g in range(ab.group.order)])
        perm_cols = []
        d1, d2 = a1.dim, a2.dim
        for i in range(n1):
            for s in range(d1):
                for j in range(n2):
                    for t in range(d2):
                        vcol = [0] * std.dim
                        vcol[((i * n2 + j) * d1 * d2) + s * d2 + t] = 1
                        perm_cols.append(vcol)
        perm = Matrix.from_cols(perm_cols, m=std.dim)
        reb = iso_pair(tgt, std, perm, name="restd")
        errs = check_functional_hom(reb)
        if errs:
            fail("restandardization is not an isomorphism of functional "
                 "modules: %s" % errs[:2])
        ext = funpair_compose(reb, pair)
        children = [c1, c2]
        ke = kalgebra(c1.module)
        kf = kalgebra(c2.module)
        kt = kalgebra(module)
        _, tunit = tensor_compact_iso(c1.module, c2.module, module, ke, kf, kt)
        details = {"tensor_unit_transported": tunit is not None}
    elif term.kind == "corner_module":
        child = certify_class_c(term.children[0], env, ambient_k,
                                _path=tuple(path) + ("0",))
        bb = child.module.coeff
        if find_unit(bb, "two") is None:
            fail("corner node needs a unital coefficient algebra")
        bstd = standard_module(bb, 1)
        eb = direct_sum([child.module, bstd])
        u = funpair_direct_sum([child.ext_pair, identity_pair(bstd)], source=eb)
        kk = kalgebra(eb)
        fiber = standard_module(kk.algebra, term.n)
        vv = identity_pair(fiber)
        res = corner_module_composition(child.module, u, vv)
        module = res.corner_module
        ext = res.w_pair
        children = [child]
        details = {"fiber_count": term.n,
                   "fiber_k_unit": find_unit(kalgebra(fiber).algebra, "two")
                   is not None}
    else:
        fail("unknown term kind %r" % term.kind)

    errs = check_functional_hom(ext)
    if errs:
        fail("extension fails verification: %s" % errs[:2])
    if not decide_functional_extension(ext).yes:
        fail("extension property does not hold")
    kmod = kalgebra(module)
    unit = find_unit(kmod.algebra, "two")
    if unit is None:
        fail("compact algebra of the node has no unit element")
    cof_m = check_cofull_module(module)
    cof_t = check_cofull_functionals(module)
    if not cof_m or not cof_t:
        fail("node module is not cofull")
    cert22 = verify_prop22(ext)
    node = ClassCNode(term.kind, module, ext, tuple(unit), cof_m, cof_t,
                      cert22, children, details)
    if _path:
        return node
    return ClassCCertificate(term, node)
