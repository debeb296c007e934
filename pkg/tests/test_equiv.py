from fractions import Fraction

import pytest

from fmlab.exactkernel import Matrix, unit_vec
from fmlab.fmod import standard_module, validate_module
from fmlab.galgebra import (cyclic_group, group_algebra, group_algebra_z2_sign,
                            rationals)
from fmlab.funext import (FunPair, check_functional_hom,
                          decide_functional_extension, funpair_compose)
from fmlab.equiv import (amplify_nonequivariant, average_extension,
                         average_witness, corner51_witness,
                         plain_module_extension)
from fmlab.kops import matrix_iso


def test_average_trivial_group():
    q = rationals()
    e = standard_module(q, 2)
    res = average_extension(e)
    assert res.pair.u == Matrix.identity(2)
    assert check_functional_hom(res.pair) == []
    assert decide_functional_extension(res.pair).yes


def test_average_regular_module():
    a = group_algebra_z2_sign()
    e = standard_module(a, 1)
    res = average_extension(e)
    assert validate_module(res.target.module) == []
    assert check_functional_hom(res.pair) == []
    assert decide_functional_extension(res.pair).yes
    # pi stacks S_{g^-1}(xi): with |G| = 2 the blocks are S_0 and S_1
    assert res.pair.u == Matrix.vstack([e.gaction[0], e.gaction[1]])


def test_average_equivariance_identities():
    a = group_algebra_z2_sign()
    e = standard_module(a, 1)
    res = average_extension(e)
    tgt = res.pair.target
    for h in range(a.group.order):
        assert res.pair.u * e.gaction[h] == tgt.gaction[h] * res.pair.u
        for t, phi in enumerate(e.functionals):
            gphi = a.action[h] * phi * e.gaction[a.group.inv(h)]
            coords = e.functional_coords(gphi)
            img = Matrix.zeros(a.dim, tgt.dim)
            for c, m in zip(coords, res.pair.ustar):
                if c:
                    img = img + m.scale(c)
            ginv = tgt.group.inv(h)
            assert img == a.action[h] * res.pair.ustar[t] * tgt.gaction[ginv]


def test_average_closed_form_witness():
    # the closed-form vector (1/|G|) S_{g0}(eta) solves every system the
    # decision procedure solves
    a = group_algebra_z2_sign()
    e = standard_module(a, 1)
    res = average_extension(e)
    dec = decide_functional_extension(res.pair)
    assert dec.yes
    m = a.group.order
    for g0 in range(m):
        for r in range(e.dim):
            xi = average_witness(e, g0, r)
            j = g0 * e.dim + r
            for t, phi in enumerate(e.functionals):
                assert phi.apply(xi) == res.pair.ustar[t].col(j)


def test_amplify_identity():
    a = group_algebra_z2_sign()
    e = standard_module(a, 1)
    gamma = FunPair(e, e, Matrix.identity(2), list(e.functionals),
                    equivariant=False)
    amp = amplify_nonequivariant(gamma)
    assert amp.u == Matrix.identity(4)
    assert check_functional_hom(amp) == []


def test_amplify_nonequivariant_inclusion():
    # a non-equivariant extension of Q-modules amplifies to an equivariant one
    q2 = rationals(cyclic_group(2))
    src = standard_module(q2, 1, cfactor=[Matrix.identity(1), Matrix([[-1]])])
    tgt = standard_module(q2, 2)
    u = Matrix([[1], [0]])
    ustar = [Matrix([[1, 0]])]
    gamma = FunPair(src, tgt, u, ustar, equivariant=False, name="G")
    # it is a valid pair non-equivariantly but not equivariantly
    assert check_functional_hom(gamma) == []
    assert decide_functional_extension(gamma).yes
    amp = amplify_nonequivariant(gamma)
    assert check_functional_hom(amp) == []
    assert decide_functional_extension(amp).yes
    for h in range(2):
        assert amp.u * amp.source.gaction[h] == amp.target.gaction[h] * amp.u


def test_amplify_composed_with_average():
    q2 = rationals(cyclic_group(2))
    src = standard_module(q2, 1, cfactor=[Matrix.identity(1), Matrix([[-1]])])
    tgt = standard_module(q2, 2)
    gamma = FunPair(src, tgt, Matrix([[1], [0]]), [Matrix([[1, 0]])],
                    equivariant=False)
    avg = average_extension(src)
    amp = amplify_nonequivariant(gamma)
    comp = funpair_compose(amp, avg.pair)
    assert check_functional_hom(comp) == []
    assert decide_functional_extension(comp).yes


def test_plain_extension_trivial_group():
    q = rationals()
    e = standard_module(q, 2)
    res = plain_module_extension(e)
    assert res.pi_pair.u == Matrix.identity(2)
    assert res.composite_is_first_inclusion()


def test_plain_extension_sign_action():
    # Q with G = Z/2 acting by a sign on the module coordinate
    q2 = rationals(cyclic_group(2))
    e = standard_module(q2, 1, gaction=[Matrix.identity(1), Matrix([[-1]])])
    res = plain_module_extension(e)
    assert check_functional_hom(res.pi_pair) == []
    assert decide_functional_extension(res.pi_pair).yes
    assert check_functional_hom(res.v_pair) == []
    assert res.composite_is_first_inclusion()


def test_plain_extension_w_equivariance():
    a = group_algebra_z2_sign()
    swap = Matrix([[0, 1], [1, 0]])
    e = standard_module(a, 2, gaction=[Matrix.identity(4),
                                       swap.kron(a.action[1])])
    res = plain_module_extension(e)
    t1, w = res.target_standard, res.w_pair
    for h in range(a.group.order):
        assert w.u * t1.gaction[h] == w.target.gaction[h] * w.u
    assert check_functional_hom(res.w_pair) == []


def test_slot_rotation_properties():
    res = plain_module_extension(standard_module(
        rationals(cyclic_group(2)), 1,
        gaction=[Matrix.identity(1), Matrix([[-1]])]))
    x = res.x_mat
    m = x.n
    assert x.rows[0] == tuple([Fraction(1, m)] * m)
    assert x.apply((1,) * m) == tuple(unit_vec(m, 0))
    # mu = X tau X^-1 is an action conjugate to the shift
    from fmlab.exactkernel import inverse
    from fmlab.equiv import _shift_perm
    grp = cyclic_group(2)
    for h, mu in enumerate(res.mu):
        assert mu == x * _shift_perm(grp, h) * inverse(x)
    assert res.mu[0] == Matrix.identity(m)


def _conjugation_action(a, n, gamma):
    """Abstract matrix-algebra action induced by conjugating with gamma."""
    e = standard_module(a, n, gaction=gamma)
    return [m for m in matrix_iso(e).matrix_side.action]


def test_corner51_canonical_action():
    q2 = rationals(cyclic_group(2))
    gamma = [Matrix.identity(2), Matrix.identity(2)]
    wit = corner51_witness(q2, 2, _conjugation_action(q2, 2, gamma))
    assert wit.ok()
    assert wit.identities["fx_is_canonical_corner"]


def test_corner51_sign_action_invertible_grade():
    q2 = rationals(cyclic_group(2))
    gamma = [Matrix.identity(2), Matrix([[-1, 0], [0, 1]])]
    wit = corner51_witness(q2, 2, _conjugation_action(q2, 2, gamma))
    assert wit.ok()
    assert wit.invertibility is not None and wit.invertibility.ok()


def test_corner51_conjugated_action():
    # conjugate the split block by a module automorphism: still certified
    q2 = rationals(cyclic_group(2))
    w = Matrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    from fmlab.exactkernel import inverse
    base = [Matrix.identity(3),
            Matrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]])]
    gamma = [w * g * inverse(w) for g in base]
    wit = corner51_witness(q2, 3, _conjugation_action(q2, 3, gamma))
    assert wit.ok()
    assert wit.homotopy.ok()


def test_corner51_group_algebra():
    a = group_algebra_z2_sign()
    gamma = [Matrix.identity(4),
             Matrix.block_diag([a.action[1].scale(-1), a.action[1]])]
    wit = corner51_witness(a, 2, _conjugation_action(a, 2, gamma))
    assert wit.ok()


def test_corner51_rejects_noninvariant_column():
    # a permutation swapping the two columns does not preserve the first one
    q2 = rationals(cyclic_group(2))
    e = standard_module(q2, 2)
    swap_cols = []
    for idx in range(4):
        i, j = divmod(idx, 2)
        swap_cols.append(tuple(unit_vec(4, i * 2 + (1 - j))))
    swap_action = Matrix.from_cols(swap_cols)
    with pytest.raises(ValueError):
        corner51_witness(q2, 2, [Matrix.identity(4), swap_action])
