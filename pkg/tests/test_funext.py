import pytest

from fmlab.exactkernel import Matrix, rank, unit_vec
from fmlab.fmod import (FunctionalModule, direct_sum, standard_module,
                        validate_module, zero_module)
from fmlab.galgebra import (augmentation_hom, check_hom, cyclic_group,
                            group_algebra, group_algebra_z2_sign,
                            identity_hom, rationals, row_algebra)
from fmlab.funext import (FunPair, change_coefficients, check_functional_hom,
                          corner_module_composition,
                          decide_functional_extension, funpair_compose,
                          funpair_direct_sum, funpair_external_tensor,
                          identity_pair, induced_compact_hom, iso_pair,
                          summand_inclusion_pair)
from fmlab.kops import kalgebra

from _oracle import oracle_decides_yes


def q_inclusion_pair(k, n):
    """Coordinate inclusion Q^k -> Q^n with U* phi = phi o projection."""
    q = rationals()
    src = standard_module(q, k)
    tgt = standard_module(q, n)
    u = Matrix.vstack([Matrix.identity(k), Matrix.zeros(n - k, k)])
    ustar = [Matrix.hstack([phi, Matrix.zeros(1, n - k)])
             for phi in src.functionals]
    return FunPair(src, tgt, u, ustar, name="inc")


def row_algebra_no_instance():
    """Valid pair over the row algebra that is not a functional extension."""
    a = row_algebra()
    z = Matrix([[0]])
    # E = the span of q inside A, with zero right action
    e = FunctionalModule(a, 1, [z, z], [Matrix.identity(1)],
                         [Matrix([[0], [1]])], name="Qq")
    f = standard_module(a, 1)
    u = Matrix([[0], [1]])
    ustar = [Matrix.identity(2)]
    return FunPair(e, f, u, ustar, name="noext")


def test_identity_pair_valid_and_yes():
    a = group_algebra_z2_sign()
    p = identity_pair(standard_module(a, 2))
    assert check_functional_hom(p) == []
    d = decide_functional_extension(p)
    assert d.yes
    # identity witnesses: xi = eta
    for j, w in enumerate(d.witnesses):
        assert w == unit_vec(4, j)


def test_inclusion_pair_valid_and_yes():
    p = q_inclusion_pair(1, 2)
    assert check_functional_hom(p) == []
    assert decide_functional_extension(p).yes


def test_scaled_ustar_fails_identity():
    p = q_inclusion_pair(1, 2)
    bad = FunPair(p.source, p.target, p.u, [m.scale(2) for m in p.ustar])
    errs = check_functional_hom(bad)
    assert any("defining identity" in e for e in errs)


def test_surjective_is_extension():
    a = group_algebra_z2_sign()
    e = standard_module(a, 2)
    swap = Matrix.block_diag([Matrix.identity(0), Matrix.identity(4)])
    perm = Matrix.from_cols([unit_vec(4, 2), unit_vec(4, 3),
                             unit_vec(4, 0), unit_vec(4, 1)])
    p = iso_pair(e, e, perm)
    assert check_functional_hom(p) == []
    assert decide_functional_extension(p).yes


def test_frozen_no_instance():
    # found by the pre-build search over rank <= 2 modules on dim-2 algebras:
    # over the row algebra the corner vector p cannot be realized from E = Qq
    p = row_algebra_no_instance()
    assert validate_module(p.source) == []
    assert check_functional_hom(p) == []
    d = decide_functional_extension(p)
    assert not d.yes
    assert d.counter_index == 0  # eta = p, the first basis vector
    assert not oracle_decides_yes(p)


def test_oracle_agrees_on_basics():
    for p in [q_inclusion_pair(1, 2), q_inclusion_pair(2, 3),
              identity_pair(standard_module(group_algebra_z2_sign(), 1))]:
        assert decide_functional_extension(p).yes == oracle_decides_yes(p)


def test_direct_sum_pair():
    p = funpair_direct_sum([q_inclusion_pair(1, 2), q_inclusion_pair(1, 1)])
    assert check_functional_hom(p) == []
    assert decide_functional_extension(p).yes


def test_compose_pairs():
    p1 = q_inclusion_pair(1, 2)
    p2 = q_inclusion_pair(2, 3)
    c = funpair_compose(p2, p1)
    assert check_functional_hom(c) == []
    assert decide_functional_extension(c).yes
    assert c.u == Matrix([[1], [0], [0]])


def test_tensor_pairs():
    a = group_algebra_z2_sign()
    p1 = identity_pair(standard_module(a, 1))
    p2 = identity_pair(standard_module(a, 1))
    t, src, tgt = funpair_external_tensor(p1, p2)
    assert check_functional_hom(t) == []
    assert decide_functional_extension(t).yes


def test_summand_inclusion():
    a = group_algebra_z2_sign()
    e = standard_module(a, 1)
    p = summand_inclusion_pair([e, e], 0)
    assert check_functional_hom(p) == []
    assert decide_functional_extension(p).yes


def test_induced_identity():
    a = group_algebra_z2_sign()
    e = standard_module(a, 1)
    h = induced_compact_hom(identity_pair(e))
    assert h.hom.matrix == Matrix.identity(h.source_k.dim)


def test_induced_inclusion_is_corner():
    p = q_inclusion_pair(1, 2)
    h = induced_compact_hom(p)
    assert check_hom(h.hom) == []
    assert not rank(h.hom.matrix) == 0
    # image of the unit of K(Q^1) is the (1,1) matrix unit of K(Q^2) = M_2
    img = h.target_k.realize(h.hom.matrix.col(0))
    assert img == Matrix([[1, 0], [0, 0]])


def test_induced_kernel_zero():
    a = group_algebra_z2_sign()
    e = standard_module(a, 1)
    s = direct_sum([e, e])
    p = summand_inclusion_pair([e, e], 0, total=s)
    h = induced_compact_hom(p)
    assert rank(h.hom.matrix) == h.source_k.dim


def test_induced_refuses_without_extension():
    p = row_algebra_no_instance()
    with pytest.raises(ValueError):
        induced_compact_hom(p)


def test_change_coefficients_identity():
    a0 = group_algebra(cyclic_group(2))
    e = standard_module(a0, 1)
    res = change_coefficients(identity_pair(e), identity_hom(a0))
    assert check_functional_hom(res.pair) == []
    assert decide_functional_extension(res.pair).yes
    assert res.pair.source.dim == e.dim  # unital: E (x)_id A ~ E


def test_change_coefficients_inclusion_shape():
    a0 = group_algebra(cyclic_group(2))
    src = standard_module(a0, 1)
    tgt = standard_module(a0, 2)
    u = Matrix.vstack([Matrix.identity(2), Matrix.zeros(2, 2)])
    ustar = [Matrix.hstack([phi, Matrix.zeros(2, 2)]) for phi in src.functionals]
    p = FunPair(src, tgt, u, ustar, name="incA")
    assert check_functional_hom(p) == []
    aug = augmentation_hom(a0, rationals())
    res = change_coefficients(p, aug)
    assert res.pair.source.dim == 1   # B^1 for B = Q
    assert res.target.dim == 2        # B^2
    assert check_functional_hom(res.pair) == []
    assert decide_functional_extension(res.pair).yes


def test_change_coefficients_augmentation_full_pipeline():
    a0 = group_algebra(cyclic_group(2))
    e = standard_module(a0, 1)
    aug = augmentation_hom(a0, rationals())
    res = change_coefficients(identity_pair(e), aug)
    assert check_functional_hom(res.pair) == []
    assert decide_functional_extension(res.pair).yes


def test_change_coefficients_requires_right_unit():
    a = row_algebra()  # left unit only
    e = standard_module(a, 1)
    with pytest.raises(ValueError):
        change_coefficients(identity_pair(e), identity_hom(a))


def test_corner_composition_zero_module():
    # E = 0, F = K^m standard: F.M_B is the corner column, W certified
    q = rationals()
    e = zero_module(q)
    bstd = standard_module(q, 1)
    eb = direct_sum([e, bstd])
    u = funpair_direct_sum([identity_pair(e), identity_pair(bstd)], source=eb)
    k = kalgebra(eb)
    km = standard_module(k.algebra, 2)
    v = identity_pair(km)
    res = corner_module_composition(e, u, v)
    assert res.corner_module.dim == 2  # B^m
    assert check_functional_hom(res.w_pair) == []
    assert decide_functional_extension(res.w_pair).yes


def test_corner_composition_q_e_q():
    q = rationals()
    e = standard_module(q, 1)
    bstd = standard_module(q, 1)
    eb = direct_sum([e, bstd])
    u = funpair_direct_sum([identity_pair(e), identity_pair(bstd)], source=eb)
    k = kalgebra(eb)
    km = standard_module(k.algebra, 2)
    v = identity_pair(km)
    res = corner_module_composition(e, u, v)
    # dim(F.M_B) = m * (corner column dim) = 2 * 2
    assert res.corner_module.dim == 4
    assert check_functional_hom(res.pi_pair) == []
    assert check_functional_hom(res.sigma_pair) == []
    assert check_functional_hom(res.kappa_pair) == []
    assert check_functional_hom(res.w_pair) == []
    assert decide_functional_extension(res.w_pair).yes
    assert res.w_pair.target.standard.n == 4  # B^{nm}, n=2, m=2


def test_corner_composition_group_algebra():
    b = group_algebra_z2_sign()
    e = standard_module(b, 1)
    bstd = standard_module(b, 1)
    eb = direct_sum([e, bstd])
    u = funpair_direct_sum([identity_pair(e), identity_pair(bstd)], source=eb)
    k = kalgebra(eb)
    km = standard_module(k.algebra, 1)
    v = identity_pair(km)
    res = corner_module_composition(e, u, v)
    assert check_functional_hom(res.w_pair) == []
    assert decide_functional_extension(res.w_pair).yes
