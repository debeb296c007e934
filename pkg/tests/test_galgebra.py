import pytest

from fmlab.exactkernel import Matrix, unit_vec
from fmlab.galgebra import (algebra_hom_from_images,
                            augmentation_hom, check_hom, check_quadratik,
                            column_algebra, compose_hom, cyclic_group,
                            dual_numbers, epsilon_algebra, find_unit,
                            group_algebra, group_algebra_conj,
                            group_algebra_z2_sign, identity_hom,
                            m2_with_sign_action, matrix_algebra,
                            matrix_algebra_over, multiplication_hom,
                            product_qq, rationals, row_algebra,
                            symmetric_group_3, tensor_algebra, trivial_group,
                            upper_triangular_2, validate_algebra)


def test_group_constructions():
    z3 = cyclic_group(3)
    assert z3.identity == 0
    assert z3.mul(1, 2) == 0
    assert z3.inv(1) == 2
    s3 = symmetric_group_3()
    assert s3.order == 6
    assert all(s3.mul(g, s3.inv(g)) == s3.identity for g in range(6))


def test_bad_cayley_rejected():
    with pytest.raises(ValueError):
        # row [0,0] breaks the group axioms
        from fmlab.galgebra import FinGroup
        FinGroup([[0, 0], [1, 0]])


def test_validate_rationals():
    assert validate_algebra(rationals()) == []


def test_validate_group_algebra_sign_action():
    a = group_algebra_z2_sign()
    assert validate_algebra(a) == []


def test_validate_catches_nonassociative():
    from fmlab.galgebra import Algebra
    # b1*b1 = b2, b2*b2 = b1 is not associative
    st = [[[0, 1], [0, 0]], [[0, 0], [1, 0]]]
    a = Algebra(2, st, trivial_group())
    errs = validate_algebra(a)
    assert errs and "associativity" in errs[0]


def test_validate_catches_bad_action():
    from fmlab.galgebra import Algebra
    z2 = cyclic_group(2)
    # map u -> 2u is invertible but not multiplicative on Q[Z/2]
    bad = Matrix([[1, 0], [0, 2]])
    a = group_algebra(z2, z2, [Matrix.identity(2), bad])
    errs = validate_algebra(a)
    assert any("multiplicative" in e or "homomorphism" in e for e in errs)


def test_quadratik():
    assert check_quadratik(group_algebra(cyclic_group(2)))
    assert not check_quadratik(epsilon_algebra())
    assert check_quadratik(matrix_algebra(2))
    assert check_quadratik(row_algebra())
    assert check_quadratik(column_algebra())


def test_find_unit_sides():
    ga = group_algebra(cyclic_group(2))
    assert find_unit(ga, "two") == (1, 0)
    assert find_unit(epsilon_algebra(), "left") is None
    assert find_unit(epsilon_algebra(), "right") is None
    assert find_unit(epsilon_algebra(), "two") is None
    col = column_algebra()
    # col algebra: a*p = a for all a, but u*a = a has no solution
    assert find_unit(col, "right") == (1, 0)
    assert find_unit(col, "left") is None
    row = row_algebra()
    assert find_unit(row, "left") == (1, 0)
    assert find_unit(row, "right") is None


def test_unit_reverified_on_basis():
    for alg in [rationals(), group_algebra_z2_sign(), matrix_algebra(2),
                dual_numbers(), upper_triangular_2(), product_qq(swap=True)]:
        u = find_unit(alg, "two")
        assert u is not None
        for i in range(alg.dim):
            e = unit_vec(alg.dim, i)
            assert alg.mult(u, e) == e
            assert alg.mult(e, u) == e


def test_two_sided_unit_implies_quadratik():
    for alg in [rationals(), group_algebra_z2_sign(), matrix_algebra(2),
                dual_numbers(), upper_triangular_2()]:
        if find_unit(alg, "two") is not None:
            assert check_quadratik(alg)


def test_infeasible_unit_certificate():
    # a solver witness re-proves infeasibility: lam.M = 0 while lam.rhs = 1
    from fmlab.galgebra import _unit_system, unit_infeasibility_witness
    for alg, side in [(epsilon_algebra(), "two"), (column_algebra(), "left"),
                      (row_algebra(), "right")]:
        lam = unit_infeasibility_witness(alg, side)
        assert lam is not None
        mat, rhs = _unit_system(alg, side)
        prod = Matrix([lam]) * mat
        assert prod.is_zero()
        assert sum(c * x for c, x in zip(lam, rhs)) == 1
    assert unit_infeasibility_witness(rationals(), "two") is None


def test_check_hom_identity_and_augmentation():
    ga = group_algebra(cyclic_group(2))
    assert check_hom(identity_hom(ga)) == []
    aug = augmentation_hom(ga, rationals())
    assert check_hom(aug) == []


def test_check_hom_failure():
    ga = group_algebra(cyclic_group(2))
    bad = algebra_hom_from_images(ga, rationals(), [(1,), (2,)])
    errs = check_hom(bad)
    assert any("multiplicativity" in e and "(1,1)" in e for e in errs)


def test_compose_hom():
    ga = group_algebra(cyclic_group(2))
    aug = augmentation_hom(ga, rationals())
    c = compose_hom(identity_hom(rationals()), aug)
    assert check_hom(c) == []
    assert c.apply((1, 1)) == (2,)


def test_group_algebra_conjugation_action():
    a = group_algebra_conj(symmetric_group_3())
    assert validate_algebra(a) == []


def test_m2_sign_action_valid():
    assert validate_algebra(m2_with_sign_action()) == []


def test_matrix_algebra_over():
    ga = group_algebra_z2_sign()
    m2a = matrix_algebra_over(ga, 2)
    assert m2a.dim == 8
    assert validate_algebra(m2a) == []
    assert find_unit(m2a, "two") is not None


def test_tensor_algebra():
    ga = group_algebra_z2_sign()
    t = tensor_algebra(ga, ga)
    assert t.dim == 4
    assert validate_algebra(t) == []
    m = multiplication_hom(t, ga)
    assert check_hom(m) == []
