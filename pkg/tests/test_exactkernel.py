import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from fmlab.exactkernel import (Matrix, RotScalar, Subspace, express_in_list,
                               inverse, kernel_basis, parse_rat, quotient,
                               rank, rat, rat_str, rot_eval, rot_reduce,
                               saturate, solve_linear, span)


def test_rat_roundtrip():
    assert rat_str(rat(3)) == "3"
    assert rat_str(rat(5, 2)) == "5/2"
    assert parse_rat("5/2") == Fraction(5, 2)
    assert parse_rat("-7") == -7
    assert rat(4, 2) == 2 and isinstance(rat(4, 2), int)


def test_solve_identity():
    a = Matrix.identity(2)
    assert solve_linear(a, (3, rat(5, 2))) == (3, rat(5, 2))


def test_solve_inconsistent():
    a = Matrix([[1, 1], [2, 2]])
    assert solve_linear(a, (1, 3)) is None


def test_solve_rank_deficient_consistent():
    a = Matrix([[1, 1], [2, 2]])
    x = solve_linear(a, (1, 2))
    assert x is not None
    assert x[0] + x[1] == 1


def test_solve_random_consistent_systems():
    rng = random.Random(7)
    for _ in range(200):
        m = rng.randrange(1, 13)
        n = rng.randrange(1, 13)
        a = Matrix([[rat(rng.randrange(-4, 5), rng.randrange(1, 4))
                     for _ in range(n)] for _ in range(m)])
        x0 = tuple(rat(rng.randrange(-4, 5)) for _ in range(n))
        b = a.apply(x0)
        x = solve_linear(a, b)
        assert x is not None
        assert a.apply(x) == b


def test_kernel_and_rank():
    a = Matrix([[1, 1], [2, 2]])
    assert rank(a) == 1
    (k,) = kernel_basis(a)
    assert a.apply(k) == (0, 0)


def test_inverse():
    a = Matrix([[1, 2], [3, 4]])
    ai = inverse(a)
    assert ai * a == Matrix.identity(2)
    assert inverse(Matrix([[1, 1], [1, 1]])) is None


def test_span_member():
    s = span([(1, 0), (0, 1)], 2)
    assert s.member((2, 3))
    assert span([(1, 2)], 2).member((2, 4))
    assert not span([(1, 2)], 2).member((1, 0))


def test_span_canonical():
    s1 = span([(2, 4), (1, 3)], 2)
    s2 = span([(1, 0), (0, 1)], 2)
    assert s1 == s2


def test_quotient_projection_section():
    amb = Subspace.full(2)
    rel = span([(1, 1)], 2)
    comp, proj, sec = quotient(amb, rel)
    assert comp.dim == 1
    assert proj * sec == Matrix.identity(1)
    # section(projection(v)) = v modulo rel
    for v in [(1, 0), (0, 1), (3, -2)]:
        w = sec.apply(proj.apply(v))
        assert rel.member(tuple(a - b for a, b in zip(w, v)))


def test_quotient_inside_proper_ambient():
    amb = span([(1, 0, 0), (0, 1, 1)], 3)
    rel = span([(1, 0, 0)], 3)
    comp, proj, sec = quotient(amb, rel)
    assert comp.dim == 1
    assert proj * sec == Matrix.identity(1)


def test_express_in_list():
    assert express_in_list([(1, 0), (1, 1)], (3, 2)) == (1, 2)
    assert express_in_list([(1, 0)], (0, 1)) is None


def test_saturate():
    op = Matrix([[0, 1], [1, 0]])
    kept, sub = saturate([(1, 0)], [op], 2)
    assert sub.dim == 2
    assert kept[0] == (1, 0)


def test_matrix_block_helpers():
    a = Matrix([[1, 2]])
    b = Matrix([[3], [4]])
    d = Matrix.block_diag([a, b])
    assert d.m == 3 and d.n == 3
    assert d.rows[0] == (1, 2, 0)
    assert d.rows[2] == (0, 0, 4)
    k = Matrix.identity(2).kron(Matrix([[5]]))
    assert k == Matrix([[5, 0], [0, 5]])


def test_empty_matrices():
    z = Matrix([], n=3)
    assert z.m == 0 and z.n == 3
    zz = Matrix.zeros(0, 2) * Matrix.zeros(2, 4)
    assert zz.m == 0 and zz.n == 4
    assert rank(Matrix.zeros(2, 0)) == 0


def test_rot_defining_relation():
    x = rot_reduce({(0, 2): 1})  # s^2
    assert x == rot_reduce({(0, 0): 1, (2, 0): -1})  # 1 - c^2
    assert rot_eval(rot_reduce({(2, 0): 1, (0, 2): 1}), "start") == 1
    assert rot_eval(rot_reduce({(2, 0): 1, (0, 2): 1}), "end") == 1


def test_rot_s_cubed():
    # s^3 reduces to s*(1 - c^2)
    x = rot_reduce({(0, 3): 1})
    assert x.a == ()
    assert x.b == (1, 0, -1)


def test_rot_eval_endpoints():
    c, s = RotScalar.c(), RotScalar.s()
    x = c * c + s * s
    assert rot_eval(x, "start") == 1 and rot_eval(x, "end") == 1
    assert rot_eval(c, "start") == 1 and rot_eval(c, "end") == 0
    assert rot_eval(s, "start") == 0 and rot_eval(s, "end") == 1


def test_rotation_double_angle_identity():
    # composing the rotation with itself gives the double-angle entries,
    # identically in the quotient ring
    c, s = RotScalar.c(), RotScalar.s()
    double_c = c * c - s * s
    assert double_c == 2 * (c * c) - 1
    assert rot_eval(double_c, "start") == 1
    assert rot_eval(double_c, "end") == -1
    assert rot_eval(2 * (c * s), "start") == 0


def test_infeasibility_certificate():
    from fmlab.exactkernel import infeasibility_certificate
    a = Matrix([[1, 1], [2, 2]])
    lam = infeasibility_certificate(a, (1, 3))
    assert lam is not None
    assert (Matrix([lam]) * a).is_zero()
    assert sum(c * b for c, b in zip(lam, (1, 3))) == 1
    assert infeasibility_certificate(a, (1, 2)) is None


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3),
                          st.integers(-3, 3)), max_size=5),
       st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3),
                          st.integers(-3, 3)), max_size=5))
def test_rot_reduce_is_multiplicative(tx, ty):
    def to_terms(t):
        d = {}
        for i, j, cf in t:
            d[(i, j)] = d.get((i, j), 0) + cf
        return d

    def mul_terms(a, b):
        out = {}
        for (i, j), ca in a.items():
            for (k, l), cb in b.items():
                key = (i + k, j + l)
                out[key] = out.get(key, 0) + ca * cb
        return out

    a, b = to_terms(tx), to_terms(ty)
    direct = rot_reduce(mul_terms(a, b))
    reduced = rot_reduce(a) * rot_reduce(b)
    assert direct == reduced
