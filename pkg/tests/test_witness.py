import json

import pytest

from fmlab.exactkernel import Matrix
from fmlab.fmod import standard_module, zero_module
from fmlab.galgebra import (cyclic_group, group_algebra_z2_sign, rationals,
                            row_algebra)
from fmlab.funext import FunPair, identity_pair
from fmlab.suite import acceptance_term_env, coordinate_inclusion_pair
from fmlab.witness import (ClassCError, ClosureTerm, certify_class_c,
                           rotation_path, verify_prop22)


def test_rotation_corner_swap():
    src = [Matrix([[0, 0], [0, 1]]).vec()]
    tgt = [Matrix([[1, 0], [0, 0]]).vec()]
    rp = rotation_path(src, tgt, 2, 1, ("block", 1),
                       source_structure=[[[1]]])
    assert rp.ok()


def test_rotation_constant_path():
    # a map commuting with the rotation stays constant along the path
    src = [Matrix.identity(2).vec()]
    rp = rotation_path(src, src, 2, 1, ("plane", 0, 1),
                       source_structure=[[[1]]])
    assert rp.ok()


def test_rotation_detects_wrong_target():
    src = [Matrix([[0, 0], [0, 1]]).vec()]
    bad = [Matrix([[0, 0], [0, 1]]).vec()]
    rp = rotation_path(src, bad, 2, 1, ("block", 1))
    assert not rp.checks["end_endpoint"]


def test_prop22_rationals_identity():
    cert = verify_prop22(identity_pair(standard_module(rationals(), 1)))
    assert cert.ok()
    assert cert.identities["f_after_e_equals_h"]
    assert cert.identities["phi_after_z_equals_x_E_f"]


def test_prop22_degenerate():
    q = rationals()
    v = FunPair(zero_module(q), standard_module(q, 0), Matrix.zeros(0, 0), [])
    cert = verify_prop22(v)
    assert cert.ok()


def test_prop22_equivariant_group_algebra():
    a = group_algebra_z2_sign()
    cert = verify_prop22(identity_pair(standard_module(a, 1)))
    assert cert.ok()
    # 2n+2 = 4 copies appear in the block structure
    assert cert.n == 1


def test_prop22_inclusion():
    cert = verify_prop22(coordinate_inclusion_pair(rationals(), 1, 2))
    assert cert.ok()


def test_prop22_refuses_non_extension():
    from fmlab.suite import row_algebra_no_instance
    with pytest.raises(ValueError):
        verify_prop22(row_algebra_no_instance())


def test_class_c_leaf():
    env = {"algebras": {"B": group_algebra_z2_sign()}, "homs": {},
           "actions": {}}
    cert = certify_class_c(ClosureTerm("plain", algebra="B", n=1), env)
    doc = cert.to_doc()
    assert doc["certificate"]["kind"] == "plain"
    assert doc["certificate"]["cofull_module"]
    assert doc["certificate"]["k_unit"]
    assert all(doc["certificate"]["corner_invertibility"]["identities"]
               .values())


def test_class_c_leaf_arbitrary_action():
    q2 = rationals(cyclic_group(2))
    env = {"algebras": {"Q": q2}, "homs": {},
           "actions": {"sgn": ("gaction",
                               [Matrix.identity(1), Matrix([[-1]])])}}
    cert = certify_class_c(
        ClosureTerm("plain", algebra="Q", n=1, action="sgn"), env)
    assert cert.to_doc()["certificate"]["extension"]["target_n"] == 2


def test_class_c_rejects_unitless_leaf():
    env = {"algebras": {"R": row_algebra()}, "homs": {}, "actions": {}}
    with pytest.raises(ClassCError):
        certify_class_c(ClosureTerm("plain", algebra="R", n=1), env)


def test_class_c_internal_tensor():
    from fmlab.galgebra import augmentation_hom, group_algebra
    z2 = cyclic_group(2)
    a0 = group_algebra(z2, z2)
    env = {"algebras": {"A": a0},
           "homs": {"aug": augmentation_hom(a0, rationals(z2))},
           "actions": {}}
    term = ClosureTerm("internal_tensor",
                       children=(ClosureTerm("plain", algebra="A", n=1),),
                       hom="aug")
    cert = certify_class_c(term, env)
    node = cert.to_doc()["certificate"]
    assert node["kind"] == "internal_tensor"
    assert node["details"]["unit_transfer"]["two"]


def test_class_c_acceptance_term_deterministic():
    term, env = acceptance_term_env()
    roundtrip = ClosureTerm.from_doc(term.to_doc())
    assert roundtrip.to_doc() == term.to_doc()


def test_class_c_term_json_roundtrip():
    term, _ = acceptance_term_env()
    doc = term.to_doc()
    again = ClosureTerm.from_doc(json.loads(json.dumps(doc)))
    assert again.to_doc() == doc
