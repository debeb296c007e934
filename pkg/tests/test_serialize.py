import json

from fmlab.exactkernel import Matrix, RotScalar, rat
from fmlab.galgebra import group_algebra_z2_sign, identity_hom
from fmlab.fmod import standard_module
from fmlab.funext import (check_functional_hom, decide_functional_extension,
                          identity_pair)
from fmlab.serialize import (InstanceFile, algebra_from_json, algebra_to_json,
                             canonical_json, digest_ok, funpair_to_json,
                             instance_from_json, instance_to_json,
                             mat_from_json, mat_to_json, rotscalar_from_json,
                             rotscalar_to_json, with_digest)


def test_matrix_roundtrip():
    m = Matrix([[rat(1, 2), -3], [0, rat(7, 5)]])
    assert mat_from_json(json.loads(json.dumps(mat_to_json(m)))) == m
    z = Matrix([], n=4)
    assert mat_from_json(mat_to_json(z)).n == 4


def test_rotscalar_roundtrip():
    x = RotScalar((rat(1, 3), 2), (0, -1))
    doc = json.loads(json.dumps(rotscalar_to_json(x)))
    assert rotscalar_from_json(doc) == x


def test_algebra_roundtrip():
    a = group_algebra_z2_sign()
    b = algebra_from_json(json.loads(json.dumps(algebra_to_json(a))))
    assert b.dim == a.dim
    assert b.structure == a.structure
    assert b.action == a.action
    assert b.group.cayley == a.group.cayley


def test_funpair_certificate_flags():
    a = group_algebra_z2_sign()
    p = identity_pair(standard_module(a, 1))
    doc = funpair_to_json(p, "E", "E")
    assert doc["certificates"] == {}
    check_functional_hom(p)
    decide_functional_extension(p)
    doc = funpair_to_json(p, "E", "E")
    assert doc["certificates"] == {"hom_checked": True, "extension": True}


def test_digest_detects_tampering():
    doc = with_digest({"format_version": 1, "payload": [1, 2, 3]})
    assert digest_ok(doc)
    doc["payload"] = [1, 2, 4]
    assert not digest_ok(doc)


def test_instance_roundtrip_with_homs_and_actions():
    a = group_algebra_z2_sign()
    inst = InstanceFile()
    inst.algebras["B"] = a
    inst.homs["id"] = (identity_hom(a), "B", "B")
    inst.modules["E"] = (standard_module(a, 1), "B")
    inst.actions["sgn"] = ("gaction", [Matrix.identity(1), Matrix([[-1]])])
    doc = json.loads(json.dumps(instance_to_json(inst)))
    back = instance_from_json(doc)
    assert back.homs["id"][0].matrix == Matrix.identity(2)
    kind, mats = back.actions["sgn"]
    assert kind == "gaction" and mats[1] == Matrix([[-1]])
    # canonical form is stable under a JSON round trip
    assert canonical_json(instance_to_json(back)) == canonical_json(doc)
