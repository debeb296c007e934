"""JSON schemas for instances and certificates.

All rationals serialize as "p/q" strings ("/q" omitted for integers).
Instance files bundle named groups, algebras, homs, modules, functional
pairs, leaf-action specs and closure terms; references are by name within
the same file.  Certificates are versioned documents with a sha256 digest
over their canonical (sorted, separator-normalized) JSON body.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .exactkernel import Matrix, RotScalar, parse_rat, rat_str
from .galgebra import Algebra, AlgebraHom, FinGroup
from .fmod import FunctionalModule, StandardInfo
from .funext import FunPair
from .kops import CompactAlgebra
from .witness import ClosureTerm

FORMAT_VERSION = 1


def mat_to_json(m: Matrix):
    return {"rows": [[rat_str(x) for x in row] for row in m.rows],
            "cols": m.n}


def mat_from_json(doc) -> Matrix:
    rows = [[parse_rat(x) for x in row] for row in doc["rows"]]
    return Matrix(rows, n=doc["cols"])


def vec_to_json(v):
    return [rat_str(x) for x in v]


def vec_from_json(doc):
    return tuple(parse_rat(x) for x in doc)


def rotscalar_to_json(x: RotScalar):
    return {"a": [rat_str(c) for c in x.a], "b": [rat_str(c) for c in x.b]}


def rotscalar_from_json(doc) -> RotScalar:
    return RotScalar([parse_rat(c) for c in doc["a"]],
                     [parse_rat(c) for c in doc["b"]])


def group_to_json(g: FinGroup):
    return {"order": g.order, "cayley": [list(r) for r in g.cayley]}


def group_from_json(doc) -> FinGroup:
    return FinGroup(doc["cayley"])


def algebra_to_json(a: Algebra):
    return {
        "dim": a.dim,
        "structure": [[[rat_str(x) for x in v] for v in row]
                      for row in a.structure],
        "group": group_to_json(a.group),
        "action": [mat_to_json(m) for m in a.action],
    }


def algebra_from_json(doc, name: str = "A") -> Algebra:
    group = group_from_json(doc["group"])
    structure = [[[parse_rat(x) for x in v] for v in row]
                 for row in doc["structure"]]
    action = [mat_from_json(m) for m in doc["action"]]
    return Algebra(doc["dim"], structure, group, action, name=name)


def hom_to_json(h: AlgebraHom, source: str, target: str):
    return {"source": source, "target": target,
            "matrix": mat_to_json(h.matrix)}


def module_to_json(m: FunctionalModule, algebra: str):
    doc = {
        "algebra": algebra,
        "dim": m.dim,
        "raction": [mat_to_json(x) for x in m.raction],
        "gaction": [mat_to_json(x) for x in m.gaction],
        "functionals": [mat_to_json(x) for x in m.functionals],
    }
    if m.standard is not None:
        doc["standard"] = {"n": m.standard.n}
        if m.standard.cfactor is not None:
            doc["standard"]["cfactor"] = [mat_to_json(x)
                                          for x in m.standard.cfactor]
    return doc


def module_from_json(doc, algebras, name: str = "E") -> FunctionalModule:
    a = algebras[doc["algebra"]]
    std = None
    if "standard" in doc:
        cf = doc["standard"].get("cfactor")
        std = StandardInfo(doc["standard"]["n"],
                           tuple(mat_from_json(x) for x in cf)
                           if cf is not None else None)
    return FunctionalModule(
        a, doc["dim"],
        [mat_from_json(x) for x in doc["raction"]],
        [mat_from_json(x) for x in doc["gaction"]],
        [mat_from_json(x) for x in doc["functionals"]],
        standard=std, name=name)


def funpair_to_json(p: FunPair, source: str, target: str):
    certs = {}
    if p._hom_report is not None:
        certs["hom_checked"] = not p._hom_report
    if p._decision is not None:
        certs["extension"] = p._decision.yes
    return {
        "source": source,
        "target": target,
        "U": mat_to_json(p.u),
        "Ustar": [mat_to_json(x) for x in p.ustar],
        "equivariant": p.equivariant,
        "certificates": certs,
    }


def funpair_from_json(doc, modules, name: str = "U") -> FunPair:
    return FunPair(modules[doc["source"]], modules[doc["target"]],
                   mat_from_json(doc["U"]),
                   [mat_from_json(x) for x in doc["Ustar"]],
                   equivariant=doc.get("equivariant", True), name=name)


def kalgebra_to_json(k: CompactAlgebra, module: str):
    doc = algebra_to_json(k.algebra)
    doc["provenance"] = {
        "module": module,
        "generators": [list(p) for p in k.provenance],
    }
    return doc


def action_spec_to_json(spec):
    kind, mats = spec
    return {"kind": kind, "matrices": [mat_to_json(m) for m in mats]}


def action_spec_from_json(doc):
    return (doc["kind"], [mat_from_json(m) for m in doc["matrices"]])


@dataclass
class InstanceFile:
    """Named collection of objects sharing one file; references resolve by
    name within the file."""
    groups: dict = field(default_factory=dict)
    algebras: dict = field(default_factory=dict)
    homs: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    funpairs: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)

    def env(self) -> dict:
        return {"algebras": self.algebras, "homs": self.homs,
                "actions": self.actions}


def instance_to_json(inst: InstanceFile) -> dict:
    doc = {"format_version": FORMAT_VERSION}
    if inst.groups:
        doc["groups"] = {k: group_to_json(v) for k, v in inst.groups.items()}
    if inst.algebras:
        doc["algebras"] = {k: algebra_to_json(v)
                           for k, v in inst.algebras.items()}
    if inst.homs:
        doc["homs"] = {}
        for k, (h, src, tgt) in inst.homs.items():
            doc["homs"][k] = hom_to_json(h, src, tgt)
    if inst.modules:
        doc["modules"] = {}
        for k, (m, alg) in inst.modules.items():
            doc["modules"][k] = module_to_json(m, alg)
    if inst.funpairs:
        doc["funpairs"] = {}
        for k, (p, src, tgt) in inst.funpairs.items():
            doc["funpairs"][k] = funpair_to_json(p, src, tgt)
    if inst.actions:
        doc["actions"] = {k: action_spec_to_json(v)
                          for k, v in inst.actions.items()}
    if inst.terms:
        doc["terms"] = {k: v.to_doc() for k, v in inst.terms.items()}
    return doc


class InstanceError(ValueError):
    """Unresolvable reference or malformed instance document."""


def instance_from_json(doc) -> InstanceFile:
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be an object")
    if doc.get("format_version", FORMAT_VERSION) != FORMAT_VERSION:
        raise InstanceError("unsupported format version")
    inst = InstanceFile()
    try:
        for k, g in doc.get("groups", {}).items():
            inst.groups[k] = group_from_json(g)
        for k, a in doc.get("algebras", {}).items():
            inst.algebras[k] = algebra_from_json(a, name=k)
        for k, h in doc.get("homs", {}).items():
            src, tgt = h["source"], h["target"]
            if src not in inst.algebras or tgt not in inst.algebras:
                raise InstanceError("hom %r references unknown algebras" % k)
            inst.homs[k] = (AlgebraHom(inst.algebras[src], inst.algebras[tgt],
                                       mat_from_json(h["matrix"]), name=k),
                            src, tgt)
        for k, m in doc.get("modules", {}).items():
            if m["algebra"] not in inst.algebras:
                raise InstanceError("module %r references unknown algebra" % k)
            inst.modules[k] = (module_from_json(m, inst.algebras, name=k),
                               m["algebra"])
        for k, p in doc.get("funpairs", {}).items():
            mods = {n: mm for n, (mm, _) in inst.modules.items()}
            if p["source"] not in mods or p["target"] not in mods:
                raise InstanceError("funpair %r references unknown modules" % k)
            inst.funpairs[k] = (funpair_from_json(p, mods, name=k),
                                p["source"], p["target"])
        for k, s in doc.get("actions", {}).items():
            inst.actions[k] = action_spec_from_json(s)
        for k, t in doc.get("terms", {}).items():
            inst.terms[k] = ClosureTerm.from_doc(t)
    except InstanceError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError("malformed instance document: %s" % exc)
    return inst


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def with_digest(doc: dict) -> dict:
    body = dict(doc)
    body.pop("digest", None)
    digest = hashlib.sha256(canonical_json(body).encode()).hexdigest()
    body["digest"] = digest
    return body


def digest_ok(doc: dict) -> bool:
    if "digest" not in doc:
        return False
    return with_digest(doc)["digest"] == doc["digest"]


def load_instance(path) -> InstanceFile:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError("not valid JSON: %s" % exc)
    return instance_from_json(doc)


def save_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
