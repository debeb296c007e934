"""Command line: validate instances, construct artifacts, verify lemma
instances into certificates, and run the seeded suite.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 check failed.
Certificates embed the instance they were produced from, so validating a
certificate re-runs its verifier and compares reports byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import serialize
from .galgebra import check_hom, validate_algebra
from .fmod import validate_module
from .funext import check_functional_hom
from .serialize import (InstanceError, InstanceFile, canonical_json,
                        digest_ok, instance_from_json, save_json,
                        with_digest)
from .suite import LEMMA_IDS, run_suite, summary_text

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_CHECK = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(EXIT_USAGE)


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InstanceError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise InstanceError("%s is not valid JSON: %s" % (path, exc))


def _validate_instance(inst: InstanceFile):
    problems = []
    for name, alg in inst.algebras.items():
        errs = validate_algebra(alg)
        problems += ["algebra %s: %s" % (name, e) for e in errs[:3]]
    for name, (hom, _, _) in inst.homs.items():
        errs = check_hom(hom)
        problems += ["hom %s: %s" % (name, e) for e in errs[:3]]
    for name, (mod, _) in inst.modules.items():
        errs = validate_module(mod)
        problems += ["module %s: %s" % (name, e) for e in errs[:3]]
    for name, (pair, _, _) in inst.funpairs.items():
        errs = check_functional_hom(pair)
        problems += ["funpair %s: %s" % (name, e) for e in errs[:3]]
    return problems


def _validate_certificate(doc):
    if not digest_ok(doc):
        return ["digest mismatch"]
    lemma = doc.get("lemma")
    if lemma not in LEMMA_IDS:
        return ["unknown lemma id %r" % lemma]
    inst = instance_from_json(doc.get("instance", {}))
    try:
        args = _resolve_request(lemma, doc.get("request", {}), inst)
        from .suite import _VERIFIERS
        report = _VERIFIERS[lemma](args)
    except (ValueError, AssertionError) as exc:
        return ["re-verification failed to run: %s" % exc]
    if canonical_json(report) != canonical_json(doc.get("report")):
        return ["re-verification report differs from the stored one"]
    if not report.get("pass"):
        return ["stored report does not pass"]
    return []


def cmd_validate(paths) -> int:
    worst = EXIT_OK
    for path in paths:
        try:
            doc = _load(path)
            if "lemma" in doc and "report" in doc:
                problems = _validate_certificate(doc)
            else:
                problems = _validate_instance(instance_from_json(doc))
        except InstanceError as exc:
            print("%s: parse error: %s" % (path, exc))
            worst = max(worst, EXIT_PARSE)
            continue
        if problems:
            for p in problems:
                print("%s: %s" % (path, p))
            worst = max(worst, EXIT_CHECK)
        else:
            print("%s: ok" % path)
    return worst


def _unique(d, kind):
    if len(d) != 1:
        raise InstanceError("need exactly one %s or an explicit request" % kind)
    return next(iter(d))


def _resolve_request(lemma, request, inst: InstanceFile):
    mods = {k: m for k, (m, _) in inst.modules.items()}
    pairs = {k: p for k, (p, _, _) in inst.funpairs.items()}
    homs = {k: h for k, (h, _, _) in inst.homs.items()}
    if lemma in ("def31", "def32", "lemma31", "prop22"):
        key = request.get("funpair") or _unique(pairs, "funpair")
        return (pairs[key],)
    if lemma == "lem22":
        keys = request.get("funpairs") or sorted(pairs)
        return ([pairs[k] for k in keys],)
    if lemma == "lemma41":
        pk = request.get("funpair") or _unique(pairs, "funpair")
        hk = request.get("hom") or _unique(homs, "hom")
        return (pairs[pk], homs[hk])
    if lemma == "lemma42":
        mk = request.get("module") or _unique(mods, "module")
        hk = request.get("hom") or _unique(homs, "hom")
        return (mods[mk], homs[hk])
    if lemma == "lemma51":
        mk = request.get("module") or _unique(mods, "module")
        pk = request.get("funpair") or _unique(pairs, "funpair")
        return (mods[mk], pairs[pk], int(request.get("fiber_count", 1)))
    if lemma in ("lemma61", "lemma62"):
        mk = request.get("module") or _unique(mods, "module")
        return (mods[mk],)
    if lemma == "cor51":
        ak = request.get("algebra") or _unique(inst.algebras, "algebra")
        n = int(request.get("n", 2))
        act_key = request.get("action") or _unique(inst.actions, "action")
        kind, mats = inst.actions[act_key]
        if kind != "matrix_action":
            raise InstanceError("cor51 needs a matrix_action spec")
        return (inst.algebras[ak], n, mats)
    if lemma == "thm71":
        tk = request.get("term") or _unique(inst.terms, "term")
        return (inst.terms[tk], inst.env())
    raise InstanceError("unknown lemma id %r" % lemma)


def cmd_verify(lemma, path, out) -> int:
    doc = _load(path)
    inst = instance_from_json(doc)
    request = doc.get("request", {}).get(lemma, doc.get("request", {}))
    args = _resolve_request(lemma, request, inst)
    from .suite import _VERIFIERS
    try:
        report = _VERIFIERS[lemma](args)
    except (ValueError, AssertionError) as exc:
        print("verification failed to run: %s" % exc)
        return EXIT_CHECK
    cert = {
        "format_version": serialize.FORMAT_VERSION,
        "lemma": lemma,
        "instance": {k: v for k, v in doc.items() if k != "request"},
        "request": request,
        "report": report,
    }
    cert = with_digest(cert)
    if out:
        save_json(out, cert)
        print("certificate written to %s" % out)
    if not report.get("pass"):
        print("check failed: %s" % json.dumps(
            {k: v for k, v in report.items() if k != "certificate"},
            sort_keys=True)[:400])
        return EXIT_CHECK
    print("%s: pass" % lemma)
    return EXIT_OK


_CONSTRUCT_OPS = ("standard_module", "direct_sum", "external_tensor",
                  "internal_tensor", "kalgebra", "corner_embedding")


def cmd_construct(op, path, args_json, out) -> int:
    from .fmod import (direct_sum, external_tensor, internal_tensor,
                       standard_module)
    from .kops import corner_embedding, kalgebra
    doc = _load(path) if path else {}
    inst = instance_from_json(doc) if doc else InstanceFile()
    args = json.loads(args_json) if args_json else {}
    mods = {k: m for k, (m, _) in inst.modules.items()}
    algmap = {k: a for k, a in inst.algebras.items()}
    mod_alg = {k: a for k, (_, a) in inst.modules.items()}
    if op == "standard_module":
        a = algmap[args["algebra"]]
        mod = standard_module(a, int(args["n"]))
        result = serialize.module_to_json(mod, args["algebra"])
    elif op == "direct_sum":
        names = args["modules"]
        mod = direct_sum([mods[k] for k in names])
        result = serialize.module_to_json(mod, mod_alg[names[0]])
    elif op == "external_tensor":
        m1, m2 = mods[args["modules"][0]], mods[args["modules"][1]]
        mod, alg = external_tensor(m1, m2)
        result = {"algebra": serialize.algebra_to_json(alg),
                  "module": serialize.module_to_json(mod, "tensor")}
    elif op == "internal_tensor":
        mod = mods[args["module"]]
        hom = inst.homs[args["hom"]][0]
        it, _ = internal_tensor(mod, hom)
        result = serialize.module_to_json(it, inst.homs[args["hom"]][2])
    elif op == "kalgebra":
        k = kalgebra(mods[args["module"]])
        result = serialize.kalgebra_to_json(k, args["module"])
    elif op == "corner_embedding":
        hom, k, eb = corner_embedding(mods[args["module"]])
        result = {
            "compact_algebra": serialize.kalgebra_to_json(k, args["module"]),
            "hom_matrix": serialize.mat_to_json(hom.matrix),
        }
    else:
        raise InstanceError("unknown construct op %r" % op)
    payload = with_digest({"format_version": serialize.FORMAT_VERSION,
                           "op": op, "result": result})
    if out:
        save_json(out, payload)
        print("artifact written to %s" % out)
    else:
        print(json.dumps(payload, sort_keys=True, indent=1))
    return EXIT_OK


def cmd_suite(seed, size) -> int:
    threads = int(os.environ.get("FMLAB_THREADS", "1") or "1")
    summary = run_suite(seed, size, threads=threads)
    sys.stdout.write(summary_text(summary))
    total = sum(r["instances"] for r in summary["results"].values())
    passed = sum(r["passed"] for r in summary["results"].values())
    return EXIT_OK if total == passed else EXIT_CHECK


def main(argv=None) -> int:
    parser = _Parser(prog="fmlab", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p_val = sub.add_parser("validate", help="validate instance or "
                                            "certificate files")
    p_val.add_argument("files", nargs="+")

    p_con = sub.add_parser("construct", help="build an artifact")
    p_con.add_argument("op", choices=_CONSTRUCT_OPS)
    p_con.add_argument("--in", dest="path", default=None,
                       help="instance file with the referenced objects")
    p_con.add_argument("--args", default=None, help="JSON arguments")
    p_con.add_argument("-o", "--out", default=None)

    p_ver = sub.add_parser("verify", help="verify a lemma instance")
    p_ver.add_argument("lemma", choices=LEMMA_IDS)
    p_ver.add_argument("instance")
    p_ver.add_argument("-o", "--out", default=None)

    p_sui = sub.add_parser("suite", help="run the seeded verification suite")
    p_sui.add_argument("--seed", type=int, default=42)
    p_sui.add_argument("--size", choices=("smoke", "standard", "deep"),
                       default="standard")

    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "validate":
            return cmd_validate(args.files)
        if args.command == "construct":
            return cmd_construct(args.op, args.path, args.args, args.out)
        if args.command == "verify":
            return cmd_verify(args.lemma, args.instance, args.out)
        if args.command == "suite":
            return cmd_suite(args.seed, args.size)
    except InstanceError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, AssertionError) as exc:
        print("check failed: %s" % exc, file=sys.stderr)
        return EXIT_CHECK
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
