"""Batch command-line front end.

Every command prints one JSON report ``{command, inputs, verdict, values,
details}`` to stdout.  Exit codes: 0 PASS/true, 1 FAIL/false, 2 precondition
or input error, 3 THEOREM-VIOLATION.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Optional

from . import cusp, degen, oracles
from .algmod import AlgebraPresentation, ModulePoint, hom_space, orbit_dim, validate_module
from .exactfield import QQ, FieldSpec, GF, Matrix
from .report import FAIL, PASS, PRECONDITION, REGULAR, VIOLATION, Report

COMMANDS = (
    "validate", "hom", "orbitdim", "exact", "split", "certify", "normalize", "thm2",
    "p1", "p1prime", "p2", "longn", "endo-bimodule", "degenerate", "partition-oracle",
    "search-thm2", "unique",
)
# commands that can run without a problem file
FILELESS = ("partition-oracle", "search-thm2")

TRUE, FALSE = "true", "false"
EXIT = {PASS: 0, REGULAR: 0, TRUE: 0, FAIL: 1, FALSE: 1, PRECONDITION: 2, VIOLATION: 3}


class InputError(Exception):
    """Unresolvable or malformed input; exit code 2."""


# -- problem files ------------------------------------------------------------


def parse_field(obj) -> FieldSpec:
    if obj in (None, "Rational", "Q"):
        return QQ
    if isinstance(obj, dict):
        return FieldSpec(obj.get("kind", "Rational"), obj.get("p"))
    if isinstance(obj, str) and obj.startswith("F_"):
        return GF(int(obj[2:]))
    raise InputError(f"cannot parse field {obj!r}")


def parse_matrix(f: FieldSpec, rows, ncols: Optional[int] = None) -> Matrix:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise InputError("a matrix is a list of rows")
    for r in rows:
        for x in r:
            if not isinstance(x, (str, int)):
                raise InputError(f"matrix entry {x!r} is not a string or integer")
    try:
        return Matrix(f, rows, ncols if not rows else None)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"bad matrix: {e}") from e


class Problem:
    def __init__(self, data: dict):
        if not isinstance(data, dict):
            raise InputError("problem file must hold a JSON object")
        try:
            self.field = parse_field(data.get("field"))
        except ValueError as e:
            raise InputError(str(e)) from e
        alg = data.get("algebra")
        if not isinstance(alg, dict) or "t" not in alg:
            raise InputError("algebra with generator count t is required")
        rels = []
        for rel in alg.get("relations", []):
            rels.append(tuple((c, tuple(w)) for c, w in rel))
        try:
            self.algebra = AlgebraPresentation(self.field, int(alg["t"]), tuple(rels), alg.get("names"))
        except (ValueError, TypeError) as e:
            raise InputError(f"bad algebra: {e}") from e
        self.raw_modules = data.get("modules", {})
        self.raw_maps = data.get("maps", {})
        self.scenarios = data.get("scenarios", {})
        clash = set(self.raw_modules) & set(self.raw_maps) | (set(self.raw_modules) | set(self.raw_maps)) & set(self.scenarios)
        if clash:
            raise InputError(f"names used twice: {sorted(clash)}")

    def module(self, name: str) -> ModulePoint:
        if name not in self.raw_modules:
            raise InputError(f"unknown module {name!r}")
        spec = self.raw_modules[name]
        if isinstance(spec, dict):
            mats, d = spec.get("matrices", []), spec.get("dim")
        else:
            mats, d = spec, None
        ms = [parse_matrix(self.field, m) for m in mats]
        if d is None:
            if not ms:
                raise InputError(f"module {name!r} needs a dim")
            d = ms[0].nrows
        try:
            return ModulePoint(self.algebra, tuple(ms), int(d))
        except ValueError as e:
            raise InputError(f"module {name!r}: {e}") from e

    def map(self, name: str) -> Matrix:
        if name not in self.raw_maps:
            raise InputError(f"unknown map {name!r}")
        spec = self.raw_maps[name]
        if isinstance(spec, dict):
            return parse_matrix(self.field, spec.get("rows", []), spec.get("cols"))
        return parse_matrix(self.field, spec)

    def scenario(self, name: str, kind: Optional[str] = None) -> dict:
        if name not in self.scenarios:
            raise InputError(f"unknown scenario {name!r}")
        sc = self.scenarios[name]
        if kind is not None and sc.get("type") != kind:
            raise InputError(f"scenario {name!r} has type {sc.get('type')!r}, expected {kind!r}")
        return sc

    def _ref(self, sc: dict, key: str) -> str:
        if key not in sc:
            raise InputError(f"scenario field {key!r} missing")
        return sc[key]

    def sequence(self, name: str) -> degen.ShortExactCandidate:
        sc = self.scenarios.get(name)
        if sc is not None and sc.get("type") == "certificate":
            return self.certificate(name).sequence()
        sc = self.scenario(name, "sequence")
        r = lambda k: self._ref(sc, k)  # noqa: E731
        return degen.ShortExactCandidate(
            self.module(r("U")), self.module(r("W")), self.module(r("V")), self.map(r("f")), self.map(r("g"))
        )

    def certificate(self, name: str) -> degen.DegenerationCertificate:
        sc = self.scenario(name, "certificate")
        r = lambda k: self._ref(sc, k)  # noqa: E731
        dual = None
        if "dual" in sc:
            d = sc["dual"]
            dual = (self.module(d["T"]), self.map(d["f"]), self.map(d["g"]))
        return degen.DegenerationCertificate(
            self.module(r("M")), self.module(r("N")), self.module(r("Z")), self.map(r("f")), self.map(r("g")),
            dual=dual,
        )

    def datum(self, name: str) -> degen.SelfExtensionDatum:
        sc = self.scenario(name, "self_extension")
        r = lambda k: self._ref(sc, k)  # noqa: E731
        return degen.SelfExtensionDatum(
            self.module(r("Z")), self.module(r("Y")), self.map(r("ftilde")), self.map(r("gtilde")), self.map(r("htilde"))
        )

    def cusp_module(self, name: str) -> cusp.CuspModule:
        sc = self.scenario(name, "cusp_module")
        return cusp.CuspModule(self.map(self._ref(sc, "A")), self.map(self._ref(sc, "B")), sc.get("side", cusp.LEFT))

    def cusp_bimodule(self, name: str) -> cusp.CuspBimodule:
        sc = self.scenario(name, "cusp_bimodule")
        return cusp.CuspBimodule(*(self.map(self._ref(sc, k)) for k in ("LA", "LB", "RA", "RB")))


def load_problem(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from e
    return Problem(data), hashlib.sha256(raw).hexdigest()


# -- commands -------------------------------------------------------------------


def _need(args, attr: str, flag: str):
    v = getattr(args, attr)
    if v is None or v == []:
        raise InputError(f"missing flag {flag}")
    return v


def _bool_report(value: bool, values=None, details=None) -> Report:
    return Report(TRUE if value else FALSE, values or {}, details or [])


def _one(args, attr, flag):
    v = _need(args, attr, flag)
    return v[0] if isinstance(v, list) else v


def cmd_validate(pb: Problem, args) -> Report:
    return validate_module(pb.module(_need(args, "module", "--module")))


def cmd_hom(pb: Problem, args) -> Report:
    src = pb.module(_need(args, "source", "--from"))
    tgt = pb.module(_need(args, "target", "--to"))
    for m, nm in ((src, "--from"), (tgt, "--to")):
        if not validate_module(m).ok:
            return Report(PRECONDITION, {}, [f"{nm} module violates a relation"])
    H = hom_space(src, tgt)
    return Report(PASS, {"dim": H.dim, "basis": [b.tolist() for b in H.basis]}, [])


def cmd_orbitdim(pb: Problem, args) -> Report:
    m = pb.module(_need(args, "module", "--module"))
    if not validate_module(m).ok:
        return Report(PRECONDITION, {}, ["module violates a relation"])
    return Report(PASS, {"orbit_dim": orbit_dim(m), "d": m.d, "end_dim": hom_space(m, m).dim}, [])


def cmd_exact(pb: Problem, args) -> Report:
    return degen.check_exact(pb.sequence(_one(args, "cert", "--cert")))


def cmd_split(pb: Problem, args) -> Report:
    s = pb.sequence(_one(args, "cert", "--cert"))
    ex = degen.check_exact(s)
    if not ex.ok:
        return Report(PRECONDITION, ex.values, ["sequence not exact: " + ", ".join(ex.details)])
    crit = degen.split_criteria(s)
    if len(set(crit.values())) != 1:
        return Report(VIOLATION, crit, ["splitting criteria disagree"])
    return _bool_report(crit["section"], crit)


def _certify_one(payload):
    path, name = payload
    pb, _ = load_problem(path)
    return name, degen.certify_regularity(pb.certificate(name)).to_json()


def cmd_certify(pb: Problem, args) -> Report:
    names = _need(args, "cert", "--cert")
    if len(names) == 1:
        return degen.certify_regularity(pb.certificate(names[0]))
    for n in names:
        pb.certificate(n)  # resolve names before fanning out
    jobs = max(1, args.jobs)
    payloads = [(args.file, n) for n in names]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = dict(ex.map(_certify_one, payloads))
    else:
        results = dict(map(_certify_one, payloads))
    verdicts = [r["verdict"] for r in results.values()]
    worst = max(verdicts, key=lambda v: (EXIT[v], v))
    return Report(worst, {"results": {n: results[n] for n in names}}, [])


def _cert_json(c: degen.DegenerationCertificate) -> dict:
    return {
        "Z": {"dim": c.Z.d, "matrices": [m.tolist() for m in c.Z.mats]},
        "f": c.f.tolist(),
        "g": c.g.tolist(),
    }


def cmd_normalize(pb: Problem, args) -> Report:
    c = pb.certificate(_one(args, "cert", "--cert"))
    if not degen.check_exact(c.sequence()).ok:
        return Report(PRECONDITION, {}, ["certificate is not exact"])
    if c.M.field.is_prime:
        return Report(PRECONDITION, {}, ["normalization needs characteristic zero"])
    n = degen.normalize_certificate(c)
    return Report(PASS, {"dim_Z_before": c.Z.d, "dim_Z_after": n.Z.d, "certificate": _cert_json(n)}, [])


def cmd_thm2(pb: Problem, args) -> Report:
    s = pb.datum(_need(args, "datum", "--datum"))
    rep = degen.theorem2_gap(s)
    if rep.verdict == PASS:
        try:
            x, y = degen.endo_pair(s)
            rep.values["endo_pair"] = {"x": x.tolist(), "y": y.tolist()}
        except ArithmeticError as e:
            rep.details.append(f"endomorphism pair: {e}")
    return rep


def cmd_p1(pb: Problem, args) -> Report:
    m = pb.cusp_module(_need(args, "module", "--module"))
    if m.side != cusp.LEFT:
        return Report(PRECONDITION, {}, ["[P1] needs a left module"])
    if not m.is_valid():
        return Report(PRECONDITION, {}, ["actions violate AB = BA or A^3 = B^2"])
    return _bool_report(cusp.check_p1(m), {"dim": m.dim, "rank_xi": cusp.xi_operator(m.A, m.B).rank()})


def cmd_p1prime(pb: Problem, args) -> Report:
    m = pb.cusp_module(_need(args, "module", "--module"))
    if m.side != cusp.RIGHT:
        return Report(PRECONDITION, {}, ["[P1'] needs a right module"])
    if not m.is_valid():
        return Report(PRECONDITION, {}, ["actions violate AB = BA or A^3 = B^2"])
    return _bool_report(cusp.check_p1prime(m), {"dim": m.dim})


def _bimodule_or_precondition(pb: Problem, args):
    b = pb.cusp_bimodule(_need(args, "module", "--module"))
    bad = b.invariant_failures()
    return b, (Report(PRECONDITION, {}, bad) if bad else None)


def cmd_p2(pb: Problem, args) -> Report:
    b, pre = _bimodule_or_precondition(pb, args)
    return pre or _bool_report(cusp.check_p2(b), {"dim": b.dim})


def cmd_longn(pb: Problem, args) -> Report:
    b, pre = _bimodule_or_precondition(pb, args)
    if pre:
        return pre
    rep = cusp.check_long_n(b)
    if rep.verdict == FAIL:
        # [P2] held, so a failure contradicts the long exact sequence claim
        return Report(VIOLATION, rep.values, rep.details)
    return rep


def cmd_endo_bimodule(pb: Problem, args) -> Report:
    s = pb.datum(_need(args, "datum", "--datum"))
    if not s.maps_are_homs():
        return Report(PRECONDITION, {}, ["maps are not homomorphisms"])
    try:
        x, y = degen.endo_pair(s)
        b = cusp.endo_bimodule(s.Y, x, y)
    except (ArithmeticError, ValueError) as e:
        return Report(PRECONDITION, {}, [str(e)])
    values = {
        "dim": b.dim,
        "P2": cusp.check_p2(b),
        "P1_left": cusp.check_p1(b.left_module()),
        "P1prime_right": cusp.check_p1prime(b.right_module()),
        "actions": {k: a.tolist() for k, a in zip(("LA", "LB", "RA", "RB"), b.actions)},
    }
    if values["P2"]:
        values["long_sequence"] = cusp.check_long_n(b).verdict
    return Report(PASS, values, [])


def cmd_degenerate(pb: Problem, args) -> Report:
    sc = pb.scenario(_one(args, "cert", "--cert"), "submodule")
    m = pb.module(pb._ref(sc, "module"))
    basis = pb.map(pb._ref(sc, "basis"))
    try:
        c = degen.certificate_from_submodule(m, basis)
    except ValueError as e:
        return Report(PRECONDITION, {}, [str(e)])
    ex = degen.check_exact(c.sequence())
    co = degen.codim1_identities(c.M, c.N)
    values = {"N": [a.tolist() for a in c.N.mats], "certificate": _cert_json(c), "exact": ex.ok}
    values.update(co.values)
    return Report(PASS if ex.ok else FAIL, values, co.details)


def cmd_partition_oracle(pb, args) -> Report:
    f = GF(args.p) if args.p else QQ
    if args.lam is not None:
        lam = oracles.Partition(tuple(int(x) for x in args.lam.split(",")))
        mu = oracles.Partition(tuple(int(x) for x in (args.mu or args.lam).split(",")))
        pairs = [(lam, mu)]
    else:
        n = args.n if args.n is not None else 4
        pairs = [(a, b) for k in range(1, n + 1) for a in oracles.partitions(k) for b in oracles.partitions(k)]
    mismatches = []
    for a, b in pairs:
        got = hom_space(oracles.jordan_module(a, f), oracles.jordan_module(b, f)).dim
        want = oracles.partition_hom(a, b)
        if got != want:
            mismatches.append(f"{a} {b}: hom basis {got}, formula {want}")
    values = {"pairs": len(pairs)}
    if len(pairs) == 1:
        values["dim"] = oracles.partition_hom(*pairs[0])
    return Report(FAIL if mismatches else PASS, values, mismatches)


def cmd_search_thm2(pb, args) -> Report:
    p = args.p or 2
    budget = args.budget if args.budget is not None else 10**5
    res = oracles.search_thm2(GF(p), args.dz or 2, args.t or 2, budget, seed=args.seed)
    gaps, bad = [], []
    for k, s in enumerate(res.data):
        r = degen.theorem2_gap(s)
        gaps.append(r.values.get("gap"))
        if r.verdict == VIOLATION:
            bad.append(f"datum {k}: {r.details}")
    values = {
        "found": len(res.data), "candidates": res.candidates, "exhausted": res.exhausted,
        "gaps": sorted(set(g for g in gaps if g is not None)),
    }
    verdict = VIOLATION if bad else PASS
    return Report(verdict, values, bad + res.notes)


def cmd_unique(pb: Problem, args) -> Report:
    names = _need(args, "cert", "--cert")
    if len(names) != 2:
        raise InputError("unique needs exactly two --cert flags")
    return degen.uniqueness_check(pb.certificate(names[0]), pb.certificate(names[1]))


HANDLERS = {
    "validate": cmd_validate, "hom": cmd_hom, "orbitdim": cmd_orbitdim, "exact": cmd_exact,
    "split": cmd_split, "certify": cmd_certify, "normalize": cmd_normalize, "thm2": cmd_thm2,
    "p1": cmd_p1, "p1prime": cmd_p1prime, "p2": cmd_p2, "longn": cmd_longn,
    "endo-bimodule": cmd_endo_bimodule, "degenerate": cmd_degenerate,
    "partition-oracle": cmd_partition_oracle, "search-thm2": cmd_search_thm2, "unique": cmd_unique,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbitreg", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--file")
    ap.add_argument("--module")
    ap.add_argument("--from", dest="source")
    ap.add_argument("--to", dest="target")
    ap.add_argument("--cert", action="append")
    ap.add_argument("--datum")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--budget", type=int)
    ap.add_argument("--p", type=int, help="prime for search-thm2 / partition-oracle")
    ap.add_argument("--dz", type=int, help="dimension of Z for search-thm2")
    ap.add_argument("--t", type=int, help="number of generators for search-thm2")
    ap.add_argument("--n", type=int, help="largest partition size for partition-oracle")
    ap.add_argument("--lambda", dest="lam", help="comma-separated partition")
    ap.add_argument("--mu", help="comma-separated partition")
    return ap


def run(argv) -> tuple:
    """Returns ``(exit_code, report_dict)``; raises nothing for bad input."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit:
        return 2, None
    inputs: dict[str, Any] = {k: v for k, v in vars(args).items() if v not in (None, []) and k != "command"}
    try:
        pb = None
        if args.file is not None or args.command not in FILELESS:
            if args.file is None:
                raise InputError("missing flag --file")
            pb, digest = load_problem(args.file)
            inputs["sha256"] = digest
        report = HANDLERS[args.command](pb, args)
    except InputError as e:
        report = Report(PRECONDITION, {}, [f"input error: {e}"])
        print(f"orbitreg: {e}", file=sys.stderr)
    except degen.SplitCriteriaDisagree as e:
        report = Report(VIOLATION, {}, [str(e)])
    except ValueError as e:
        # malformed data that parsed but fails a check's preconditions
        report = Report(PRECONDITION, {}, [str(e)])
    doc = {"command": args.command, "inputs": inputs}
    doc.update(report.to_json())
    return EXIT.get(report.verdict, 2), doc


def main(argv=None) -> int:
    code, doc = run(sys.argv[1:] if argv is None else argv)
    if doc is not None:
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
