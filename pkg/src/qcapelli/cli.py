"""Command-line front end.

Every command prints its result and a list of checks.  With --json the same
report is written as deterministic JSON.  Exit codes: 0 when every check
passes, 1 when some check fails, 2 for bad arguments, 3 for an internal
inconsistency.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Callable, Dict, List, Optional

from . import algebras, capelli, family, freealg, knopsahi, uqmod
from .scalar import ParseError, RatFunc, parse_ratfunc

SCHEMA = "qcapelli/1"


class UsageError(ValueError):
    pass


class Report:
    def __init__(self, command: str, config: Dict):
        self.command = command
        self.config = config
        self.records: List[Dict] = []
        self.output: Dict = {}

    def check(self, name: str, ok: bool, details="") -> bool:
        self.records.append({"name": name, "status": "pass" if ok else "fail", "details": details})
        return ok

    @property
    def ok(self) -> bool:
        return all(r["status"] == "pass" for r in self.records)

    def to_json(self) -> str:
        body = {"schema": SCHEMA, "command": self.command, "config": self.config,
                "output": self.output, "records": self.records, "result": "pass" if self.ok else "fail"}
        return json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        for key in sorted(self.output):
            value = self.output[key]
            if isinstance(value, list):
                lines.append(f"{key}:")
                lines.extend(f"  {v}" for v in value)
            else:
                lines.append(f"{key}: {value}")
        for r in self.records:
            detail = f"  ({r['details']})" if r["details"] else ""
            lines.append(f"{r['status'].upper()}  {r['name']}{detail}")
        return "\n".join(lines)


# -- argument helpers --------------------------------------------------------

def _family(args) -> family.FamilyDescriptor:
    try:
        fam = family.build_family(args.family, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return fam


def _partition(text: Optional[str], n: int, what: str) -> family.Partition:
    if text is None:
        raise UsageError(f"--{what} is required")
    try:
        return family.parse_partition(text, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _ratfunc(text: str) -> RatFunc:
    try:
        return parse_ratfunc(text)
    except (ParseError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from exc


def _rules_json(rs: freealg.RewriteSystem) -> List[Dict[str, str]]:
    out = []
    for (g, h), rhs in rs.rule_items():
        out.append({"lhs": freealg.word_str((g, h)), "rhs": str(freealg.NCPoly(rhs))})
    return out


def _fmt_lambda(lam) -> str:
    return "(" + ",".join(str(p) for p in lam) + ")"


# -- commands ------------------------------------------------------------------

def cmd_reflection(args, rep: Report):
    fam = _family(args)
    bad = family.check_reflection_equation(fam)
    rep.check(f"reflection equation {fam}", not bad, f"{len(bad)} entries differ" if bad else "")


def cmd_relations(args, rep: Report):
    fam = _family(args)
    tower = algebras.build_tower(fam)
    rs = tower.system(args.algebra)
    rep.output["rules"] = [f"{r['lhs']} -> {r['rhs']}" for r in _rules_json(rs)]
    rep.output["generators"] = [freealg.gen_str(g) for g in rs.order]
    rep.check(f"{args.algebra} rules derived for {fam}", True, f"{len(rs.rules)} rules")


def cmd_confluence(args, rep: Report):
    fam = _family(args)
    tower = algebras.build_tower(fam)
    kinds = [args.algebra] if args.algebra else ["t", "del", "x", "d", "xd"]
    for kind in kinds:
        bad = freealg.check_local_confluence(tower.system(kind), args.budget_degree)
        rep.check(f"{kind} confluent to degree {args.budget_degree} for {fam}", not bad,
                  f"first failure at {freealg.word_str(bad[0][0])}" if bad else "")
    for r in range(args.budget_degree + 2):
        expected = _binomial(len(fam.canonical) + r - 1, r)
        got = len(tower.x.ordered_words(r))
        rep.check(f"degree {r} monomial count", got == expected, f"{got} vs {expected}")


def _binomial(a: int, b: int) -> int:
    from math import comb
    return comb(a, b) if a >= 0 else int(b == 0)


def cmd_check_btheta(args, rep: Report):
    fam = _family(args)
    action = uqmod.derive_action_tables(algebras.build_tower(fam))
    bad = uqmod.check_btheta_invariance(action)
    for name, _ in uqmod.btheta_generators(fam):
        hits = [b for b in bad if b[1] == name]
        rep.check(f"x . {name} = counit * x", not hits,
                  ", ".join(freealg.gen_str(b[0]) for b in hits))


def cmd_hvector(args, rep: Report):
    fam = _family(args)
    action = uqmod.derive_action_tables(algebras.build_tower(fam))
    targets = ([_partition(args.lam, fam.n, "lambda")] if args.lam
               else [fam.fundamental(r) for r in range(1, fam.n + 1)])
    hvs = []
    for lam in targets:
        hv = capelli.build_H2mu(fam, lam)
        hvs.append(hv)
        rep.output[f"H{_fmt_lambda(lam)}"] = str(hv.poly)
        killed = all(not action.act_left(uqmod.UExpr.E(i), hv.poly) for i in fam.simple_indices())
        rep.check(f"E_i . H{_fmt_lambda(lam)} = 0", killed)
        rep.check(f"weight of H{_fmt_lambda(lam)}", action.weight_of(hv.poly) == hv.weight, str(hv.weight))
    if not args.lam:
        tower = algebras.build_tower(fam)
        for a in hvs:
            for b in hvs:
                if a.partition < b.partition:
                    comm = tower.x.mul(a.poly, b.poly) - tower.x.mul(b.poly, a.poly)
                    rep.check(f"H{_fmt_lambda(a.partition)} H{_fmt_lambda(b.partition)} commute", not comm)


def cmd_cartan_identity(args, rep: Report):
    fam = _family(args)
    for cand in capelli.cartan_elements(fam, args.constants):
        if cand.labels_as_printed and not args.all_readings:
            continue
        bad = capelli.check_cartan_element(fam, cand, args.budget_degree)
        rep.output[f"X ({cand.label})"] = str(cand.element)
        rep.check(f"X = K_2eps_{cand.index} - 1 on monomials of degree <= {args.budget_degree} [{cand.label}]",
                  not bad, f"{len(bad)} monomials differ, first {freealg.word_str(bad[0][0])}" if bad else "")


def cmd_capelli(args, rep: Report):
    fam = _family(args)
    lam = _partition(args.lam, fam.n, "lambda")
    op = capelli.build_capelli(fam, lam, args.budget_closure)
    tower = algebras.build_tower(fam)
    rep.output["C"] = str(op.poly)
    rep.output["pairing <H*,H>"] = str(op.pairing)
    rep.check("invariant space is one-dimensional", True)
    H = capelli.build_H2mu(fam, lam).poly
    rep.check("C . H = H", tower.act_pd_on_p(op.poly, H) == tower.x.normal_form(H))
    rep.check("leading coefficient = <H*,H>^-1", op.leading == op.pairing.inverse(), str(op.leading))
    if not args.no_cross_check:
        dual = capelli.capelli_by_dual_basis(fam, lam)
        rep.check("dual-basis construction agrees", dual == op.poly)


def cmd_eigen(args, rep: Report):
    fam = _family(args)
    lam = _partition(args.lam, fam.n, "lambda")
    if args.mu is not None:
        mus = [_partition(args.mu, fam.n, "mu")]
    elif args.max_size is not None:
        mus = family.partitions_up_to(args.max_size, fam.n)
    else:
        raise UsageError("give --mu or --max-size")
    values = []
    for mu in mus:
        value = capelli.capelli_eigenvalue(fam, lam, mu)
        values.append(f"{_fmt_lambda(mu)}: {value}")
        rep.check(f"H{_fmt_lambda(mu)} is an eigenvector of C{_fmt_lambda(lam)}", True)
        if sum(mu) <= sum(lam):
            expected = 1 if mu == lam else 0
            rep.check(f"eig{_fmt_lambda(lam)}{_fmt_lambda(mu)} = {expected}", value == expected, str(value))
    if len(values) == 1 and args.mu is not None:
        rep.output["eigenvalue"] = values[0].split(": ", 1)[1]
    else:
        rep.output["eigenvalues"] = values


def cmd_knopsahi(args, rep: Report):
    n = args.n
    if n < 1:
        raise UsageError("--n must be positive")
    lam = _partition(args.lam, n, "lambda")
    a, g = _ratfunc(args.a), _ratfunc(args.g)
    ks = knopsahi.knop_sahi(lam, n, a, g, normalized=args.normalized)
    rep.output["P"] = str(ks.in_x)
    rep.output["P in y"] = ks.in_y.to_string("y")
    rep.check("kernel dimension 1", ks.kernel_dim == 1, f"{ks.basis_size} basis, {ks.conditions} conditions")
    rep.check("nonzero at a^lambda", bool(ks.value_at_lambda), str(ks.value_at_lambda))
    rep.check("symmetric in y", ks.in_y.is_symmetric())


def cmd_interpolation_match(args, rep: Report):
    fam = _family(args)
    cells = knopsahi.verify_theorem_b(fam, args.max_lambda, args.max_mu)
    rows = []
    for c in cells:
        rows.append(f"{_fmt_lambda(c.lam)} {_fmt_lambda(c.mu)}: {c.eigenvalue} | {c.interpolation}")
        rep.check(f"eig{_fmt_lambda(c.lam)}{_fmt_lambda(c.mu)} = c P*(q^(m mu))", c.ok, c.error or "")
    rep.output["cells"] = rows


def cmd_act(args, rep: Report):
    fam = _family(args)
    action = uqmod.derive_action_tables(algebras.build_tower(fam))
    try:
        op = uqmod.parse_uexpr(args.op, fam.N)
        elem = freealg.parse_ncpoly(args.elem)
    except (ValueError, ParseError) as exc:
        raise UsageError(str(exc)) from exc
    for word in op.terms:
        for u in word:
            try:
                action.check_gen(u)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
    tower = action.tower
    kinds = {g[0] for w in elem.terms for g in w}
    if args.side == "right":
        if not kinds <= {"t", "del"}:
            raise UsageError("the right action is available on t and del elements")
        image = action.act_right(elem, op)
    else:
        if kinds <= {"x", "d"}:
            elem = _normalize_elem(tower, elem)
        image = action.act_left(op, elem)
    rep.output["image"] = str(image)
    rep.check("action computed", True)


def _normalize_elem(tower, elem):
    kinds = {g[0] for w in elem.terms for g in w}
    system = tower.x if kinds <= {"x"} else tower.d if kinds <= {"d"} else tower.xd
    return system.normal_form(elem)


def cmd_verify_all(args, rep: Report):
    fam = _family(args)
    sub = argparse.Namespace(**vars(args))
    cmd_reflection(sub, rep)
    cmd_confluence(argparse.Namespace(**{**vars(args), "algebra": None}), rep)
    cmd_check_btheta(sub, rep)
    cmd_hvector(argparse.Namespace(**{**vars(args), "lam": None}), rep)
    cmd_cartan_identity(argparse.Namespace(**{**vars(args), "constants": "derived", "all_readings": False}), rep)
    _random_associativity(fam, args.seed, rep)
    tower = algebras.build_tower(fam)
    lams = [l for l in family.partitions_up_to(args.max_lambda, fam.n) if l]
    for lam in lams:
        op = capelli.build_capelli(fam, lam, args.budget_closure)
        rep.check(f"C{_fmt_lambda(lam)} leading coefficient", op.leading == op.pairing.inverse())
        for mu in family.partitions_up_to(sum(lam), fam.n):
            value = capelli.capelli_eigenvalue(fam, lam, mu)
            rep.check(f"eig{_fmt_lambda(lam)}{_fmt_lambda(mu)} = {int(mu == lam)}", value == int(mu == lam), str(value))
    for c in knopsahi.verify_theorem_b(fam, args.max_lambda, args.max_lambda):
        rep.check(f"eigenvalue = interpolation value {_fmt_lambda(c.lam)}{_fmt_lambda(c.mu)}", c.ok, c.error or "")
    rep.output["family"] = str(fam)


def _random_associativity(fam, seed: int, rep: Report, trials: int = 5):
    """Products of random PD elements associate (a randomized property check)."""
    rng = random.Random(seed)
    tower = algebras.build_tower(fam)
    gens = list(tower.xd.order)

    def rand_elem():
        terms = {}
        for _ in range(2):
            word = tuple(rng.choice(gens) for _ in range(rng.randint(0, 2)))
            terms[word] = RatFunc.coerce(rng.randint(-3, 3) or 1)
        return freealg.NCPoly(terms)

    ok = True
    for _ in range(trials):
        a, b, c = rand_elem(), rand_elem(), rand_elem()
        ok &= tower.xd.mul(tower.xd.mul(a, b), c) == tower.xd.mul(a, tower.xd.mul(b, c))
    rep.check(f"random PD products associate (seed {seed})", bool(ok))


COMMANDS: Dict[str, Callable] = {
    "verify-all": cmd_verify_all, "reflection": cmd_reflection, "relations": cmd_relations,
    "confluence": cmd_confluence, "check-btheta": cmd_check_btheta, "hvector": cmd_hvector,
    "lemma61": cmd_cartan_identity, "capelli": cmd_capelli, "eigen": cmd_eigen, "knopsahi": cmd_knopsahi,
    "theoremb": cmd_interpolation_match, "act": cmd_act,
}

MODULE_OF = {
    algebras.NotInSubalgebra: "algebras", freealg.RewriteError: "freealg", uqmod.ModuleError: "uqmod",
    capelli.CapelliError: "capelli", knopsahi.InterpolationError: "knopsahi",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="ai", help="ai, aii or diag")
    common.add_argument("--n", type=int, default=2, help="restricted rank")
    common.add_argument("--json", metavar="PATH", help="write the report as JSON ('-' for stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--budget-degree", type=int, default=3, help="degree bound for confluence / monomial checks")
    common.add_argument("--budget-closure", type=int, default=5000, help="module dimension cap")

    parser = _Parser(prog="qcapelli", description="Exact verification of quantum Capelli operators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("verify-all", "run every check for one family")
    p.add_argument("--max-lambda", type=int, default=2)
    add("reflection", "check the reflection equation for J")
    p = add("relations", "print the rewrite rules of an algebra")
    p.add_argument("--algebra", choices=["t", "del", "x", "d", "xd"], default="x")
    p = add("confluence", "check local confluence and monomial counts")
    p.add_argument("--algebra", choices=["t", "del", "x", "d", "xd"])
    add("check-btheta", "check that the x generators are right invariants")
    p = add("hvector", "build highest weight vectors")
    p.add_argument("--lambda", dest="lam")
    p = add("lemma61", "compare the Cartan element X with K_2eps - 1")
    p.add_argument("--constants", choices=["printed", "derived"], default="derived")
    p.add_argument("--all-readings", action="store_true", help="also test the unswapped diagonal labels")
    p = add("capelli", "build a Capelli operator")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--no-cross-check", action="store_true")
    p = add("eigen", "Capelli eigenvalues")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--mu")
    p.add_argument("--max-size", type=int)
    p = add("knopsahi", "solve for an interpolation polynomial")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--a", default="q^4")
    p.add_argument("--g", default="q^2")
    p.add_argument("--normalized", action="store_true")
    p = add("theoremb", "compare eigenvalues with interpolation polynomials")
    p.add_argument("--max-lambda", type=int, default=2)
    p.add_argument("--max-mu", type=int, default=2)
    p = add("act", "apply a quantum group element")
    p.add_argument("--op", required=True)
    p.add_argument("--elem", required=True)
    p.add_argument("--side", choices=["left", "right"], default="left")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget_degree < 3 or args.budget_closure < 1:
        print("qcapelli: error: budgets must be positive (degree at least 3)", file=sys.stderr)
        return 2
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("json",)}
    rep = Report(args.command, config)
    start = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
    except UsageError as exc:
        print(f"qcapelli: error: {exc}", file=sys.stderr)
        return 2
    except tuple(MODULE_OF) as exc:
        module = next(m for cls, m in MODULE_OF.items() if isinstance(exc, cls))
        print(f"qcapelli: internal inconsistency in {module}: {exc}", file=sys.stderr)
        return 3
    elapsed = time.perf_counter() - start
    if args.json:
        text = rep.to_json()
        if args.json == "-":
            sys.stdout.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    if args.json != "-":
        print(rep.to_text())
        print(f"{sum(r['status'] == 'pass' for r in rep.records)}/{len(rep.records)} checks passed in {elapsed:.2f}s")
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
