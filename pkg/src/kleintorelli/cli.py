"""Command-line entry point: analyze | family | diag-aut | wagstaff | torelli."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import diffmethod, forms, numbertheory, symmetry, torelli

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_NOT_WAGSTAFF = 4


def _emit_json(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _err(msg: str) -> None:
    sys.stderr.write(f"kleintorelli: {msg}\n")


def _parallelism(text: str):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer or 'auto'") from None
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer or 'auto'")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _pair(ns, first: str, second: str):
    """Resolve a positional/flag pair such as ``5 3`` versus ``--n 5 --d 3``."""
    out = []
    for name in (first, second):
        pos = getattr(ns, f"{name}_pos")
        flag = getattr(ns, name)
        if pos is not None and flag is not None and pos != flag:
            raise ValueError(f"conflicting values for {name}")
        value = pos if pos is not None else flag
        if value is None:
            raise ValueError(f"missing {name}")
        out.append(value)
    return out


def _add_pair(parser, first: str, second: str, flag_first: str, flag_second: str) -> None:
    parser.add_argument(f"{first}_pos", nargs="?", type=int, metavar=first)
    parser.add_argument(f"{second}_pos", nargs="?", type=int, metavar=second)
    parser.add_argument(flag_first, dest=first, type=int)
    parser.add_argument(flag_second, dest=second, type=int)


# ------------------------------------------------------------- commands

def _fmt_sparsity(value) -> str:
    return "infinite" if value == diffmethod.INFINITE else str(value)


def cmd_analyze(ns) -> int:
    try:
        form = forms.read_form_file(ns.form_file)
    except OSError as exc:
        _err(f"cannot read {ns.form_file}: {exc.strerror or exc}")
        return EXIT_INPUT
    except forms.FormError as exc:
        _err(f"{ns.form_file}: {exc}")
        return EXIT_INPUT
    spar = diffmethod.sparsity(form)
    var_set = sorted(diffmethod.variables(form))
    ranks = [diffmethod.diff_rank(forms.partial_derivative(form, i)) for i in range(form.num_vars)]
    poset = diffmethod.le_relation(form)
    constraint = diffmethod.classify(form)
    if ns.json:
        _emit_json(
            {
                "form": form.to_json(),
                "sparsity": _fmt_sparsity(spar),
                "vars": var_set,
                "diff_rank": diffmethod.diff_rank(form),
                "partial_diff_ranks": ranks,
                "poset": poset.to_json(),
                "constraint": constraint.to_json(),
                "summary": constraint.describe(),
            }
        )
        return EXIT_OK
    print(f"form: {forms.render_form(form)}")
    print(f"n = {form.n}, d = {form.degree}")
    print(f"sparsity: {_fmt_sparsity(spar)}")
    print("vars: " + ", ".join(f"x{i}" for i in var_set))
    print(f"diff rank: {diffmethod.diff_rank(form)}")
    for i, r in enumerate(ranks):
        print(f"  drank(dF/dx{i}) = {r}")
    rel = ", ".join(f"x{i} <= x{j}" for i, j in sorted(poset.relation)) or "(trivial)"
    print(f"relation: {rel}")
    print(f"poset: {'yes' if poset.is_poset else 'no'}")
    print(f"constraint: {constraint.describe()}")
    return EXIT_OK


def cmd_family(ns) -> int:
    try:
        n, d = _pair(ns, "n", "d")
        group = symmetry.family_aut_group(ns.family, n, d)
        form = forms.family_form(ns.family, n, d)
    except symmetry.OutOfTableRange as exc:
        _err(str(exc))
        return EXIT_INPUT
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    doc = {"family": ns.family, "n": n, "d": d, "form": form.to_json(), "group": group.to_json()}
    lines = [f"form: {forms.render_form(form)}"]
    if ns.family == "klein":
        m = symmetry.klein_m(n, d)
        doc["klein_m"] = str(m)
        lines.append(f"klein m: {m}")
    lines.append(f"group: {group.describe()}")
    ok = True
    if ns.verify:
        verify: dict = {}
        try:
            diag = symmetry.diagonal_automorphisms(form)
            verify["diagonal"] = diag.to_json()
            expected = _expected_diagonal_order(ns.family, n, d)
            verify["diagonal_expected"] = str(expected)
            verify["diagonal_ok"] = diag.order == expected
            lines.append(
                f"diagonal automorphisms: order {diag.order} (expected {expected}) "
                + ("confirmed" if diag.order == expected else "MISMATCH")
            )
            ok = ok and diag.order == expected
        except symmetry.InfiniteStabilizer as exc:
            verify["diagonal"] = None
            lines.append(f"diagonal automorphisms: {exc}")
            ok = False
        if ns.family == "klein":
            passed = symmetry.verify_klein_generators(n, d)
            verify["generators"] = symmetry.check_klein_generators(n, d).to_json()
            verify["generators_ok"] = passed
            lines.append(f"generators sigma, nu: {'verified' if passed else 'FAILED'}")
            ok = ok and passed
        doc["verify"] = verify
    if ns.json:
        _emit_json(doc)
    else:
        print("\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def _expected_diagonal_order(family: str, n: int, d: int) -> int:
    if family == "fermat":
        return d ** (n + 1)
    if family == "delsarte":
        return (d - 1) ** (n + 1)
    return symmetry.klein_m(n, d)


def cmd_diag_aut(ns) -> int:
    try:
        if ns.family:
            n, d = _pair(ns, "n", "d")
            form = forms.family_form(ns.family, n, d)
        elif ns.form_file:
            form = forms.read_form_file(ns.form_file)
        else:
            _err("give a form file or --family with n and d")
            return EXIT_INPUT
    except OSError as exc:
        _err(f"cannot read {ns.form_file}: {exc.strerror or exc}")
        return EXIT_INPUT
    except (forms.FormError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    try:
        group = symmetry.diagonal_automorphisms(form)
    except symmetry.InfiniteStabilizer as exc:
        _err(str(exc))
        return EXIT_FAIL
    if ns.json:
        _emit_json({"form": form.to_json(), "diagonal": group.to_json()})
        return EXIT_OK
    label = " x ".join(f"Z/{f}Z" for f in group.invariant_factors) or "trivial"
    print(f"form: {forms.render_form(form)}")
    print(f"diagonal automorphisms: {label}, order {group.order}")
    for g in group.generators:
        print(f"  generator mod {g.modulus}: phases {list(g.phases)}")
    return EXIT_OK


def cmd_wagstaff(ns) -> int:
    try:
        n_max, d_max = _pair(ns, "n_max", "d_max")
        rows = numbertheory.wagstaff_scan(n_max, d_max)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    if ns.json:
        _emit_json({"n_max": n_max, "d_max": d_max, "cells": [r.to_json() for r in rows]})
    else:
        print(numbertheory.render_table(rows))
    return EXIT_OK


def cmd_torelli(ns) -> int:
    try:
        n, d = _pair(ns, "n", "d")
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    try:
        verdict = torelli.torelli_check(n, d, budget=ns.budget, parallelism=ns.parallelism)
    except torelli.NotWagstaffType as exc:
        _err(f"({n},{d}) is not of Wagstaff type: {exc}")
        return EXIT_NOT_WAGSTAFF
    except torelli.BudgetExceeded as exc:
        _err(f"({n},{d}) {exc}; raise --budget to attempt it")
        return EXIT_BUDGET
    code = EXIT_OK if verdict.condition_holds else EXIT_FAIL
    if ns.json:
        _emit_json(verdict.to_json())
        return code
    res = verdict.result
    print(f"n = {n}, d = {d}, p = {verdict.p}")
    if verdict.excluded_case:
        print("note: excluded by the hypotheses of the conjecture")
    print(f"tuples enumerated: {verdict.tuples_enumerated}")
    print(f"extremal: {verdict.extremal}")
    for s in verdict.spectrum.sets:
        print(f"  |S_{s.q}| = {len(s)}")
    print(f"stabilizer: {res.stabilizer}")
    print(f"<1-d> = <{(1 - d) % verdict.p}>: {res.expected}")
    print(f"condition holds: {verdict.condition_holds}")
    t = verdict.timings
    _err(
        "timings: enumerate {:.3f}s, extremality {:.3f}s, stabilizer {:.3f}s".format(
            t["enumerate"], t["extremality"], t["stabilizer"]
        )
    )
    return code


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document on stdout")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="kleintorelli", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="differential-method report for a form file")
    p.add_argument("form_file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("family", parents=[common], help="automorphism group of a built-in family")
    p.add_argument("family", choices=sorted(forms.FAMILIES))
    _add_pair(p, "n", "d", "--n", "--d")
    p.add_argument("--verify", action="store_true", help="cross-check against the diagonal group computation")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("diag-aut", parents=[common], help="diagonal automorphism group via Smith normal form")
    p.add_argument("form_file", nargs="?")
    p.add_argument("--family", choices=sorted(forms.FAMILIES))
    p.add_argument("--n", dest="n", type=int)
    p.add_argument("--d", dest="d", type=int)
    p.set_defaults(func=cmd_diag_aut, n_pos=None, d_pos=None)

    p = sub.add_parser("wagstaff", help="Klein hypersurfaces of Wagstaff type")
    wsub = p.add_subparsers(dest="action", required=True)
    w = wsub.add_parser("scan", parents=[common], help="tabulate p over a box of (n, d)")
    _add_pair(w, "n_max", "d_max", "--n-max", "--d-max")
    w.set_defaults(func=cmd_wagstaff)

    p = sub.add_parser("torelli", help="stabilizer condition for a Klein hypersurface")
    tsub = p.add_subparsers(dest="action", required=True)
    t = tsub.add_parser("check", parents=[common], help="run the full pipeline for one (n, d)")
    _add_pair(t, "n", "d", "--n", "--d")
    t.add_argument("--budget", type=_positive, default=torelli.DEFAULT_BUDGET, help="maximum tuples to enumerate")
    t.add_argument("--parallelism", type=_parallelism, default=1, help="worker processes, or 'auto'")
    t.set_defaults(func=cmd_torelli)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
