"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
Expected values marked as published are transcribed from the reference
table and worked example; the rest come from independent oracles.
"""

import io
import itertools
import random
import time
from contextlib import redirect_stdout

import pytest

from conftest import record_acceptance
from kleintorelli.cli import main
from kleintorelli.diffmethod import (
    Constraint,
    Reason,
    classify,
    diff_rank,
    klein_cubic_direction_scan,
    sparsity,
    variables,
)
from kleintorelli.forms import Form, apply_substitution, delsarte, fermat, klein, parse_form
from kleintorelli.numbertheory import wagstaff_scan
from kleintorelli.symmetry import check_klein_generators, diagonal_automorphisms, klein_m, verify_klein_generators
from kleintorelli.torelli import (
    BudgetExceeded,
    appendix_cubic_sets,
    cyclic_subgroup,
    enumerate_spectrum,
    extremality_report,
    set_stabilizer,
    stabilizer,
    stabilizer_exhaustive,
    torelli_check,
)

# published Klein hypersurfaces of Wagstaff type, n in {3,5,9,11,15}, d in 3..11
PUBLISHED_TABLE = {
    (3, 4): 61, (3, 6): 521, (3, 11): 9091,
    (5, 3): 43, (5, 4): 547, (5, 11): 909091,
    (9, 3): 683, (9, 7): 51828151,
    (11, 3): 2731, (11, 4): 398581,
    (15, 3): 43691, (15, 8): 29078814248401,
}
PUBLISHED_S2 = [-21, -18, -16, -11, -10, -7, -6, -4, -1, 2, 3, 5, 8, 9, 12, 13, 14, 15, 17, 19, 20]
PUBLISHED_STABILIZER = [-8, -2, 1, 4, 11, 16, 21]

DEFAULT_CASES = [(3, 4), (3, 6), (3, 11), (5, 3), (5, 4), (5, 11), (9, 3), (11, 3), (11, 4), (15, 3)]
RAISED_BUDGET = 6**11 + 1  # (9,7) enumerates 6^11 tuples


def _cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


@pytest.fixture(scope="module")
def verdicts():
    out = {}
    for n, d in DEFAULT_CASES:
        t = time.perf_counter()
        out[(n, d)] = (torelli_check(n, d), time.perf_counter() - t)
    t = time.perf_counter()
    out[(9, 7)] = (torelli_check(9, 7, budget=RAISED_BUDGET), time.perf_counter() - t)
    return out


def test_criterion_1_table():
    t = time.perf_counter()
    code, out = _cli(["wagstaff", "scan", "15", "11"])
    elapsed = time.perf_counter() - t
    rows = [[c.strip() for c in line.split("|")] for line in out.splitlines() if "|" in line]
    header = rows[0][1:]
    cells = {}
    for row in rows[1:]:
        for d, cell in zip(header, row[1:]):
            cells[(int(row[0]), int(d))] = cell
    expected = {
        (n, d): str(PUBLISHED_TABLE.get((n, d), "--")) for n in (3, 5, 9, 11, 15) for d in range(3, 12)
    }
    ok = code == 0 and cells == expected and elapsed < 10
    record_acceptance(1, ok, f"12 primes + dashes exact={cells == expected}, {elapsed:.2f}s < 10s")
    assert ok


def test_criterion_2_cubic_fivefold():
    t = time.perf_counter()
    code, out = _cli(["torelli", "check", "5", "3", "--json"])
    sets = enumerate_spectrum(5, 3).sets
    elapsed = time.perf_counter() - t
    import json

    doc = json.loads(out)
    s2_ok = sets[2].tolist() == sorted(v % 43 for v in PUBLISHED_S2)
    stab_ok = doc["stabilizer"] == sorted(v % 43 for v in PUBLISHED_STABILIZER)
    ok = code == 0 and s2_ok and stab_ok and doc["condition_holds"] and elapsed < 1
    record_acceptance(2, ok, f"S_2 match={s2_ok}, stabilizer match={stab_ok}, {elapsed:.3f}s < 1s")
    assert ok


def test_criterion_3_conjecture(verdicts):
    failures = [k for k, (v, _) in verdicts.items() if not v.condition_holds]
    slow = [k for k, (_, t) in verdicts.items() if t > 300]
    try:
        torelli_check(15, 8)
        budget_ok = False
    except BudgetExceeded as exc:
        budget_ok = exc.estimated == 7**17
    worst = max(t for _, t in verdicts.values())
    ok = not failures and not slow and budget_ok
    record_acceptance(
        3, ok,
        f"{len(verdicts)} cases hold (incl. (9,7) at budget {RAISED_BUDGET}), "
        f"slowest {worst:.1f}s; (15,8) BudgetExceeded={budget_ok}",
    )
    assert ok, (failures, slow)


def test_criterion_4_invariants(verdicts):
    bad = []
    for (n, d), (v, _) in verdicts.items():
        rep = v.report
        p = v.p
        if not (rep.extremal and rep.total_count == p - 1 and rep.hodge_symmetry and rep.shift_invariant and rep.order_ok):
            bad.append((n, d))
            continue
        if p <= 10**6:
            # explicit set-level recheck independent of the owner array
            sets = [s.as_set() for s in v.spectrum.sets]
            union = sorted(itertools.chain.from_iterable(sets))
            if union != list(range(1, p)):
                bad.append((n, d))
            for q in range(n + 1):
                if sets[n - q] != {(-r) % p for r in sets[q]} or sets[q] != {(1 - d) * r % p for r in sets[q]}:
                    bad.append((n, d))
    ok = not bad
    record_acceptance(4, ok, f"partition/Hodge/shift/order on {len(verdicts)} cases, failures {bad}")
    assert ok


def test_criterion_5_group_orders():
    t = time.perf_counter()
    bad = []
    for n in range(1, 9):
        for d in range(3, 9):
            if diagonal_automorphisms(klein(n, d)).order != klein_m(n, d):
                bad.append(("klein", n, d))
            if diagonal_automorphisms(fermat(n, d)).order != d ** (n + 1):
                bad.append(("fermat", n, d))
            if diagonal_automorphisms(delsarte(n, d)).order != (d - 1) ** (n + 1):
                bad.append(("delsarte", n, d))
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 60
    record_acceptance(5, ok, f"144 orders on 1<=n<=8, 3<=d<=8, mismatches {bad}, {elapsed:.2f}s < 60s")
    assert ok


def test_criterion_6_generators():
    bad = []
    for n in range(1, 9):
        for d in range(3, 9):
            chk = check_klein_generators(n, d)
            if not verify_klein_generators(n, d) or chk.sigma_phase != 0 or not chk.conjugation_ok:
                bad.append((n, d))
    ok = not bad
    record_acceptance(6, ok, f"sigma/nu invariance (phase 0), orders, nu sigma nu^-1 = sigma^(1-d); failures {bad}")
    assert ok


def _random_form(rng):
    nv = rng.randint(2, 6)
    d = rng.randint(2, 7)
    terms = {}
    for _ in range(rng.randint(1, 6)):
        cuts = sorted(rng.randint(0, d) for _ in range(nv - 1))
        terms[tuple(b - a for a, b in zip([0] + cuts, cuts + [d]))] = rng.choice([-4, -3, -2, -1, 1, 2, 3, 4])
    return Form.from_terms(nv, terms)


def _unimodular(size, rng):
    m = [[int(i == j) for j in range(size)] for i in range(size)]
    for _ in range(3 * size):
        i, j = rng.sample(range(size), 2)
        k = rng.choice([-2, -1, 1, 2])
        for c in range(size):
            m[i][c] += k * m[j][c]
    perm = list(range(size))
    rng.shuffle(perm)
    return [m[p] for p in perm]


def test_criterion_7_differential_method():
    sparsity_ok = all(
        sparsity(fermat(n, d)) == 2 * d
        and sparsity(klein(n, d)) == (2 * d - 2 if d >= 4 else 4)
        and (d < 4 or sparsity(delsarte(n, d)) == 2 * d - 2)
        for n in range(1, 9)
        for d in range(3, 9)
    )

    rng = random.Random(2024)
    sparse_cases = rank_failures = 0
    while sparse_cases < 500:
        f = _random_form(rng)
        if sparsity(f) <= 2:
            continue
        sparse_cases += 1
        rank_failures += diff_rank(f) != len(variables(f))

    rng = random.Random(7)
    subst_failures = 0
    for _ in range(200):
        f = _random_form(rng)
        while f.num_vars > 4 or f.degree > 4:
            f = _random_form(rng)
        subst_failures += diff_rank(apply_substitution(f, _unimodular(f.num_vars, rng))) != diff_rank(f)

    scans = {n: klein_cubic_direction_scan(n, trials=1000, seed=n).passed for n in (4, 5, 6, 7)}
    ok = sparsity_ok and rank_failures == 0 and subst_failures == 0 and all(scans.values())
    record_acceptance(
        7, ok,
        f"sparsity values={sparsity_ok}; rank=|vars| 500 forms, {rank_failures} failures; "
        f"200 unimodular substitutions, {subst_failures} failures; direction scans {scans}",
    )
    assert ok


def test_criterion_8_classifier():
    a = classify(klein(2, 5)).kind is Constraint.GENERALIZED_PERMUTATION
    b = classify(delsarte(2, 5)).kind is Constraint.SIMPLE_FORM_PERMUTATION
    c = classify(parse_form("x0^4*x1 + x1^4*x0 + x2^5 + x3^5", 4))
    c_ok = c.reason is Reason.NOT_A_POSET and c.poset.witness == (0, 1)
    e = classify(klein(5, 3)).reason is Reason.SPARSITY_TOO_LOW
    ok = a and b and c_ok and e
    record_acceptance(8, ok, f"Klein(2,5)={a}, Delsarte(2,5)={b}, non-poset+witness={c_ok}, Klein cubic={e}")
    assert ok


def test_criterion_9_oracle_equivalence():
    cases = [(r.n, r.d) for r in wagstaff_scan(15, 11) if r.is_wagstaff_type and r.p <= 10**4]
    required = {(5, 3), (3, 4), (3, 6), (5, 4), (9, 3), (11, 3), (3, 11)}
    bad = []
    for n, d in cases:
        sp = enumerate_spectrum(n, d)
        if stabilizer(sp).stabilizer != stabilizer_exhaustive(sp.sets, sp.p):
            bad.append((n, d))
    ok = required <= set(cases) and not bad
    record_acceptance(9, ok, f"pruned == exhaustive on {sorted(cases)}, mismatches {bad}")
    assert ok


def test_criterion_10_appendix():
    results = {}
    for n in (5, 11):
        app = appendix_cubic_sets(n)
        general = next(s for s in enumerate_spectrum(n, 3).sets if s.target_sum == 2)
        same = app.tolist() == general.tolist()
        alone = set_stabilizer(app.tolist(), app.p) == cyclic_subgroup(-2, app.p)
        results[n] = same and alone
    ok = all(results.values())
    record_acceptance(10, ok, f"pair-sum set == general S_q and its stabilizer == <-2>: {results}")
    assert ok
