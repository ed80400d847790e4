import itertools
import random

import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import forms, to_sympy
from kleintorelli.diffmethod import (
    INFINITE,
    Constraint,
    Reason,
    classify,
    detect_simple,
    diff_rank,
    diff_rank_directional,
    klein_cubic_direction_scan,
    le_relation,
    random_directions,
    sparsity,
    transitive_closure,
    variables,
)
from kleintorelli.forms import (
    apply_substitution,
    delsarte,
    fermat,
    klein,
    parse_form,
    partial_derivative,
)


def brute_sparsity(f):
    monos = f.monomials()
    if len(monos) < 2:
        return INFINITE
    return min(sum(abs(a - b) for a, b in zip(m1, m2)) for m1, m2 in itertools.combinations(monos, 2))


def sympy_rank(f):
    """Rank of the span of the partials, via sympy polynomial coefficients."""
    if f is None:
        return 0
    xs = sympy.symbols(f"x0:{f.num_vars}")
    g = to_sympy(f, xs)
    rows = [sympy.Poly(sympy.diff(g, x), *xs).as_dict() for x in xs]
    cols = sorted({m for r in rows for m in r})
    if not cols:
        return 0
    return sympy.Matrix([[r.get(m, 0) for m in cols] for r in rows]).rank()


# ------------------------------------------------------------- sparsity

@pytest.mark.parametrize("n", [1, 2, 3, 6])
@pytest.mark.parametrize("d", [3, 4, 5, 7])
def test_family_sparsities(n, d):
    assert sparsity(fermat(n, d)) == 2 * d
    if d >= 4:
        assert sparsity(klein(n, d)) == 2 * d - 2
        assert sparsity(delsarte(n, d)) == 2 * d - 2
    else:
        assert sparsity(klein(n, d)) == 4


def test_single_monomial_sparsity_is_infinite():
    assert sparsity(parse_form("x0^3", 2)) == INFINITE


@settings(max_examples=200, deadline=None)
@given(forms())
def test_sparsity_matches_bruteforce_and_is_even(f):
    s = sparsity(f)
    assert s == brute_sparsity(f)
    if s != INFINITE:
        assert s % 2 == 0


# ------------------------------------------------------------ variables

def test_vars_examples():
    assert variables(parse_form("x0^2*x1 + x1^2*x2", 3)) == {0, 1, 2}
    assert variables(parse_form("x1^3", 4)) == {1}
    n = 3
    assert variables(partial_derivative(delsarte(n, 5), 1)) == {0, 1, 2}
    assert variables(None) == frozenset()


# ---------------------------------------------------------- differential rank

def test_rank_examples():
    assert diff_rank(fermat(3, 5)) == 5
    k = klein(5, 3)
    assert diff_rank(partial_derivative(k, 0)) == 3
    for d in range(2, 7):
        assert diff_rank(parse_form(f"x0^{d}", 3)) == 1


def test_directional_examples():
    k = klein(5, 3)
    e = lambda *idx: [1 if i in idx else 0 for i in range(7)]
    assert diff_rank_directional(k, e(2)) == 3
    assert diff_rank_directional(k, e(0, 3)) >= 4
    assert diff_rank_directional(k, e(0, 1)) >= 4


def test_zero_directional_derivative_has_rank_zero():
    f = parse_form("x0^3 + x1^3", 3)
    assert diff_rank_directional(f, [0, 0, 1]) == 0


@settings(max_examples=200, deadline=None)
@given(forms(max_vars=4, max_degree=4))
def test_rank_matches_sympy(f):
    assert diff_rank(f) == sympy_rank(f)


@settings(max_examples=500, deadline=None)
@given(forms(min_degree=2, max_degree=6, max_terms=7))
def test_rank_equals_variable_count_when_sparse(f):
    assume(sparsity(f) > 2)
    assert diff_rank(f) == len(variables(f))


def random_unimodular(size, rng, steps=8):
    m = [[int(i == j) for j in range(size)] for i in range(size)]
    for _ in range(steps):
        i, j = rng.sample(range(size), 2)
        k = rng.choice([-2, -1, 1, 2])
        for c in range(size):
            m[i][c] += k * m[j][c]
    perm = list(range(size))
    rng.shuffle(perm)
    return [m[p] for p in perm]


@pytest.mark.parametrize("seed", range(40))
def test_rank_invariant_under_unimodular_substitution(seed):
    rng = random.Random(seed)
    nv = rng.randint(2, 4)
    d = rng.randint(2, 4)
    terms = {}
    for _ in range(rng.randint(1, 4)):
        cuts = sorted(rng.randint(0, d) for _ in range(nv - 1))
        mono = tuple(b - a for a, b in zip([0] + cuts, cuts + [d]))
        terms[mono] = rng.choice([-3, -2, -1, 1, 2, 3])
    from kleintorelli.forms import Form

    f = Form.from_terms(nv, terms)
    a = random_unimodular(nv, rng)
    assert diff_rank(apply_substitution(f, a)) == diff_rank(f)


# --------------------------------------------------------------- relation

@pytest.mark.parametrize("n,d", [(2, 5), (4, 3), (3, 4), (6, 6)])
def test_klein_relation_is_trivial(n, d):
    rep = le_relation(klein(n, d))
    assert rep.is_poset and rep.is_trivial


@pytest.mark.parametrize("d", [3, 4, 7])
def test_klein_curve_relation_is_total(d):
    # with three variables every partial involves all of them
    rep = le_relation(klein(1, d))
    assert not rep.is_poset
    assert len(rep.relation) == 6


def test_non_poset_example_witness():
    f = parse_form("x0^4*x1 + x1^4*x0 + x2^5 + x3^5", 4)
    rep = le_relation(f)
    assert not rep.is_poset
    assert rep.witness == (0, 1)
    assert {(0, 1), (1, 0)} <= rep.relation


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_delsarte_relation(n):
    rep = le_relation(delsarte(n, 5))
    # x0 <= x1 at the head of the chain and x_{n+1} <= x_n at the tail
    assert rep.relation == {(0, 1), (n + 1, n)}
    assert rep.is_poset and not rep.is_trivial


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6).flatmap(lambda s: st.tuples(st.just(s), st.sets(st.tuples(st.integers(0, s - 1), st.integers(0, s - 1))))))
def test_closure_idempotent_and_transitive(arg):
    size, pairs = arg
    pairs = {(i, j) for i, j in pairs if i != j}
    once = transitive_closure(pairs, size)
    assert transitive_closure(once, size) == once
    assert pairs <= once
    for (a, b), (c, e) in itertools.product(once, once):
        if b == c and a != e:
            assert (a, e) in once


@settings(max_examples=150, deadline=None)
@given(forms(min_degree=3))
def test_trivial_implies_poset(f):
    rep = le_relation(f)
    if rep.is_trivial:
        assert rep.is_poset


# ------------------------------------------------------------ simple forms

def test_detect_simple_families():
    k = detect_simple(klein(3, 5))
    assert k.klein_sizes == [5] and k.delsarte_sizes == []
    f = detect_simple(fermat(3, 5))
    assert f.klein_sizes == [] and f.delsarte_sizes == [1] * 5
    t = detect_simple(delsarte(2, 5))
    assert t.delsarte_blocks == ((0, 1, 2, 3),)


def test_detect_simple_mixed_and_renamed():
    f = parse_form("x3^4*x1 + x1^4*x3 + x0^4*x2 + x2^5 + x4^5", 5)
    dec = detect_simple(f)
    assert sorted(dec.klein_sizes) == [2]
    assert sorted(dec.delsarte_sizes) == [1, 2]


def test_two_cycle_cubic_is_k2_plus_t1():
    dec = detect_simple(parse_form("x0^2*x1 + x1^2*x0 + x2^3", 3))
    assert dec.klein_sizes == [2] and dec.delsarte_sizes == [1]


@pytest.mark.parametrize(
    "text,nv",
    [
        ("2*x0^3 + x1^3", 2),
        ("x0^2*x1 + x1^3 + x0*x1^2", 2),
        ("x0*x1*x2 + x0^3 + x1^3 + x2^3", 3),
        ("x0^2*x1 + x2^3", 3),
        ("x0^2*x1 + x2^2*x1 + x1^3", 3),
    ],
)
def test_not_simple(text, nv):
    assert detect_simple(parse_form(text, nv)) is None


# ---------------------------------------------------------------- classifier

def test_classifier_golden():
    assert classify(klein(2, 5)).kind is Constraint.GENERALIZED_PERMUTATION
    assert classify(delsarte(2, 5)).kind is Constraint.SIMPLE_FORM_PERMUTATION
    c = classify(parse_form("x0^4*x1 + x1^4*x0 + x2^5 + x3^5", 4))
    assert (c.kind, c.reason) == (Constraint.NOT_APPLICABLE, Reason.NOT_A_POSET)
    assert c.poset.witness == (0, 1)
    assert "witness x0, x1" in c.describe()
    for n in range(1, 8):
        c = classify(klein(n, 3))
        if (n, 3) == (1, 3):
            assert c.reason is Reason.HYPOTHESIS_OUT_OF_RANGE
        else:
            assert c.reason is Reason.SPARSITY_TOO_LOW


def test_classifier_out_of_range():
    assert classify(fermat(2, 4)).reason is Reason.HYPOTHESIS_OUT_OF_RANGE
    assert classify(parse_form("x0^5 + x1^5", 2)).reason is Reason.HYPOTHESIS_OUT_OF_RANGE


def test_classifier_triangular():
    f = parse_form("x0^5*x1 + x1^6 + x2^6 + x1^3*x2^3", 3)
    assert sparsity(f) == 6
    c = classify(f)
    assert c.kind is Constraint.GENERALIZED_TRIANGULAR
    assert c.poset.relation == {(0, 1), (2, 1)}


@settings(max_examples=200, deadline=None)
@given(forms(min_degree=3, max_degree=6, min_vars=3))
def test_classifier_consistency(f):
    c = classify(f)
    if c.kind is Constraint.GENERALIZED_PERMUTATION:
        assert c.poset.is_trivial and sparsity(f) > 4
    if c.kind is Constraint.SIMPLE_FORM_PERMUTATION:
        assert detect_simple(f) is not None and sparsity(f) > 4
    if c.kind is Constraint.GENERALIZED_TRIANGULAR:
        assert c.poset.is_poset and sparsity(f) > 4


# ------------------------------------------------------------ direction scan

@pytest.mark.parametrize("n", [4, 5])
def test_direction_scan(n):
    rep = klein_cubic_direction_scan(n, trials=200, seed=1)
    assert rep.passed and rep.coordinate_ranks == [3] * (n + 2)
    assert rep.min_random_rank >= 4


def test_direction_scan_needs_n_at_least_four():
    with pytest.raises(ValueError):
        klein_cubic_direction_scan(3, trials=10)


def test_random_directions_deterministic():
    a = list(random_directions(6, 50, seed=7))
    assert a == list(random_directions(6, 50, seed=7))
    assert all(sum(1 for x in c if x) >= 2 and all(-5 <= x <= 5 for x in c) for c in a)
