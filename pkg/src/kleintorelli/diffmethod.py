"""Sparsity, variable sets, differential rank and the automorphism-shape classifier."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import FrozenSet, Optional, Sequence, Tuple

from .forms import Form, directional_derivative, klein, partial_derivative
from .linalg import bareiss_rank

INFINITE = math.inf


def sparsity(form: Form) -> float | int:
    """Minimum L1 distance between exponent vectors of distinct monomials.

    Returns :data:`INFINITE` for a single-monomial form.
    """
    monos = form.monomials()
    if len(monos) < 2:
        return INFINITE
    best = None
    for a, b in combinations(monos, 2):
        dist = sum(abs(x - y) for x, y in zip(a, b))
        if best is None or dist < best:
            best = dist
            if best == 2:
                break
    return best


def variables(form: Optional[Form]) -> FrozenSet[int]:
    """Indices of the variables that occur in ``form`` (empty for zero)."""
    if form is None:
        return frozenset()
    return frozenset(i for m in form.monomials() for i, a in enumerate(m) if a)


def derivative_matrix(form: Form) -> list[list[int]]:
    """Rows are ``dF/dx_i`` written in the (descending lex) basis of degree d-1 monomials that occur."""
    partials = [partial_derivative(form, i) for i in range(form.num_vars)]
    columns = sorted({m for p in partials if p is not None for m in p.monomials()}, reverse=True)
    index = {m: k for k, m in enumerate(columns)}
    rows = []
    for p in partials:
        row = [0] * len(columns)
        if p is not None:
            for m, c in p.terms:
                row[index[m]] = c
        rows.append(row)
    return rows


def diff_rank(form: Optional[Form]) -> int:
    """Rank of the linear map ``x -> dF/dx``; zero for the zero form."""
    if form is None:
        return 0
    if form.degree == 0:
        return 0
    return bareiss_rank(derivative_matrix(form))


def diff_rank_directional(form: Form, direction: Sequence[int]) -> int:
    return diff_rank(directional_derivative(form, direction))


# ------------------------------------------------------------------- poset

@dataclass(frozen=True)
class PosetReport:
    """The relation ``x_i <= x_j  iff  vars(dF/dx_i) is a subset of vars(dF/dx_j)``.

    ``relation`` holds the non-reflexive pairs, transitively closed.
    """

    num_vars: int
    relation: FrozenSet[Tuple[int, int]]
    is_poset: bool
    is_trivial: bool
    witness: Optional[Tuple[int, int]] = None

    def to_json(self) -> dict:
        return {
            "relation": [list(p) for p in sorted(self.relation)],
            "is_poset": self.is_poset,
            "is_trivial": self.is_trivial,
            "witness": list(self.witness) if self.witness else None,
        }


def transitive_closure(pairs, size: int) -> FrozenSet[Tuple[int, int]]:
    reach = [[False] * size for _ in range(size)]
    for i, j in pairs:
        reach[i][j] = True
    for k in range(size):
        rk = reach[k]
        for i in range(size):
            if reach[i][k]:
                ri = reach[i]
                for j in range(size):
                    if rk[j]:
                        ri[j] = True
    return frozenset((i, j) for i in range(size) for j in range(size) if i != j and reach[i][j])


def le_relation(form: Form) -> PosetReport:
    nv = form.num_vars
    var_sets = [variables(partial_derivative(form, i)) for i in range(nv)]
    raw = {(i, j) for i in range(nv) for j in range(nv) if i != j and var_sets[i] <= var_sets[j]}
    closed = transitive_closure(raw, nv)
    witness = next(((i, j) for i, j in sorted(closed) if i < j and (j, i) in closed), None)
    return PosetReport(
        num_vars=nv,
        relation=closed,
        is_poset=witness is None,
        is_trivial=not closed,
        witness=witness,
    )


# ---------------------------------------------------------- simple forms

@dataclass(frozen=True)
class SimpleDecomposition:
    """Klein cycles and Delsarte chains making up a simple form.

    Each block lists variable indices in template order: ``(a, b, c)`` as a
    Klein block is ``x_a^{d-1} x_b + x_b^{d-1} x_c + x_c^{d-1} x_a``, as a
    Delsarte block it is ``x_a^{d-1} x_b + x_b^{d-1} x_c + x_c^d``.
    """

    klein_blocks: Tuple[Tuple[int, ...], ...]
    delsarte_blocks: Tuple[Tuple[int, ...], ...]

    @property
    def klein_sizes(self) -> list[int]:
        return [len(b) for b in self.klein_blocks]

    @property
    def delsarte_sizes(self) -> list[int]:
        return [len(b) for b in self.delsarte_blocks]

    def to_json(self) -> dict:
        return {
            "klein_blocks": [list(b) for b in self.klein_blocks],
            "delsarte_blocks": [list(b) for b in self.delsarte_blocks],
        }


def detect_simple(form: Form) -> Optional[SimpleDecomposition]:
    """Match ``form`` against a disjoint sum of Klein and Delsarte templates.

    Only renamings of the coordinate variables are considered.  Size-one
    blocks ``x^d`` are reported as Delsarte blocks.
    """
    d = form.degree
    nv = form.num_vars
    if d < 3:
        return None
    succ: dict[int, Optional[int]] = {}
    for mono, coeff in form.terms:
        if coeff != 1:
            return None
        support = [i for i, a in enumerate(mono) if a]
        if len(support) == 1:
            head, tail = support[0], None
        elif len(support) == 2:
            i, j = support
            if mono[i] == d - 1 and mono[j] == 1:
                head, tail = i, j
            elif mono[j] == d - 1 and mono[i] == 1:
                head, tail = j, i
            else:
                return None
        else:
            return None
        if head in succ:
            return None
        succ[head] = tail
    if set(succ) != set(range(nv)):
        return None
    pred: dict[int, int] = {}
    for a, b in succ.items():
        if b is not None:
            if b in pred:
                return None
            pred[b] = a

    klein_blocks = []
    delsarte_blocks = []
    seen: set[int] = set()
    # chains start at variables nobody points to
    for start in range(nv):
        if start in pred:
            continue
        chain = [start]
        while succ[chain[-1]] is not None:
            chain.append(succ[chain[-1]])
        seen.update(chain)
        delsarte_blocks.append(tuple(chain))
    for start in range(nv):
        if start in seen:
            continue
        cycle = [start]
        nxt = succ[start]
        while nxt != start:
            if nxt is None:
                return None
            cycle.append(nxt)
            nxt = succ[nxt]
        seen.update(cycle)
        klein_blocks.append(tuple(cycle))
    return SimpleDecomposition(tuple(klein_blocks), tuple(delsarte_blocks))


# ------------------------------------------------------------- classifier

class Constraint(enum.Enum):
    NOT_APPLICABLE = "NotApplicable"
    GENERALIZED_TRIANGULAR = "GeneralizedTriangular"
    GENERALIZED_PERMUTATION = "GeneralizedPermutation"
    SIMPLE_FORM_PERMUTATION = "SimpleFormPermutation"


class Reason(enum.Enum):
    SPARSITY_TOO_LOW = "SparsityTooLow"
    NOT_A_POSET = "NotAPoset"
    HYPOTHESIS_OUT_OF_RANGE = "HypothesisOutOfRange"


@dataclass(frozen=True)
class AutConstraint:
    kind: Constraint
    reason: Optional[Reason] = None
    poset: Optional[PosetReport] = None
    decomposition: Optional[SimpleDecomposition] = field(default=None, compare=False)

    def describe(self) -> str:
        if self.kind is Constraint.NOT_APPLICABLE:
            text = f"NotApplicable: {self.reason.value}"
            if self.reason is Reason.NOT_A_POSET and self.poset and self.poset.witness:
                i, j = self.poset.witness
                text += f" (witness x{i}, x{j})"
            return text
        return self.kind.value

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "reason": self.reason.value if self.reason else None,
            "poset": self.poset.to_json() if self.poset else None,
            "decomposition": self.decomposition.to_json() if self.decomposition else None,
        }


EXCLUDED_CASES = frozenset({(1, 3), (2, 4)})


def hypotheses_hold(n: int, d: int) -> bool:
    return n >= 1 and d >= 3 and (n, d) not in EXCLUDED_CASES


def classify(form: Form) -> AutConstraint:
    """Shape constraint on automorphism matrices, assuming ``form`` is smooth.

    Checks run in order: dimension/degree range, sparsity > 4, the
    antisymmetry of the relation, then triviality of the poset, then the
    simple-form templates.
    """
    if not hypotheses_hold(form.n, form.degree):
        return AutConstraint(Constraint.NOT_APPLICABLE, Reason.HYPOTHESIS_OUT_OF_RANGE)
    if sparsity(form) <= 4:
        return AutConstraint(Constraint.NOT_APPLICABLE, Reason.SPARSITY_TOO_LOW)
    poset = le_relation(form)
    if not poset.is_poset:
        return AutConstraint(Constraint.NOT_APPLICABLE, Reason.NOT_A_POSET, poset)
    decomposition = detect_simple(form)
    if poset.is_trivial:
        return AutConstraint(Constraint.GENERALIZED_PERMUTATION, poset=poset, decomposition=decomposition)
    if decomposition is not None:
        return AutConstraint(Constraint.SIMPLE_FORM_PERMUTATION, poset=poset, decomposition=decomposition)
    return AutConstraint(Constraint.GENERALIZED_TRIANGULAR, poset=poset)


# ------------------------------------------------------ Klein cubic scan

@dataclass
class DirectionScanReport:
    n: int
    trials: int
    seed: int
    passed: bool
    coordinate_ranks: list[int]
    min_random_rank: Optional[int]
    counterexample: Optional[Tuple[int, ...]] = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "coordinate_ranks": self.coordinate_ranks,
            "min_random_rank": self.min_random_rank,
            "counterexample": list(self.counterexample) if self.counterexample else None,
        }


def random_directions(num_vars: int, trials: int, seed: int, bound: int = 5):
    """Deterministic integer directions in ``[-bound, bound]`` with at least two nonzero entries."""
    rng = random.Random(seed)
    produced = 0
    while produced < trials:
        c = tuple(rng.randint(-bound, bound) for _ in range(num_vars))
        if sum(1 for x in c if x) < 2:
            continue
        produced += 1
        yield c


def klein_cubic_direction_scan(n: int, trials: int, seed: int = 0) -> DirectionScanReport:
    """Check that only coordinate directions give the derivative of the Klein cubic rank 3."""
    if n < 4:
        raise ValueError("the rank-3 characterization is only established for n >= 4")
    if trials < 1:
        raise ValueError("trials must be positive")
    form = klein(n, 3)
    nv = n + 2
    coord = []
    counterexample = None
    for i in range(nv):
        e = [0] * nv
        e[i] = 1
        r = diff_rank_directional(form, e)
        coord.append(r)
        if r != 3 and counterexample is None:
            counterexample = tuple(e)
    min_rank = None
    for c in random_directions(nv, trials, seed):
        r = diff_rank_directional(form, c)
        min_rank = r if min_rank is None else min(min_rank, r)
        if r < 4 and counterexample is None:
            counterexample = c
    return DirectionScanReport(
        n=n,
        trials=trials,
        seed=seed,
        passed=counterexample is None,
        coordinate_ranks=coord,
        min_random_rank=min_rank,
        counterexample=counterexample,
    )
