"""Spectrum sets of the order-p diagonal automorphism and the stabilizer condition.

For a Klein hypersurface of Wagstaff type with ``p = ((d-1)^{n+2}+1)/d``,
``S_q`` collects ``sum_i beta_i (1-d)^i mod p`` over exponent tuples
``beta in {0..d-2}^{n+2}`` with ``sum(beta) = d(q+1) - n - 2``.  One pass
over the whole cube fills every ``S_q`` at once.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .numbertheory import CONJECTURE_EXCLUDED, is_prime, multiplicative_order, wagstaff_p

DEFAULT_BUDGET = 200_000_000
DENSE_LIMIT = 1 << 32


class BudgetExceeded(RuntimeError):
    def __init__(self, estimated: int, budget: int):
        self.estimated = estimated
        self.budget = budget
        super().__init__(f"enumeration needs {estimated} tuples, budget is {budget}")


class NotWagstaffType(ValueError):
    pass


class EmptySpectrum(ValueError):
    pass


@dataclass(eq=False)
class SpectrumSet:
    """Residues mod p reached by tuples of one target digit sum.

    ``q`` is ``None`` for a set not attached to a Hodge index.
    """

    q: Optional[int]
    p: int
    target_sum: int
    residues: np.ndarray
    multiplicity_violations: tuple = ()

    def __len__(self) -> int:
        return int(self.residues.size)

    def as_set(self) -> set[int]:
        return set(int(r) for r in self.residues)

    def tolist(self) -> list[int]:
        return [int(r) for r in self.residues]

    def same_residues(self, other: "SpectrumSet") -> bool:
        return np.array_equal(self.residues, other.residues)


@dataclass(eq=False)
class Spectrum:
    """Everything one enumeration pass produces.

    ``owner[r]`` is ``q+1`` for the set owning residue ``r`` (0 if none) on
    the dense path; ``union`` lists every owned residue grouped by set.
    """

    n: int
    d: int
    p: int
    sets: list[SpectrumSet]
    tuples: int
    total_count: int
    zero_hits: int
    distinct_hit: int
    has_overlaps: bool
    owner: Optional[np.ndarray] = field(default=None, repr=False)
    union: Optional[np.ndarray] = field(default=None, repr=False)
    backend: str = "python"


def target_sums(n: int, d: int) -> list[int]:
    return [d * (q + 1) - n - 2 for q in range(n + 1)]


def tuple_count(n: int, d: int) -> int:
    return (d - 1) ** (n + 2)


def digit_sum_counts(k: int, max_digit: int) -> list[int]:
    """Number of tuples in ``{0..max_digit}^k`` with each digit sum."""
    counts = [1]
    for _ in range(k):
        nxt = [0] * (len(counts) + max_digit)
        for s, c in enumerate(counts):
            if c:
                for a in range(max_digit + 1):
                    nxt[s + a] += c
        counts = nxt
    return counts


def _weights(n: int, d: int, p: int) -> list[int]:
    return [pow(1 - d, i, p) for i in range(n + 2)]


def _qindex(n: int, d: int) -> np.ndarray:
    max_sum = (d - 2) * (n + 2)
    idx = np.full(max_sum + 1, -1, dtype=np.int16)
    for q, t in enumerate(target_sums(n, d)):
        if 0 <= t <= max_sum:
            idx[t] = q
    return idx


def check_wagstaff(n: int, d: int) -> int:
    if n < 1 or d < 3:
        raise NotWagstaffType(f"({n},{d}) is out of range")
    if not is_prime(n + 2).is_prime_like:
        raise NotWagstaffType(f"n+2 = {n + 2} is not prime")
    p = wagstaff_p(n, d)
    if not is_prime(p).is_prime_like:
        raise NotWagstaffType(f"p = {p} is not prime")
    return p


def _slice_bounds(max_digit: int, workers: int) -> list[tuple[int, int]]:
    width = max_digit + 1
    parts = min(workers, width)
    cuts = [round(i * width / parts) for i in range(parts + 1)]
    return [(cuts[i], cuts[i + 1]) for i in range(parts) if cuts[i] < cuts[i + 1]]


def _slice_hits(n: int, d: int, lo: int, hi: int) -> int:
    rest = digit_sum_counts(n + 1, d - 2)
    total = 0
    for b0 in range(lo, hi):
        for t in target_sums(n, d):
            s = t - b0
            if 0 <= s < len(rest):
                total += rest[s]
    return total


def _collect_slice(args):
    backend, weights, p, max_digit, qindex, lo, hi, total = args
    impl = kernels.get(backend)
    return impl.collect_cube(np.asarray(weights, dtype=np.int64), p, max_digit, qindex, lo, hi, total)


def _resolve_workers(parallelism: Union[int, str, None]) -> int:
    if parallelism in (None, "auto"):
        return os.cpu_count() or 1
    workers = int(parallelism)
    if workers < 1:
        raise ValueError("parallelism must be positive")
    return workers


def enumerate_spectrum(
    n: int,
    d: int,
    budget: int = DEFAULT_BUDGET,
    parallelism: Union[int, str] = 1,
    backend: Optional[str] = None,
    force: bool = False,
) -> Spectrum:
    """Enumerate every exponent tuple once and bucket residues by target sum.

    ``force`` skips the Wagstaff gate (``n+2`` must still be odd so that
    ``p`` is an integer).
    """
    p = wagstaff_p(n, d) if force else check_wagstaff(n, d)
    tuples = tuple_count(n, d)
    if tuples > budget:
        raise BudgetExceeded(tuples, budget)
    backend = backend or kernels.BACKEND
    max_digit = d - 2
    weights = _weights(n, d, p)
    qindex = _qindex(n, d)
    counts = digit_sum_counts(n + 2, max_digit)
    total_count = sum(counts[t] for t in target_sums(n, d) if 0 <= t < len(counts))
    if p >= DENSE_LIMIT:
        return _enumerate_hashed(n, d, p, weights, tuples, total_count)

    owner = np.zeros(p, dtype=np.uint8)
    count = np.zeros(p, dtype=np.uint8)
    impl = kernels.get(backend)
    workers = _resolve_workers(parallelism)
    w_arr = np.asarray(weights, dtype=np.int64)
    if workers == 1:
        zero_hits, extras = impl.mark_cube(w_arr, p, max_digit, qindex, 0, max_digit + 1, owner, count)
    else:
        jobs = [
            (backend, weights, p, max_digit, qindex, lo, hi, _slice_hits(n, d, lo, hi))
            for lo, hi in _slice_bounds(max_digit, workers)
        ]
        zero_hits, extras = 0, []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res, qs in pool.map(_collect_slice, jobs):
                z, e = impl.mark_pairs(res, qs, owner, count)
                zero_hits += z
                extras.extend(e)
    return _assemble_dense(n, d, p, tuples, total_count, zero_hits, extras, owner, count, backend)


def _assemble_dense(n, d, p, tuples, total_count, zero_hits, extras, owner, count, backend) -> Spectrum:
    extra_by_q: dict[int, set[int]] = {}
    for r, q in extras:
        extra_by_q.setdefault(q, set()).add(r)
    sets = []
    pieces = []
    for q, t in enumerate(target_sums(n, d)):
        owned = np.flatnonzero(owner == q + 1).astype(np.uint64)
        pieces.append(owned)
        res = owned
        if q in extra_by_q:
            res = np.union1d(owned, np.fromiter(extra_by_q[q], dtype=np.uint64))
        viol = tuple(int(r) for r in res[count[res] > 1]) if res.size else ()
        sets.append(SpectrumSet(q, p, t, res, viol))
    order = sorted(range(len(pieces)), key=lambda i: pieces[i].size)
    union = np.concatenate([pieces[i] for i in order]) if pieces else np.empty(0, dtype=np.uint64)
    return Spectrum(
        n=n,
        d=d,
        p=p,
        sets=sets,
        tuples=tuples,
        total_count=total_count,
        zero_hits=zero_hits,
        distinct_hit=int(union.size),
        has_overlaps=bool(extras),
        owner=owner,
        union=union,
        backend=backend,
    )


def _enumerate_hashed(n, d, p, weights, tuples, total_count) -> Spectrum:
    """Pure-Python odometer with hashed residue storage for ``p >= 2**32``."""
    max_digit = d - 2
    k = n + 2
    targets = {t: q for q, t in enumerate(target_sums(n, d))}
    hits: dict[int, list[int]] = {}
    digits = [0] * k
    r = 0
    s = 0
    zero_hits = 0
    while True:
        q = targets.get(s)
        if q is not None:
            hits.setdefault(r, []).append(q)
            if r == 0:
                zero_hits += 1
        j = k - 1
        while j >= 0:
            if digits[j] < max_digit:
                digits[j] += 1
                r = (r + weights[j]) % p
                s += 1
                break
            r = (r - max_digit * weights[j]) % p
            s -= max_digit
            digits[j] = 0
            j -= 1
        if j < 0:
            break
    sets = []
    overlaps = False
    for q, t in enumerate(target_sums(n, d)):
        res = sorted(r for r, qs in hits.items() if q in qs)
        viol = tuple(r for r in res if len(hits[r]) > 1)
        overlaps = overlaps or any(len(set(hits[r])) > 1 for r in res)
        sets.append(SpectrumSet(q, p, t, np.array(res, dtype=object), viol))
    return Spectrum(n, d, p, sets, tuples, total_count, zero_hits, len(hits), overlaps, backend="hashed")


def spectrum_sets(
    n: int,
    d: int,
    budget: int = DEFAULT_BUDGET,
    parallelism: Union[int, str] = 1,
    backend: Optional[str] = None,
) -> list[SpectrumSet]:
    return enumerate_spectrum(n, d, budget, parallelism, backend).sets


# ----------------------------------------------------------- extremality

@dataclass
class ExtremalityReport:
    total_count: int
    rank_expected: int
    zero_hits: int
    distinct_union: bool
    hodge_symmetry: bool
    shift_invariant: bool
    order_of_1_minus_d: int
    n_plus_2: int

    @property
    def extremal(self) -> bool:
        return self.total_count == self.rank_expected and self.zero_hits == 0 and self.distinct_union

    @property
    def order_ok(self) -> bool:
        return self.order_of_1_minus_d == self.n_plus_2

    def to_json(self) -> dict:
        return {
            "total_count": str(self.total_count),
            "rank_expected": str(self.rank_expected),
            "zero_hits": str(self.zero_hits),
            "distinct_union": self.distinct_union,
            "hodge_symmetry": self.hodge_symmetry,
            "shift_invariant": self.shift_invariant,
            "order_of_1_minus_d": self.order_of_1_minus_d,
            "extremal": self.extremal,
        }


def _negated(s: SpectrumSet) -> np.ndarray:
    p = s.p
    return np.sort((np.uint64(p) - s.residues.astype(np.uint64)) % np.uint64(p))


def _scaled(s: SpectrumSet, m: int) -> np.ndarray:
    p = s.p
    return np.sort((s.residues.astype(np.uint64) * np.uint64(m % p)) % np.uint64(p))


def extremality_report(spectrum: Spectrum) -> ExtremalityReport:
    """Multiplicity-one covering of ``{1..p-1}``, conjugation symmetry and shift invariance."""
    p, n, d = spectrum.p, spectrum.n, spectrum.d
    distinct = (
        not spectrum.has_overlaps
        and spectrum.zero_hits == 0
        and spectrum.distinct_hit == spectrum.total_count == p - 1
        and not any(s.multiplicity_violations for s in spectrum.sets)
    )
    unit = (1 - d) % p
    dense = spectrum.owner is not None and distinct
    if dense:
        impl = kernels.get(spectrum.backend)
        owner = spectrum.owner
        union = spectrum.union
        # owner tag of -r must be n+2 - tag(r), i.e. S_{n-q} = -S_q
        neg = (np.uint64(p) - union) % np.uint64(p)
        hodge = bool(np.all(owner[neg].astype(np.int64) == (n + 2) - owner[union].astype(np.int64)))
        shift = bool(impl.stabilizes(unit, union, owner, p))
    elif spectrum.p < DENSE_LIMIT:
        sets = spectrum.sets
        hodge = all(np.array_equal(sets[n - q].residues, _negated(sets[q])) for q in range(n + 1))
        shift = all(np.array_equal(s.residues, _scaled(s, unit)) for s in sets)
    else:
        sets = [s.as_set() for s in spectrum.sets]
        hodge = all(sets[n - q] == {(-r) % p for r in sets[q]} for q in range(n + 1))
        shift = all(s == {(unit * r) % p for r in s} for s in sets)
    return ExtremalityReport(
        total_count=spectrum.total_count,
        rank_expected=p - 1,
        zero_hits=spectrum.zero_hits,
        distinct_union=distinct,
        hodge_symmetry=hodge,
        shift_invariant=shift,
        order_of_1_minus_d=multiplicative_order(unit, p),
        n_plus_2=n + 2,
    )


# ------------------------------------------------------------ stabilizer

def cyclic_subgroup(g: int, p: int) -> list[int]:
    g %= p
    out = {1}
    x = g
    while x != 1:
        out.add(x)
        x = x * g % p
    return sorted(out)


def is_subgroup(elements: Iterable[int], p: int) -> bool:
    group = set(elements)
    if 1 not in group:
        return False
    return all((a * b) % p in group for a in group for b in group) and all(
        pow(a, -1, p) in group for a in group
    )


@dataclass
class StabilizerResult:
    stabilizer: list[int]
    expected: list[int]
    closed: bool
    candidates_checked: int = 0

    @property
    def condition_holds(self) -> bool:
        return self.closed and self.stabilizer == self.expected


def _candidates(smallest: SpectrumSet, p: int) -> list[int]:
    s0 = int(smallest.residues[0])
    inv = pow(s0, -1, p)
    return sorted({int(t) * inv % p for t in smallest.residues})


def stabilizer(
    sets: Union[Spectrum, Sequence[SpectrumSet]],
    p: Optional[int] = None,
    d: Optional[int] = None,
    backend: Optional[str] = None,
) -> StabilizerResult:
    """Elements ``m`` of ``(Z/p)^x`` with ``m S_q = S_q`` for all q, found by candidate pruning.

    Any stabilizing ``m`` sends a fixed ``s0`` of the smallest nonempty set
    back into that set, so ``m`` ranges over ``t / s0`` for ``t`` in it.
    """
    spectrum = sets if isinstance(sets, Spectrum) else None
    if spectrum is not None:
        set_list, p, d = spectrum.sets, spectrum.p, spectrum.d
    else:
        set_list = list(sets)
        if p is None or d is None:
            raise ValueError("p and d are required when passing bare sets")
    if any(s.multiplicity_violations for s in set_list):
        raise ValueError("stabilizer expects an extremal spectrum (no repeated residues)")
    nonempty = [s for s in set_list if len(s)]
    if not nonempty:
        raise EmptySpectrum("every S_q is empty")
    smallest = min(nonempty, key=len)
    candidates = _candidates(smallest, p)

    owner = union = None
    if spectrum is not None and spectrum.owner is not None and not spectrum.has_overlaps:
        owner, union = spectrum.owner, spectrum.union
        backend = backend or spectrum.backend
    elif p < DENSE_LIMIT and _disjoint(set_list):
        owner = np.zeros(p, dtype=np.uint8)
        for k, s in enumerate(set_list):
            owner[s.residues.astype(np.int64)] = k + 1
        ordered = sorted(nonempty, key=len)
        union = np.concatenate([s.residues.astype(np.uint64) for s in ordered])

    found = []
    if owner is not None:
        impl = kernels.get(backend)
        for m in candidates:
            if impl.stabilizes(m, union, owner, p):
                found.append(m)
    else:
        py_sets = sorted((s.as_set() for s in nonempty), key=len)
        for m in candidates:
            if all({m * r % p for r in s} == s for s in py_sets):
                found.append(m)
    return StabilizerResult(
        stabilizer=found,
        expected=cyclic_subgroup(1 - d, p),
        closed=is_subgroup(found, p),
        candidates_checked=len(candidates),
    )


def _disjoint(set_list: Sequence[SpectrumSet]) -> bool:
    total = sum(len(s) for s in set_list)
    if total == 0:
        return True
    return np.unique(np.concatenate([s.residues.astype(np.uint64) for s in set_list])).size == total


def stabilizer_exhaustive(set_list: Sequence[SpectrumSet], p: int) -> list[int]:
    """Scan every unit mod p; the reference the pruned search is checked against."""
    py_sets = [s.as_set() for s in set_list if len(s)]
    out = []
    for m in range(1, p):
        if all(all(m * r % p in s for r in s) for s in py_sets):
            out.append(m)
    return out


def set_stabilizer(residues: Iterable[int], p: int) -> list[int]:
    """Multiplicative stabilizer of one residue set."""
    s = {int(r) % p for r in residues}
    s.discard(0)
    if not s:
        raise EmptySpectrum("empty set")
    s0 = min(s)
    inv = pow(s0, -1, p)
    return sorted(m for m in {t * inv % p for t in s} if all(m * r % p in s for r in s))


# ------------------------------------------------------------- pipeline

@dataclass
class TorelliVerdict:
    n: int
    d: int
    p: int
    wagstaff_type: bool
    excluded_case: bool
    tuples_enumerated: int
    report: ExtremalityReport
    result: StabilizerResult
    spectrum: Spectrum = field(repr=False)
    timings: dict = field(default_factory=dict)

    @property
    def extremal(self) -> bool:
        return self.report.extremal

    @property
    def generated_by_1_minus_d(self) -> bool:
        return self.result.stabilizer == self.result.expected

    @property
    def condition_holds(self) -> bool:
        return self.extremal and self.result.condition_holds

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "p": str(self.p),
            "wagstaff_type": self.wagstaff_type,
            "extremal": self.extremal,
            "stabilizer": self.result.stabilizer,
            "generated_by_1_minus_d": self.generated_by_1_minus_d,
            "condition_holds": self.condition_holds,
            "excluded_case": self.excluded_case,
            "tuples_enumerated": str(self.tuples_enumerated),
        }


def torelli_check(
    n: int,
    d: int,
    budget: int = DEFAULT_BUDGET,
    parallelism: Union[int, str] = 1,
    backend: Optional[str] = None,
) -> TorelliVerdict:
    """Wagstaff gate, enumeration, extremality, stabilizer, verdict."""
    timings = {}
    t0 = time.perf_counter()
    p = check_wagstaff(n, d)
    spectrum = enumerate_spectrum(n, d, budget, parallelism, backend)
    t1 = time.perf_counter()
    report = extremality_report(spectrum)
    t2 = time.perf_counter()
    result = stabilizer(spectrum)
    t3 = time.perf_counter()
    timings.update(enumerate=t1 - t0, extremality=t2 - t1, stabilizer=t3 - t2)
    return TorelliVerdict(
        n=n,
        d=d,
        p=p,
        wagstaff_type=True,
        excluded_case=(n, d) in CONJECTURE_EXCLUDED,
        tuples_enumerated=spectrum.tuples,
        report=report,
        result=result,
        spectrum=spectrum,
        timings=timings,
    )


# --------------------------------------------------------- cubic appendix

def appendix_cubic_sets(n: int) -> SpectrumSet:
    """Pair sums ``(-2)^i + (-2)^j`` (``i < j``) mod ``p = (2^{n+2}+1)/3``.

    This is the ``S_q`` with target digit sum 2 when ``3 | n+4``; for
    other ``n`` the set is returned with ``q=None``.
    """
    if n < 1 or not is_prime(n + 2).is_prime_like:
        raise ValueError("n+2 must be prime")
    p = wagstaff_p(n, 3)
    powers = [pow(-2, i, p) for i in range(n + 2)]
    sums = [(powers[i] + powers[j]) % p for i in range(n + 2) for j in range(i + 1, n + 2)]
    seen: dict[int, int] = {}
    for s in sums:
        seen[s] = seen.get(s, 0) + 1
    viol = tuple(sorted(r for r, c in seen.items() if c > 1))
    q = (n + 4) // 3 - 1 if (n + 4) % 3 == 0 else None
    residues = np.array(sorted(seen), dtype=np.uint64)
    return SpectrumSet(q, p, 2, residues, viol)
