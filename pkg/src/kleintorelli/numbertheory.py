"""Primality and the census of Klein hypersurfaces of Wagstaff type."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import isqrt
from typing import Optional

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Miller-Rabin with the first 12 prime bases is exact below this bound
DETERMINISTIC_BOUND = 318665857834031151167461


class Primality(enum.Enum):
    PRIME = "Prime"
    COMPOSITE = "Composite"
    PROBABLE_PRIME = "ProbablePrime"

    @property
    def is_prime_like(self) -> bool:
        return self is not Primality.COMPOSITE


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    """Strong Lucas test with Selfridge's parameter choice (method A)."""
    if isqrt(n) ** 2 == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d = n + 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def half(x):
        return (x + n if x & 1 else x) // 2 % n

    # binary ladder for U_d, V_d
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = half(P * U + V), half(D * U + P * V)
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> Primality:
    """Deterministic below :data:`DETERMINISTIC_BOUND`, Baillie-PSW above it."""
    if n < 2:
        return Primality.COMPOSITE
    for p in _SMALL_PRIMES:
        if n == p:
            return Primality.PRIME
        if n % p == 0:
            return Primality.COMPOSITE
    if n < DETERMINISTIC_BOUND:
        ok = all(_strong_probable_prime(n, a) for a in _SMALL_PRIMES)
        return Primality.PRIME if ok else Primality.COMPOSITE
    if _strong_probable_prime(n, 2) and _strong_lucas_probable_prime(n):
        return Primality.PROBABLE_PRIME
    return Primality.COMPOSITE


def wagstaff_p(n: int, d: int) -> int:
    """``((d-1)^{n+2} + 1) / d``; exact only when n+2 is odd."""
    if n < 1 or d < 3:
        raise ValueError("need n >= 1 and d >= 3")
    num = (d - 1) ** (n + 2) + 1
    q, r = divmod(num, d)
    if r:
        raise ArithmeticError(f"{d} does not divide (d-1)^{n + 2} + 1")
    return q


def multiplicative_order(a: int, p: int) -> int:
    """Order of ``a`` in ``(Z/pZ)^x`` for prime ``p``."""
    a %= p
    if a == 0:
        raise ValueError("0 is not a unit")
    order = p - 1
    m = order
    f = 2
    factors = []
    while f * f <= m:
        if m % f == 0:
            factors.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        factors.append(m)
    for q in factors:
        while order % q == 0 and pow(a, order // q, p) == 1:
            order //= q
    return order


# the stabilizer conjecture is not asserted for the Klein cubic threefold
CONJECTURE_EXCLUDED = frozenset({(3, 3)})


@dataclass(frozen=True)
class WagstaffResult:
    n: int
    d: int
    p: Optional[int]
    n_plus_2_prime: bool
    p_prime: Optional[Primality]
    excluded: bool = False

    @property
    def is_wagstaff_type(self) -> bool:
        return self.n_plus_2_prime and self.p_prime is not None and self.p_prime.is_prime_like

    @property
    def cell(self) -> str:
        if self.is_wagstaff_type and not self.excluded:
            return str(self.p)
        return "--"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "p": None if self.p is None else str(self.p),
            "n_plus_2_prime": self.n_plus_2_prime,
            "p_prime": None if self.p_prime is None else self.p_prime.value,
            "is_wagstaff_type": self.is_wagstaff_type,
            "excluded": self.excluded,
        }


def wagstaff_result(n: int, d: int) -> WagstaffResult:
    """Classify ``(n, d)``.  When n+2 is even ``p`` is not an integer and is left as ``None``."""
    n2 = is_prime(n + 2).is_prime_like
    if (n + 2) % 2 == 0:
        return WagstaffResult(n, d, None, n2, None, (n, d) in CONJECTURE_EXCLUDED)
    p = wagstaff_p(n, d)
    return WagstaffResult(n, d, p, n2, is_prime(p), (n, d) in CONJECTURE_EXCLUDED)


def wagstaff_scan(n_max: int, d_max: int, n_min: int = 3, d_min: int = 3) -> list[WagstaffResult]:
    """Every ``(n, d)`` with n+2 prime in the box, row-major by n."""
    if n_max < n_min or d_max < d_min:
        raise ValueError("bounds must be at least 3")
    rows = []
    for n in range(n_min, n_max + 1):
        if not is_prime(n + 2).is_prime_like:
            continue
        for d in range(d_min, d_max + 1):
            rows.append(wagstaff_result(n, d))
    return rows


def render_table(results: list[WagstaffResult]) -> str:
    ns = sorted({r.n for r in results})
    ds = sorted({r.d for r in results})
    cells = {(r.n, r.d): r.cell for r in results}
    header = ["n\\d"] + [str(d) for d in ds]
    body = [[str(n)] + [cells.get((n, d), "") for d in ds] for n in ns]
    widths = [max(len(row[k]) for row in [header] + body) for k in range(len(header))]
    lines = []
    for row in [header] + body:
        lines.append(" | ".join(c.rjust(w) for c, w in zip(row, widths)))
        if row is header:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines)
