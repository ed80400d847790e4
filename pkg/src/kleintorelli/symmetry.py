"""Generalized permutation matrices with root-of-unity entries and automorphism groups.

Roots of unity are never evaluated: an entry ``zeta_N^k`` is stored as the
residue ``k mod N``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import gcd, lcm
from typing import Optional, Sequence, Tuple, Union

from .forms import DimensionMismatch, Form, family_form, klein
from .linalg import smith_normal_form


@dataclass(frozen=True)
class PhaseMatrix:
    """Matrix whose only nonzero entries are ``M[perm[i], i] = zeta_N^phases[i]``.

    Acting on a form by substitution, ``x_{perm[i]} -> zeta_N^{phases[i]} x_i``.
    """

    num_vars: int
    perm: Tuple[int, ...]
    modulus: int
    phases: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(self.num_vars)):
            raise ValueError(f"{self.perm} is not a permutation of 0..{self.num_vars - 1}")
        if len(self.phases) != self.num_vars:
            raise DimensionMismatch("phase vector has the wrong length")
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if any(not 0 <= a < self.modulus for a in self.phases):
            object.__setattr__(self, "phases", tuple(a % self.modulus for a in self.phases))

    @classmethod
    def identity(cls, num_vars: int) -> "PhaseMatrix":
        return cls(num_vars, tuple(range(num_vars)), 1, (0,) * num_vars)

    @classmethod
    def diagonal(cls, modulus: int, phases: Sequence[int]) -> "PhaseMatrix":
        return cls(len(phases), tuple(range(len(phases))), modulus, tuple(p % modulus for p in phases))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "PhaseMatrix":
        return cls(len(perm), tuple(perm), 1, (0,) * len(perm))

    @classmethod
    def cyclic_shift(cls, num_vars: int) -> "PhaseMatrix":
        """``(x_0 : ... : x_{n+1}) -> (x_1 : ... : x_{n+1} : x_0)``."""
        return cls.permutation([(i - 1) % num_vars for i in range(num_vars)])

    @property
    def is_diagonal(self) -> bool:
        return all(p == i for i, p in enumerate(self.perm))

    def lift(self, modulus: int) -> "PhaseMatrix":
        if modulus % self.modulus:
            raise ValueError(f"cannot lift modulus {self.modulus} to {modulus}")
        k = modulus // self.modulus
        return PhaseMatrix(self.num_vars, self.perm, modulus, tuple(a * k for a in self.phases))

    def entries(self) -> list[tuple[int, int, int]]:
        """Nonzero entries as ``(row, column, phase)``."""
        return [(self.perm[i], i, self.phases[i]) for i in range(self.num_vars)]

    def __matmul__(self, other: "PhaseMatrix") -> "PhaseMatrix":
        return compose(self, other)

    def inverse(self) -> "PhaseMatrix":
        perm = [0] * self.num_vars
        phases = [0] * self.num_vars
        for i, p in enumerate(self.perm):
            perm[p] = i
            phases[p] = -self.phases[i] % self.modulus
        return PhaseMatrix(self.num_vars, tuple(perm), self.modulus, tuple(phases))

    def power(self, k: int) -> "PhaseMatrix":
        if k < 0:
            return self.inverse().power(-k)
        result = PhaseMatrix.identity(self.num_vars)
        base = self
        while k:
            if k & 1:
                result = compose(result, base)
            base = compose(base, base)
            k >>= 1
        return result.reduced()

    def reduced(self) -> "PhaseMatrix":
        """Same matrix over the smallest modulus its phases need."""
        g = self.modulus
        for a in self.phases:
            g = gcd(g, a)
        if g <= 1:
            return self
        return PhaseMatrix(self.num_vars, self.perm, self.modulus // g, tuple(a // g for a in self.phases))

    def to_json(self) -> dict:
        return {"perm": list(self.perm), "modulus": str(self.modulus), "phases": [str(a) for a in self.phases]}


def compose(a: PhaseMatrix, b: PhaseMatrix) -> PhaseMatrix:
    """Matrix product ``a @ b``; moduli are merged by lcm."""
    if a.num_vars != b.num_vars:
        raise DimensionMismatch("phase matrices of different sizes")
    n = lcm(a.modulus, b.modulus)
    a, b = a.lift(n), b.lift(n)
    perm = tuple(a.perm[b.perm[c]] for c in range(a.num_vars))
    phases = tuple((b.phases[c] + a.phases[b.perm[c]]) % n for c in range(a.num_vars))
    return PhaseMatrix(a.num_vars, perm, n, phases)


def projectively_equal(a: PhaseMatrix, b: PhaseMatrix) -> bool:
    """Equal up to a scalar root of unity."""
    if a.num_vars != b.num_vars or a.perm != b.perm:
        return False
    n = lcm(a.modulus, b.modulus)
    a, b = a.lift(n), b.lift(n)
    shift = (a.phases[0] - b.phases[0]) % n
    return all((x - y) % n == shift for x, y in zip(a.phases, b.phases))


def permutation_order(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    order = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        order = lcm(order, length)
    return order


def projective_order(g: PhaseMatrix) -> int:
    """Order of the image of ``g`` in PGL."""
    k = permutation_order(g.perm)
    h = g.power(k)
    base = h.phases[0]
    g_ = h.modulus
    for a in h.phases:
        g_ = gcd(g_, (a - base) % h.modulus)
    return k * (h.modulus // g_)


def invariance_check(form: Form, g: PhaseMatrix) -> Optional[int]:
    """Return ``c`` with ``F o g = zeta_N^c F``, or ``None`` if ``g`` does not preserve ``F`` projectively."""
    if g.num_vars != form.num_vars:
        raise DimensionMismatch("phase matrix and form have different variable counts")
    coeffs = form.as_dict()
    n = g.modulus
    c = None
    for mono, coeff in form.terms:
        # x_{perm(i)} -> zeta^{ph_i} x_i, so x_i receives exponent alpha_{perm(i)}
        image = tuple(mono[g.perm[i]] for i in range(g.num_vars))
        if coeffs.get(image) != coeff:
            return None
        phase = sum(image[i] * g.phases[i] for i in range(g.num_vars)) % n
        if c is None:
            c = phase
        elif phase != c:
            return None
    return c


# ---------------------------------------------------------- diagonal group

class InfiniteStabilizer(ValueError):
    def __init__(self, rank_defect: int):
        self.rank_defect = rank_defect
        super().__init__(f"diagonal stabilizer is positive-dimensional (rank defect {rank_defect})")


@dataclass(frozen=True)
class DiagonalGroup:
    """Projective diagonal automorphisms as a product of cyclic groups.

    Generator ``k`` is the diagonal phase matrix with modulus
    ``invariant_factors[k]`` and the given phase exponents.
    """

    invariant_factors: Tuple[int, ...]
    generators: Tuple[PhaseMatrix, ...]

    @property
    def order(self) -> int:
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    @property
    def modulus(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def is_cyclic(self) -> bool:
        return len(self.invariant_factors) <= 1

    def to_json(self) -> dict:
        return {
            "invariant_factors": [str(f) for f in self.invariant_factors],
            "order": str(self.order),
            "generators": [g.to_json() for g in self.generators],
        }


def exponent_difference_matrix(form: Form) -> list[list[int]]:
    """Columns are ``alpha - alpha_0`` written in the basis ``e_k - e_{last}`` of trace-zero vectors."""
    monos = form.monomials()
    base = monos[0]
    r = form.num_vars - 1
    cols = [[m[k] - base[k] for k in range(r)] for m in monos[1:]]
    return [[col[k] for col in cols] for k in range(r)]


def diagonal_automorphisms(form: Form) -> DiagonalGroup:
    """Group of diagonal matrices fixing ``form`` up to scalar, modulo scalars.

    Computed as the dual of ``L / L'`` with ``L`` the trace-zero lattice and
    ``L'`` spanned by exponent differences, via Smith normal form.
    """
    r = form.num_vars - 1
    mat = exponent_difference_matrix(form)
    if not mat or not mat[0]:
        raise InfiniteStabilizer(r)
    diag, u, _ = smith_normal_form(mat)
    if len(diag) < r:
        raise InfiniteStabilizer(r - len(diag))
    factors = []
    gens = []
    for i, f in enumerate(diag):
        if f == 1:
            continue
        # character chi_i(x) = (U x)_i / f on L; phase of x_k is U[i][k]/f, last coordinate 0
        phases = [u[i][k] % f for k in range(r)] + [0]
        factors.append(f)
        gens.append(PhaseMatrix.diagonal(f, phases))
    return DiagonalGroup(tuple(factors), tuple(gens))


# ----------------------------------------------------------- family table

def klein_m(n: int, d: int) -> int:
    """``((d-1)^{n+2} - (-1)^{n+2}) / d``, the order of the diagonal Klein group."""
    if n < 0 or d < 2:
        raise ValueError("need n >= 0 and d >= 2")
    num = (d - 1) ** (n + 2) - (-1) ** (n + 2)
    q, rem = divmod(num, d)
    assert rem == 0, "d must divide (d-1)^(n+2) - (-1)^(n+2)"
    return q


class OutOfTableRange(ValueError):
    pass


class GroupKind(enum.Enum):
    CYCLIC_TOWER = "CyclicTower"
    SEMIDIRECT_CYCLIC = "SemidirectCyclic"
    PRODUCT_SEMIDIRECT = "ProductSemidirect"
    NAMED = "Named"


class NamedGroup(enum.Enum):
    PSL2_7 = "PSL2_7"
    PSL2_11 = "PSL2_11"
    SYM5 = "Sym5"
    ELLIPTIC_SEMIDIRECT = "EllipticSemidirect"
    UNKNOWN_INFINITE = "UnknownInfinite"


_NAMED_ORDERS: dict[NamedGroup, Union[int, str]] = {
    NamedGroup.PSL2_7: 168,
    NamedGroup.PSL2_11: 660,
    NamedGroup.SYM5: 120,
    NamedGroup.ELLIPTIC_SEMIDIRECT: "infinite",
    NamedGroup.UNKNOWN_INFINITE: "infinite",
}

_NAMED_LABELS = {
    NamedGroup.PSL2_7: "PSL2(F7)",
    NamedGroup.PSL2_11: "PSL2(F11)",
    NamedGroup.SYM5: "S5",
    NamedGroup.ELLIPTIC_SEMIDIRECT: "X x| Z/6Z (elliptic curve)",
    NamedGroup.UNKNOWN_INFINITE: "unknown (infinite)",
}


@dataclass(frozen=True)
class GroupDescriptor:
    """Abstract finite group shape.

    ``params`` depends on ``kind``: the invariant factors for a cyclic
    tower, ``(m, k)`` for ``Z/m x| Z/k``, ``(d, r, s)`` for
    ``(Z/d)^r x| Sym(s)``, and a :class:`NamedGroup` for named groups.
    """

    kind: GroupKind
    params: tuple
    generators: Tuple[PhaseMatrix, ...] = field(default=(), compare=False)

    @property
    def order(self) -> Union[int, str]:
        if self.kind is GroupKind.CYCLIC_TOWER:
            out = 1
            for f in self.params:
                out *= f
            return out
        if self.kind is GroupKind.SEMIDIRECT_CYCLIC:
            m, k = self.params
            return m * k
        if self.kind is GroupKind.PRODUCT_SEMIDIRECT:
            d, r, s = self.params
            fact = 1
            for i in range(2, s + 1):
                fact *= i
            return d**r * fact
        return _NAMED_ORDERS[self.params[0]]

    @property
    def is_finite(self) -> bool:
        return isinstance(self.order, int)

    def label(self) -> str:
        if self.kind is GroupKind.CYCLIC_TOWER:
            return " x ".join(f"Z/{f}Z" for f in self.params) or "trivial"
        if self.kind is GroupKind.SEMIDIRECT_CYCLIC:
            m, k = self.params
            return f"Z/{m}Z x| Z/{k}Z"
        if self.kind is GroupKind.PRODUCT_SEMIDIRECT:
            d, r, s = self.params
            return f"(Z/{d}Z)^{r} x| S{s}"
        return _NAMED_LABELS[self.params[0]]

    def describe(self) -> str:
        order = self.order
        if isinstance(order, int):
            return f"{self.label()}, order {order}"
        label = self.label()
        return label if order in label else f"{label}, {order}"

    def structure_json(self) -> dict:
        if self.kind is GroupKind.NAMED:
            return {"kind": self.kind.value, "tag": self.params[0].value}
        if self.kind is GroupKind.CYCLIC_TOWER:
            return {"kind": self.kind.value, "invariant_factors": [str(f) for f in self.params]}
        if self.kind is GroupKind.SEMIDIRECT_CYCLIC:
            return {"kind": self.kind.value, "m": str(self.params[0]), "k": str(self.params[1])}
        d, r, s = self.params
        return {"kind": self.kind.value, "d": str(d), "r": r, "s": s}

    def to_json(self) -> dict:
        order = self.order
        return {
            "structure": self.structure_json(),
            "label": self.label(),
            "order": str(order) if isinstance(order, int) else order,
            "generators": [g.to_json() for g in self.generators],
        }


def _named(tag: NamedGroup) -> GroupDescriptor:
    return GroupDescriptor(GroupKind.NAMED, (tag,))


def klein_generators(n: int, d: int, modulus: Optional[int] = None) -> tuple[PhaseMatrix, PhaseMatrix]:
    """The diagonal generator ``sigma`` (phases ``(1-d)^i``) and the cyclic shift ``nu``."""
    m = klein_m(n, d)
    modulus = d * m if modulus is None else modulus
    phases = [pow(1 - d, i, modulus) for i in range(n + 2)]
    return PhaseMatrix.diagonal(modulus, phases), PhaseMatrix.cyclic_shift(n + 2)


def family_aut_group(family: str, n: int, d: int) -> GroupDescriptor:
    family = family.lower()
    if n < 1 or d < 3:
        raise OutOfTableRange(f"{family} ({n},{d}): need n >= 1 and d >= 3")
    if family == "fermat":
        if (n, d) in ((1, 3), (2, 4)):
            raise OutOfTableRange(f"fermat ({n},{d}) has an infinite automorphism group")
        return GroupDescriptor(GroupKind.PRODUCT_SEMIDIRECT, (d, n + 1, n + 2))
    if family == "delsarte":
        if n < 2 or d < 4 or (n, d) == (2, 4):
            raise OutOfTableRange(f"delsarte ({n},{d}) is outside n >= 2, d >= 4, (n,d) != (2,4)")
        g = diagonal_automorphisms(family_form("delsarte", n, d)).generators
        return GroupDescriptor(GroupKind.CYCLIC_TOWER, ((d - 1) ** (n + 1),), g)
    if family == "klein":
        named = {
            (1, 3): NamedGroup.ELLIPTIC_SEMIDIRECT,
            (1, 4): NamedGroup.PSL2_7,
            (2, 3): NamedGroup.SYM5,
            (2, 4): NamedGroup.UNKNOWN_INFINITE,
            (3, 3): NamedGroup.PSL2_11,
        }
        if (n, d) in named:
            return _named(named[(n, d)])
        m = klein_m(n, d)
        sigma, nu = klein_generators(n, d, m if gcd(d, m) == 1 else None)
        return GroupDescriptor(GroupKind.SEMIDIRECT_CYCLIC, (m, n + 2), (sigma, nu))
    raise OutOfTableRange(f"unknown family {family!r}")


@dataclass
class KleinGeneratorCheck:
    n: int
    d: int
    m: int
    modulus: int
    sigma_phase: Optional[int]
    nu_phase: Optional[int]
    sigma_order: int
    nu_order: int
    conjugation_ok: bool

    @property
    def ok(self) -> bool:
        return (
            self.sigma_phase is not None
            and self.nu_phase is not None
            and self.sigma_order == self.m
            and self.nu_order == self.n + 2
            and self.conjugation_ok
        )

    def to_json(self) -> dict:
        return {
            "m": str(self.m),
            "modulus": str(self.modulus),
            "sigma_phase": self.sigma_phase,
            "nu_phase": self.nu_phase,
            "sigma_order": str(self.sigma_order),
            "nu_order": self.nu_order,
            "conjugation_ok": self.conjugation_ok,
            "ok": self.ok,
        }


def check_klein_generators(n: int, d: int, modulus: Optional[int] = None) -> KleinGeneratorCheck:
    form = klein(n, d)
    m = klein_m(n, d)
    sigma, nu = klein_generators(n, d, modulus)
    conj = compose(compose(nu, sigma), nu.inverse())
    return KleinGeneratorCheck(
        n=n,
        d=d,
        m=m,
        modulus=sigma.modulus,
        sigma_phase=invariance_check(form, sigma),
        nu_phase=invariance_check(form, nu),
        sigma_order=projective_order(sigma),
        nu_order=projective_order(nu),
        conjugation_ok=projectively_equal(conj, sigma.power(1 - d)),
    )


def verify_klein_generators(n: int, d: int) -> bool:
    """Check sigma and nu on the Klein form: invariance, orders m and n+2, and nu sigma nu^-1 = sigma^(1-d).

    The mod-dm normalization is always checked; the mod-m one as well when
    ``gcd(d, m) == 1``.
    """
    m = klein_m(n, d)
    ok = check_klein_generators(n, d).ok
    if gcd(d, m) == 1:
        ok = ok and check_klein_generators(n, d, m).ok
    return ok
