"""Formal Hecke calculus on truncated q-expansions with exact coefficients.

Operators, acting on f = sum_{n>=1} a_n x^n of weight lambda and character
eps (eps(n) = 0 whenever gcd(n, N) > 1):

    t_p(f) = sum (a_{np} + eps(p) p^{lambda-1} a_{n/p}) x^n     p prime
    U_q(f) = sum a_{nq} x^n                                     q prime
    B_d(f) = sum a_n x^{nd}

with a_{n/m} = 0 when m does not divide n.  (In some displays of the U_q
definition the running index is printed as np; it is read as nq here, i.e.
U_q extracts every q-th coefficient, consistent with U_q B_q = id.)

Truncation is an artifact of the implementation, so every series carries a
reliable order R alongside its stored order T: B_d turns R into min(T, R*d),
while t_p and U_q consume high coefficients and leave only floor(R/p).
Comparisons beyond R are forbidden; the guarded accessor enforces that.

Composite operators follow T_{p^{k+1}} = T_p T_{p^k} - eps(p) p^{lambda-1}
T_{p^{k-1}} on prime powers and multiplicativity across coprime factors,
which yields the pairing identity a_1(T_n f) = a_n(f) for every series.

The oldclass machinery realizes U_p on the span of {B_{p^j} f} for a
normalized eigen-series f: the matrix is (M1) with head entry a_p and a
superdiagonal of ones when p divides the underlying level M, and (M2) with
head column (a_p, -eps(p)p^{lambda-1}) when it does not; the characteristic
polynomial in the second case is (X^2 - a_p X + eps(p)p^{lambda-1}) X^{k-1}.
Jordan data, kernel vectors, the alternating Jordan basis in trivial
character, and the block-diagonal structure for general co-level are checked
on genuine truncated series, not just on the matrices.

Coefficient rings: exact rationals (fractions.Fraction), the quadratic
extension Q(sqrt(D)) (class Quad), and polynomials over Q in one
indeterminate (class PolyQ) for symbolic eigenvalue checks.  All three
support ring operations, equality, and exact division by nonzero integers,
which is all the calculus needs; general cyclotomic characters stay behind
this interface.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .arith import divisors, factorize, is_prime, kronecker, sigma0

# ---------------------------------------------------------------------------
# Coefficient rings
# ---------------------------------------------------------------------------


class Quad:
    """Element a + b*sqrt(disc) of Q(sqrt(disc)), disc squarefree, not 0 or 1."""

    __slots__ = ("disc", "a", "b")

    def __init__(self, disc: int, a=0, b=0):
        if disc in (0, 1):
            raise ValueError("disc must not be 0 or 1")
        self.disc = disc
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _coerce(self, other):
        if isinstance(other, Quad):
            if other.disc != self.disc:
                raise ValueError("mixing different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return Quad(self.disc, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.disc, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Quad(self.disc, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.disc, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(
            self.disc,
            self.a * o.a + self.disc * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def inv(self) -> "Quad":
        nrm = self.a * self.a - self.disc * self.b * self.b
        if nrm == 0:
            raise ZeroDivisionError("zero element of a quadratic field")
        return Quad(self.disc, self.a / nrm, -self.b / nrm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError
            return Quad(self.disc, self.a / other, self.b / other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __eq__(self, other):
        if isinstance(other, Quad):
            return (
                self.disc == other.disc and self.a == other.a and self.b == other.b
            ) or (self.b == 0 and other.b == 0 and self.a == other.a)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.disc, self.a, self.b))

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.disc})"


class PolyQ:
    """Polynomial over Q in one indeterminate y; supports the ring
    operations plus exact division by nonzero scalars."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, (int, Fraction)):
            coeffs = (coeffs,)
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def gen(cls) -> "PolyQ":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def _coerce(self, other):
        if isinstance(other, PolyQ):
            return other
        if isinstance(other, (int, Fraction)):
            return PolyQ(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.c), len(o.c))
        a = list(self.c) + [Fraction(0)] * (n - len(self.c))
        for i, v in enumerate(o.c):
            a[i] += v
        return PolyQ(a)

    __radd__ = __add__

    def __neg__(self):
        return PolyQ([-x for x in self.c])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.c or not o.c:
            return PolyQ(())
        out = [Fraction(0)] * (len(self.c) + len(o.c) - 1)
        for i, x in enumerate(self.c):
            for j, y in enumerate(o.c):
                out[i + j] += x * y
        return PolyQ(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and other != 0:
            return PolyQ([x / other for x in self.c])
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        if not self.c:
            return "0"
        terms = []
        for i, v in enumerate(self.c):
            if v == 0:
                continue
            if i == 0:
                terms.append(str(v))
            elif i == 1:
                terms.append(f"{v}*y")
            else:
                terms.append(f"{v}*y^{i}")
        return " + ".join(terms)


# ---------------------------------------------------------------------------
# Dirichlet characters (trivial and quadratic instances)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    """Character handle with integer values: trivial, or quadratic via the
    Kronecker symbol of a fundamental discriminant.  eps(n) = 0 whenever
    gcd(n, modulus) > 1."""

    modulus: int
    disc: int = 1

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if self.disc != 1 and (self.disc in (0, 1) or self.disc % 4 not in (0, 1)):
            raise ValueError("disc must be a fundamental discriminant")

    @classmethod
    def trivial(cls, modulus: int = 1) -> "DirichletCharacter":
        return cls(modulus, 1)

    @classmethod
    def quadratic(cls, disc: int) -> "DirichletCharacter":
        return cls(abs(disc), disc)

    def __call__(self, n: int) -> int:
        if self.modulus > 1 and gcd(n, self.modulus) != 1:
            return 0
        if self.disc == 1:
            return 1
        return kronecker(self.disc, n)

    @property
    def parity(self) -> int:
        return self(-1)


TRIVIAL_CHARACTER = DirichletCharacter.trivial(1)


# ---------------------------------------------------------------------------
# Truncated q-expansions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QExpansion:
    """Exact coefficients a_1..a_T with a reliable order R <= T.

    Coefficients beyond R are carried but untrusted; coeff() refuses to read
    them.  Weight and character ride along so operators can form
    eps(p) p^{lambda - 1} without extra bookkeeping.
    """

    coeffs: tuple
    order: int
    reliable: int
    weight: int = 2
    eps: DirichletCharacter = TRIVIAL_CHARACTER

    def __post_init__(self):
        if len(self.coeffs) != self.order:
            raise ValueError("need exactly `order` coefficients a_1..a_T")
        if not 0 <= self.reliable <= self.order:
            raise ValueError("reliable order must satisfy 0 <= R <= T")

    def raw(self, n: int):
        """Stored coefficient a_n, 0 outside 1..T.  No reliability guard;
        operator internals only."""
        if 1 <= n <= self.order:
            return self.coeffs[n - 1]
        return 0

    def coeff(self, n: int):
        """Coefficient a_n, refusing indices beyond the reliable order."""
        if not 1 <= n <= self.reliable:
            raise ValueError(f"a_{n} requested but only a_1..a_{self.reliable} are reliable")
        return self.coeffs[n - 1]

    def _compatible(self, other: "QExpansion"):
        if (
            self.order != other.order
            or self.weight != other.weight
            or self.eps != other.eps
        ):
            raise ValueError("series have different order, weight, or character")

    def __add__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        self._compatible(other)
        return QExpansion(
            tuple(x + y for x, y in zip(self.coeffs, other.coeffs)),
            self.order,
            min(self.reliable, other.reliable),
            self.weight,
            self.eps,
        )

    def __sub__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        self._compatible(other)
        return QExpansion(
            tuple(x - y for x, y in zip(self.coeffs, other.coeffs)),
            self.order,
            min(self.reliable, other.reliable),
            self.weight,
            self.eps,
        )

    def __rmul__(self, scalar):
        return QExpansion(
            tuple(scalar * x for x in self.coeffs),
            self.order,
            self.reliable,
            self.weight,
            self.eps,
        )


def make_qexp(coeffs, order=None, weight=2, eps=TRIVIAL_CHARACTER, reliable=None):
    """Series from a list of coefficients a_1, a_2, ... (padded with zeros)."""
    coeffs = list(coeffs)
    if order is None:
        order = len(coeffs)
    coeffs = coeffs[:order] + [0] * (order - len(coeffs))
    if reliable is None:
        reliable = order
    return QExpansion(tuple(coeffs), order, reliable, weight, eps)


def agree_to_reliable(f: QExpansion, g: QExpansion) -> bool:
    return first_disagreement(f, g) is None


def first_disagreement(f: QExpansion, g: QExpansion):
    """First n within the shared reliable range where the series differ,
    as (n, f_n, g_n); None when they agree."""
    r = min(f.reliable, g.reliable)
    for n in range(1, r + 1):
        if f.raw(n) != g.raw(n):
            return (n, f.raw(n), g.raw(n))
    return None


def is_zero_to_reliable(f: QExpansion, up_to: int | None = None) -> bool:
    r = f.reliable if up_to is None else min(up_to, f.reliable)
    return all(f.raw(n) == 0 for n in range(1, r + 1))


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


def op_B(d: int, f: QExpansion) -> QExpansion:
    """B_d: a_n -> a_{n/d}; reliable order grows to min(T, R*d)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    out = [f.raw(n // d) if n % d == 0 else 0 for n in range(1, f.order + 1)]
    return QExpansion(
        tuple(out), f.order, min(f.order, f.reliable * d), f.weight, f.eps
    )


def op_t(p: int, f: QExpansion) -> QExpansion:
    """t_p: a_n -> a_{np} + eps(p) p^{lambda-1} a_{n/p}; reliable order R//p."""
    if not is_prime(p):
        raise ValueError(f"t_p needs p prime, got {p}")
    fac = f.eps(p) * p ** (f.weight - 1)
    out = []
    for n in range(1, f.order + 1):
        v = f.raw(n * p)
        if fac and n % p == 0:
            v = v + fac * f.raw(n // p)
        out.append(v)
    return QExpansion(tuple(out), f.order, f.reliable // p, f.weight, f.eps)


def op_U(q: int, f: QExpansion) -> QExpansion:
    """U_q: a_n -> a_{nq}; reliable order R//q."""
    if not is_prime(q):
        raise ValueError(f"U_q needs q prime, got {q}")
    out = [f.raw(n * q) for n in range(1, f.order + 1)]
    return QExpansion(tuple(out), f.order, f.reliable // q, f.weight, f.eps)


def op_T(n: int, f: QExpansion) -> QExpansion:
    """Composite Hecke operator T_n.

    Prime powers follow T_{p^{k+1}} = T_p T_{p^k} - eps(p) p^{lambda-1}
    T_{p^{k-1}} and coprime factors compose; for p dividing the character
    modulus eps(p) = 0, so T_p degenerates to U_p as it should.  Satisfies
    a_1(T_n f) = a_n(f).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    g = f
    for p, e in sorted(factorize(n).items()):
        g = _op_T_prime_power(p, e, g)
    return g


def _op_T_prime_power(p: int, e: int, f: QExpansion) -> QExpansion:
    fac = f.eps(p) * p ** (f.weight - 1)
    prev, cur = f, op_t(p, f)
    for _ in range(e - 1):
        nxt = op_t(p, cur)
        if fac:
            nxt = nxt - fac * prev
        prev, cur = cur, nxt
    return cur


def random_series(
    rng: random.Random, order: int, weight: int = 2, eps=TRIVIAL_CHARACTER
) -> QExpansion:
    coeffs = [
        Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(order)
    ]
    return QExpansion(tuple(coeffs), order, order, weight, eps)


def formal_eigenform(
    order: int,
    ap_values: dict,
    weight: int = 2,
    eps: DirichletCharacter = TRIVIAL_CHARACTER,
) -> QExpansion:
    """Normalized series (a_1 = 1) built from prescribed prime coefficients
    by the Hecke recursion and multiplicativity, so t_p f = a_p f holds
    exactly for every prime p (with a_p = 0 where unspecified)."""
    a: list = [0] * (order + 1)
    a[1] = 1
    for n in range(2, order + 1):
        p = min(factorize(n))
        pk, rest = p, n // p
        while rest % p == 0:
            pk *= p
            rest //= p
        if rest > 1:
            a[n] = a[pk] * a[rest]
        elif pk == p:
            a[n] = ap_values.get(p, 0)
        else:
            fac = eps(p) * p ** (weight - 1)
            a[n] = a[p] * a[pk // p] - fac * a[pk // (p * p)]
    return QExpansion(tuple(a[1:]), order, order, weight, eps)


# ---------------------------------------------------------------------------
# Relation verification
# ---------------------------------------------------------------------------


@dataclass
class RelationCheck:
    name: str
    params: str
    trials: int
    passed: bool
    failure: str = ""

    def to_json(self) -> dict:
        out = {
            "relation": self.name,
            "params": self.params,
            "trials": self.trials,
            "pass": self.passed,
        }
        if self.failure:
            out["failure"] = self.failure
        return out


@dataclass
class RelationReport:
    order: int
    trials: int
    seed: int
    checks: list
    witness_params: str = ""
    witness_found: bool = False

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "order": self.order,
            "trials": self.trials,
            "seed": self.seed,
            "checks": [c.to_json() for c in self.checks],
            "coprimality_witness": {
                "params": self.witness_params,
                "inequality_witnessed": self.witness_found,
            },
            "pass": self.all_passed,
        }


_RELATION_SUITE = [
    ("B_d B_e = B_e B_d", [(2, 3), (4, 6)], lambda a, b, f: (op_B(a, op_B(b, f)), op_B(b, op_B(a, f)))),
    ("t_p B_d = B_d t_p, gcd(p,d)=1", [(2, 3), (3, 4), (5, 6)], lambda p, d, f: (op_t(p, op_B(d, f)), op_B(d, op_t(p, f)))),
    ("t_p t_q = t_q t_p", [(2, 3), (5, 7)], lambda p, q, f: (op_t(p, op_t(q, f)), op_t(q, op_t(p, f)))),
    ("t_p U_q = U_q t_p, p != q", [(3, 2), (2, 5)], lambda p, q, f: (op_t(p, op_U(q, f)), op_U(q, op_t(p, f)))),
    ("U_q U_r = U_r U_q", [(2, 3), (3, 5)], lambda q, r, f: (op_U(q, op_U(r, f)), op_U(r, op_U(q, f)))),
    ("U_q B_d = B_d U_q, gcd(q,d)=1", [(2, 3), (3, 10)], lambda q, d, f: (op_U(q, op_B(d, f)), op_B(d, op_U(q, f)))),
    ("U_q B_{q^k} = B_{q^{k-1}}", [(2, 1), (2, 2), (3, 2)], lambda q, k, f: (op_U(q, op_B(q**k, f)), op_B(q ** (k - 1), f))),
]


def verify_relations(
    order: int = 200,
    trials: int = 50,
    seed: int = 0,
    weight: int = 2,
    eps: DirichletCharacter = TRIVIAL_CHARACTER,
) -> RelationReport:
    """Check the commutation relations on seeded pseudo-random series.

    Every relation is compared coefficientwise up to the tracked reliable
    order of both sides.  Also hunts the expected counterexample showing
    t_p B_d = B_d t_p genuinely needs gcd(p, d) = 1 (p = d = 3 fails at the
    first coefficient already for f = x).
    """
    if order < 8:
        raise ValueError("order must be >= 8")
    rng = random.Random(seed)
    series = [random_series(rng, order, weight, eps) for _ in range(trials)]
    checks = []
    for name, param_list, make in _RELATION_SUITE:
        for params in param_list:
            failure = ""
            for i, f in enumerate(series):
                lhs, rhs = make(*params, f)
                bad = first_disagreement(lhs, rhs)
                if bad is not None:
                    failure = f"trial {i}: coefficient {bad[0]}: {bad[1]} != {bad[2]}"
                    break
            checks.append(
                RelationCheck(name, str(params), trials, failure == "", failure)
            )
    witness = first_disagreement(
        op_t(3, op_B(3, make_qexp([1], order=order, weight=weight, eps=eps))),
        op_B(3, op_t(3, make_qexp([1], order=order, weight=weight, eps=eps))),
    )
    return RelationReport(
        order,
        trials,
        seed,
        checks,
        witness_params="t_3 B_3 vs B_3 t_3 on f = x",
        witness_found=witness is not None,
    )


def verify_coefficient_identity(
    nmax: int = 30,
    order: int = 200,
    trials: int = 10,
    seed: int = 1,
    weight: int = 2,
    eps: DirichletCharacter = TRIVIAL_CHARACTER,
) -> RelationCheck:
    """a_1(T_n f) = a_n(f) for all n <= nmax on seeded random series."""
    if order < nmax:
        raise ValueError("order must be >= nmax")
    rng = random.Random(seed)
    failure = ""
    for i in range(trials):
        f = random_series(rng, order, weight, eps)
        for n in range(1, nmax + 1):
            if op_T(n, f).coeff(1) != f.raw(n):
                failure = f"trial {i}: n={n}"
                break
        if failure:
            break
    return RelationCheck(
        "a_1(T_n f) = a_n(f)", f"n <= {nmax}", trials, failure == "", failure
    )


# ---------------------------------------------------------------------------
# Oldclass matrices
# ---------------------------------------------------------------------------

CASE_DIVIDES = "divides"  # p | M: U_p restricted from level M
CASE_COPRIME = "coprime"  # p coprime to M: U_p = a_p - eps(p)p^{lambda-1} B_p on f


@dataclass
class OldclassMatrix:
    """Matrix of U_p on the oldclass basis {f, B_p f, ..., B_{p^k} f} (cases
    M1/M2), or a canonical form with a 2x2 head block (M3/M4)."""

    case: str
    k: int
    entries: list

    @property
    def size(self) -> int:
        return self.k + 1


def build_Up_matrix(
    case: str, a_p, eps_p: int, lam: int, k: int, p: int | None = None
) -> OldclassMatrix:
    """U_p on the oldclass basis, columns giving the images of basis vectors.

    case "divides" (p | M): head entry a_p, superdiagonal of ones (M1).
    case "coprime" (p coprime to M): head column (a_p, -eps_p * p^{lam-1}),
    superdiagonal of ones (M2); the prime p itself is needed to form that
    entry.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = k + 1
    entries = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        entries[i][i + 1] = 1
    entries[0][0] = a_p
    if case == CASE_DIVIDES:
        return OldclassMatrix("M1", k, entries)
    if case == CASE_COPRIME:
        if p is None:
            raise ValueError("case 'coprime' needs the prime p")
        entries[1][0] = -(eps_p * p ** (lam - 1))
        return OldclassMatrix("M2", k, entries)
    raise ValueError(f"unknown case {case!r}; use 'divides' or 'coprime'")


def m3_matrix(alpha, beta, k: int) -> OldclassMatrix:
    """Canonical form diag(alpha, beta) + nilpotent block of size k-1 (M3)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = k + 1
    entries = [[0] * n for _ in range(n)]
    entries[0][0] = alpha
    entries[1][1] = beta
    for i in range(2, n - 1):
        entries[i][i + 1] = 1
    return OldclassMatrix("M3", k, entries)


def m4_matrix(a_p, k: int) -> OldclassMatrix:
    """Canonical form [[a_p/2, 1], [0, a_p/2]] + nilpotent block (M4)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = k + 1
    entries = [[0] * n for _ in range(n)]
    entries[0][0] = _div_scalar(a_p, 2)
    entries[0][1] = 1
    entries[1][1] = _div_scalar(a_p, 2)
    for i in range(2, n - 1):
        entries[i][i + 1] = 1
    return OldclassMatrix("M4", k, entries)


def _div_scalar(x, k: int):
    if isinstance(x, int):
        return Fraction(x, k)
    return x / k


def _matmul(a, b):
    n, m, l = len(a), len(b), len(b[0])
    return [
        [sum(a[i][t] * b[t][j] for t in range(m)) for j in range(l)] for i in range(n)
    ]


def _mat_add_scalar(a, c):
    out = [row[:] for row in a]
    for i in range(len(a)):
        out[i][i] = out[i][i] + c
    return out


def charpoly(matrix) -> list:
    """Characteristic polynomial coefficients [c_0, ..., c_n] (monic) of a
    square matrix over any exact ring with division by integers
    (Faddeev-LeVerrier)."""
    a = matrix.entries if isinstance(matrix, OldclassMatrix) else matrix
    n = len(a)
    coeffs: list = [0] * (n + 1)
    coeffs[n] = 1
    mk = [row[:] for row in a]
    for k in range(1, n + 1):
        tr = mk[0][0]
        for i in range(1, n):
            tr = tr + mk[i][i]
        ck = -_div_scalar(tr, k)
        coeffs[n - k] = ck
        if k < n:
            mk = _matmul(a, _mat_add_scalar(mk, ck))
    return coeffs


def _rank_field(rows) -> int:
    """Rank of a dense matrix whose entries form a field (Fraction or Quad)."""
    rows = [row[:] for row in rows]
    if not rows:
        return 0
    rank = 0
    for c in range(len(rows[0])):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def _rational_sqrt(x: Fraction):
    """Exact square root of a rational, or None."""
    if x < 0:
        return None
    rn, rd = isqrt(x.numerator), isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def _sqrt_decompose(x: Fraction) -> tuple[int, Fraction]:
    """(D, s) with sqrt(x) = s*sqrt(D), D squarefree; x must not be a square."""
    v = x.numerator * x.denominator
    sign = -1 if v < 0 else 1
    v = abs(v)
    s, d = 1, 1
    for p, e in factorize(v).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return sign * d, Fraction(s, x.denominator)


@dataclass
class JordanReport:
    """Jordan census: eigenvalues with their block sizes, largest first."""

    blocks: list  # list of (eigenvalue, tuple_of_sizes)

    def sizes_for(self, eig):
        for e, sizes in self.blocks:
            if e == eig:
                return sizes
        return ()

    @property
    def block_count(self) -> int:
        return sum(len(sz) for _, sz in self.blocks)


def jordan_structure(matrix) -> JordanReport:
    """Jordan block census of a rational matrix whose characteristic
    polynomial is a power of X times a factor of degree at most two (the
    shape every oldclass matrix here has).  Irrational eigenvalue pairs are
    handled inside the quadratic extension they generate."""
    a = matrix.entries if isinstance(matrix, OldclassMatrix) else matrix
    a = [[Fraction(x) if isinstance(x, int) else x for x in row] for row in a]
    for row in a:
        for x in row:
            if not isinstance(x, Fraction):
                raise ValueError("jordan_structure expects rational entries")
    n = len(a)
    cp = charpoly(a)
    m0 = 0
    while cp[m0] == 0:
        m0 += 1
    rest = cp[m0:]
    deg = len(rest) - 1
    eigs: list = []
    if deg == 1:
        eigs.append(-rest[0])
    elif deg == 2:
        b, c = rest[1], rest[0]
        disc = b * b - 4 * c
        if disc == 0:
            eigs.append(-b / 2)
        else:
            s = _rational_sqrt(disc)
            if s is not None:
                eigs.extend([(-b + s) / 2, (-b - s) / 2])
            else:
                d, sc = _sqrt_decompose(disc)
                eigs.extend(
                    [Quad(d, -b / 2, sc / 2), Quad(d, -b / 2, -sc / 2)]
                )
    elif deg > 2:
        raise NotImplementedError("characteristic polynomial not of oldclass shape")
    if m0 > 0:
        eigs.append(Fraction(0))
    quad_disc = next((e.disc for e in eigs if isinstance(e, Quad)), None)
    if quad_disc is not None:
        a = [[Quad(quad_disc, x) for x in row] for row in a]
    blocks = []
    for eig in eigs:
        shifted = _mat_add_scalar(a, -eig)
        ranks = [n]
        power = shifted
        while True:
            r = _rank_field(power)
            ranks.append(r)
            if ranks[-2] == r:
                break
            power = _matmul(power, shifted)
        ranks.append(ranks[-1])
        sizes = []
        for j in range(1, len(ranks) - 1):
            exactly_j = (ranks[j - 1] - ranks[j]) - (ranks[j] - ranks[j + 1])
            sizes.extend([j] * exactly_j)
        blocks.append((eig, tuple(sorted(sizes, reverse=True))))
    return JordanReport(blocks)


# ---------------------------------------------------------------------------
# Kernel vectors, Jordan basis, oldclass blocks on genuine series
# ---------------------------------------------------------------------------


@dataclass
class KernelCheckReport:
    precondition_ok: bool
    kernel_ok: bool | None
    m4_case: bool
    m4_ok: bool | None
    checked_order: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(
            self.precondition_ok and self.kernel_ok and self.m4_ok is not False
        )


def kernel_vector_check(f: QExpansion, p: int, order: int) -> KernelCheckReport:
    """For a normalized t_p eigen-series f (checked first), verify that U_p
    annihilates B_{p^2} f - (a_p/theta) B_p f + (1/theta) f up to the given
    order, theta = eps(p) p^{lambda-1}.

    When a_p^2 = 4 theta, additionally checks that a_p f - 2 theta B_p f is
    a U_p eigenvector for the eigenvalue a_p/2 (the M4 branch; excluded for
    weight 2 and trivial character, but kept).
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    theta = f.eps(p) * p ** (f.weight - 1)
    if theta == 0:
        raise ValueError("eps(p) = 0: the kernel combination needs p coprime to the modulus")
    if f.raw(1) != 1:
        return KernelCheckReport(False, None, False, None, 0, "series not normalized (a_1 != 1)")
    tp = op_t(p, f)
    a_p = tp.raw(1)
    bad = first_disagreement(tp, a_p * f)
    if bad is not None:
        return KernelCheckReport(
            False, None, False, None, 0,
            f"not a t_{p} eigen-series: coefficient {bad[0]}",
        )
    v = op_B(p * p, f) - _div_scalar(a_p, theta) * op_B(p, f) + Fraction(1, theta) * f
    w = op_U(p, v)
    if w.reliable < order:
        raise ValueError(
            f"series too short: U_{p} image reliable to {w.reliable} < {order}"
        )
    kernel_ok = is_zero_to_reliable(w, order)
    m4_case = a_p * a_p == 4 * theta
    m4_ok = None
    if m4_case:
        u = a_p * f - (2 * theta) * op_B(p, f)
        lhs = 2 * op_U(p, u)
        rhs = a_p * u
        if min(lhs.reliable, rhs.reliable) < order:
            raise ValueError(f"series too short for the order-{order} eigenvector check")
        bad = first_disagreement(lhs, rhs)
        m4_ok = bad is None or bad[0] > order
    return KernelCheckReport(True, kernel_ok, m4_case, m4_ok, order)


@dataclass
class JordanBasisReport:
    """Alternating basis {f, B_p f - a_p f, B_{p^2} f - f, ...} for the
    trivial-character case p || M, with the Jordan matrix it produces."""

    a_p: int
    k: int
    basis: list  # columns, coordinates on {f, B_p f, ..., B_{p^k} f}
    jordan: list
    verified: bool


def jordan_basis_trivial_char(a_p: int, k: int) -> JordanBasisReport:
    """Change of basis putting U_p (case p || M, trivial character, a_p = +-1)
    in Jordan form; verified by exact matrix conjugation M C = C J."""
    if a_p not in (1, -1):
        raise ValueError("a_p must be +1 or -1 in the trivial-character case p || M")
    if k < 0:
        raise ValueError("k must be >= 0")
    n = k + 1
    cols = []
    for j in range(n):
        col = [0] * n
        col[j] = 1
        if j >= 1:
            col[0] -= a_p if j % 2 == 1 else 1
        cols.append(col)
    c_mat = [[cols[j][i] for j in range(n)] for i in range(n)]
    jordan = [[0] * n for _ in range(n)]
    jordan[0][0] = a_p
    for i in range(1, n - 1):
        jordan[i][i + 1] = 1
    if k == 0:
        m1 = [[a_p]]
    else:
        m1 = build_Up_matrix(CASE_DIVIDES, a_p, 0, 2, k).entries
    verified = _matmul(m1, c_mat) == _matmul(c_mat, jordan)
    return JordanBasisReport(a_p, k, cols, jordan, verified)


@dataclass
class OldclassBlocks:
    """Block-diagonal description of U_q on the divisor-indexed basis
    {B_d f : d | co_level}, grouped as B^{q,d} = {B_d f, B_{dq} f, ...,
    B_{dq^m} f} for d running over divisors of co_level/q^m."""

    q: int
    m: int
    co_level: int
    group_leads: list  # divisors d of co_level / q^m, ascending
    basis: list  # all divisor labels in block order
    block: OldclassMatrix
    block_count: int

    @property
    def block_size(self) -> int:
        return self.m + 1

    def full_matrix(self) -> list:
        n = self.block_count * self.block_size
        out = [[0] * n for _ in range(n)]
        for g in range(self.block_count):
            off = g * self.block_size
            for i in range(self.block_size):
                for j in range(self.block_size):
                    out[off + i][off + j] = self.block.entries[i][j]
        return out


def oldclass_blocks(
    q: int, co_level: int, a_q, case: str, lam: int = 2, eps_q: int = 1
) -> OldclassBlocks:
    """U_q on an oldclass of co-level n (= N/M): block diagonal with
    sigma_0(n / q^m) identical single-prime blocks, q^m the exact power of q
    in n.  The block shape depends only on the case, not on the divisor d."""
    if not is_prime(q):
        raise ValueError("q must be prime")
    if co_level % q != 0:
        raise ValueError("q must divide the co-level")
    m = 0
    rest = co_level
    while rest % q == 0:
        m += 1
        rest //= q
    leads = divisors(rest)
    basis = [d * q**j for d in leads for j in range(m + 1)]
    block = build_Up_matrix(case, a_q, eps_q, lam, m, p=q)
    count = sigma0(rest)
    assert count == len(leads)
    return OldclassBlocks(q, m, co_level, leads, basis, block, count)


__all__ = [
    "Quad",
    "PolyQ",
    "DirichletCharacter",
    "TRIVIAL_CHARACTER",
    "QExpansion",
    "make_qexp",
    "agree_to_reliable",
    "first_disagreement",
    "is_zero_to_reliable",
    "op_B",
    "op_t",
    "op_U",
    "op_T",
    "random_series",
    "formal_eigenform",
    "RelationCheck",
    "RelationReport",
    "verify_relations",
    "verify_coefficient_identity",
    "CASE_DIVIDES",
    "CASE_COPRIME",
    "OldclassMatrix",
    "build_Up_matrix",
    "m3_matrix",
    "m4_matrix",
    "charpoly",
    "JordanReport",
    "jordan_structure",
    "KernelCheckReport",
    "kernel_vector_check",
    "JordanBasisReport",
    "jordan_basis_trivial_char",
    "OldclassBlocks",
    "oldclass_blocks",
]
