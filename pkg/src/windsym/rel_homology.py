"""Relative homology of X_0(p^n) presented on Manin symbols, plus cusp classes.

The presentation comes from the exact sequence

    Z[P^1]^sigma x Z[P^1]^tau --phi_1--> Z[P^1] --phi_2--> H_1(X_0(p^n), cusps; Z) --> 0

so the relation space is the span of the sigma-invariant and tau-invariant
submodules.  Those submodules are generated by the orbit sums x + x.sigma and
x + x.tau + x.tau^2 together with the fixed points themselves (an orbit of
size one contributes the point, not twice the point, which is why the
quotient is torsion free; torsion freeness is checked through the Smith form
rather than assumed).

Echelonizing the relations over a coefficient field yields the quotient
dimension and a total reduction map from raw P^1-vectors to coordinates on
the surviving basis columns, realizing phi_2 concretely.  Pivoting is by
lowest column index, which makes the surviving basis, and hence every
downstream coordinate, reproducible bit for bit.  Among the rows that could
serve as pivot for a column the sparsest is taken; the pivot column set, and
therefore the reduction map, is invariant under that choice, and it keeps
fill-in small enough that levels around 10^4 echelonize in well under a
second.

The cusp half of the module decides Gamma_0(N)-equivalence of cusps and
applies Hecke correspondences T_r (gcd(r, N) = 1) to cusp classes via the
matrix set {(r/delta, -beta; 0, delta) : delta | r, 0 <= beta < delta}.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import divisors, euler_phi, is_prime
from .residue_p1 import P1Table

DEFAULT_SMITH_CAP = 5000


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: the rationals (char 0) or a prime field F_l."""

    char: int

    def __post_init__(self):
        if self.char != 0 and not is_prime(self.char):
            raise ValueError(f"{self.char} is not prime")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(0)

    @classmethod
    def prime_field(cls, l: int) -> "FieldSpec":
        return cls(l)

    @property
    def label(self) -> str:
        return "Q" if self.char == 0 else f"F{self.char}"


@dataclass(frozen=True)
class RelationSpan:
    """Sparse integer rows spanning Z[P^1]^sigma + Z[P^1]^tau.

    sigma_rows come first: one orbit sum x + x.sigma per two-element orbit
    and one singleton row per sigma-fixed point; tau_rows follow with the
    analogous x + x.tau + x.tau^2 pattern.
    """

    n_cols: int
    sigma_rows: tuple[dict, ...]
    tau_rows: tuple[dict, ...]

    @property
    def rows(self) -> tuple[dict, ...]:
        return self.sigma_rows + self.tau_rows


def invariant_generators(table: P1Table) -> RelationSpan:
    """Orbit-sum generators of the sigma- and tau-invariant submodules."""
    sigma_rows = []
    seen: set[int] = set()
    for x in range(table.size):
        if x in seen:
            continue
        y = table.sigma_perm[x]
        if y == x:
            sigma_rows.append({x: 1})
            seen.add(x)
        else:
            sigma_rows.append({x: 1, y: 1})
            seen.update((x, y))
    tau_rows = []
    seen = set()
    for x in range(table.size):
        if x in seen:
            continue
        y = table.tau_perm[x]
        if y == x:
            tau_rows.append({x: 1})
            seen.add(x)
        else:
            z = table.tau_perm[y]
            row: dict[int, int] = {}
            for v in (x, y, z):
                row[v] = row.get(v, 0) + 1
            tau_rows.append(row)
            seen.update((x, y, z))
    return RelationSpan(table.size, tuple(sigma_rows), tuple(tau_rows))


def _sigma_substitution(sigma_rows) -> dict[int, int | None]:
    """Pivot data of the sigma rows: column -> None (dies) or column -> c
    meaning e_col is replaced by -e_c."""
    subst: dict[int, int | None] = {}
    for row in sigma_rows:
        cols = sorted(row)
        if len(cols) == 1:
            subst[cols[0]] = None
        else:
            subst[cols[0]] = cols[1]
    return subst


def _substituted_tau_rows(tau_rows, subst, char: int) -> list[dict[int, int]]:
    out = []
    for row in tau_rows:
        nr: dict[int, int] = {}
        for c, v in row.items():
            if c in subst:
                t = subst[c]
                if t is None:
                    continue
                nr[t] = nr.get(t, 0) - v
            else:
                nr[c] = nr.get(c, 0) + v
        if char:
            nr = {c: v % char for c, v in nr.items() if v % char}
        else:
            nr = {c: v for c, v in nr.items() if v}
        if nr:
            out.append(nr)
    return out


def _normalize_int_row(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    return {c: v // g for c, v in row.items()}


def _echelonize(rows: list[dict[int, int]], n_cols: int, char: int):
    """Leftmost-column echelon form of sparse rows over Q (char 0) or F_l.

    Returns pivots as a list of (column, pivot_value, row_dict) in ascending
    column order.  Over Q the rows are gcd-normalized integer vectors, which
    keeps the arithmetic exact without rational overhead.
    """
    active: dict[int, dict[int, int]] = dict(enumerate(rows))
    col_rows: dict[int, set[int]] = {}
    for rid, row in active.items():
        for c in row:
            col_rows.setdefault(c, set()).add(rid)
    pivots = []
    for c in range(n_cols):
        cands = col_rows.get(c)
        if not cands:
            continue
        piv = min(cands, key=lambda r: (len(active[r]), r))
        cands.discard(piv)
        prow = active.pop(piv)
        for cc in prow:
            if cc != c:
                col_rows[cc].discard(piv)
        pv = prow[c]
        if char:
            pv_inv = pow(pv, -1, char)
        for rid in list(cands):
            r = active[rid]
            rc = r[c]
            newr: dict[int, int] = {}
            if char:
                f = rc * pv_inv % char
                for cc, v in r.items():
                    newr[cc] = v
                for cc, v in prow.items():
                    nv = (newr.get(cc, 0) - f * v) % char
                    if nv:
                        newr[cc] = nv
                    elif cc in newr:
                        del newr[cc]
            else:
                g = gcd(pv, rc)
                mr, mp = pv // g, rc // g
                for cc, v in r.items():
                    newr[cc] = v * mr
                for cc, v in prow.items():
                    nv = newr.get(cc, 0) - mp * v
                    if nv:
                        newr[cc] = nv
                    elif cc in newr:
                        del newr[cc]
                newr = _normalize_int_row(newr)
            for cc in r.keys() - newr.keys():
                col_rows[cc].discard(rid)
            for cc in newr.keys() - r.keys():
                col_rows.setdefault(cc, set()).add(rid)
            if newr:
                active[rid] = newr
            else:
                del active[rid]
        del col_rows[c]
        pivots.append((c, pv, prow))
    return pivots


class H1Presentation:
    """Echelonized presentation of H_1(X_0(p^n), cusps) over a chosen field.

    quotient_dim = |P^1| - rank(relations); reduce() maps any raw P^1-vector
    to its coordinates on the surviving (non-pivot) columns.  Immutable after
    construction.
    """

    def __init__(self, table: P1Table, field: FieldSpec):
        self.table = table
        self.field = field
        self.p1_size = table.size
        rel = invariant_generators(table)
        self._subst = _sigma_substitution(rel.sigma_rows)
        rows = _substituted_tau_rows(rel.tau_rows, self._subst, field.char)
        self._pivots = _echelonize(rows, table.size, field.char)
        pivot_cols = set(self._subst) | {c for c, _, _ in self._pivots}
        self.relation_rank = len(pivot_cols)
        self.free_cols: tuple[int, ...] = tuple(
            c for c in range(table.size) if c not in pivot_cols
        )
        self.quotient_dim = len(self.free_cols)
        self._free_pos = {c: i for i, c in enumerate(self.free_cols)}

    def reduce(self, coeffs: dict[int, int]) -> list:
        """Coordinates of a P^1-vector in the quotient basis.

        Input is a sparse integer vector; output is a dense coordinate list
        of Fractions (over Q) or residues (over F_l).
        """
        char = self.field.char
        v: dict[int, object] = {}
        for c, val in coeffs.items():
            if not 0 <= c < self.p1_size:
                raise ValueError(f"index {c} outside P^1 of size {self.p1_size}")
            t = self._subst.get(c, c)
            if c in self._subst:
                if t is None:
                    continue
                v[t] = v.get(t, 0) - val
            else:
                v[c] = v.get(c, 0) + val
        if char:
            v = {c: val % char for c, val in v.items() if val % char}
            for c, pv, prow in self._pivots:
                if c not in v:
                    continue
                f = v.pop(c) * pow(pv, -1, char) % char
                if not f:
                    continue
                for cc, val in prow.items():
                    if cc == c:
                        continue
                    nv = (v.get(cc, 0) - f * val) % char
                    if nv:
                        v[cc] = nv
                    elif cc in v:
                        del v[cc]
            return [v.get(c, 0) for c in self.free_cols]
        for c, pv, prow in self._pivots:
            if c not in v:
                continue
            f = Fraction(v.pop(c), pv)
            if not f:
                continue
            for cc, val in prow.items():
                if cc == c:
                    continue
                nv = v.get(cc, 0) - f * val
                if nv:
                    v[cc] = nv
                elif cc in v:
                    del v[cc]
        return [Fraction(v.get(c, 0)) for c in self.free_cols]

    def summary(self) -> dict:
        """JSON-ready record of the presentation's shape."""
        return {
            "schema": 1,
            "p": self.table.pp.p,
            "n": self.table.pp.n,
            "field": self.field.label,
            "p1_size": self.p1_size,
            "relation_rank": self.relation_rank,
            "quotient_dim": self.quotient_dim,
        }


def build_presentation(table: P1Table, field: FieldSpec) -> H1Presentation:
    return H1Presentation(table, field)


def reduce_vector(v, pres: H1Presentation) -> list:
    """Reduce a SymbolVector (or raw index->coefficient dict) to quotient coordinates."""
    coeffs = getattr(v, "coeffs", v)
    vt = getattr(v, "table", None)
    if vt is not None and vt.size != pres.p1_size:
        raise ValueError("vector and presentation are indexed by different tables")
    return pres.reduce(coeffs)


class SmithCapExceeded(ValueError):
    pass


def smith_invariants(rel: RelationSpan, cap: int | None = None) -> list[int]:
    """Nonzero elementary divisors of the relation matrix (dense Smith form).

    Capped by column count (default 5000, override via the SMITH_CAP
    environment variable or the cap argument); larger levels should skip
    torsion checks rather than grind through a dense reduction.
    """
    if cap is None:
        cap = int(os.environ.get("SMITH_CAP", DEFAULT_SMITH_CAP))
    if rel.n_cols > cap:
        raise SmithCapExceeded(f"{rel.n_cols} columns exceeds Smith cap {cap}")
    mat = [[row.get(c, 0) for c in range(rel.n_cols)] for row in rel.rows]
    return _smith_diagonal(mat)


def _smith_diagonal(a: list[list[int]]) -> list[int]:
    m = len(a)
    n = len(a[0]) if m else 0
    res = []
    t = 0
    while True:
        pi = pj = -1
        best = 0
        for i in range(t, m):
            for j in range(t, n):
                v = abs(a[i][j])
                if v and (best == 0 or v < best):
                    best, pi, pj = v, i, j
        if pi < 0:
            break
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
            if any(a[i][t] for i in range(t + 1, m)):
                continue
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
            if any(a[t][j] for j in range(t + 1, n)):
                continue
            piv = a[t][t]
            bad = next(
                (
                    (i, j)
                    for i in range(t + 1, m)
                    for j in range(t + 1, n)
                    if a[i][j] % piv
                ),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        res.append(abs(a[t][t]))
        t += 1
        if t >= min(m, n):
            break
    return res


# ---------------------------------------------------------------------------
# Cusps of X_0(N)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cusp:
    """A cusp a/c of P^1(Q) in lowest terms, c >= 0; infinity is (1, 0)."""

    a: int
    c: int

    def __post_init__(self):
        if gcd(self.a, self.c) != 1:
            raise ValueError("cusp must be in lowest terms")
        if self.c < 0 or (self.c == 0 and self.a != 1):
            raise ValueError("cusp not normalized (want c > 0, or (1, 0))")

    @classmethod
    def of(cls, a: int, c: int) -> "Cusp":
        if a == 0 and c == 0:
            raise ValueError("(0, 0) is not a cusp")
        g = gcd(a, c)
        a, c = a // g, c // g
        if c < 0 or (c == 0 and a < 0):
            a, c = -a, -c
        return cls(a, c)

    def __str__(self):
        return "oo" if self.c == 0 else f"{self.a}/{self.c}"


def cusp_equivalent(x: Cusp, y: Cusp, n_level: int) -> bool:
    """Gamma_0(N)-equivalence of cusps by the standard arithmetic criterion:

    a1/c1 ~ a2/c2 iff s1*c2 == s2*c1 mod gcd(c1*c2, N) where ai*si == 1 (mod ci).
    """
    if n_level < 1:
        raise ValueError("level must be positive")
    g = gcd(x.c * y.c, n_level)
    s1 = _inverse_mod_or_one(x.a, x.c)
    s2 = _inverse_mod_or_one(y.a, y.c)
    return (s1 * y.c - s2 * x.c) % g == 0


def _inverse_mod_or_one(a: int, c: int) -> int:
    if c == 0:
        return 1
    if c == 1:
        return 0
    return pow(a % c, -1, c)


def cusp_representatives(n_level: int) -> list[Cusp]:
    """One representative per Gamma_0(N) cusp class: a/c for c | N with
    a running over units modulo gcd(c, N/c), lifted coprime to c."""
    reps = []
    for c in divisors(n_level):
        g = gcd(c, n_level // c)
        for x in range(g):
            if gcd(x, g) != 1:
                continue
            a = x
            while gcd(a, c) != 1:
                a += g
            reps.append(Cusp.of(a, c))
    assert len(reps) == sum(
        euler_phi(gcd(c, n_level // c)) for c in divisors(n_level)
    )
    return reps


def hecke_cusp_action(n_level: int, r: int, x: Cusp) -> list[tuple[Cusp, int]]:
    """Images of a cusp under the T_r correspondence on X_0(N), classified
    up to Gamma_0(N)-equivalence.

    Applies every matrix (r/delta, -beta; 0, delta) with delta | r and
    0 <= beta < delta; the total image count is sigma_1(r).  Requires
    gcd(r, N) = 1.
    """
    if gcd(r, n_level) != 1:
        raise ValueError(f"r={r} must be coprime to the level {n_level}")
    classes: list[tuple[Cusp, int]] = []
    for delta in divisors(r):
        for beta in range(delta):
            img = Cusp.of((r // delta) * x.a - beta * x.c, delta * x.c)
            for i, (rep, cnt) in enumerate(classes):
                if cusp_equivalent(img, rep, n_level):
                    classes[i] = (rep, cnt + 1)
                    break
            else:
                classes.append((img, 1))
    return classes


__all__ = [
    "FieldSpec",
    "RelationSpan",
    "H1Presentation",
    "SmithCapExceeded",
    "Cusp",
    "invariant_generators",
    "build_presentation",
    "reduce_vector",
    "smith_invariants",
    "cusp_equivalent",
    "cusp_representatives",
    "hecke_cusp_action",
]
