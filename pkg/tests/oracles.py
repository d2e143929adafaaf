"""Independent oracles used by the test suite.

Everything here is deliberately computed by a different route than the
library code it checks: classical genus/cusp-count formulas, brute-force
enumerations, pentagonal-number eta expansions, and exhaustive matrix
searches in Gamma_0(N).
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd

from windsym.arith import divisors, euler_phi, factorize, kronecker
from windsym.residue_p1 import PrimePower, build_p1_table


@lru_cache(maxsize=None)
def get_table(p: int, n: int):
    return build_p1_table(PrimePower(p, n))


def cusp_count_x0(n_level: int) -> int:
    """Classical cusp count of X_0(N): sum over d | N of phi(gcd(d, N/d))."""
    return sum(euler_phi(gcd(d, n_level // d)) for d in divisors(n_level))


def genus_x0(n_level: int) -> int:
    """Classical genus formula for X_0(N) via index and elliptic point counts."""
    mu = n_level
    for p in factorize(n_level):
        mu = mu // p * (p + 1)
    if n_level % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in factorize(n_level):
            nu2 *= (1 + kronecker(-1, p)) if p != 2 else 1
    if n_level % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in factorize(n_level):
            nu3 *= (1 + kronecker(-3, p)) if p != 3 else 1
    g = (
        1
        + Fraction(mu, 12)
        - Fraction(nu2, 4)
        - Fraction(nu3, 3)
        - Fraction(cusp_count_x0(n_level), 2)
    )
    assert g.denominator == 1 and g >= 0
    return int(g)


def p1_size_bruteforce(m: int) -> int:
    """Count classes of pairs (c, d) mod m with gcd(c, d, m) = 1 up to unit
    scaling, by raw orbit enumeration.  Only sane for small m."""
    units = [u for u in range(m) if gcd(u, m) == 1]
    seen: set[tuple[int, int]] = set()
    count = 0
    for c in range(m):
        for d in range(m):
            if gcd(gcd(c, d), m) != 1 or (c, d) in seen:
                continue
            count += 1
            for u in units:
                seen.add((c * u % m, d * u % m))
    return count


def winding_pairs_bruteforce(r: int) -> dict[tuple[int, int], int]:
    """Multiset of (w, t) over all tuples 0 <= v < u, 0 <= w < t, ut - vw = r,
    scanning u and t with generous overshoot (no derived bounds assumed)."""
    out: dict[tuple[int, int], int] = {}
    top = 3 * r
    for u in range(1, top + 1):
        for t in range(1, top + 1):
            for v in range(u):
                for w in range(t):
                    if u * t - v * w == r:
                        out[(w, t)] = out.get((w, t), 0) + 1
    return out


def euler_product(trunc: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^n) up to q^trunc (pentagonal numbers)."""
    e = [0] * (trunc + 1)
    e[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 <= trunc:
        s = -1 if k % 2 else 1
        g1, g2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
        e[g1] += s
        if g2 <= trunc:
            e[g2] += s
        k += 1
    return e


def _poly_mul(a: list[int], b: list[int], trunc: int) -> list[int]:
    out = [0] * (trunc + 1)
    for i, x in enumerate(a):
        if x == 0 or i > trunc:
            continue
        for j, y in enumerate(b):
            if i + j > trunc:
                break
            if y:
                out[i + j] += x * y
    return out


def eta_product_level11(order: int) -> list:
    """Coefficients a_1..a_order of q prod (1-q^n)^2 (1-q^{11n})^2, the weight-2
    newform of level 11, computed from the pentagonal-number expansion."""
    e = euler_product(order)
    e11 = [0] * (order + 1)
    for i in range(0, order + 1, 11):
        e11[i] = e[i // 11]
    f = _poly_mul(e, e, order)
    f = _poly_mul(f, e11, order)
    f = _poly_mul(f, e11, order)
    # multiply by q: a_n = f_{n-1}
    return [Fraction(f[n - 1]) for n in range(1, order + 1)]


def gamma0_matrices(n_level: int, amax: int = 12, gmax: int = 12, tmax: int = 12):
    """Explicit elements of Gamma_0(N) with bounded entries."""
    mats = []
    for g in range(-gmax, gmax + 1):
        c = g * n_level
        if c == 0:
            for a in (1, -1):
                for b in range(-tmax, tmax + 1):
                    mats.append((a, b, 0, a))
            continue
        for a in range(-amax, amax + 1):
            if gcd(a, c) != 1:
                continue
            d0 = pow(a, -1, abs(c))
            for t in range(-tmax, tmax + 1):
                d = d0 + t * abs(c)
                b = (a * d - 1) // c
                assert a * d - b * c == 1
                mats.append((a, b, c, d))
    return mats


def apply_mat_to_cusp(mat, cusp):
    from windsym.rel_homology import Cusp

    a, b, c, d = mat
    return Cusp.of(a * cusp.a + b * cusp.c, c * cusp.a + d * cusp.c)


def bruteforce_cusp_equivalent(x, y, mats) -> bool:
    return any(apply_mat_to_cusp(m, x) == y for m in mats)
