"""Independent reference evaluations, written without touching the engine.

Binomials come from Pascal's triangle and powers from repeated
multiplication, so a bug in the engine's use of math.comb or ** cannot
cancel out here.
"""

from __future__ import annotations


def pascal(N: int) -> list[list[int]]:
    rows = [[1]]
    for _ in range(N):
        prev = rows[-1]
        rows.append([1] + [prev[k] + prev[k + 1] for k in range(len(prev) - 1)] + [1])
    return rows


_PASCAL = pascal(200)


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return _PASCAL[n][k]


def power(b: int, e: int) -> int:
    out = 1
    for _ in range(e):
        out *= b
    return out


def ceil_half(x: int) -> int:
    return -(-x // 2)


def thom_milnor(d: int, n: int) -> int:
    return d * power(2 * d - 1, n - 1)


def milnor_nonstrict(p: int, d: int, n: int) -> int:
    return ceil_half((2 + p * d) * power(1 + p * d, n - 1))


def degree_gamma(d: int, n: int) -> int:
    return d * power(d - 1, n - 1)


def pfaffian_gamma(n: int, a: int, b: int, r: int) -> int:
    """gamma(n, (a, b, r)) from the closed form for a shared chain."""
    return (
        power(2, r * (r - 1) // 2)
        * b
        * power(a + b - 1, n - 1)
        * power(min(n, r) * a + n * b + (n - 1) * a - 2 * n + 2, r)
    )


def pfaffian_omega(n: int, a: int, b: int, r: int) -> int:
    """Omega over functions of complexity at most (a, b, r)."""
    return (
        power(2, r * (r - 1) // 2)
        * b
        * power(a + 2 * b - 1, n - 1)
        * power(min(n, r) * a + 2 * n * b + (n - 1) * a - 2 * n + 2, r)
    )


def khovanskii(n: int, r: int, a: int, betas: list[int]) -> int:
    prod = 1
    for b in betas:
        prod *= b
    return power(2, r * (r - 1) // 2) * prod * power(min(n, r) * a + sum(betas) - n + 1, r)


def sign_sum(i: int, s: int, n_prime: int) -> int:
    total = 0
    for j in range(n_prime - i + 1):
        total += binom(s, j) * power(4, j)
    return total


def closed_sum(s: int, n_prime: int) -> int:
    total = 0
    for i in range(n_prime + 1):
        for j in range(n_prime - i + 1):
            total += binom(s, j) * power(6, j)
    return total


def boolean_sum(n: int, s: int) -> int:
    total = 0
    for i in range(n + 1):
        for j in range(1, n - i + 1):
            total += binom(2 * s * s + 1, j) * power(6, j)
    return total


def t_recursion(widths: list[int], K: int) -> list[int]:
    t = [widths[0]]
    for j in range(1, len(widths)):
        p = t[-1] + K
        t.append(t[-1] + widths[j] * (p + 1))
    return t


def prod_nonzero(xs) -> int:
    out = 1
    for x in xs:
        out *= max(x, 1)
    return out
