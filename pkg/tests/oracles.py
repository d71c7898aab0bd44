"""Independent reference computations used by the tests.

Nothing here imports the package's implementations of the quantities being
checked; weights are rebuilt from the closed formula.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def weights(cutoff: int, theta: float = 1.0, mass_sq: float = 1.0) -> np.ndarray:
    idx = np.arange(cutoff + 1)
    return 2 * math.pi * theta * (mass_sq + 4 / theta * (idx[:, None] + idx[None, :] + 1))


def matchings(items: list[int]):
    if not items:
        yield []
        return
    a, rest = items[0], items[1:]
    for i, b in enumerate(rest):
        for tail in matchings(rest[:i] + rest[i + 1 :]):
            yield [(a, b)] + tail


def wick_expectation(factors: list[tuple[int, int]], a: np.ndarray) -> float:
    """``E[prod z_{ab}]`` for the stationary field with ``E[z_ab z_cd] = delta_ad delta_bc / A_ab``."""
    if len(factors) % 2:
        return 0.0
    total = 0.0
    for pairing in matchings(list(range(len(factors)))):
        prod = 1.0
        for i, j in pairing:
            (p, q), (r, s) = factors[i], factors[j]
            if p != s or q != r:
                prod = 0.0
                break
            prod /= a[p, q]
        total += prod
    return total


def n5_moment_bruteforce(cutoff: int, alpha: float, beta: float) -> float:
    """Fourth moment of the N5 functional by summing Wick's theorem over every index tuple."""
    a = weights(cutoff)
    total = 0.0
    rng = range(cutoff + 1)
    for m, k, mb, kb, n, lb, nb, l in itertools.product(rng, repeat=8):
        fac = [(m, k), (k, mb), (mb, kb), (kb, m), (n, lb), (lb, nb), (nb, l), (l, n)]
        e = wick_expectation(fac, a)
        if e:
            total += e * a[k, l] ** (-2 * alpha) * a[kb, lb] ** (-2 * alpha) * a[m, n] ** (2 * beta) * a[mb, nb] ** (2 * beta)
    return total


def naive_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            s = 0j
            for k in range(n):
                s += x[i, k] * y[k, j]
            out[i, j] = s
    return out


def naive_remainder_rhs(v: np.ndarray, z: np.ndarray, a: np.ndarray, coupling: float) -> np.ndarray:
    """``-c (v^3 + z v^2 + v z v + v^2 z + z v z + v:z^2: + :z^2:v + :z^3:)`` with explicit loops."""
    t = (1.0 / a).sum(axis=1)
    z2 = naive_matmul(z, z) - np.diag(t)
    z3 = naive_matmul(naive_matmul(z, z), z) - t[:, None] * z - z * t[None, :]
    mm = naive_matmul
    terms = [
        mm(mm(v, v), v),
        mm(z, mm(v, v)),
        mm(mm(v, z), v),
        mm(mm(v, v), z),
        mm(mm(z, v), z),
        mm(v, z2),
        mm(z2, v),
    ]
    return -coupling * (sum(terms) + z3)


def gaussian_hermitian(rng: np.random.Generator, a: np.ndarray, count: int) -> np.ndarray:
    """Stationary samples built entry by entry with a plain generator (independent of the package RNG)."""
    n = a.shape[0]
    out = np.zeros((count, n, n), dtype=complex)
    for m in range(n):
        out[:, m, m] = rng.standard_normal(count) / np.sqrt(a[m, m])
        for k in range(m + 1, n):
            val = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / np.sqrt(2 * a[m, k])
            out[:, m, k] = val
            out[:, k, m] = np.conj(val)
    return out


def within(mean: float, se: float, target: float, k: float = 3.0) -> bool:
    return abs(mean - target) <= k * se


def family_limit(count: int, level: float = 0.01) -> float:
    """Two-sided Bonferroni z-threshold for ``count`` simultaneous checks (at least 3)."""
    from scipy.stats import norm

    return max(3.0, float(norm.isf(level / (2 * count))))
