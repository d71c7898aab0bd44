"""Exact truncated contraction sums and the N5 fourth moment.

The fourth moment is ``E[sum_{k,l,k',l'} A_kl^-2a A_k'l'^-2a |T_{kl,k'l'}|^2]`` with
``T_{kl,k'l'} = sum_{m,n} A_mn^{2b} z_mk z_ln z_nl' z_k'm``. By Wick's theorem it
is the sum of the 105 contraction sums; Monte Carlo over stationary samples is
the independent route.
"""

from __future__ import annotations

import string

import numpy as np

from ..field import NoiseSource, sample_batch
from ..params import ModelParams
from ..spectral import WeightTable, h_norm, random_hermitian
from .graph import pairing_to_graph
from .pairings import Pairing, enumerate_pairings


def _table(params: ModelParams | WeightTable, n_sum: int) -> WeightTable:
    return WeightTable(n_sum, params.theta, params.mass_sq)


def contraction_sum_numeric(
    p: Pairing, alpha: float, beta: float, params: ModelParams | WeightTable, n_sum: int
) -> float:
    """Sum over every vertex index in ``0..n_sum`` of the weighted graph of ``p``."""
    g = pairing_to_graph(p)
    w = _table(params, n_sum)
    edges, loops = g.numeric(float(alpha), float(beta))
    letters = string.ascii_lowercase
    ops, subs = [], []
    for v in range(g.n_vertices):
        ops.append(w.power(-loops[v]).diagonal() if v in loops else np.ones(w.size))
        subs.append(letters[v])
    for e, wt in edges.items():
        u, v = sorted(e)
        ops.append(w.power(-wt))
        subs.append(letters[u] + letters[v])
    return float(np.einsum(",".join(subs) + "->", *ops, optimize="greedy"))


def exact_fourth_moment(alpha: float, beta: float, params: ModelParams | WeightTable, cutoff: int) -> float:
    """Sum of all 105 contraction sums at matrix cutoff ``cutoff``."""
    return sum(contraction_sum_numeric(p, alpha, beta, params, cutoff) for p in enumerate_pairings())


def n5_tensor(z: np.ndarray, beta: float, w: WeightTable) -> np.ndarray:
    """``T[..., k, l, k', l']``; leading batch axes of ``z`` are kept."""
    x = np.einsum("...mk,...Km->...mkK", z, z)
    y = np.einsum("...ln,...nL->...nlL", z, z)
    return np.einsum("...mkK,mn,...nlL->...klKL", x, w.power(2.0 * beta), y, optimize=True)


def n5_functional(z: np.ndarray, alpha: float, beta: float, w: WeightTable) -> np.ndarray:
    """``sum A_kl^-2a A_k'l'^-2a |T|^2`` per sample."""
    t = n5_tensor(z, beta, w)
    wa = w.power(-2.0 * alpha)
    return np.einsum("...klKL,kl,KL->...", np.abs(t) ** 2, wa, wa)


def n5_operator_bound(z: np.ndarray, alpha: float, beta: float, w: WeightTable) -> float:
    """Fourth root of the functional: ``||z v z||_{H^b} <= bound * ||v||_{H^a}`` for every ``v``."""
    return float(n5_functional(z, alpha, beta, w)) ** 0.25


def n5_moment_mc(
    params: ModelParams, alpha: float, beta: float, n_samples: int, *, chunk: int = 1000
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the functional over stationary samples."""
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    w = WeightTable.from_params(params)
    noise = NoiseSource(params.seed, params.cutoff)
    vals = []
    left = n_samples
    while left:
        c = min(chunk, left)
        vals.append(n5_functional(sample_batch(w, noise, c), alpha, beta, w))
        left -= c
    v = np.concatenate(vals)
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(len(v)))


def operator_bound_violations(
    z: np.ndarray, alpha: float, beta: float, w: WeightTable, rng: np.random.Generator, n_test: int = 100
) -> tuple[int, float]:
    """Count of random Hermitian ``v`` breaking the bound, and the largest ratio to the bound."""
    bound = n5_operator_bound(z, alpha, beta, w)
    worst, bad = 0.0, 0
    for _ in range(n_test):
        v = random_hermitian(w.size, rng)
        lhs = h_norm(z @ v @ z, beta, w)
        rhs = bound * h_norm(v, alpha, w)
        r = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
        worst = max(worst, r)
        bad += r > 1.0
    return bad, worst
