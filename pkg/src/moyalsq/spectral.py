"""Weights ``A_mn``, weighted norms, matrix algebra and the diagonal semigroup.

Matrices are plain ``(N+1, N+1)`` complex numpy arrays; leading batch axes are
allowed wherever the operation is entrywise or a matrix product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import ModelParams


class WeightTable:
    """Dense table ``A_mn = 2*pi*theta*(M^2 + 4/theta*(m+n+1))`` for ``0 <= m,n <= N``.

    Fractional powers are cached per exponent. Arrays handed out are read-only.
    """

    def __init__(self, cutoff: int, theta: float = 1.0, mass_sq: float = 1.0) -> None:
        if cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        self.n = int(cutoff)
        self.theta = float(theta)
        self.mass_sq = float(mass_sq)
        idx = np.arange(self.n + 1)
        a = 2.0 * np.pi * self.theta * (self.mass_sq + 4.0 / self.theta * (idx[:, None] + idx[None, :] + 1))
        a.setflags(write=False)
        self.a = a
        self._pow: dict[float, np.ndarray] = {1.0: a}
        self._tail: np.ndarray | None = None

    @classmethod
    def from_params(cls, params: ModelParams) -> "WeightTable":
        return cls(params.cutoff, params.theta, params.mass_sq)

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def a00(self) -> float:
        return float(self.a[0, 0])

    def power(self, p: float) -> np.ndarray:
        p = float(p)
        out = self._pow.get(p)
        if out is None:
            out = self.a**p
            out.setflags(write=False)
            self._pow[p] = out
        return out

    @property
    def tail(self) -> np.ndarray:
        """Vector ``sum_k 1/A_mk`` over the truncated range; the diagonal of ``<z^2>``."""
        if self._tail is None:
            t = (1.0 / self.a).sum(axis=1)
            t.setflags(write=False)
            self._tail = t
        return self._tail

    @property
    def mult_constant(self) -> float:
        """``K = 2/A_00`` with ``A_mn <= K A_mk A_kn``."""
        return 2.0 / self.a00


def weight(m: int, n: int, params: ModelParams) -> float:
    if m < 0 or n < 0:
        raise ValueError("indices must be non-negative")
    return 2.0 * math.pi * params.theta * (params.mass_sq + 4.0 / params.theta * (m + n + 1))


def h_norm(c: np.ndarray, alpha: float, w: WeightTable) -> float | np.ndarray:
    """``(sum A^{2 alpha} |c|^2)^{1/2}``; reduces over the last two axes."""
    return np.sqrt(np.sum(w.power(2.0 * alpha) * np.abs(c) ** 2, axis=(-2, -1)))


def m_norm(c: np.ndarray, p: float, w: WeightTable) -> float | np.ndarray:
    return np.max(w.power(p) * np.abs(c), axis=(-2, -1))


@dataclass(frozen=True)
class GammaTensor:
    """Three-index array ``entries[n, l, l']``; ``beta`` is the exponent it was built with."""

    entries: np.ndarray
    beta: float = 0.0


def g_norm(g: GammaTensor | np.ndarray, alpha: float, beta: float, w: WeightTable) -> float:
    """``sup_{i,j,k} A_ii^alpha A_jk^beta |L^i_jk|``."""
    arr = g.entries if isinstance(g, GammaTensor) else np.asarray(g)
    diag = np.diagonal(w.a) ** alpha
    return float(np.max(diag[:, None, None] * w.power(beta)[None, :, :] * np.abs(arr)))


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[-1] != b.shape[-2]:
        raise ValueError("incompatible cutoffs")
    return a @ b


def trace_pair(a: np.ndarray, b: np.ndarray) -> complex:
    """``tr(ab) = sum_mn a_mn b_nm``."""
    return complex(np.einsum("mn,nm->", a, b))


def semigroup_apply(c: np.ndarray, t: float, w: WeightTable) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be non-negative")
    return np.exp(-w.a * t) * c


def hermitian_defect(c: np.ndarray) -> float:
    return float(np.max(np.abs(c - np.conj(np.swapaxes(c, -1, -2))))) if c.size else 0.0


def hermitian_part(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + np.conj(np.swapaxes(c, -1, -2)))


def random_hermitian(size: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return scale * hermitian_part(g)


# numeric companions of the functional inequalities


def special_constant(eps: float, w: WeightTable) -> float:
    """``C_eps = (sum A^{-2-4 eps})^{1/2}`` with ``|v|^2_{H^{-1/2-eps}} <= C_eps |v^2|_{H^0}``."""
    return float(np.sqrt(np.sum(w.power(-2.0 - 4.0 * eps))))


def schauder_factor(eps: float) -> float:
    """``sup_x x^{1-eps} e^{-x} = ((1-eps)/e)^{1-eps}``."""
    return ((1.0 - eps) / math.e) ** (1.0 - eps)


def truncate(c: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros_like(c)
    out[..., : k + 1, : k + 1] = c[..., : k + 1, : k + 1]
    return out


def embedding_tail_bound(c: np.ndarray, k: int, alpha: float, beta: float, w: WeightTable) -> float:
    """Upper bound ``A_{K,0}^{beta-alpha} |c|_{H^alpha}`` on ``|c - c|_{<=K}|_{H^beta}`` for ``beta < alpha``.

    Every discarded entry has ``m + n >= K + 1`` so its weight exceeds ``A_{K,0}``.
    """
    a_cut = 2.0 * math.pi * w.theta * (w.mass_sq + 4.0 / w.theta * (k + 1))
    return float(a_cut ** (beta - alpha) * h_norm(c, alpha, w))
