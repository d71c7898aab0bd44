"""Matrix Ornstein-Uhlenbeck free field, its Wick powers and the Gamma tensor.

Each independent entry ``z_mn`` (``m <= n``) relaxes at rate ``A_mn`` with
stationary law: real ``N(0, 1/A_mm)`` on the diagonal, complex with independent
real and imaginary parts of variance ``1/(2 A_mn)`` off it. Entries below the
diagonal are conjugates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ModelParams
from .spectral import GammaTensor, WeightTable


class NoiseSource:
    """Per-entry random streams keyed on ``(seed, m, n)``.

    Every upper-triangular entry owns a Philox stream and consumes exactly two
    standard normals per draw, so results do not depend on iteration order or on
    how draws are batched.
    """

    def __init__(self, seed: int, cutoff: int, block: int = 512) -> None:
        self.seed = int(seed)
        self.size = int(cutoff) + 1
        self.block = int(block)
        self.rows, self.cols = np.triu_indices(self.size)
        self._gens = [
            np.random.Generator(np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=(int(m), int(n)))))
            for m, n in zip(self.rows, self.cols)
        ]
        self._buf = np.empty((len(self._gens), 0, 2))
        self._pos = 0

    def _refill(self, need: int) -> None:
        fresh = np.stack([g.standard_normal((max(need, self.block), 2)) for g in self._gens])
        self._buf = np.concatenate([self._buf[:, self._pos :], fresh], axis=1)
        self._pos = 0

    def raw(self, count: int) -> np.ndarray:
        """Array ``(count, n_entries, 2)`` of standard normals."""
        if self._buf.shape[1] - self._pos < count:
            self._refill(count - (self._buf.shape[1] - self._pos))
        out = self._buf[:, self._pos : self._pos + count]
        self._pos += count
        return np.transpose(out, (1, 0, 2))

    def unit(self, count: int) -> np.ndarray:
        """``count`` Hermitian matrices with unit-variance entries (``E|u_mn|^2 = 1``)."""
        g = self.raw(count)
        diag = self.rows == self.cols
        vals = np.where(diag, g[..., 0], (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0))
        out = np.zeros((count, self.size, self.size), dtype=complex)
        out[:, self.rows, self.cols] = vals
        out[:, self.cols, self.rows] = np.conj(vals)
        return out


@dataclass(frozen=True)
class OUState:
    t: float
    z: np.ndarray
    noise: NoiseSource


@dataclass(frozen=True)
class WickBundle:
    z2: np.ndarray
    z3_adj: np.ndarray
    z3_full: np.ndarray
    tail1: np.ndarray


def covariance(m: int, n: int, k: int, l: int, dt: float, w: WeightTable) -> float:
    """``E[z_mn(t) z_kl(t+dt)] = delta_ml delta_nk exp(-|dt| A_mn) / A_mn``."""
    if m != l or n != k:
        return 0.0
    a = float(w.a[m, n])
    return float(np.exp(-abs(dt) * a) / a)


def sample_batch(w: WeightTable, noise: NoiseSource, count: int) -> np.ndarray:
    """``count`` independent stationary samples, shape ``(count, N+1, N+1)``."""
    return noise.unit(count) / np.sqrt(w.a)


def sample_stationary(params: ModelParams, noise: NoiseSource | None = None, w: WeightTable | None = None) -> OUState:
    w = w or WeightTable.from_params(params)
    noise = noise or NoiseSource(params.seed, params.cutoff)
    return OUState(0.0, sample_batch(w, noise, 1)[0], noise)


def advance(state: OUState, dt: float, w: WeightTable) -> OUState:
    """Exact transition over ``dt``; preserves the stationary law for any step.

    ``state.z`` may carry a leading axis of independent paths.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return state
    decay = np.exp(-w.a * dt)
    kick = np.sqrt(-np.expm1(-2.0 * w.a * dt) / w.a)
    if state.z.ndim == 3:  # independent paths along the leading axis
        kicks = state.noise.unit(state.z.shape[0])
    else:
        kicks = state.noise.unit(1)[0]
    return OUState(state.t + dt, decay * state.z + kick * kicks, state.noise)


def ou_path(state: OUState, dt: float, steps: int, w: WeightTable) -> np.ndarray:
    """Array ``(steps+1, N+1, N+1)`` of the field on a uniform grid starting at ``state``."""
    decay = np.exp(-w.a * dt)
    kick = np.sqrt(-np.expm1(-2.0 * w.a * dt) / w.a)
    u = state.noise.unit(steps)
    out = np.empty((steps + 1,) + state.z.shape, dtype=complex)
    out[0] = state.z
    for j in range(steps):
        out[j + 1] = decay * out[j] + kick * u[j]
    return out


def wick2(z: np.ndarray, w: WeightTable) -> np.ndarray:
    """``:z^2:_mn = (z^2)_mn - delta_mn sum_k 1/A_mk``."""
    out = z @ z
    idx = np.arange(w.size)
    out[..., idx, idx] -= w.tail
    return out


def wick3(z: np.ndarray, w: WeightTable, convention: str = "adjacent") -> np.ndarray:
    """Renormalized cube.

    ``adjacent`` subtracts only the contractions of neighbouring factors,
    ``z^3 - <z^2> z - z <z^2>``; ``full`` also removes the outer contraction
    ``delta_mn sum_k z_kk / A_mk``.
    """
    t = w.tail
    out = z @ z @ z - t[:, None] * z - z * t[None, :]
    if convention == "adjacent":
        return out
    if convention != "full":
        raise ValueError(f"unknown convention {convention!r}")
    return out - _outer_contraction(z, w)


def _outer_contraction(z: np.ndarray, w: WeightTable) -> np.ndarray:
    d = np.diagonal(z, axis1=-2, axis2=-1)
    vals = d @ (1.0 / w.a).T  # sum_k z_kk / A_mk
    out = np.zeros_like(z)
    idx = np.arange(w.size)
    out[..., idx, idx] = vals
    return out


def wick_bundle(z: np.ndarray, w: WeightTable) -> WickBundle:
    z2 = wick2(z, w)
    t = w.tail
    adj = z2 @ z - z * t[None, :]  # (z^2 - <z^2>) z - z <z^2>
    return WickBundle(z2=z2, z3_adj=adj, z3_full=adj - _outer_contraction(z, w), tail1=t)


def gamma_tensor(z: np.ndarray, beta: float, w: WeightTable) -> GammaTensor:
    """``Gamma^n_{l,l'} = sum_m (z_{l'm} z_{ml} - delta_{ll'}/A_{l'm}) / A_mn^{2 beta}``; entries ``[n, l, l']``."""
    inv = w.power(-2.0 * beta)
    g = np.einsum("mn,pm,ml->nlp", inv, z, z)
    corr = np.einsum("mn,pm->np", inv, 1.0 / w.a)
    idx = np.arange(w.size)
    g[:, idx, idx] -= corr
    return GammaTensor(g, beta)


def gamma_variance(n: int, l: int, lp: int, beta: float, w: WeightTable) -> float:
    """``E|Gamma^n_{l,l'}|^2``."""
    a = w.a
    val = float(np.sum(a[:, n] ** (-4.0 * beta) / (a[:, lp] * a[:, l])))
    if l == lp:
        val += float(1.0 / (a[n, l] ** (4.0 * beta) * a[l, l] ** 2))
    return val


def wick2_second_moment(w: WeightTable) -> np.ndarray:
    """``E[:z^2:_mn :z^2:_nm] = delta_mn / A_mm^2 + sum_k 1/(A_mk A_kn)``."""
    inv = 1.0 / w.a
    return inv @ inv + np.diag(np.diagonal(inv) ** 2)


@dataclass
class FreeFieldStats:
    """Per-entry sample checks over independent stationary draws.

    ``rows`` holds ``(quantity, m, n, part, mean, se, expected, z)`` for the upper
    triangle; ``aggregate`` maps each quantity to ``(mean z^2, its 3-SE limit, passed)``.
    """

    n_samples: int
    rows: list[tuple]
    aggregate: dict[str, tuple[float, float, bool]]
    identity_error: float  # max |full - adjacent + outer contraction|
    hermitian_error: float

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.aggregate.values()) and self.identity_error <= 1e-12 and self.hermitian_error <= 1e-12

    def max_abs_z(self, quantity: str | None = None) -> float:
        zs = [abs(r[7]) for r in self.rows if quantity is None or r[0] == quantity]
        return max(zs) if zs else 0.0


def free_field_statistics(params: ModelParams, n_samples: int, noise: NoiseSource | None = None) -> FreeFieldStats:
    """Centering and second-moment checks of ``z``, ``:z^2:`` and ``:z^3:`` against the analytic oracles."""
    w = WeightTable.from_params(params)
    noise = noise or NoiseSource(params.seed, params.cutoff)
    z = sample_batch(w, noise, n_samples)
    b = wick_bundle(z, w)
    ident = float(np.max(np.abs(b.z3_full - b.z3_adj + _outer_contraction(z, w))))
    direct = np.max(np.abs(wick3(z, w, "adjacent") - b.z3_adj))
    herm = max(float(np.max(np.abs(x - np.conj(np.swapaxes(x, -1, -2))))) for x in (z, b.z2, b.z3_adj, b.z3_full))
    zero = np.zeros(w.a.shape)
    checks = {
        "z": (z, zero),
        "wick2": (b.z2, zero),
        "wick3_adjacent": (b.z3_adj, zero),
        "wick3_full": (b.z3_full, zero),
        "abs_z_sq": (np.abs(z) ** 2, 1.0 / w.a),
        "z_z": (z * z, np.diag(np.diag(1.0 / w.a))),
        "wick2_second": (np.abs(b.z2) ** 2, wick2_second_moment(w)),
    }
    rows, agg = [], {}
    iu, ju = np.triu_indices(w.size)
    sq = np.sqrt(n_samples)
    for name, (samples, expected) in checks.items():
        zz = []
        for part, fn in (("re", np.real), ("im", np.imag)):
            vals = fn(samples[:, iu, ju])
            mean = vals.mean(axis=0)
            se = vals.std(axis=0, ddof=1) / sq
            exp = fn(expected[iu, ju] + 0j)
            for k in range(len(iu)):
                if se[k] == 0.0:
                    continue  # structurally zero (imaginary part on the diagonal)
                zk = (mean[k] - exp[k]) / se[k]
                rows.append((name, int(iu[k]), int(ju[k]), part, mean[k], se[k], exp[k], zk))
                zz.append(zk)
        zz = np.asarray(zz)
        stat = float(np.mean(zz**2))
        limit = 1.0 + 3.0 * np.sqrt(2.0 / len(zz))
        agg[name] = (stat, limit, bool(stat <= limit))
    return FreeFieldStats(n_samples, rows, agg, max(ident, float(direct)), herm)
