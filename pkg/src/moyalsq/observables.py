"""Time averages, stationarity diagnostics, renormalized observables and the position-space basis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .spectral import WeightTable


class InsufficientData(ValueError):
    pass


@dataclass
class TimeSeries:
    name: str
    times: np.ndarray
    values: np.ndarray
    burn_in: float = 0.0
    n_batches: int = 32

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values)
        if self.times.shape[0] != self.values.shape[0]:
            raise ValueError("times and values differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if len(self.times) and self.burn_in >= self.times[-1]:
            raise InsufficientData("burn-in covers the whole series")

    def kept(self) -> np.ndarray:
        return self.values[self.times >= self.burn_in]


def batch_means(values: np.ndarray, n_batches: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Batch-means mean and standard error along axis 0 (extra axes are kept entrywise)."""
    if n_batches < 20:
        raise InsufficientData("at least 20 batches are required")
    values = np.asarray(values)
    size = values.shape[0] // n_batches
    if size < 2:
        raise InsufficientData(f"{values.shape[0]} points cannot fill {n_batches} batches")
    used = values[values.shape[0] - size * n_batches :]
    means = used.reshape((n_batches, size) + values.shape[1:]).mean(axis=1)
    return means.mean(axis=0), means.std(axis=0, ddof=1) / np.sqrt(n_batches)


def time_average(ts: TimeSeries) -> tuple[float, float]:
    mean, se = batch_means(ts.kept(), ts.n_batches)
    return float(mean), float(se)


def two_point_estimate(
    times: np.ndarray, phis: np.ndarray, burn_in: float, n_batches: int = 32
) -> tuple[np.ndarray, np.ndarray]:
    """Per-entry time average of ``|phi_mn|^2`` and its batch-means standard error."""
    keep = np.asarray(times) >= burn_in
    return batch_means(np.abs(np.asarray(phis)[keep]) ** 2, n_batches)


@dataclass(frozen=True)
class StationarityResult:
    statistic: float
    pvalue: float
    passed: bool


def stationarity_test(ts: TimeSeries, level: float = 0.01) -> StationarityResult:
    """Two-sample Kolmogorov-Smirnov test between the halves of the kept series."""
    x = ts.kept()
    if len(x) < 8:
        raise InsufficientData("need at least 8 points after burn-in")
    half = len(x) // 2
    res = stats.ks_2samp(x[:half], x[half:])
    return StationarityResult(float(res.statistic), float(res.pvalue), bool(res.pvalue >= level))


def renormalized_trace_phi4(phi: np.ndarray, w: WeightTable) -> float:
    """``tr(phi^4) - 4 tr(<z^2> phi^2) + 2 tr(<z^2>^2)`` with ``<z^2> = diag(sum_k 1/A_mk)``."""
    t = w.tail
    p2 = phi @ phi
    val = np.einsum("mn,nm->", p2, p2) - 4.0 * np.sum(t * np.diagonal(p2)) + 2.0 * np.sum(t * t)
    return float(val.real)


def basis_function(m: int, n: int, x1: np.ndarray, x2: np.ndarray, theta: float = 1.0) -> np.ndarray:
    """Matrix-basis function ``b_mn`` at points ``(x1, x2)``.

    ``b_mn = 2 (-1)^m sqrt(m!/n!) (sqrt(2/theta)(x1 + i x2))^(n-m) L_m^(n-m)(2|x|^2/theta) exp(-|x|^2/theta)``
    for ``m <= n`` and ``conj(b_nm)`` otherwise. The family is orthonormal for the
    measure ``dx / (2 pi theta)``.
    """
    if m > n:
        return np.conj(basis_function(n, m, x1, x2, theta))
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    r2 = x1 * x1 + x2 * x2
    d = n - m
    pref = 2.0 * (-1.0) ** m * np.exp(0.5 * (special.gammaln(m + 1) - special.gammaln(n + 1)))
    zc = np.sqrt(2.0 / theta) * (x1 + 1j * x2)
    return pref * zc**d * special.eval_genlaguerre(m, d, 2.0 * r2 / theta) * np.exp(-r2 / theta)


def reconstruct_field(c: np.ndarray, x1: np.ndarray, x2: np.ndarray, theta: float = 1.0) -> tuple[np.ndarray, float]:
    """``sum_mn c_mn b_mn(x)``; returns the real part and the largest imaginary residual."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    size = c.shape[0]
    total = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
    for m in range(size):
        for n in range(m, size):
            b = basis_function(m, n, x1, x2, theta)
            total += c[m, n] * b
            if n != m:
                total += c[n, m] * np.conj(b)
    resid = float(np.max(np.abs(total.imag))) if total.size else 0.0
    return total.real, resid


def polar_quadrature(theta: float = 1.0, n_radial: int = 40, n_angular: int = 32) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes ``(x1, x2)`` and weights for ``int f dx`` over the plane.

    Radial Gauss-Laguerre in ``u = 2|x|^2/theta`` (exact against ``e^{-u}`` times
    polynomials) and the trapezoid rule in angle.
    """
    u, wu = special.roots_laguerre(n_radial)
    r = np.sqrt(theta * u / 2.0)
    phi = 2.0 * np.pi * np.arange(n_angular) / n_angular
    # dx = r dr dphi = theta/4 du dphi; undo the e^{-u} folded into wu
    wr = wu * np.exp(u) * theta / 4.0
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    ww = np.repeat(wr[:, None], n_angular, axis=1) * (2.0 * np.pi / n_angular)
    return (rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel(), ww.ravel()


def gram_matrix(max_index: int, theta: float = 1.0, **quad: int) -> np.ndarray:
    """``(1/(2 pi theta)) int b_mn conj(b_m'n') dx`` for all ``m, n <= max_index``, flattened row-major."""
    x1, x2, wq = polar_quadrature(theta, **quad)
    labels = [(m, n) for m in range(max_index + 1) for n in range(max_index + 1)]
    vals = np.array([basis_function(m, n, x1, x2, theta) for m, n in labels])
    return (vals * wq) @ np.conj(vals).T / (2.0 * np.pi * theta)
