"""Report figures rendered to files with the non-interactive Agg backend."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata keeps PNG bytes reproducible
_META = {"Software": None}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_META)
    plt.close(fig)
    return path


def plot_series(path: str | Path, t: np.ndarray, columns: Mapping[str, np.ndarray], burn_in: float | None = None) -> Path:
    names = [k for k in columns if np.any(np.isfinite(columns[k]))]
    fig, axes = plt.subplots(len(names), 1, figsize=(7, 1.8 * len(names) + 0.6), sharex=True, squeeze=False)
    for ax, name in zip(axes[:, 0], names):
        ax.plot(t, columns[name], lw=0.8)
        ax.set_ylabel(name)
        if burn_in is not None:
            ax.axvline(burn_in, color="0.6", ls="--", lw=0.8)
    axes[-1, 0].set_xlabel("t")
    return _save(fig, path)


def plot_two_point(path: str | Path, estimate: np.ndarray, stderr: np.ndarray, target: np.ndarray) -> Path:
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 3.8))
    z = (estimate - target) / np.where(stderr > 0, stderr, np.inf)
    im = a1.imshow(estimate / target, cmap="viridis")
    a1.set_title("time average / free value")
    a1.set_xlabel("n")
    a1.set_ylabel("m")
    fig.colorbar(im, ax=a1)
    lim = max(3.0, float(np.max(np.abs(z))))
    im2 = a2.imshow(z, cmap="coolwarm", vmin=-lim, vmax=lim)
    a2.set_title("deviation in standard errors")
    a2.set_xlabel("n")
    fig.colorbar(im2, ax=a2)
    return _save(fig, path)


def plot_zscores(path: str | Path, labels: Sequence[str], zscores: Sequence[np.ndarray]) -> Path:
    fig, ax = plt.subplots(figsize=(7, 3.6))
    for k, (lab, z) in enumerate(zip(labels, zscores)):
        z = np.ravel(z)
        ax.plot(np.full(z.shape, k) + np.linspace(-0.3, 0.3, len(z)), z, ".", ms=3)
    ax.axhline(3, color="r", lw=0.8)
    ax.axhline(-3, color="r", lw=0.8)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, fontsize=8)
    ax.set_ylabel("z-score")
    return _save(fig, path)


def plot_inequality_ratios(path: str | Path, rows: Sequence[tuple[int, float, float]]) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.4))
    cases = [r[0] for r in rows]
    x = np.arange(len(rows))
    ax.bar(x - 0.2, [r[1] for r in rows], 0.4, label="m_max = 32")
    ax.bar(x + 0.2, [r[2] for r in rows], 0.4, label="m_max = 64")
    ax.set_xticks(x)
    ax.set_xticklabels([f"case {c}" for c in cases])
    ax.set_yscale("log")
    ax.set_ylabel("max LHS/RHS")
    ax.legend()
    return _save(fig, path)


def plot_contraction_sums(path: str | Path, n_sum: Sequence[int], values: Mapping[int, Sequence[float]]) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    for cid, vals in values.items():
        ax.plot(n_sum, vals, marker=".", lw=0.7, label=str(cid) if len(values) <= 12 else None)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("summation cutoff")
    ax.set_ylabel("contraction sum")
    if len(values) <= 12:
        ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def plot_field(path: str | Path, x1: np.ndarray, x2: np.ndarray, values: np.ndarray) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.pcolormesh(x1, x2, values, shading="auto", cmap="RdBu_r")
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    fig.colorbar(im, ax=ax)
    return _save(fig, path)


def plot_averages(path: str | Path, names: Sequence[str], means: Sequence[float], errs: Sequence[float]) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.4))
    x = np.arange(len(names))
    ax.errorbar(x, means, yerr=3 * np.asarray(errs), fmt="o", capsize=4)
    ax.set_xticks(x)
    ax.set_xticklabels(names, fontsize=8)
    ax.set_ylabel("time average (3 SE bars)")
    return _save(fig, path)
