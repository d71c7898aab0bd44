"""Remainder dynamics ``phi = z + v`` at finite matrix cutoff.

``v`` solves ``dv/dt = -A v - c (sum_i N_i(v) + :z^3:)`` with ``c = 2 pi theta lambda``
and the adjacent-contraction cube. The second-order split ``v = y + w`` uses
``dy/dt = -A y - c :z^3:``. Both are integrated with exponential Euler, the
nonlinearity frozen at the left end of each step.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .field import NoiseSource, OUState, WickBundle, advance, sample_stationary, wick_bundle
from .params import ModelParams
from .spectral import WeightTable, h_norm


class NumericalFailure(RuntimeError):
    """Non-finite values appeared during integration."""


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    z: np.ndarray
    wick: WickBundle
    v: np.ndarray
    y: np.ndarray

    @property
    def w(self) -> np.ndarray:
        return self.v - self.y

    @property
    def phi(self) -> np.ndarray:
        return self.z + self.v


@dataclass(frozen=True)
class EnergyReport:
    t: float
    lhs_dissipation: float
    trace_term: float
    ddt_half_norm: float
    residual: float


def nonlinear_terms(v: np.ndarray, z: np.ndarray, z2: np.ndarray) -> list[np.ndarray]:
    """``[v^3, z v^2, v z v, v^2 z, z v z, v :z^2:, :z^2: v]``."""
    v2 = v @ v
    return [v2 @ v, z @ v2, v @ z @ v, v2 @ z, z @ v @ z, v @ z2, z2 @ v]


def remainder_rhs(v: np.ndarray, z: np.ndarray, w: WeightTable, coupling: float) -> np.ndarray:
    """``-c (sum_i N_i(v) + :z^3:)`` without the linear part.

    The seven terms plus the adjacent cube collapse to ``phi^3 - <z^2> phi - phi <z^2>``
    for ``phi = z + v``, which is what is evaluated here.
    """
    if coupling == 0.0:
        return np.zeros_like(v)
    phi = z + v
    t = w.tail
    cube = phi @ phi @ phi - t[:, None] * phi - phi * t[None, :]
    return -coupling * cube


def phi1(x: np.ndarray) -> np.ndarray:
    """``(1 - e^{-x}) / x`` with a series near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x / 2.0 + x * x / 6.0, -np.expm1(-safe) / safe)


def exp_euler_step(v: np.ndarray, rhs: np.ndarray, dt: float, w: WeightTable) -> np.ndarray:
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = w.a * dt
    return np.exp(-x) * v + phi1(x) * dt * rhs


def y_step(y: np.ndarray, z3: np.ndarray, dt: float, coupling: float, w: WeightTable) -> np.ndarray:
    return exp_euler_step(y, -coupling * z3, dt, w)


def s_terms(
    w: np.ndarray, y: np.ndarray, z: np.ndarray, z2: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Terms of the ``w`` equation that are quadratic, linear and constant in ``w``."""
    ww, yy = w @ w, y @ y
    s2 = ww @ z + w @ z @ w + z @ ww + ww @ y + w @ y @ w + y @ ww
    q = z2 + yy + y @ z + z @ y
    s1 = w @ q + q @ w + z @ w @ z + y @ w @ y + z @ w @ y + y @ w @ z
    s0 = yy @ y + yy @ z + y @ z @ y + z @ yy + y @ z2 + z @ y @ z + z2 @ y
    return s2, s1, s0


def w_rhs(w: np.ndarray, y: np.ndarray, z: np.ndarray, z2: np.ndarray, coupling: float) -> np.ndarray:
    s2, s1, s0 = s_terms(w, y, z, z2)
    return -coupling * (w @ w @ w + s2 + s1 + s0)


def energy_terms(
    w: np.ndarray, y: np.ndarray, z: np.ndarray, z2: np.ndarray, coupling: float, wt: WeightTable
) -> tuple[float, float]:
    """``(|w|^2_{H^1/2} + c |w^2|^2_{H^0}, -c tr[(S2+S1+S0) w])``."""
    ww = w @ w
    diss = float(np.sum(wt.a * np.abs(w) ** 2) + coupling * np.sum(np.abs(ww) ** 2))
    s2, s1, s0 = s_terms(w, y, z, z2)
    tr = np.einsum("mn,nm->", s2 + s1 + s0, w)
    return diss, float(-coupling * tr.real)


def energy_report(before: TrajectoryState, after: TrajectoryState, params: ModelParams, wt: WeightTable) -> EnergyReport:
    """Energy balance of ``w`` over one step, terms evaluated at the left state."""
    dt = after.t - before.t
    w0, w1 = before.w, after.w
    ddt = 0.5 * (float(np.sum(np.abs(w1) ** 2)) - float(np.sum(np.abs(w0) ** 2))) / dt
    diss, tr = energy_terms(w0, before.y, before.z, before.wick.z2, params.coupling, wt)
    return EnergyReport(before.t, diss, tr, ddt, ddt + diss - tr)


def _check(*arrays: np.ndarray, t: float) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericalFailure(f"non-finite field at t={t:.6g}; step size too large for this coupling and cutoff")


@dataclass
class Record:
    state: TrajectoryState
    energy: EnergyReport | None
    step: int


def _guarded_substeps(v: np.ndarray, dt: float, params: ModelParams, wt: WeightTable, limit: int = 30) -> int:
    """Smallest power of two ``s`` with ``dt/s * c * (1 + |v|^2) * K < 0.5``."""
    load = params.coupling * (1.0 + float(np.sum(np.abs(v) ** 2))) * wt.mult_constant
    s = 1
    while dt / s * load >= 0.5:
        s *= 2
        if s > 2**limit:
            raise NumericalFailure("step-size guard cannot be met")
    return s


def simulate(
    params: ModelParams,
    t_final: float,
    *,
    stride: int = 1,
    mode: str = "v",
    energy: bool = False,
    z_path: np.ndarray | None = None,
    noise: NoiseSource | None = None,
) -> Iterator[Record]:
    """Advance ``(z, :z^k:, y, v)`` on the uniform grid ``k * dt`` up to ``t_final``.

    Records are yielded at ``t = 0`` and every ``stride`` steps. With ``energy``
    set, each yielded record (except the last) carries the energy balance over
    the step that follows it. ``z_path`` supplies the free field on the grid
    instead of sampling it, which lets runs at different steps share one path;
    it must then hold ``steps + 1`` matrices.
    """
    if mode not in ("v", "w"):
        raise ValueError("mode must be 'v' or 'w'")
    wt = WeightTable.from_params(params)
    dt = params.step
    steps = int(math.floor(t_final / dt + 1e-9))
    c = params.coupling
    if z_path is not None:
        if len(z_path) < steps + 1:
            raise ValueError("z_path too short")
        ou = None
        z = z_path[0]
    else:
        ou = sample_stationary(params, noise, wt)
        z = ou.z
    zero = np.zeros((wt.size, wt.size), dtype=complex)
    state = TrajectoryState(0.0, z, wick_bundle(z, wt), zero, zero.copy())
    for j in range(steps + 1):
        nxt = None
        if j < steps:
            nxt, ou = _step(state, ou, z_path, j, dt, params, wt, mode, c)
        if j % stride == 0 or j == steps:
            rep = energy_report(state, nxt, params, wt) if energy and nxt is not None else None
            yield Record(state, rep, j)
        if nxt is None:
            break
        state = nxt


def _step(state, ou, z_path, j, dt, params, wt, mode, c):
    sub = 1 if c == 0.0 or z_path is not None else _guarded_substeps(state.v, dt, params, wt)
    h = dt / sub
    v, y, z, wick = state.v, state.y, state.z, state.wick
    for _ in range(sub):
        y_new = y_step(y, wick.z3_adj, h, c, wt)
        if mode == "v":
            v = exp_euler_step(v, remainder_rhs(v, z, wt, c), h, wt)
        else:
            v = exp_euler_step(v - y, w_rhs(v - y, y, z, wick.z2, c), h, wt) + y_new
        y = y_new
        if z_path is not None:
            z = z_path[j + 1]
        else:
            ou = advance(ou, h, wt)
            z = ou.z
        wick = wick_bundle(z, wt)
    t = (j + 1) * dt
    _check(v, y, t=t)
    return TrajectoryState(t, z, wick, v, y), ou


def run_series(params: ModelParams, t_final: float, *, stride: int = 1, **kw) -> dict[str, np.ndarray]:
    """Collect scalar diagnostics of :func:`simulate` into arrays."""
    wt = WeightTable.from_params(params)
    cols: dict[str, list[float]] = {k: [] for k in ("t", "v_h0", "v_hreg", "w_h0sq", "residual", "tr_phi2")}
    for rec in simulate(params, t_final, stride=stride, **kw):
        s = rec.state
        cols["t"].append(s.t)
        cols["v_h0"].append(float(h_norm(s.v, 0.0, wt)))
        cols["v_hreg"].append(float(h_norm(s.v, 0.5 - params.eps, wt)))
        cols["w_h0sq"].append(float(np.sum(np.abs(s.w) ** 2)))
        cols["residual"].append(rec.energy.residual if rec.energy else float("nan"))
        cols["tr_phi2"].append(float(np.sum(np.abs(s.phi) ** 2)))
    return {k: np.asarray(v) for k, v in cols.items()}


def energy_convergence(
    params: ModelParams, t_final: float, levels: int = 2, *, mode: str = "v"
) -> list[tuple[float, float]]:
    """Mean absolute energy residual at steps ``dt, dt/2, ...`` on one shared free-field path."""
    from .field import ou_path

    wt = WeightTable.from_params(params)
    dt = params.step
    fine = dt / 2 ** (levels - 1)
    coarse = int(math.floor(t_final / dt + 1e-9))
    t_final = coarse * dt
    steps = coarse * 2 ** (levels - 1)
    path = ou_path(sample_stationary(params, w=wt), fine, steps, wt)
    out = []
    for lev in range(levels):
        h = dt / 2**lev
        sub = path[:: 2 ** (levels - 1 - lev)]
        res = [
            abs(rec.energy.residual)
            for rec in simulate(params.with_(dt=h), t_final, z_path=sub, energy=True, mode=mode)
            if rec.energy is not None
        ]
        out.append((h, float(np.mean(res))))
    return out
