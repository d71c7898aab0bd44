"""Numeric checks of the six summation inequalities for the weights ``A_mn``.

Each case compares a truncated infinite sum with its claimed power-law bound on
a grid ``m, n <= m_max`` and reports the largest LHS/RHS ratio. A bound holds
in the ``<~`` sense when that ratio stays bounded as the grid grows.

Cases (exponents ``a``, ``b``):

1. ``sum_k A_mk^-a A_kn^-b`` vs ``A_mn^-(a+b-1)`` for ``a, b in (0,1)``, ``a+b > 1``
2. the same sum vs ``A_mn^-(min(a,b)-delta)`` for ``a >= 1`` or ``b >= 1``
3. ``sum_m A_mm^-a A_mn^-b`` vs ``A_nn^-(a+b-1)`` for ``a, b > 0``, ``a+b > 1``, ``a < 1``
4. the same sum vs ``A_nn^-(b-delta)`` for ``b > 0``, ``a >= 1``
5. ``sum_m A_mn^-a`` vs ``A_nn^-(a-1)`` for ``a > 1``
6. ``sum_k A_mk^-1 A_kk^-a A_kn^-1`` vs ``A_mn^-1`` for ``a in (0,1)``
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import ModelParams

DEFAULT_EXPONENTS: dict[int, tuple[float, ...]] = {
    1: (0.75, 0.75),
    2: (1.0, 0.6),
    3: (0.5, 0.75),
    4: (1.2, 0.6),
    5: (2.0,),
    6: (0.5,),
}


@dataclass
class CorrelationReport:
    case: int
    exponents: tuple[float, ...]
    m_max: int
    max_ratio: float
    grid: np.ndarray  # ratio table over the outer grid (1-d for cases 3-5)
    inner_bound: int
    tail_fraction: float  # largest estimated tail / partial sum over the grid
    converged: bool  # convergence guard on the truncated inner sum
    notes: list[str] = field(default_factory=list)


def _a(i: np.ndarray, j: np.ndarray, theta: float, mass_sq: float) -> np.ndarray:
    return 2.0 * np.pi * theta * (mass_sq + 4.0 / theta * (i + j + 1))


def _validate(case: int, ex: tuple[float, ...]) -> None:
    if case not in DEFAULT_EXPONENTS:
        raise ValueError(f"unknown case {case}")
    need = len(DEFAULT_EXPONENTS[case])
    if len(ex) != need:
        raise ValueError(f"case {case} takes {need} exponent(s)")
    if case == 1:
        a, b = ex
        ok = 0 < a < 1 and 0 < b < 1 and a + b > 1
    elif case == 2:
        a, b = ex
        ok = (a >= 1 or b >= 1) and a > 0 and b > 0
    elif case == 3:
        a, b = ex
        ok = a > 0 and b > 0 and a + b > 1 and a < 1
    elif case == 4:
        a, b = ex
        ok = b > 0 and a >= 1
    elif case == 5:
        ok = ex[0] > 1
    else:
        ok = 0 < ex[0] < 1
    if not ok:
        raise ValueError(f"exponents {ex} violate the hypotheses of case {case}")


def check_correlation_inequality(
    case: int,
    exponents: tuple[float, ...] | list[float] | None = None,
    m_max: int = 32,
    params: ModelParams | None = None,
    *,
    delta: float = 0.01,
    inner_factor: int = 10,
    guard: float = 1e-12,
) -> CorrelationReport:
    """Max LHS/RHS ratio of inequality ``case`` over the grid ``0..m_max``.

    The inner sum runs to ``inner_factor * m_max``; the remaining power-law tail
    is added through its integral estimate and its relative size is reported.
    The guard flags sums whose tail is not below ``guard`` times the partial sum.
    """
    params = params or ModelParams()
    ex = tuple(float(e) for e in (exponents if exponents is not None else DEFAULT_EXPONENTS[case]))
    _validate(case, ex)
    th, ms = params.theta, params.mass_sq
    kmax = max(inner_factor * m_max, m_max + 1)
    outer = np.arange(m_max + 1)
    inner = np.arange(kmax + 1)
    offset = 1.0 + th * ms / 4.0  # A_mn = 8 pi (m + n + offset)

    if case in (1, 2, 6):
        a_mk = _a(outer[:, None], inner[None, :], th, ms)
        if case == 6:
            (e,) = ex
            left = 1.0 / a_mk
            mid = _a(inner, inner, th, ms) ** (-e)
            lhs = (left * mid) @ left.T
            decay = 2.0 + e
        else:
            a, b = ex
            lhs = (a_mk ** (-a)) @ (a_mk ** (-b)).T
            decay = a + b
        last_row = a_mk[:, -1]
        if case == 6:
            last = (last_row[:, None] * last_row[None, :]) ** (-1) * _a(kmax, kmax, th, ms) ** (-ex[0])
        else:
            last = last_row[:, None] ** (-ex[0]) * last_row[None, :] ** (-ex[1])
        a_grid = _a(outer[:, None], outer[None, :], th, ms)
        if case == 1:
            rhs = a_grid ** (-(ex[0] + ex[1] - 1.0))
        elif case == 2:
            rhs = a_grid ** (-(min(ex) - delta))
        else:
            rhs = 1.0 / a_grid
    else:
        a_nn = _a(outer, outer, th, ms)
        if case == 5:
            (a,) = ex
            terms = _a(inner[:, None], outer[None, :], th, ms) ** (-a)
            decay = a
            rhs = a_nn ** (-(a - 1.0))
        else:
            a, b = ex
            terms = _a(inner, inner, th, ms)[:, None] ** (-a) * _a(inner[:, None], outer[None, :], th, ms) ** (-b)
            decay = a + b
            rhs = a_nn ** (-(a + b - 1.0)) if case == 3 else a_nn ** (-(b - delta))
        lhs = terms.sum(axis=0)
        last = terms[-1]

    # integral estimate of sum_{k > kmax} for a summand decaying like (k + s)^-decay
    if case in (1, 2):
        shift = (ex[0] * outer[:, None] + ex[1] * outer[None, :]) / decay
    elif case == 6:
        shift = (outer[:, None] + outer[None, :]) / decay
    elif case == 5:
        shift = outer.astype(float)
    else:
        shift = ex[1] * outer / decay
    tail = last * (kmax + 0.5 + offset + shift) / (decay - 1.0)
    lhs_total = lhs + tail
    ratio = lhs_total / rhs
    tail_frac = float(np.max(tail / lhs))
    rep = CorrelationReport(
        case=case,
        exponents=ex,
        m_max=m_max,
        max_ratio=float(np.max(ratio)),
        grid=ratio,
        inner_bound=kmax,
        tail_fraction=tail_frac,
        converged=tail_frac < guard,
    )
    if not rep.converged:
        rep.notes.append(f"power-law tail estimated at {tail_frac:.3g} of the partial sum and added")
    return rep


def boundedness_trend(
    case: int,
    exponents: tuple[float, ...] | None = None,
    params: ModelParams | None = None,
    grids: tuple[int, int] = (32, 64),
    **kw: float,
) -> tuple[float, float]:
    """Max ratios at two grid sizes; bounded growth means the second is within 2x of the first."""
    r1 = check_correlation_inequality(case, exponents, grids[0], params, **kw).max_ratio
    r2 = check_correlation_inequality(case, exponents, grids[1], params, **kw).max_ratio
    return r1, r2
