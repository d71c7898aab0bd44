"""Model and numerical parameters."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Any


class ConfigError(ValueError):
    """Invalid parameter value; ``key`` names the offending setting."""

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


def weight_value(m: int, n: int, theta: float, mass_sq: float) -> float:
    """Eigenvalue ``2*pi*theta*(M^2 + 4/theta*(m+n+1))`` of the kinetic operator."""
    return 2.0 * math.pi * theta * (mass_sq + 4.0 / theta * (m + n + 1))


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical parameters of a run.

    ``dt=None`` means the default step ``0.1 / A_NN`` (tied to the fastest mode).
    """

    theta: float = 1.0
    mass_sq: float = 1.0
    lam: float = 0.1
    cutoff: int = 8
    eps: float = 0.05
    eps_prime: float = 0.02
    dt: float | None = None
    seed: int = 42

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        checks = [
            ("theta", self.theta > 0, "must be positive"),
            ("mass_sq", self.mass_sq >= 0, "must be non-negative"),
            ("lambda", self.lam >= 0, "must be non-negative"),
            ("cutoff", int(self.cutoff) == self.cutoff and self.cutoff >= 0, "must be an integer >= 0"),
            ("eps", 0 < self.eps < 0.25, "must lie in (0, 0.25)"),
            ("eps_prime", 0 < self.eps_prime < 0.25, "must lie in (0, 0.25)"),
            ("seed", int(self.seed) == self.seed and 0 <= self.seed < 2**64, "must be a 64-bit unsigned integer"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(key, msg)
        for key in ("theta", "mass_sq", "lam", "eps", "eps_prime"):
            if not math.isfinite(getattr(self, key)):
                raise ConfigError(key, "must be finite")
        if self.dt is not None and not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError("dt", "must be positive")
        if self.a00 < 1.0:
            raise ConfigError("theta", f"A_00 = {self.a00:.6g} < 1; norms would not be monotone in the exponent")

    @property
    def a00(self) -> float:
        return weight_value(0, 0, self.theta, self.mass_sq)

    @property
    def a_max(self) -> float:
        return weight_value(self.cutoff, self.cutoff, self.theta, self.mass_sq)

    @property
    def step(self) -> float:
        """Effective integrator step."""
        return self.dt if self.dt is not None else 0.1 / self.a_max

    @property
    def coupling(self) -> float:
        """Prefactor ``2*pi*theta*lambda`` of the cubic term."""
        return 2.0 * math.pi * self.theta * self.lam

    @property
    def alpha(self) -> float:
        return 0.5 - self.eps

    @property
    def beta(self) -> float:
        return -self.eps - self.eps_prime

    @property
    def delta(self) -> float:
        return min(self.eps_prime / 2.0, 0.01)

    def with_(self, **changes: Any) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
