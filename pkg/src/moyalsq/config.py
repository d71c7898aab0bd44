"""Run configuration: ``key = value`` sections, command-line overrides, effective-config emission.

Sections and keys::

    [model]    theta mass_sq lambda cutoff eps eps_prime dt seed
    [run]      t_final snapshot_stride burn_in mode ensemble_size samples n_batches
    [diagrams] alpha beta delta n_sum
    [output]   directory formats snapshot_on

Every default is resolved at parse time (``dt = 0.1/A_NN``, ``burn_in = 20/A_00``,
``t_final = burn_in + 200/A_00``, ``alpha = 1/2 - eps``, ``beta = -eps - eps'``,
``delta = min(eps'/2, 0.01)``), so the emitted text re-parses to the same config.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path

from .params import ConfigError, ModelParams

_MODEL_KEYS = {
    "theta": ("theta", float),
    "mass_sq": ("mass_sq", float),
    "lambda": ("lam", float),
    "cutoff": ("cutoff", int),
    "eps": ("eps", float),
    "eps_prime": ("eps_prime", float),
    "dt": ("dt", float),
    "seed": ("seed", int),
}
_RUN_KEYS = {
    "t_final": float,
    "snapshot_stride": int,
    "burn_in": float,
    "mode": str,
    "ensemble_size": int,
    "samples": int,
    "n_batches": int,
}
_DIAGRAM_KEYS = {"alpha": float, "beta": float, "delta": float, "n_sum": str}
_OUTPUT_KEYS = {"directory": str, "formats": str, "snapshot_on": str}
_SECTIONS = {"model": _MODEL_KEYS, "run": _RUN_KEYS, "diagrams": _DIAGRAM_KEYS, "output": _OUTPUT_KEYS}


@dataclass(frozen=True)
class RunSettings:
    t_final: float
    burn_in: float
    snapshot_stride: int = 10
    mode: str = "v"
    ensemble_size: int = 1
    samples: int = 10000
    n_batches: int = 32


@dataclass(frozen=True)
class DiagramSettings:
    alpha: float
    beta: float
    delta: float
    n_sum: tuple[int, ...] = (8, 16, 32)


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv",)
    snapshot_on: bool = False


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    run: RunSettings
    diagrams: DiagramSettings
    output: OutputSettings

    def emit(self) -> str:
        m = self.model
        r, d, o = self.run, self.diagrams, self.output
        lines = [
            "[model]",
            f"theta = {m.theta!r}",
            f"mass_sq = {m.mass_sq!r}",
            f"lambda = {m.lam!r}",
            f"cutoff = {m.cutoff}",
            f"eps = {m.eps!r}",
            f"eps_prime = {m.eps_prime!r}",
            f"dt = {m.step!r}",
            f"seed = {m.seed}",
            "",
            "[run]",
            f"t_final = {r.t_final!r}",
            f"snapshot_stride = {r.snapshot_stride}",
            f"burn_in = {r.burn_in!r}",
            f"mode = {r.mode}",
            f"ensemble_size = {r.ensemble_size}",
            f"samples = {r.samples}",
            f"n_batches = {r.n_batches}",
            "",
            "[diagrams]",
            f"alpha = {d.alpha!r}",
            f"beta = {d.beta!r}",
            f"delta = {d.delta!r}",
            f"n_sum = {','.join(str(n) for n in d.n_sum)}",
            "",
            "[output]",
            f"directory = {o.directory}",
            f"formats = {','.join(o.formats)}",
            f"snapshot_on = {'true' if o.snapshot_on else 'false'}",
        ]
        return "\n".join(lines) + "\n"


def _convert(key: str, raw: str, kind):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(key, f"cannot read {raw!r} as {kind.__name__}") from None


def _bool(key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"cannot read {raw!r} as a boolean")


def _read_sections(text: str) -> dict[str, dict[str, str]]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None
    out: dict[str, dict[str, str]] = {}
    for sec in cp.sections():
        if sec not in _SECTIONS:
            raise ConfigError(sec, "unknown section")
        for key, val in cp.items(sec):
            if key not in _SECTIONS[sec]:
                raise ConfigError(f"{sec}.{key}", "unknown key")
        out[sec] = dict(cp.items(sec))
    return out


def apply_overrides(values: dict[str, dict[str, str]], overrides: list[str]) -> None:
    """Apply ``section.key=value`` overrides in place."""
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(item, "override must look like section.key=value")
        lhs, val = item.split("=", 1)
        sec, key = lhs.strip().split(".", 1)
        if sec not in _SECTIONS:
            raise ConfigError(sec, "unknown section")
        if key not in _SECTIONS[sec]:
            raise ConfigError(f"{sec}.{key}", "unknown key")
        values.setdefault(sec, {})[key] = val.strip()


def build(values: dict[str, dict[str, str]]) -> RunConfig:
    """Validate raw section values and fill every default."""
    mv = values.get("model", {})
    kw = {}
    for key, raw in mv.items():
        field, kind = _MODEL_KEYS[key]
        kw[field] = _convert(f"model.{key}", raw, kind)
    try:
        model = ModelParams(**kw)
    except ConfigError as exc:
        raise ConfigError(f"model.{exc.key}", str(exc).split(": ", 1)[-1]) from None
    model = replace(model, dt=model.step)

    rv = values.get("run", {})
    burn_in = _convert("run.burn_in", rv["burn_in"], float) if "burn_in" in rv else 20.0 / model.a00
    t_final = _convert("run.t_final", rv["t_final"], float) if "t_final" in rv else burn_in + 200.0 / model.a00
    run = RunSettings(t_final=t_final, burn_in=burn_in)
    for key in ("snapshot_stride", "ensemble_size", "samples", "n_batches", "mode"):
        if key in rv:
            run = replace(run, **{key: _convert(f"run.{key}", rv[key], _RUN_KEYS[key])})
    checks = [
        ("run.t_final", run.t_final > 0, "must be positive"),
        ("run.burn_in", 0 <= run.burn_in < run.t_final, "must satisfy 0 <= burn_in < t_final"),
        ("run.snapshot_stride", run.snapshot_stride >= 1, "must be >= 1"),
        ("run.mode", run.mode in ("v", "w"), "must be v or w"),
        ("run.ensemble_size", run.ensemble_size >= 1, "must be >= 1"),
        ("run.samples", run.samples >= 100, "must be >= 100"),
        ("run.n_batches", run.n_batches >= 20, "must be >= 20"),
    ]
    for key, ok, msg in checks:
        if not ok:
            raise ConfigError(key, msg)

    dv = values.get("diagrams", {})
    alpha = _convert("diagrams.alpha", dv["alpha"], float) if "alpha" in dv else model.alpha
    beta = _convert("diagrams.beta", dv["beta"], float) if "beta" in dv else model.beta
    delta = _convert("diagrams.delta", dv["delta"], float) if "delta" in dv else model.delta
    if not delta > 0:
        raise ConfigError("diagrams.delta", "must be positive")
    n_sum = (8, 16, 32)
    if "n_sum" in dv:
        try:
            n_sum = tuple(int(x) for x in dv["n_sum"].split(",") if x.strip())
        except ValueError:
            raise ConfigError("diagrams.n_sum", "must be a comma-separated list of integers") from None
        if not n_sum or min(n_sum) < 0:
            raise ConfigError("diagrams.n_sum", "must list non-negative integers")
    diagrams = DiagramSettings(alpha, beta, delta, n_sum)

    ov = values.get("output", {})
    formats = tuple(x.strip() for x in ov.get("formats", "csv").split(",") if x.strip())
    bad = [f for f in formats if f not in ("csv", "json")]
    if bad or not formats:
        raise ConfigError("output.formats", "must list csv and/or json")
    output = OutputSettings(
        directory=ov.get("directory", "out"),
        formats=formats,
        snapshot_on=_bool("output.snapshot_on", ov["snapshot_on"]) if "snapshot_on" in ov else False,
    )
    return RunConfig(model, run, diagrams, output)


def parse_config(path: str | Path | None = None, overrides: list[str] | None = None, text: str | None = None) -> RunConfig:
    """Read a config file (or text), apply overrides, validate and fill defaults."""
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError("config", f"no such file: {p}")
        text = p.read_text()
    values = _read_sections(text or "")
    apply_overrides(values, overrides or [])
    return build(values)
