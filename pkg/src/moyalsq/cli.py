"""Command-line entry point.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 failed check.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io, plotting
from .config import RunConfig, parse_config
from .diagrams import (
    REFERENCE_GROUPS,
    classify,
    compare_with_reference,
    contraction_sum_numeric,
    format_pairing,
    reduce,
    verify_trace,
)
from .dynamics import NumericalFailure, simulate
from .field import NoiseSource, free_field_statistics, sample_stationary
from .inequalities import DEFAULT_EXPONENTS, check_correlation_inequality
from .io import read_snapshot, write_columns, write_csv, write_manifest, write_snapshot
from .observables import InsufficientData, TimeSeries, batch_means, reconstruct_field, renormalized_trace_phi4, stationarity_test, time_average
from .params import ConfigError, ModelParams
from .spectral import WeightTable, h_norm

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4


class _Run:
    """Output directory, written files and summary for one subcommand."""

    def __init__(self, name: str, cfg: RunConfig) -> None:
        self.name = name
        self.cfg = cfg
        self.dir = Path(cfg.output.directory)
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError("output.directory", f"cannot create {self.dir}: {exc.strerror}") from None
        self.files: list[Path] = []
        self.summary: dict = {}
        self.started = time.perf_counter()

    def path(self, name: str) -> Path:
        p = self.dir / name
        self.files.append(p)
        return p

    def finish(self) -> None:
        if "json" in self.cfg.output.formats:
            p = self.path("summary.json")
            p.write_text(json.dumps(self.summary, indent=2, sort_keys=True, default=io._json_default) + "\n")
        write_manifest(self.dir, self.name, self.cfg.emit(), self.cfg.model.seed, self.files, self.started, self.summary)


def _member_seed(seed: int, member: int) -> int:
    if member == 0:
        return seed
    return int(np.random.SeedSequence([seed, member]).generate_state(1, np.uint64)[0])


def _trajectory(params: ModelParams, cfg: RunConfig, energy: bool):
    """Scalar series and post-burn-in field samples at the snapshot stride."""
    wt = WeightTable.from_params(params)
    cols = {k: [] for k in ("t", "v_h0", "v_hreg", "w_h0sq", "tr_phi2", "tr_phi4_ren", "residual")}
    phis, last = [], None
    for rec in simulate(params, cfg.run.t_final, stride=cfg.run.snapshot_stride, mode=cfg.run.mode, energy=energy):
        s = rec.state
        phi = s.phi
        cols["t"].append(s.t)
        cols["v_h0"].append(h_norm(s.v, 0.0, wt))
        cols["v_hreg"].append(h_norm(s.v, params.alpha, wt))
        cols["w_h0sq"].append(float(np.sum(np.abs(s.w) ** 2)))
        cols["tr_phi2"].append(float(np.sum(np.abs(phi) ** 2)))
        cols["tr_phi4_ren"].append(renormalized_trace_phi4(phi, wt))
        cols["residual"].append(rec.energy.residual if rec.energy else float("nan"))
        if s.t >= cfg.run.burn_in:
            phis.append(phi)
        last = s
    return {k: np.asarray(v, dtype=float) for k, v in cols.items()}, np.asarray(phis), last, wt


def cmd_simulate(cfg: RunConfig, args) -> int:
    run = _Run("simulate", cfg)
    failures = []
    for member in range(cfg.run.ensemble_size):
        tag = "" if cfg.run.ensemble_size == 1 else f"_e{member:03d}"
        params = replace(cfg.model, seed=_member_seed(cfg.model.seed, member))
        cols, phis, last, wt = _trajectory(params, cfg, energy=True)
        write_columns(run.path(f"series{tag}.csv"), cols)
        plotting.plot_series(run.path(f"series{tag}.png"), cols["t"], {k: v for k, v in cols.items() if k != "t"}, cfg.run.burn_in)
        mean, se = batch_means(np.abs(phis) ** 2, cfg.run.n_batches)
        target = 1.0 / wt.a
        z = (mean - target) / se
        rows = [
            (m, n, mean[m, n], se[m, n], target[m, n], z[m, n]) for m in range(wt.size) for n in range(wt.size)
        ]
        write_csv(run.path(f"two_point{tag}.csv"), ["m", "n", "estimate", "stderr", "free_value", "z"], rows)
        plotting.plot_two_point(run.path(f"two_point{tag}.png"), mean, se, target)
        if cfg.output.snapshot_on:
            write_snapshot(
                run.path(f"final{tag}.msq"), last.t, {"z": last.z, "v": last.v, "y": last.y, "phi": last.phi}, params.to_dict()
            )
            run.files.append(run.dir / f"final{tag}.msq.json")
        info = {"seed": params.seed, "max_abs_z_two_point": float(np.max(np.abs(z)))}
        if params.lam == 0.0:
            rel00 = abs(mean[0, 0] / target[0, 0] - 1.0)
            info["rel_err_00"] = float(rel00)
            bad = [(m, n) for m, n, *_ , zz in rows if abs(zz) > 3.0]
            if bad:
                failures.append(f"member {member}: two-point entries outside 3 SE: {bad}")
            if rel00 > 0.05:
                failures.append(f"member {member}: (0,0) relative error {rel00:.3g} > 5%")
        else:
            keep = cols["t"] >= cfg.run.burn_in
            st = stationarity_test(TimeSeries("w_h0sq", cols["t"], cols["w_h0sq"], cfg.run.burn_in))
            info["w_h0sq_ks_pvalue"] = st.pvalue
            info["w_h0sq_max"] = float(np.max(cols["w_h0sq"][keep]))
        run.summary[f"member{tag or '_e000'}"] = info
    run.summary["failures"] = failures
    run.finish()
    return _report(failures)


def cmd_free_field(cfg: RunConfig, args) -> int:
    run = _Run("free-field", cfg)
    n = args.samples or cfg.run.samples
    stats = free_field_statistics(cfg.model, n)
    write_csv(run.path("free_field.csv"), ["quantity", "m", "n", "part", "mean", "stderr", "expected", "z"], stats.rows)
    names = list(stats.aggregate)
    plotting.plot_zscores(run.path("free_field.png"), names, [[r[7] for r in stats.rows if r[0] == k] for k in names])
    failures = [f"{k}: mean z^2 {v[0]:.3f} above 3-SE limit {v[1]:.3f}" for k, v in stats.aggregate.items() if not v[2]]
    if stats.identity_error > 1e-12:
        failures.append(f"convention identity error {stats.identity_error:.3g}")
    if stats.hermitian_error > 1e-12:
        failures.append(f"hermiticity error {stats.hermitian_error:.3g}")
    run.summary = {
        "samples": n,
        "aggregate": {k: {"mean_z_sq": v[0], "limit": v[1], "passed": v[2]} for k, v in stats.aggregate.items()},
        "max_abs_z": stats.max_abs_z(),
        "identity_error": stats.identity_error,
        "failures": failures,
    }
    run.finish()
    return _report(failures)


def cmd_diagrams(cfg: RunConfig, args) -> int:
    run = _Run("diagrams", cfg)
    d = cfg.diagrams
    classes = classify()
    traces = {c.class_id: reduce(c.graph, d.alpha, d.beta, d.delta) for c in classes}
    verified = {cid: verify_trace(c.graph, traces[cid]) for cid, c in zip(traces, classes)}
    of_pairing = {p: c.class_id for c in classes for p in c.members}
    ref_items: dict[int, list[int]] = {}
    for item, group in enumerate(REFERENCE_GROUPS, start=1):
        for cid in sorted({of_pairing[p] for p in group}):
            ref_items.setdefault(cid, []).append(item)
    rows = []
    for c in classes:
        tr = traces[c.class_id]
        fe = "" if tr.final_exponent is None else f"{float(tr.final_exponent):.6g}"
        items = " ".join(str(i) for i in ref_items.get(c.class_id, []))
        rows.append((c.class_id, c.multiplicity, c.member_text(), tr.outcome, fe, verified[c.class_id], items))
    write_csv(run.path("classes.csv"), ["class_id", "multiplicity", "members", "outcome", "final_exponent", "verified", "reference_items"], rows)
    ref_rows = []
    for item, group in enumerate(REFERENCE_GROUPS, start=1):
        cid = of_pairing[group[0]]
        ref_rows.append((item, len(group), " ".join(format_pairing(p) for p in group), cid, traces[cid].outcome))
    write_csv(run.path("reference_items.csv"), ["item", "multiplicity", "members", "computed_class", "outcome"], ref_rows)
    with run.path("traces.txt").open("w") as fh:
        fh.write(f"alpha = {d.alpha!r}, beta = {d.beta!r}, delta = {d.delta!r}\n\n")
        for c in classes:
            tr = traces[c.class_id]
            g = c.graph
            names = {v: g.vertex_name(v) for v in range(g.n_vertices)}
            fh.write(f"class {c.class_id} (x{c.multiplicity}) {format_pairing(c.members[0])}: {tr.outcome}\n")
            for st in tr.steps:
                fh.write(f"  {st.text(names)}\n")
            for note in tr.notes:
                fh.write(f"  note: {note}\n")
            if tr.remaining:
                fh.write(f"  remaining: {tr.remaining}\n")
            fh.write("\n")
    sums = {c.class_id: [contraction_sum_numeric(c.members[0], d.alpha, d.beta, cfg.model, n) for n in d.n_sum] for c in classes}
    write_csv(
        run.path("contraction_sums.csv"),
        ["class_id", "n_sum", "value", "times_multiplicity"],
        [(c.class_id, n, v, v * c.multiplicity) for c in classes for n, v in zip(d.n_sum, sums[c.class_id])],
    )
    plotting.plot_contraction_sums(run.path("contraction_sums.png"), d.n_sum, sums)
    cmp = compare_with_reference(classes, REFERENCE_GROUPS)
    run.path("reference_comparison.json").write_text(json.dumps(cmp, indent=2) + "\n")
    failures = [f"class {cid} {traces[cid].outcome}" + ("" if verified[cid] else " (unverified)") for cid in traces if not verified[cid]]
    if cmp["only_computed"] or cmp["only_reference"]:
        print(
            f"note: {len(classes)} isomorphism classes against {len(REFERENCE_GROUPS)} reference groups; "
            "see reference_comparison.json",
            file=sys.stderr,
        )
    run.summary = {
        "classes": len(classes),
        "reference_groups": len(REFERENCE_GROUPS),
        "finite": sum(tr.finite for tr in traces.values()),
        "reference_comparison": cmp,
        "failures": failures,
    }
    run.finish()
    return _report(failures)


def cmd_inequalities(cfg: RunConfig, args) -> int:
    run = _Run("inequalities", cfg)
    g1, g2 = args.grids
    rows, plot_rows, failures = [], [], []
    for case, ex in DEFAULT_EXPONENTS.items():
        r1 = check_correlation_inequality(case, ex, g1, cfg.model, delta=cfg.diagrams.delta)
        r2 = check_correlation_inequality(case, ex, g2, cfg.model, delta=cfg.diagrams.delta)
        growth = r2.max_ratio / r1.max_ratio
        ok = growth <= 2.0 and np.isfinite(r2.max_ratio)
        rows.append((case, " ".join(repr(x) for x in ex), r1.max_ratio, r2.max_ratio, growth, r2.tail_fraction, ok))
        plot_rows.append((case, r1.max_ratio, r2.max_ratio))
        if not ok:
            failures.append(f"case {case}: ratio grew {growth:.3g}x")
    write_csv(run.path("inequalities.csv"), ["case", "exponents", f"ratio_{g1}", f"ratio_{g2}", "growth", "tail_fraction", "passed"], rows)
    plotting.plot_inequality_ratios(run.path("inequalities.png"), plot_rows)
    run.summary = {"failures": failures}
    run.finish()
    return _report(failures)


def cmd_observables(cfg: RunConfig, args) -> int:
    run = _Run("observables", cfg)
    cols, _, _, _ = _trajectory(cfg.model, cfg, energy=False)
    names = ("tr_phi2", "tr_phi4_ren", "w_h0sq", "v_h0")
    rows, failures, means, errs = [], [], [], []
    for name in names:
        ts = TimeSeries(name, cols["t"], cols[name], cfg.run.burn_in, cfg.run.n_batches)
        mean, se = time_average(ts)
        st = stationarity_test(ts)
        rows.append((name, mean, se, st.statistic, st.pvalue, st.passed))
        means.append(mean)
        errs.append(se)
        if not st.passed:
            failures.append(f"{name}: halves differ (KS p = {st.pvalue:.3g})")
    write_csv(run.path("observables.csv"), ["observable", "mean", "stderr", "ks_statistic", "ks_pvalue", "stationary"], rows)
    write_columns(run.path("series.csv"), {k: cols[k] for k in ("t",) + names})
    plotting.plot_averages(run.path("observables.png"), names, means, errs)
    run.summary = {"failures": failures}
    run.finish()
    return _report(failures)


def cmd_reconstruct(cfg: RunConfig, args) -> int:
    run = _Run("reconstruct", cfg)
    theta = cfg.model.theta
    if args.snapshot:
        t, fields = read_snapshot(args.snapshot)
        if args.field not in fields:
            raise ConfigError("field", f"snapshot has no field {args.field!r}; available: {sorted(fields)}")
        c = fields[args.field]
        c = 0.5 * (c + c.conj().T)  # undo complex64 rounding asymmetry
    else:
        c = sample_stationary(cfg.model, NoiseSource(cfg.model.seed, cfg.model.cutoff)).z
    ext = args.extent * np.sqrt(theta)
    ax = np.linspace(-ext, ext, args.grid)
    x1, x2 = np.meshgrid(ax, ax, indexing="xy")
    vals, resid = reconstruct_field(c, x1, x2, theta)
    write_columns(run.path("field.csv"), {"x1": x1.ravel(), "x2": x2.ravel(), "value": vals.ravel()})
    plotting.plot_field(run.path("field.png"), x1, x2, vals)
    failures = [] if resid <= 1e-10 else [f"imaginary residual {resid:.3g} > 1e-10"]
    run.summary = {"imag_residual": resid, "failures": failures}
    run.finish()
    return _report(failures)


def _report(failures: list[str]) -> int:
    for f in failures:
        print(f"check failed: {f}", file=sys.stderr)
    return EXIT_CHECK if failures else EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "free-field": cmd_free_field,
    "diagrams": cmd_diagrams,
    "inequalities": cmd_inequalities,
    "observables": cmd_observables,
    "reconstruct": cmd_reconstruct,
}


def build_parser() -> argparse.ArgumentParser:
    def shared(default):
        sp = argparse.ArgumentParser(add_help=False)
        sp.add_argument("--config", default=default, help="key = value config file")
        sp.add_argument("--set", action="append", default=default, metavar="SECTION.KEY=VALUE", help="override a config value")
        sp.add_argument("--out", default=default, help="output directory (overrides output.directory)")
        return sp

    # options may come before or after the subcommand; the subcommand copy must not reset them
    common = shared(argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="moyalsq", description="Stochastic quantization laboratory at finite matrix cutoff.", parents=[shared(None)])
    p.add_argument("--emit-config", action="store_true", help="print the effective configuration and exit")
    sub = p.add_subparsers(dest="command")
    sub.add_parser("simulate", parents=[common], help="remainder dynamics; series, two-point table, figures")
    ff = sub.add_parser("free-field", parents=[common], help="sampling checks of z and its Wick powers")
    ff.add_argument("--samples", type=int, help="number of independent draws (default run.samples)")
    sub.add_parser("diagrams", parents=[common], help="contraction classes, reduction traces, exact sums")
    iq = sub.add_parser("inequalities", parents=[common], help="boundedness of the summation inequalities")
    iq.add_argument("--grids", type=int, nargs=2, default=(32, 64), metavar=("SMALL", "LARGE"))
    sub.add_parser("observables", parents=[common], help="time averages and stationarity tests")
    rc = sub.add_parser("reconstruct", parents=[common], help="position-space field on a grid")
    rc.add_argument("--snapshot", help="snapshot file written by simulate (default: a fresh stationary z)")
    rc.add_argument("--field", default="phi", help="field name inside the snapshot")
    rc.add_argument("--grid", type=int, default=32, help="points per axis")
    rc.add_argument("--extent", type=float, default=4.0, help="half-width in units of sqrt(theta)")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = list(args.set or [])
        if args.out:
            overrides.append(f"output.directory={args.out}")
        cfg = parse_config(args.config, overrides)
        if args.emit_config or args.command is None:
            sys.stdout.write(cfg.emit())
            return EXIT_OK
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientData as exc:
        print(f"config error: run too short: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
