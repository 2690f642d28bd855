"""Config-driven command line front end.

Each subcommand runs one named experiment, writing ``<name>.csv`` (data
with a metadata header), ``<name>.meta`` (fully resolved config + seed +
version), and optionally ``<name>.svg`` when ``--plot`` is given.
Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .device import coherence_budget, qubit_frequency
from .io import emit_plot, write_csv, write_meta
from .spectroscopy import ac_stark_shift, two_qubit_map, two_tone_map, vacuum_rabi_map

_PLOT_KIND = {
    "spectrum": "heatmap",
    "two-tone": "heatmap",
    "two-qubit-map": "heatmap",
    "ac-stark": "trace",
    "rabi": "trace",
    "t1": "trace",
    "ramsey": "trace",
    "echo": "trace",
    "cpmg": "trace",
    "readout": "iq",
    "rb": "rb",
}


@click.group()
@click.version_option(__version__)
def main():
    """Charge-qubit + resonator simulator."""


def _common(fn):
    fn = click.option("--config", "config_path", required=True, type=click.Path(), help="YAML config file")(fn)
    fn = click.option("--plot", is_flag=True, help="also write an SVG plot")(fn)
    fn = click.option("--workers", type=int, default=None, help="worker count (CQEDSIM_WORKERS fallback)")(fn)
    fn = click.option("--seed", type=int, default=None, help="override the config seed")(fn)
    fn = click.option("--out", "out_dir", type=click.Path(), default=None, help="output directory")(fn)
    return fn


def _run(name: str, config_path, plot, workers, seed, out_dir, runner):
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    if seed is not None:
        cfg.seed = int(seed)
    if out_dir is not None:
        cfg.out_dir = str(out_dir)
    if workers is None:
        workers = int(os.environ.get("CQEDSIM_WORKERS", "1"))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        columns, extra_meta = runner(cfg, workers)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    except Exception as exc:  # integration/runtime failures
        click.echo(f"runtime error: {exc}", err=True)
        sys.exit(2)
    meta = {"experiment": name, "seed": cfg.seed, "version": __version__, **extra_meta}
    csv_path = out / f"{name}.csv"
    write_csv(csv_path, columns, metadata=meta)
    resolved = cfg.resolved()
    resolved["seed"] = cfg.seed
    resolved["out_dir"] = str(cfg.out_dir)
    write_meta(out / f"{name}.meta", {"config": resolved, "experiment": name, "version": __version__})
    if plot:
        try:
            emit_plot(csv_path, _PLOT_KIND.get(name, "trace"))
        except Exception as exc:
            click.echo(f"runtime error: plot failed: {exc}", err=True)
            sys.exit(2)
    click.echo(f"wrote {csv_path}")


def _grid(center: float, span: float, n: int) -> np.ndarray:
    return np.linspace(center - span / 2, center + span / 2, int(n))


def _spectrum_runner(cfg: ExperimentConfig, workers):
    res = cfg.resonator
    q = cfg.device.qubits[0]
    f_p = _grid(res.f_r, cfg.opt("f_p_span_mhz", 12.0) * 1e6, cfg.opt("f_p_points", 201))
    dv = _grid(0.0, 2 * cfg.opt("dv_span_mv", 6.0) * 1e-3, cfg.opt("dv_points", 101))
    spec = vacuum_rabi_map(res, q, f_p, dv)
    fg, vg = np.meshgrid(spec.axis1, spec.axis2)
    return {
        "dv_v": vg.ravel(),
        "f_p_hz": fg.ravel(),
        "re": spec.values.real.ravel(),
        "im": spec.values.imag.ravel(),
        "mag2": spec.magnitude_squared.ravel(),
    }, {}


def _two_tone_runner(cfg, workers):
    res = cfg.resonator
    q = cfg.device.qubits[0]
    f_ss = q.tuning.f_ss
    f_d = _grid(f_ss, cfg.opt("f_d_span_mhz", 40.0) * 1e6, cfg.opt("f_d_points", 201))
    dv = _grid(0.0, 2 * cfg.opt("dv_span_mv", 10.0) * 1e-3, cfg.opt("dv_points", 101))
    omega = 2 * np.pi * cfg.opt("drive_over_2pi_khz", 50.0) * 1e3
    m = two_tone_map(res, q, omega, f_d, dv, noise=cfg.noise)
    fg, vg = np.meshgrid(m.f_d, m.dv)
    return {"dv_v": vg.ravel(), "f_d_hz": fg.ravel(), "phase": m.phase.ravel()}, {}


def _ac_stark_runner(cfg, workers):
    q = cfg.device.qubits[0]
    budget = coherence_budget(cfg.resonator, q, qubit_frequency(q.tuning, 0.0))
    nbar = np.linspace(0.0, cfg.opt("nbar_max", 30.0), int(cfg.opt("points", 61)))
    return {"nbar": nbar, "shift_hz": ac_stark_shift(budget.chi, nbar)}, {
        "chi_rad_per_s": budget.chi
    }


def _coherence_runner(kind):
    def runner(cfg, workers):
        from .protocols import run_coherence

        t_max = cfg.opt("delay_max_us", 150.0) * 1e-6
        n = int(cfg.opt("points", 41))
        delays = np.linspace(cfg.opt("delay_min_us", 0.1) * 1e-6, t_max, n)
        trace = run_coherence(
            kind,
            cfg.device,
            delays,
            noise=cfg.noise,
            n_pi=int(cfg.opt("n_pi", 1)),
            shots=cfg.shots,
            dv_bias=cfg.opt("dv_bias_mv", 0.0) * 1e-3,
            drive_amplitude=2 * np.pi * cfg.opt("drive_over_2pi_mhz", 0.05) * 1e6,
            detuning=cfg.opt("detuning_khz", 0.0) * 1e3,
            n_realizations=int(cfg.opt("n_realizations", 200)),
            seed=cfg.seed,
        )
        cols = {"x": trace.x, "p_e": trace.p_e}
        if trace.std is not None:
            cols["std"] = trace.std
        return cols, {"kind": kind, "shots_per_point": trace.shots_per_point}

    return runner


def _readout_runner(cfg, workers):
    from .protocols import readout_fidelity, simulate_readout

    shots = cfg.shots or 5000
    integration = cfg.opt("integration_us", 5.0) * 1e-6
    snr = cfg.opt("snr_per_sqrt_s", 14300.0)
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 0xD0)))
    recs = {
        p: simulate_readout(cfg.device, p, shots, integration, snr, rng)
        for p in ("state0", "state1")
    }
    fid, thr = readout_fidelity(recs["state0"], recs["state1"])
    i = np.concatenate([recs["state0"].shots[:, 0], recs["state1"].shots[:, 0]])
    qv = np.concatenate([recs["state0"].shots[:, 1], recs["state1"].shots[:, 1]])
    prep = np.array(["state0"] * shots + ["state1"] * shots)
    return {"i": i, "q": qv, "prep": prep}, {
        "fidelity": fid,
        "threshold": thr,
        "integration_s": integration,
    }


def _rb_runner(cfg, workers):
    from .protocols import run_rb

    depths = cfg.opt("depths", [1, 4, 16, 64, 128, 256, 512])
    if isinstance(depths, str):
        depths = [int(x) for x in depths.split(",")]
    model = cfg.opt("error_model", "lindblad")
    q = cfg.device.qubits[0]
    budget = coherence_budget(cfg.resonator, q, qubit_frequency(q.tuning, 0.0))
    result = run_rb(
        depths,
        n_sequences=int(cfg.opt("sequences", 30)),
        shots=cfg.shots,
        error_model=model,
        depolarizing_p=cfg.opt("depolarizing_p", 0.0),
        t1=budget.t1,
        t_phi=q.t_phi,
        pulse_sigma=cfg.opt("pulse_sigma_ns", 8.0) * 1e-9,
        pulse_truncation=cfg.opt("pulse_truncation", 2.5),
        pulse_gap=cfg.opt("pulse_gap_ns", 20.0) * 1e-9,
        seed=cfg.seed,
    )
    return {
        "depth": result.depths.astype(float),
        "mean_fidelity": result.mean_fidelity,
        "std": result.sequence_fidelities.std(axis=1),
    }, {
        "fit_a": result.fit_a,
        "fit_p": result.fit_p,
        "fit_b": result.fit_b,
        "f_gate": result.f_gate,
        "degenerate_fit": result.degenerate_fit,
    }


def _two_qubit_runner(cfg, workers):
    if len(cfg.device.qubits) != 2:
        raise ConfigError("key 'device.qubits' must list 2 qubits for two-qubit-map")
    dv_r = _grid(
        cfg.opt("dv_r_center_mv", 6.0) * 1e-3,
        cfg.opt("dv_r_span_mv", 8.0) * 1e-3,
        cfg.opt("dv_r_points", 81),
    )
    dv_rg = _grid(
        cfg.opt("dv_rg_center_mv", 250.0) * 1e-3,
        cfg.opt("dv_rg_span_mv", 300.0) * 1e-3,
        cfg.opt("dv_rg_points", 81),
    )
    spec = two_qubit_map(cfg.resonator, cfg.device.qubits, dv_r, dv_rg)
    gg, rr = np.meshgrid(spec.axis1, spec.axis2)
    return {
        "dv_rg_v": gg.ravel(),
        "dv_r_v": rr.ravel(),
        "mag2": spec.magnitude_squared.ravel(),
    }, {}


def _budget_runner(cfg, workers):
    q = cfg.device.qubits[0]
    dv = cfg.opt("dv_bias_mv", 0.0) * 1e-3
    f_q = qubit_frequency(q.tuning, dv) if q.tuning.kind == "quadratic" else q.tuning.coeffs[0]
    b = coherence_budget(cfg.resonator, q, f_q)
    rows = {
        "gamma_r_inverse_us": 1e6 / b.gamma_r,
        "chi_over_2pi_mhz": b.chi / (2 * np.pi * 1e6),
        "t1_us": b.t1 * 1e6,
        "t2_us": b.t2 * 1e6,
        "t_rabi_predicted_us": b.t_rabi_predicted * 1e6,
        "delta_over_2pi_mhz": b.delta / (2 * np.pi * 1e6),
    }
    for k, v in rows.items():
        click.echo(f"{k} = {v:.6g}")
    return {"quantity": np.array(list(rows)), "value": np.array(list(rows.values()))}, {}


_RUNNERS = {
    "spectrum": _spectrum_runner,
    "two-tone": _two_tone_runner,
    "ac-stark": _ac_stark_runner,
    "rabi": _coherence_runner("rabi"),
    "t1": _coherence_runner("t1"),
    "ramsey": _coherence_runner("ramsey"),
    "echo": _coherence_runner("echo"),
    "cpmg": _coherence_runner("cpmg"),
    "readout": _readout_runner,
    "rb": _rb_runner,
    "two-qubit-map": _two_qubit_runner,
    "budget": _budget_runner,
}


def _make_command(name, runner):
    @main.command(name=name)
    @_common
    def cmd(config_path, plot, workers, seed, out_dir):
        _run(name, config_path, plot, workers, seed, out_dir, runner)

    cmd.__doc__ = f"Run the {name} experiment."
    return cmd


for _name, _runner in _RUNNERS.items():
    _make_command(_name, _runner)


if __name__ == "__main__":
    main()
