"""Command line interface.

Every subcommand reads one shared config schema (``--config``), applies
flag overrides, computes, and persists results through ``write_results``.
Standard output carries exactly one summary line; progress and timing go
to standard error; all data lands in files.

Exit codes: 0 success, 2 configuration problem, 1 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .basis import enumerate_sector
from .bipartition_markov import markov_report
from .config import (
    RunConfig,
    parse_config,
    resolve_heavy,
    serialize_config,
    with_overrides,
)
from .errors import CapacityError, ConfigError, NumericError, ParameterError
from .evolution import Trajectory, hybrid_schedule
from .experiments import (
    DEFAULT_JZ,
    MBL_W,
    SAT_PERIODS,
    ProtocolSpec,
    classify_dynamics,
    delta_s_sweep,
    derive_rng,
    eigenstate_sweep,
    mean_trajectory,
    pooled_disorder_ratios,
    reservoir_curve,
)
from .io import BasisDump, RunRecord, write_results
from .spectral_stats import ratio_histogram, reference_curves

_MIDDLE_THIRD_NOTE = "start floor(dim/3), length floor(dim/3)"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entdyn",
        description="Entanglement dynamics of disordered spin-1/2 chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "basis": "enumerate the half-filling sector and dump it as CSV",
        "evolve": "run-averaged entropy trajectory of a Hamiltonian or Floquet protocol",
        "rqc": "run-averaged entropy trajectory of a random circuit",
        "sweep": "initial vs saturation entropy across preparation times, classified",
        "baee": "HCEE and BAEE of prepared states across the T list",
        "reservoir": "BAEE - HCEE excess curve along the preparation evolution",
        "markov": "exact and Monte Carlo checks of the SWAP bipartition chain",
        "levelstats": "disorder-pooled level-spacing ratio histogram",
        "eigensweep": "initial vs saturation entropy for eigenstate initial conditions",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="config file path")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", type=str, default=None, help="output directory override")
        p.add_argument("--heavy", action="store_true", help="full-scale defaults (L=16, 72 runs)")
        p.add_argument("--runs", type=int, default=None, help="run count override")
        p.add_argument("--L", type=int, default=None, help="chain length override")
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}")
        cfg = parse_config(text)
    else:
        cfg = RunConfig()
    cfg = with_overrides(
        cfg, seed=args.seed, out=args.out, runs=args.runs, L=args.L
    )
    if args.heavy:
        cfg = with_overrides(cfg, heavy=True)
    return resolve_heavy(cfg)


def _protocol_from(cfg: RunConfig, default_kind: str | None = None) -> ProtocolSpec:
    kind = cfg.protocol_kind if cfg.protocol_kind is not None else default_kind
    if kind is None:
        raise ConfigError(
            "this command needs protocol.kind in the config", key="protocol.kind"
        )
    return ProtocolSpec(
        kind=kind,
        W=cfg.protocol_W,
        jz=cfg.protocol_jz,
        alpha=cfg.protocol_alpha,
        beta=cfg.protocol_beta,
        T0=cfg.protocol_T0,
        T1=cfg.protocol_T1,
    ).normalized()


def _schedule_for(cfg: RunConfig, kind: str):
    t_max = cfg.schedule_t_max
    if "schedule.t_max" not in cfg.seen:
        if kind == "floquet_mbl":
            t_max = float(SAT_PERIODS)
        elif kind == "rqc":
            t_max = float(cfg.depth)
    return hybrid_schedule(
        cfg.schedule_linear_max,
        cfg.schedule_n_linear,
        t_max,
        cfg.schedule_n_log,
        integer=kind in ("floquet_mbl", "rqc"),
    )


def _progress(msg: str) -> None:
    print(f"[entdyn] {msg}", file=sys.stderr, flush=True)


def _finish(command: str, cfg: RunConfig, payload, summary: dict, t0: float, line: str) -> int:
    record = RunRecord(
        command=command,
        config_text=serialize_config(cfg),
        code_version=__version__,
        master_seed=cfg.seed,
        payload=payload,
        summary=summary,
        wall_clock_seconds=time.monotonic() - t0,
    )
    paths = write_results(record, cfg.out)
    _progress(f"{command}: wrote {len(paths)} files in {record.wall_clock_seconds:.1f}s")
    print(f"{line} files={','.join(str(p) for p in paths)}")
    return 0


def _cmd_basis(cfg: RunConfig, t0: float) -> int:
    basis = enumerate_sector(cfg.L, 0)
    dump = BasisDump(
        L=basis.L,
        sz_total=basis.sz_total,
        words=tuple(int(w) for w in basis.states),
        bits=tuple(basis.bitstring(int(w)) for w in basis.states),
    )
    summary = {"L": basis.L, "dim": basis.dim, "n_up": basis.n_up}
    return _finish("basis", cfg, dump, summary, t0, f"basis: L={basis.L} dim={basis.dim}")


def _cmd_evolve(cfg: RunConfig, t0: float) -> int:
    spec = _protocol_from(cfg)
    if spec.kind == "rqc":
        raise ConfigError("evolve handles Hamiltonian/Floquet kinds; use the rqc command")
    _progress(f"evolve: kind={spec.kind} L={cfg.L} runs={cfg.runs}")
    traj = mean_trajectory(
        cfg.L,
        spec,
        runs=cfg.runs,
        master_seed=cfg.seed,
        schedule=_schedule_for(cfg, spec.kind),
        prep_T=cfg.prep_T,
        prep_W=cfg.prep_W,
        prep_jz=cfg.prep_jz,
        prep_local=cfg.prep_local,
        record_baee=cfg.record_baee,
    )
    summary = {**traj.meta, "final_hcee": float(traj.hcee[-1])}
    return _finish(
        "evolve", cfg, traj, summary, t0,
        f"evolve: kind={spec.kind} L={cfg.L} runs={cfg.runs} final_hcee={traj.hcee[-1]:.6f}",
    )


def _cmd_rqc(cfg: RunConfig, t0: float) -> int:
    spec = _protocol_from(cfg, default_kind=None)
    if spec.kind != "rqc":
        raise ConfigError("the rqc command needs protocol.kind = rqc")
    _progress(f"rqc: alpha={spec.alpha} beta={spec.beta} L={cfg.L} runs={cfg.runs}")
    traj = mean_trajectory(
        cfg.L,
        spec,
        runs=cfg.runs,
        master_seed=cfg.seed,
        schedule=_schedule_for(cfg, "rqc"),
        prep_T=cfg.prep_T,
        prep_W=cfg.prep_W,
        prep_jz=cfg.prep_jz,
        prep_local=cfg.prep_local,
        record_baee=cfg.record_baee,
        circuit_samples=cfg.circuit_samples,
        depth=cfg.depth,
    )
    summary = {**traj.meta, "final_hcee": float(traj.hcee[-1])}
    return _finish(
        "rqc", cfg, traj, summary, t0,
        f"rqc: L={cfg.L} runs={cfg.runs} final_hcee={traj.hcee[-1]:.6f}",
    )


def _cmd_sweep(cfg: RunConfig, t0: float) -> int:
    spec = _protocol_from(cfg)
    _progress(f"sweep: kind={spec.kind} L={cfg.L} runs={cfg.runs} T-points={len(cfg.T_list)}")
    table = delta_s_sweep(
        cfg.L,
        spec,
        T_list=cfg.T_list,
        runs=cfg.runs,
        master_seed=cfg.seed,
        circuit_samples=cfg.circuit_samples,
        depth=cfg.depth,
        prep_W=cfg.prep_W,
        prep_jz=cfg.prep_jz,
        prep_local=cfg.prep_local,
    )
    label = classify_dynamics(
        table,
        eps_inert=cfg.classify_eps_inert,
        eps_peak=cfg.classify_eps_peak,
        eps_fit=cfg.classify_eps_fit,
    )
    summary = {
        **table.meta,
        "classification": label.label,
        "diagnostics": label.diagnostics,
    }
    return _finish(
        "sweep", cfg, table, summary, t0,
        f"sweep: kind={spec.kind} L={cfg.L} runs={cfg.runs} class={label.label}",
    )


def _cmd_baee(cfg: RunConfig, t0: float) -> int:
    _progress(f"baee: L={cfg.L} runs={cfg.runs} T-points={len(cfg.T_list)}")
    curve = reservoir_curve(
        cfg.L,
        T_list=cfg.T_list,
        runs=cfg.runs,
        master_seed=cfg.seed,
        prep_W=cfg.prep_W,
        prep_jz=cfg.prep_jz,
    )
    traj = Trajectory(times=curve.T, hcee=curve.hcee, baee=curve.baee, meta=curve.meta)
    summary = {**curve.meta, "runs": curve.runs, "argmax_T": curve.argmax_T}
    return _finish(
        "baee", cfg, traj, summary, t0,
        f"baee: L={cfg.L} runs={cfg.runs} peak_T={curve.argmax_T:g}",
    )


def _cmd_reservoir(cfg: RunConfig, t0: float) -> int:
    _progress(f"reservoir: L={cfg.L} runs={cfg.runs} T-points={len(cfg.T_list)}")
    curve = reservoir_curve(
        cfg.L,
        T_list=cfg.T_list,
        runs=cfg.runs,
        master_seed=cfg.seed,
        prep_W=cfg.prep_W,
        prep_jz=cfg.prep_jz,
    )
    peak = float(curve.excess.max())
    summary = {
        **curve.meta,
        "runs": curve.runs,
        "argmax_T": curve.argmax_T,
        "peak_excess": peak,
        "hcee_at_argmax": float(curve.hcee[int(curve.excess.argmax())]),
    }
    return _finish(
        "reservoir", cfg, curve, summary, t0,
        f"reservoir: L={cfg.L} runs={cfg.runs} argmax_T={curve.argmax_T:g} peak_excess={peak:.4f}",
    )


def _cmd_markov(cfg: RunConfig, t0: float) -> int:
    _progress(f"markov: L={cfg.L} steps={cfg.markov_steps} burn_in={cfg.markov_burn_in}")
    report = markov_report(
        cfg.L, cfg.markov_steps, cfg.markov_burn_in, derive_rng(cfg.seed, 0, "markov")
    )
    summary = {"steps": cfg.markov_steps, "burn_in": cfg.markov_burn_in, "L": cfg.L}
    return _finish(
        "markov", cfg, report, summary, t0,
        f"markov: L={cfg.L} N={report['N']} tv={report['tv_distance']:.5f}",
    )


def _cmd_levelstats(cfg: RunConfig, t0: float) -> int:
    if cfg.protocol_W is not None:
        W = cfg.protocol_W
    elif cfg.protocol_kind is not None:
        W = _protocol_from(cfg).W
    else:
        W = MBL_W
    if cfg.protocol_jz is not None:
        jz = cfg.protocol_jz
    elif cfg.protocol_kind is not None:
        jz = _protocol_from(cfg).jz
    else:
        jz = DEFAULT_JZ
    _progress(f"levelstats: L={cfg.L} W={W} jz={jz} realizations={cfg.runs}")
    sample = pooled_disorder_ratios(
        cfg.L, W, jz=jz, realizations=cfg.runs, master_seed=cfg.seed
    )
    hist = ratio_histogram(sample, bins=cfg.levelstats_bins)
    refs = reference_curves()
    summary = {
        "L": cfg.L,
        "W": W,
        "jz": jz,
        "realizations": cfg.runs,
        "r_mean": sample.mean,
        "ratio_count": sample.count,
        "skipped_degenerate": sample.skipped,
        "middle_third": _MIDDLE_THIRD_NOTE,
        "poisson_mean": refs.poisson_mean,
        "goe_mean": refs.goe_mean,
    }
    return _finish(
        "levelstats", cfg, hist, summary, t0,
        f"levelstats: L={cfg.L} W={W:g} r_mean={sample.mean:.4f}",
    )


def _cmd_eigensweep(cfg: RunConfig, t0: float) -> int:
    spec = _protocol_from(cfg, default_kind="hamiltonian_mbl")
    _progress(f"eigensweep: kind={spec.kind} L={cfg.L} runs={cfg.runs}")
    table = eigenstate_sweep(
        cfg.L,
        spec,
        ranks=cfg.eigensweep_ranks,
        runs=cfg.runs,
        master_seed=cfg.seed,
        circuit_samples=cfg.circuit_samples,
        depth=cfg.depth,
        prep_W=cfg.prep_W,
        prep_jz=cfg.prep_jz,
    )
    summary = {**table.meta, "ranks": [int(r) for r in table.rank]}
    return _finish(
        "eigensweep", cfg, table, summary, t0,
        f"eigensweep: kind={spec.kind} L={cfg.L} runs={cfg.runs} ranks={table.rank.size}",
    )


_HANDLERS = {
    "basis": _cmd_basis,
    "evolve": _cmd_evolve,
    "rqc": _cmd_rqc,
    "sweep": _cmd_sweep,
    "baee": _cmd_baee,
    "reservoir": _cmd_reservoir,
    "markov": _cmd_markov,
    "levelstats": _cmd_levelstats,
    "eigensweep": _cmd_eigensweep,
}


def cli(argv=None) -> int:
    """Run one subcommand; returns an exit code instead of raising."""
    t0 = time.monotonic()
    try:
        args = _build_parser().parse_args(argv)
        cfg = _load_config(args)
        return _HANDLERS[args.command](cfg, t0)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, CapacityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return cli(argv)


if __name__ == "__main__":
    sys.exit(main())
