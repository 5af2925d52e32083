"""Command-line front end: parameter sweeps, series serialization, verification.

Subcommands
-----------
rscan   decoherence-factor series |r^{(1,0)}_{(0,1)}(t)|^2, one file per lambda
g2scan  degree-of-coherence series g2(t), one file per scenario
bound   cutoff weight, Gaussian rate and short-time window for one config
verify  run the oracle suites and report max deviations (exit 2 on failure)
params  eta/B from physical circuit inputs

Configuration precedence: built-in defaults < --preset file < --config file <
explicit flags.  Every output file echoes the fully resolved configuration as
``# cfg:key = value`` lines plus a ``config_hash`` over exactly those lines,
so downstream consumers can refuse mismatched inputs.  Output is bit-identical
across runs for a fixed configuration, whatever --jobs is.

Exit codes: 0 ok, 1 usage, 2 numerical-verification failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import checks
from .correlations import FieldState, SectorTable, correlation_series
from .decoherence import decay_bound, r_values, short_time_cutoff
from .spectrum import ChainConfig, PhysicalParams, build_sector, eta_from_physical


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- configuration handling ---------------------------------------------------

_DEFAULTS = {
    "scenario": "custom",
    "n": "8000",
    "lambda": "1.0",
    "eta2": "0.1",
    "b": "1.0",
    "tmax": "50.0",
    "steps": "2000",
    "kc": repr(2.0 * np.pi / 10.0),
    "domega": "150.0",
    "state": "half-half",
    "alpha": "1.0",
    "cutoff": "12",
    "frame": "as-printed",
    "scenarios": "",
}


def parse_config_text(text: str) -> dict:
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"bad config line (expected key = value): {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_preset(name: str) -> dict:
    path = resources.files("critbunch") / "presets" / f"{name}.cfg"
    if not path.is_file():
        raise UsageError(f"unknown preset {name!r} (available: fig2, fig3, fig4)")
    return parse_config_text(path.read_text())


def resolve_config(args: argparse.Namespace, flag_map: dict) -> dict:
    cfg = dict(_DEFAULTS)
    if getattr(args, "preset", None):
        cfg.update(load_preset(args.preset))
        cfg["preset"] = args.preset
    if getattr(args, "config", None):
        try:
            cfg.update(parse_config_text(Path(args.config).read_text()))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    for key, attr in flag_map.items():
        val = getattr(args, attr, None)
        if val is not None:
            if isinstance(val, list):
                cfg[key] = ", ".join(str(v) for v in val)
            else:
                cfg[key] = str(val)
    return cfg


def _floats(csv_value: str) -> list[float]:
    return [float(x) for x in csv_value.split(",") if x.strip()]


def _time_grid(tmax: float, steps: int) -> np.ndarray:
    if tmax < 0 or steps < 1:
        raise UsageError("tmax must be >= 0 and steps >= 1")
    if tmax == 0.0:
        return np.zeros(1)
    return np.linspace(0.0, tmax, steps + 1)


def make_state(kind: str, alpha: float, cutoff: int) -> FieldState:
    if kind == "half-half":
        return FieldState.half_half()
    if kind == "vacuum":
        return FieldState.vacuum()
    if kind == "coherent":
        return FieldState.coherent(alpha, cutoff=cutoff)
    if kind.startswith("amps:"):
        try:
            c_part, d_part = kind[5:].split(";")
            return FieldState.product(
                np.array([complex(x) for x in c_part.split(",")]),
                np.array([complex(x) for x in d_part.split(",")]),
            )
        except ValueError as exc:
            raise UsageError(f"bad amplitude state spec {kind!r}: {exc}") from None
    raise UsageError(f"unknown state {kind!r}")


def chain_config(n: int, lam: float, eta2: float, b: float, domega: float) -> ChainConfig:
    # keep the 3:1 mode ratio: omega1 - omega2 = 2*omega2 = domega
    return ChainConfig(
        n=n, lam_ref=lam, eta1=np.sqrt(3.0) * eta2, eta2=eta2, b=b,
        omega2=domega / 2.0, omega1=1.5 * domega,
    )


# --- serialization -------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def config_hash(cfg: dict) -> str:
    lines = [f"cfg:{k} = {cfg[k]}" for k in sorted(cfg)]
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def write_csv(path: Path, cfg: dict, meta: dict, columns: dict) -> None:
    lines = ["# critbunch series v1", f"# config_hash = {config_hash(cfg)}"]
    lines += [f"# cfg:{k} = {cfg[k]}" for k in sorted(cfg)]
    lines += [f"# meta:{k} = {meta[k]}" for k in sorted(meta)]
    lines.append(",".join(columns))
    for row in zip(*columns.values()):
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, cfg: dict, meta: dict, columns: dict) -> None:
    payload = {
        "format": "critbunch series v1",
        "config_hash": config_hash(cfg),
        "config": dict(sorted(cfg.items())),
        "meta": dict(sorted(meta.items())),
        "columns": {
            k: [None if (isinstance(x, float) and math.isnan(x)) else x for x in np.asarray(v).tolist()]
            for k, v in columns.items()
        },
    }
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _emit(out_prefix: str, tag: str, fmt: str, cfg: dict, meta: dict, columns: dict) -> list[str]:
    base = Path(f"{out_prefix}_{tag}" if tag else out_prefix)
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        p = base.parent / (base.name + ".csv")
        write_csv(p, cfg, meta, columns)
        written.append(str(p))
    if fmt in ("json", "both"):
        p = base.parent / (base.name + ".json")
        write_json(p, cfg, meta, columns)
        written.append(str(p))
    return written


# --- sweep workers (top level: picklable for process pools) --------------------


def _rscan_point(payload: dict) -> dict:
    cfg = chain_config(payload["n"], payload["lam"], payload["eta2"], payload["b"], payload["domega"])
    times = np.asarray(payload["times"])
    s10, s01 = build_sector(cfg, 1, 0), build_sector(cfg, 0, 1)
    r = r_values(s10, s01, times)
    columns = {
        "t": times,
        "r2": np.abs(r) ** 2,
        "re_r": r.real,
        "im_r": r.imag,
    }
    meta = {"min_r2": _fmt(float(np.min(columns["r2"])))}
    if abs(payload["lam"] - 1.0) <= 1e-3:
        bp = decay_bound(cfg, payload["kc"])
        columns["bound"] = bp.envelope(times)
        meta.update(
            gamma=_fmt(bp.gamma), n_c=bp.n_c, e_kc=_fmt(bp.e_kc),
            t_star=_fmt(short_time_cutoff(cfg)),
        )
    return {"columns": columns, "meta": meta}


def _g2scan_point(payload: dict) -> dict:
    cfg = chain_config(payload["n"], payload["lam"], payload["eta2"], payload["b"], payload["domega"])
    times = np.asarray(payload["times"])
    state = make_state(payload["state"], payload["alpha"], payload["cutoff"])
    table = SectorTable.for_state(cfg, state)
    res = correlation_series(state, table, times, frame=payload["frame"])
    tail_start = times[0] + 0.75 * (times[-1] - times[0])
    tail = times >= tail_start
    tail_vals = res.g2[tail & ~res.flagged]
    meta = {
        "g2_zero": _fmt(float(res.g2[0])) if not res.flagged[0] else "nan",
        "tail_start": _fmt(float(tail_start)),
        "tail_mean": _fmt(float(np.mean(tail_vals))) if len(tail_vals) else "nan",
        "flagged": int(np.sum(res.flagged)),
    }
    columns = {"t": times, "g2": res.g2, "flagged": res.flagged.astype(int)}
    return {"columns": columns, "meta": meta}


def _run_points(worker, payloads: list[dict], jobs: int) -> list[dict]:
    if jobs <= 1 or len(payloads) <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, payloads))


# --- subcommands ----------------------------------------------------------------


def cmd_rscan(args) -> int:
    cfg = resolve_config(args, {
        "n": "n", "lambda": "lam", "eta2": "eta2", "b": "b", "tmax": "tmax",
        "steps": "steps", "kc": "kc", "domega": "domega", "scenario": "scenario",
    })
    lams = _floats(cfg["lambda"])
    if not lams:
        raise UsageError("need at least one --lambda")
    times = _time_grid(float(cfg["tmax"]), int(cfg["steps"]))
    payloads = [
        dict(n=int(cfg["n"]), lam=lam, eta2=float(cfg["eta2"]), b=float(cfg["b"]),
             domega=float(cfg["domega"]), kc=float(cfg["kc"]), times=times)
        for lam in lams
    ]
    results = _run_points(_rscan_point, payloads, args.jobs)
    for lam, res in zip(lams, results):
        file_cfg = {k: v for k, v in cfg.items() if k not in ("lambda", "scenarios", "state", "alpha", "cutoff", "frame")}
        file_cfg["lambda"] = _fmt(lam)
        file_cfg["command"] = "rscan"
        for p in _emit(args.out, f"lam{lam:g}", args.format, file_cfg, res["meta"], res["columns"]):
            print(p)
    return 0


_STATE_TAGS = {"half-half": "hh", "coherent": "coh", "vacuum": "vac"}


def _g2_scenarios(cfg: dict) -> list[tuple[str, int, float]]:
    if cfg.get("scenarios"):
        out = []
        for item in cfg["scenarios"].split(","):
            parts = item.strip().split(":")
            if len(parts) != 3:
                raise UsageError(f"bad scenario {item!r} (want state:n:lambda)")
            out.append((parts[0], int(parts[1]), float(parts[2])))
        return out
    return [
        (cfg["state"], int(cfg["n"]), lam)
        for lam in _floats(cfg["lambda"])
    ]


def cmd_g2scan(args) -> int:
    cfg = resolve_config(args, {
        "n": "n", "lambda": "lam", "eta2": "eta2", "b": "b", "tmax": "tmax",
        "steps": "steps", "domega": "domega", "state": "state", "alpha": "alpha",
        "cutoff": "cutoff", "frame": "frame", "scenario": "scenario",
        "scenarios": "scenarios",
    })
    scenarios = _g2_scenarios(cfg)
    times = _time_grid(float(cfg["tmax"]), int(cfg["steps"]))
    payloads = [
        dict(state=state, n=n, lam=lam, eta2=float(cfg["eta2"]), b=float(cfg["b"]),
             domega=float(cfg["domega"]), alpha=float(cfg["alpha"]),
             cutoff=int(cfg["cutoff"]), frame=cfg["frame"], times=times)
        for (state, n, lam) in scenarios
    ]
    results = _run_points(_g2scan_point, payloads, args.jobs)
    for (state, n, lam), res in zip(scenarios, results):
        tag = f"{_STATE_TAGS.get(state, 'amps')}_n{n}_lam{lam:g}"
        file_cfg = {k: v for k, v in cfg.items() if k not in ("lambda", "scenarios", "kc")}
        file_cfg.update(state=state, n=str(n), command="g2scan")
        file_cfg["lambda"] = _fmt(lam)
        for p in _emit(args.out, tag, args.format, file_cfg, res["meta"], res["columns"]):
            print(p)
    return 0


def cmd_bound(args) -> int:
    cfg = resolve_config(args, {
        "n": "n", "lambda": "lam", "eta2": "eta2", "b": "b", "kc": "kc",
    })
    lam = _floats(cfg["lambda"])[0]
    chain = chain_config(int(cfg["n"]), lam, float(cfg["eta2"]), float(cfg["b"]), float(cfg["domega"]))
    bp = decay_bound(chain, float(cfg["kc"]))
    t_star = short_time_cutoff(chain)
    rows = {
        "n": chain.n, "lambda": lam, "k_c": bp.k_c, "n_c": bp.n_c,
        "e_kc": bp.e_kc, "gamma": bp.gamma, "sqrt_gamma": np.sqrt(bp.gamma),
        "t_star": t_star,
        "lam_10": chain.dressed(1, 0), "lam_01": chain.dressed(0, 1),
    }
    for k, v in rows.items():
        print(f"{k:12s} {v}")
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({k: float(v) for k, v in rows.items()}, sort_keys=True, indent=1) + "\n")
        print(str(path))
    return 0


def cmd_verify(args) -> int:
    rows = checks.run_all(samples=args.samples, ed_n=args.ed_n, mutate=args.mutate)
    width = max(len(r.name) for r in rows)
    for r in rows:
        if r.informational:
            status = "REPORT"
        else:
            status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:{width}s}  {status:6s}  max_dev={r.max_dev:.3e}  tol={r.tol:.1e}  {r.note}")
    bad = checks.failed(rows)
    if bad:
        print(f"{len(bad)} check(s) failed", file=sys.stderr)
        return 2
    return 0


def cmd_params(args) -> int:
    overrides = {}
    for field_name, attr in (
        ("e_j_hz", "ej"), ("c_m", "cm"), ("c_sigma", "csigma"), ("s_loop", "s_loop"),
        ("r_dist", "r_dist"), ("l_len", "length"), ("l_ind", "l_ind"),
    ):
        val = getattr(args, attr, None)
        if val is not None:
            overrides[field_name] = val
    if args.omega2_ghz is not None:
        overrides["omega2"] = 2.0 * np.pi * args.omega2_ghz * 1e9
    rep = eta_from_physical(PhysicalParams(**overrides))
    rows = {
        "eta2": rep.eta2,
        "eta1": rep.eta1,
        "eta1/eta2": rep.eta_ratio,
        "eta2_quoted": rep.eta2_quoted,
        "B_formula_J": rep.b_joule,
        "B_formula_GHz(/h)": rep.b_hz / 1e9,
        "B_formula_Grad/s(/hbar)": rep.b_rad_s / 1e9,
        "B_quoted_GHz": rep.b_quoted_ghz,
        "omega2_rad/s": rep.omega2_rad_s,
        "omega2_quoted_GHz": rep.omega2_quoted_ghz,
        "E_J/B(/h)": rep.e_j_over_b,
    }
    if args.format == "json":
        print(json.dumps({k: float(v) for k, v in rows.items()}, sort_keys=True, indent=1))
    else:
        for k, v in rows.items():
            print(f"{k:24s} {v}")
        print("note: B formula value vs quoted value differ by a convention-dependent")
        print("factor ~2; both are reported and neither is adjusted.")
    return 0


# --- argument wiring -------------------------------------------------------------


def _add_common(p: _Parser, *, state_flags: bool) -> None:
    p.add_argument("--preset", choices=["fig2", "fig3", "fig4"])
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--n", type=int, dest="n")
    p.add_argument("--lambda", type=float, action="append", dest="lam",
                   help="reference coupling; repeatable")
    p.add_argument("--eta2", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--domega", type=float, help="(omega1-omega2)/B")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="out/series")
    p.add_argument("--format", choices=["csv", "json", "both"], default="csv")
    p.add_argument("--scenario", dest="scenario")
    if state_flags:
        p.add_argument("--state", help="vacuum | half-half | coherent | amps:c0,c1;d0,d1")
        p.add_argument("--alpha", type=float, help="coherent-state amplitude")
        p.add_argument("--cutoff", type=int, help="coherent-state truncation")
        p.add_argument("--frame", choices=["as-printed", "lab"])
        p.add_argument("--scenarios", help="state:n:lambda list, comma separated")


def build_parser() -> _Parser:
    parser = _Parser(prog="critbunch", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rscan", help="decoherence-factor sweep over lambda")
    _add_common(p, state_flags=False)
    p.add_argument("--kc", type=float, help="cutoff momentum for the bound column")
    p.set_defaults(fn=cmd_rscan)

    p = sub.add_parser("g2scan", help="degree-of-coherence sweep")
    _add_common(p, state_flags=True)
    p.set_defaults(fn=cmd_g2scan)

    p = sub.add_parser("bound", help="Gaussian-rate parameters for one config")
    p.add_argument("--preset", choices=["fig2", "fig3", "fig4"])
    p.add_argument("--config")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", type=float, action="append", dest="lam")
    p.add_argument("--eta2", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--kc", type=float)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("verify", help="run oracle suites; exit 2 on failure")
    p.add_argument("--samples", type=int, default=10000, help="per-k oracle sample count")
    p.add_argument("--ed-n", type=int, default=10, dest="ed_n")
    p.add_argument("--mutate", action="store_true",
                   help="flip the sign of one overlap coefficient (self-test of detection)")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("params", help="model parameters from circuit values")
    p.add_argument("--ej", type=float, help="Josephson energy /h [Hz]")
    p.add_argument("--cm", type=float, help="coupling capacitance [F]")
    p.add_argument("--csigma", type=float, help="island capacitance [F]")
    p.add_argument("--s-loop", type=float, dest="s_loop", help="SQUID loop area [m^2]")
    p.add_argument("--r-dist", type=float, dest="r_dist", help="loop distance [m]")
    p.add_argument("--length", type=float, help="resonator length [m]")
    p.add_argument("--l-ind", type=float, dest="l_ind", help="inductance per length [H/m]")
    p.add_argument("--omega2-ghz", type=float, dest="omega2_ghz",
                   help="mode-2 frequency [GHz], converted to angular")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_params)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
