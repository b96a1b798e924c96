"""Batch front-end: ``qprep synth | simulate | verify | fork | sweep``.

Exit codes: 0 success, 2 bad configuration, 3 qubit budget exceeded,
4 verification tolerance failed, 5 image-sum truncation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import dist as dist_mod
from .angles import AngleError, build_angle_table, discrete_table, discrete_theta
from .circuit import build_discrete_circuit, build_upsampling_circuit, export_qasm, lower_to_basis
from .dist import DEFAULT_TOL, DiscreteSpec, TruncationError
from .forking import ForkingError, fork_depth_report, fork_transform
from .grid import new_grid, random_zeta
from .sim import BudgetError, marginal, oracle_xi, qubit_budget, simulate, tvd, verify

EXIT_CONFIG, EXIT_BUDGET, EXIT_TOLERANCE, EXIT_TRUNCATION = 2, 3, 4, 5


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    target: object
    n: int
    window: float | None
    zeta: float
    zeta_seed: int
    center: float | None
    tol: float
    fork: bool
    lower: bool
    qasm: str | None
    qasm_xconj: bool
    json_path: str | None
    csv_path: str | None
    angles_path: str | None
    max_tvd: float
    n_min: int | None
    n_max: int | None

    @property
    def discrete(self) -> bool:
        return isinstance(self.target, DiscreteSpec)

    def grid(self, n=None):
        n = self.n if n is None else n
        if self.discrete:
            return None
        spec = self.target
        w = self.window if self.window is not None else dist_mod.default_window(spec, n)
        zeta = self.zeta if self.zeta_seed == 0 else random_zeta(n, self.zeta_seed)
        x_bar = self.center if self.center is not None else dist_mod.mode(spec)
        return new_grid(n, w, zeta, x_bar)


def _load_dist(text: str):
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--dist is neither a file nor valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError("--dist must be a JSON object")
    try:
        return dist_mod.from_dict(obj)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def build_config(args) -> RunConfig:
    target = _load_dist(args.dist)
    n = args.qubits
    if isinstance(target, DiscreteSpec):
        if n is not None and n != target.num_qubits:
            raise ConfigError(f"discrete spec of length {len(target.probs)} needs "
                              f"--qubits {target.num_qubits}, got {n}")
        n = target.num_qubits
        if n < 2:
            raise ConfigError("discrete specs need at least two probabilities")
    elif n is None and args.command != "sweep":
        raise ConfigError("--qubits is required for continuous distributions")
    window = None
    if args.window not in (None, "auto"):
        try:
            window = float(args.window)
        except ValueError:
            raise ConfigError(f"--window must be a number or 'auto', got {args.window!r}") from None
    cfg = RunConfig(
        command=args.command, target=target, n=n, window=window, zeta=args.zeta,
        zeta_seed=args.zeta_seed, center=args.center_override, tol=args.tol,
        fork=args.fork or args.command == "fork", lower=args.lower, qasm=args.qasm,
        qasm_xconj=args.qasm_xconj, json_path=args.json, csv_path=args.csv,
        angles_path=args.emit_angles, max_tvd=args.max_tvd,
        n_min=args.n_min, n_max=args.n_max)
    if cfg.command == "sweep":
        if cfg.discrete:
            raise ConfigError("sweep needs a continuous distribution")
        if cfg.n_min is None or cfg.n_max is None or not 1 <= cfg.n_min <= cfg.n_max:
            raise ConfigError("sweep needs 1 <= --n-min <= --n-max")
    else:
        try:
            cfg.grid()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return cfg


def _synthesize(cfg: RunConfig, n=None):
    """Return (table, circuit, layout) for the configured target."""
    if cfg.discrete:
        table = discrete_table(cfg.target)
        if cfg.fork:
            circuit, layout = fork_transform(table)
        else:
            circuit, layout = build_discrete_circuit(discrete_theta(cfg.target), table.n), None
    else:
        table = build_angle_table(cfg.target, cfg.grid(n), cfg.tol)
        if cfg.fork:
            circuit, layout = fork_transform(table)
        else:
            circuit, layout = build_upsampling_circuit(table), None
    if cfg.lower:
        circuit = lower_to_basis(circuit)
    circuit.metadata["distribution"] = cfg.target.to_dict()
    return table, circuit, layout


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def cmd_synth(cfg: RunConfig, out=None) -> int:
    table, circuit, layout = _synthesize(cfg)
    doc = circuit.to_dict()
    if layout is not None:
        doc["layout"] = layout.to_dict()
        doc["fork_report"] = fork_depth_report(circuit, layout)
    text = json.dumps(doc, indent=1)
    if cfg.json_path:
        _write(cfg.json_path, text)
    if cfg.qasm:
        _write(cfg.qasm, export_qasm(circuit, negctrl=not cfg.qasm_xconj))
    if cfg.angles_path:
        _write(cfg.angles_path, table.to_json())
    if not (cfg.json_path or cfg.qasm or cfg.angles_path):
        (out or sys.stdout).write(text + "\n")
    return 0


def _check_budget(num_qubits):
    if num_qubits > qubit_budget():
        raise BudgetError(f"{num_qubits} qubits exceed the simulation budget of {qubit_budget()}")


def cmd_simulate(cfg: RunConfig, out=None) -> int:
    _, circuit, layout = _synthesize(cfg)
    _check_budget(circuit.num_qubits)
    sv = simulate(circuit)
    if layout is not None:
        probs = marginal(sv, layout.output_register)
    else:
        probs = sv.probabilities
    grid = cfg.grid()
    xs = grid.xs() if grid is not None else np.arange(probs.size, dtype=float)
    doc = {"num_qubits": circuit.num_qubits, "x": xs.tolist(), "probabilities": probs.tolist()}
    if layout is None:
        doc["amplitudes"] = sv.amplitudes.real.tolist()
    if cfg.json_path:
        _write(cfg.json_path, json.dumps(doc, indent=1))
    if cfg.csv_path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "x", "prob"])
        for i, (xv, p) in enumerate(zip(xs, probs)):
            w.writerow([i, repr(float(xv)), repr(float(p))])
        _write(cfg.csv_path, buf.getvalue())
    if not (cfg.json_path or cfg.csv_path):
        (out or sys.stdout).write(json.dumps(doc) + "\n")
    return 0


def cmd_verify(cfg: RunConfig, out=None) -> int:
    _, circuit, layout = _synthesize(cfg)
    _check_budget(circuit.num_qubits)
    report = verify(cfg.target, cfg.grid(), circuit, layout=layout, tol=cfg.tol,
                    max_tvd=cfg.max_tvd)
    if cfg.json_path:
        _write(cfg.json_path, report.to_json())
    if cfg.csv_path:
        _write(cfg.csv_path, report.to_csv())
    if not report.passed:
        for f in report.failures:
            print(f"verify: {f}", file=sys.stderr)
        return EXIT_TOLERANCE
    return 0


def cmd_fork(cfg: RunConfig, out=None) -> int:
    return cmd_synth(cfg, out)


SWEEP_COLUMNS = ["n", "delta_x", "f_nyquist", "delta_x_norm", "tvd", "wrap_error"]


def cmd_sweep(cfg: RunConfig, out=None) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for n in range(cfg.n_min, cfg.n_max + 1):
        _check_budget(n)
        grid = cfg.grid(n)
        table, circuit, _ = _synthesize(RunConfig(**{**cfg.__dict__, "fork": False, "lower": False}), n)
        probs = simulate(circuit).probabilities
        want = oracle_xi(cfg.target, grid, cfg.tol) ** 2
        naive = np.asarray(cfg.target.pdf(grid.xs())) * table.delta_x_norm
        w.writerow([n, repr(grid.delta_x), repr(grid.f_nyquist), repr(table.delta_x_norm),
                    repr(tvd(probs, want)), repr(float(np.sum(np.abs(want - naive))))])
    if cfg.csv_path:
        _write(cfg.csv_path, buf.getvalue())
    else:
        (out or sys.stdout).write(buf.getvalue())
    return 0


COMMANDS = {"synth": cmd_synth, "simulate": cmd_simulate, "verify": cmd_verify,
            "fork": cmd_fork, "sweep": cmd_sweep}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qprep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--dist", required=True,
                       help='JSON object or file, e.g. {"kind":"gaussian","mu":0,"sigma":1}')
        p.add_argument("--qubits", type=int)
        p.add_argument("--window", default="auto")
        p.add_argument("--zeta", type=float, default=0.0)
        p.add_argument("--zeta-seed", type=int, default=0,
                       help="nonzero seeds draw zeta uniformly from [0, 2**-(n-1))")
        p.add_argument("--center-override", type=float)
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--fork", action="store_true")
        p.add_argument("--lower", action="store_true")
        p.add_argument("--qasm")
        p.add_argument("--qasm-xconj", action="store_true",
                       help="write negative controls as X conjugation instead of negctrl")
        p.add_argument("--json")
        p.add_argument("--csv")
        p.add_argument("--emit-angles")
        p.add_argument("--max-tvd", type=float, default=1e-10)
        p.add_argument("--n-min", type=int)
        p.add_argument("--n-max", type=int)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"qprep: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BudgetError, ForkingError) as exc:
        print(f"qprep: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (TruncationError, AngleError) as exc:
        print(f"qprep: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except OSError as exc:
        print(f"qprep: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
