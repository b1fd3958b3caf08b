"""Command-line driver.

Exit codes: 0 success, 1 input error (unreadable or malformed file,
enumeration guard exceeded), 2 circuit-property violation, 3 verify found
a disagreement, 4 time limit reached.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
from dataclasses import asdict, dataclass, field

from . import addand
from .baseline import MAX_OUTPUTS, GuardError, baseline_entropy
from .formula import FormulaError, RandomCircuitSpec, parse_dimacs, random_circuit, serialize
from .pse import CircuitViolation, EntropyResult, PseConfig, SearchTimeout, pse_entropy

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2
EXIT_DISAGREE = 3
EXIT_TIMEOUT = 4

AGREE_TOL = 1e-9

GEN_MAX_INPUTS = 14
GEN_MAX_OUTPUTS = 10


@dataclass
class RunReport:
    input: str
    mode: str
    config: dict
    entropy: str = ""
    count: str = ""
    stats: dict = field(default_factory=dict)
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    def fill(self, res: EntropyResult, prefix: str = "") -> None:
        if not prefix:
            self.entropy = repr(res.entropy)
            self.count = str(res.count)
            self.stats = res.stats.as_dict()
        else:
            self.extra[prefix + "entropy"] = repr(res.entropy)
            self.extra[prefix + "count"] = str(res.count)

    def render(self, style: str) -> str:
        if style == "structured":
            return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"
        lines = [f"input={self.input}", f"mode={self.mode}"]
        lines += [f"config.{k}={_fmt(v)}" for k, v in self.config.items()]
        if self.entropy:
            lines.append(f"entropy={self.entropy}")
        if self.count:
            lines.append(f"count={self.count}")
        lines += [f"stats.{k}={_fmt(v)}" for k, v in self.stats.items()]
        lines += [f"{k}={_fmt(v)}" for k, v in self.extra.items()]
        lines.append(f"status={self.status}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v))
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pse", description="Exact Shannon entropy of circuit CNF formulas.")
    p.add_argument("path", nargs="?", help="extended DIMACS input (not used by --mode gen)")
    p.add_argument("--mode", choices=("pse", "baseline", "verify", "compile", "gen"), default="pse")
    p.add_argument("--heuristic", choices=("minfill", "vsads"), default="minfill")
    p.add_argument("--order", help="comma-separated output decision order, overrides --heuristic")
    p.add_argument("--no-pre", action="store_true", help="skip literal-equivalence preprocessing")
    p.add_argument("--no-xcache", action="store_true")
    p.add_argument("--no-ycache", action="store_true")
    p.add_argument("--no-decomp", action="store_true")
    p.add_argument("--emit-trace", metavar="PATH", help="write the search trace as JSON lines")
    p.add_argument("--cache-bytes", type=int, metavar="N")
    p.add_argument("--stats", choices=("text", "structured"), default="text")
    p.add_argument("--timeout", type=float, metavar="SECONDS", help="soft limit, checked at decisions")
    p.add_argument("--out", help="compile: diagram output file; gen: output directory")
    p.add_argument("--format", choices=("text", "dot"), default="text", help="compile output format")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=10, help="gen: number of formulas")
    p.add_argument("--n-inputs", type=int)
    p.add_argument("--n-outputs", type=int)
    p.add_argument("--arity", type=int, default=3)
    return p


def config_from_args(args, emit_trace: bool = False) -> PseConfig:
    order = None
    if args.order:
        order = tuple(int(t) for t in args.order.split(",") if t.strip())
    return PseConfig(
        heuristic=args.heuristic,
        use_pre=not args.no_pre,
        use_ycache=not args.no_ycache,
        use_xcache=not args.no_xcache,
        use_decomposition=not args.no_decomp,
        emit_trace=emit_trace or bool(args.emit_trace),
        order=order,
        cache_bytes=args.cache_bytes,
        timeout=args.timeout,
    )


def write_trace(path: str, trace) -> None:
    with open(path, "w") as fh:
        header = {"root": trace.root, "order": trace.order, "decomposition": trace.decomposition}
        fh.write(json.dumps(header) + "\n")
        for rec in trace.records:
            fh.write(json.dumps(rec) + "\n")


def cmd_compute(args, out=sys.stdout) -> int:
    cfg = config_from_args(args)
    report = RunReport(args.path, args.mode, _config_echo(cfg))
    f = _load(args.path, report, out, args.stats)
    if f is None:
        return EXIT_INPUT
    try:
        if args.mode == "baseline":
            res = baseline_entropy(f)
        else:
            res = pse_entropy(f, cfg)
    except GuardError as exc:
        return _fail(report, out, args.stats, "input-error", str(exc), EXIT_INPUT)
    except CircuitViolation as exc:
        return _fail(report, out, args.stats, "circuit-violation", str(exc), EXIT_VIOLATION)
    except SearchTimeout as exc:
        return _fail(report, out, args.stats, "timeout", str(exc), EXIT_TIMEOUT)
    report.fill(res)
    if args.emit_trace and res.trace is not None:
        write_trace(args.emit_trace, res.trace)
    out.write(report.render(args.stats))
    return EXIT_OK


def cmd_verify(args, out=sys.stdout) -> int:
    cfg = config_from_args(args)
    report = RunReport(args.path, "verify", _config_echo(cfg))
    f = _load(args.path, report, out, args.stats)
    if f is None:
        return EXIT_INPUT
    if len(f.outputs) > MAX_OUTPUTS:
        return _fail(report, out, args.stats, "input-error",
                     f"{len(f.outputs)} outputs exceed the enumeration guard of {MAX_OUTPUTS}", EXIT_INPUT)
    try:
        res = pse_entropy(f, cfg)
        base = baseline_entropy(f)
    except CircuitViolation as exc:
        return _fail(report, out, args.stats, "circuit-violation", str(exc), EXIT_VIOLATION)
    except SearchTimeout as exc:
        return _fail(report, out, args.stats, "timeout", str(exc), EXIT_TIMEOUT)
    report.fill(res)
    report.fill(base, prefix="baseline.")
    agree = abs(res.entropy - base.entropy) <= AGREE_TOL and res.count == base.count
    report.extra["verdict"] = "agree" if agree else "disagree"
    report.status = "ok" if agree else "disagree"
    out.write(report.render(args.stats))
    return EXIT_OK if agree else EXIT_DISAGREE


def cmd_compile(args, out=sys.stdout) -> int:
    cfg = config_from_args(args, emit_trace=True)
    report = RunReport(args.path, "compile", _config_echo(cfg))
    f = _load(args.path, report, out, args.stats)
    if f is None:
        return EXIT_INPUT
    try:
        res = pse_entropy(f, cfg)
    except CircuitViolation as exc:
        return _fail(report, out, args.stats, "circuit-violation", str(exc), EXIT_VIOLATION)
    except SearchTimeout as exc:
        return _fail(report, out, args.stats, "timeout", str(exc), EXIT_TIMEOUT)
    d = addand.build_from_trace(res.trace)
    text = addand.export(d, args.format)
    if args.emit_trace:
        write_trace(args.emit_trace, res.trace)
    report.fill(res)
    report.extra["diagram.nodes"] = d.node_count()
    report.extra["diagram.root"] = d.root.kind
    report.extra["diagram.weight"] = str(addand.weight(d))
    report.extra["diagram.entropy"] = repr(addand.entropy(d))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        report.extra["diagram.file"] = args.out
    else:
        out.write(text)
    out.write(report.render(args.stats))
    return EXIT_OK


def gen_spec(seed: int, n_inputs: int | None, n_outputs: int | None, arity: int) -> RandomCircuitSpec:
    """Generator parameters for one seed; unset sizes are drawn from the seed."""
    rng = random.Random(seed)
    ni = n_inputs if n_inputs is not None else rng.randint(2, GEN_MAX_INPUTS)
    no = n_outputs if n_outputs is not None else rng.randint(1, GEN_MAX_OUTPUTS)
    return RandomCircuitSpec(seed, ni, no, arity)


def cmd_gen(args, out=sys.stdout) -> int:
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    manifest = []
    for seed in range(args.seed, args.seed + args.count):
        try:
            spec = gen_spec(seed, args.n_inputs, args.n_outputs, args.arity)
        except ValueError as exc:
            out.write(f"status=input-error\nerror={exc}\n")
            return EXIT_INPUT
        text = serialize(random_circuit(spec))
        name = f"circuit_{seed:06d}.cnf"
        with open(os.path.join(outdir, name), "w") as fh:
            fh.write(text)
        manifest.append({
            "file": name, "seed": seed, "n_inputs": spec.n_inputs, "n_outputs": spec.n_outputs,
            "arity": spec.arity, "sha256": hashlib.sha256(text.encode("ascii")).hexdigest(),
        })
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    out.write(f"mode=gen\nfiles={len(manifest)}\nout={outdir}\nstatus=ok\n")
    return EXIT_OK


def _config_echo(cfg: PseConfig) -> dict:
    return asdict(cfg)


def _load(path, report, out, style):
    if not path:
        _fail(report, out, style, "input-error", "no input file given", EXIT_INPUT)
        return None
    try:
        with open(path, "rb") as fh:
            return parse_dimacs(fh.read())
    except (OSError, FormulaError, UnicodeDecodeError) as exc:
        _fail(report, out, style, "input-error", str(exc), EXIT_INPUT)
        return None


def _fail(report, out, style, status, message, code) -> int:
    report.status = status
    report.extra["error"] = message
    out.write(report.render(style))
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"gen": cmd_gen, "verify": cmd_verify, "compile": cmd_compile}
    return handlers.get(args.mode, cmd_compute)(args, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
