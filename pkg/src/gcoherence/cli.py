"""Command-line front end.

Exit codes: 0 success, 1 validation error (bad flags, malformed input,
failed verification), 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import channels as ch
from . import experiments as ex
from . import factorization, measures, qstate, tomography

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

BUILTINS = {
    "qubit-paper": ch.qubit_paper_channel,
    "qutrit-pd": ch.qutrit_phase_damping,
    "amp-decay": ch.amplitude_decay,
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _num(value: float) -> str:
    return format(float(value), ".12g")


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO)


def _load_density(path: str) -> qstate.DensityMatrix:
    try:
        return qstate.as_density(qstate.state_from_json(_read_json(path)))
    except ValueError as exc:
        raise CliError(f"{path}: {exc}")


def _write_json(doc, path: str | None):
    text = json.dumps(doc, indent=2)
    if path is None:
        print(text)
        return
    try:
        Path(path).write_text(text + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO)


def cmd_coherence(args) -> int:
    rho = _load_density(args.state)
    kinds = ["g", "l1"] if args.measure == "both" else [args.measure]
    for kind in kinds:
        value = measures.coherence(rho, kind, args.noise_floor)
        print(f"{'G' if kind == 'g' else 'L1'} = {_num(value.value)}")
        if value.near_zero_warning:
            print(f"warning: {ex.NEAR_ZERO} (min |rho_ij| below 10x noise floor {args.noise_floor:g})")
    return EXIT_OK


def _resolve_channel(spec: str, param: float | None) -> ch.KrausChannel:
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in BUILTINS:
            raise CliError(f"unknown builtin channel {name!r}; choose from {', '.join(BUILTINS)}")
        if param is None:
            raise CliError(f"builtin:{name} needs --param")
        try:
            return BUILTINS[name](param)
        except ValueError as exc:
            raise CliError(str(exc))
    try:
        return ch.channel_from_json(_read_json(spec))
    except ValueError as exc:
        raise CliError(f"{spec}: {exc}")


def cmd_channel(args) -> int:
    channel = _resolve_channel(args.channel, args.param)
    cls = ch.classify(channel)
    if args.hadamard and cls.kind is not ch.ChannelKind.GIO:
        raise CliError(f"--hadamard requires a GIO; {channel.label or 'channel'} "
                       f"classified as {cls.kind.value}"
                       + (f" with permutation {cls.permutation}" if cls.permutation else ""))
    rho = _load_density(args.state)
    if rho.d != channel.d:
        raise CliError(f"state d={rho.d} does not match channel d={channel.d}")
    transfer = ch.transfer_matrix(channel)
    if args.hadamard:
        out = ch.apply_hadamard(transfer, rho)
    else:
        out = ch.apply(channel, rho)
    print(f"channel: {channel.label or '(unlabelled)'} [{cls.kind.value}]")
    print(f"G before = {_num(measures.g_coherence(rho))}")
    print(f"G after = {_num(measures.g_coherence(out))}")
    pairs = [(i, j) for i in range(channel.d) for j in range(i + 1, channel.d)]
    print("transfer |M_ij|: " + ", ".join(f"{i + 1}{j + 1}={_num(abs(transfer[i, j]))}" for i, j in pairs))
    if args.out:
        _write_json(qstate.state_to_json(out), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.d < 2:
        raise CliError(f"invalid dimension d={args.d}; need d >= 2")
    if args.trials < 1:
        raise CliError("--trials must be at least 1")
    summary = factorization.property_sweep(args.d, args.trials, args.seed, args.tolerance)
    print(json.dumps(summary.to_dict()))
    if not summary.all_pass:
        print(f"failing seeds: {summary.failing_seeds}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_tomo_simulate(args) -> int:
    rho = _load_density(args.state)
    try:
        projectors = tomography.projectors_for(rho.d)
        counts = tomography.simulate_counts(rho, projectors, args.shots, args.background, args.seed)
    except ValueError as exc:
        raise CliError(str(exc))
    _write_json(tomography.counts_to_json(counts), args.out)
    return EXIT_OK


def cmd_tomo_reconstruct(args) -> int:
    try:
        counts = tomography.counts_from_json(_read_json(args.counts))
        result = tomography.reconstruct(counts, project=args.project_psd)
        if args.resamples:
            result.g_sigma3 = tomography.bootstrap_sigma(counts, resamples=args.resamples, seed=args.seed)
    except ValueError as exc:
        raise CliError(f"{args.counts}: {exc}")
    sigma = "" if result.g_sigma3 is None else f" +/- {_num(result.g_sigma3)} (3 sigma)"
    print(f"G = {_num(result.g_value)}{sigma}")
    for w in result.warnings:
        print(f"warning: {w}")
    if args.out:
        _write_json(result.to_json(), args.out)
    return EXIT_OK


FIGURES = {
    "fig3": ex.Experiment.QUBIT_FIG3,
    "fig4": ex.Experiment.QUTRIT_FIG4,
    "fig5": ex.Experiment.MIXED_FIG5,
}


def cmd_reproduce(args) -> int:
    mode = ex.Mode.EXACT if args.mode == "exact" else ex.Mode.SHOT_NOISE
    config = ex.SweepConfig(FIGURES[args.figure], shots_per_group=args.shots, seed=args.seed,
                            mode=mode, resamples=args.resamples)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        rows = ex.run(config)
        if args.figure == "fig3":
            ex.write_sweep(ex.run_qubit_initial(config), out / "fig3a_initial.csv")
            ex.write_sweep(rows, out / "fig3_final.csv")
        elif args.figure == "fig4":
            ex.write_moduli([r for r in rows if r.parameters["theta2"] == 22.5], out / "fig4a_moduli.csv")
            ex.write_sweep(rows, out / "fig4b.csv")
        else:
            ex.write_sweep(rows, out / "fig5.csv")
    except OSError as exc:
        raise CliError(str(exc), EXIT_IO)
    print(f"{args.figure}: {len(rows)} rows written to {out}")
    print(f"max |g_direct - g_product| = {_num(ex.max_residual(rows))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcoherence", description="G-coherence and factorization-law toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coherence", help="evaluate G or l1 coherence of a state file")
    p.add_argument("--state", required=True)
    p.add_argument("--measure", choices=["g", "l1", "both"], default="g")
    p.add_argument("--noise-floor", type=float, default=0.0)
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("channel", help="apply a channel to a state")
    p.add_argument("--channel", required=True, help="channel JSON path or builtin:NAME")
    p.add_argument("--param", type=float, help="angle in degrees, or epsilon for amp-decay")
    p.add_argument("--state", required=True)
    p.add_argument("--out")
    p.add_argument("--hadamard", action="store_true", help="use the element-wise path (GIO only)")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("verify", help="randomized factorization-law sweep")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tolerance", type=float, default=factorization.DEFAULT_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tomo-simulate", help="simulate Poisson photon counts")
    p.add_argument("--state", required=True)
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--background", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tomo_simulate)

    p = sub.add_parser("tomo-reconstruct", help="reconstruct coherence from counts")
    p.add_argument("--counts", required=True)
    p.add_argument("--resamples", type=int, default=tomography.DEFAULT_RESAMPLES,
                   help="bootstrap resamples; 0 disables the error bar")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--project-psd", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tomo_reconstruct)

    p = sub.add_parser("reproduce", help="write figure sweeps as CSV")
    p.add_argument("--figure", choices=sorted(FIGURES), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=["exact", "shots"], default="exact")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resamples", type=int, default=tomography.DEFAULT_RESAMPLES)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
