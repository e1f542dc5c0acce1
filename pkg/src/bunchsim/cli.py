"""Command-line entry point: ``bunchsim <command> [flags]``.

Exit status: 0 success, 1 validation/resource error, 2 usage error,
3 ``verify`` found a violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bunching, circuit, ensemble, matrix, verify
from .errors import BunchsimError
from .photonic import InputSpec, Model, output_distribution, write_distribution_csv

EXIT_ERROR = 1
EXIT_VERIFY = 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").strip("()").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated mode numbers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",")]


def _make_input(m: int, args) -> InputSpec:
    return InputSpec.from_modes(m, args.input, args.species)


def _fmt(x: float | None) -> str:
    return "null" if x is None else repr(float(x))


def cmd_haar(args) -> int:
    u = matrix.haar_sample(args.modes, args.seed)
    _emit_unitary(u, args.out)
    return 0


def _emit_unitary(u, out) -> None:
    if out:
        matrix.save_unitary(u, out)
        print(f"wrote {u.shape[0]}x{u.shape[0]} unitary to {out}")
    else:
        print(json.dumps(matrix.unitary_to_json(u)))


def cmd_build(args) -> int:
    if args.circuit:
        u = circuit.build_unitary(circuit.load_circuit(args.circuit))
    else:
        built = circuit.make_preset(args.preset, args.modes, args.layers, args.transmissivity, args.phase_seed)
        u = built if isinstance(built, np.ndarray) else circuit.build_unitary(built)
    _emit_unitary(u, args.out)
    return 0


def cmd_distribution(args) -> int:
    u = matrix.load_unitary(args.unitary)
    inp = _make_input(u.shape[0], args)
    dist = output_distribution(u, inp, args.model, args.w)
    if args.out:
        write_distribution_csv(dist, args.out)
        print(f"wrote {len(dist)} states to {args.out}")
    else:
        write_distribution_csv(dist, stream=sys.stdout)
    return 0


def cmd_bunching(args) -> int:
    u = matrix.load_unitary(args.unitary)
    inp = _make_input(u.shape[0], args)
    report = bunching.bunching_report(u, inp, args.model, args.w)
    p_c = bunching.bunching_probability(output_distribution(u, inp, Model.CLASSICAL))
    defined = [r for r in report.r_fb if r is not None]
    print(f"model {report.model}")
    print(f"p_bunch {_fmt(report.p_bunch)}")
    print(f"collision_free {_fmt(report.collision_free)}")
    print("full_bunch " + " ".join(_fmt(q) for q in report.full_bunch))
    print("r_fb " + " ".join(_fmt(r) for r in report.r_fb))
    modes = ",".join(str(x) for x in args.input)
    r_fb = f"{defined[0]:.3f}" if defined else "undefined"
    print(f"row m={inp.m} input=({modes}) p_b={report.p_bunch:.3f} p_b_classical={p_c:.3f} r_fb={r_fb}")
    if args.out:
        bunching.save_report(report, args.out)
    return 0


def cmd_birthday(args) -> int:
    print(repr(ensemble.birthday_formula(args.n, args.m)))
    return 0


def cmd_ensemble(args) -> int:
    inp = _make_input(args.m, args)
    rep = ensemble.haar_ensemble_scan(args.n, args.m, inp, args.samples, args.seed,
                                      args.model, args.w, workers=args.workers)
    if args.out:
        ensemble.write_ensemble_csv(rep, args.out)
    if args.summary:
        ensemble.write_summary_json(rep, args.summary)
    print(f"mean {_fmt(rep.mean)}")
    print(f"std {_fmt(rep.std)}")
    print(f"band {_fmt(rep.band_low)} {_fmt(rep.band_high)}")
    if args.model == Model.BOSON.value and len(set(args.input)) == args.n and args.n <= args.m:
        print(f"birthday {_fmt(ensemble.birthday_formula(args.n, args.m))}")
    return 0


def cmd_predict_ratio(args) -> int:
    print(repr(bunching.predicted_ratio_mixture(args.n, args.w)))
    return 0


def cmd_hom_invert(args) -> int:
    print(repr(bunching.hom_invert(args.t, args.pc)))
    return 0


def cmd_verify(args) -> int:
    results = verify.run_all(args.seed)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else EXIT_VERIFY


def _add_particles(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", type=_int_list, required=True, help='1-indexed input modes, e.g. "1,2,3"')
    p.add_argument("--species", type=_str_list, help='species label per particle, e.g. "a,a,b"')
    p.add_argument("--model", choices=[x.value for x in Model], default=Model.BOSON.value)
    p.add_argument("--w", type=float, help="weight of the fully indistinguishable component (mixed model)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bunchsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("haar", help="sample a Haar-random unitary")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_haar)

    p = sub.add_parser("build", help="compile a preset or circuit file into a unitary")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=circuit.PRESETS)
    src.add_argument("--circuit")
    p.add_argument("--modes", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--transmissivity", type=float, default=0.5)
    p.add_argument("--phase-seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("distribution", help="full output distribution as CSV")
    p.add_argument("--unitary", required=True)
    _add_particles(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("bunching", help="bunching report for one input")
    p.add_argument("--unitary", required=True)
    _add_particles(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bunching)

    p = sub.add_parser("birthday", help="Haar-average bunching probability, closed form")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_birthday)

    p = sub.add_parser("ensemble", help="Monte Carlo over Haar-random unitaries")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_particles(p)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("predict-ratio", help="full-bunching ratio of a partial-distinguishability mixture")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    p.set_defaults(func=cmd_predict_ratio)

    p = sub.add_parser("hom-invert", help="p_b of indistinguishable particles from t and p_c")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--pc", type=float, required=True)
    p.set_defaults(func=cmd_hom_invert)

    p = sub.add_parser("verify", help="run the built-in property sweeps")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BunchsimError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
