"""Command-line interface: ``polarperm <command> ...``.

Every command that writes a file also writes ``<file>.manifest.json`` with the
resolved parameters, seed and tool version.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, fileio
from .construction import (
    build_frozen_from_sequence,
    build_frozen_ga,
    ga_density_evolution,
    nr_reliability_sequence,
    read_sequence_file,
    snr_to_sigma,
)
from .core import InvalidInputError
from .optimizers import (
    InfeasibleError,
    build_frozen_joint,
    decoding_bler_estimate,
    optimize_perm_set_scored,
    random_perm_set,
)
from .perm import PermutationSet, perm_decode
from .sc import sc_decode
from .scl import scl_decode
from .simulator import DecoderConfig, StopRule, run_sweep, write_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

FORMATS = """\
file formats:
  code file         JSON {"n": int, "k": int, "frozen": [ascending ints]}
  permutation file  JSON list of layer permutations, e.g. [[0,1,2],[0,2,1]]
  LLR file          whitespace-separated decimal reals, length n (positive favours 0)
  sequence file     one bit index per line, least reliable first
  orbit file        JSON {"fixed_layers", "orbit_exact", "groups": [{"members","value","weight"}]}
  simulate CSV      header snr_db,frames,block_errors,bler; one row per SNR point
  manifest          <output>.manifest.json: argv, command, params, seed, inputs, outputs, version
"""


class UsageError(Exception):
    pass


def _layers(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad layer list {text!r}") from exc


def _bits(v) -> str:
    return " ".join(str(int(b)) for b in v)


def cmd_construct(args) -> int:
    params = {"method": args.method, "n": args.n, "k": args.k}
    inputs = []
    if args.method == "ga":
        code = build_frozen_ga(args.n, args.k, args.design_snr, args.snr_convention)
        params.update(design_snr=args.design_snr, snr_convention=args.snr_convention)
        fileio.write_code(args.out, code, construction="ga")
    elif args.method == "sequence":
        if args.file:
            seq = read_sequence_file(args.file)
            inputs.append(args.file)
        else:
            seq = nr_reliability_sequence(args.n)
            params["builtin"] = "nr"
        seq = [s for s in seq if s < args.n] if len(seq) > args.n else seq
        code = build_frozen_from_sequence(args.n, args.k, seq)
        fileio.write_code(args.out, code, construction="sequence")
    else:
        sigma = snr_to_sigma(args.design_snr, args.k / args.n, args.snr_convention)
        profile = ga_density_evolution(args.n.bit_length() - 1, sigma)
        res = build_frozen_joint(args.n, args.k, args.fixed_layers, profile)
        code = res.code
        params.update(design_snr=args.design_snr, snr_convention=args.snr_convention,
                      fixed_layers=list(args.fixed_layers))
        fileio.write_code(args.out, code, construction="joint", orbit_exact=res.orbit_exact,
                          fixed_layers=sorted(args.fixed_layers))
        if args.orbits_out:
            fileio.write_orbits(args.orbits_out, res.split, profile, res.orbit_exact, res.relaxed_from_k)
        kind = "orbit-exact" if res.orbit_exact else f"relaxed (orbit code of dimension {res.relaxed_from_k})"
        print(f"orbits: {len(res.split.groups)} groups; frozen set is {kind}")
    print(f"wrote {args.out}: n={code.n} k={code.k} |F|={len(code.frozen)}")
    outs = [args.out] + ([args.orbits_out] if getattr(args, "orbits_out", None) else [])
    fileio.write_manifest(args.out, "construct", params, None, inputs, outs, args.argv)
    return EXIT_OK


def cmd_optimize_perms(args) -> int:
    code = fileio.read_code(args.code)
    sigma = snr_to_sigma(args.design_snr, code.k / code.n, args.snr_convention)
    profile = ga_density_evolution(code.m, sigma)
    params = {"list_size": args.list_size, "min_dist": args.min_dist, "design_snr": args.design_snr,
              "snr_convention": args.snr_convention, "scope": args.scope, "strategy": args.strategy,
              "seed_identity": not args.no_identity}
    if args.strategy == "random":
        pset = random_perm_set(code.m, args.list_size, args.seed)
        scored = [(p, decoding_bler_estimate(profile, code, p)) for p in pset.perms]
    else:
        try:
            res = optimize_perm_set_scored(profile, code, args.list_size, args.min_dist, args.scope,
                                           seed_identity=not args.no_identity, rng_seed=args.seed)
        except InfeasibleError as exc:
            print(f"infeasible: {exc} (achieved {exc.achieved})", file=sys.stderr)
            return EXIT_INFEASIBLE
        pset = PermutationSet(tuple(s.perm for s in res))
        scored = [(s.perm, s.bler_bound) for s in res]
    fileio.write_perms(args.out, pset)
    for p, v in scored:
        print(f"{list(p.map)} {v:.6e}")
    fileio.write_manifest(args.out, "optimize-perms", params, args.seed, [args.code], [args.out], args.argv)
    return EXIT_OK


def _decoder_config(args, code) -> DecoderConfig:
    if args.decoder == "perm":
        if not args.perms:
            raise UsageError("--decoder perm requires --perms")
        return DecoderConfig("perm", pset=fileio.read_perms(args.perms))
    if args.decoder == "scl":
        return DecoderConfig("scl", list_size=args.list_size)
    return DecoderConfig("sc")


def cmd_decode(args) -> int:
    code = fileio.read_code(args.code)
    llrs = fileio.read_llrs(args.llr)
    cfg = _decoder_config(args, code)
    cfg.validate(code)
    if cfg.kind == "sc":
        res = sc_decode(llrs, code)
    elif cfg.kind == "scl":
        res = scl_decode(llrs, code, cfg.list_size)
    else:
        res = perm_decode(llrs, code, cfg.pset)
    print(_bits(res.info_bits(code)))
    print(_bits(res.codeword))
    print(f"{res.metric:.6f}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    code = fileio.read_code(args.code)
    cfg = _decoder_config(args, code)
    cfg.validate(code)
    stop = StopRule(args.max_frames, args.target_errors)
    points = run_sweep(code, cfg, args.snr_start, args.snr_stop, args.snr_step, stop, args.seed,
                       args.snr_convention, threads=args.threads)
    write_csv(args.out, points)
    params = {"decoder": cfg.describe(), "snr_start": args.snr_start, "snr_stop": args.snr_stop,
              "snr_step": args.snr_step, "max_frames": args.max_frames, "target_errors": args.target_errors,
              "snr_convention": args.snr_convention, "code": {"n": code.n, "k": code.k}}
    inputs = [args.code] + ([args.perms] if args.perms else [])
    fileio.write_manifest(args.out, "simulate", params, args.seed, inputs, [args.out], args.argv)
    for p in points:
        print(f"{p.snr_db:.3f} {p.frames} {p.block_errors} {p.bler:.6e}")
    return EXIT_OK


def cmd_rerun(args) -> int:
    doc = fileio.read_manifest(args.manifest)
    return main(doc["argv"])


def _add_decoder_flags(p):
    p.add_argument("--decoder", choices=("sc", "scl", "perm"), default="sc")
    p.add_argument("--list-size", type=int, default=16, help="SCL list size (default 16)")
    p.add_argument("--perms", help="permutation file for --decoder perm")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(prog="polarperm", description=__doc__, epilog=FORMATS, formatter_class=fmt)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a frozen set", epilog=FORMATS, formatter_class=fmt)
    c.add_argument("method", choices=("ga", "sequence", "joint"))
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--design-snr", type=float, default=2.0, help="design SNR in dB (ga, joint)")
    c.add_argument("--snr-convention", choices=("ebno", "esno"), default="ebno")
    c.add_argument("--file", help="reliability sequence file (sequence); default: built-in 5G NR sequence")
    c.add_argument("--fixed-layers", type=_layers, default=[], help="comma-separated layers (joint)")
    c.add_argument("--orbits-out", help="write the orbit split (joint)")
    c.add_argument("--out", default="code.json")
    c.set_defaults(func=cmd_construct)

    o = sub.add_parser("optimize-perms", help="select a permutation set", epilog=FORMATS, formatter_class=fmt)
    o.add_argument("--code", required=True)
    o.add_argument("--list-size", type=int, required=True)
    o.add_argument("--min-dist", type=int, default=0)
    o.add_argument("--design-snr", type=float, default=2.0)
    o.add_argument("--snr-convention", choices=("ebno", "esno"), default="ebno")
    o.add_argument("--scope", default="full", help="full | fixed:<layers> | random:<count>")
    o.add_argument("--strategy", choices=("optimize", "random"), default="optimize",
                   help="random: identity plus uniformly random permutations")
    o.add_argument("--no-identity", action="store_true", help="do not seed the identity permutation")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", default="perms.json")
    o.set_defaults(func=cmd_optimize_perms)

    d = sub.add_parser("decode", help="decode one LLR file", epilog=FORMATS, formatter_class=fmt)
    d.add_argument("--code", required=True)
    d.add_argument("--llr", required=True)
    _add_decoder_flags(d)
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("simulate", help="BI-AWGN BLER sweep to CSV", epilog=FORMATS, formatter_class=fmt)
    s.add_argument("--code", required=True)
    _add_decoder_flags(s)
    s.add_argument("--snr-start", type=float, required=True)
    s.add_argument("--snr-stop", type=float, required=True)
    s.add_argument("--snr-step", type=float, default=0.25)
    s.add_argument("--max-frames", type=int, default=100000)
    s.add_argument("--target-errors", type=int, default=200)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--snr-convention", choices=("ebno", "esno"), default="ebno")
    s.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
    s.add_argument("--out", default="bler.csv")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("rerun", help="repeat the command recorded in a manifest", epilog=FORMATS,
                       formatter_class=fmt)
    r.add_argument("manifest")
    r.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
