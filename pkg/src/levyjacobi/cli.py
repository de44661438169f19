"""Command-line entry point: ``python -m levyjacobi <command> [--config PATH] ...``.

Exit codes: 0 when every check passes, 1 on any failed check or truncation
error, 2 on a configuration or argument error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .alphaidx import enumerate_alpha, k_alpha, k_alpha_exact
from .config import ConfigError, parse_config, standard_config
from .equivalence import mc_sample, oracle_moment
from .instance import Instance
from .jacobifield import TruncationFlag
from .measure import MeasureError
from .orthopoly import TruncationError, TruncationWarning
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
MC_Z = 4.0


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_jacobi(inst: Instance, args) -> int:
    J = inst.J
    rows = []
    for n in range(J.size):
        b = "" if n == 0 else repr(J.b_at(n))
        if n == 0:
            b2 = ""
        else:
            b2 = repr(float(J.b2_exact[n - 1])) if J.b2_exact else repr(J.b_at(n) ** 2)
        a_ex = str(J.a_exact[n]) if J.a_exact else ""
        b2_ex = str(J.b2_exact[n - 1]) if J.b2_exact and n > 0 else ""
        rows.append([n, repr(J.a_at(n)), b, b2, a_ex, b2_ex])
    _emit(_csv(rows, ["n", "a_n", "b_n", "b_n_squared", "a_n_exact", "b_n_squared_exact"]), args.out)
    return EXIT_OK


def cmd_alpha(inst: Instance, args) -> int:
    if args.degree < 0:
        raise ConfigError("--degree must be non-negative")
    J = inst.J
    rows = []
    for a in enumerate_alpha(args.degree):
        exact = str(k_alpha_exact(a, J)) if J.b2_exact is not None else ""
        rows.append([" ".join(map(str, a.counts)), a.weight, a.size, repr(k_alpha(a, J)), exact])
    _emit(_csv(rows, ["alpha", "weight", "size", "K_alpha", "K_alpha_exact"]), args.out)
    return EXIT_OK


def _parse_word(text: str, n_letters: int) -> list[int]:
    try:
        word = [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"--word: expected comma-separated letter indices, got {text!r}") from exc
    bad = [i for i in word if not 0 <= i < n_letters]
    if bad:
        raise ConfigError(f"--word: letter index {bad[0]} out of range 0..{n_letters - 1}")
    return word


def cmd_moments(inst: Instance, args) -> int:
    word = _parse_word(args.word, len(inst.letters))
    phis = [inst.letters[i] for i in word]
    if args.side == "oracle":
        value = oracle_moment(phis, inst.nu_moments, inst.grid)
    elif args.side == "j":
        value = inst.jfield.vacuum_moment(phis)
    else:
        value = inst.afield.vacuum_moment(phis)
    _emit(repr(float(value)) + "\n", args.out)
    return EXIT_OK


def cmd_verify(inst: Instance, args) -> int:
    report = run_suite(args.suite, inst, threads=args.threads, seed=args.seed)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if all(c["pass"] for c in report) else EXIT_FAIL


def cmd_sample(inst: Instance, args) -> int:
    seed = inst.config.mc.seed if args.seed is None else args.seed
    res = mc_sample(inst.nu_tilde, inst.grid, inst.letters, inst.config.mc.samples, seed, threads=args.threads)
    if args.out:
        header = ",".join(f"phi{i}" for i in range(len(inst.letters)))
        np.savetxt(args.out, res.samples, delimiter=",", header=header, comments="", fmt="%.17g")
    rows, ok = [], True
    for w, mean, se in zip(res.words, res.mean, res.se):
        oracle = oracle_moment([inst.letters[i] for i in w], inst.nu_moments, inst.grid)
        z = abs(mean - oracle) / se if se > 0 else (0.0 if math.isclose(mean, oracle) else math.inf)
        ok &= z <= MC_Z
        rows.append([" ".join(map(str, w)), repr(float(mean)), repr(float(se)), repr(float(oracle)), repr(float(z))])
    sys.stdout.write(_csv(rows, ["word", "mean", "se", "oracle", "z"]))
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "jacobi": cmd_jacobi,
    "alpha": cmd_alpha,
    "moments": cmd_moments,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (default: standard two-point instance)")
    common.add_argument("--out", help="also write the report to this path (samples CSV for `sample`)")
    common.add_argument("--seed", type=int, help="override the Monte Carlo seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo")
    p = argparse.ArgumentParser(prog="levyjacobi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("jacobi", parents=[common], help="CSV of recurrence coefficients")
    sp_alpha = sub.add_parser("alpha", parents=[common], help="alpha-indices of a weight with K_alpha")
    sp_alpha.add_argument("--degree", type=int, required=True)
    sp_mom = sub.add_parser("moments", parents=[common], help="one vacuum word moment")
    sp_mom.add_argument("--side", choices=("j", "a", "oracle"), required=True)
    sp_mom.add_argument("--word", required=True, help="comma-separated letter indices, e.g. 0,1,1")
    sp_ver = sub.add_parser("verify", parents=[common], help="JSON verification report")
    sp_ver.add_argument("--suite", choices=("all", *SUITES), default="all")
    sub.add_parser("sample", parents=[common], help="Monte Carlo samples and moment table")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        config = parse_config(args.config) if args.config else standard_config()
        inst = Instance(config)
    except (ConfigError, MeasureError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            # truncation is reported through TruncationError instead
            warnings.simplefilter("ignore", TruncationFlag)
            return COMMANDS[args.command](inst, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TruncationError, MeasureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
