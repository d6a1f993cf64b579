"""Command-line interface.

Usage:
    cnkit verify --max-n 100000
    cnkit scan --residue 5 --max-n 1000000 --workers 4 --format json
    cnkit certify --residue 5 --max-n 10000 --out certs.csv
    cnkit simulate --row 5a --r 30 --samples 100000 --seed 42
    cnkit markov --chain odd --k-max 64
    cnkit alpha --k-max 10
    cnkit classcheck --max-n 2000

Exit codes: 0 success, 1 identity/assertion failure, 2 resource error,
3 bad arguments.  Seeded commands are byte-reproducible for any worker
count.  CSV schemas are fixed; JSON mirrors the same rows plus a meta
object.  The environment variable CNKIT_SIEVE_CACHE may point to a
binary sieve cache file.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import struct
import sys

import numpy as np

from . import __version__
from .altsim import (
    alpha,
    classrank_stationary,
    corank_distribution_mc,
    ensemble_config,
    gerth_pmf,
    markov_stationary,
)
from .classgroup import classgroup_oracle
from .density import certified_table, scan, wilson_ci
from .lfun import LCache, verify_rows
from .monsky import redei_g
from .numtheory import (
    PrimeSieve,
    ResourceLimitError,
    enumerate_squarefree,
    sieve_init,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_RESOURCE = 2
EXIT_USAGE = 3

_SIEVE_MAGIC = b"CNKSPF"
_SIEVE_VERSION = 1
SIEVE_CACHE_ENV = "CNKIT_SIEVE_CACHE"


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # map argparse failures to exit code 3
        raise _ArgumentError(message)


def save_sieve(sieve: PrimeSieve, path: str) -> None:
    """Write the sieve as a versioned little-endian word table."""
    with open(path, "wb") as fh:
        fh.write(_SIEVE_MAGIC)
        fh.write(struct.pack("<IQ", _SIEVE_VERSION, sieve.limit))
        fh.write(sieve.spf.astype("<u4").tobytes())


def load_sieve(path: str) -> PrimeSieve | None:
    try:
        with open(path, "rb") as fh:
            magic = fh.read(len(_SIEVE_MAGIC))
            if magic != _SIEVE_MAGIC:
                return None
            version, limit = struct.unpack("<IQ", fh.read(12))
            if version != _SIEVE_VERSION:
                return None
            data = np.frombuffer(fh.read(), dtype="<u4")
            if len(data) != limit + 1:
                return None
            return PrimeSieve(limit=int(limit), spf=data.astype(np.uint32))
    except OSError:
        return None


def _obtain_sieve(limit: int) -> PrimeSieve:
    path = os.environ.get(SIEVE_CACHE_ENV)
    if path:
        cached = load_sieve(path)
        if cached is not None and cached.limit >= limit:
            return cached
    sieve = sieve_init(limit)
    if path:
        try:
            save_sieve(sieve, path)
        except OSError:
            pass  # cache is best-effort
    return sieve


def _config_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _emit(header: list[str], rows: list[list], meta: dict, args) -> None:
    """Serialize rows as CSV or JSON with identical numeric values."""
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_text(v) for v in row])
        payload = buf.getvalue()
    else:
        payload = (
            json.dumps(
                {
                    "meta": meta,
                    "rows": [dict(zip(header, row)) for row in rows],
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _text(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _meta(args, seed=None, **params) -> dict:
    return {
        "version": __version__,
        "command": args.command,
        "seed": seed,
        "config_hash": _config_hash({"command": args.command, "seed": seed, **params}),
    }


# --- subcommands ----------------------------------------------------------------


def cmd_verify(args) -> int:
    sieve = _obtain_sieve(max(2, args.max_n))
    cache = LCache()
    rows_out = []
    ok = True
    for f in enumerate_squarefree(1, 1, args.max_n, sieve):
        for row, check in verify_rows(f, cache).items():
            if not check.equal:
                ok = False
                from .monsky import build_twist, row_matrix

                rows_out.append(
                    [
                        f.n,
                        row,
                        check.sum_value,
                        check.det_value,
                        json.dumps(row_matrix(row, build_twist(f)).tolist()),
                    ]
                )
    header = ["n", "row", "sum_value", "det_value", "matrix"]
    _emit(header, rows_out, _meta(args, max_n=args.max_n), args)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_scan(args) -> int:
    sieve = _obtain_sieve(max(2, args.max_n))
    rep = scan(args.residue, args.max_n, sieve, workers=args.workers)
    rows = []
    for metric, count, total in rep.metrics():
        freq = count / total if total else 0.0
        lo, hi = wilson_ci(count, total)
        rows.append([metric, count, total, freq, lo, hi])
    header = ["metric", "count", "total", "frequency", "ci_low", "ci_high"]
    _emit(header, rows, _meta(args, max_n=args.max_n, residue=args.residue), args)
    if rep.identity_mismatches or rep.sel3_violations:
        return EXIT_FAILED
    return EXIT_OK


def cmd_certify(args) -> int:
    sieve = _obtain_sieve(max(2, args.max_n))
    rows = [
        [c.n, c.residue, c.row, c.rank3, c.value]
        for c in certified_table(args.residue, args.max_n, sieve)
    ]
    header = ["n", "residue", "row", "selmer_rank3", "L_value"]
    _emit(header, rows, _meta(args, max_n=args.max_n, residue=args.residue), args)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = ensemble_config(args.row)
    hist = corank_distribution_mc(
        cfg, r=args.r, samples=args.samples, seed=args.seed, workers=args.workers
    )
    rows = [
        [k, hist.counts[k], hist.counts[k] / hist.samples]
        for k in sorted(hist.counts)
    ]
    header = ["corank", "count", "frequency"]
    meta = _meta(args, seed=args.seed, row=args.row, r=args.r, samples=args.samples)
    _emit(header, rows, meta, args)
    return EXIT_OK


def cmd_markov(args) -> int:
    if args.chain == "classrank":
        dist = classrank_stationary(k_max=args.k_max, tol=args.tol)
        ref = {k: gerth_pmf(k) for k in dist}
    else:
        dist = markov_stationary(args.chain, k_max=args.k_max, tol=args.tol)
        ref = {k: alpha(k) for k in dist}
    rows = [[k, dist[k], ref[k]] for k in sorted(dist)]
    header = ["k", "probability", "closed_form"]
    _emit(header, rows, _meta(args, chain=args.chain, k_max=args.k_max), args)
    return EXIT_OK


def cmd_alpha(args) -> int:
    rows = [[k, alpha(k)] for k in range(args.k_max + 1)]
    _emit(["k", "alpha"], rows, _meta(args, k_max=args.k_max), args)
    return EXIT_OK


def cmd_classcheck(args) -> int:
    sieve = _obtain_sieve(max(2, args.max_n))
    disagreements = []
    checked = 0
    for f in enumerate_squarefree(1, 1, args.max_n, sieve):
        g = redei_g(f)
        info = classgroup_oracle(f, bound=args.max_n)
        checked += 1
        if (g == 1) != (info.four_rank == 0):
            disagreements.append([f.n, g, info.four_rank, info.h])
    header = ["n", "redei_g", "four_rank", "class_number"]
    _emit(header, disagreements, _meta(args, max_n=args.max_n), args)
    status = "all" if not disagreements else f"{checked - len(disagreements)}/{checked}"
    print(f"agree: {status}", file=sys.stderr)
    return EXIT_OK if not disagreements else EXIT_FAILED


def build_parser() -> _Parser:
    parser = _Parser(prog="cnkit", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, residue=False, row=False, seeded=False, scale=False):
        if scale:
            p.add_argument("--max-n", type=int, required=True, dest="max_n")
        if residue:
            p.add_argument("--residue", type=int, required=True)
        if row:
            p.add_argument("--row", type=str, required=True)
        if seeded:
            p.add_argument("--samples", type=int, default=100_000)
            p.add_argument("--r", type=int, default=30)
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", type=str, default=None)

    common(sub.add_parser("verify", help="check divisor sums against determinants"), scale=True)
    common(sub.add_parser("scan", help="density scan over one residue class"), residue=True, scale=True)
    common(sub.add_parser("certify", help="stream certified congruent numbers"), residue=True, scale=True)
    common(sub.add_parser("simulate", help="Monte Carlo corank distribution"), row=True, seeded=True)
    markov = sub.add_parser("markov", help="stationary distribution of a corank chain")
    markov.add_argument("--chain", choices=("even", "odd", "classrank"), required=True)
    markov.add_argument("--k-max", type=int, default=64, dest="k_max")
    markov.add_argument("--tol", type=float, default=1e-12)
    common(markov)
    alpha_p = sub.add_parser("alpha", help="table of the limit-law constants")
    alpha_p.add_argument("--k-max", type=int, default=10, dest="k_max")
    common(alpha_p)
    common(sub.add_parser("classcheck", help="Redei determinant vs class-group oracle"), scale=True)
    return parser


_COMMANDS = {
    "verify": cmd_verify,
    "scan": cmd_scan,
    "certify": cmd_certify,
    "simulate": cmd_simulate,
    "markov": cmd_markov,
    "alpha": cmd_alpha,
    "classcheck": cmd_classcheck,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
