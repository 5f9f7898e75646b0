"""Command-line interface.

Exit codes: 0 success, 2 precondition failure or refusal, 3 internal
consistency violation. The `iso` subcommand exits 1 when the inputs are
provably non-isomorphic.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import formats
from .cocycles import Variety, check_in_variety
from .correspond import (
    bruck_to_gamma,
    bruck_to_quandle,
    gamma_to_bruck,
    quandle_to_bruck,
)
from .errors import (
    InternalConsistencyError,
    LoopError,
    PreconditionError,
    RefusalError,
    UnsupportedStructureError,
)
from .iso import are_isomorphic, are_isomorphic_quandles
from .pipeline import (
    Catalog,
    classify_extensions,
    diff_catalogs,
    enumerate_order,
    run_enumeration_job,
    structural_comment,
    variety_of_kind,
)
from .symmetry import DEFAULT_COSET_LIMIT
from .tables import LoopTable, QuandleTable

log = logging.getLogger("loopenum")


def _add_common(sub):
    sub.add_argument("--jobs", type=int, default=1,
                     help="worker processes for per-factor classification")
    sub.add_argument("--coset-limit", type=int, default=DEFAULT_COSET_LIMIT,
                     help="refuse factors whose coset space exceeds this")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="loopenum",
        description="Enumerate left Bruck loops, commutative automorphic "
                    "loops and involutory latin quandles of odd prime power "
                    "order via central extensions.")
    ap.add_argument("-v", "--verbose", action="store_true",
                    help="log progress to stderr")
    sp = ap.add_subparsers(dest="command", required=True)

    enum = sp.add_parser("enumerate", help="enumerate a full order")
    enum.add_argument("--variety", required=True,
                      choices=["bruck", "ca", "quandle"])
    enum.add_argument("--prime", type=int, required=True)
    enum.add_argument("--exponent", type=int, required=True)
    enum.add_argument("--out", required=True,
                      help="job directory for catalogs and stage artifacts")
    enum.add_argument("--factors", default=None,
                      help="catalog directory one exponent below; skips the "
                           "chain build")
    enum.add_argument("--resume", action="store_true",
                      help="reuse valid artifacts already present in --out")
    _add_common(enum)

    res = sp.add_parser("resume", help="continue an interrupted enumeration")
    res.add_argument("--out", required=True, help="job directory")
    res.add_argument("--variety", default=None,
                     choices=["bruck", "ca", "quandle"])
    res.add_argument("--prime", type=int, default=None)
    res.add_argument("--exponent", type=int, default=None)
    _add_common(res)

    ext = sp.add_parser("extend", help="classify extensions of one factor")
    ext.add_argument("--factor", required=True, help="loop table file")
    ext.add_argument("--variety", required=True, choices=["bruck", "ca"])
    ext.add_argument("--prime", type=int, required=True)
    ext.add_argument("--out", default=None,
                     help="write the classified loops to this directory")
    _add_common(ext)

    chk = sp.add_parser("check", help="variety predicates on a table file")
    chk.add_argument("file")
    chk.add_argument("--variety", required=True,
                     choices=["bruck", "ca", "quandle"])

    conv = sp.add_parser("convert", help="quandle/bruck/gamma conversions")
    conv.add_argument("--to", required=True,
                      choices=["quandle", "bruck", "gamma"])
    conv.add_argument("input")
    conv.add_argument("output", nargs="?", default=None,
                      help="output file (stdout if omitted)")

    iso = sp.add_parser("iso", help="isomorphism test for two table files")
    iso.add_argument("file1")
    iso.add_argument("file2")

    cat = sp.add_parser("catalog", help="inspect catalog directories")
    catsub = cat.add_subparsers(dest="catalog_command", required=True)
    cl = catsub.add_parser("list", help="list entries with descriptors")
    cl.add_argument("dir")
    cv = catsub.add_parser("verify", help="check manifest and invariants")
    cv.add_argument("dir")
    cd = catsub.add_parser("diff", help="compare two catalogs up to iso")
    cd.add_argument("dir1")
    cd.add_argument("dir2")
    return ap


def cmd_enumerate(args):
    import os
    if args.factors is not None:
        factors = Catalog.load(args.factors)
        variety = variety_of_kind(args.variety)
        cat = enumerate_order(args.prime, args.exponent, variety, factors,
                              coset_limit=args.coset_limit, jobs=args.jobs)
        cat.save(args.out)
        print(f"{len(cat)} tables of order {cat.order} -> {args.out}")
        return 0
    if (not args.resume and os.path.isdir(args.out)
            and any(os.scandir(args.out))):
        raise PreconditionError(
            f"{args.out} is not empty; pass --resume to reuse its artifacts")
    cat = run_enumeration_job(args.out, args.variety, args.prime,
                              args.exponent, coset_limit=args.coset_limit,
                              jobs=args.jobs)
    print(f"{len(cat)} tables of order {cat.order} -> {args.out}")
    if cat.refusals:
        for r in cat.refusals:
            print(f"refused: {r}")
        return 2
    return 0


def cmd_resume(args):
    import json
    import os
    meta_path = os.path.join(args.out, "job.json")
    if not os.path.exists(meta_path):
        raise PreconditionError(f"{args.out} has no job.json to resume")
    with open(meta_path) as fh:
        meta = json.load(fh)
    kind = args.variety or meta["kind"]
    p = args.prime or meta["p"]
    k = args.exponent or meta["k_target"]
    cat = run_enumeration_job(args.out, kind, p, k,
                              coset_limit=args.coset_limit, jobs=args.jobs)
    print(f"{len(cat)} tables of order {cat.order} -> {args.out}")
    return 0 if not cat.refusals else 2


def cmd_extend(args):
    table = formats.read_table(args.factor)
    if not isinstance(table, LoopTable):
        raise PreconditionError("extend expects a loop table")
    variety = variety_of_kind(args.variety)
    cls = classify_extensions(table, args.prime, variety,
                              coset_limit=args.coset_limit)
    print(f"dim B = {cls.dim_coboundaries}")
    print(f"dim C = {cls.dim_cocycles}")
    print(f"orbit representatives = {cls.rep_count}")
    print(f"loops up to isomorphism = {len(cls.loops)}")
    if args.out:
        from .pipeline import catalog_from_tables
        prov = [("1", h) for h in cls.orbit_hashes]
        cat = catalog_from_tables(args.variety, table.n * args.prime,
                                  args.prime, cls.loops, prov)
        cat.save(args.out)
        print(f"catalog -> {args.out}")
    return 0


def cmd_check(args):
    table = formats.read_table(args.file)
    if args.variety == "quandle":
        if not isinstance(table, QuandleTable):
            raise PreconditionError("file does not carry a quandle header")
        print("quandle: ok (invariants validated on load)")
        return 0
    if not isinstance(table, LoopTable):
        raise PreconditionError(f"{args.variety} check expects a loop table")
    check_in_variety(table, variety_of_kind(args.variety))
    print(f"{args.variety}: ok")
    return 0


def cmd_convert(args):
    table = formats.read_table(args.input)
    target = args.to
    if target == "quandle":
        if not isinstance(table, LoopTable):
            raise PreconditionError("quandle target expects a loop input")
        out = bruck_to_quandle(table)
    elif target == "bruck":
        if isinstance(table, QuandleTable):
            out = quandle_to_bruck(table, 0)
        else:
            out = gamma_to_bruck(table)
    elif target == "gamma":
        if not isinstance(table, LoopTable):
            raise PreconditionError("gamma target expects a loop input")
        out = bruck_to_gamma(table)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(target)
    text = formats.dumps_table(out)
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_iso(args):
    t1 = formats.read_table(args.file1)
    t2 = formats.read_table(args.file2)
    if isinstance(t1, QuandleTable) != isinstance(t2, QuandleTable):
        print("not isomorphic (different kinds)")
        return 1
    if isinstance(t1, QuandleTable):
        phi = are_isomorphic_quandles(t1, t2)
    else:
        phi = are_isomorphic(t1, t2)
    if phi is None:
        print("not isomorphic")
        return 1
    print(" ".join(str(int(v)) for v in phi))
    return 0


def cmd_catalog(args):
    if args.catalog_command == "list":
        cat = Catalog.load(args.dir)
        print(f"kind={cat.kind} order={cat.order} p={cat.p} "
              f"entries={len(cat)}")
        for e in cat.entries:
            desc = (structural_comment(e.table)
                    if isinstance(e.table, LoopTable) else "quandle")
            print(f"{e.eid}\t{desc}\tfactor={e.factor_id}")
        for r in cat.refusals:
            print(f"refused: {r}")
        return 0
    if args.catalog_command == "verify":
        cat = Catalog.load(args.dir)   # checksum + fingerprints validated
        kept = set()
        for e in cat.entries:
            if e.fingerprint in kept:
                pass  # equal fingerprints are legal; iso-check below
            kept.add(e.fingerprint)
        # pairwise non-isomorphism inside fingerprint buckets
        buckets = {}
        for e in cat.entries:
            buckets.setdefault(e.fingerprint, []).append(e)
        match = are_isomorphic_quandles if cat.kind == "quandle" \
            else are_isomorphic
        for members in buckets.values():
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    if match(members[i].table, members[j].table) is not None:
                        raise InternalConsistencyError(
                            f"entries {members[i].eid} and {members[j].eid} "
                            f"are isomorphic")
        print(f"ok: {len(cat)} entries, pairwise non-isomorphic, "
              f"checksum valid")
        return 0
    if args.catalog_command == "diff":
        rep = diff_catalogs(Catalog.load(args.dir1), Catalog.load(args.dir2))
        if rep["equal"]:
            print("catalogs agree up to isomorphism")
            return 0
        print(f"only in left: {rep['only_left']}")
        print(f"only in right: {rep['only_right']}")
        return 1
    raise ValueError(args.catalog_command)  # pragma: no cover


_COMMANDS = {
    "enumerate": cmd_enumerate,
    "resume": cmd_resume,
    "extend": cmd_extend,
    "check": cmd_check,
    "convert": cmd_convert,
    "iso": cmd_iso,
    "catalog": cmd_catalog,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO,
                            format="%(message)s", stream=sys.stderr)
    try:
        return _COMMANDS[args.command](args)
    except (PreconditionError, RefusalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UnsupportedStructureError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InternalConsistencyError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
