"""Enumeration pipeline: per-factor classification of central extensions,
cross-factor deduplication through central subloops, catalog persistence
and resumable jobs.

A catalog is an ordered list of pairwise non-isomorphic tables with
per-entry provenance (which factor and which orbit representative
produced it). Catalog ids are dense and assigned by sorting entries by
their fingerprint serialization, which makes the id order deterministic
and independent of scheduling; the deduplication step is correct for any
fixed total order of the factors.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import formats
from .cocycles import (
    Cocycle,
    Variety,
    check_in_variety,
    coboundary_space,
    extension,
    variety_cocycle_space,
)
from .correspond import bruck_to_gamma, bruck_to_quandle
from .errors import InternalConsistencyError, PreconditionError, RefusalError
from .gf import RREFBasis
from .iso import (
    are_isomorphic,
    are_isomorphic_quandles,
    filter_indices_up_to_iso,
    loop_fingerprint,
    quandle_element_invariants,
)
from .symmetry import DEFAULT_COSET_LIMIT, automorphism_group, orbit_decomposition
from .tables import LoopTable, QuandleTable, cyclic_group

log = logging.getLogger("loopenum")

KINDS = ("bruck", "ca", "quandle")

_VARIETY_OF_KIND = {"bruck": Variety.BRUCK, "ca": Variety.COMM_AUTOMORPHIC}


def variety_of_kind(kind):
    if kind not in _VARIETY_OF_KIND:
        raise ValueError(f"no cocycle variety for catalog kind {kind!r}")
    return _VARIETY_OF_KIND[kind]


# ---------------------------------------------------------------------------
# fingerprint helpers

def fingerprint_hash(table):
    if isinstance(table, QuandleTable):
        text = repr(sorted(quandle_element_invariants(table))).encode()
        return hashlib.sha256(b"QFP1" + text).hexdigest()
    return loop_fingerprint(table).hash()


def fingerprint_sort_key(table):
    if isinstance(table, QuandleTable):
        return (repr(sorted(quandle_element_invariants(table))).encode(),
                table.table.tobytes())
    return (loop_fingerprint(table).serialize(), table.table.tobytes())


def structural_comment(Q):
    """Short structural descriptor: abelian type, or the count of
    elements of order 3 for nonassociative loops."""
    if Q.is_associative() and Q.is_commutative():
        typ = abelian_type(Q)
        parts = []
        for m in sorted(set(typ)):
            k = typ.count(m)
            parts.append(f"Z{m}" if k == 1 else f"Z{m}^{k}")
        return "x".join(parts)
    k3 = int((Q.orders() == 3).sum())
    return f"{k3} elements of order 3"


def abelian_type(Q):
    """Cyclic-factor orders of an abelian p-group, read off the counts of
    elements of order dividing p^j."""
    n = Q.n
    p = _smallest_prime_factor(n)
    orders = Q.orders()
    conj = []          # conj[j-1] = number of cyclic factors of order >= p^j
    m_prev = 0
    pj = 1
    while pj < n:
        pj *= p
        count = int((pj % orders == 0).sum())
        m_j = round(math.log(count, p))
        if p ** m_j != count:
            raise ValueError("element order profile is not that of an "
                             "abelian p-group")
        conj.append(m_j - m_prev)
        m_prev = m_j
    r = conj[0] if conj else 0
    return sorted(p ** sum(1 for c in conj if c >= i) for i in range(1, r + 1))


def _smallest_prime_factor(n):
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


# ---------------------------------------------------------------------------
# catalogs

@dataclass
class CatalogEntry:
    eid: int
    table: object                # LoopTable or QuandleTable
    fingerprint: str
    factor_id: str = "-"
    orbit_hash: str = "-"


@dataclass
class Catalog:
    kind: str
    order: int
    p: int
    entries: list = field(default_factory=list)
    refusals: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown catalog kind {self.kind!r}")

    def __len__(self):
        return len(self.entries)

    def tables(self):
        return [e.table for e in self.entries]

    @property
    def complete(self):
        return not self.refusals

    def manifest_text(self):
        lines = [f"# loopenum-catalog kind={self.kind} order={self.order} "
                 f"p={self.p} entries={len(self.entries)}"]
        for reason in self.refusals:
            lines.append(f"# refused-factor {reason}")
        for e in self.entries:
            lines.append(f"{e.eid}\t{_entry_filename(e.eid)}\t"
                         f"{e.fingerprint}\t{e.factor_id}\t{e.orbit_hash}")
        body = "\n".join(lines) + "\n"
        digest = hashlib.sha256(body.encode()).hexdigest()
        return body + f"# checksum {digest}\n"

    def save(self, dirpath):
        os.makedirs(dirpath, exist_ok=True)
        for e in self.entries:
            formats.write_table(os.path.join(dirpath, _entry_filename(e.eid)),
                                e.table)
        with open(os.path.join(dirpath, "manifest.txt"), "w",
                  newline="\n") as fh:
            fh.write(self.manifest_text())

    @classmethod
    def load(cls, dirpath, validate_tables=True):
        with open(os.path.join(dirpath, "manifest.txt"), encoding="ascii") as fh:
            text = fh.read()
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or not lines[-1].startswith("# checksum "):
            raise ValueError("manifest has no checksum line")
        digest = lines[-1].split(" ")[-1]
        body = "\n".join(lines[:-1]) + "\n"
        if hashlib.sha256(body.encode()).hexdigest() != digest:
            raise ValueError("manifest checksum mismatch")
        head = lines[0]
        if not head.startswith("# loopenum-catalog "):
            raise ValueError("missing catalog header")
        meta = dict(kv.split("=") for kv in head.split(" ")[2:])
        cat = cls(kind=meta["kind"], order=int(meta["order"]),
                  p=int(meta["p"]))
        for ln in lines[1:-1]:
            if ln.startswith("# refused-factor "):
                cat.refusals.append(ln[len("# refused-factor "):])
                continue
            if ln.startswith("#"):
                continue
            eid_s, fname, fp, fid, ohash = ln.split("\t")
            table = formats.read_table(os.path.join(dirpath, fname))
            entry = CatalogEntry(int(eid_s), table, fp, fid, ohash)
            if validate_tables and fingerprint_hash(table) != fp:
                raise ValueError(f"entry {eid_s}: fingerprint mismatch")
            cat.entries.append(entry)
        if len(cat.entries) != int(meta["entries"]):
            raise ValueError("entry count mismatch")
        return cat


def _entry_filename(eid):
    return f"{eid:05d}.tbl"


def catalog_from_tables(kind, order, p, tables, provenance=None,
                        refusals=None):
    """Assemble a catalog with ids sorted by fingerprint serialization."""
    provenance = provenance or [("-", "-")] * len(tables)
    items = sorted(zip(tables, provenance),
                   key=lambda tp: fingerprint_sort_key(tp[0]))
    cat = Catalog(kind=kind, order=order, p=p, refusals=list(refusals or []))
    for i, (table, (fid, ohash)) in enumerate(items, start=1):
        cat.entries.append(CatalogEntry(i, table, fingerprint_hash(table),
                                        fid, ohash))
    return cat


def diff_catalogs(cat1, cat2):
    """Compare two catalogs up to isomorphism; returns a report dict with
    unmatched entry ids on both sides."""
    if cat1.kind != cat2.kind or cat1.order != cat2.order:
        return {"equal": False, "reason": "kind/order mismatch",
                "only_left": [e.eid for e in cat1.entries],
                "only_right": [e.eid for e in cat2.entries]}
    match = are_isomorphic_quandles if cat1.kind == "quandle" \
        else are_isomorphic
    by_fp = {}
    for e in cat2.entries:
        by_fp.setdefault(e.fingerprint, []).append(e)
    used = set()
    only_left = []
    pairs = []
    for e in cat1.entries:
        hit = None
        for cand in by_fp.get(e.fingerprint, []):
            if cand.eid in used:
                continue
            if match(e.table, cand.table) is not None:
                hit = cand
                break
        if hit is None:
            only_left.append(e.eid)
        else:
            used.add(hit.eid)
            pairs.append((e.eid, hit.eid))
    only_right = [e.eid for e in cat2.entries if e.eid not in used]
    return {"equal": not only_left and not only_right,
            "pairs": pairs, "only_left": only_left,
            "only_right": only_right}


# ---------------------------------------------------------------------------
# per-factor classification

@dataclass
class FactorClassification:
    """Everything the classification of one factor produces."""

    factor_id: str
    dim_coboundaries: int
    dim_cocycles: int
    orbit_count: int
    rep_count: int
    iso_checks: int
    loops: list = field(default_factory=list)        # filtered, up to iso
    orbit_hashes: list = field(default_factory=list)  # parallel to loops


def classify_extensions(F, p, variety, coset_limit=DEFAULT_COSET_LIMIT,
                        factor_id="-"):
    """All loops in the variety that are central extensions of Z_p by F,
    up to isomorphism, with provenance hashes of the producing orbit
    representatives."""
    check_in_variety(F, variety)
    cob = coboundary_space(F, p)
    coc = variety_cocycle_space(F, p, variety)
    d = coc.dim - cob.dim
    if p ** d > coset_limit:
        raise RefusalError(
            f"{p}^{d} = {p ** d} cosets exceed the limit {coset_limit}")
    group = automorphism_group(F)
    reps, sizes = orbit_decomposition(coc, cob, group, p,
                                      coset_limit=coset_limit)
    loops = []
    hashes = []
    for theta in reps:
        loops.append(extension(F, p, theta))
        hashes.append(hashlib.sha256(
            formats.dumps_cocycle(theta).encode()).hexdigest())
    kept_idx, checks = filter_indices_up_to_iso(loops)
    cls = FactorClassification(
        factor_id=factor_id,
        dim_coboundaries=cob.dim,
        dim_cocycles=coc.dim,
        orbit_count=len(reps),
        rep_count=len(reps),
        iso_checks=checks,
        loops=[loops[i] for i in kept_idx],
        orbit_hashes=[hashes[i] for i in kept_idx],
    )
    return cls


# ---------------------------------------------------------------------------
# one full order step with cross-factor dedup

def enumerate_order(p, k1, variety, factors, coset_limit=DEFAULT_COSET_LIMIT,
                    jobs=1, workdir=None, return_stats=False):
    """All loops of order p^k1 in the variety, as central extensions of
    Z_p by the factors of order p^(k1-1).

    ``factors`` is the complete catalog one exponent below. A loop whose
    center has order p is kept outright; otherwise it is kept iff none of
    its order-p central quotients is isomorphic to an earlier factor.
    Refused factors (coset-count limit) are recorded in the result.
    """
    kind = {Variety.BRUCK: "bruck", Variety.COMM_AUTOMORPHIC: "ca"}[variety]
    if factors.order != p ** (k1 - 1):
        raise RefusalError("factor catalog has the wrong order")
    if factors.kind != kind:
        raise RefusalError("factor catalog has the wrong kind")
    if not factors.complete:
        raise RefusalError("factor catalog is incomplete (it records "
                           "refusals); the union would be unsound")

    classifications = _classify_all(factors, p, variety, coset_limit, jobs,
                                    workdir)

    # cross-factor dedup via order-p central quotients
    factor_lookup = {}
    for e in factors.entries:
        factor_lookup.setdefault(e.fingerprint, []).append(e)

    def factor_id_of(quot):
        fp = fingerprint_hash(quot)
        for cand in factor_lookup.get(fp, []):
            if are_isomorphic(quot, cand.table) is not None:
                return cand.eid
        raise InternalConsistencyError(
            "an order-p central quotient matches no factor; the factor "
            "catalog cannot be complete")

    tables = []
    provenance = []
    refusals = []
    for entry in factors.entries:
        cls = classifications[entry.eid]
        if cls is None:
            refusals.append(f"{entry.eid} coset count above limit")
            continue
        for loop, ohash in zip(cls.loops, cls.orbit_hashes):
            if len(loop.center()) != p:
                discard = False
                for zj in loop.central_subloops_of_order_p(p):
                    t = factor_id_of(loop.quotient(zj))
                    if t < entry.eid:
                        discard = True
                        break
                if discard:
                    continue
            tables.append(loop)
            provenance.append((str(entry.eid), ohash))
    cat = catalog_from_tables(kind, p ** k1, p, tables, provenance, refusals)
    if return_stats:
        return cat, classifications
    return cat


def _classify_all(factors, p, variety, coset_limit, jobs, workdir):
    """Classify every factor, optionally in a process pool and optionally
    with per-factor staged artifacts under workdir."""
    out = {}
    todo = []
    for e in factors.entries:
        if workdir is not None:
            found, cached = _load_staged(workdir, e.eid, p, variety)
            if found:
                out[e.eid] = cached
                continue
        todo.append(e)
    if jobs > 1 and len(todo) > 1:
        args = [(e.eid, e.table.table, p, variety.value, coset_limit,
                 workdir) for e in todo]
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            for eid, payload in pool.map(_classify_worker, args):
                out[eid] = _classification_from_payload(payload)
    else:
        for e in todo:
            out[e.eid] = _classify_one(e.eid, e.table, p, variety,
                                       coset_limit, workdir)
    return out


def _classify_one(eid, table, p, variety, coset_limit, workdir):
    t0 = time.time()
    try:
        cls = classify_extensions(table, p, variety, coset_limit,
                                  factor_id=str(eid))
    except RefusalError as exc:
        log.info("factor %s refused: %s", eid, exc)
        if workdir is not None:
            _save_staged(workdir, eid, p, variety, None)
        return None
    log.info("factor %s: B=%d C=%d reps=%d -> %d loops (%d iso checks, "
             "%.1fs)", eid, cls.dim_coboundaries, cls.dim_cocycles,
             cls.rep_count, len(cls.loops), cls.iso_checks,
             time.time() - t0)
    if workdir is not None:
        _save_staged(workdir, eid, p, variety, cls)
    return cls


def _classify_worker(args):
    eid, table_array, p, variety_value, coset_limit, workdir = args
    table = LoopTable(np.asarray(table_array))
    cls = _classify_one(eid, table, p, Variety(variety_value), coset_limit,
                        workdir)
    return eid, _classification_payload(cls)


def _classification_payload(cls):
    if cls is None:
        return None
    return {
        "factor_id": cls.factor_id,
        "dim_coboundaries": cls.dim_coboundaries,
        "dim_cocycles": cls.dim_cocycles,
        "orbit_count": cls.orbit_count,
        "rep_count": cls.rep_count,
        "iso_checks": cls.iso_checks,
        "tables": [lp.table.tolist() for lp in cls.loops],
        "orbit_hashes": list(cls.orbit_hashes),
    }


def _classification_from_payload(payload):
    if payload is None:
        return None
    cls = FactorClassification(
        factor_id=payload["factor_id"],
        dim_coboundaries=payload["dim_coboundaries"],
        dim_cocycles=payload["dim_cocycles"],
        orbit_count=payload["orbit_count"],
        rep_count=payload["rep_count"],
        iso_checks=payload["iso_checks"],
        loops=[LoopTable(np.array(t)) for t in payload["tables"]],
        orbit_hashes=list(payload["orbit_hashes"]),
    )
    return cls


# -- staged per-factor artifacts (resume support) ---------------------------

def _stage_dir(workdir, eid):
    return os.path.join(workdir, f"factor_{eid:05d}")


def _save_staged(workdir, eid, p, variety, cls):
    d = _stage_dir(workdir, eid)
    os.makedirs(d, exist_ok=True)
    payload = _classification_payload(cls)
    blob = json.dumps({"p": p, "variety": variety.value, "result": payload},
                      sort_keys=True)
    digest = hashlib.sha256(blob.encode()).hexdigest()
    tmp = os.path.join(d, "classification.json.tmp")
    with open(tmp, "w") as fh:
        json.dump({"checksum": digest, "p": p, "variety": variety.value,
                   "result": payload}, fh)
    os.replace(tmp, os.path.join(d, "classification.json"))


def _load_staged(workdir, eid, p, variety):
    """(found, classification-or-None); a stored None records a refusal."""
    path = os.path.join(_stage_dir(workdir, eid), "classification.json")
    if not os.path.exists(path):
        return False, None
    try:
        with open(path) as fh:
            doc = json.load(fh)
        blob = json.dumps({"p": doc["p"], "variety": doc["variety"],
                           "result": doc["result"]}, sort_keys=True)
        if hashlib.sha256(blob.encode()).hexdigest() != doc["checksum"]:
            return False, None
        if doc["p"] != p or doc["variety"] != variety.value:
            return False, None
    except (json.JSONDecodeError, KeyError, ValueError):
        return False, None
    return True, _classification_from_payload(doc["result"])


# ---------------------------------------------------------------------------
# enumeration jobs (chain from the seed order, resumable)

def seed_catalog(kind, p):
    """The unique loop of order p in either variety: the cyclic group."""
    return catalog_from_tables(kind, p, p, [cyclic_group(p)])


def run_enumeration_job(jobdir, kind, p, k_target,
                        coset_limit=DEFAULT_COSET_LIMIT, jobs=1):
    """Enumerate loops of order p^k_target, reusing any valid artifacts
    already present under jobdir; returns the final catalog."""
    if kind == "quandle":
        bruck = run_enumeration_job(jobdir, "bruck", p, k_target,
                                    coset_limit, jobs)
        return quandle_catalog_from_bruck(bruck, jobdir)
    variety = variety_of_kind(kind)
    os.makedirs(jobdir, exist_ok=True)
    _write_job_meta(jobdir, kind, p, k_target, coset_limit)
    cat = None
    for k in range(1, k_target + 1):
        cat_dir = os.path.join(jobdir, f"{kind}_order_{p ** k}")
        if os.path.isdir(cat_dir):
            try:
                cat = Catalog.load(cat_dir)
                log.info("order %d: reusing catalog with %d entries",
                         p ** k, len(cat))
                continue
            except (ValueError, OSError):
                log.info("order %d: stored catalog is invalid, rebuilding",
                         p ** k)
        if k == 1:
            cat = seed_catalog(kind, p)
        else:
            workdir = os.path.join(jobdir, f"{kind}_work_{p ** k}")
            os.makedirs(workdir, exist_ok=True)
            cat = enumerate_order(p, k, variety, cat,
                                  coset_limit=coset_limit, jobs=jobs,
                                  workdir=workdir)
        cat.save(cat_dir)
        log.info("order %d: %d loops catalogued", p ** k, len(cat))
    return cat


def _write_job_meta(jobdir, kind, p, k_target, coset_limit):
    path = os.path.join(jobdir, "job.json")
    meta = {"kind": kind, "p": p, "k_target": k_target,
            "coset_limit": coset_limit}
    if os.path.exists(path):
        with open(path) as fh:
            old = json.load(fh)
        if {k: old.get(k) for k in ("kind", "p")} != {"kind": kind, "p": p}:
            raise PreconditionError("job directory belongs to a different "
                                    "enumeration")
    with open(path, "w") as fh:
        json.dump(meta, fh)


def quandle_catalog_from_bruck(bruck_catalog, jobdir=None):
    """The companion involutory latin quandle catalog, entry by entry."""
    quandles = [bruck_to_quandle(e.table) for e in bruck_catalog.entries]
    prov = [(e.factor_id, e.orbit_hash) for e in bruck_catalog.entries]
    cat = catalog_from_tables("quandle", bruck_catalog.order,
                              bruck_catalog.p, quandles, prov,
                              bruck_catalog.refusals)
    if jobdir is not None:
        cat_dir = os.path.join(jobdir,
                               f"quandle_order_{bruck_catalog.order}")
        cat.save(cat_dir)
    return cat


# ---------------------------------------------------------------------------
# correspondence crosscheck

def crosscheck_correspondences(bruck_catalog, ca_catalog):
    """Map every Bruck loop through the gamma correspondence and match it
    to a commutative automorphic catalog entry up to isomorphism.

    Returns a report dict; mismatches are content, not errors.
    """
    if bruck_catalog.order != ca_catalog.order:
        raise ValueError("catalogs have different orders")
    by_fp = {}
    for e in ca_catalog.entries:
        by_fp.setdefault(e.fingerprint, []).append(e)
    pairs = []
    not_automorphic = []
    unmatched = []
    used = set()
    for e in bruck_catalog.entries:
        gamma = bruck_to_gamma(e.table)
        if not gamma.is_automorphic():
            not_automorphic.append(e.eid)
            continue
        hit = None
        for cand in by_fp.get(fingerprint_hash(gamma), []):
            if cand.eid in used:
                continue
            if are_isomorphic(gamma, cand.table) is not None:
                hit = cand
                break
        if hit is None:
            unmatched.append(e.eid)
        else:
            used.add(hit.eid)
            pairs.append((e.eid, hit.eid))
    missed_ca = [e.eid for e in ca_catalog.entries if e.eid not in used]
    return {
        "bijection": not not_automorphic and not unmatched and not missed_ca,
        "pairs": pairs,
        "gamma_not_automorphic": not_automorphic,
        "gamma_unmatched": unmatched,
        "ca_unmatched": missed_ca,
    }
