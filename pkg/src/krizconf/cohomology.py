"""Bigraded cohomology of the Kriz model and the tables built from it.

Two kinds of complexes are computed:

* ``full``: ``E(X, n)`` with the full differential, giving
  ``dim H^{p,q}(conf(X, n))``.
* ``graded``: the full-support quotient ``E(X, r) / F_{r-1} E(X, r)`` with the
  graded differential.  For ``chi(X) = 0`` its cohomology is the coefficient
  ``a_r^{p,q}`` of ``binom(n, r)`` in ``dim H^{p,q}(conf(X, n))``.

Each map ``d: E^{p,q} -> E^{p+top,q-1}`` is split by torus weight before any
rank is taken.  Ranks go through :class:`Engine`, which memoizes them, keeps
an optional JSON cache and can farm maps out to worker processes.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

from .binomial import BinomialPolynomial, FitError, fit_binomial
from .kriz import _assemble, bidegree_range, build_basis
from .linalg import DEFAULT_PRIMES, RankCertificate, rank
from .ring import RingPresentation, euler_characteristic, resolve_ring

__all__ = [
    "BigradedTable", "DeconvolutionError", "Engine", "MissingCoefficient", "StrictnessReport",
    "betti_polynomials", "cohom_dims", "deconvolve_by_C", "fit_binomial", "FitError",
    "graded_coefficients", "highest_weight_dims", "primed_coefficients", "q0_polynomial",
    "verify_strictness", "weight_cohom",
]

log = logging.getLogger(__name__)

MODES = ("full", "graded")


class DeconvolutionError(ArithmeticError):
    pass


class MissingCoefficient(LookupError):
    pass


# ----------------------------------------------------------------------------
# tables

@dataclass(frozen=True)
class BigradedTable:
    """Dimensions indexed by ``(p, q)``.

    ``kind`` fixes the export layout:

    * ``full``: ``conf(X, n)``; row ``q`` runs over ``p = 0 .. n + 1 - q``.
    * ``C``: ``conf(C, n)/C``; row ``q`` runs over ``p = 0 .. n - 1 - q``.
    * ``graded``: raw coefficients ``a_r``; rows ``q >= 1``, ``p = 0 .. r + 1 - q``.
    * ``primed``: coefficients of the ``/C`` polynomials; rows ``q >= 1``,
      ``p = 0 .. r - 1 - q``.

    Rows are listed from ``q = n - 1`` down, columns by increasing ``p``.
    Entries outside the layout must vanish; exporting otherwise raises.
    """

    n: int
    kind: str
    dims: dict = field(default_factory=dict)
    weight: int | None = None
    flagged: tuple = ()

    def __post_init__(self):
        clean = {(int(p), int(q)): int(v) for (p, q), v in self.dims.items() if v}
        object.__setattr__(self, "dims", clean)

    def __getitem__(self, pq) -> int:
        return self.dims.get(tuple(pq), 0)

    def total(self, k: int) -> int:
        return sum(v for (p, q), v in self.dims.items() if p + q == k)

    def poincare(self) -> list[int]:
        top = max((p + q for p, q in self.dims), default=-1)
        return [self.total(k) for k in range(top + 1)]

    def _layout(self):
        n = self.n
        if self.kind == "full":
            return [(q, n + 1 - q) for q in range(max(n - 1, 0), -1, -1)]
        if self.kind == "C":
            return [(q, n - 1 - q) for q in range(max(n - 1, 0), -1, -1)]
        if self.kind == "graded":
            return [(q, n + 1 - q) for q in range(n - 1, 0, -1)]
        if self.kind == "primed":
            return [(q, n - 1 - q) for q in range(n - 1, 0, -1)]
        raise ValueError(f"unknown table kind {self.kind!r}")

    def rows(self) -> list[tuple[int, list[int]]]:
        layout = self._layout()
        covered = {(p, q) for q, top in layout for p in range(top + 1)}
        stray = sorted(pq for pq in self.dims if pq not in covered)
        if stray:
            raise ValueError(f"entries {stray} fall outside the {self.kind} layout for n = {self.n}")
        return [(q, [self[p, q] for p in range(top + 1)]) for q, top in layout]

    def to_csv(self) -> str:
        rows = self.rows()
        width = max((len(v) for _, v in rows), default=0)
        lines = ["q," + ",".join(f"p={p}" for p in range(width))]
        for q, values in rows:
            lines.append(",".join([str(q)] + [str(v) for v in values]))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        rows = self.rows()
        width = max((len(v) for _, v in rows), default=0)
        lines = ["| q \\ p | " + " | ".join(str(p) for p in range(width)) + " |",
                 "|---" * (width + 1) + "|"]
        for q, values in rows:
            cells = [str(v) for v in values] + [""] * (width - len(values))
            lines.append(f"| {q} | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "kind": self.kind,
            "weight": self.weight,
            "rows": [{"q": q, "values": values} for q, values in self.rows()],
            "flagged": [list(k) for k in self.flagged],
        }
        return json.dumps(doc, indent=2) + "\n"

    def export(self, fmt: str) -> str:
        try:
            return {"csv": self.to_csv, "md": self.to_markdown, "json": self.to_json}[fmt]()
        except KeyError:
            raise ValueError(f"unknown format {fmt!r}") from None


def deconvolve_by_C(table: BigradedTable) -> BigradedTable:
    """Divide each row by ``(1 + t)^2`` in ``p``: ``P = P' + 2 P'^{p-1} + P'^{p-2}``.

    Works for full tables (giving ``conf(C, n)/C``) and for raw coefficient
    tables (giving the primed ones).  The quotient must be exact and
    nonnegative.
    """
    kind = {"full": "C", "graded": "primed"}.get(table.kind)
    if kind is None:
        raise ValueError(f"cannot deconvolve a {table.kind} table")
    out = {}
    for q in sorted({q for _, q in table.dims}):
        top = max(p for p, qq in table.dims if qq == q)
        row = {}
        for p in range(top + 1):
            v = table[p, q] - 2 * row.get(p - 1, 0) - row.get(p - 2, 0)
            if v < 0:
                raise DeconvolutionError(f"negative quotient {v} at (p, q) = ({p}, {q})")
            row[p] = v
        # remainder: the last two quotient entries must be absorbed exactly
        if row.get(top, 0) or row.get(top - 1, 0):
            raise DeconvolutionError(f"row q = {q} is not divisible by (1 + t)^2")
        out.update({(p, q): v for p, v in row.items()})
    return BigradedTable(table.n, kind, out, table.weight, table.flagged)


# ----------------------------------------------------------------------------
# rank jobs

def _ring_key(ring: RingPresentation) -> str:
    doc = json.dumps(ring.to_document(), sort_keys=True)
    return f"{ring.ring_id}:{hashlib.sha1(doc.encode()).hexdigest()[:10]}"


def _primes_key(primes) -> str:
    return ",".join(str(p) for p in primes)


def piece_key(ring_key: str, mode: str, n: int, p: int, q: int, w, primes) -> str:
    """Stable cache key of one ``(mode, n, p, q, weight)`` piece."""
    return f"{ring_key}|{mode}|n={n}|p={p}|q={q}|w={'*' if w is None else w}|primes={_primes_key(primes)}"


def _map_job(ring, mode, n, p, q, weights, primes):
    """Ranks of ``d`` out of ``E^{p,q}`` split by weight.

    Returns ``{w: (dim source, dim target, certificate dict)}``.
    """
    full_support = mode == "graded"
    top = ring.top_degree
    src = build_basis(ring, n, p, q, None, full_support)
    tgt = build_basis(ring, n, p + top, q - 1, None, full_support) if q > 0 else []
    if ring.weights is None:
        groups_s = {None: src}
        groups_t = {None: tgt}
    else:
        groups_s, groups_t = {}, {}
        for m in src:
            groups_s.setdefault(m.weight(ring), []).append(m)
        for m in tgt:
            groups_t.setdefault(m.weight(ring), []).append(m)
    wanted = sorted(set(groups_s) | set(groups_t), key=_wkey) if weights is None else weights
    out = {}
    for w in wanted:
        s = groups_s.get(w, [])
        t = groups_t.get(w, [])
        if s and t:
            cert = rank(_assemble(ring, s, t, mode == "graded"), primes).to_dict()
        else:
            cert = RankCertificate(0, tuple(primes[:2]), True, modular_ranks=(0, 0)).to_dict()
        out[w] = (len(s), len(t), cert)
    return out


def _run_job(args):
    return args, _map_job(*args)


class Engine:
    """Memoized rank computations for one ring and prime set.

    ``cache`` names a JSON file with one entry per piece, holding ``dim``,
    ``rank_in``, ``rank_out``, ``primes``, ``agreed`` and ``timestamp``;
    entries for whole pieces (``w=*``) also list their weight spaces.
    Entries are reused on later runs; ``rank_jobs`` counts the maps actually
    eliminated.
    """

    def __init__(self, ring=None, primes=DEFAULT_PRIMES, cache=None, jobs: int = 1):
        self.ring = resolve_ring(ring)
        self.primes = tuple(int(p) for p in primes)
        if len(self.primes) < 2:
            raise ValueError("at least two primes are needed for a certificate")
        self.jobs = max(1, int(jobs))
        self.cache_path = Path(cache) if cache else None
        self.ring_key = _ring_key(self.ring)
        self.rank_jobs = 0
        self._rank: dict = {}          # (mode, n, p, q, w) -> (rank out of the piece, agreed)
        self._dim: dict = {}           # (mode, n, p, q, w) -> dimension
        self._maps_done: set = set()   # (mode, n, p, q): every weight of the map is known
        self._piece_weights: dict = {}  # (mode, n, p, q) -> weights, from the cache
        self._disk: dict = {}
        self._dirty = False
        if self.cache_path and self.cache_path.exists():
            self._disk = json.loads(self.cache_path.read_text())
            self._absorb_disk()

    # -- cache ---------------------------------------------------------------

    def _absorb_disk(self):
        top = self.ring.top_degree
        prefix = f"{self.ring_key}|"
        suffix = f"|primes={_primes_key(self.primes)}"
        for key, entry in self._disk.items():
            if not key.startswith(prefix) or not key.endswith(suffix):
                continue
            parts = key.split("|")
            mode = parts[1]
            fields = dict(part.split("=", 1) for part in parts[2:6])
            n, p, q = int(fields["n"]), int(fields["p"]), int(fields["q"])
            if fields["w"] == "*":
                pieces = {(None if w == "None" else int(w)): v for w, v in entry["weights"].items()}
                self._piece_weights[(mode, n, p, q)] = sorted(pieces, key=_wkey)
            else:
                pieces = {int(fields["w"]): [entry["dim"], entry["rank_in"], entry["rank_out"],
                                             entry.get("agreed", True)]}
            for w, (dim, r_in, r_out, agreed) in pieces.items():
                self._dim[(mode, n, p, q, w)] = int(dim)
                self._rank[(mode, n, p, q, w)] = (int(r_out), bool(agreed))
                self._rank[(mode, n, p - top, q + 1, w)] = (int(r_in), bool(agreed))

    def _record(self, mode, n, p, q, weight, pieces, total):
        if self.cache_path is None:
            return
        key = piece_key(self.ring_key, mode, n, p, q, weight, self.primes)
        if key in self._disk:
            return
        entry = {
            "dim": total["dim"],
            "rank_in": total["rank_in"],
            "rank_out": total["rank_out"],
            "primes": list(self.primes),
            "agreed": total["agreed"],
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        }
        if weight is None:
            entry["weights"] = {str(w): v for w, v in pieces.items()}
        self._disk[key] = entry
        self._dirty = True

    def flush(self):
        """Write new cache entries; keys are sorted so the file is deterministic."""
        if self.cache_path is None or not self._dirty:
            return
        self.cache_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.cache_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self._disk, indent=1, sort_keys=True))
        tmp.replace(self.cache_path)
        self._dirty = False

    # -- computation ---------------------------------------------------------

    def _maps(self, n, p, q):
        """The maps out of and into ``E^{p,q}`` that exist, as source bidegrees."""
        top = self.ring.top_degree
        return [(pp, qq) for pp, qq in ((p, q), (p - top, q + 1))
                if pp >= 0 and 0 < qq < max(n, 1)]

    def _need(self, mode, n, p, q, weight) -> list:
        if weight is None or self.ring.weights is None:
            if (mode, n, p, q) in self._piece_weights:
                return []
            return [(mode, n, pp, qq, None) for pp, qq in self._maps(n, p, q)
                    if (mode, n, pp, qq) not in self._maps_done]
        return [(mode, n, pp, qq, (weight,)) for pp, qq in self._maps(n, p, q)
                if (mode, n, pp, qq, weight) not in self._rank]

    def _store(self, job, result):
        mode, n, p, q, weights = job
        top = self.ring.top_degree
        for w, (ds, dt, cert) in result.items():
            self._rank[(mode, n, p, q, w)] = (cert["rank"], cert["agreed"])
            self._dim[(mode, n, p, q, w)] = ds
            self._dim[(mode, n, p + top, q - 1, w)] = dt
            if not cert["agreed"]:
                log.error("rank certificate without agreement at %s", (mode, n, p, q, w))
        if weights is None:
            self._maps_done.add((mode, n, p, q))

    def run(self, jobs):
        """Run map jobs, in worker processes when ``jobs > 1``."""
        jobs = list(dict.fromkeys(jobs))
        if not jobs:
            return
        args = [(self.ring, mode, n, p, q, weights, self.primes) for mode, n, p, q, weights in jobs]
        if self.jobs > 1 and len(args) > 1:
            with ProcessPoolExecutor(self.jobs) as pool:
                results = list(pool.map(_run_job, args))
        else:
            results = [_run_job(a) for a in args]
        for (_, mode, n, p, q, weights, _), result in results:
            self.rank_jobs += 1
            self._store((mode, n, p, q, weights), result)

    def prefetch(self, mode, n, pieces, weight=None):
        """Compute every missing map around the given ``(p, q)`` pieces in one batch."""
        jobs = []
        for p, q in pieces:
            jobs.extend(self._need(mode, n, p, q, weight))
        self.run(jobs)

    def _weights_of(self, mode, n, p, q):
        known = self._piece_weights.get((mode, n, p, q))
        if known is not None:
            return known
        if self.ring.weights is None or not self._maps(n, p, q):
            return [None]
        return sorted({k[4] for k in self._dim if k[:4] == (mode, n, p, q)}, key=_wkey)

    def _dim_of(self, mode, n, p, q, w) -> int:
        key = (mode, n, p, q, w)
        if key not in self._dim:
            self._dim[key] = len(build_basis(self.ring, n, p, q, w, mode == "graded"))
        return self._dim[key]

    def _rank_of(self, mode, n, p, q, w) -> tuple[int, bool]:
        if (p, q) not in self._maps(n, p, q):
            return 0, True
        return self._rank.get((mode, n, p, q, w), (0, True))

    def piece(self, mode: str, n: int, p: int, q: int, weight=None) -> dict:
        """``dim``, ``rank_in``, ``rank_out`` and ``cohomology`` of one piece.

        ``weight=None`` sums over all weights.
        """
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if n < 0 or p < 0 or q < 0:
            raise ValueError("n, p and q must be nonnegative")
        if mode == "graded" and euler_characteristic(self.ring) != 0:
            raise ValueError("graded complexes compute F-module coefficients only when chi(X) = 0")
        if weight is not None and self.ring.weights is None:
            raise ValueError("ring carries no weights")
        top = self.ring.top_degree
        self.run(self._need(mode, n, p, q, weight))
        weights = self._weights_of(mode, n, p, q) if weight is None else [weight]
        total = {"dim": 0, "rank_in": 0, "rank_out": 0, "cohomology": 0, "agreed": True}
        pieces = {}
        for w in weights:
            dim = self._dim_of(mode, n, p, q, w)
            r_out, a_out = self._rank_of(mode, n, p, q, w)
            r_in, a_in = self._rank_of(mode, n, p - top, q + 1, w)
            h = dim - r_out - r_in
            if h < 0:
                raise ArithmeticError(f"negative cohomology at {(mode, n, p, q, w)}")
            pieces[w] = [dim, r_in, r_out, a_out and a_in]
            total["dim"] += dim
            total["rank_in"] += r_in
            total["rank_out"] += r_out
            total["cohomology"] += h
            total["agreed"] &= a_out and a_in
        if total["dim"]:
            self._record(mode, n, p, q, weight, pieces, total)
            self.flush()
        return total

    def cohomology(self, mode: str, n: int, p: int, q: int, weight=None) -> int:
        return self.piece(mode, n, p, q, weight)["cohomology"]

    def table(self, mode: str, n: int, weight=None) -> BigradedTable:
        pieces = list(bidegree_range(self.ring, n))
        self.prefetch(mode, n, pieces, weight)
        dims, flagged = {}, []
        for p, q in pieces:
            result = self.piece(mode, n, p, q, weight)
            dims[(p, q)] = result["cohomology"]
            if not result["agreed"]:
                flagged.append((p, q))
        kind = "full" if mode == "full" else "graded"
        return BigradedTable(n, kind, dims, weight, tuple(flagged))


def _wkey(w):
    return (w is None, w if w is not None else 0)


_DEFAULT_ENGINES: dict = {}


def _engine(ring=None, engine: Engine | None = None) -> Engine:
    if engine is not None:
        return engine
    ring = resolve_ring(ring)
    key = _ring_key(ring)
    if key not in _DEFAULT_ENGINES:
        _DEFAULT_ENGINES[key] = Engine(ring)
    return _DEFAULT_ENGINES[key]


# ----------------------------------------------------------------------------
# public operations

def cohom_dims(ring=None, n: int = 0, engine: Engine | None = None) -> BigradedTable:
    """``dim H^{p,q}(conf(X, n))`` from the full Kriz complex.

    ``n = 0`` and ``n = 1`` are seeded directly: a point and ``X`` itself.
    """
    eng = _engine(ring, engine)
    if n == 0:
        return BigradedTable(0, "full", {(0, 0): 1})
    if n == 1:
        dims = {}
        for d in eng.ring.degrees:
            dims[(d, 0)] = dims.get((d, 0), 0) + 1
        return BigradedTable(1, "full", dims)
    return eng.table("full", n)


def graded_coefficients(ring=None, r: int = 0, engine: Engine | None = None) -> BigradedTable:
    """Raw coefficients ``a_r^{p,q}``: cohomology of ``E(X, r)/F_{r-1}`` under ``gr d``."""
    eng = _engine(ring, engine)
    if euler_characteristic(eng.ring) != 0:
        raise ValueError("graded coefficients need chi(X) = 0")
    return eng.table("graded", r)


def primed_coefficients(ring=None, r: int = 0, engine: Engine | None = None) -> BigradedTable:
    """Coefficients of ``binom(n, r)`` in the ``/C`` dimensions, rows ``q > 0``."""
    raw = graded_coefficients(ring, r, engine)
    rows_q = BigradedTable(r, "graded", {k: v for k, v in raw.dims.items() if k[1] > 0},
                           flagged=raw.flagged)
    return deconvolve_by_C(rows_q)


def weight_cohom(ring=None, n: int = 0, p: int = 0, q: int = 0, w: int = 0,
                 full_support: bool = False, engine: Engine | None = None) -> int:
    """Cohomology of the weight-``w`` part of one piece.

    ``full_support=True`` uses the graded quotient complex at ``r = n``.
    """
    eng = _engine(ring, engine)
    if eng.ring.weights is None:
        raise ValueError("ring carries no weights")
    return eng.cohomology("graded" if full_support else "full", n, p, q, w)


def highest_weight_dims(ring=None, n: int = 0, p: int = 0, q: int = 0,
                        full_support: bool = False, engine: Engine | None = None) -> dict[int, int]:
    """Multiplicity of the ``(k+1)``-dimensional SL2 module: ``m_k = h_k - h_{k+2}``."""
    eng = _engine(ring, engine)
    h = {}
    k = p
    while k >= 0:
        h[k] = weight_cohom(eng.ring, n, p, q, k, full_support, eng)
        k -= 1
    return {k: h[k] - h.get(k + 2, 0) for k in h if h[k] - h.get(k + 2, 0)}


def q0_polynomial(p: int) -> BinomialPolynomial:
    """``P^{p,0}(n) = (p + 1) binom(n, p) + (p - 1) binom(n, p - 1)`` for the elliptic curve."""
    if p == 0:
        return BinomialPolynomial({0: 1})
    return BinomialPolynomial({p: p + 1, p - 1: p - 1})


def _vanishing_fill(p: int, q: int, i: int) -> bool:
    """Coefficients known to vanish without computation (elliptic curve)."""
    if q > 0 and p == 0:
        return True
    return p == 1 and q > 0 and i in (2 * q, 2 * q + 1)


def betti_polynomials(max_k: int, ring=None, rmax: int = 8, use_vanishing: bool = True,
                      engine: Engine | None = None) -> dict[int, BinomialPolynomial]:
    """``b_k(n) = sum_{p+q=k} sum_i a_i^{p,q} binom(n, i)`` for ``k <= max_k``.

    Coefficients with ``i > rmax`` are never computed; they are filled by the
    vanishing results for ``p = 0`` and for ``p = 1, i in {2q, 2q + 1}`` when
    ``use_vanishing`` is set, and raise :class:`MissingCoefficient` otherwise.
    """
    eng = _engine(ring, engine)
    needed = {}
    for k in range(max_k + 1):
        for q in range(k + 1):
            p = k - q
            for i in range(q + 1 if q else 0, p + 2 * q + 1):
                if i <= rmax:
                    needed.setdefault(k, []).append((i, p, q))
                elif not (use_vanishing and _vanishing_fill(p, q, i)):
                    raise MissingCoefficient(f"a_{i}^{{{p},{q}}} needs r = {i} > {rmax}")
    out = {}
    for k in range(max_k + 1):
        coeffs = {}
        for i, p, q in needed.get(k, []):
            coeffs[i] = coeffs.get(i, 0) + eng.cohomology("graded", i, p, q)
        out[k] = BinomialPolynomial(coeffs)
    return out


@dataclass
class StrictnessReport:
    n: int
    checked: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    negatives: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.negatives

    def __str__(self):
        lines = [f"n = {self.n}: {len(self.checked)} bidegrees checked"]
        lines += [f"  mismatch at (p, q) = {pq}: full {a}, from coefficients {b}"
                  for pq, a, b in self.mismatches]
        lines += [f"  negative a_{i}^{{{p},{q}}} = {v}" for (p, q, i), v in self.negatives]
        return "\n".join(lines)


def verify_strictness(ring=None, n: int = 0, engine: Engine | None = None) -> StrictnessReport:
    """Check ``sum_i a_i^{p,q} binom(n, i) = dim H^{p,q}(conf(X, n))`` for ``q > 0``."""
    eng = _engine(ring, engine)
    if euler_characteristic(eng.ring) != 0:
        raise ValueError("strictness needs chi(X) = 0")
    full = cohom_dims(eng.ring, n, eng)
    coeff = {i: graded_coefficients(eng.ring, i, eng) for i in range(n + 1)}
    report = StrictnessReport(n)
    for p, q in bidegree_range(eng.ring, n):
        if q == 0:
            continue
        assembled = 0
        for i, table in coeff.items():
            v = table[p, q]
            if v < 0:
                report.negatives.append(((p, q, i), v))
            assembled += v * comb(n, i)
        report.checked.append((p, q))
        if assembled != full[p, q]:
            report.mismatches.append(((p, q), full[p, q], assembled))
    return report
