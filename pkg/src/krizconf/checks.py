"""Invariant suites shared by ``verify`` and the tests.

Every check returns a :class:`CheckResult`; none raise on a failed invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .cohomology import Engine, graded_coefficients, verify_strictness
from .kriz import (apply_map, bidegree_range, build_basis, differential, differential_matrix,
                   weights_for)
from .linalg import RATIONAL_GUARD, rank, rational_rank
from .partitions import (double_factorial, enumerate_Q, hook_dim, labelled_partition_dim,
                         oyster_lower_bound)
from .ring import resolve_ring


@dataclass
class CheckResult:
    name: str
    ok: bool
    count: int = 0
    failures: list = field(default_factory=list)

    def __str__(self):
        head = f"{'PASS' if self.ok else 'FAIL'} {self.name} ({self.count} cases)"
        return "\n".join([head] + [f"    {f}" for f in self.failures[:10]])


def _result(name, count, failures) -> CheckResult:
    return CheckResult(name, not failures, count, failures)


def d_squared(ring=None, nmax: int = 4, rmax: int = 5) -> CheckResult:
    """``d o d = 0`` on full complexes up to ``nmax`` and quotient complexes up to ``rmax``."""
    ring = resolve_ring(ring)
    top = ring.top_degree
    count, failures = 0, []
    jobs = [("full", n) for n in range(2, nmax + 1)] + [("graded", r) for r in range(2, rmax + 1)]
    for mode, n in jobs:
        built = {}  # each map serves as second factor, then as first
        for p, q in sorted(bidegree_range(ring, n), key=lambda pq: (-pq[1], pq[0])):
            if q < 2:
                continue
            first = built.pop((p, q), None)
            if first is None:
                first = differential_matrix(ring, n, p, q, mode)
            second = differential_matrix(ring, n, p + top, q - 1, mode)
            built[(p + top, q - 1)] = second
            if first.rows == 0:
                continue
            count += 1
            if not second.matmul(first).is_zero():
                failures.append(f"{mode} n={n} (p,q)=({p},{q})")
    return _result("d o d = 0", count, failures)


def functoriality(ring=None, nmax: int = 4, mmax: int = 4, expect: bool = True) -> CheckResult:
    """``f_* d = d f_*`` on every basis monomial for every ``f: [n] -> [m]``.

    With ``expect=False`` the check passes when some map breaks the identity,
    which is what happens for rings with nonzero Euler characteristic.
    """
    ring = resolve_ring(ring)
    count, broken = 0, []
    bases = {n: [m for p, q in bidegree_range(ring, n) for m in build_basis(ring, n, p, q)]
             for n in range(1, nmax + 1)}
    for n in range(1, nmax + 1):
        images = {m: differential(ring, m) for m in bases[n]}
        for target in range(1, mmax + 1):
            for f in product(range(1, target + 1), repeat=n):
                count += 1
                for m in bases[n]:
                    lhs = apply_map(ring, f, images[m], target)
                    rhs = differential(ring, apply_map(ring, f, m, target))
                    if lhs != rhs:
                        broken.append(f"f={f} on {m.render(ring)}")
                        break
                if broken and not expect:
                    return _result("f_* d = d f_* fails somewhere", count, [])
    if expect:
        return _result("f_* d = d f_*", count, broken)
    return _result("f_* d = d f_* fails somewhere", count, ["no counterexample found"])


def basis_dimensions(ring=None, nmax: int = 5, rmax: int = 6) -> CheckResult:
    """Basis sizes against the labelled-partition count."""
    ring = resolve_ring(ring)
    count, failures = 0, []
    for n, full_support in [(n, False) for n in range(nmax + 1)] + [(r, True) for r in range(rmax + 1)]:
        for p, q in bidegree_range(ring, n):
            got = len(build_basis(ring, n, p, q, None, full_support))
            want = labelled_partition_dim(ring, n, p, q, full_support)
            count += 1
            if got != want:
                failures.append(f"n={n} (p,q)=({p},{q}) support={full_support}: {got} != {want}")
    return _result("basis size = labelled-partition count", count, failures)


def rank_oracle(ring=None, nmax: int = 4) -> CheckResult:
    """Modular consensus against exact rational ranks on every small matrix."""
    ring = resolve_ring(ring)
    count, failures = 0, []
    for mode in ("full", "graded"):
        for n in range(2, nmax + 1):
            for p, q in bidegree_range(ring, n):
                if q == 0:
                    continue
                for w in weights_for(ring, n, p, q):
                    M = differential_matrix(ring, n, p, q, mode, w)
                    if not M.entries or M.rows * M.cols > RATIONAL_GUARD:
                        continue
                    count += 1
                    cert = rank(M)
                    exact = rational_rank(M)
                    if not cert.agreed or cert.rank != exact:
                        failures.append(f"{mode} n={n} ({p},{q}) w={w}: {cert.rank} vs {exact}")
    return _result("modular rank = rational rank", count, failures)


def q_family(qmax: int = 6) -> CheckResult:
    failures = []
    for q in range(1, qmax + 1):
        total = sum(hook_dim(la) for la in enumerate_Q(2 * q))
        if total != double_factorial(2 * q - 1):
            failures.append(f"q={q}: {total}")
    return _result("sum over Q(2q) of dim V = (2q-1)!!", qmax, failures)


def strictness(engine: Engine, nmax: int = 4) -> CheckResult:
    count, failures = 0, []
    for n in range(2, nmax + 1):
        report = verify_strictness(engine.ring, n, engine)
        count += len(report.checked)
        if not report.ok:
            failures.append(str(report))
    return _result("sum_i a_i binom(n, i) = dim H (strictness)", count, failures)


def oyster_bounds(engine: Engine, rmax: int = 5) -> CheckResult:
    """``oyster_lower_bound(p, q) <= a_{p+2q}^{p,q}`` wherever the right side is computed."""
    count, failures = 0, []
    tables = {}
    for q in range(1, rmax):
        for p in range(0, rmax - 2 * q + 1):
            r = p + 2 * q
            if r not in tables:
                tables[r] = graded_coefficients(engine.ring, r, engine)
            bound, _ = oyster_lower_bound(p, q)
            count += 1
            if bound > tables[r][p, q]:
                failures.append(f"(p,q)=({p},{q}): bound {bound} > a = {tables[r][p, q]}")
    return _result("oyster bound <= a_{p+2q}", count, failures)


def cache_audit(engine: Engine, nmax: int) -> CheckResult:
    """Recompute every cached piece with ``n <= nmax`` from scratch and compare."""
    fresh = Engine(engine.ring, engine.primes)
    count, failures = 0, []
    for key, entry in sorted(engine._disk.items()):
        parts = key.split("|")
        if not key.startswith(engine.ring_key + "|"):
            continue
        fields = dict(part.split("=", 1) for part in parts[2:6])
        n, p, q = int(fields["n"]), int(fields["p"]), int(fields["q"])
        if n > nmax:
            continue
        w = None if fields["w"] == "*" else int(fields["w"])
        got = fresh.piece(parts[1], n, p, q, w)
        count += 1
        for name in ("dim", "rank_in", "rank_out"):
            if got[name] != entry[name]:
                failures.append(f"{key}: {name} cached {entry[name]}, recomputed {got[name]}")
    return _result("cache entries reproduce", count, failures)


LEVELS = {
    "quick": dict(n=4, r=5, fmap=3, basis_n=5, basis_r=6, rank_n=4),
    "full": dict(n=7, r=8, fmap=4, basis_n=7, basis_r=8, rank_n=4),
}


def run_suite(level: str = "quick", engine: Engine | None = None, echo=None) -> list[CheckResult]:
    """Run every invariant suite at the given level."""
    from .ring import genus_two_ring

    cfg = LEVELS[level]
    engine = engine or Engine()
    ring = engine.ring
    steps = [
        lambda: d_squared(ring, min(cfg["n"], 6), cfg["r"]),
        lambda: functoriality(ring, cfg["fmap"], cfg["fmap"]),
        lambda: functoriality(genus_two_ring(), 2, 2, expect=False),
        lambda: basis_dimensions(ring, cfg["basis_n"], cfg["basis_r"]),
        lambda: rank_oracle(ring, cfg["rank_n"]),
        lambda: q_family(6),
        lambda: strictness(engine, cfg["n"]),
        lambda: oyster_bounds(engine, cfg["r"]),
        lambda: cache_audit(engine, cfg["n"]),
    ]
    results = []
    for step in steps:
        res = step()
        results.append(res)
        if echo:
            echo(str(res))
    return results
