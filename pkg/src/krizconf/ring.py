"""Finite graded-commutative cohomology rings with Poincare duality.

A :class:`RingPresentation` stores a graded basis, a multiplication table with
exact rational structure constants, the unit and the fundamental class.  The
constructor checks the ring axioms, so every instance in circulation is valid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path


class RingError(ValueError):
    """Raised when a ring presentation violates one of the ring axioms."""


def _parse_coefficient(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


@dataclass(frozen=True)
class RingPresentation:
    names: tuple[str, ...]
    degrees: tuple[int, ...]
    unit: int
    fundamental: int
    mult: dict = field(repr=False)
    weights: tuple[int, ...] | None = None
    ring_id: str = "custom"

    def __post_init__(self):
        table = {}
        for (i, j), out in self.mult.items():
            clean = {k: Fraction(c) for k, c in dict(out).items() if c != 0}
            if clean:
                table[(i, j)] = clean
        object.__setattr__(self, "mult", table)
        _validate(self)

    def __len__(self):
        return len(self.names)

    def __hash__(self):
        return hash((self.ring_id, self.names, self.degrees))

    @property
    def top_degree(self) -> int:
        return self.degrees[self.fundamental]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown basis element {name!r}") from None

    def product(self, i: int, j: int) -> dict[int, Fraction]:
        """Product of basis elements ``b_i * b_j`` as ``{k: coefficient}``."""
        if i == self.unit:
            return {j: Fraction(1)}
        if j == self.unit:
            return {i: Fraction(1)}
        return self.mult.get((i, j), {})

    def multiply(self, u: dict, v: dict) -> dict[int, Fraction]:
        """Product of two ring elements given as ``{basis index: coefficient}``."""
        out: dict[int, Fraction] = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.product(i, j).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c != 0}

    def pairing(self, i: int, j: int) -> Fraction:
        return self.product(i, j).get(self.fundamental, Fraction(0))

    def hilbert(self) -> list[int]:
        h = [0] * (self.top_degree + 1)
        for d in self.degrees:
            h[d] += 1
        return h

    def dual_basis(self) -> list[dict[int, Fraction]]:
        """``b_j^*`` for each ``j``, characterised by ``<b_i, b_j^*> = delta_ij``."""
        return _dual_basis(self)

    def to_document(self) -> dict:
        basis = []
        for k, (name, deg) in enumerate(zip(self.names, self.degrees)):
            entry = {"name": name, "degree": deg}
            if self.weights is not None:
                entry["weight"] = self.weights[k]
            basis.append(entry)
        mult = []
        for (i, j), out in sorted(self.mult.items()):
            mult.append({
                "l": self.names[i],
                "r": self.names[j],
                "out": [[self.names[k], str(c)] for k, c in sorted(out.items())],
            })
        return {
            "basis": basis,
            "unit": self.names[self.unit],
            "fundamental": self.names[self.fundamental],
            "mult": mult,
        }


def _validate(ring: RingPresentation):
    k = len(ring.names)
    if len(ring.degrees) != k or len(set(ring.names)) != k:
        raise RingError("basis names must be distinct and carry one degree each")
    if any(d < 0 for d in ring.degrees):
        raise RingError("degrees must be nonnegative")
    if ring.degrees[ring.unit] != 0:
        raise RingError("the unit must have degree 0")
    if ring.weights is not None and len(ring.weights) != k:
        raise RingError("one weight per basis element is required")
    for (i, j), out in ring.mult.items():
        if not (0 <= i < k and 0 <= j < k):
            raise RingError(f"product table refers to unknown index {(i, j)}")
        for t in out:
            if ring.degrees[t] != ring.degrees[i] + ring.degrees[j]:
                raise RingError(
                    f"not graded: {ring.names[i]}*{ring.names[j]} has a term outside degree "
                    f"{ring.degrees[i] + ring.degrees[j]}"
                )
            if ring.weights is not None and ring.weights[t] != ring.weights[i] + ring.weights[j]:
                raise RingError(f"product {ring.names[i]}*{ring.names[j]} does not preserve weight")
        if i == ring.unit or j == ring.unit:
            expect = {j if i == ring.unit else i: Fraction(1)}
            if out != expect:
                raise RingError("the unit is not neutral")

    for i in range(k):
        for j in range(k):
            sign = -1 if ring.degrees[i] * ring.degrees[j] % 2 else 1
            left = ring.product(i, j)
            right = {t: sign * c for t, c in ring.product(j, i).items()}
            if left != right:
                raise RingError(
                    f"not graded-commutative in degree {ring.degrees[i] + ring.degrees[j]}: "
                    f"{ring.names[i]}*{ring.names[j]}"
                )

    for i, j, t in product(range(k), repeat=3):
        lhs = ring.multiply(ring.product(i, j), {t: Fraction(1)})
        rhs = ring.multiply({i: Fraction(1)}, ring.product(j, t))
        if lhs != rhs:
            raise RingError(
                f"not associative in degree {ring.degrees[i] + ring.degrees[j] + ring.degrees[t]}: "
                f"({ring.names[i]}, {ring.names[j]}, {ring.names[t]})"
            )

    top = max(ring.degrees)
    tops = [i for i in range(k) if ring.degrees[i] == top]
    if tops != [ring.fundamental]:
        raise RingError(f"wrong top dimension: degree {top} has {len(tops)} basis elements")
    _dual_basis(ring)


def _invert(matrix: list[list[Fraction]]) -> list[list[Fraction]] | None:
    size = len(matrix)
    aug = [row[:] + [Fraction(int(r == c)) for c in range(size)] for r, row in enumerate(matrix)]
    for col in range(size):
        piv = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        scale = aug[col][col]
        aug[col] = [x / scale for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


def _dual_basis(ring: RingPresentation) -> list[dict[int, Fraction]]:
    # the pairing is block anti-diagonal: degree d pairs only with top - d
    top = ring.top_degree
    by_degree: dict[int, list[int]] = {}
    for i, d in enumerate(ring.degrees):
        by_degree.setdefault(d, []).append(i)
    duals: list[dict[int, Fraction]] = [{} for _ in ring.names]
    for d, rows in by_degree.items():
        cols = by_degree.get(top - d, [])
        if len(cols) != len(rows):
            raise RingError(f"degenerate pairing between degrees {d} and {top - d}")
        gram = [[ring.pairing(i, j) for j in cols] for i in rows]
        inv = _invert(gram)
        if inv is None:
            raise RingError(f"degenerate pairing between degrees {d} and {top - d}")
        # <b_i, sum_t c_t b_{cols[t]}> = delta  =>  c = column of gram^{-1}
        for a, i in enumerate(rows):
            duals[i] = {cols[t]: inv[t][a] for t in range(len(cols)) if inv[t][a] != 0}
    return duals


@dataclass(frozen=True)
class DiagonalClass:
    """Class of the diagonal as ``sum coeff * b_left (x) b_right``."""

    terms: tuple[tuple[int, int, Fraction], ...]
    graded_terms: tuple[tuple[int, int, Fraction], ...]


def diagonal(ring: RingPresentation) -> DiagonalClass:
    terms = []
    duals = ring.dual_basis()
    for j, dual in enumerate(duals):
        sign = -1 if (ring.top_degree - ring.degrees[j]) % 2 else 1
        for t, c in sorted(dual.items()):
            terms.append((j, t, sign * c))
    outer = {ring.unit, ring.fundamental}
    graded = tuple(t for t in terms if t[0] not in outer and t[1] not in outer)
    return DiagonalClass(tuple(terms), graded)


def euler_characteristic(ring: RingPresentation) -> int:
    return sum(-1 if d % 2 else 1 for d in ring.degrees)


def elliptic_curve_ring() -> RingPresentation:
    """Cohomology of an elliptic curve: the exterior algebra on ``x`` and ``y``.

    Torus weights are ``x -> +1`` and ``y -> -1``.
    """
    one, x, y, xy = range(4)
    mult = {
        (x, y): {xy: 1},
        (y, x): {xy: -1},
    }
    return RingPresentation(
        names=("1", "x", "y", "xy"),
        degrees=(0, 1, 1, 2),
        unit=one,
        fundamental=xy,
        mult=mult,
        weights=(0, 1, -1, 0),
        ring_id="elliptic",
    )


def point_ring() -> RingPresentation:
    return RingPresentation(("1",), (0,), 0, 0, {}, weights=(0,), ring_id="point")


def genus_two_ring() -> RingPresentation:
    """Cohomology of a closed genus-2 surface (Euler characteristic -2)."""
    names = ("1", "a1", "b1", "a2", "b2", "w")
    one, a1, b1, a2, b2, w = range(6)
    mult = {
        (a1, b1): {w: 1},
        (b1, a1): {w: -1},
        (a2, b2): {w: 1},
        (b2, a2): {w: -1},
    }
    return RingPresentation(names, (0, 1, 1, 1, 1, 2), one, w, mult, ring_id="genus2")


def load_ring(document) -> RingPresentation:
    """Build a ring from the JSON ring format (a dict, a JSON string or a path).

    Products implied by graded commutativity may be omitted from ``mult``.
    """
    if isinstance(document, Path) or (isinstance(document, str) and not document.lstrip().startswith("{")):
        document = json.loads(Path(document).read_text())
    elif isinstance(document, str):
        document = json.loads(document)

    try:
        basis = document["basis"]
        names = tuple(str(b["name"]) for b in basis)
        degrees = tuple(int(b["degree"]) for b in basis)
        weights = None
        if all("weight" in b for b in basis):
            weights = tuple(int(b["weight"]) for b in basis)
        index = {name: k for k, name in enumerate(names)}
        unit = index[document["unit"]]
        fundamental = index[document["fundamental"]]
        mult: dict = {}
        for entry in document.get("mult", []):
            i, j = index[entry["l"]], index[entry["r"]]
            out = {index[name]: _parse_coefficient(c) for name, c in entry["out"]}
            mult[(i, j)] = out
    except (KeyError, TypeError) as exc:
        raise RingError(f"malformed ring document: {exc}") from None

    for (i, j), out in list(mult.items()):
        if (j, i) not in mult:
            sign = -1 if degrees[i] * degrees[j] % 2 else 1
            mult[(j, i)] = {k: sign * c for k, c in out.items()}
    return RingPresentation(
        names, degrees, unit, fundamental, mult, weights=weights,
        ring_id=str(document.get("id", "custom")),
    )


def resolve_ring(spec) -> RingPresentation:
    if isinstance(spec, RingPresentation):
        return spec
    if spec in (None, "elliptic"):
        return elliptic_curve_ring()
    if spec == "point":
        return point_ring()
    if spec == "genus2":
        return genus_two_ring()
    return load_ring(spec)
