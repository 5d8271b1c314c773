"""Integer-valued polynomials in the binomial basis ``{C(n, i)}``."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class BinomialPolynomial:
    """``P(n) = sum_i coeffs[i] * C(n, i)``."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {int(i): int(c) for i, c in self.coeffs.items() if c})

    def __call__(self, n: int) -> int:
        return sum(c * comb(n, i) for i, c in self.coeffs.items())

    def __getitem__(self, i: int) -> int:
        return self.coeffs.get(i, 0)

    def __add__(self, other: "BinomialPolynomial") -> "BinomialPolynomial":
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return BinomialPolynomial(out)

    def __eq__(self, other):
        if isinstance(other, dict):
            other = BinomialPolynomial(other)
        if not isinstance(other, BinomialPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def leading(self) -> tuple[int, int]:
        d = self.degree
        return d, self.coeffs.get(d, 0)

    def __str__(self):
        if not self.coeffs:
            return "0"
        words = []
        for i in sorted(self.coeffs, reverse=True):
            c = self.coeffs[i]
            if i == 0:
                body = str(abs(c))
            else:
                base = "n" if i == 1 else f"C(n,{i})"
                body = base if abs(c) == 1 else f"{abs(c)}·{base}"
            if not words:
                words.append(("-" if c < 0 else "") + body)
            else:
                words.append(("-" if c < 0 else "+") + body)
        return "".join(words)


def fit_binomial(values: dict, max_degree: int) -> BinomialPolynomial:
    """Coefficients from forward differences at 0; all values must be reproduced."""
    missing = [n for n in range(max_degree + 1) if n not in values]
    if missing:
        raise FitError(f"values needed at n = {missing}")
    coeffs = {}
    for i in range(max_degree + 1):
        coeffs[i] = sum((-1) ** (i - j) * comb(i, j) * values[j] for j in range(i + 1))
    poly = BinomialPolynomial(coeffs)
    residual = {n: v - poly(n) for n, v in values.items() if v != poly(n)}
    if residual:
        raise FitError(f"values inconsistent with degree <= {max_degree}; residual {residual}")
    return poly
