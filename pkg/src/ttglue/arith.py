"""Number-theoretic predicates behind the worked examples."""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering


def powers_up_to(d: int, p: int) -> list[int]:
    out, q = [], 1
    while q <= d:
        out.append(q)
        q *= p
    return out


def p_power_partition_exists(d: int, length: int, p: int) -> bool:
    """Can ``d`` be written as a sum of exactly ``length`` powers of ``p`` (1 included)?

    Dynamic programming over (remaining sum, remaining parts).
    """
    if d < 1 or length < 1:
        raise ValueError("d and length must be >= 1")
    if p < 2:
        raise ValueError("p must be a prime")
    parts = powers_up_to(d, p)
    # reach[k] = set of sums achievable with exactly k parts
    reach = [{0}]
    for _ in range(length):
        reach.append({s + q for s in reach[-1] for q in parts if s + q <= d})
    return d in reach[length]


def excisive_tate_layers(d: int, p: int) -> set[int]:
    """Layers l with d > l admitting a p-power partition of d of length l."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return {l for l in range(1, d) if p_power_partition_exists(d, l, p)}


@total_ordering
@dataclass(frozen=True)
class LexValue:
    """An element of Z^2 under the lexicographic order."""

    a: int
    b: int

    def __lt__(self, other: "LexValue") -> bool:
        return (self.a, self.b) < (other.a, other.b)

    def __add__(self, other: "LexValue") -> "LexValue":
        return LexValue(self.a + other.a, self.b + other.b)

    def __mul__(self, n: int) -> "LexValue":
        return LexValue(n * self.a, n * self.b)

    __rmul__ = __mul__

    def is_nonnegative(self) -> bool:
        return self >= ZERO


ZERO = LexValue(0, 0)


def lex_divides_all_powers(a: LexValue, b: LexValue) -> bool:
    """Whether n*a <= b for every n >= 1 (valuation of a^n at most that of b).

    Closed form: the first coordinate of ``a`` must vanish, and either ``a``
    is zero or ``b`` has positive first coordinate.
    """
    if not (a.is_nonnegative() and b.is_nonnegative()):
        raise ValueError("values must be >= (0, 0)")
    return a.a == 0 and (a.b == 0 or b.a >= 1)


@dataclass(frozen=True)
class ValuationPrime:
    """A prime of the rank-two valuation domain, as a membership test on valuations.

    ``None`` stands for the valuation of 0.
    """

    name: str

    def contains(self, value: LexValue | None) -> bool:
        if value is None:
            return True
        if self.name == "0":
            return False
        if self.name == "p":
            return value.a > 0
        if self.name == "m":
            return value > ZERO
        raise ValueError(f"unknown prime {self.name!r}")


VALUATION_PRIMES = (ValuationPrime("0"), ValuationPrime("p"), ValuationPrime("m"))


def vanishing_locus(value: LexValue) -> frozenset[str]:
    """V(b): the primes of the valuation domain containing an element of valuation ``value``."""
    return frozenset(P.name for P in VALUATION_PRIMES if P.contains(value))

