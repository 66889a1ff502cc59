"""Closed-form combinatorics in the rational representation ring of Z/p.

The ring in play has Z-basis the trivial class [Q] and the regular class
[Q[Z/p]], with [Q] the unit and [Q[Z/p]]^2 = p*[Q[Z/p]].  From exterior
power classes of the rank-(p-1) cyclotomic constituent one obtains the
fixed-rank counts r_m, the bounded-composition counts a_j and their
partial sums s_m, together with closed-form sum identities; every
computation is exact rational arithmetic and any residual denominator is
a hard error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class RepClass:
    """q_coeff*[Q] + reg_coeff*[Q[Z/p]], coefficients exact rationals."""

    p: int
    q_coeff: Fraction
    reg_coeff: Fraction

    @classmethod
    def zero(cls, p: int) -> "RepClass":
        return cls(p, Fraction(0), Fraction(0))

    @classmethod
    def unit(cls, p: int) -> "RepClass":
        return cls(p, Fraction(1), Fraction(0))

    @classmethod
    def regular(cls, p: int) -> "RepClass":
        return cls(p, Fraction(0), Fraction(1))

    def __add__(self, other: "RepClass") -> "RepClass":
        self._check(other)
        return RepClass(self.p, self.q_coeff + other.q_coeff,
                        self.reg_coeff + other.reg_coeff)

    def __sub__(self, other: "RepClass") -> "RepClass":
        self._check(other)
        return RepClass(self.p, self.q_coeff - other.q_coeff,
                        self.reg_coeff - other.reg_coeff)

    def __mul__(self, other: "RepClass") -> "RepClass":
        self._check(other)
        a, b = self.q_coeff, self.reg_coeff
        c, d = other.q_coeff, other.reg_coeff
        # [Q] is the unit, [Q[Z/p]]^2 = p*[Q[Z/p]]
        return RepClass(self.p, a * c, a * d + b * c + b * d * self.p)

    def scale(self, r) -> "RepClass":
        r = Fraction(r)
        return RepClass(self.p, self.q_coeff * r, self.reg_coeff * r)

    def _check(self, other: "RepClass") -> None:
        if self.p != other.p:
            raise ValueError("mixed primes in representation-ring arithmetic")

    def fixed_rank(self) -> int:
        """Rank of the fixed subspace: sends [Q] and [Q[Z/p]] both to 1."""
        val = self.q_coeff + self.reg_coeff
        if val.denominator != 1 or val < 0:
            raise ArithmeticError(
                f"fixed rank {val} is not a nonnegative integer; "
                "cancellation of 1/p factors failed")
        return int(val)

    def dimension(self) -> Fraction:
        return self.q_coeff + self.p * self.reg_coeff

    def is_representation(self) -> bool:
        """Whether the class can arise from an actual representation."""
        a = self.q_coeff
        b = a + (self.p - 1) * self.reg_coeff
        return (a.denominator == 1 and b.denominator == 1
                and a >= 0 and b >= 0)


def lambda_class(p: int, l: int) -> RepClass:
    """Class of the l-th exterior power of the cyclotomic constituent.

    Equals (-1)^l [Q] + (1/p)(C(p-1, l) - (-1)^l) [Q[Z/p]] for
    0 <= l <= p-1 and the zero class for l >= p.
    """
    if l < 0:
        raise ValueError("negative exterior degree")
    if l >= p:
        return RepClass.zero(p)
    sign = -1 if l % 2 else 1
    reg = Fraction(comb(p - 1, l) - sign, p)
    if reg.denominator != 1:
        raise ArithmeticError("binomial congruence C(p-1,l) = (-1)^l mod p failed")
    return RepClass(p, Fraction(sign), reg)


def lambda_class_total(p: int, k: int, m: int) -> RepClass:
    """Class of the m-th exterior power of k cyclotomic constituents.

    Convolution over bounded compositions of m into k parts in [0, p-1].
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if m < 0:
        raise ValueError("negative exterior degree")
    singles = [lambda_class(p, l) for l in range(p)]
    # classes_j = class of Lambda^j of the first i constituents
    classes = [RepClass.unit(p)] + [RepClass.zero(p)] * m
    for _ in range(k):
        nxt = [RepClass.zero(p)] * (m + 1)
        for j in range(m + 1):
            for l in range(min(j, p - 1) + 1):
                nxt[j] = nxt[j] + classes[j - l] * singles[l]
        classes = nxt
    return classes[m]


def r_m(p: int, k: int, m: int) -> int:
    """Fixed rank of the m-th exterior power of the rank-k(p-1) module."""
    return lambda_class_total(p, k, m).fixed_rank()


def r_vector(p: int, k: int) -> tuple[int, ...]:
    """(r_0, ..., r_n) for n = k(p-1); r vanishes above n."""
    n = k * (p - 1)
    return tuple(r_m(p, k, m) for m in range(n + 1))


def a_j(p: int, k: int, j: int) -> int:
    """Number of compositions of j into k parts each within [0, p-1]."""
    if j < 0:
        return 0
    counts = [1] + [0] * j
    for _ in range(k):
        nxt = [0] * (j + 1)
        for t in range(j + 1):
            if counts[t]:
                for l in range(min(p - 1, j - t) + 1):
                    nxt[t + l] += counts[t]
        counts = nxt
    return counts[j]


def a_j_inclusion_exclusion(p: int, k: int, j: int) -> int:
    """Same count via inclusion-exclusion; cross-check for the DP."""
    if j < 0:
        return 0
    total = 0
    for i in range(k + 1):
        rest = j - i * p
        if rest < 0:
            break
        total += (-1) ** i * comb(k, i) * comb(rest + k - 1, k - 1)
    return total


def s_m(p: int, k: int, m: int) -> int:
    """Prefix sum s_m = a_0 + ... + a_{m-1}; stabilizes at p^k."""
    return sum(a_j(p, k, j) for j in range(m))


def r_sum_identities(p: int, k: int) -> dict[str, int]:
    """Closed-form totals of the r_m, each checked against direct summation.

    Returns sum_all, sum_even, sum_odd and the alternating sum.  A mismatch
    between a closed form and the direct sum is an internal consistency
    failure and raises.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    rv = r_vector(p, k)
    direct_all = sum(rv)
    direct_even = sum(rv[0::2])
    direct_odd = sum(rv[1::2])
    direct_alt = direct_even - direct_odd
    if p == 2:
        n = k
        closed_all = 2 ** (k - 1)
        closed_even = 2 ** (n - 1)
        closed_odd = 0
    else:
        base = 2 ** ((p - 1) * k)
        closed_all = (base - 1) // p + 1
        if (base - 1) % p:
            raise ArithmeticError("2^{(p-1)k} = 1 mod p failed")
        half = (base + p - 1) // (2 * p)
        if (base + p - 1) % (2 * p):
            raise ArithmeticError("even/odd split denominator did not cancel")
        closed_even = half + (p - 1) * p ** (k - 1) // 2
        closed_odd = half - (p - 1) * p ** (k - 1) // 2
    closed_alt = (p - 1) * p ** (k - 1)
    out = {"sum_all": closed_all, "sum_even": closed_even,
           "sum_odd": closed_odd, "alternating": closed_alt}
    direct = {"sum_all": direct_all, "sum_even": direct_even,
              "sum_odd": direct_odd, "alternating": direct_alt}
    if out != direct:
        raise ArithmeticError(f"sum identities failed: closed {out} vs direct {direct}")
    return out
