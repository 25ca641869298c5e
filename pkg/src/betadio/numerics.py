"""Certified arbitrary-precision real arithmetic.

Values are intervals with dyadic endpoints (``man * 2**exp`` with integer
``man``, ``exp``), every operation rounds outward, so the interval always
contains the exact real result.  Dyadic endpoints make bisection halving
exact, which is what the root-isolation code below relies on.

Irrational expansion bases are represented as isolated roots of
``1 = sum c_i z**-i`` (finite sum, or with an eventually periodic tail).
The left-hand side is strictly increasing in ``z`` on ``(1, oo)`` whenever
the coefficients are nonnegative and not all zero, so a sign change brackets
a unique root and bisection with exact rational sign evaluations certifies it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import DegenerateApproximant, NoRoot, PrecisionExhausted

DEFAULT_PRECISION = 256

# ---------------------------------------------------------------------------
# dyadic endpoints


def _norm(man: int, exp: int) -> tuple[int, int]:
    if man == 0:
        return 0, 0
    while man % 2 == 0:
        man //= 2
        exp += 1
    return man, exp


@dataclass(frozen=True)
class Dyadic:
    """Exact dyadic rational ``man * 2**exp``, kept in normal form."""

    man: int
    exp: int

    @staticmethod
    def of(man: int, exp: int = 0) -> "Dyadic":
        return Dyadic(*_norm(man, exp))

    @property
    def value(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.man * (1 << self.exp))
        return Fraction(self.man, 1 << -self.exp)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = min(self.exp, other.exp)
        return Dyadic.of((self.man << (self.exp - e)) + (other.man << (other.exp - e)), e)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.man, self.exp)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic.of(self.man * other.man, self.exp + other.exp)

    def _cmp(self, other: "Dyadic") -> int:
        d = self - other
        return (d.man > 0) - (d.man < 0)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self):
        return f"Dyadic({self.man}*2^{self.exp})"


ZERO = Dyadic(0, 0)
ONE = Dyadic(1, 0)


def round_down(d: Dyadic, bits: int) -> Dyadic:
    """Largest dyadic with at most ``bits`` mantissa bits that is <= d."""
    a = abs(d.man)
    L = a.bit_length()
    if L <= bits:
        return d
    s = L - bits
    return Dyadic.of(d.man >> s, d.exp + s)


def round_up(d: Dyadic, bits: int) -> Dyadic:
    a = abs(d.man)
    L = a.bit_length()
    if L <= bits:
        return d
    s = L - bits
    return Dyadic.of(-((-d.man) >> s), d.exp + s)


def dyadic_from_fraction(x: Fraction, bits: int, up: bool) -> Dyadic:
    """Directed dyadic approximation of an arbitrary rational."""
    p, q = x.numerator, x.denominator
    if p == 0:
        return ZERO
    s = bits - (abs(p).bit_length() - q.bit_length()) + 1
    if s >= 0:
        num, den = p << s, q
    else:
        num, den = p, q << -s
    m = -((-num) // den) if up else num // den
    return Dyadic.of(m, -s)


# ---------------------------------------------------------------------------
# intervals


class Comparison(enum.Enum):
    LESS = -1
    UNRESOLVED = 0
    GREATER = 1


class Scalar:
    """Interval with dyadic endpoints; optionally refinable.

    A refiner is a callback ``bits -> Scalar`` recomputing the same real
    number from its defining expression (exact rational, isolated root, ...).
    Scalars produced by arithmetic have no refiner: recompute them from
    refined inputs instead.
    """

    __slots__ = ("lo", "hi", "prec", "_refiner")

    def __init__(self, lo: Dyadic, hi: Dyadic, prec: int = DEFAULT_PRECISION,
                 refiner: Optional[Callable[[int], "Scalar"]] = None):
        if lo > hi:
            raise ValueError("inverted interval")
        self.lo = lo
        self.hi = hi
        self.prec = prec
        self._refiner = refiner

    # -- constructors

    @staticmethod
    def exact(d: Dyadic, prec: int = DEFAULT_PRECISION) -> "Scalar":
        return Scalar(d, d, prec, refiner=lambda bits: Scalar.exact(d, bits))

    @staticmethod
    def from_int(n: int, prec: int = DEFAULT_PRECISION) -> "Scalar":
        return Scalar.exact(Dyadic.of(n), prec)

    @staticmethod
    def from_fraction(x: Fraction, prec: int = DEFAULT_PRECISION) -> "Scalar":
        x = Fraction(x)
        lo = dyadic_from_fraction(x, prec, up=False)
        hi = dyadic_from_fraction(x, prec, up=True)
        return Scalar(lo, hi, prec, refiner=lambda bits: Scalar.from_fraction(x, bits))

    @staticmethod
    def hull(lo: Fraction, hi: Fraction, prec: int = DEFAULT_PRECISION) -> "Scalar":
        return Scalar(dyadic_from_fraction(Fraction(lo), prec, up=False),
                      dyadic_from_fraction(Fraction(hi), prec, up=True), prec)

    # -- inspection

    @property
    def width(self) -> Fraction:
        return (self.hi - self.lo).value

    @property
    def slack_bits(self) -> int:
        """How far the actual width lags the declared precision.

        0 means the interval is as tight as ``prec`` promises; each
        arithmetic operation can add a little slack, and the caller decides
        when to recompute from refined inputs.
        """
        w = self.width
        if w == 0:
            return 0
        width_bits = w.denominator.bit_length() - w.numerator.bit_length()
        return max(0, self.prec - width_bits)

    @property
    def mid(self) -> Fraction:
        return (self.lo.value + self.hi.value) / 2

    def contains(self, x: Fraction) -> bool:
        return self.lo.value <= x <= self.hi.value

    def __repr__(self):
        return f"Scalar[{float(self.lo.value)}, {float(self.hi.value)}]"

    # -- arithmetic (outward rounding at the weaker operand precision)

    def _bits(self, other: "Scalar") -> int:
        return min(self.prec, other.prec)

    def __add__(self, other: "Scalar") -> "Scalar":
        b = self._bits(other)
        return Scalar(round_down(self.lo + other.lo, b), round_up(self.hi + other.hi, b), b)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.hi, -self.lo, self.prec)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __mul__(self, other: "Scalar") -> "Scalar":
        b = self._bits(other)
        prods = [self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi]
        return Scalar(round_down(min(prods), b), round_up(max(prods), b), b)

    def scale_int(self, k: int) -> "Scalar":
        d = Dyadic.of(k)
        if k >= 0:
            return Scalar(round_down(self.lo * d, self.prec), round_up(self.hi * d, self.prec), self.prec)
        return Scalar(round_down(self.hi * d, self.prec), round_up(self.lo * d, self.prec), self.prec)

    def reciprocal(self) -> "Scalar":
        if self.lo.man <= 0 <= self.hi.man:
            raise ZeroDivisionError("interval contains zero")
        lo = dyadic_from_fraction(1 / self.hi.value, self.prec, up=False)
        hi = dyadic_from_fraction(1 / self.lo.value, self.prec, up=True)
        return Scalar(lo, hi, self.prec)

    def __truediv__(self, other: "Scalar") -> "Scalar":
        return self * other.reciprocal()

    def pow_int(self, n: int) -> "Scalar":
        if n < 0:
            return self.pow_int(-n).reciprocal()
        result = Scalar.exact(ONE, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- certified queries

    def compare(self, threshold: Fraction) -> Comparison:
        t = Fraction(threshold)
        if self.hi.value < t:
            return Comparison.LESS
        if self.lo.value > t:
            return Comparison.GREATER
        return Comparison.UNRESOLVED

    def floor_certified(self) -> Optional[int]:
        """The common integer part of every point in the interval, if any."""
        flo = self.lo.value.numerator // self.lo.value.denominator
        fhi = self.hi.value.numerator // self.hi.value.denominator
        return flo if flo == fhi else None

    def refine(self, target_bits: int) -> "Scalar":
        if self.width <= Fraction(1, 1 << target_bits):
            return self
        if self._refiner is None:
            raise PrecisionExhausted(
                f"interval of width {float(self.width):.3e} has no defining expression")
        out = self._refiner(target_bits + 2)
        if out.width > Fraction(1, 1 << target_bits):
            raise PrecisionExhausted("refiner could not reach the requested width")
        return out


def compare_with_certification(x: Scalar, threshold: Fraction) -> Comparison:
    return x.compare(threshold)


def refine(x: Scalar, target_bits: int) -> Scalar:
    if target_bits < 1:
        raise ValueError("target_bits must be >= 1")
    return x.refine(target_bits)


# ---------------------------------------------------------------------------
# certified logarithm
#
# ln is the one transcendental the dimension reports need (log-measure over
# log-length ratios).  Argument reduction x = m * 2**s with m in [1, 2),
# then ln m = 2 atanh((m-1)/(m+1)) summed with directed rounding and an
# explicit geometric tail bound; ln 2 = 2 atanh(1/3) the same way.

_LN2_CACHE: dict[int, tuple[Dyadic, Dyadic]] = {}


def _atanh_bounds(z: Fraction, bits: int) -> tuple[Dyadic, Dyadic]:
    """Directed bounds for atanh(z), 0 <= z <= 1/2."""
    if z == 0:
        return ZERO, ZERO
    work = bits + 16
    z_dn = dyadic_from_fraction(z, work, up=False)
    z_up = dyadic_from_fraction(z, work, up=True)
    z2_dn = round_down(z_dn * z_dn, work)
    z2_up = round_up(z_up * z_up, work)
    # enough terms that z**(2J+1) < 2**-(bits+8); z <= 1/2 so each term
    # gains at least 2 bits
    J = bits // 2 + 8
    lo = ZERO
    hi = ZERO
    p_dn, p_up = z_dn, z_up
    for j in range(J):
        k = 2 * j + 1
        lo = round_down(lo + dyadic_from_fraction(p_dn.value / k, work, up=False), work)
        hi = round_up(hi + dyadic_from_fraction(p_up.value / k, work, up=True), work)
        p_dn = round_down(p_dn * z2_dn, work)
        p_up = round_up(p_up * z2_up, work)
    # tail: sum_{j>=J} z^(2j+1)/(2j+1) <= z^(2J+1) / ((2J+1)(1-z^2))
    tail = p_up.value / ((2 * J + 1) * (1 - Fraction(9, 16)))
    hi = round_up(hi + dyadic_from_fraction(tail, work, up=True), work)
    return lo, hi


def _ln2(bits: int) -> tuple[Dyadic, Dyadic]:
    if bits not in _LN2_CACHE:
        lo, hi = _atanh_bounds(Fraction(1, 3), bits)
        _LN2_CACHE[bits] = (round_down(lo + lo, bits + 16), round_up(hi + hi, bits + 16))
    return _LN2_CACHE[bits]


def _ln_directed(d: Dyadic, bits: int, up: bool) -> Dyadic:
    if d.man <= 0:
        raise ValueError("log of non-positive endpoint")
    work = bits + 16
    d = round_up(d, work) if up else round_down(d, work)
    L = d.man.bit_length()
    s = d.exp + L - 1  # d = m * 2**s with m in [1, 2)
    m = Fraction(d.man, 1 << (L - 1))
    z = (m - 1) / (m + 1)
    at_lo, at_hi = _atanh_bounds(z, bits)
    ln2_lo, ln2_hi = _ln2(bits)
    if up:
        ln_m = round_up(at_hi + at_hi, work)
        ln2 = ln2_hi if s >= 0 else ln2_lo
    else:
        ln_m = round_down(at_lo + at_lo, work)
        ln2 = ln2_lo if s >= 0 else ln2_hi
    scaled = Dyadic.of(s) * ln2
    out = ln_m + scaled
    return round_up(out, work) if up else round_down(out, work)


def ln(x: Scalar, bits: Optional[int] = None) -> Scalar:
    """Certified natural log of a positive interval."""
    b = bits or x.prec
    if x.lo.man <= 0:
        raise ValueError("ln requires a strictly positive interval")
    return Scalar(_ln_directed(x.lo, b, up=False), _ln_directed(x.hi, b, up=True), b)


def ln_int(n: int, bits: int = DEFAULT_PRECISION) -> Scalar:
    """Certified ln of a (possibly huge) positive integer."""
    if n <= 0:
        raise ValueError("ln_int requires n >= 1")
    return Scalar(_ln_directed(Dyadic.of(n), bits, up=False),
                  _ln_directed(Dyadic.of(n), bits, up=True), bits)


# ---------------------------------------------------------------------------
# polynomials over Q (ascending coefficient lists)


def poly_trim(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_eval(c: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def poly_sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] -= v
    return poly_trim(out)


def poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                out[i + j] += u * v
    return poly_trim(out)


def poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    b = poly_trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q = [Fraction(0)] * max(0, len(r) - len(b) + 1)
    while len(poly_trim(r)) >= len(b):
        r = poly_trim(r)
        k = len(r) - len(b)
        f = r[-1] / b[-1]
        q[k] = f
        for i, v in enumerate(b):
            r[i + k] -= f * v
    return poly_trim(q), poly_trim(r)


def poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a, b = poly_trim(list(a)), poly_trim(list(b))
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [v / lead for v in a]
    return a


# ---------------------------------------------------------------------------
# root isolation for expansion equations


def _tail_value(pre: Sequence[Fraction], per: Sequence[Fraction], z: Fraction) -> Fraction:
    """sum_i pre_i z^-i + z^-|pre| * (sum_j per_j z^-j) / (1 - z^-|per|), z > 1."""
    zi = 1 / z
    acc = Fraction(0)
    p = zi
    for c in pre:
        acc += c * p
        p *= zi
    if per:
        geo = Fraction(0)
        q = zi
        for c in per:
            geo += c * q
            q *= zi
        acc += (zi ** len(pre)) * geo / (1 - zi ** len(per))
    return acc


def _cleared_polynomial(pre: Sequence[Fraction], per: Sequence[Fraction]) -> list[Fraction]:
    """Integer-scalable polynomial whose roots include the expansion base.

    Finite case: z^p - sum c_i z^(p-i).  Periodic tail of length q:
    (z^p - sum pre_i z^(p-i)) (z^q - 1) - sum per_j z^(q-j), both ascending.
    """
    p = len(pre)
    head = [Fraction(0)] * (p + 1)
    head[p] = Fraction(1)
    for i, c in enumerate(pre, start=1):
        head[p - i] -= c
    head = poly_trim(head)
    if not per:
        return head
    q = len(per)
    zq1 = [Fraction(-1)] + [Fraction(0)] * (q - 1) + [Fraction(1)]
    tail = [Fraction(0)] * q
    for j, c in enumerate(per, start=1):
        tail[q - j] += c
    return poly_sub(poly_mul(head, zq1), poly_trim(tail))


class PolyRoot:
    """The unique root > 1 of ``1 = sum c_i z**-i`` (optionally periodic tail).

    Holds the exact defining data, a rational bracket with a sign change,
    and a refined interval.  ``refine`` bisects with exact sign evaluations,
    halving the dyadic bracket each step.
    """

    __slots__ = ("pre", "per", "poly", "int_poly", "lo", "hi", "refined")

    def __init__(self, pre: Sequence[Fraction], per: Sequence[Fraction],
                 lo: Fraction, hi: Fraction, precision: int = DEFAULT_PRECISION):
        self.pre = tuple(Fraction(c) for c in pre)
        self.per = tuple(Fraction(c) for c in per)
        self.poly = _cleared_polynomial(self.pre, self.per)
        scale = math.lcm(*(c.denominator for c in self.poly)) if self.poly else 1
        self.int_poly = [int(c * scale) for c in self.poly]
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        self.refined = self.refine(precision)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self.pre if not self.per else tuple(self.poly)

    def _f(self, z: Fraction) -> Fraction:
        return 1 - _tail_value(self.pre, self.per, z)

    def _sign_at(self, z: Fraction) -> int:
        """Sign of the value-equation defect at z > 1.

        Uses the cleared integer polynomial: its extra factors z**m and
        (z**q - 1) are positive beyond 1, so the sign agrees with ``_f``,
        and integer Horner is much cheaper than rational arithmetic for
        high-degree words.
        """
        num, den = z.numerator, z.denominator
        acc, dp = 0, 1
        for c in reversed(self.int_poly):
            acc = acc * num + c * dp
            dp *= den
        return (acc > 0) - (acc < 0)

    def refine(self, target_bits: int) -> Scalar:
        lo, hi = self.lo, self.hi
        goal = Fraction(1, 1 << target_bits)
        while hi - lo > goal:
            mid = (lo + hi) / 2
            if self._sign_at(mid) >= 0:
                hi = mid
            else:
                lo = mid
        self.lo, self.hi = lo, hi
        out = Scalar(dyadic_from_fraction(lo, target_bits + 8, up=False),
                     dyadic_from_fraction(hi, target_bits + 8, up=True),
                     target_bits, refiner=self.refine)
        return out

    def as_scalar(self, bits: int = DEFAULT_PRECISION) -> Scalar:
        if self.refined.width <= Fraction(1, 1 << bits):
            return self.refined
        self.refined = self.refine(bits)
        return self.refined

    def exact_equals(self, x: Fraction) -> bool:
        return self._f(Fraction(x)) == 0

    def __repr__(self):
        return f"PolyRoot(~{float(self.refined.mid):.12f})"


def isolate_root(coefficients: Sequence[Fraction], search: tuple[Fraction, Fraction] = None,
                 precision: int = DEFAULT_PRECISION, periodic_tail: Sequence[Fraction] = ()) -> PolyRoot:
    """Bracket and certify the root > 1 of ``1 = sum c_i z**-i``.

    Raises NoRoot when the value function does not cross 1 on the search
    interval, DegenerateApproximant when the crossing is at z <= 1.
    """
    pre = [Fraction(c) for c in coefficients]
    per = [Fraction(c) for c in periodic_tail]
    if any(c < 0 for c in pre + per):
        raise ValueError("expansion coefficients must be nonnegative")
    if not any(pre) and not any(per):
        raise NoRoot("all coefficients vanish")
    if per and any(per):
        # value function has a pole at 1+, root > 1 always exists
        top = max(max(pre, default=Fraction(0)), max(per))
        lo, hi = Fraction(1), top + 2
    else:
        total = sum(pre)
        if total <= 1:
            raise DegenerateApproximant(
                f"coefficient sum {total} <= 1 forces the root to z <= 1")
        lo, hi = Fraction(1), total + 1
    def f(z: Fraction) -> Fraction:
        return 1 - _tail_value(pre, per, z)

    if search is not None:
        slo, shi = Fraction(search[0]), Fraction(search[1])
        if shi <= 1:
            raise DegenerateApproximant("search interval lies at or below 1")
        if f(shi) < 0:
            raise NoRoot("value function stays above 1 on the search interval")
        if slo > 1 and f(slo) > 0:
            raise NoRoot("value function is already below 1 at the left end")
        lo, hi = max(lo, slo), min(hi, shi)
    return PolyRoot(pre, per, lo, hi, precision)


def is_exact_root(poly: Sequence[Fraction], root: PolyRoot, max_bits: int = 4096) -> bool:
    """Decide exactly whether the certified root annihilates ``poly``.

    gcd of ``poly`` with the root's defining polynomial either has no root in
    the bracket (value provably nonzero) or has the bracketed root as a simple
    root (sign change appears under refinement).
    """
    c = poly_trim(list(Fraction(v) for v in poly))
    if not c:
        return True
    g = poly_gcd(c, root.poly)
    if len(g) <= 1:
        return False
    bits = root.refined.prec
    while True:
        s = root.as_scalar(bits)
        glo = poly_eval(g, s.lo.value)
        ghi = poly_eval(g, s.hi.value)
        if glo == 0 or ghi == 0:
            # endpoint hit: nudge by refining further, dyadic endpoints are
            # never the algebraic root itself unless the root is rational
            if root.exact_equals(s.lo.value) or root.exact_equals(s.hi.value):
                return True
        if glo * ghi < 0:
            return True
        # no sign change; the value is nonzero once the interval evaluation
        # of poly excludes zero
        val = _interval_poly_eval(c, s)
        if not (val.lo.value <= 0 <= val.hi.value):
            return False
        bits *= 2
        if bits > max_bits:
            raise PrecisionExhausted("exact-zero test did not resolve")


def _interval_poly_eval(c: Sequence[Fraction], x: Scalar) -> Scalar:
    acc = Scalar.from_fraction(Fraction(0), x.prec)
    for coef in reversed(c):
        acc = acc * x + Scalar.from_fraction(Fraction(coef), x.prec)
    return acc
