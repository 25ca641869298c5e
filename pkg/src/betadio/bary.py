"""Integer-base expansions, run structure, and approximation exponents.

The two exponents of interest measure how well ``b**n x`` approaches an
integer: the asymptotic exponent is governed by ``limsup (m_k - n_k)/n_k``
and the uniform exponent by ``liminf (m_k - n_k)/n_{k+1}``, where the
``(n_k, m_k)`` bracket maximal blocks of the digit 0 or the digit b-1 and
are thinned so the block lengths are non-decreasing.  Finite-horizon
surrogates of those limits are exact rationals computed here.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InsufficientDepth, InvalidDigitSet, NoRuns
from .words import DigitWord

ZEROS = "zeros"
TOP = "top"


# ---------------------------------------------------------------------------
# expansions


def expand_rational(p: int, q: int, b: int, n: int) -> DigitWord:
    """First n digits of p/q in base b by long division (greedy convention)."""
    if not (0 <= p < q):
        raise ValueError("need 0 <= p < q")
    if b < 2 or n < 1:
        raise ValueError("need b >= 2 and n >= 1")
    digits = []
    for _ in range(n):
        p *= b
        digits.append(p // q)
        p %= q
    return DigitWord(b, digits)


def lacunary_positions(rule, n: int) -> list[int]:
    """1-based positions of the nonzero digits up to depth n.

    ``rule`` is either a positive rational v (positions ``floor((1+v)**j)``)
    or the string ``"squared-power"`` (positions ``2**(j*j)``).
    """
    out = []
    if rule == "squared-power":
        j = 1
        while 2 ** (j * j) <= n:
            out.append(2 ** (j * j))
            j += 1
        return out
    v = Fraction(rule)
    if v <= 0:
        raise ValueError("lacunary exponent must be positive")
    power = 1 + v
    j = 1
    while True:
        pos = math.floor(power ** j)
        if pos > n:
            return out
        if not out or pos > out[-1]:
            out.append(pos)
        j += 1


def expand_lacunary(b: int, rule, n: int) -> DigitWord:
    """Digits of the lacunary series with 1s at the rule's positions."""
    if b < 2 or n < 1:
        raise ValueError("need b >= 2 and n >= 1")
    digits = bytearray(n)
    for pos in lacunary_positions(rule, n):
        digits[pos - 1] = 1
    return DigitWord.from_bytes(b, bytes(digits))


@dataclass(frozen=True)
class BaryExpansion:
    """A base-b digit sequence together with where it came from."""

    base: int
    digits: DigitWord
    source: str = "explicit"


# ---------------------------------------------------------------------------
# run decomposition


@dataclass(frozen=True)
class Run:
    """Maximal block of 0s (or of b-1s) with its bracketing indices.

    ``start``/``end`` are the 1-based positions of the digits immediately
    before and after the block, so the block interior has length
    ``end - start - 1``.  Runs touching the word boundary are incomplete:
    their true bracket is unknown.
    """

    start: int
    end: int
    kind: str
    complete: bool

    @property
    def gap(self) -> int:
        return self.end - self.start


@dataclass
class RunDecomposition:
    runs: list[Run]
    monotone: list[Run]
    horizon: int
    word: DigitWord


def _scan_kind(data: bytes, symbol: int) -> list[tuple[int, int]]:
    pat = re.compile(re.escape(bytes([symbol])) + b"+")
    return [m.span() for m in pat.finditer(data)]


def run_decomposition(digits: DigitWord, b: Optional[int] = None,
                      kinds: tuple[str, ...] = (ZEROS, TOP)) -> RunDecomposition:
    """Locate all maximal runs and the greedy non-decreasing subsequence.

    Raises NoRuns when no digit equals 0 or b-1 (full-alphabet words have
    exponent 0 trivially and no run structure to analyse).
    """
    b = b or digits.base
    if len(digits) < 2:
        raise NoRuns("need at least two digits")
    data = digits.data if isinstance(digits.data, bytes) else bytes(digits.data)
    spans = []
    if ZEROS in kinds:
        spans += [(s, e, ZEROS) for s, e in _scan_kind(data, 0)]
    if TOP in kinds and b >= 2:
        spans += [(s, e, TOP) for s, e in _scan_kind(data, b - 1)]
    spans.sort()
    if not spans:
        raise NoRuns("no digit equals 0 or b-1")
    runs = []
    for s, e, kind in spans:
        complete = s >= 1 and e < len(data)
        runs.append(Run(start=s, end=e + 1, kind=kind, complete=complete))
    monotone: list[Run] = []
    record = None
    for r in runs:
        if not r.complete:
            continue
        if record is None or r.gap >= record:
            monotone.append(r)
            record = r.gap
    return RunDecomposition(runs=runs, monotone=monotone, horizon=len(data), word=digits)


# ---------------------------------------------------------------------------
# exponent estimates


@dataclass
class ExponentEstimate:
    v_lower: Fraction
    v_hat_lower: Fraction
    trajectory: list[tuple[int, Fraction, Optional[Fraction]]]
    horizon: int
    window: int
    k_over_log_n: Optional[float] = None


def estimate_exponents(dec: RunDecomposition, window: Optional[int] = None) -> ExponentEstimate:
    """Finite-horizon surrogates for the limsup/liminf exponent ratios.

    The estimate uses a tail window of the last W monotone runs (default
    ``max(3, K/2)``) since early runs bias the limits.
    """
    mono = dec.monotone
    K = len(mono)
    if K < 2:
        raise InsufficientDepth(f"only {K} monotone runs at horizon {dec.horizon}")
    W = window or max(3, (K + 1) // 2)
    trajectory = []
    for k, r in enumerate(mono):
        ratio_v = Fraction(r.gap, r.start)
        ratio_h = Fraction(r.gap, mono[k + 1].start) if k + 1 < K else None
        trajectory.append((k + 1, ratio_v, ratio_h))
    tail = trajectory[max(0, K - W):]
    v_lower = max(t[1] for t in tail)
    hat_vals = [t[2] for t in tail if t[2] is not None]
    if not hat_vals:
        hat_vals = [t[2] for t in trajectory if t[2] is not None]
    v_hat_lower = min(hat_vals)
    k_log = K / math.log(mono[-1].start) if mono[-1].start > 1 else None
    return ExponentEstimate(v_lower=v_lower, v_hat_lower=v_hat_lower,
                            trajectory=trajectory, horizon=dec.horizon,
                            window=W, k_over_log_n=k_log)


def exponents_of_word(digits: DigitWord, b: Optional[int] = None,
                      kinds: tuple[str, ...] = (ZEROS, TOP)) -> ExponentEstimate:
    """estimate_exponents with the no-run / too-shallow cases reported as 0."""
    try:
        dec = run_decomposition(digits, b, kinds)
        return estimate_exponents(dec)
    except (NoRuns, InsufficientDepth):
        return ExponentEstimate(v_lower=Fraction(0), v_hat_lower=Fraction(0),
                                trajectory=[], horizon=len(digits), window=0)


def check_relations(est: ExponentEstimate, tol: Fraction = Fraction(0)) -> dict:
    """Consistency flags between the two exponents, with slack ``tol``.

    Checks ``vhat <= v``, ``vhat <= v/(1+v) + tol`` and, when ``vhat < 1``,
    ``v >= vhat/(1-vhat) - tol``.
    """
    v, vh = est.v_lower, est.v_hat_lower
    report = {
        "v": v,
        "v_hat": vh,
        "tol": tol,
        "hat_le_v": vh <= v + tol,
        "hat_le_v_over_1_plus_v": vh <= v / (1 + v) + tol,
    }
    if vh < 1:
        report["v_ge_hat_over_1_minus_hat"] = v >= vh / (1 - vh) - tol
    else:
        report["v_ge_hat_over_1_minus_hat"] = False  # v would have to be infinite
    report["all_pass"] = all(report[k] for k in
                             ("hat_le_v", "hat_le_v_over_1_plus_v", "v_ge_hat_over_1_minus_hat"))
    return report


# ---------------------------------------------------------------------------
# restricted digit sets


@dataclass(frozen=True)
class DigitSet:
    """Digits allowed in a restricted Cantor set K_{b,S}.

    Needs at least two digits and one of {0, b-1}; otherwise every number in
    the set keeps its orbit far from the integers and the exponents vanish.
    """

    base: int
    digits: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "digits", frozenset(self.digits))
        if self.base < 3:
            raise InvalidDigitSet("restricted digit sets need base >= 3")
        if not self.digits <= set(range(self.base)):
            raise InvalidDigitSet("digits out of range")
        if len(self.digits) < 2:
            raise InvalidDigitSet("need at least two digits")
        if 0 not in self.digits and self.base - 1 not in self.digits:
            raise InvalidDigitSet("need 0 or b-1 in the digit set")

    @property
    def size(self) -> int:
        return len(self.digits)

    @property
    def run_digit(self) -> int:
        """The digit whose long blocks drive the approximation."""
        return 0 if 0 in self.digits else self.base - 1

    @property
    def marker_digit(self) -> int:
        """Nonzero digit (not the run digit) used to delimit blocks."""
        if self.run_digit == 0:
            if 1 in self.digits:
                return 1
            return min(d for d in self.digits if d != 0)
        return min(d for d in self.digits if d != self.base - 1)
