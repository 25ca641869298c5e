"""Generators for the explicit digit-level constructions.

All of them prescribe, per stage k, a long run of the approximating digit
starting right after position ``n_k`` and ending at ``m_k``, then evenly
spaced marker digits up to ``u_k``; remaining positions are free and filled
by a policy.  The schedule starts from ``n'_k = floor(theta**k)``,
``m'_k = floor((theta*vhat + 1) n'_k)`` and is adjusted so the run lengths
``m_k - n_k`` never decrease, which pins the two exponent limits to
``theta*vhat`` and ``vhat``.

Free fills are clamped so no accidental run ever exceeds the stage's
prescribed maximal run; every clamp is recorded, since a clamp means the
requested fill distribution was not realizable verbatim.
"""

from __future__ import annotations

import bisect
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .bary import DigitSet
from .beta_shift import BetaSystem, expansion_of_one_star, is_self_admissible, parry_invert
from .errors import InfeasibleParameters, NotSelfAdmissible, PrefixConditionFailed
from .numerics import Comparison, PolyRoot
from .words import DigitWord

F = Fraction

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# schedules


@dataclass
class ScheduledRuns:
    """Adjusted run schedule; positions are 1-based digit indices.

    ``n`` carries one extra entry (the next stage's anchor) so that the gap
    after the last complete stage is known.  ``delta[k] = m[k] - n[k] - 1``
    is the interior run length and ``u[k]`` the position of the last marker.
    """

    theta: Fraction
    v_hat: Fraction
    n: list[int]
    m: list[int]
    t: list[int]
    delta: list[int]
    u: list[int]

    @property
    def stages(self) -> int:
        return len(self.m)

    def gap(self, k: int) -> int:
        return self.m[k] - self.n[k]

    def to_dict(self) -> dict:
        return {"theta": str(self.theta), "v_hat": str(self.v_hat),
                "n": self.n, "m": self.m, "t": self.t,
                "delta": self.delta, "u": self.u}

    @staticmethod
    def from_dict(d: dict) -> "ScheduledRuns":
        return ScheduledRuns(theta=F(d["theta"]), v_hat=F(d["v_hat"]),
                             n=list(d["n"]), m=list(d["m"]), t=list(d["t"]),
                             delta=list(d["delta"]), u=list(d["u"]))


def schedule(theta: Fraction, v_hat: Fraction, stages: int) -> ScheduledRuns:
    """Build the adjusted schedule for ``stages`` complete stages.

    Infeasible below the emptiness threshold ``theta >= 1/(1 - vhat)``.
    Early stages where the floors degenerate (anchor < 2, empty run, or
    non-increasing anchors) are skipped; the limits only see the tail.
    """
    theta, v_hat = F(theta), F(v_hat)
    if not 0 < v_hat < 1:
        raise InfeasibleParameters(f"need 0 < vhat < 1, got {v_hat}")
    if theta < 1 / (1 - v_hat):
        raise InfeasibleParameters(
            f"theta {theta} below the emptiness threshold {1 / (1 - v_hat)}")
    growth = theta * v_hat + 1

    def raw(k: int) -> int:
        p = theta ** k
        return p.numerator // p.denominator

    # find the first sane stage
    k0 = 1
    while True:
        cand = raw(k0)
        if cand >= 2 and (growth * cand).numerator // (growth * cand).denominator - cand >= 1:
            break
        k0 += 1
        if k0 > 64:
            raise InfeasibleParameters("schedule never leaves the degenerate range")

    n = [raw(k0)]
    m, t, delta, u = [], [], [], []
    prev_gap = 0
    for j in range(stages):
        nk = n[j]
        scaled = growth * nk
        gap = max(scaled.numerator // scaled.denominator - nk, prev_gap, 1)
        prev_gap = gap
        mk = nk + gap
        m.append(mk)
        delta.append(gap - 1)
        nxt = max(raw(k0 + j + 1), mk)
        n.append(nxt)
        tk = max(0, (nxt - mk - 1) // gap)
        t.append(tk)
        u.append(mk + tk * gap)
    return ScheduledRuns(theta=theta, v_hat=v_hat, n=n, m=m, t=t, delta=delta, u=u)


@dataclass
class BetaLayout:
    """Positions of the marker blocks once each prescribed 1 becomes 0^N 1 0^N.

    ``l[k]``/``h[k]`` bound the fully determined part of stage k (from the
    first digit of the opening block to the last digit of the closing block);
    ``u[k]`` is the last digit of stage k's final marker block.
    """

    runs: ScheduledRuns
    N: int
    l: list[int]
    h: list[int]
    u: list[int]

    def to_dict(self) -> dict:
        d = self.runs.to_dict()
        d.update({"N": self.N, "l": self.l, "h": self.h, "u_beta": self.u})
        return d

    @staticmethod
    def from_dict(d: dict) -> "BetaLayout":
        return BetaLayout(runs=ScheduledRuns.from_dict(d), N=int(d["N"]),
                          l=list(d["l"]), h=list(d["h"]), u=list(d["u_beta"]))


def beta_layout(runs: ScheduledRuns, N: int) -> BetaLayout:
    if N < 1:
        raise ValueError("N must be >= 1")
    K = runs.stages
    l, h, u = [], [], []
    tsum = 0  # sum of t_j for j < k
    for k in range(1, K + 2):
        lk = runs.n[k - 1] + (4 * k - 4) * N + 2 * N * tsum
        l.append(lk)
        if k <= K:
            hk = runs.m[k - 1] + 4 * k * N + 2 * N * tsum
            h.append(hk)
            gap = runs.gap(k - 1)
            u.append(hk + runs.t[k - 1] * gap + 2 * N * runs.t[k - 1])
            tsum += runs.t[k - 1]
    return BetaLayout(runs=runs, N=N, l=l, h=h, u=u)


# ---------------------------------------------------------------------------
# fill policies


@dataclass
class FillPolicy:
    """How free positions are populated: a constant digit, seeded uniform
    draws over the allowed digits, or a caller-supplied stream."""

    kind: str = "constant"
    digit: int = 1
    seed: Optional[int] = None
    stream: Optional[Iterator[int]] = None

    @staticmethod
    def parse(text: str, seed: Optional[int] = None) -> "FillPolicy":
        if text.startswith("const:"):
            return FillPolicy(kind="constant", digit=int(text[6:]), seed=seed)
        if text == "random":
            return FillPolicy(kind="random", seed=seed)
        raise ValueError(f"unknown fill policy {text!r}")

    def describe(self) -> str:
        if self.kind == "constant":
            return f"const:{self.digit}"
        if self.kind == "random":
            return f"random(seed={self.seed})"
        return "stream"


@dataclass
class ConstructionSpec:
    """Parameters of one Cantor-type construction."""

    theta: Fraction
    v_hat: Fraction
    stages: int
    base: int = 0                      # integer base; 0 when a beta system is used
    beta_spec: str = ""                # base system grammar string for the beta case
    approximant_N: int = 0
    digit_set: Optional[DigitSet] = None
    fill: FillPolicy = field(default_factory=FillPolicy)

    def __post_init__(self):
        self.theta = F(self.theta)
        self.v_hat = F(self.v_hat)
        if self.theta < 1 / (1 - self.v_hat):
            raise InfeasibleParameters(
                f"theta {self.theta} below threshold {1 / (1 - self.v_hat)}")


# ---------------------------------------------------------------------------
# integer-base generator


@dataclass
class BaryConstruction:
    word: DigitWord
    schedule: ScheduledRuns
    base: int
    clamps: list[int]
    fill: str
    digit_set: Optional[DigitSet] = None

    def to_dict(self) -> dict:
        d = {"kind": "bary", "base": self.base, "fill": self.fill,
             "clamps": len(self.clamps), "schedule": self.schedule.to_dict()}
        if self.digit_set:
            d["digit_set"] = sorted(self.digit_set.digits)
        return d


def _free_spans(runs: ScheduledRuns, depth: int, pair_after_marker: bool) -> list[tuple[int, int, int]]:
    """(lo, hi, cap) 1-based inclusive spans of free positions up to depth."""
    spans = []
    step_after = 2 if pair_after_marker else 1
    if runs.n[0] > 1:
        spans.append((1, runs.n[0] - 1, runs.delta[0]))
    for k in range(runs.stages):
        gap = runs.gap(k)
        cap = runs.delta[k]
        prev_end = runs.m[k]
        for t in range(1, runs.t[k] + 1):
            marker = runs.m[k] + t * gap
            lo = prev_end + (step_after if prev_end != runs.m[k] else 1)
            if lo <= marker - 1:
                spans.append((lo, marker - 1, cap))
            prev_end = marker
        lo = prev_end + (step_after if prev_end != runs.m[k] else 1)
        hi = runs.n[k + 1] - 1
        if lo <= hi:
            spans.append((lo, hi, cap))
    return [(lo, min(hi, depth), cap) for lo, hi, cap in spans if lo <= depth]


def _punch_positions(lo: int, hi: int, cap: int, left_run: int) -> list[int]:
    """Positions of break digits so every filled run stays within cap."""
    out = []
    pos = max(lo, lo + cap - left_run)
    while pos <= hi:
        out.append(pos)
        pos += cap + 1
    return out


def generate_bary(spec: ConstructionSpec) -> BaryConstruction:
    """Digit word realizing the prescribed runs and markers in an integer base.

    The base-2 variant writes the block ``1 0`` for each marker so marker 1s
    never extend a run of the top digit.
    """
    b = spec.base
    if b < 2:
        raise ValueError("integer base required")
    S = spec.digit_set
    if S is not None and S.base != b:
        raise ValueError("digit set base mismatch")
    runs = schedule(spec.theta, spec.v_hat, spec.stages)
    depth = runs.n[runs.stages]
    run_digit = 0 if S is None else S.run_digit
    marker = 1 if S is None else S.marker_digit
    allowed = tuple(range(b)) if S is None else tuple(sorted(S.digits))
    arr = bytearray(depth)

    # prescribed structure first, then fills (the clamp logic inspects
    # neighboring determined digits)
    pair = b == 2
    for k in range(runs.stages + 1):
        nk = runs.n[k]
        if nk <= depth:
            arr[nk - 1] = marker
        if k == runs.stages:
            break
        mk = runs.m[k]
        if run_digit != 0:
            for p in range(nk + 1, min(mk, depth + 1)):
                arr[p - 1] = run_digit
        if mk <= depth:
            arr[mk - 1] = marker
        gap = runs.gap(k)
        for t in range(1, runs.t[k] + 1):
            pos = mk + t * gap
            if pos <= depth:
                arr[pos - 1] = marker
            if pair and pos + 1 <= depth and pos + 1 < runs.n[k + 1]:
                arr[pos] = 0
    spans = _free_spans(runs, depth, pair_after_marker=pair)
    clamps: list[int] = []
    _fill_free_spans(arr, spans, spec.fill, b, allowed, clamps)
    _enforce_run_caps(arr, runs, depth, b, allowed, spans, clamps)
    word = DigitWord.from_bytes(b, bytes(arr))
    if clamps:
        log.warning("fill policy clamped at %d positions", len(clamps))
    return BaryConstruction(word=word, schedule=runs, base=b, clamps=clamps,
                            fill=spec.fill.describe(), digit_set=S)


def _enforce_run_caps(arr: bytearray, runs: ScheduledRuns, depth: int, b: int,
                      allowed: Sequence[int], spans, clamps: list[int]) -> None:
    """Safety net: no run of 0 or b-1 may exceed the stage cap.

    The in-fill clamping already keeps runs short inside each span; this pass
    catches merges across span boundaries (only possible for base 2, where
    the markers are themselves the top digit).
    """
    import re as _re
    free_starts = [lo for lo, _hi, _c in spans]
    free_ends = [hi for _lo, hi, _c in spans]

    def cap_at(pos: int) -> int:
        k = bisect.bisect_left(runs.n, pos)
        return runs.delta[min(max(k - 1, 0), runs.stages - 1)] if runs.stages else 0

    for symbol in {0, b - 1}:
        pat = _re.compile(_re.escape(bytes([symbol])) + b"+")
        for mt in pat.finditer(arr):
            s, e = mt.start() + 1, mt.end()  # 1-based inclusive run
            cap = max(cap_at(s), 1)
            if e - s + 1 <= cap:
                continue
            breaker = _break_digit(symbol, allowed, b)
            pos = s + cap
            while pos <= e:
                i = bisect.bisect_right(free_starts, pos) - 1
                target = pos
                if i < 0 or target > free_ends[i]:
                    nxt = bisect.bisect_right(free_starts, pos)
                    if nxt >= len(free_starts) or free_starts[nxt] > e:
                        break
                    target = free_starts[nxt]
                arr[target - 1] = breaker
                clamps.append(target)
                pos = target + cap + 1


def _fill_free_spans(arr: bytearray, spans, policy: FillPolicy, b: int,
                     allowed: Sequence[int], clamps: list[int]) -> None:
    top = b - 1
    run_symbols = {0, top}
    rng = random.Random(policy.seed)

    if policy.kind == "constant":
        c = policy.digit
        if c not in allowed:
            fixed = min(allowed, key=lambda a: (abs(a - c), a))
            clamps.append(0)
            log.warning("constant fill %d not allowed, using %d", c, fixed)
            c = fixed
        if c not in run_symbols:
            for lo, hi, _cap in spans:
                arr[lo - 1:hi] = bytes([c]) * (hi - lo + 1)
            return
        # run-forming constant: punch break digits so runs stay capped
        breaker = _break_digit(c, allowed, b)
        for lo, hi, cap in spans:
            arr[lo - 1:hi] = bytes([c]) * (hi - lo + 1)
            left = 0
            p = lo - 1
            while p >= 1 and arr[p - 1] == c and left <= cap + 1:
                left += 1
                p -= 1
            if cap <= 0:
                punches = list(range(lo, hi + 1))
            else:
                punches = _punch_positions(lo, hi, cap, left)
            for pos in punches:
                arr[pos - 1] = breaker
                clamps.append(pos)
        return

    if policy.kind == "random":
        # bulk draws; overlong runs (rare unless the cap is tiny) are punched
        # afterwards by the cap-enforcement pass, which records the clamps
        for lo, hi, _cap in spans:
            arr[lo - 1:hi] = bytes(rng.choices(allowed, k=hi - lo + 1))
        return

    # caller-supplied stream: per digit, with run bookkeeping
    for lo, hi, cap in spans:
        zrun = trun = 0
        p = lo - 1
        while p >= 1 and arr[p - 1] == 0:
            zrun += 1
            p -= 1
        p = lo - 1
        while p >= 1 and arr[p - 1] == top:
            trun += 1
            p -= 1
        for pos in range(lo, hi + 1):
            d = next(policy.stream)
            if d not in allowed:
                clamps.append(pos)
                d = min(allowed, key=lambda a: abs(a - d))
            if d == 0 and zrun >= cap:
                d = _break_digit(0, allowed, b)
                clamps.append(pos)
            elif d == top and trun >= cap:
                d = _break_digit(top, allowed, b)
                clamps.append(pos)
            arr[pos - 1] = d
            zrun = zrun + 1 if d == 0 else 0
            trun = trun + 1 if d == top else 0


def _break_digit(run_symbol: int, allowed: Sequence[int], b: int) -> int:
    """A digit that interrupts runs of ``run_symbol``; prefers a digit that
    is not itself a run symbol."""
    top = b - 1
    neutral = [a for a in allowed if a not in (0, top)]
    if neutral:
        return neutral[0]
    other = [a for a in allowed if a != run_symbol]
    if not other:
        raise InfeasibleParameters("cannot break runs: only one digit allowed")
    return other[0]


def generate_restricted(spec: ConstructionSpec) -> BaryConstruction:
    """The construction inside a restricted-digit Cantor set.

    Free digits are drawn from the digit set; the approximating runs use its
    run digit (0, or b-1 when 0 is missing) and anchors use a fixed nonzero
    member of the set.  Out-of-set constant fills are clamped, with a log.
    """
    if spec.digit_set is None:
        raise ValueError("digit_set required")
    return generate_bary(spec)


# ---------------------------------------------------------------------------
# beta-base generator


@dataclass
class BetaConstruction:
    word: DigitWord
    layout: BetaLayout
    base_spec: str
    approximant_spec: str
    clamps: list[int]
    fill: str

    def to_dict(self) -> dict:
        return {"kind": "beta", "base": self.base_spec,
                "approximant": self.approximant_spec, "fill": self.fill,
                "clamps": len(self.clamps), "schedule": self.layout.to_dict()}


def generate_beta(base: BetaSystem, N: int, theta: Fraction, v_hat: Fraction,
                  stages: int, fill: Optional[FillPolicy] = None,
                  depth: Optional[int] = None) -> BetaConstruction:
    """Word admissible for the finite-type approximant (hence for the base),
    with each prescribed 1 replaced by the block ``0^N 1 0^N`` and free
    positions filled by admissible digits chosen on the automaton walk."""
    fill = fill or FillPolicy(kind="random", seed=0)
    runs = schedule(theta, v_hat, stages)
    layout = beta_layout(runs, N)
    approx = base.approximant(N)
    auto = approx.automaton
    K = runs.stages
    depth = depth or layout.l[K] - 1
    rng = random.Random(fill.seed)
    clamps: list[int] = []

    # determined digits: per stage, blocks at l_k and h_k - 2N, run zeros
    # between them, marker blocks after; everything else free
    ones = set()
    determined_zero_spans = []
    for k in range(K):
        lk, hk = layout.l[k], layout.h[k]
        ones.add(lk + N)
        ones.add(hk - N)
        determined_zero_spans.append((lk, hk))  # all zero except the two 1s
        gap = runs.gap(k)
        for t in range(1, runs.t[k] + 1):
            s = hk + t * gap + 2 * N * (t - 1)
            ones.add(s + N)
            determined_zero_spans.append((s, s + 2 * N))
    if layout.l[K] <= depth:
        ones.add(layout.l[K] + N)
        determined_zero_spans.append((layout.l[K], min(layout.l[K] + 2 * N, depth)))

    kind = bytearray(depth + 1)  # 0 free, 1 determined-zero, 2 determined-one
    for lo, hi in determined_zero_spans:
        for p in range(lo, min(hi, depth) + 1):
            kind[p] = 1
    for p in ones:
        if p <= depth:
            kind[p] = 2

    cap0 = runs.delta[0]  # free zero-run cap ahead of the first block
    digits = bytearray(depth)
    state = 0
    zrun = 0
    pre_first = layout.l[0]
    for pos in range(1, depth + 1):
        if kind[pos] == 2:
            d = 1
        elif kind[pos] == 1:
            d = 0
        else:
            bound = auto.bound[state]
            if fill.kind == "constant":
                d = min(fill.digit, bound)
                if d != fill.digit:
                    clamps.append(pos)
            elif fill.kind == "random":
                d = rng.randint(0, bound)
            else:
                d = next(fill.stream)
                if d > bound:
                    clamps.append(pos)
                    d = bound
            if pos < pre_first and d == 0 and zrun >= cap0 and bound >= 1:
                d = 1
                clamps.append(pos)
        nxt = auto.step(state, d)
        if nxt is None:
            raise AssertionError(
                f"determined digit {d} rejected at position {pos}; N too small")
        state = nxt
        zrun = zrun + 1 if d == 0 else 0
        digits[pos - 1] = d
    word = DigitWord.from_bytes(approx.alphabet_top + 1, bytes(digits))
    return BetaConstruction(word=word, layout=layout, base_spec=base.spec_string,
                            approximant_spec=approx.spec_string, clamps=clamps,
                            fill=fill.describe())


# ---------------------------------------------------------------------------
# parameter-space construction


@dataclass
class ParamSpaceResult:
    word: DigitWord
    root: PolyRoot
    prefix: tuple[int, ...]
    approximant_spec: str
    construction: BetaConstruction


def generate_parameter_space(beta0: BetaSystem, beta1: BetaSystem, beta2: BetaSystem,
                             N: int, theta: Fraction, v_hat: Fraction, stages: int,
                             fill: Optional[FillPolicy] = None) -> ParamSpaceResult:
    """A self-admissible word sandwiched between two bases.

    Concatenates the length-N prefix of the larger base's expansion of 1,
    N zeros, then a construction word for the truncated base; the inverse
    (Parry) base of the result is certified to lie strictly between the two
    given bases, both symbolically (lexicographic order of expansions) and
    numerically (interval refinement).
    """
    star1 = expansion_of_one_star(beta1, N).digits()
    if star1[N - 1] == 0:
        raise PrefixConditionFailed(
            f"symbol {N} of the expansion of 1 vanishes; increase N")
    d0 = tuple(beta0.d1[i] if beta0.d1 is not None else beta0.d1_star_digit(i)
               for i in range(N))
    if not d0 < star1:
        raise PrefixConditionFailed(
            f"expansion of 1 of the lower base is not lexicographically below "
            f"the prefix at N={N}")
    tilde = beta1.approximant(N)
    construction = generate_beta(tilde, N, theta, v_hat, stages, fill)
    word_digits = star1 + (0,) * N + construction.word.digits()
    if not is_self_admissible(word_digits):
        raise NotSelfAdmissible("concatenated word lost self-admissibility")
    # 64 bits separate the sandwich by a wide margin; long words make each
    # extra bisection step expensive
    root = parry_invert(list(word_digits), precision=64)
    bits = 64
    while True:
        val = root.as_scalar(bits)
        lo_cmp = (val - beta0.beta_scalar(bits)).compare(F(0))
        hi_cmp = (beta1.beta_scalar(bits) - val).compare(F(0))
        if lo_cmp is not Comparison.UNRESOLVED and hi_cmp is not Comparison.UNRESOLVED:
            if not (lo_cmp is Comparison.GREATER and hi_cmp is Comparison.GREATER):
                raise PrefixConditionFailed("inverted base escaped the sandwich")
            break
        bits *= 2
        if bits > 1 << 13:
            raise PrefixConditionFailed("sandwich could not be certified")
    word = DigitWord(beta2.alphabet_top + 1, word_digits)
    return ParamSpaceResult(word=word, root=root, prefix=star1,
                            approximant_spec=tilde.spec_string,
                            construction=construction)
