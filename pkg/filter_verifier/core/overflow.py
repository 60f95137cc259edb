"""
Bounded overflow verification on the fixed-point direct-form I datapath.

Per sample n the datapath forms every product b_i x[n-i] and a_j y[n-j] and
range-checks each one re-rounded to the format. The exact products are
accumulated at double width and the stored output y[n] is rounded once and
range-checked. A violation found by any strategy is
replayed through simulate_fixed before it is reported, so every
counterexample is reproducible.

Strategies:
    exhaustive  breadth-first over the input alphabet with merged states;
                complete within the horizon, reports the violation at the
                smallest step with the lexicographically smallest inputs
    analytic    sign-matched worst case; complete for FIR filters
    directed    seeded hill-climbing on the accumulator excursion; sound
                but incomplete
"""
import logging
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from ..errors import BudgetExceededError, FormatError, FormatMismatchError, StrategyError
from .filtermodel import QuantizedFilter, StateDF1, impulse_response_quantized
from .fixedpoint import (FixedFormat, FixedValue, OverflowEvent, OverflowMode, RoundingMode,
                         round_div, saturate_raw, wrap_raw)

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0x5EED
DEFAULT_RESTARTS = 64
EXHAUSTIVE_BUDGET = 1 << 24
DIRECTED_SWEEPS = 4
ARRAY_MAX_BITS = 24


class SearchStrategy(str, Enum):
    EXHAUSTIVE = "exhaustive"
    ANALYTIC_FIR = "analytic"
    DIRECTED = "directed"


class CheckSite(str, Enum):
    PRODUCTS = "products"    # product terms only
    OUTPUT = "output"        # product terms and the stored output register


class ViolationSite(str, Enum):
    B_PRODUCT = "b-product"
    A_PRODUCT = "a-product"
    OUTPUT = "output"


@dataclass(frozen=True)
class StepRecord:
    n: int
    x_raw: int
    b_products: tuple[int, ...]
    a_products: tuple[int, ...]
    accumulator: int         # exact sum in units of 2^-2n
    output: int
    events: tuple[OverflowEvent, ...] = ()


@dataclass(frozen=True)
class BoundedRun:
    inputs: tuple[FixedValue, ...]
    steps: tuple[StepRecord, ...]
    mode: OverflowMode = OverflowMode.DETECT

    @property
    def k(self) -> int:
        return len(self.steps)

    @property
    def events(self) -> list[OverflowEvent]:
        return [e for s in self.steps for e in s.events]

    def outputs(self, fmt: FixedFormat) -> list[Fraction]:
        return [Fraction(s.output, fmt.scale) for s in self.steps]


@dataclass(frozen=True)
class OverflowCounterexample:
    inputs: tuple[FixedValue, ...]
    step: int
    site: ViolationSite
    term: int | None
    wide_raw: int
    fmt: FixedFormat

    @property
    def wide_value(self) -> Fraction:
        return Fraction(self.wide_raw, self.fmt.scale)

    @property
    def bound(self) -> str:
        return "v_max" if self.wide_raw > self.fmt.raw_max else "v_min"

    @property
    def location(self) -> str:
        if self.site is ViolationSite.OUTPUT:
            return "output"
        return f"{'b' if self.site is ViolationSite.B_PRODUCT else 'a'}[{self.term}]"

    def to_dict(self) -> dict[str, Any]:
        return {
            "inputs": [str(v.real_value) for v in self.inputs],
            "inputs_raw": [v.raw for v in self.inputs],
            "step": self.step,
            "site": self.site.value,
            "term": self.term,
            "wide_value": str(self.wide_value),
            "wide_raw": self.wide_raw,
            "bound": self.bound,
        }


@dataclass(frozen=True)
class WorstCase:
    inputs: tuple[FixedValue, ...]
    peak: Fraction
    trough_inputs: tuple[FixedValue, ...]
    trough: Fraction
    product_overflow: bool
    overflow: bool


@dataclass(frozen=True)
class OverflowVerdict:
    strategy: SearchStrategy
    horizon: int
    counterexample: OverflowCounterexample | None = None
    explored: int = 0
    complete: bool = True
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.counterexample is not None


def _input_bounds(fmt: FixedFormat, input_range: tuple[float, float] | None) -> tuple[int, int]:
    if input_range is None:
        return fmt.raw_min, fmt.raw_max
    lo = max(math.ceil(Fraction(input_range[0]) * fmt.scale), fmt.raw_min)
    hi = min(math.floor(Fraction(input_range[1]) * fmt.scale), fmt.raw_max)
    if lo > hi:
        raise ValueError(f"input range {input_range} holds no value of <{fmt}>")
    return lo, hi


class Datapath:
    """
    Scalar direct-form I datapath on raw integers.

    Each product is re-rounded to the format for its range check, while the
    accumulator sums the exact products (2n fractional bits) and the output
    is rounded once when it is stored.
    """
    def __init__(self, qf: QuantizedFilter,
                 rounding: RoundingMode | None = None,
                 check_site: CheckSite = CheckSite.OUTPUT):
        self.qf = qf
        self.fmt = qf.fmt
        self.b = qf.b_raw
        self.a = qf.a_raw
        self.rounding = rounding or qf.rounding
        self.check_site = check_site

    def store(self, acc: int) -> int:
        """
        Output register value for a wide accumulator (units of 2^-2n), a_0 applied.
        """
        num, den = acc, self.a[0]
        if den < 0:
            num, den = -num, -den
        return round_div(num, den, self.rounding)

    def _handle(self, raw: int, mode: OverflowMode, site: ViolationSite, term: int | None,
                events: list[OverflowEvent]) -> tuple[int, tuple | None]:
        fmt = self.fmt
        if fmt.contains_raw(raw):
            return raw, None
        if mode is OverflowMode.DETECT:
            return raw, (site, term, raw)
        events.append(OverflowEvent(f"{site.value}[{term}]" if term is not None else site.value, raw, fmt))
        if mode is OverflowMode.SATURATE:
            return saturate_raw(raw, fmt), None
        return wrap_raw(raw, fmt), None

    def _products(self, coeffs, operands, site: ViolationSite, first: int, mode: OverflowMode,
                  events: list[OverflowEvent]) -> tuple[list[int], int, tuple | None]:
        scale = self.fmt.scale
        products, wide_sum = [], 0
        for i, (c, v) in enumerate(zip(coeffs, operands), start=first):
            wide = c * v
            p = round_div(wide, scale, self.rounding)
            handled, violation = self._handle(p, mode, site, i, events)
            if violation:
                return products, wide_sum, violation
            products.append(handled)
            # A clamped or wrapped product enters the sum as stored
            wide_sum += wide if handled == p else handled * scale
        return products, wide_sum, None

    def step(self, n: int, state: StateDF1, x_raw: int,
             mode: OverflowMode) -> tuple[StateDF1, StepRecord, tuple | None]:
        events: list[OverflowEvent] = []
        window = (x_raw,) + state.x_hist

        b_products, b_sum, violation = self._products(self.b, window, ViolationSite.B_PRODUCT, 0, mode, events)
        if violation:
            return state, None, violation
        a_products, a_sum, violation = self._products(self.a[1:], state.y_hist, ViolationSite.A_PRODUCT, 1,
                                                      mode, events)
        if violation:
            return state, None, violation

        acc = b_sum - a_sum
        y = self.store(acc)
        if self.check_site is CheckSite.OUTPUT:
            y, violation = self._handle(y, mode, ViolationSite.OUTPUT, None, events)
            if violation:
                return state, None, violation

        record = StepRecord(n, x_raw, tuple(b_products), tuple(a_products), acc, y, tuple(events))
        return state.shifted(x_raw, y), record, None


def simulate_fixed(qf: QuantizedFilter, inputs: Sequence[FixedValue],
                   mode: OverflowMode = OverflowMode.DETECT,
                   rounding: RoundingMode | None = None,
                   check_site: CheckSite = CheckSite.OUTPUT) -> BoundedRun | OverflowCounterexample:
    """
    Run the datapath from the zero state. In detect mode the first range
    violation ends the run and is returned as a counterexample; saturate and
    wraparound complete the run, recording every event.
    """
    for x in inputs:
        if x.fmt != qf.fmt:
            raise FormatMismatchError(f"input format <{x.fmt}> differs from filter format <{qf.fmt}>")
        if not qf.fmt.contains_raw(x.raw):
            raise FormatError(f"input raw {x.raw} lies outside <{qf.fmt}> [{qf.fmt.raw_min}, {qf.fmt.raw_max}]")
    datapath = Datapath(qf, rounding, check_site)
    state = StateDF1.zeros(qf)
    records = []
    for n, x in enumerate(inputs):
        state, record, violation = datapath.step(n, state, x.raw, mode)
        if violation:
            site, term, wide = violation
            return OverflowCounterexample(tuple(inputs[:n + 1]), n, site, term, wide, qf.fmt)
        records.append(record)
    return BoundedRun(tuple(inputs), tuple(records), mode)


def _replay(qf: QuantizedFilter, raws: Sequence[int], rounding: RoundingMode,
            check_site: CheckSite) -> OverflowCounterexample | None:
    inputs = [FixedValue(int(r), qf.fmt) for r in raws]
    result = simulate_fixed(qf, inputs, OverflowMode.DETECT, rounding, check_site)
    return result if isinstance(result, OverflowCounterexample) else None


class ArrayDatapath:
    """
    The same datapath evaluated for a batch of states at once (numpy int64).
    Formats are limited so that wide products and their sums fit in 64 bits.
    """
    def __init__(self, qf: QuantizedFilter, rounding: RoundingMode, check_site: CheckSite):
        fmt = qf.fmt
        if fmt.total_bits > ARRAY_MAX_BITS:
            raise BudgetExceededError(
                f"vectorized search needs formats of at most {ARRAY_MAX_BITS} bits, <{fmt}> has {fmt.total_bits}")
        self.fmt = fmt
        self.b = np.array(qf.b_raw, dtype=np.int64)
        self.a = np.array(qf.a_raw[1:], dtype=np.int64)
        self.a0 = qf.a_raw[0]
        self.rounding = rounding
        self.check_site = check_site

    def _out_of_range(self, v: np.ndarray) -> np.ndarray:
        return (v > self.fmt.raw_max) | (v < self.fmt.raw_min)

    def step(self, x_hist: np.ndarray, y_hist: np.ndarray, x: np.ndarray):
        """
        Returns (window, y, violated, excursion) for a batch; excursion is the
        largest |value| / bound over the checked registers, > 1 exactly when violated.
        """
        scale = self.fmt.scale
        window = np.column_stack([x, x_hist])
        b_wide = window * self.b
        a_wide = y_hist * self.a
        b_prod = round_div(b_wide, scale, self.rounding)
        a_prod = round_div(a_wide, scale, self.rounding)
        acc = b_wide.sum(axis=1) - a_wide.sum(axis=1)
        sign = 1 if self.a0 > 0 else -1
        y = round_div(acc * sign, abs(self.a0), self.rounding)

        violated = self._out_of_range(b_prod).any(axis=1) | self._out_of_range(a_prod).any(axis=1)
        if self.check_site is CheckSite.OUTPUT:
            violated |= self._out_of_range(y)
        values = np.column_stack([b_prod, a_prod, y]).astype(float)
        hi, lo = max(self.fmt.raw_max, 1), -self.fmt.raw_min
        excursion = np.max(np.where(values >= 0, values / hi, -values / lo), axis=1)
        return window, y, violated, excursion


def _check_budget(alphabet_size: int, k: int, limit: int = EXHAUSTIVE_BUDGET) -> None:
    if alphabet_size ** k > limit:
        raise BudgetExceededError(f"exhaustive search over {alphabet_size}^{k} input sequences exceeds the budget of {limit}")


def _exhaustive(qf: QuantizedFilter, k: int, lo: int, hi: int,
                rounding: RoundingMode, check_site: CheckSite) -> OverflowVerdict:
    alphabet = np.arange(lo, hi + 1, dtype=np.int64)
    _check_budget(len(alphabet), k)
    datapath = ArrayDatapath(qf, rounding, check_site)
    m, n_fb = len(qf.b_q) - 1, len(qf.a_q) - 1

    x_hist = np.zeros((1, m), dtype=np.int64)
    y_hist = np.zeros((1, n_fb), dtype=np.int64)
    prefixes = np.zeros((1, 0), dtype=np.int64)
    explored = 0

    for depth in range(k):
        n_states = len(x_hist)
        # Candidates ordered by (parent prefix, input): lexicographic in the full prefix
        parent = np.repeat(np.arange(n_states), len(alphabet))
        xs = np.tile(alphabet, n_states)
        window, y, violated, _ = datapath.step(x_hist[parent], y_hist[parent], xs)
        explored += len(xs)

        if violated.any():
            idx = int(np.argmax(violated))
            raws = list(prefixes[parent[idx]]) + [int(xs[idx])]
            cex = _replay(qf, raws, rounding, check_site)
            logger.info("exhaustive search: violation at step %d after %d evaluations", depth, explored)
            return OverflowVerdict(SearchStrategy.EXHAUSTIVE, k, cex, explored, True,
                                   {"states": n_states, "depth": depth})

        new_x = window[:, :m]
        new_y = np.column_stack([y, y_hist[parent]])[:, :n_fb]
        new_prefixes = np.column_stack([prefixes[parent], xs])
        states = np.column_stack([new_x, new_y])
        if states.shape[1] == 0:
            keep = np.array([0])
        else:
            # Keep the first (lexicographically smallest) prefix reaching each state
            _, keep = np.unique(states, axis=0, return_index=True)
            keep.sort()
        x_hist, y_hist, prefixes = new_x[keep], new_y[keep], new_prefixes[keep]
        logger.debug("exhaustive search depth %d: %d distinct states", depth + 1, len(keep))

    return OverflowVerdict(SearchStrategy.EXHAUSTIVE, k, None, explored, True, {"states": len(x_hist)})


def worst_case_fir(qf: QuantizedFilter, horizon: int | None = None,
                   input_range: tuple[float, float] | None = None,
                   rounding: RoundingMode | None = None,
                   check_site: CheckSite = CheckSite.OUTPUT) -> WorstCase:
    """
    Sign-matched extreme inputs: x[n-i] = v_max where b_i >= 0 and v_min
    where b_i < 0 maximize every product and hence the accumulated output;
    the mirrored choice minimizes it. Before the window fills only a prefix
    of the taps is driven, so the extremes are taken over every prefix.
    Inputs are returned in time order, ending at the extremal step.
    """
    if not qf.is_fir:
        raise StrategyError("the analytic worst case applies to FIR filters only")
    fmt, rounding = qf.fmt, rounding or qf.rounding
    lo, hi = _input_bounds(fmt, input_range)
    datapath = Datapath(qf, rounding, check_site)
    taps = qf.b_raw[:horizon] if horizon else qf.b_raw

    candidates = []
    for up in (True, False):
        chosen = [(hi if (c >= 0) == up else lo) for c in taps]
        acc = 0
        for length, (c, x) in enumerate(zip(taps, chosen), start=1):
            acc += c * x
            # chosen[i] feeds tap i, so the time order is reversed
            candidates.append((datapath.store(acc), chosen[:length][::-1]))

    peak_out, peak_inputs = max(candidates, key=lambda item: item[0])
    trough_out, trough_inputs = min(candidates, key=lambda item: item[0])

    product_overflow = any(
        not fmt.contains_raw(round_div(c * x, fmt.scale, rounding))
        for c in taps for x in (lo, hi)
    )
    output_overflow = check_site is CheckSite.OUTPUT and (peak_out > fmt.raw_max or trough_out < fmt.raw_min)

    def values(raws):
        return tuple(FixedValue(r, fmt) for r in raws)

    return WorstCase(values(peak_inputs), Fraction(peak_out, fmt.scale),
                     values(trough_inputs), Fraction(trough_out, fmt.scale),
                     product_overflow, product_overflow or output_overflow)


def _analytic(qf: QuantizedFilter, k: int, input_range, rounding: RoundingMode,
              check_site: CheckSite) -> OverflowVerdict:
    wc = worst_case_fir(qf, k, input_range, rounding, check_site)
    details = {"peak": str(wc.peak), "trough": str(wc.trough)}
    if not wc.overflow:
        return OverflowVerdict(SearchStrategy.ANALYTIC_FIR, k, None, 2, True, details)

    lo, hi = _input_bounds(qf.fmt, input_range)
    taps = qf.b_raw[:k]
    # Full-window sign-matched sequences drive every tap to both product extremes
    full = [[(hi if (c >= 0) == up else lo) for c in taps][::-1] for up in (True, False)]
    sequences = [[v.raw for v in wc.inputs], [v.raw for v in wc.trough_inputs], *full]
    found = [c for c in (_replay(qf, seq, rounding, check_site) for seq in sequences) if c is not None]
    cex = min(found, key=lambda c: (c.step, [v.raw for v in c.inputs]))
    return OverflowVerdict(SearchStrategy.ANALYTIC_FIR, k, cex, len(sequences), True, details)


def _directed(qf: QuantizedFilter, k: int, lo: int, hi: int, rounding: RoundingMode,
              check_site: CheckSite, seed: int, restarts: int) -> OverflowVerdict:
    datapath = ArrayDatapath(qf, rounding, check_site)
    rng = np.random.default_rng(seed)
    m, n_fb = len(qf.b_q) - 1, len(qf.a_q) - 1
    explored = 0

    def evaluate(seqs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nonlocal explored
        count = len(seqs)
        x_hist = np.zeros((count, m), dtype=np.int64)
        y_hist = np.zeros((count, n_fb), dtype=np.int64)
        violated = np.zeros(count, dtype=bool)
        score = np.zeros(count)
        for t in range(k):
            window, y, bad, excursion = datapath.step(x_hist, y_hist, seqs[:, t])
            violated |= bad
            score = np.maximum(score, excursion)
            x_hist = window[:, :m]
            y_hist = np.column_stack([y, y_hist])[:, :n_fb]
        explored += count
        return violated, score

    def found(seqs: np.ndarray, violated: np.ndarray) -> OverflowVerdict | None:
        if not violated.any():
            return None
        candidates = [_replay(qf, seqs[i], rounding, check_site) for i in np.nonzero(violated)[0]]
        cex = min((c for c in candidates if c is not None), key=lambda c: (c.step, [v.raw for v in c.inputs]))
        logger.info("directed search: violation at step %d after %d evaluations", cex.step, explored)
        return OverflowVerdict(SearchStrategy.DIRECTED, k, cex, explored, False, {"seed": seed})

    # Sign-matched seeds against the quantized impulse response, one per end step and polarity
    h = impulse_response_quantized(qf, k)
    seeds = []
    for end in range(k):
        for polarity in (1, -1):
            seq = np.zeros(k, dtype=np.int64)
            for t in range(end + 1):
                seq[t] = hi if polarity * h[end - t] >= 0 else lo
            seeds.append(seq)
    population = np.vstack(seeds + [rng.integers(lo, hi + 1, size=k) for _ in range(restarts)])

    violated, score = evaluate(population)
    result = found(population, violated)
    if result:
        return result

    step = max(1, (hi - lo) // 16)
    for sweep in range(DIRECTED_SWEEPS):
        improved = False
        for pos in range(k):
            current = population[:, pos]
            options = [np.full_like(current, lo), np.full_like(current, hi), np.zeros_like(current),
                       np.clip(current + 1, lo, hi), np.clip(current - 1, lo, hi),
                       np.clip(current + step, lo, hi), np.clip(current - step, lo, hi)]
            trials = np.repeat(population[None, :, :], len(options), axis=0)
            for o, values in enumerate(options):
                trials[o, :, pos] = values
            flat = trials.reshape(-1, k)
            t_violated, t_score = evaluate(flat)
            result = found(flat, t_violated)
            if result:
                return result
            t_score = t_score.reshape(len(options), -1)
            best = np.argmax(t_score, axis=0)
            best_score = t_score[best, np.arange(len(population))]
            better = best_score > score
            if better.any():
                improved = True
                population[better] = trials[best[better], np.nonzero(better)[0]]
                score = np.where(better, best_score, score)
        logger.debug("directed sweep %d: best excursion %.4f", sweep, float(np.max(score)))
        if not improved:
            break

    return OverflowVerdict(SearchStrategy.DIRECTED, k, None, explored, False,
                           {"seed": seed, "best_excursion": round(float(np.max(score)), 12)})


def default_seed() -> int:
    value = os.environ.get("FILTER_VERIFIER_SEED")
    return int(value, 0) if value else DEFAULT_SEED


def search_overflow(qf: QuantizedFilter, k: int,
                    strategy: SearchStrategy = SearchStrategy.EXHAUSTIVE, *,
                    seed: int | None = None,
                    restarts: int = DEFAULT_RESTARTS,
                    input_range: tuple[float, float] | None = None,
                    rounding: RoundingMode | None = None,
                    check_site: CheckSite = CheckSite.OUTPUT) -> OverflowVerdict:
    if k < 1:
        raise ValueError(f"horizon must be >= 1, got {k}")
    strategy = SearchStrategy(strategy)
    rounding = rounding or qf.rounding
    lo, hi = _input_bounds(qf.fmt, input_range)
    logger.info("overflow search: %s, horizon %d, <%s>, inputs in [%d, %d] raw",
                strategy.value, k, qf.fmt, lo, hi)

    if strategy is SearchStrategy.EXHAUSTIVE:
        return _exhaustive(qf, k, lo, hi, rounding, check_site)
    if strategy is SearchStrategy.ANALYTIC_FIR:
        return _analytic(qf, k, input_range, rounding, check_site)
    return _directed(qf, k, lo, hi, rounding, check_site,
                     default_seed() if seed is None else seed, restarts)
