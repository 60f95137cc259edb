"""
Sampled frequency response and the magnitude/phase verification predicates.

Frequencies are digital (rad/sample) throughout; gains are given in dB and
compared in linear magnitude. Only the half grid k = 0..N/2 is checked since
every filter here has real coefficients.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Sequence

import numpy as np
from scipy.signal import freqz

from ..errors import GridError, SpecError, TruncationError
from .filtermodel import QuantizedFilter, TransferFunction, impulse_response

logger = logging.getLogger(__name__)

DEFAULT_GRID = 1024
TAIL_TOLERANCE = 1e-6

Band = tuple[float, float]


def db_to_lin(db: float) -> float:
    return 10.0 ** (db / 20.0)


def lin_to_db(x: float) -> float:
    return 20.0 * math.log10(x)


def wrap_phase(phi: np.ndarray) -> np.ndarray:
    """Wrap angles into (-pi, pi]; exact zeros stay zero."""
    return np.pi - np.remainder(np.pi - phi, 2.0 * np.pi)


class BandKind(str, Enum):
    LOWPASS = "lowpass"
    HIGHPASS = "highpass"
    BANDPASS = "bandpass"


class ResponseMethod(str, Enum):
    IMPULSE_TRUNCATION = "impulse_truncation"
    RATIONAL_EVAL = "rational_eval"


class MagnitudeStatus(str, Enum):
    S = "S"
    FP = "FP"
    FS = "FS"
    FC = "FC"


class PhaseStatus(str, Enum):
    S = "S"
    F = "F"


def _as_pair(value) -> Band | None:
    if value is None:
        return None
    lo, hi = value
    return (float(lo), float(hi))


@dataclass(frozen=True)
class FilterSpecBand:
    """
    The design contract. Lowpass/highpass take scalar wp/wr/wc, bandpass takes
    (low, high) pairs for wp and wr. Any frequency may be absent, in which
    case its clause is not checked.
    """
    kind: BandKind
    wp: float | Band | None = None
    wr: float | Band | None = None
    wc: float | None = None
    ap_db: float | None = None
    ar_db: float | None = None
    ac_db: float | None = None
    phase_threshold: float | None = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', BandKind(self.kind))
        if self.kind is BandKind.BANDPASS:
            object.__setattr__(self, 'wp', _as_pair(self.wp))
            object.__setattr__(self, 'wr', _as_pair(self.wr))
        self._validate()

    @classmethod
    def from_hz(cls, kind: BandKind | str, fs_hz: float, *,
                wp_hz=None, wr_hz=None, wc_hz=None,
                ap_db=None, ar_db=None, ac_db=None,
                phase_threshold=None) -> 'FilterSpecBand':
        """
        Build a spec from frequencies in Hz, w = 2 pi f / fs.
        """
        def to_rad(f):
            if f is None:
                return None
            if isinstance(f, (list, tuple)):
                return tuple(2.0 * math.pi * float(x) / fs_hz for x in f)
            return 2.0 * math.pi * float(f) / fs_hz

        return cls(BandKind(kind), to_rad(wp_hz), to_rad(wr_hz), to_rad(wc_hz),
                   ap_db, ar_db, ac_db, phase_threshold)

    def frequencies(self) -> list[float]:
        out = []
        for f in (self.wp, self.wr, self.wc):
            if f is None:
                continue
            out.extend(f if isinstance(f, tuple) else (f,))
        return out

    def passbands(self) -> list[Band]:
        """
        Passband interval(s), used as the default region of the phase check.
        """
        if self.wp is None:
            return []
        if self.kind is BandKind.LOWPASS:
            return [(0.0, self.wp)]
        if self.kind is BandKind.HIGHPASS:
            return [(self.wp, math.pi)]
        return [self.wp]

    def _validate(self) -> None:
        for f in self.frequencies():
            if not 0.0 < f < math.pi:
                raise SpecError(f"frequency {f!r} rad/sample is outside (0, pi)")

        if self.kind is BandKind.BANDPASS:
            if self.wc is not None:
                raise SpecError("bandpass specs do not take a cutoff frequency")
            for name, pair in (("wp", self.wp), ("wr", self.wr)):
                if pair is not None and not pair[0] < pair[1]:
                    raise SpecError(f"{name} pair must be ordered low < high, got {pair}")
            if self.wp is not None and self.wr is not None:
                if not self.wr[0] < self.wp[0] < self.wp[1] < self.wr[1]:
                    raise SpecError("bandpass edges must satisfy wr1 < wp1 < wp2 < wr2")
        else:
            for name in ("wp", "wr"):
                if isinstance(getattr(self, name), tuple):
                    raise SpecError(f"{self.kind.value} specs take a scalar {name}")
            if self.wp is not None and self.wr is not None:
                if self.kind is BandKind.LOWPASS and not self.wp < self.wr:
                    raise SpecError("lowpass passband edge must lie below the stopband edge")
                if self.kind is BandKind.HIGHPASS and not self.wr < self.wp:
                    raise SpecError("highpass stopband edge must lie below the passband edge")

        for freq, gain, label in ((self.wp, self.ap_db, "passband"),
                                  (self.wr, self.ar_db, "stopband"),
                                  (self.wc, self.ac_db, "cutoff")):
            if (freq is None) != (gain is None):
                raise SpecError(f"{label} frequency and gain must be given together")

        if self.ap_db is not None and self.ar_db is not None and not self.ap_db > self.ar_db:
            raise SpecError(f"passband gain {self.ap_db} dB must exceed stopband gain {self.ar_db} dB")
        if self.phase_threshold is not None and not self.phase_threshold > 0:
            raise SpecError("phase threshold must be positive")


@dataclass(frozen=True)
class FrequencyResponse:
    """
    H_k at the digital frequencies 2 pi k / N, k = 0..N-1.
    """
    values: np.ndarray
    source: Literal['ideal', 'fixed'] = 'ideal'

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def half(self) -> int:
        return self.n // 2 + 1

    @property
    def omega(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.values)

    def magnitude_db(self, floor: float = 1e-300) -> np.ndarray:
        return 20.0 * np.log10(np.maximum(self.magnitude, floor))


@dataclass(frozen=True)
class Witness:
    k: int
    omega: float
    observed: float
    bound: float
    band: str


@dataclass(frozen=True)
class MagnitudeVerdict:
    status: MagnitudeStatus
    witness: Witness | None = None

    @property
    def passed(self) -> bool:
        return self.status is MagnitudeStatus.S


@dataclass(frozen=True)
class PhaseVerdict:
    status: PhaseStatus
    max_delta: float
    witness: Witness | None = None

    @property
    def passed(self) -> bool:
        return self.status is PhaseStatus.S


def sampled_dtft(h: Sequence[float] | np.ndarray, n: int,
                 direct: bool = False,
                 source: Literal['ideal', 'fixed'] = 'ideal') -> FrequencyResponse:
    """
    H_k = sum_n h[n] exp(-j 2 pi k n / N). The FFT path agrees with the direct
    sum to rounding error; direct=True evaluates the sum as written.
    """
    h = np.asarray(h, dtype=float)
    if len(h) > n:
        raise GridError(f"impulse response of length {len(h)} does not fit a {n}-point grid")
    if direct:
        k = np.arange(n)
        kernel = np.exp(-2j * np.pi * np.outer(k, np.arange(len(h))) / n)
        values = kernel @ h
    else:
        values = np.fft.fft(h, n)
    return FrequencyResponse(values, source)


def _tail_bound(h: np.ndarray) -> tuple[float, float]:
    """
    Estimate sum_{n>=N} |h[n]| from the geometric decay of the last decade of
    samples. Returns (tail estimate, decay ratio per sample).
    """
    window = h[-max(10, len(h) // 10):]
    half = len(window) // 2
    first = np.max(np.abs(window[:half]))
    last = np.max(np.abs(window[half:]))
    if last == 0.0:
        return 0.0, 0.0
    if first == 0.0:
        return math.inf, math.inf
    rho = (last / first) ** (1.0 / half)
    if rho >= 1.0:
        return math.inf, rho
    return last * rho / (1.0 - rho), rho


def response_of(filt: TransferFunction | QuantizedFilter, n: int = DEFAULT_GRID,
                method: ResponseMethod = ResponseMethod.IMPULSE_TRUNCATION) -> FrequencyResponse:
    """
    Frequency response of the ideal (TransferFunction) or quantized filter.

    impulse_truncation follows the sampled DTFT of h truncated to N samples;
    rational_eval evaluates B(e^jw)/A(e^jw) directly and serves as a
    cross-check oracle.
    """
    if n < 2:
        raise GridError(f"grid size must be at least 2, got {n}")
    source: Literal['ideal', 'fixed'] = 'fixed' if isinstance(filt, QuantizedFilter) else 'ideal'
    tf = filt.as_transfer_function() if isinstance(filt, QuantizedFilter) else filt
    method = ResponseMethod(method)

    if method is ResponseMethod.RATIONAL_EVAL:
        omega = 2.0 * np.pi * np.arange(n) / n
        _, values = freqz(tf.b, tf.a, worN=omega)
        return FrequencyResponse(values, source)

    if tf.is_fir:
        taps = np.asarray(tf.b) / tf.a[0]
        return sampled_dtft(taps, n, source=source)

    h = impulse_response(tf, n)
    tail, rho = _tail_bound(h)
    resp = sampled_dtft(h, n, source=source)
    limit = TAIL_TOLERANCE * float(np.max(resp.magnitude))
    logger.debug("truncation tail estimate %.3g (decay %.6f) against %.3g", tail, rho, limit)
    if tail >= limit and tail > 0.0:
        raise TruncationError(f"impulse response tail {tail:.3g} exceeds {limit:.3g} at N={n}",
                              _suggest_grid(n, tail, rho, limit))
    return resp


def _suggest_grid(n: int, tail: float, rho: float, limit: float) -> int:
    if not 0.0 < rho < 1.0 or limit <= 0.0:
        return 2 * n
    extra = math.log(limit / tail) / math.log(rho)
    return 1 << math.ceil(math.log2(n + max(extra, 1.0)))


def _bins(resp: FrequencyResponse, lo: float, hi: float) -> np.ndarray:
    """
    Half-grid bins whose frequency lies in the closed interval [lo, hi].
    """
    k = np.arange(resp.half)
    omega = 2.0 * np.pi * k / resp.n
    return k[(omega >= lo) & (omega <= hi)]


def _nearest_bin(resp: FrequencyResponse, w: float) -> int:
    return int(min(round(w * resp.n / (2.0 * np.pi)), resp.half - 1))


@dataclass(frozen=True)
class _Clause:
    band: str
    status: MagnitudeStatus
    bins: np.ndarray
    bound: float
    below: bool      # violated when |H| < bound (otherwise when |H| > bound)

    def first_violation(self, mag: np.ndarray) -> int | None:
        if len(self.bins) == 0:
            return None
        vals = mag[self.bins]
        bad = vals < self.bound if self.below else vals > self.bound
        hits = np.nonzero(bad)[0]
        return int(self.bins[hits[0]]) if len(hits) else None


def _evaluate(resp: FrequencyResponse, clauses: list[_Clause]) -> MagnitudeVerdict:
    if not clauses:
        raise SpecError("spec defines no band to check")
    mag = resp.magnitude
    found: list[tuple[int, _Clause]] = []
    for clause in clauses:
        k = clause.first_violation(mag)
        if k is not None:
            found.append((k, clause))
    if not found:
        return MagnitudeVerdict(MagnitudeStatus.S)

    # Lowest-frequency violation wins
    k, clause = min(found, key=lambda item: item[0])
    witness = Witness(k, 2.0 * math.pi * k / resp.n, float(mag[k]), clause.bound, clause.band)
    verdict = MagnitudeVerdict(clause.status, witness)
    if not confirm_witness(resp, verdict, below=clause.below):
        raise AssertionError(f"witness at bin {k} does not reproduce the {clause.status.value} violation")
    return verdict


def confirm_witness(resp: FrequencyResponse, verdict: MagnitudeVerdict, below: bool | None = None) -> bool:
    """
    Re-evaluate the violated inequality at the witness bin.
    """
    if verdict.witness is None:
        return verdict.status is MagnitudeStatus.S
    w = verdict.witness
    observed = abs(complex(resp.values[w.k]))
    if below is None:
        below = verdict.status is MagnitudeStatus.FP or (w.band == "cutoff-hp")
    return observed < w.bound if below else observed > w.bound


def check_magnitude_lp(resp: FrequencyResponse, spec: FilterSpecBand) -> MagnitudeVerdict:
    if spec.kind is not BandKind.LOWPASS:
        raise SpecError(f"lowpass check applied to a {spec.kind.value} spec")
    clauses = []
    if spec.wp is not None:
        clauses.append(_Clause("passband", MagnitudeStatus.FP, _bins(resp, 0.0, spec.wp), db_to_lin(spec.ap_db), True))
    if spec.wc is not None:
        k = np.array([_nearest_bin(resp, spec.wc)])
        clauses.append(_Clause("cutoff-lp", MagnitudeStatus.FC, k, db_to_lin(spec.ac_db), False))
    if spec.wr is not None:
        clauses.append(_Clause("stopband", MagnitudeStatus.FS, _bins(resp, spec.wr, math.pi), db_to_lin(spec.ar_db), False))
    return _evaluate(resp, clauses)


def check_magnitude_hp(resp: FrequencyResponse, spec: FilterSpecBand) -> MagnitudeVerdict:
    if spec.kind is not BandKind.HIGHPASS:
        raise SpecError(f"highpass check applied to a {spec.kind.value} spec")
    clauses = []
    if spec.wr is not None:
        clauses.append(_Clause("stopband", MagnitudeStatus.FS, _bins(resp, 0.0, spec.wr), db_to_lin(spec.ar_db), False))
    if spec.wc is not None:
        # Highpass cutoff fails when the gain is still below Ac at wc
        k = np.array([_nearest_bin(resp, spec.wc)])
        clauses.append(_Clause("cutoff-hp", MagnitudeStatus.FC, k, db_to_lin(spec.ac_db), True))
    if spec.wp is not None:
        clauses.append(_Clause("passband", MagnitudeStatus.FP, _bins(resp, spec.wp, math.pi), db_to_lin(spec.ap_db), True))
    return _evaluate(resp, clauses)


def check_magnitude_bp(resp: FrequencyResponse, spec: FilterSpecBand) -> MagnitudeVerdict:
    if spec.kind is not BandKind.BANDPASS:
        raise SpecError(f"bandpass check applied to a {spec.kind.value} spec")
    clauses = []
    if spec.wr is not None:
        ar = db_to_lin(spec.ar_db)
        clauses.append(_Clause("lower stopband", MagnitudeStatus.FS, _bins(resp, 0.0, spec.wr[0]), ar, False))
        clauses.append(_Clause("upper stopband", MagnitudeStatus.FS, _bins(resp, spec.wr[1], math.pi), ar, False))
    if spec.wp is not None:
        clauses.append(_Clause("passband", MagnitudeStatus.FP, _bins(resp, *spec.wp), db_to_lin(spec.ap_db), True))
    return _evaluate(resp, clauses)


def check_magnitude(resp: FrequencyResponse, spec: FilterSpecBand) -> MagnitudeVerdict:
    checks = {
        BandKind.LOWPASS: check_magnitude_lp,
        BandKind.HIGHPASS: check_magnitude_hp,
        BandKind.BANDPASS: check_magnitude_bp,
    }
    return checks[spec.kind](resp, spec)


def check_phase(ideal: FrequencyResponse, fixed: FrequencyResponse, threshold: float,
                band: Band | Sequence[Band] | None = None) -> PhaseVerdict:
    """
    Fails when the wrapped phase difference exceeds threshold (rad) at any bin
    of the band(s); the default band is the whole half grid [0, pi].
    """
    if ideal.n != fixed.n:
        raise GridError(f"grid sizes differ: {ideal.n} vs {fixed.n}")
    if not threshold > 0:
        raise SpecError("phase threshold must be positive")

    if band is None or len(band) == 0:
        bands: list[Band] = [(0.0, math.pi)]
    elif len(band) == 2 and not isinstance(band[0], (tuple, list)):
        bands = [(float(band[0]), float(band[1]))]
    else:
        bands = [(float(lo), float(hi)) for lo, hi in band]
    bins = np.unique(np.concatenate([_bins(ideal, lo, hi) for lo, hi in bands]))
    if len(bins) == 0:
        return PhaseVerdict(PhaseStatus.S, 0.0)

    delta = np.abs(wrap_phase(np.angle(fixed.values[bins]) - np.angle(ideal.values[bins])))
    max_delta = float(np.max(delta))
    hits = np.nonzero(delta > threshold)[0]
    if len(hits) == 0:
        return PhaseVerdict(PhaseStatus.S, max_delta)
    k = int(bins[hits[0]])
    witness = Witness(k, 2.0 * math.pi * k / ideal.n, float(delta[hits[0]]), threshold, "phase")
    return PhaseVerdict(PhaseStatus.F, max_delta, witness)
