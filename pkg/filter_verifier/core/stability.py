"""
Jury stability test on the quantized characteristic polynomial

    S(z) = a_0 z^N + a_1 z^(N-1) + ... + a_N

and an independent root-modulus oracle used to validate it.

Conditions:
    R1: S(1) > 0
    R2: (-1)^N S(-1) > 0
    R3: |a_N| < |a_0|
    R4: every reduced row of the Jury table keeps a positive leading pivot

R3 compares magnitudes in this direction; the reversed inequality would
reject S(z) = z - 0.5, whose only root is 0.5.

Each reduction divides by the leading entry of the active row and removes
the trailing one. Dividing by the trailing entry a_N instead needs a special
case for a_N = 0, which is only a root at the origin. Here a_N = 0 gives a
zero ratio and the row shrinks; the one division hazard is a zero leading
pivot, which is reported as marginal.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import ConvergenceError, SpecError
from .filtermodel import QuantizedFilter, TransferFunction

logger = logging.getLogger(__name__)

MARGINAL_TOLERANCE = 1e-9
ORACLE_TOLERANCE = 1e-10
ORACLE_MAX_DEGREE = 32
ORACLE_MAX_ITER = 500


class JuryCondition(str, Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    UNIT_CIRCLE = "unit-circle"


class StabilityStatus(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class CharPoly:
    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise SpecError("characteristic polynomial needs degree >= 1")
        if self.coeffs[0] == 0.0:
            raise SpecError("leading coefficient a_0 must be non-zero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def of(cls, filt: QuantizedFilter | TransferFunction) -> 'CharPoly':
        tf = filt.as_transfer_function() if isinstance(filt, QuantizedFilter) else filt
        return cls(tf.a)

    def normalized(self) -> 'CharPoly':
        """
        Same roots, a_0 > 0.
        """
        if self.coeffs[0] > 0:
            return self
        return CharPoly(tuple(-c for c in self.coeffs))

    def __call__(self, z: float) -> float:
        return float(np.polyval(self.coeffs, z))


@dataclass(frozen=True)
class JuryTable:
    """
    Row pairs V^(0)..V^(N-2), each stored at full width N+1. Row 1 of V^(k)
    is the k-times reduced polynomial; row 2 is its reversal. Columns beyond
    the active width N+1-k are zero.
    """
    rows: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...]
    closing_pivot: float | None = None

    @property
    def pivots(self) -> list[float]:
        """
        First-column entries m_11, m_31, ..., m_(2N-3)1, followed by the pivot
        of the final reduction.
        """
        out = [row1[0] for row1, _ in self.rows]
        if self.closing_pivot is not None:
            out.append(self.closing_pivot)
        return out

    @property
    def indeterminate(self) -> bool:
        return any(p == 0.0 for p in self.pivots)


@dataclass(frozen=True)
class StabilityVerdict:
    status: StabilityStatus
    failed_condition: JuryCondition | None = None
    conditions: dict[str, bool] = field(default_factory=dict)
    jury_table: JuryTable | None = None
    max_root: float | None = None

    @property
    def stable(self) -> bool:
        return self.status is StabilityStatus.STABLE


def _reduce(row: list[float]) -> list[float]:
    """
    One Jury reduction of an active row: subtract the reversal scaled so the
    trailing entry vanishes. Leaves a row one entry shorter.
    """
    ratio = row[-1] / row[0]
    rev = row[::-1]
    return [row[j] - ratio * rev[j] for j in range(len(row) - 1)]


def build_jury_table(p: CharPoly) -> JuryTable:
    p = p.normalized()
    width = p.degree + 1
    active = list(p.coeffs)
    rows = []
    closing = None
    for k in range(max(p.degree - 1, 1)):
        padded = active + [0.0] * (width - len(active))
        reversed_row = active[::-1] + [0.0] * (width - len(active))
        rows.append((tuple(padded), tuple(reversed_row)))
        if active[0] == 0.0:
            logger.debug("zero Jury pivot in row pair %d", k)
            break
        active = _reduce(active)
        if k == p.degree - 2 or p.degree < 2:
            closing = active[0]
    return JuryTable(tuple(rows), closing)


def jury_conditions(p: CharPoly, table: JuryTable | None = None) -> dict[str, bool]:
    p = p.normalized()
    n = p.degree
    if table is None:
        table = build_jury_table(p)
    a = p.coeffs
    return {
        JuryCondition.R1.value: p(1.0) > 0.0,
        JuryCondition.R2.value: (-1) ** n * p(-1.0) > 0.0,
        JuryCondition.R3.value: abs(a[-1]) < abs(a[0]),
        JuryCondition.R4.value: all(pivot > 0.0 for pivot in table.pivots[1:]),
    }


def root_magnitude_oracle(p: CharPoly, tol: float = ORACLE_TOLERANCE, max_iter: int = ORACLE_MAX_ITER) -> float:
    """
    Largest root modulus by Aberth-Ehrlich simultaneous iteration.

    Converges when every correction is below tol (relative) or every
    residual is within the rounding-error bound of the evaluation, which
    lets clustered roots settle.
    """
    if p.degree > ORACLE_MAX_DEGREE:
        raise SpecError(f"root oracle supports degree <= {ORACLE_MAX_DEGREE}, got {p.degree}")
    coeffs = np.array(p.coeffs, dtype=float)
    # Trailing zeros are roots at the origin
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs = coeffs[:-1]
    n = len(coeffs) - 1
    if n == 0:
        return 0.0
    if n == 1:
        return abs(coeffs[1] / coeffs[0])

    deriv = coeffs[:-1] * np.arange(n, 0, -1)
    abs_coeffs = np.abs(coeffs)
    radius = 1.0 + np.max(np.abs(coeffs[1:] / coeffs[0]))
    angles = 2.0 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    eps = np.finfo(float).eps

    for it in range(max_iter):
        pv = np.polyval(coeffs, z)
        dpv = np.polyval(deriv, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        with np.errstate(divide='ignore', invalid='ignore'):
            newton = pv / dpv
            delta = newton / (1.0 - newton * inv.sum(axis=1))
        delta = np.where(np.isfinite(delta), delta, 0.0)
        z = z - delta

        residual_bound = 4.0 * n * eps * np.polyval(abs_coeffs, np.abs(z))
        small_step = np.abs(delta) <= tol * np.maximum(1.0, np.abs(z))
        at_noise = np.abs(np.polyval(coeffs, z)) <= residual_bound
        if np.all(small_step | at_noise):
            logger.debug("root oracle converged after %d iterations", it + 1)
            return float(np.max(np.abs(z)))

    raise ConvergenceError(f"root oracle did not converge in {max_iter} iterations (degree {n})")


def check_stability(qf: QuantizedFilter) -> StabilityVerdict:
    """
    Jury verdict on the quantized denominator, cross-checked by the root oracle.
    Exact-zero pivots and roots within 1e-9 of the unit circle are marginal.
    """
    if qf.is_fir:
        return StabilityVerdict(StabilityStatus.STABLE, max_root=0.0)

    tf = qf.as_transfer_function()
    # Trailing zero coefficients only add poles at the origin
    a = list(tf.a)
    while len(a) > 2 and a[-1] == 0.0:
        a.pop()
    p = CharPoly(tuple(a))
    table = build_jury_table(p) if p.degree >= 2 else JuryTable((), None)
    conditions = jury_conditions(p, table)

    max_root = None
    if p.degree <= ORACLE_MAX_DEGREE:
        try:
            max_root = root_magnitude_oracle(p)
        except ConvergenceError as e:
            logger.warning("%s; reporting the Jury verdict alone", e)

    failed = next((JuryCondition(name) for name, ok in conditions.items() if not ok), None)

    if table.indeterminate:
        logger.warning("zero pivot in the Jury table: marginal stability")
        return StabilityVerdict(StabilityStatus.MARGINAL, failed or JuryCondition.R4, conditions, table, max_root)
    if max_root is not None and abs(max_root - 1.0) <= MARGINAL_TOLERANCE:
        logger.warning("pole within %.0e of the unit circle (max |root| = %.12f)", MARGINAL_TOLERANCE, max_root)
        return StabilityVerdict(StabilityStatus.MARGINAL, failed or JuryCondition.UNIT_CIRCLE, conditions, table, max_root)
    if failed is not None:
        return StabilityVerdict(StabilityStatus.UNSTABLE, failed, conditions, table, max_root)
    return StabilityVerdict(StabilityStatus.STABLE, None, conditions, table, max_root)
