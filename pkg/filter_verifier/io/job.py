"""
Verification jobs: a JSON document naming the filter, the spec it must meet
and the fixed-point configuration, resolved against built-in defaults and
command-line overrides (defaults < job file < overrides).

    {
      "schema_version": 1,
      "filter": {"b": [...], "a": [...], "fs_hz": 48000},
      "spec": {"kind": "lowpass", "wp_hz": 4800, "ap_db": -1, "wr_hz": 19200, "ar_db": -20,
               "phase_threshold_rad": 0.5},
      "fixedpoint": {"format": "1,5", "rounding": "nearest", "overflow": "detect"},
      "verification": {"passes": [...], "grid": 1024, "horizon": 8, "strategy": "directed", ...},
      "outputs": {"csv": "...", "report": "...", "data": "...", "plot": "..."}
    }
"""
import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

from ..core.filtermodel import TransferFunction
from ..core.fixedpoint import FixedFormat, OverflowMode, RoundingMode
from ..core.fixtures import get_fixture
from ..core.overflow import DEFAULT_RESTARTS, CheckSite, SearchStrategy, default_seed
from ..core.response import DEFAULT_GRID, BandKind, FilterSpecBand, ResponseMethod
from ..errors import FormatError, JobConfigError, SpecError, VerificationError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_HORIZON = 8


class Pass(str, Enum):
    STABILITY = "stability"
    MAGNITUDE = "magnitude"
    PHASE = "phase"
    OVERFLOW = "overflow"


# Execution order: IIR magnitude via the truncated DTFT presumes a decaying h
PASS_ORDER = (Pass.STABILITY, Pass.MAGNITUDE, Pass.PHASE, Pass.OVERFLOW)


class PhaseBand(str, Enum):
    PASSBAND = "passband"
    FULL = "full"


@dataclass(frozen=True)
class Outputs:
    csv: Path | None = None
    report: Path | None = None
    data: Path | None = None
    plot: Path | None = None


@dataclass(frozen=True)
class JobConfig:
    tf: TransferFunction
    spec: FilterSpecBand
    fmt: FixedFormat
    rounding: RoundingMode = RoundingMode.NEAREST
    overflow_mode: OverflowMode = OverflowMode.DETECT
    passes: tuple[Pass, ...] = PASS_ORDER
    grid: int = DEFAULT_GRID
    horizon: int = DEFAULT_HORIZON
    strategy: SearchStrategy | None = None
    restarts: int = DEFAULT_RESTARTS
    seed: int = field(default_factory=default_seed)
    check_site: CheckSite = CheckSite.OUTPUT
    input_range: tuple[float, float] | None = None
    phase_band: PhaseBand = PhaseBand.PASSBAND
    method: ResponseMethod = ResponseMethod.IMPULSE_TRUNCATION
    outputs: Outputs = field(default_factory=Outputs)
    source: str = "<memory>"

    def __post_init__(self):
        if not self.passes:
            raise JobConfigError("verification.passes", "at least one pass must be selected")
        ordered = tuple(p for p in PASS_ORDER if p in self.passes)
        object.__setattr__(self, 'passes', ordered)
        if self.grid < 2:
            raise JobConfigError("verification.grid", f"grid must be >= 2, got {self.grid}")
        if self.horizon < 1:
            raise JobConfigError("verification.horizon", f"horizon must be >= 1, got {self.horizon}")
        if self.restarts < 0:
            raise JobConfigError("verification.restarts", f"restarts must be >= 0, got {self.restarts}")

    @property
    def resolved_strategy(self) -> SearchStrategy:
        if self.strategy is not None:
            return self.strategy
        return SearchStrategy.ANALYTIC_FIR if self.tf.is_fir else SearchStrategy.DIRECTED

    def echo(self) -> dict[str, Any]:
        """
        The configuration as recorded in a report.
        """
        return {
            "source": self.source,
            "filter": self.tf.to_dict(),
            "format": str(self.fmt),
            "rounding": self.rounding.value,
            "overflow_mode": self.overflow_mode.value,
            "passes": [p.value for p in self.passes],
            "grid": self.grid,
            "horizon": self.horizon,
            "strategy": self.resolved_strategy.value,
            "restarts": self.restarts,
            "seed": self.seed,
            "check_site": self.check_site.value,
            "input_range": list(self.input_range) if self.input_range else None,
            "phase_band": self.phase_band.value,
            "method": self.method.value,
        }


def _require(section: dict, key: str, path: str) -> Any:
    if key not in section:
        raise JobConfigError(f"{path}.{key}", "required field is missing")
    return section[key]


def _section(doc: dict, key: str, required: bool = False) -> dict:
    if key not in doc:
        if required:
            raise JobConfigError(key, "required section is missing")
        return {}
    value = doc[key]
    if not isinstance(value, dict):
        raise JobConfigError(key, f"expected an object, got {type(value).__name__}")
    return value


def _number_list(value: Any, path: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise JobConfigError(path, "expected a non-empty list of numbers")
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise JobConfigError(f"{path}[{i}]", f"expected a finite number, got {v!r}")
    return tuple(float(v) for v in value)


def _enum(cls: type[Enum], value: Any, path: str):
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise JobConfigError(path, f"{value!r} is not one of: {choices}") from None


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool):
        raise JobConfigError(path, f"expected an integer, got {value!r}")
    if isinstance(value, str):
        try:
            return int(value, 0)
        except ValueError:
            raise JobConfigError(path, f"expected an integer, got {value!r}") from None
    if not isinstance(value, int):
        raise JobConfigError(path, f"expected an integer, got {value!r}")
    return value


def parse_filter(section: dict) -> TransferFunction:
    b = _number_list(_require(section, "b", "filter"), "filter.b")
    a = _number_list(section.get("a", [1.0]), "filter.a")
    fs_hz = section.get("fs_hz", 48000.0)
    if isinstance(fs_hz, bool) or not isinstance(fs_hz, (int, float)):
        raise JobConfigError("filter.fs_hz", f"expected a number, got {fs_hz!r}")
    try:
        return TransferFunction(b, a, float(fs_hz))
    except VerificationError as e:
        raise JobConfigError("filter", str(e)) from e


def parse_spec(section: dict, fs_hz: float) -> FilterSpecBand:
    kind = _enum(BandKind, _require(section, "kind", "spec"), "spec.kind")
    known = {"kind", "wp_hz", "wr_hz", "wc_hz", "ap_db", "ar_db", "ac_db", "phase_threshold_rad"}
    for key in section:
        if key not in known:
            raise JobConfigError(f"spec.{key}", "unknown field")
    try:
        return FilterSpecBand.from_hz(
            kind, fs_hz,
            wp_hz=section.get("wp_hz"), wr_hz=section.get("wr_hz"), wc_hz=section.get("wc_hz"),
            ap_db=section.get("ap_db"), ar_db=section.get("ar_db"), ac_db=section.get("ac_db"),
            phase_threshold=section.get("phase_threshold_rad"),
        )
    except (SpecError, TypeError, ValueError) as e:
        raise JobConfigError("spec", str(e)) from e


def parse_format(value: Any, path: str = "fixedpoint.format") -> FixedFormat:
    if not isinstance(value, str):
        raise JobConfigError(path, f"expected a string \"m,n\", got {value!r}")
    try:
        return FixedFormat.parse(value)
    except FormatError as e:
        raise JobConfigError(path, str(e)) from e


def parse_input_range(value: Any, path: str = "verification.input_range") -> tuple[float, float]:
    if isinstance(value, str):
        value = value.split(",")
    try:
        lo, hi = (float(v) for v in value)
    except (TypeError, ValueError):
        raise JobConfigError(path, f"expected two numbers lo,hi, got {value!r}") from None
    if not lo <= hi:
        raise JobConfigError(path, f"lower bound {lo} exceeds upper bound {hi}")
    return lo, hi


def _verification(section: dict) -> dict[str, Any]:
    out: dict[str, Any] = {}
    path = "verification"
    if "passes" in section:
        passes = section["passes"]
        if not isinstance(passes, list):
            raise JobConfigError(f"{path}.passes", "expected a list")
        out["passes"] = tuple(_enum(Pass, p, f"{path}.passes[{i}]") for i, p in enumerate(passes))
    for key in ("grid", "horizon", "restarts", "seed"):
        if key in section:
            out[key] = _int(section[key], f"{path}.{key}")
    if "strategy" in section:
        out["strategy"] = _enum(SearchStrategy, section["strategy"], f"{path}.strategy")
    if "check_site" in section:
        out["check_site"] = _enum(CheckSite, section["check_site"], f"{path}.check_site")
    if "phase_band" in section:
        out["phase_band"] = _enum(PhaseBand, section["phase_band"], f"{path}.phase_band")
    if "method" in section:
        out["method"] = _enum(ResponseMethod, section["method"], f"{path}.method")
    if section.get("input_range") is not None:
        out["input_range"] = parse_input_range(section["input_range"])
    return out


def _outputs(section: dict) -> Outputs:
    paths = {}
    for key in ("csv", "report", "data", "plot"):
        if section.get(key) is not None:
            paths[key] = Path(section[key])
    return Outputs(**paths)


def _build(base: dict[str, Any], overrides: dict[str, Any] | None) -> JobConfig:
    settings = dict(base)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "outputs":
            settings["outputs"] = replace(settings.get("outputs", Outputs()),
                                          **{k: v for k, v in vars(value).items() if v is not None})
        else:
            settings[key] = value
    if "fmt" not in settings:
        raise JobConfigError("fixedpoint.format", "required field is missing")
    config = JobConfig(**settings)
    logger.info("job %s: <%s>, passes %s", config.source, config.fmt, ",".join(p.value for p in config.passes))
    return config


def parse_job_document(doc: Any, source: str = "<memory>",
                       overrides: dict[str, Any] | None = None) -> JobConfig:
    if not isinstance(doc, dict):
        raise JobConfigError("$", "job document must be a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise JobConfigError("schema_version", f"unsupported schema version {version!r}")
    known = {"schema_version", "filter", "spec", "fixedpoint", "verification", "outputs"}
    for key in doc:
        if key not in known:
            raise JobConfigError(key, "unknown section")

    tf = parse_filter(_section(doc, "filter", required=True))
    spec = parse_spec(_section(doc, "spec", required=True), tf.sample_rate_hz)

    settings: dict[str, Any] = {"tf": tf, "spec": spec, "source": source}
    fixedpoint = _section(doc, "fixedpoint")
    if "format" in fixedpoint:
        settings["fmt"] = parse_format(fixedpoint["format"])
    if "rounding" in fixedpoint:
        settings["rounding"] = _enum(RoundingMode, fixedpoint["rounding"], "fixedpoint.rounding")
    if "overflow" in fixedpoint:
        settings["overflow_mode"] = _enum(OverflowMode, fixedpoint["overflow"], "fixedpoint.overflow")
    settings.update(_verification(_section(doc, "verification")))
    settings["outputs"] = _outputs(_section(doc, "outputs"))
    return _build(settings, overrides)


def parse_job(path: str | Path, overrides: dict[str, Any] | None = None) -> JobConfig:
    """
    Load and resolve a job file. Raises FileNotFoundError for a missing file
    and JobConfigError (with the offending field path) for schema violations.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise JobConfigError("$", f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    return parse_job_document(doc, str(path), overrides)


def job_from_fixture(name: str, overrides: dict[str, Any] | None = None) -> JobConfig:
    try:
        fixture = get_fixture(name)
    except KeyError as e:
        raise JobConfigError("fixture", e.args[0]) from None
    settings = {"tf": fixture.tf, "spec": fixture.spec, "fmt": fixture.fmt,
                "grid": fixture.grid, "source": f"fixture:{name}"}
    return _build(settings, overrides)
