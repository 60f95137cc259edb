"""
Command-line front-end.

    filter-verifier verify --job job.json [--passes magnitude,phase] [--format 4,10] ...
    filter-verifier verify --fixture ilp2 --emit-csv ilp2.csv
    filter-verifier fixtures

Exit codes: 0 all passes hold, 1 at least one violation, 2 usage or
configuration error, 3 indeterminate (marginal stability, non-convergent
root oracle) or internal error.
"""
import argparse
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .core.filtermodel import QuantizedFilter, quantize_filter
from .core.fixedpoint import OverflowMode, RoundingMode
from .core.fixtures import fixture_names, get_fixture
from .core.overflow import CheckSite, SearchStrategy, search_overflow, simulate_fixed
from .core.response import (FrequencyResponse, ResponseMethod, Witness, check_magnitude, check_phase,
                            response_of)
from .core.stability import StabilityStatus, check_stability
from .errors import (BudgetExceededError, ConvergenceError, JobConfigError, StrategyError, TruncationError,
                     VerificationError)
from .io.export import emit_response_csv, response_table, save_response_data
from .io.job import (JobConfig, Outputs, Pass, PhaseBand, job_from_fixture, parse_format, parse_input_range,
                     parse_job)
from .io.report import ExitCode, Outcome, PassResult, Report
from .utils.log import setup_logging

logger = logging.getLogger(__name__)


def _witness(w: Witness | None) -> dict[str, Any] | None:
    if w is None:
        return None
    return {"k": w.k, "omega": round(w.omega, 12), "observed": float(w.observed), "bound": float(w.bound),
            "band": w.band}


class _Run:
    """
    State shared by the passes of one job.
    """
    def __init__(self, job: JobConfig):
        self.job = job
        self.report = Report(job.echo())
        self.qf: QuantizedFilter = quantize_filter(job.tf, job.fmt, job.rounding)
        self.ideal: FrequencyResponse | None = None
        self.fixed: FrequencyResponse | None = None
        self.gate_reason: str | None = None

    def responses(self) -> tuple[FrequencyResponse, FrequencyResponse]:
        if self.ideal is None or self.fixed is None:
            self.ideal = response_of(self.job.tf, self.job.grid, self.job.method)
            self.fixed = response_of(self.qf, self.job.grid, self.job.method)
        return self.ideal, self.fixed

    def stability(self, result: PassResult) -> None:
        verdict = check_stability(self.qf)
        result.status = verdict.status.value
        result.details = {
            "conditions": verdict.conditions,
            "failed_condition": verdict.failed_condition.value if verdict.failed_condition else None,
            "max_root": None if verdict.max_root is None else round(verdict.max_root, 12),
        }
        if verdict.jury_table is not None:
            result.details["pivots"] = [round(p, 15) for p in verdict.jury_table.pivots]
        if verdict.status is StabilityStatus.STABLE:
            result.outcome = Outcome.PASS
        elif verdict.status is StabilityStatus.UNSTABLE:
            result.outcome = Outcome.VIOLATION
            self.gate_reason = f"quantized filter is unstable ({verdict.failed_condition.value} fails)"
        else:
            result.outcome = Outcome.INDETERMINATE
            self.gate_reason = "quantized filter is marginally stable"

    def magnitude(self, result: PassResult) -> None:
        _, fixed = self.responses()
        verdict = check_magnitude(fixed, self.job.spec)
        result.status = verdict.status.value
        result.witness = _witness(verdict.witness)
        result.outcome = Outcome.PASS if verdict.passed else Outcome.VIOLATION

    def phase(self, result: PassResult) -> None:
        spec = self.job.spec
        if spec.phase_threshold is None:
            logger.info("spec has no phase threshold; phase pass skipped")
            result.outcome = Outcome.SKIPPED
            result.reason = "spec has no phase threshold"
            return
        ideal, fixed = self.responses()
        band = spec.passbands() if self.job.phase_band is PhaseBand.PASSBAND else None
        verdict = check_phase(ideal, fixed, spec.phase_threshold, band)
        result.status = verdict.status.value
        result.witness = _witness(verdict.witness)
        result.details = {"max_delta_rad": round(verdict.max_delta, 12), "threshold_rad": spec.phase_threshold}
        result.outcome = Outcome.PASS if verdict.passed else Outcome.VIOLATION

    def overflow(self, result: PassResult) -> None:
        job = self.job
        verdict = search_overflow(self.qf, job.horizon, job.resolved_strategy,
                                  seed=job.seed, restarts=job.restarts, input_range=job.input_range,
                                  rounding=job.rounding, check_site=job.check_site)
        result.details = {"strategy": verdict.strategy.value, "horizon": verdict.horizon,
                          "explored": verdict.explored, "complete": verdict.complete, **verdict.details}
        cex = verdict.counterexample
        if cex is None:
            result.status = "S"
            result.outcome = Outcome.PASS
            return
        result.status = "F"
        result.outcome = Outcome.VIOLATION
        result.counterexample = cex.to_dict()
        if job.overflow_mode is not OverflowMode.DETECT:
            # Replay under the configured arithmetic to show what the hardware would store
            replay = simulate_fixed(self.qf, cex.inputs, job.overflow_mode, job.rounding, job.check_site)
            result.details["replay"] = {
                "mode": job.overflow_mode.value,
                "events": len(replay.events),
                "outputs": [str(v) for v in replay.outputs(self.qf.fmt)],
            }


def run(job: JobConfig) -> Report:
    """
    Run the selected passes in the order stability, magnitude, phase, overflow.
    A failed or marginal stability verdict skips the frequency-response passes.
    """
    state = _Run(job)
    handlers = {
        Pass.STABILITY: state.stability,
        Pass.MAGNITUDE: state.magnitude,
        Pass.PHASE: state.phase,
        Pass.OVERFLOW: state.overflow,
    }
    for name in job.passes:
        result = PassResult(name, Outcome.ERROR)
        start = time.perf_counter()
        if name in (Pass.MAGNITUDE, Pass.PHASE) and state.gate_reason:
            logger.warning("%s pass skipped: %s", name.value, state.gate_reason)
            result.outcome = Outcome.SKIPPED
            result.reason = state.gate_reason
        else:
            logger.info("%s pass started", name.value)
            try:
                handlers[name](result)
            except TruncationError as e:
                result.reason = f"{e}; retry with --grid {e.suggested_n}"
            except (StrategyError, BudgetExceededError) as e:
                result.reason = str(e)
            except ConvergenceError as e:
                result.outcome = Outcome.INDETERMINATE
                result.reason = str(e)
            logger.info("%s pass finished: %s", name.value, result.status or result.outcome.value)
        result.seconds = time.perf_counter() - start
        state.report.add(result)

    _write_outputs(state)
    return state.report


def _write_outputs(state: _Run) -> None:
    outputs, job = state.job.outputs, state.job
    if not (outputs.csv or outputs.data or outputs.plot):
        return
    if state.ideal is None or state.fixed is None:
        logger.warning("no response grid was computed; response outputs not written")
        return
    fs_hz = job.tf.sample_rate_hz
    if outputs.csv:
        emit_response_csv(state.ideal, state.fixed, fs_hz, outputs.csv)
    if outputs.data:
        save_response_data(state.ideal, state.fixed, fs_hz, outputs.data)
    if outputs.plot:
        from .utils.plotting import render_response

        edges_hz = [w * fs_hz / (2.0 * math.pi) for w in job.spec.frequencies()]
        render_response(response_table(state.ideal, state.fixed, fs_hz), outputs.plot, edges_hz,
                        title=f"{job.source} at <{job.fmt}>")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filter-verifier",
                                     description="Verify fixed-point implementations of digital filters.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run verification passes on a job")
    source = verify.add_mutually_exclusive_group(required=True)
    source.add_argument("--job", type=Path, help="JSON job file")
    source.add_argument("--fixture", choices=fixture_names(), help="bundled benchmark filter")
    verify.add_argument("--passes", help="comma-separated subset of stability,magnitude,phase,overflow")
    verify.add_argument("--format", dest="fmt", metavar="M,N", help="fixed-point format <m,n>")
    verify.add_argument("--grid", type=int, help="DTFT grid size N")
    verify.add_argument("--bound", type=int, dest="horizon", help="overflow horizon k")
    verify.add_argument("--strategy", choices=[s.value for s in SearchStrategy])
    verify.add_argument("--rounding", choices=[m.value for m in RoundingMode])
    verify.add_argument("--overflow-mode", choices=[m.value for m in OverflowMode])
    verify.add_argument("--restarts", type=int, help="random restarts of the directed search")
    verify.add_argument("--seed", type=lambda s: int(s, 0), help="directed search seed")
    verify.add_argument("--check-site", choices=[c.value for c in CheckSite])
    verify.add_argument("--input-range", metavar="LO,HI", help="restrict overflow inputs to [LO, HI]")
    verify.add_argument("--phase-band", choices=[b.value for b in PhaseBand])
    verify.add_argument("--method", choices=[m.value for m in ResponseMethod])
    verify.add_argument("--emit-csv", type=Path, help="write the response grid as CSV")
    verify.add_argument("--emit-data", type=Path, help="write the response grid as .npz or .mat")
    verify.add_argument("--emit-plot", type=Path, help="render the responses to .png or .svg")
    verify.add_argument("--report", type=Path, help="write the JSON report to this path")
    verify.add_argument("--json", action="store_true", help="print the JSON report instead of the summary")

    sub.add_parser("fixtures", help="list the bundled benchmark filters")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    out: dict[str, Any] = {
        "grid": args.grid,
        "horizon": args.horizon,
        "restarts": args.restarts,
        "seed": args.seed,
    }
    if args.passes:
        try:
            out["passes"] = tuple(Pass(p.strip()) for p in args.passes.split(",") if p.strip())
        except ValueError as e:
            raise JobConfigError("--passes", str(e)) from None
    if args.fmt:
        out["fmt"] = parse_format(args.fmt, "--format")
    if args.strategy:
        out["strategy"] = SearchStrategy(args.strategy)
    if args.rounding:
        out["rounding"] = RoundingMode(args.rounding)
    if args.overflow_mode:
        out["overflow_mode"] = OverflowMode(args.overflow_mode)
    if args.check_site:
        out["check_site"] = CheckSite(args.check_site)
    if args.input_range:
        out["input_range"] = parse_input_range(args.input_range, "--input-range")
    if args.phase_band:
        out["phase_band"] = PhaseBand(args.phase_band)
    if args.method:
        out["method"] = ResponseMethod(args.method)
    out["outputs"] = Outputs(args.emit_csv, args.report, args.emit_data, args.emit_plot)
    return out


def _verify(args: argparse.Namespace) -> int:
    overrides = _overrides(args)
    job = parse_job(args.job, overrides) if args.job else job_from_fixture(args.fixture, overrides)
    report = run(job)
    if job.outputs.report:
        job.outputs.report.parent.mkdir(parents=True, exist_ok=True)
        job.outputs.report.write_text(report.to_json(), encoding="utf-8")
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        print("\n".join(report.summary_lines()))
    return report.exit_code


def _list_fixtures() -> int:
    for name in fixture_names():
        fx = get_fixture(name)
        kind = "FIR" if fx.tf.is_fir else "IIR"
        print(f"{name:<10} {kind} order {fx.tf.order:<3} <{fx.fmt}>  {fx.description}")
    return ExitCode.OK


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        if args.command == "fixtures":
            return _list_fixtures()
        return _verify(args)
    except FileNotFoundError as e:
        print(f"error: {e.filename or e}: file not found", file=sys.stderr)
        return ExitCode.USAGE
    except ConvergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.INDETERMINATE
    except (VerificationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.USAGE
    except Exception:
        logger.exception("internal error")
        return ExitCode.INDETERMINATE


if __name__ == '__main__':
    sys.exit(main())
