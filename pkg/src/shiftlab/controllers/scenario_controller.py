"""
Scenario controller running one task end to end and mapping its verdict to an exit status
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from shiftlab.exceptions import ConfigurationError
from shiftlab.models.block_plan import BlockPlan
from shiftlab.models.lattice_vector import LatticeVector, parse_scalar
from shiftlab.models.operators import Operator, OperatorPower, ShiftOperator
from shiftlab.models.reports import EigenVerdict, Verdict
from shiftlab.models.scenario_config import ScenarioConfig
from shiftlab.models.subspace import PatternSubspace
from shiftlab.services import seqspace
from shiftlab.services.constructor import build_vector, plan_for_coverage, random_targets, scaled_backward_shift
from shiftlab.services.criteria import (lemma5_propagation, mhc_criterion_conditions, shift_criterion_check,
                                        spectrum_witness, witness_bounds)
from shiftlab.services.eigen_scan import DISCREPANCY_NOTE, eigen_scan, parse_grid
from shiftlab.services.orbit_lab import (compare_traces, compression_orbit_identity, compression_trace, coverage,
                                         coverage_curve, orbit, orbit_in_M, projected_orbit_inclusion,
                                         quotient_orbit)
from shiftlab.services.plot_data import emit_plot_data
from shiftlab.services.shift_ops import adjoint
from shiftlab.services.storage import Storage
from shiftlab.services.subspace_ops import invariance_check, membership
from shiftlab.utils.config import HALF_WIDTHS, REPORT_FILENAME

logger = logging.getLogger(__name__)

EXIT_CODES = {Verdict.SATISFIED: 0, Verdict.VIOLATED: 2, Verdict.INCONCLUSIVE: 3}
EXIT_ERROR = 1

_MISSING = object()

Sections = Dict[str, Dict[str, Any]]


def _get(block: Dict[str, Any], key: str, cast: Callable, field_path: str, default: Any = _MISSING) -> Any:
    if key not in block:
        if default is _MISSING:
            raise ConfigurationError(f"missing '{key}'", field=f"{field_path}.{key}")
        return default
    try:
        return cast(block[key])
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"invalid value {block[key]!r}: {e}", field=f"{field_path}.{key}") from e


def _pairs(entries: Any, field_path: str) -> List[Tuple[complex, complex, int]]:
    if not isinstance(entries, list) or not entries:
        raise ConfigurationError("expected a nonempty list of pairs", field=field_path)
    pairs = []
    for i, entry in enumerate(entries):
        entry_path = f"{field_path}[{i}]"
        if not isinstance(entry, dict):
            raise ConfigurationError("pair must be a mapping", field=entry_path)
        pairs.append((
            _get(entry, "coefficient", parse_scalar, entry_path, 1.0),
            _get(entry, "lambda", parse_scalar, entry_path),
            _get(entry, "index", int, entry_path),
        ))
    return pairs


def _real_or_complex(value: Any) -> complex:
    z = parse_scalar(value)
    return z.real if z.imag == 0 else z


def _vector(value: Any, field_path: str, one_sided: bool = False) -> LatticeVector:
    v = LatticeVector.from_dict(value, field_path)
    if one_sided and not v.one_sided and v.lo >= 0:
        return LatticeVector(v.lo, v.coeffs, True)
    return v


@dataclass
class RunResult:
    verdict: Verdict
    report: Dict[str, Any]
    files: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]


class ScenarioController:
    def __init__(self, show_progress: bool = False, workers: int = 1):
        """
        Initialize the scenario controller.

        Args:
            show_progress: Show progress bars for long loops
            workers: Threads used for grid scans
        """
        self.show_progress = show_progress
        self.workers = workers
        self.handlers: Dict[str, Callable[[ScenarioConfig], Tuple[Verdict, Sections]]] = {
            "criterion": self._run_criterion,
            "lemma5": self._run_lemma5,
            "mhc": self._run_mhc,
            "witness": self._run_witness,
            "eigen-scan": self._run_eigen_scan,
            "orbit": self._run_orbit,
            "coverage": self._run_coverage,
            "compression": self._run_compression,
            "quotient": self._run_quotient,
            "example1": self._run_example1,
            "example3": self._run_example3,
            "adjoint-pair": self._run_adjoint_pair,
        }

    def run(self, config: ScenarioConfig) -> RunResult:
        """
        Run the configured task.

        Args:
            config: Validated scenario configuration

        Returns:
            RunResult with the verdict and the report mapping
        """
        logger.info(f"running {config.name} (task {config.task})")
        verdict, sections = self.handlers[config.task](config)
        report = {
            "task": config.task,
            "name": config.name,
            "config": config.to_dict(),
            "verdict": verdict.value,
            "sections": sections,
        }
        logger.info(f"{config.name}: {verdict.value}")
        return RunResult(verdict, report)

    def write_outputs(self, result: RunResult, out_dir: Path) -> List[str]:
        """Write report.json and the plot-ready CSV tables into out_dir."""
        storage = Storage(out_dir)
        storage.save_report(REPORT_FILENAME, result.report)
        result.files = [REPORT_FILENAME] + emit_plot_data(result.report, storage)
        return result.files

    def _operator(self, config: ScenarioConfig) -> Operator:
        if config.operator_power > 1:
            return OperatorPower(config.operator, config.operator_power)
        return config.operator

    def _run_criterion(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        block = config.block("criterion")
        report = shift_criterion_check(
            config.operator, config.subspace, config.schedule, _get(block, "i_index", int, "criterion"),
            config.tolerances.limit, config.tolerances.trend_window, config.window)
        return report.verdict, {"criterion": dict(report.to_dict(), kind="criterion")}

    def _run_lemma5(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        block = config.block("lemma5")
        report = lemma5_propagation(
            config.operator, config.subspace, config.schedule,
            _get(block, "i_index", int, "lemma5"),
            _get(block, "other_indices", lambda v: [int(i) for i in v], "lemma5", []),
            config.tolerances.limit, config.tolerances.trend_window, config.window)
        return report.verdict, {"lemma5": dict(report.to_dict(), kind="criterion")}

    def _dense_set(self, config: ScenarioConfig, block: Dict[str, Any]) -> List[LatticeVector]:
        one_sided = config.operator.one_sided
        dense = [LatticeVector.basis(n, one_sided=one_sided and n >= 0)
                 for n in _get(block, "dense_indices", lambda v: [int(i) for i in v], "mhc", [])]
        for i, literal in enumerate(block.get("dense_set", [])):
            dense.append(_vector(literal, f"mhc.dense_set[{i}]", one_sided))
        if not dense:
            raise ConfigurationError("mhc needs 'dense_indices' or 'dense_set'", field="mhc")
        return dense

    def _run_mhc(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        report = mhc_criterion_conditions(
            config.operator, config.subspace, config.schedule, self._dense_set(config, config.block("mhc")),
            config.tolerances.limit, config.tolerances.trend_window, config.tolerances.identity, config.window)
        return report.verdict, {"mhc": dict(report.to_dict(), kind="criterion")}

    def _run_witness(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        block = config.block("witness")
        x_pairs = _pairs(block.get("x_pairs"), "witness.x_pairs")
        y_pairs = _pairs(block.get("y_pairs"), "witness.y_pairs")
        p = _get(block, "p", int, "witness", 1)
        n_max = _get(block, "n_max", int, "witness", 40)
        y_norm = seqspace.norm(LatticeVector.from_terms({i: b for b, _, i in y_pairs}))

        rows, ok = [], True
        for n in range(n_max + 1):
            result = spectrum_witness(x_pairs, y_pairs, p, n)
            x_bound, z_bound = witness_bounds(x_pairs, y_pairs, n)
            within = (result.residual <= config.tolerances.identity * max(y_norm, 1.0)
                      and result.x_power_norm <= x_bound * (1 + 1e-12)
                      and result.z_norm <= z_bound * (1 + 1e-12))
            ok &= within
            rows.append({"n": n, "residual": result.residual, "x_power_norm": result.x_power_norm,
                         "x_next_power_norm": result.x_next_power_norm, "z_norm": result.z_norm,
                         "t_exponent": result.t_exponent,
                         "x_bound": x_bound, "z_bound": z_bound, "holds": within})
        verdict = Verdict.SATISFIED if ok else Verdict.VIOLATED
        return verdict, {"witness": {"kind": "witness", "p": p, "rows": rows, "verdict": verdict.value}}

    def _run_eigen_scan(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        block = config.block("eigen_scan")
        p = _get(block, "p", int, "eigen_scan", 2)
        grid = parse_grid(block.get("grid", "annulus(0.1, 16, 24 points)"))
        half_widths = _get(block, "half_widths", lambda v: [int(h) for h in v], "eigen_scan", list(HALF_WIDTHS))
        anchor = _get(block, "anchor", int, "eigen_scan", None)
        results = eigen_scan(config.operator, p, grid, config.subspace, half_widths, anchor,
                             workers=self.workers, progress=self.show_progress)

        verdicts = []
        for r in results:
            if r.verdict is EigenVerdict.INCONCLUSIVE:
                verdicts.append(Verdict.INCONCLUSIVE)
            elif r.verdict is r.tail_verdict:
                verdicts.append(Verdict.SATISFIED)
            else:
                verdicts.append(Verdict.VIOLATED)
        verdict = Verdict.combine(verdicts)
        section = {
            "kind": "eigen_scan",
            "p": p,
            "anchor": results[0].anchor if results else anchor,
            "half_widths": half_widths,
            "results": [r.to_dict() for r in results],
            "note": DISCREPANCY_NOTE,
        }
        return verdict, {"eigen_scan": section}

    def _orbit_section(self, config: ScenarioConfig, op: Operator, x: LatticeVector, N: int,
                       M: PatternSubspace) -> Tuple[Verdict, Dict[str, Any]]:
        tol = config.tolerances.membership
        trace = orbit(op, x, N, config.window, self.show_progress)
        kept = orbit_in_M(trace, M, tol)
        inclusion = projected_orbit_inclusion(trace, M, tol)
        if not inclusion.holds:
            verdict = Verdict.VIOLATED
        elif trace.overflow or not all(trace.trusted):
            verdict = Verdict.INCONCLUSIVE
        else:
            verdict = Verdict.SATISFIED
        section = {
            "kind": "orbit",
            "trace": trace.to_dict(),
            "membership": {str(n): membership(v, M, tol)[0] for n, v in zip(trace.powers, trace.points)},
            "in_subspace_powers": kept.powers,
            "inclusion": inclusion.to_dict(),
        }
        return verdict, section

    def _run_orbit(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        block = config.block("orbit")
        power = _get(block, "power", int, "orbit", config.operator_power)
        op = OperatorPower(config.operator, power) if power > 1 else config.operator
        if block.get("x") == "random":
            rng = np.random.default_rng(config.seed)
            lo, hi = config.window.bounds(config.subspace.one_sided)
            x = seqspace.random_vector(rng, lo // 4, hi // 4, config.subspace.one_sided)
        else:
            x = _vector(_get(block, "x", lambda v: v, "orbit"), "orbit.x", config.operator.one_sided)
        verdict, section = self._orbit_section(config, op, x, _get(block, "N", int, "orbit", 20), config.subspace)
        return verdict, {"orbit": section}

    def _constructed_orbit(self, config: ScenarioConfig) -> Tuple[Verdict, Sections, Any]:
        block = config.block("constructor")
        M = config.subspace
        if "plan" in block:
            # replay a plan saved from an earlier report
            plan = BlockPlan.from_dict(block["plan"], "constructor.plan")
            if plan.epsilon is None:
                raise ConfigurationError("a replayed plan needs its epsilon", field="constructor.plan.epsilon")
            targets, lam, epsilon = list(plan.targets), plan.lam, plan.epsilon
        else:
            lam = _get(block, "lambda", _real_or_complex, "constructor", 2.0)
            count = _get(block, "targets", int, "constructor", 10)
            span = _get(block, "span", int, "constructor", 8)
            epsilon = _get(block, "epsilon", float, "constructor", 1e-3)
            rng = np.random.default_rng(config.seed)
            targets = random_targets(rng, M, count, span)
            plan = plan_for_coverage(targets, M, lam, epsilon)
        x, bounds = build_vector(plan)
        op = scaled_backward_shift(lam)
        trace = orbit(op, x, plan.powers[-1], config.window, self.show_progress)

        report = coverage(trace, M, targets, epsilon)
        by_power = dict(zip(trace.powers, trace.points))
        measured = [seqspace.distance(by_power[n], t) for n, t in zip(plan.powers, targets)]
        certified = all(m <= b + 1e-12 for m, b in zip(measured, bounds))
        x_in_M, _ = membership(x, M, 0.0)
        checkpoints = sorted(set(plan.powers) | {0})
        curve = coverage_curve(trace, M, targets, epsilon, checkpoints)

        ok = report.score == 1.0 and certified and x_in_M
        verdict = Verdict.SATISFIED if ok else Verdict.VIOLATED
        sections = {
            "plan": dict(plan.to_dict(), kind="plan", tail_bounds=bounds, measured_tails=measured,
                         tails_certified=certified, x_in_subspace=x_in_M),
            "coverage": {"kind": "coverage", "report": report.to_dict(),
                         "curve": [{"N": n, "score": score} for n, score in curve]},
        }
        return verdict, sections, (op, x, plan)

    def _run_coverage(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        verdict, sections, _ = self._constructed_orbit(config)
        return verdict, sections

    def _run_example1(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        verdict, sections, (op, x, plan) = self._constructed_orbit(config)
        orbit_verdict, section = self._orbit_section(config, op, x, plan.powers[-1], config.subspace)
        nonzero = [int(n) for n, row in zip(section["trace"]["powers"], section["trace"]["rows"]) if row["norm"] > 0]
        odd = [c for c in section["inclusion"]["per_power"] if c["power"] % 2 == 1]
        section["nonzero_points_in_subspace_are_even"] = all(
            n % 2 == 0 for n in section["in_subspace_powers"] if n in nonzero)
        section["odd_powers_project_to_zero"] = all(c["projection_vanishes"] for c in odd)
        sections["orbit"] = section
        return Verdict.combine([verdict, orbit_verdict]), sections

    def _random_in(self, rng: np.random.Generator, M: PatternSubspace, lo: int, hi: int) -> LatticeVector:
        mask = M.admissible_mask(np.arange(lo, hi + 1))
        return seqspace.random_vector(rng, lo, hi, M.one_sided, mask=mask)

    def _run_compression(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        block = config.block("compression")
        samples = _get(block, "samples", int, "compression", 50)
        N = _get(block, "N", int, "compression", 30)
        lo, hi = _get(block, "support", lambda v: (int(v[0]), int(v[1])), "compression", (-10, 10))
        op = self._operator(config)
        M = config.subspace
        Mperp = M.complement()

        rng = np.random.default_rng(config.seed)
        compression_max, quotient_max, ok = 0.0, 0.0, True
        for _ in range(samples):
            x = self._random_in(rng, Mperp, lo, hi)
            identity = compression_orbit_identity(op, x, Mperp, N, config.tolerances.identity, config.window)
            agreement = compare_traces("quotient_vs_compression", quotient_orbit(op, x, M, N, config.window),
                                       compression_trace(op, x, Mperp, N), config.tolerances.identity)
            compression_max = max(compression_max, identity.max_deviation)
            quotient_max = max(quotient_max, agreement.max_deviation)
            ok &= identity.holds and agreement.holds
        verdict = Verdict.SATISFIED if ok else Verdict.VIOLATED
        section = {
            "kind": "identity",
            "samples": samples,
            "N": N,
            "compression_max_deviation": compression_max,
            "quotient_max_deviation": quotient_max,
            "tolerance": config.tolerances.identity,
            "holds": ok,
        }
        return verdict, {"compression": section}

    def _run_quotient(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        block = config.block("quotient")
        x = _vector(_get(block, "x", lambda v: v, "quotient"), "quotient.x")
        N = _get(block, "N", int, "quotient", 30)
        op = self._operator(config)
        M = config.subspace
        classes = quotient_orbit(op, x, M, N, config.window)
        agreement = compare_traces("quotient_vs_compression", classes,
                                   compression_trace(op, x, M.complement(), N), config.tolerances.identity)
        verdict = Verdict.SATISFIED if agreement.holds else Verdict.VIOLATED
        section = {
            "kind": "identity",
            "classes": classes.to_dict(include_points=True),
            "agreement": agreement.to_dict(),
        }
        return verdict, {"quotient": section}

    def _run_example3(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        verdict, sections = self._run_criterion(config)
        verdicts = [verdict]
        odd_power = invariance_check(config.operator, 1, config.subspace, config.window)
        sections["invariance_n1"] = dict(odd_power.to_dict(), kind="invariance")
        if "mhc" in config.blocks:
            mhc_verdict, mhc_sections = self._run_mhc(config)
            verdicts.append(mhc_verdict)
            sections.update(mhc_sections)
        if "lemma5" in config.blocks:
            lemma_verdict, lemma_sections = self._run_lemma5(config)
            verdicts.append(lemma_verdict)
            sections.update(lemma_sections)
        return Verdict.combine(verdicts), sections

    def _run_adjoint_pair(self, config: ScenarioConfig) -> Tuple[Verdict, Sections]:
        block = config.block("adjoint")
        T: ShiftOperator = config.operator
        T_star = adjoint(T)
        M1 = config.subspace
        M2 = PatternSubspace.from_config(block.get("adjoint_subspace", M1.to_config()), "adjoint.adjoint_subspace")
        tol, window = config.tolerances, config.window

        first = shift_criterion_check(T, M1, config.schedule, _get(block, "i_index", int, "adjoint"),
                                      tol.limit, tol.trend_window, window)
        second = shift_criterion_check(T_star, M2, config.schedule, _get(block, "adjoint_index", int, "adjoint"),
                                       tol.limit, tol.trend_window, window)
        lo, hi = window.bounds(M1.one_sided)
        sections = {
            "criterion": dict(first.to_dict(), kind="criterion"),
            "adjoint_criterion": dict(second.to_dict(), kind="criterion"),
            "pair": {
                "kind": "pair",
                "adjoint_operator": T_star.to_config(),
                "adjoint_subspace": M2.to_config(),
                # informational only: nothing is asserted about how M1 and M2 relate
                "m2_is_complement_of_m1": M2.same_pattern(M1.complement(), lo, hi),
            },
        }
        return Verdict.combine([first.verdict, second.verdict]), sections
