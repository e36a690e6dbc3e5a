"""
Service for turning run reports into plot-ready CSV tables
"""
import logging
from typing import Any, Dict, List

from shiftlab.services.storage import Storage, to_jsonable

logger = logging.getLogger(__name__)


def _prefixed(section: str, kind: str, filename: str) -> str:
    return filename if section == kind else f"{section}_{filename}"


def _lambda_parts(value: Any):
    if isinstance(value, list):
        return value[0], value[1]
    return value, 0.0


def _criterion_tables(section: str, data: Dict[str, Any], storage: Storage) -> List[str]:
    rows = data.get("per_k", [])
    forward = [{"k": r["k"], "product": r["forward_product"]} for r in rows if r.get("forward_product") is not None]
    inverse = [{"k": r["k"], "product": r["inverse_product"], "tail_product": r.get("inverse_tail_product")}
               for r in rows if r.get("inverse_product") is not None]
    written = []
    if forward:
        name = _prefixed(section, "criterion", "product_vs_k_forward.csv")
        storage.save_table(name, forward, ["k", "product"])
        written.append(name)
    if inverse:
        name = _prefixed(section, "criterion", "product_vs_k_inverse.csv")
        storage.save_table(name, inverse, ["k", "product", "tail_product"])
        written.append(name)
    return written


def _orbit_tables(section: str, data: Dict[str, Any], storage: Storage) -> List[str]:
    membership = data.get("membership", {})
    rows = [
        {"power": r["power"], "norm": r["norm"], "membership": membership.get(str(r["power"])),
         "leakage": r["leakage"]}
        for r in data["trace"]["rows"]
    ]
    name = _prefixed(section, "orbit", "norm_vs_power.csv")
    storage.save_table(name, rows, ["power", "norm", "membership", "leakage"])
    return [name]


def _coverage_tables(section: str, data: Dict[str, Any], storage: Storage) -> List[str]:
    name = _prefixed(section, "coverage", "coverage_vs_n.csv")
    storage.save_table(name, data["curve"], ["N", "score"])
    return [name]


def _eigen_tables(section: str, data: Dict[str, Any], storage: Storage) -> List[str]:
    norms, summary = [], []
    for result in data["results"]:
        re, im = _lambda_parts(result["lambda"])
        right_re, right_im = _lambda_parts(result["right_ratio"])
        left_re, left_im = _lambda_parts(result["left_ratio"])
        summary.append({
            "lambda_re": re, "lambda_im": im,
            "right_ratio_re": right_re, "right_ratio_im": right_im,
            "left_ratio_re": left_re, "left_ratio_im": left_im,
            "verdict": result["verdict"], "l1_verdict": result["l1_verdict"],
            "tail_verdict": result["tail_verdict"], "interior_residual": result["interior_residual"],
            "in_subspace": result["in_subspace"],
        })
        for w in result["window_norms"]:
            norms.append({"lambda_re": re, "lambda_im": im, "half_width": w["half_width"],
                          "l2_norm": w["l2_norm"], "l1_sum": w["l1_sum"]})
    halfwidth_name = _prefixed(section, "eigen_scan", "norm_vs_halfwidth.csv")
    summary_name = _prefixed(section, "eigen_scan", "eigen_scan.csv")
    storage.save_table(halfwidth_name, norms, ["lambda_re", "lambda_im", "half_width", "l2_norm", "l1_sum"])
    storage.save_table(summary_name, summary)
    return [halfwidth_name, summary_name]


def _witness_tables(section: str, data: Dict[str, Any], storage: Storage) -> List[str]:
    name = _prefixed(section, "witness", "witness_vs_n.csv")
    storage.save_table(name, data["rows"])
    return [name]


TABLE_WRITERS = {
    "criterion": _criterion_tables,
    "orbit": _orbit_tables,
    "coverage": _coverage_tables,
    "eigen_scan": _eigen_tables,
    "witness": _witness_tables,
}


def emit_plot_data(report: Dict[str, Any], storage: Storage) -> List[str]:
    """
    Write one CSV per chart found in the report.

    Every entry of report["sections"] carries a "kind"; criterion sections give
    product-vs-k tables, orbit sections norm-vs-power, coverage sections
    coverage-vs-N and eigen-scan sections norm-vs-halfwidth per lambda.

    Args:
        report: Report mapping as produced by the scenario controller
        storage: Output directory

    Returns:
        Names of the written files, in section order
    """
    report = to_jsonable(report)
    written = []
    for section, data in report.get("sections", {}).items():
        writer = TABLE_WRITERS.get(data.get("kind"))
        if writer is None:
            continue
        written.extend(writer(section, data, storage))
    logger.debug(f"plot data: {written}")
    return written
