"""End-to-end runs shared by the command line and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass, field

from .dsl import SourceSpec, builtin
from .dt import (
    DTResult,
    ReducedSeries,
    compare_results,
    dt_via_inversion,
    dt_via_recursion,
    r_series,
    verify_recursion_identity,
)
from .motive import euler_characteristic
from .oracles import colored_partition_counts, compare_series, orbifold_product_series
from .reduced import EngineConfig
from .series import Region

__all__ = ["DTRun", "run_dt", "oracle_n", "OracleCheck", "oracle_check", "EulerCheck", "euler_check"]


@dataclass
class DTRun:
    spec: SourceSpec
    reduced: ReducedSeries
    results: dict[str, DTResult]
    agree: bool | None
    first_difference: tuple | None
    residuals: dict
    laurent: dict

    @property
    def result(self) -> DTResult:
        return self.results.get("recursion") or self.results["inversion"]

    @property
    def residuals_zero(self) -> bool:
        return all(not r for r in self.residuals.values())

    @property
    def integral(self) -> bool:
        return all(self.laurent.values())

    @property
    def ok(self) -> bool:
        return self.agree is not False and self.residuals_zero and self.integral


def run_dt(spec: SourceSpec, framing, region: Region, cfg: EngineConfig | None = None, method: str = "both") -> DTRun:
    if method not in ("recursion", "inversion", "both"):
        raise ValueError(f"unknown method {method!r}")
    reduced = r_series(spec, region, cfg)
    results = {}
    if method in ("recursion", "both"):
        results["recursion"] = dt_via_recursion(spec, framing, region, reduced=reduced)
    if method in ("inversion", "both"):
        results["inversion"] = dt_via_inversion(spec, framing, region, reduced=reduced)
    agree, diff = None, None
    if method == "both":
        agree, diff = compare_results(results["recursion"], results["inversion"])
    main = results.get("recursion") or results["inversion"]
    residuals = verify_recursion_identity(spec, framing, main, reduced)
    main.residuals = residuals
    laurent = {v: m.is_laurent() for v, m in main.raw.items()}
    return DTRun(spec, reduced, results, agree, diff, residuals, laurent)


def oracle_n(spec: SourceSpec) -> int | None:
    """n such that the spec is the orbifold builtin for Z_n (c3 counts as n = 1)."""
    key = (spec.quiver, spec.potential)
    c3 = builtin("c3")
    if key == (c3.quiver, c3.potential):
        return 1
    n = len(spec.quiver.vertices)
    ref = builtin("orbifold", n)
    if key == (ref.quiver, ref.potential):
        return n
    return None


@dataclass
class OracleCheck:
    n: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches


def oracle_check(result: DTResult, n: int) -> OracleCheck:
    oracle = orbifold_product_series(n, result.region)
    return OracleCheck(n, compare_series(result, oracle))


@dataclass
class EulerCheck:
    n: int
    max_boxes: int
    rows: list = field(default_factory=list)  # (v, chi, count)

    @property
    def ok(self) -> bool:
        return all(abs(chi) == count for _, chi, count in self.rows)

    def signs(self) -> dict:
        return {v: (1 if chi > 0 else -1 if chi < 0 else 0) for v, chi, _ in self.rows}


def euler_check(result: DTResult, n: int, max_boxes: int | None = None, limit: int = 10) -> EulerCheck:
    """Compare ``|chi|`` of raw motives with colored plane-partition counts."""
    keys = result.region.keys()
    top = max((sum(v) for v in keys), default=0)
    max_boxes = min(top, limit) if max_boxes is None else max_boxes
    counts = colored_partition_counts(n, max_boxes, limit)
    check = EulerCheck(n, max_boxes)
    for v in keys:
        if sum(v) <= max_boxes:
            check.rows.append((v, euler_characteristic(result[v]), counts.get(v, 0)))
    return check
