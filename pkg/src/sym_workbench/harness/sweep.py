"""
Parameter sweep: build, deform and verify every feasible spec in a range and
collect one status per property into a polars table.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Callable, Optional

import polars as pl
from pydantic import BaseModel

from sym_workbench.arithmetic.ring import RingParams, make_ring, required_denominator_budget
from sym_workbench.errors import InputError, MissingSkeletonError, NotIsoclinalError, PrecisionError, WorkbenchError
from sym_workbench.harness.config import SweepRanges
from sym_workbench.semilinear.graded_module import SigmaLinearMap
from sym_workbench.structures.connection import solve_connection, verify_connection
from sym_workbench.structures.deformation import check_suff, deform_M, deform_N, find_deformation_sequence
from sym_workbench.structures.dwork import check_velf, dwork_theta, verify_dwork
from sym_workbench.structures.sym_structure import SymSpec, SymStructure, build_M, build_N, build_Ni, choose_parameters, verify_sym
from sym_workbench.windows.base_verifier import CheckStatus, worst_status
from sym_workbench.windows.window import Window

logger = logging.getLogger(__name__)

PROPERTIES = ["sym", "suff", "connection", "dwork", "velf"]


class SweepInstance(BaseModel):
    params: RingParams
    spec: SymSpec
    corrupt: bool = False
    deform: bool = True
    truncation_limit: Optional[int] = None

    @property
    def key(self) -> str:
        b = "-".join(str(b) for b in self.spec.b)
        return f"p{self.params.p}-r{self.spec.r}-b{b}-z{self.spec.z}-a{self.spec.a}"


def _half_integers(upper: int) -> list[Fraction]:
    return [Fraction(k, 2) for k in range(1, 2 * upper + 1)]


def enumerate_instances(ranges: SweepRanges) -> list[SweepInstance]:
    """Every spec in range that passes the feasibility constraints, ordered by key."""
    instances = []
    for p in ranges.primes:
        D = required_denominator_budget(p, ranges.T)
        for r in range(ranges.r_min, ranges.r_max + 1):
            params = RingParams(p=p, r=r, N=ranges.N, T=ranges.T, D=D)
            for c in range(1, ranges.c_max + 1):
                for b in combinations_with_replacement(range(ranges.b_max + 1), c):
                    if sum(1 + x for x in b) > ranges.n_max:
                        continue
                    for z in range(1, ranges.z_max + 1):
                        for a in _half_integers(ranges.a_max):
                            try:
                                spec = choose_parameters(SymSpec(b=list(b), z=z, a=a, r=r))
                            except (InputError, ValueError):
                                continue
                            instances.append(SweepInstance(
                                params=params, spec=spec, deform=ranges.deform,
                                truncation_limit=ranges.truncation_limit,
                            ))
    return sorted(instances, key=lambda instance: instance.key)


def corrupt_structure(structure: SymStructure) -> SymStructure:
    """Scale phi of M at degree 0 by the unit 1 + p, which breaks the Sym intertwining."""
    phi = structure.M.phi
    matrices = list(phi.matrices)
    matrices[0] = matrices[0] * (1 + structure.ctx.p)
    return replace(structure, M=Window(SigmaLinearMap(matrices), structure.M.decomposition))


def _stage(row: dict[str, Any], name: str, action: Callable[[], Optional[CheckStatus]]) -> None:
    try:
        status = action()
    except PrecisionError as exc:
        status = CheckStatus.PRECISION
        row["error"] = row["error"] or f"{name}: {exc}"
    except WorkbenchError as exc:
        status = CheckStatus.FAIL
        row["error"] = row["error"] or f"{name}: {exc}"
    row[name] = (status or CheckStatus.SKIPPED).value


def run_instance(instance: SweepInstance) -> dict[str, Any]:
    """
    One row of the sweep. Failures are recorded in the row and never raised.
    """
    row: dict[str, Any] = {"key": instance.key, "p": instance.params.p, "r": instance.spec.r,
                           "n": instance.spec.n, "error": None}
    for name in PROPERTIES:
        row[name] = CheckStatus.SKIPPED.value
    state: dict[str, Any] = {}
    ctx = make_ring(instance.params)
    spec = instance.spec

    def sym() -> CheckStatus:
        structure = build_M(spec, build_N(spec, ctx), build_Ni(spec, ctx))
        state["structure"] = corrupt_structure(structure) if instance.corrupt else structure
        return verify_sym(state["structure"]).calculate_status()

    def suff() -> Optional[CheckStatus]:
        structure = state.get("structure")
        if structure is None or not instance.deform:
            return None
        try:
            sequence = find_deformation_sequence(structure.N)
        except InputError:
            return None
        state["N"] = deform_N(structure.N, sequence)
        state["M"] = deform_M(structure, sequence)
        report = check_suff(state["N"], state["M"], structure, max_truncation=instance.truncation_limit)
        return report.calculate_status()

    def connection() -> Optional[CheckStatus]:
        if "N" not in state:
            return None
        statuses = []
        for key in ("N", "M"):
            state[f"C_{key}"] = solve_connection(state[key])
            statuses.append(verify_connection(state[key], state[f"C_{key}"]).calculate_status())
        return worst_status(statuses)

    def dwork() -> Optional[CheckStatus]:
        if "C_N" not in state:
            return None
        statuses = []
        for key in ("N", "M"):
            try:
                state[f"theta_{key}"] = dwork_theta(state[key], state[f"C_{key}"])
            except (NotIsoclinalError, MissingSkeletonError) as exc:
                logger.debug("%s: no Dwork trivialization of %s: %s", instance.key, key, exc)
                return None
            statuses.append(verify_dwork(state[key], state[f"C_{key}"], state[f"theta_{key}"]).calculate_status())
        return worst_status(statuses)

    def velf() -> Optional[CheckStatus]:
        if "theta_M" not in state:
            return None
        return check_velf(state["theta_N"], state["theta_M"], state["structure"]).calculate_status()

    _stage(row, "sym", sym)
    if row["sym"] != CheckStatus.FAIL.value:
        for name, action in (("suff", suff), ("connection", connection), ("dwork", dwork), ("velf", velf)):
            _stage(row, name, action)
    row["status"] = worst_status([CheckStatus(row[name]) for name in PROPERTIES]).value
    logger.info("%s: %s", instance.key, row["status"])
    return row


SCHEMA = {
    "key": pl.Utf8, "p": pl.Int64, "r": pl.Int64, "n": pl.Int64,
    **{name: pl.Utf8 for name in PROPERTIES}, "status": pl.Utf8, "error": pl.Utf8,
}


def run_sweep(instances: list[SweepInstance], workers: int = 4) -> pl.DataFrame:
    """Run instances concurrently; rows come back ordered by instance key."""
    if not instances:
        return pl.DataFrame(schema=SCHEMA)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(run_instance, instances))
    return pl.DataFrame(rows, schema=SCHEMA).sort("key")


def summarize(table: pl.DataFrame) -> pl.DataFrame:
    """Counts of each status per property."""
    if table.is_empty():
        return pl.DataFrame(schema={"property": pl.Utf8, "outcome": pl.Utf8, "count": pl.UInt32})
    long = table.unpivot(index="key", on=PROPERTIES + ["status"], variable_name="property", value_name="outcome")
    return (
        long.group_by(["property", "outcome"])
        .agg(pl.len().alias("count"))
        .sort(["property", "outcome"])
    )
