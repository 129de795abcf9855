"""
JSON artifacts of the pipeline: structure -> deformation -> connection -> dwork.

Every artifact carries the ring parameters and the spec, so downstream commands
rebuild the upstream objects deterministically and compare them to the file.
"""
import json
import logging
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel

from sym_workbench.arithmetic.ring import RingContext, RingParams
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import InputError
from sym_workbench.harness.config import read_payload, validated
from sym_workbench.semilinear.graded_module import SigmaLinearMap
from sym_workbench.structures.connection import Connection
from sym_workbench.structures.deformation import (
    DeformationSequence,
    DeformedWindow,
    deform_M,
    deform_N,
    find_deformation_sequence,
)
from sym_workbench.structures.sym_structure import SymSpec, SymStructure, build_sym

logger = logging.getLogger(__name__)


def write_json(path: Path, payload: Any) -> Path:
    """Write a report model or a plain payload, keys sorted, to path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    path.write_text(text + "\n")
    logger.info("wrote %s", path)
    return path


def read_json(path: Path) -> dict:
    payload = read_payload(Path(path))
    if not isinstance(payload, dict):
        raise InputError(f"{path} does not hold a JSON object")
    return payload


def load_spec(payload: dict) -> SymSpec:
    return validated(SymSpec, payload.get("spec", payload), "Sym spec")


def load_params(payload: dict) -> RingParams:
    if "ring" not in payload:
        raise InputError("artifact has no ring parameters")
    return validated(RingParams, payload["ring"], "ring parameters")


def load_sigma_map(ctx: RingContext, payload: dict) -> SigmaLinearMap:
    """Either serialized matrices or plain integer matrices per degree."""
    if "phi" in payload:
        return SigmaLinearMap.from_json(ctx, payload["phi"])
    if "matrices" in payload:
        return SigmaLinearMap.from_ints(ctx, payload["matrices"])
    raise InputError("expected 'phi' or 'matrices' in the input file")


def structure_payload(structure: SymStructure, params: RingParams) -> dict:
    return {
        "ring": params.model_dump(),
        "spec": structure.spec.model_dump(mode="json"),
        "N": structure.N.to_json(),
        "N_i": [t.to_json() for t in structure.N_i],
        "M": structure.M.to_json(),
        "zeta": [z.to_json() for z in structure.zeta],
        "ladder": [step.model_dump() for step in structure.ladder_trace],
    }


def load_structure(ctx: RingContext, payload: dict) -> SymStructure:
    """
    Rebuild the structure from its spec and check it against the stored operator of M.

    Raises:
        InputError: the stored structure does not match the rebuilt one
    """
    structure = build_sym(load_spec(payload), ctx)
    if "M" in payload:
        stored = SigmaLinearMap.from_json(ctx, payload["M"]["phi"])
        # the artifact may have been written at another precision
        exponent = min(ctx.N, int(payload.get("ring", {}).get("N", ctx.N)))
        for sigma, (a, b) in enumerate(zip(stored.matrices, structure.M.phi.matrices)):
            if not a.congruent(b, exponent):
                raise InputError(f"the stored operator of M does not match its spec at degree {sigma}")
    return structure


def deformation_payload(structure: SymStructure, params: RingParams, sequence: DeformationSequence,
                        start: int, N_def: DeformedWindow, M_def: DeformedWindow) -> dict:
    payload = structure_payload(structure, params)
    payload.update({
        "start": start,
        "truncation": N_def.truncation,
        "sequence": sequence.to_json(),
        "N_deformed": N_def.window.to_json(),
        "M_deformed": M_def.window.to_json(),
    })
    return payload


def load_deformation(ctx: RingContext, payload: dict) -> tuple[SymStructure, DeformedWindow, DeformedWindow]:
    """
    Raises:
        InputError: the artifact lacks a deformation, or it does not match its spec
    """
    if "sequence" not in payload:
        raise InputError("artifact has no deformation sequence; run deform first")
    structure = load_structure(ctx, payload)
    start = int(payload.get("start", 0))
    sequence = find_deformation_sequence(structure.N, start=start)
    if sequence.to_json()["alt"] != payload["sequence"]["alt"]:
        raise InputError("the stored deformation sequence does not match its structure")
    T = int(payload.get("truncation", ctx.T))
    return structure, deform_N(structure.N, sequence, T), deform_M(structure, sequence, T)


def load_connection(ctx: RingContext, payload: dict, key: str) -> Connection:
    if key not in payload:
        raise InputError(f"artifact has no connection '{key}'; run connection first")
    record = payload[key]
    return Connection(
        matrices=[RingMatrix.from_json(ctx, m) for m in record["matrices"]],
        iterations=int(record.get("iterations", 0)),
    )


def artifact(path: Optional[Path], what: str) -> dict:
    if path is None:
        raise InputError(f"{what} needs an input file (--input)")
    return read_json(path)
