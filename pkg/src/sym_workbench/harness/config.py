"""
Run configuration assembled from command-line flags and an optional JSON file.
"""
import json
import logging
import subprocess
from functools import lru_cache
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sym_workbench.arithmetic.ring import RingContext, RingParams, make_ring, required_denominator_budget
from sym_workbench.errors import InputError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1)
def git_describe() -> str:
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True, text=True, check=True, timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return result.stdout.strip() or "unknown"


def validated(model: type[BaseModel], payload: dict, what: str) -> BaseModel:
    """Validate a payload, reporting pydantic errors as InputError."""
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        raise InputError(f"invalid {what}: {exc}") from exc


class SweepRanges(BaseModel):
    """
    Bounds of the parameter sweep over (p, r, b, z, a).
    """
    model_config = ConfigDict(frozen=True)

    primes: list[int] = Field(default_factory=lambda: [3, 5])
    r_min: int = Field(default=1, ge=1)
    r_max: int = Field(default=8, ge=0, le=8)
    c_max: int = Field(default=2, ge=1)
    b_max: int = Field(default=2, ge=0)
    z_max: int = Field(default=2, ge=1)
    a_max: int = Field(default=2, ge=1)
    n_max: int = Field(default=4, ge=1, le=4)
    N: int = Field(default=5, ge=2, le=6)
    T: int = Field(default=6, ge=2, le=12)
    deform: bool = True
    truncation_limit: int = Field(default=64, ge=2)

    @model_validator(mode="after")
    def _primes_odd(self) -> "SweepRanges":
        if any(p < 3 for p in self.primes):
            raise ValueError(f"sweep primes must be odd, got {self.primes}")
        return self


class RunConfig(BaseModel):
    """
    Everything one subcommand needs: ring parameters, seed, output directory,
    an optional input file and subcommand options.
    """
    params: RingParams = Field(default_factory=RingParams)
    seed: int = 0
    out: Path = Path("out")
    input_path: Optional[Path] = None
    options: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _input_exists(self) -> "RunConfig":
        if self.input_path is not None and not self.input_path.exists():
            raise ValueError(f"input file {self.input_path} does not exist")
        return self

    @classmethod
    def from_flags(cls, flags: dict[str, Any], file_payload: Optional[dict] = None) -> "RunConfig":
        """
        Merge ring parameters from a JSON payload with command-line flags; flags win.
        Without an explicit D the budget needed by the truncation is used.

        Raises:
            InputError: the merged values do not validate
        """
        ring = dict((file_payload or {}).get("ring", {}))
        for key in ("p", "r", "N", "T", "D"):
            if flags.get(key) is not None:
                ring[key] = flags[key]
        if "D" not in ring:
            defaults = RingParams.model_fields
            ring["D"] = required_denominator_budget(
                int(ring.get("p", defaults["p"].default)), int(ring.get("T", defaults["T"].default)),
            )
        payload = {
            "params": ring,
            "seed": flags.get("seed") if flags.get("seed") is not None else (file_payload or {}).get("seed", 0),
            "out": flags.get("out") or "out",
            "input_path": flags.get("input_path"),
            "options": flags.get("options", {}),
        }
        return validated(cls, payload, "run configuration")

    def context(self) -> RingContext:
        return make_ring(self.params)

    def provenance(self) -> dict[str, Any]:
        return {
            "p": self.params.p,
            "r": self.params.r,
            "N": self.params.N,
            "T": self.params.T,
            "D": self.params.D,
            "seed": self.seed,
            "git_describe": git_describe(),
        }


def read_payload(path: Optional[Path]) -> Optional[dict]:
    if path is None:
        return None
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"input file {path} does not exist") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
