"""
Affine charts {s_nu t_mu != 0} of the local model in P^{n-1} x P^{n-1}.

A point is a pair of lines (t) and (s) in Z/p^N with O^n = A + B, rank A = k.
It lies on the local model when the line (t) is carried into (s) by
a + b -> a + pb, and (s) into (t) by a + b -> pa + b. On the chart the
same locus is cut out by a single relation among n ratio variables.
"""
import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy import Expr, Integer, Symbol

from sym_workbench.errors import InputError
from sym_workbench.windows.base_verifier import CheckResult, VerificationReport

logger = logging.getLogger(__name__)


class ChartSpec(BaseModel):
    """
    n: ambient rank
    k: rank of A
    nu, mu: 1-based chart indices with nu <= k < mu
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    k: int = Field(ge=1)
    nu: int = Field(ge=1)
    mu: int = Field(ge=2)

    @model_validator(mode="after")
    def _chart_indices(self) -> "ChartSpec":
        if not 1 <= self.nu <= self.k < self.mu <= self.n:
            raise ValueError(f"need 1 <= nu <= k < mu <= n, got nu={self.nu} k={self.k} mu={self.mu} n={self.n}")
        return self

    @property
    def a_indices(self) -> list[int]:
        return list(range(1, self.k + 1))

    @property
    def b_indices(self) -> list[int]:
        return list(range(self.k + 1, self.n + 1))


class ChartPoint(BaseModel):
    """Homogeneous coordinates of both factors, residues mod p^N."""
    p: int
    N: int
    t: list[int]
    s: list[int]

    @property
    def modulus(self) -> int:
        return self.p ** self.N


class ChartPresentation(BaseModel):
    """
    The chart ring: n ratio variables modulo one relation. Dependent
    coordinates are the remaining ratios expressed in the variables.
    """
    spec: ChartSpec
    variables: list[str]
    relation: str
    dependent: dict[str, str]
    vector_equations: list[dict[str, list[str]]]

    def print_results(self) -> None:
        print(f"\nChart nu={self.spec.nu} mu={self.spec.mu} (n={self.spec.n}, k={self.spec.k})")
        print(f"variables ({len(self.variables)}): {', '.join(self.variables)}")
        print(f"relation: {self.relation} = 0")
        for name, formula in self.dependent.items():
            print(f"  {name} = {formula}")
        return None


def _s_ratio(spec: ChartSpec, i: int) -> Symbol:
    return Symbol(f"s{i}/s{spec.nu}")


def _t_ratio(spec: ChartSpec, j: int) -> Symbol:
    return Symbol(f"t{j}/t{spec.mu}")


def chart_variables(spec: ChartSpec) -> list[Symbol]:
    """s_i/s_nu for i <= k with s_mu/s_nu in place of s_nu/s_nu, then t_j/t_mu symmetrically."""
    first = [_s_ratio(spec, spec.mu if i == spec.nu else i) for i in spec.a_indices]
    second = [_t_ratio(spec, spec.nu if j == spec.mu else j) for j in spec.b_indices]
    return first + second


def chart_relation(spec: ChartSpec, p: int) -> Expr:
    return _s_ratio(spec, spec.mu) * _t_ratio(spec, spec.nu) - Integer(p)


def dependent_coordinates(spec: ChartSpec) -> dict[Symbol, Expr]:
    """t_i/t_mu = (s_i/s_nu)(t_nu/t_mu) for i <= k and s_j/s_nu = (t_j/t_mu)(s_mu/s_nu) for j > k."""
    formulas: dict[Symbol, Expr] = {}
    for i in spec.a_indices:
        if i != spec.nu:
            formulas[_t_ratio(spec, i)] = _s_ratio(spec, i) * _t_ratio(spec, spec.nu)
    for j in spec.b_indices:
        if j != spec.mu:
            formulas[_s_ratio(spec, j)] = _t_ratio(spec, j) * _s_ratio(spec, spec.mu)
    return formulas


def chart_presentation(spec: ChartSpec, p: int) -> ChartPresentation:
    t_side = [f"t{i}" for i in spec.a_indices] + [f"p*t{j}" for j in spec.b_indices]
    s_side = [f"p*s{i}" for i in spec.a_indices] + [f"s{j}" for j in spec.b_indices]
    return ChartPresentation(
        spec=spec,
        variables=[str(v) for v in chart_variables(spec)],
        relation=str(chart_relation(spec, p)),
        dependent={str(k): str(v) for k, v in dependent_coordinates(spec).items()},
        vector_equations=[
            {"left": t_side, "right": [f"(t{spec.nu}/s{spec.nu})*s{i}" for i in range(1, spec.n + 1)]},
            {"left": s_side, "right": [f"(s{spec.mu}/t{spec.mu})*t{i}" for i in range(1, spec.n + 1)]},
        ],
    )


class MembershipResult(BaseModel):
    kernel_conditions: bool
    chart_equations: bool
    witness: Optional[str] = None

    @property
    def agree(self) -> bool:
        return self.kernel_conditions == self.chart_equations

    @property
    def accepted(self) -> bool:
        return self.kernel_conditions and self.chart_equations


def _check_pivots(spec: ChartSpec, point: ChartPoint) -> None:
    if len(point.t) != spec.n or len(point.s) != spec.n:
        raise InputError(f"a point of the chart needs {spec.n} coordinates per factor")
    if point.s[spec.nu - 1] % point.p == 0:
        raise InputError(f"s_{spec.nu} is not a unit")
    if point.t[spec.mu - 1] % point.p == 0:
        raise InputError(f"t_{spec.mu} is not a unit")


def _proportional(u: np.ndarray, v: np.ndarray, modulus: int) -> Optional[tuple[int, int]]:
    """First 2x2 minor of [u | v] that does not vanish mod p^N, or None."""
    minors = (np.outer(u, v) - np.outer(v, u)) % modulus
    nonzero = np.argwhere(minors != 0)
    return None if nonzero.size == 0 else tuple(int(i) + 1 for i in nonzero[0])


def kernel_conditions(spec: ChartSpec, point: ChartPoint) -> tuple[bool, Optional[str]]:
    """diag(1^k, p^(n-k)) t is proportional to s, and diag(p^k, 1^(n-k)) s to t."""
    q = point.modulus
    t = np.array(point.t, dtype=object)
    s = np.array(point.s, dtype=object)
    first = np.array([1] * spec.k + [point.p] * (spec.n - spec.k), dtype=object)
    second = np.array([point.p] * spec.k + [1] * (spec.n - spec.k), dtype=object)
    bad = _proportional(first * t, s, q)
    if bad is not None:
        return False, f"ker A -> ker B: minor {bad}"
    bad = _proportional(second * s, t, q)
    if bad is not None:
        return False, f"ker B -> ker A: minor {bad}"
    return True, None


def chart_values(spec: ChartSpec, point: ChartPoint) -> dict[Symbol, int]:
    q = point.modulus
    s_unit = pow(point.s[spec.nu - 1], -1, q)
    t_unit = pow(point.t[spec.mu - 1], -1, q)
    values = {}
    for i in range(1, spec.n + 1):
        values[_s_ratio(spec, i)] = point.s[i - 1] * s_unit % q
        values[_t_ratio(spec, i)] = point.t[i - 1] * t_unit % q
    return values


def chart_equations(spec: ChartSpec, point: ChartPoint) -> tuple[bool, Optional[str]]:
    q = point.modulus
    values = chart_values(spec, point)
    for name, formula in dependent_coordinates(spec).items():
        if (values[name] - int(formula.subs(values))) % q:
            return False, f"{name} = {formula}"
    relation = chart_relation(spec, point.p)
    if int(relation.subs(values)) % q:
        return False, f"{relation} = 0"
    return True, None


def membership_check(spec: ChartSpec, point: ChartPoint) -> MembershipResult:
    """
    Evaluate both formulations on one point.

    Raises:
        InputError: s_nu or t_mu is not a unit
    """
    _check_pivots(spec, point)
    kernel, kernel_witness = kernel_conditions(spec, point)
    chart, chart_witness = chart_equations(spec, point)
    result = MembershipResult(kernel_conditions=kernel, chart_equations=chart,
                              witness=kernel_witness or chart_witness)
    if not result.agree:
        logger.warning("formulations disagree on %s: %s", point, result.witness)
    return result


def _unit(rng: np.random.Generator, p: int, modulus: int) -> int:
    while True:
        value = int(rng.integers(1, modulus))
        if value % p:
            return value


def sample_point(spec: ChartSpec, p: int, N: int, rng: np.random.Generator) -> ChartPoint:
    """
    A point of the chart from its parametrization: the free ratios at random,
    (s_mu/s_nu, t_nu/t_mu) = (p^a u, p^(1-a) u^-1), then random unit scalings.
    """
    q = p ** N
    s = [0] * spec.n
    t = [0] * spec.n
    s[spec.nu - 1] = 1
    t[spec.mu - 1] = 1
    unit = _unit(rng, p, q)
    a = int(rng.integers(0, 2))
    s[spec.mu - 1] = p ** a * unit % q
    t[spec.nu - 1] = p ** (1 - a) * pow(unit, -1, q) % q
    for i in spec.a_indices:
        if i != spec.nu:
            s[i - 1] = int(rng.integers(0, q))
            t[i - 1] = s[i - 1] * t[spec.nu - 1] % q
    for j in spec.b_indices:
        if j != spec.mu:
            t[j - 1] = int(rng.integers(0, q))
            s[j - 1] = t[j - 1] * s[spec.mu - 1] % q
    c_s, c_t = _unit(rng, p, q), _unit(rng, p, q)
    return ChartPoint(p=p, N=N, s=[c_s * x % q for x in s], t=[c_t * x % q for x in t])


def perturb(spec: ChartSpec, point: ChartPoint, rng: np.random.Generator, exponent: int = 0) -> ChartPoint:
    """Add p^exponent times a unit to one coordinate other than the pivots s_nu and t_mu."""
    q = point.modulus
    choices = [("s", i) for i in range(spec.n) if i != spec.nu - 1]
    choices += [("t", j) for j in range(spec.n) if j != spec.mu - 1]
    side, index = choices[int(rng.integers(0, len(choices)))]
    coords = {"s": list(point.s), "t": list(point.t)}
    coords[side][index] = (coords[side][index] + point.p ** exponent * _unit(rng, point.p, q)) % q
    return ChartPoint(p=point.p, N=point.N, s=coords["s"], t=coords["t"])


def _valuation(value: int, p: int, cap: int) -> int:
    v = 0
    while v < cap and value % p == 0:
        value //= p
        v += 1
    return v


class ChartReport(VerificationReport):
    title: str = "Local model chart"
    spec: Optional[ChartSpec] = None
    samples: int = 0
    disagreements: int = 0
    accepted: int = 0
    rejected_perturbations: int = 0

    def print_results(self) -> None:
        print(f"\n{self.samples} samples, {self.disagreements} disagreements, "
              f"{self.accepted} accepted, {self.rejected_perturbations} perturbations rejected")
        super().print_results()


def equivalence_report(spec: ChartSpec, p: int, N: int, samples: int = 200,
                       rng: Optional[np.random.Generator] = None) -> ChartReport:
    """
    Sample points of the chart and perturbations of them; both formulations
    must agree everywhere, accept the samples and reject the perturbations.
    """
    if N < 2:
        raise InputError("the chart check needs N >= 2 so that p is non-zero")
    rng = rng if rng is not None else np.random.default_rng(0)
    report = ChartReport(spec=spec, samples=samples)
    bookkeeping = True
    first_bad: Optional[dict] = None
    for _ in range(samples):
        point = sample_point(spec, p, N, rng)
        verdict = membership_check(spec, point)
        values = chart_values(spec, point)
        total = (_valuation(values[_s_ratio(spec, spec.mu)], p, N)
                 + _valuation(values[_t_ratio(spec, spec.nu)], p, N))
        bookkeeping = bookkeeping and total == 1
        report.accepted += verdict.accepted
        perturbed = perturb(spec, point, rng, int(rng.integers(0, N - 1)))
        other = membership_check(spec, perturbed)
        report.rejected_perturbations += not (other.kernel_conditions or other.chart_equations)
        for candidate, result in ((point, verdict), (perturbed, other)):
            if not result.agree:
                report.disagreements += 1
                first_bad = first_bad or {"point": candidate.model_dump(), "witness": result.witness}
    report.add(CheckResult.from_bool("formulations_agree", report.disagreements == 0, witness=first_bad))
    report.add(CheckResult.from_bool("samples_accepted", report.accepted == samples))
    report.add(CheckResult.from_bool("perturbations_rejected", report.rejected_perturbations == samples))
    report.add(CheckResult.from_bool("valuation_bookkeeping", bookkeeping,
                                     detail="v(s_mu/s_nu) + v(t_nu/t_mu) = 1"))
    report.calculate_status()
    return report


__all__ = [
    "ChartPoint",
    "ChartPresentation",
    "ChartReport",
    "ChartSpec",
    "MembershipResult",
    "chart_equations",
    "chart_presentation",
    "chart_relation",
    "chart_variables",
    "dependent_coordinates",
    "equivalence_report",
    "kernel_conditions",
    "membership_check",
    "perturb",
    "sample_point",
]
