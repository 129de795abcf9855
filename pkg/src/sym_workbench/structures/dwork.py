"""
Dwork trivialization and descent data of a deformed window.

Theta(x) = sum_i nabla^i(x)|_{t=0} t^i / i! identifies the deformed module with
its special fibre over series with bounded denominators. The descent datum is
theta(t1, t2) = Theta(t1) Theta(t2)^{-1}.
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Any, Optional

from pydantic import Field

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.ring import required_denominator_budget
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import DenominatorBudgetError, NotIsoclinalError
from sym_workbench.semilinear.graded_module import compose_cycle
from sym_workbench.semilinear.slopes import Skeleton, graded_slopes, skeleton
from sym_workbench.structures.connection import Connection
from sym_workbench.structures.deformation import DeformedWindow
from sym_workbench.structures.sym_structure import SymStructure, sym_block
from sym_workbench.windows.base_verifier import CheckResult, CheckStatus, VerificationReport

logger = logging.getLogger(__name__)


@dataclass
class DworkData:
    Theta: RingMatrix
    Theta_inv: RingMatrix
    theta: RingMatrix
    skeleton: Skeleton
    degree: int = 0

    @property
    def denominator(self) -> int:
        return self.Theta.denom

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "denominator": self.denominator,
            "Theta": self.Theta.to_json(),
            "Theta_inv": self.Theta_inv.to_json(),
            "theta": self.theta.to_json(),
            "skeleton": {"z": self.skeleton.z, "basis": self.skeleton.basis.to_json()},
        }


def _factorial_parts(i: int, p: int) -> tuple[int, int]:
    """i! = p^v * unit."""
    v, unit = 0, 1
    for k in range(2, i + 1):
        while k % p == 0:
            k //= p
            v += 1
        unit *= k
    return v, unit


def taylor_series(values: list[RingMatrix], T: int) -> RingMatrix:
    """sum_i values_i t^i / i! for constant matrices values_0 .. values_{T-1}."""
    ctx = values[0].ctx
    total = RingMatrix.zeros(ctx, values[0].rows, values[0].cols, (T,))
    for i, value in enumerate(values[:T]):
        v, unit = _factorial_parts(i, ctx.p)
        scaled = (value * pow(unit, -1, ctx.modulus)).p_power(-v)
        total = total + scaled.lift((T,)).shift(i)
    return total


def _special_skeleton(deformed: DeformedWindow, degree: int) -> Skeleton:
    slopes = graded_slopes(deformed.source.phi, degree)
    values = set(slopes.values)
    if len(values) != 1:
        raise NotIsoclinalError(f"special fibre is not isoclinal: graded slopes {slopes}")
    z = values.pop()
    if z.denominator != 1:
        raise NotIsoclinalError(f"special fibre has non-integral slope {z}")
    return skeleton(deformed.source.phi, int(z), degree).require_complete(f"special fibre of {deformed.kind}")


def dwork_theta(deformed: DeformedWindow, connection: Connection, degree: int = 0,
                budget: Optional[int] = None) -> DworkData:
    """
    Theta and Theta^{-1} from the Taylor formula at degree `degree`.

    Theta^{-1} is the Taylor series of the horizontal frame Y' = -C Y, whose
    derivatives at zero come from G_{i+1} = G_i' - G_i C.

    Raises:
        DenominatorBudgetError: the budget is below the valuation of (T-1)!
        NotIsoclinalError: the special fibre is not isoclinal of integral slope
        MissingSkeletonError: the skeleton of the special fibre is partial
    """
    ctx = deformed.window.ctx
    T = deformed.truncation
    budget = ctx.D if budget is None else budget
    needed = required_denominator_budget(ctx.p, T)
    if needed > budget:
        raise DenominatorBudgetError(f"truncation t^{T} needs denominators p^{needed}, budget is p^{budget}")
    frame = _special_skeleton(deformed, degree)

    c = connection[degree]
    derivatives = [m.at_zero() for m in connection.power_matrices(degree, T - 1)]
    Theta = taylor_series(derivatives, T).check_budget(budget, "Theta")

    g = RingMatrix.identity(ctx, c.rows, c.tshape)
    inverse_derivatives = [g.at_zero()]
    for _ in range(T - 1):
        g = g.derivative() - g @ c
        inverse_derivatives.append(g.at_zero())
    Theta_inv = taylor_series(inverse_derivatives, T).check_budget(budget, "Theta^{-1}")

    theta = descent_datum(Theta, Theta_inv)
    logger.debug("Theta at degree %d with denominator p^%d", degree, Theta.denom)
    return DworkData(Theta=Theta, Theta_inv=Theta_inv, theta=theta, skeleton=frame, degree=degree)


def descent_datum(Theta: RingMatrix, Theta_inv: RingMatrix) -> RingMatrix:
    """theta(t1, t2) = Theta(t1) Theta^{-1}(t2) over the bivariate truncation."""
    return Theta.embed(2, 0) @ Theta_inv.embed(2, 1)


def cocycle_holds(data: DworkData, exponent: int, order: int = 4) -> bool:
    """theta(t1,t2) theta(t2,t3) = theta(t1,t3) in a trivariate ring of the given order."""
    order = min(order, data.Theta.tshape[0])
    Theta = data.Theta.truncate(order)
    Theta_inv = data.Theta_inv.truncate(order)
    t12 = Theta.embed(3, 0) @ Theta_inv.embed(3, 1)
    t23 = Theta.embed(3, 1) @ Theta_inv.embed(3, 2)
    t13 = Theta.embed(3, 0) @ Theta_inv.embed(3, 2)
    return (t12 @ t23).congruent(t13, exponent)


def non_commuting_witnesses(theta: RingMatrix, exponent: int, max_degree: int = 2,
                            limit: int = 3) -> list[dict[str, Any]]:
    """Pairs of coefficient matrices of theta with a non-zero commutator."""
    order = theta.tshape[0]
    monomials = [
        (i, j) for i, j in product(range(order), repeat=2)
        if 0 < i + j <= max_degree
    ]
    coefficients = {m: theta.coefficient(m) for m in monomials}
    found = []
    for first, second in product(monomials, repeat=2):
        if first >= second:
            continue
        a, b = coefficients[first], coefficients[second]
        commutator = a @ b - b @ a
        if not commutator.is_zero(exponent):
            found.append({"first": list(first), "second": list(second), "valuation": commutator.valuation()})
            if len(found) >= limit:
                break
    return found


class DworkReport(VerificationReport):
    title: str = "Dwork trivialization"
    degree: int = 0
    denominator: int = 0
    certified_exponent: int = 0


def verify_dwork(deformed: DeformedWindow, connection: Connection, data: DworkData) -> DworkReport:
    ctx = deformed.window.ctx
    T = deformed.truncation
    exponent = max(ctx.N - ctx.D, 1)
    report = DworkReport(degree=data.degree, denominator=data.denominator, certified_exponent=exponent)
    Theta, Theta_inv = data.Theta, data.Theta_inv
    n = Theta.rows
    identity = RingMatrix.identity(ctx, n, (T,))

    report.add(CheckResult.from_bool("identity_mod_t", Theta.at_zero() == identity.at_zero()))
    horizontal = Theta.derivative().congruent(Theta @ connection[data.degree], exponent, t_order=T - 1)
    report.add(CheckResult.from_bool("horizontal", horizontal, precision=exponent))
    report.add(CheckResult.from_bool("inverse", (Theta @ Theta_inv).congruent(identity, exponent),
                                     precision=exponent))

    deformed_cycle = compose_cycle(deformed.phi, data.degree)
    special_cycle = compose_cycle(deformed.source.phi, data.degree).lift((T,))
    left = Theta @ deformed_cycle
    right = special_cycle @ Theta.frobenius(deformed.window.r)
    report.add(CheckResult.from_bool(
        "equivariant", left.congruent(right, exponent), precision=exponent,
        witness={"valuation": left.residual_valuation(right)},
    ))

    theta = data.theta
    report.add(CheckResult.from_bool("diagonal_identity", theta.diagonal().congruent(identity, exponent),
                                     precision=exponent))
    report.add(CheckResult.from_bool("cocycle", cocycle_holds(data, exponent), precision=exponent))
    if T > 1:
        first = theta.coefficient((1, 0))
        second = theta.coefficient((0, 1))
        report.add(CheckResult.from_bool("first_order_antisymmetric", (first + second).is_zero(exponent)))
    report.calculate_status()
    return report


class VelfReport(VerificationReport):
    title: str = "Descent data"
    det_ok: bool = False
    pi_theta_ok: bool = False
    theta_trivial: bool = True
    witnesses: list[dict[str, Any]] = Field(default_factory=list)

    def print_results(self) -> None:
        print(f"\ndet theta_N = 1: {self.det_ok}, pi(theta_N) = theta_M: {self.pi_theta_ok}")
        if self.witnesses:
            print(f"non-commuting coefficients: {self.witnesses}")
        super().print_results()


def pi_theta(theta_N: RingMatrix, structure: SymStructure, degree: int = 0) -> RingMatrix:
    """zeta^{-1} (sum_i Sym^{b_i} theta_N) zeta, coefficientwise in (t1, t2)."""
    zeta = structure.zeta[degree]
    return linalg.invert(zeta) @ sym_block(theta_N, structure.spec.b) @ zeta


def nontriviality_check(trivial: bool, witnesses: list[dict[str, Any]]) -> CheckResult:
    """
    A nontrivial theta passes only with a non-commuting pair of coefficients
    to show for it; without one the outcome is unknown.
    """
    if trivial:
        return CheckResult(name="theta_nontrivial", status=CheckStatus.SKIPPED, detail="trivial deformation")
    if not witnesses:
        return CheckResult(name="theta_nontrivial", status=CheckStatus.UNKNOWN,
                           detail="theta is nontrivial but its low-degree coefficients commute")
    return CheckResult(name="theta_nontrivial", status=CheckStatus.PASS, witness={"pairs": witnesses},
                       detail=f"{len(witnesses)} non-commuting coefficient pairs")


def check_velf(theta_N: DworkData, theta_M: DworkData, structure: SymStructure) -> VelfReport:
    """
    det theta_N = 1 and pi(theta_N) = theta_M at the certified precision.
    Non-commuting coefficients of theta_N are listed as evidence only.
    """
    ctx = structure.ctx
    exponent = max(ctx.N - ctx.D, 1)
    report = VelfReport()
    theta = theta_N.theta
    tshape = theta.tshape
    identity = RingMatrix.identity(ctx, theta.rows, tshape)

    det = linalg.determinant(theta)
    report.det_ok = det.congruent(RingMatrix.scalar(ctx, 1, tshape), exponent)
    report.add(CheckResult.from_bool("det_theta_N", report.det_ok, precision=exponent,
                                     witness={"valuation": det.residual_valuation(RingMatrix.scalar(ctx, 1, tshape))}))

    power = max(structure.spec.b, default=0)
    digits = ctx.prec - power * theta.denom - theta_M.theta.denom
    if digits < ctx.N:
        report.add(CheckResult(name="pi_theta", status=CheckStatus.PRECISION, detail=f"{digits} certified digits"))
    else:
        image = pi_theta(theta, structure, theta_N.degree)
        report.pi_theta_ok = image.congruent(theta_M.theta, exponent)
        report.add(CheckResult.from_bool("pi_theta", report.pi_theta_ok, precision=exponent,
                                         witness={"valuation": image.residual_valuation(theta_M.theta)}))

    report.theta_trivial = theta.congruent(identity, exponent)
    report.witnesses = non_commuting_witnesses(theta, exponent)
    report.add(nontriviality_check(report.theta_trivial, report.witnesses))
    report.calculate_status()
    return report


__all__ = [
    "DworkData",
    "DworkReport",
    "VelfReport",
    "check_velf",
    "cocycle_holds",
    "descent_datum",
    "dwork_theta",
    "non_commuting_witnesses",
    "nontriviality_check",
    "pi_theta",
    "taylor_series",
    "verify_dwork",
]
