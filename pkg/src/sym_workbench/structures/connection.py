"""
The unique connection on a deformed window compatible with Frobenius.

On degree sigma the connection is nabla(f) = df/dt + C_sigma f. Compatibility
nabla(phi x) = p t^(p-1) phi(nabla x) for phi~ = A~ tau reads

    C_{sigma+1} = t^(p-1) A~_sigma tau(C_sigma) psi_sigma - A~'_sigma psi_sigma / p

with psi = p A~^{-1} the matrices of psi#. The right-hand side is a contraction
in the t-adic topology, so the fixed point is reached by iterating the
correction Delta_{j+1} = t^(p-1) A~ tau(Delta_j) psi.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import IntegralityError, NonConvergenceError
from sym_workbench.structures.deformation import DeformedWindow
from sym_workbench.windows.base_verifier import CheckResult, VerificationReport
from sym_workbench.windows.window import psi_sharp

logger = logging.getLogger(__name__)


@dataclass
class Connection:
    matrices: list[RingMatrix]
    iterations: int = 0
    residual_valuations: list[float] = field(default_factory=list)

    def __getitem__(self, sigma: int) -> RingMatrix:
        return self.matrices[sigma % len(self.matrices)]

    @property
    def r(self) -> int:
        return len(self.matrices)

    def apply(self, sigma: int, f: RingMatrix) -> RingMatrix:
        """nabla(f) = f' + C_sigma f for a column of series."""
        return f.derivative() + self[sigma] @ f

    def power_matrices(self, sigma: int, count: int) -> list[RingMatrix]:
        """Matrices of nabla^0, ..., nabla^count on the basis of degree sigma."""
        c = self[sigma]
        current = RingMatrix.identity(c.ctx, c.rows, c.tshape)
        powers = [current]
        for _ in range(count):
            current = current.derivative() + c @ current
            powers.append(current)
        return powers

    def to_json(self) -> dict:
        return {
            "matrices": [m.to_json() for m in self.matrices],
            "iterations": self.iterations,
            "residual_valuations": [None if math.isinf(v) else v for v in self.residual_valuations],
        }


def iteration_bound(deformed: DeformedWindow) -> int:
    ctx = deformed.window.ctx
    rank = max(deformed.window.ranks)
    return max(math.ceil(deformed.truncation / (ctx.p - 1)), ctx.N * deformed.window.r * rank)


def _image(deformed: DeformedWindow, psi, seed: list[RingMatrix], constant: list[RingMatrix]) -> list[RingMatrix]:
    """F(C)_{sigma+1} = t^(p-1) A~ tau(C_sigma) psi_sigma + constant_{sigma+1}."""
    p = deformed.window.ctx.p
    phi = deformed.phi
    r = phi.r
    out: list[Optional[RingMatrix]] = [None] * r
    for sigma in range(r):
        term = (phi[sigma] @ seed[sigma].frobenius() @ psi[sigma]).shift(p - 1)
        out[(sigma + 1) % r] = term if constant is None else term + constant[(sigma + 1) % r]
    return out


def solve_connection(deformed: DeformedWindow, seed: Optional[list[RingMatrix]] = None,
                     max_iterations: Optional[int] = None) -> Connection:
    """
    Fixed-point iteration from C = seed (zero by default).

    Raises:
        IntegralityError: A~' psi is not divisible by p, or the solution has denominators
        NonConvergenceError: the corrections do not vanish within the iteration bound
    """
    window = deformed.window
    ctx = window.ctx
    phi = window.phi
    r = phi.r
    tshape = phi.tshape
    psi = psi_sharp(window)
    constant: list[Optional[RingMatrix]] = [None] * r
    for sigma in range(r):
        derivative = phi[sigma].derivative() @ psi[sigma]
        constant[(sigma + 1) % r] = -derivative.divide_by_p(1, what=f"A~'_{sigma} psi_{sigma}")
    if seed is None:
        seed = [RingMatrix.zeros(ctx, phi.rank(sigma), phi.rank(sigma), tshape) for sigma in range(r)]
    current = _image(deformed, psi, seed, constant)
    delta = [c - s for c, s in zip(current, seed)]
    bound = max_iterations or iteration_bound(deformed)
    iterations = 1
    while not all(d.is_zero() for d in delta):
        if iterations >= bound:
            worst = min(d.valuation() for d in delta)
            raise NonConvergenceError(f"connection corrections still of valuation {worst} after {bound} iterations")
        delta = _image(deformed, psi, delta, None)
        current = [c + d for c, d in zip(current, delta)]
        iterations += 1
    for sigma, c in enumerate(current):
        if not c.is_integral:
            raise IntegralityError(f"C_{sigma} carries a denominator p^{c.denom}")
    logger.debug("connection converged after %d iterations", iterations)
    connection = Connection(matrices=current, iterations=iterations)
    connection.residual_valuations = [
        residual(deformed, connection, sigma).valuation() for sigma in range(r)
    ]
    return connection


def residual(deformed: DeformedWindow, connection: Connection, sigma: int) -> RingMatrix:
    """C_{sigma+1} A~ + A~' - p t^(p-1) A~ tau(C_sigma), zero mod t^T for a solution."""
    p = deformed.window.ctx.p
    a = deformed.phi[sigma]
    return (
        connection[sigma + 1] @ a
        + a.derivative()
        - (a @ connection[sigma].frobenius()).shift(p - 1) * p
    )


def random_seed(deformed: DeformedWindow, rng: np.random.Generator) -> list[RingMatrix]:
    phi = deformed.phi
    return [RingMatrix.random(phi.ctx, phi.rank(s), phi.rank(s), rng, phi.tshape) for s in range(phi.r)]


class ConnectionReport(VerificationReport):
    title: str = "Connection"
    iterations: int = 0
    residual_valuations: list[Optional[float]] = []


def verify_connection(deformed: DeformedWindow, connection: Connection,
                      rng: Optional[np.random.Generator] = None) -> ConnectionReport:
    """
    The compatibility residual, integrality, nilpotence nabla^p(M) in A~ phi(M),
    the Leibniz rule on a random series, and independence of the starting point.
    """
    ctx = deformed.window.ctx
    p = ctx.p
    T = deformed.truncation
    rng = rng if rng is not None else np.random.default_rng(0)
    report = ConnectionReport(
        iterations=connection.iterations,
        residual_valuations=[None if math.isinf(v) else v for v in connection.residual_valuations],
    )
    bad = next((s for s in range(connection.r) if not residual(deformed, connection, s).is_zero(ctx.N)), None)
    report.add(CheckResult.from_bool("compatibility", bad is None, degree=bad, precision=ctx.N))
    report.add(CheckResult.from_bool("integral", all(c.is_integral for c in connection.matrices)))

    psi = psi_sharp(deformed.window)
    nilpotent = None
    if T > p:
        for sigma in range(connection.r):
            top = connection.power_matrices(sigma, p)[-1]
            if not (psi[sigma - 1] @ top).is_zero(1, t_order=T - p):
                nilpotent = sigma
                break
    report.add(CheckResult.from_bool("nilpotent", nilpotent is None, degree=nilpotent,
                                     detail=f"valid mod t^{max(T - p, 0)}"))

    alpha = RingMatrix.random(ctx, 1, 1, rng, (T,))
    x = RingMatrix.random(ctx, connection[0].rows, 1, rng, (T,))
    left = connection.apply(0, x.series_scale(alpha))
    right = x.series_scale(alpha.derivative()) + connection.apply(0, x).series_scale(alpha)
    report.add(CheckResult.from_bool("leibniz", left.congruent(right, ctx.N, t_order=T - 1)))

    other = solve_connection(deformed, seed=random_seed(deformed, rng))
    same = all(a.congruent(b, ctx.N) for a, b in zip(connection.matrices, other.matrices))
    report.add(CheckResult.from_bool("seed_independent", same))
    report.calculate_status()
    return report


__all__ = [
    "Connection",
    "ConnectionReport",
    "iteration_bound",
    "random_seed",
    "residual",
    "solve_connection",
    "verify_connection",
]
