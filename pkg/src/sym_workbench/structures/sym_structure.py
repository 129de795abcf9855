"""
Symmetric-power structures: the rank-2 module N, the rank-1 twists N_i, and the
lattice M inside Q (x) (sum_i N_i (x) Sym^{b_i} N) built by a ladder of raises.

Sym bases follow semilinear.multilinear: in Sym^b of a rank-2 module the
monomial x'^l x''^(b-l) sits at index b - l, and its label is the L-exponent l.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.ring import RingContext
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import (
    ConsistencyError,
    InputError,
    IntegralityError,
    LadderStuckError,
)
from sym_workbench.semilinear.graded_module import SigmaLinearMap
from sym_workbench.semilinear.multilinear import sym_matrix
from sym_workbench.semilinear.slopes import Skeleton, SlopeMultiset, graded_slopes
from sym_workbench.windows.base_verifier import CheckResult, CheckStatus, VerificationReport
from sym_workbench.windows.window import Window, normal_decomposition, window_from_dieudonne
from sym_workbench.windows.window_verifier import verify_window

logger = logging.getLogger(__name__)


class SymSpec(BaseModel):
    """
    Parameters (b_i, z, a, r) of a symmetric-power structure, with optional overrides.

    b: exponents b_1..b_c
    z: number of special degrees sigma_1 < ... < sigma_z
    a: half-integer target slope
    r: grading period
    f: c x z matrix of twist exponents, rows summing to a - b_i z / 2
    sigma, omega: special degrees and raise degrees
    slope_pair: (z', z'') realized by N, z' + z'' = z
    raise_order: deterministic round robin, or a seeded random legal raise
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    b: list[int] = Field(min_length=1)
    z: int = Field(ge=1)
    a: Fraction
    r: int = Field(ge=1)
    f: Optional[list[list[int]]] = None
    sigma: Optional[list[int]] = None
    omega: Optional[list[int]] = None
    slope_pair: Optional[tuple[Fraction, Fraction]] = None
    raise_order: Literal["round_robin", "random"] = "round_robin"
    raise_seed: int = 0

    @field_validator("b")
    @classmethod
    def _non_negative(cls, value: list[int]) -> list[int]:
        if any(b < 0 for b in value):
            raise ValueError(f"b_i must be non-negative, got {value}")
        return value

    @field_validator("a", mode="before")
    @classmethod
    def _half_integer(cls, value) -> Fraction:
        a = Fraction(str(value))
        if a <= 0 or (2 * a).denominator != 1:
            raise ValueError(f"a must be a positive half-integer, got {value}")
        return a

    @field_validator("slope_pair", mode="before")
    @classmethod
    def _fraction_pair(cls, value):
        if value is None:
            return None
        first, second = value
        return Fraction(str(first)), Fraction(str(second))

    @field_serializer("a")
    def _a_as_string(self, a: Fraction) -> str:
        return str(a)

    @field_serializer("slope_pair")
    def _pair_as_strings(self, pair: Optional[tuple[Fraction, Fraction]]) -> Optional[list[str]]:
        return None if pair is None else [str(v) for v in pair]

    @property
    def c(self) -> int:
        return len(self.b)

    @property
    def n(self) -> int:
        return sum(1 + b for b in self.b)

    @property
    def w(self) -> Fraction:
        return self.a * self.n

    @property
    def twist_slopes(self) -> list[int]:
        """z_i = a - b_i z / 2."""
        return [int(self.a - Fraction(b * self.z, 2)) for b in self.b]

    @property
    def is_complete(self) -> bool:
        return None not in (self.f, self.sigma, self.omega, self.slope_pair)

    def quotas(self) -> list[int]:
        """w_j = 1/2 sum_i (b_i + 1)(b_i + 2 f_ij)."""
        return [
            sum((b + 1) * (b + 2 * row[j]) for b, row in zip(self.b, self.f)) // 2
            for j in range(self.z)
        ]

    def interval(self, j: int) -> tuple[int, int]:
        """[sigma_j, sigma_{j+1}) as (start, end) with end possibly past r."""
        start = self.sigma[j]
        end = self.sigma[j + 1] if j + 1 < self.z else self.sigma[0] + self.r
        return start, end

    def special_degrees(self) -> set[int]:
        return set(self.sigma or [])

    def sym_index(self, block: int, label: int) -> int:
        """Position of x'^label x''^(b_i - label) of block i in the sum of Sym^{b_i}."""
        return sum(1 + b for b in self.b[:block]) + self.b[block] - label


def _balanced(total: int, parts: int) -> list[int]:
    q, rem = divmod(total, parts)
    return [q + 1] * rem + [q] * (parts - rem)


def _largest_remainder(extra: int, weights: list[int]) -> list[int]:
    total = sum(weights)
    if total == 0:
        weights = [1] * len(weights)
        total = len(weights)
    shares = [Fraction(extra * w, total) for w in weights]
    floors = [int(s) for s in shares]
    order = sorted(range(len(weights)), key=lambda j: (-(shares[j] - floors[j]), j))
    for j in order[: extra - sum(floors)]:
        floors[j] += 1
    return floors


def _check_feasible(spec: SymSpec) -> None:
    if spec.n * spec.a >= spec.r:
        raise InputError(f"n < r/a violated: n={spec.n}, r={spec.r}, a={spec.a}")
    if max(spec.b) * spec.z > 2 * spec.a:
        raise InputError(f"max b_i <= 2a/z violated: b={spec.b}, z={spec.z}, a={spec.a}")
    if spec.z % 2 == 0:
        if spec.a.denominator != 1:
            raise InputError(f"a must be an integer when z is even, got {spec.a}")
    elif any((int(2 * spec.a) - b) % 2 for b in spec.b):
        raise InputError(f"2a and every b_i must have the same parity when z is odd: a={spec.a}, b={spec.b}")
    if spec.z > spec.r:
        raise InputError(f"z={spec.z} special degrees do not fit in Z/{spec.r}Z")


def _choose_sigma(r: int, quotas: list[int]) -> list[int]:
    z = len(quotas)
    even = [j * r // z for j in range(z)]
    lengths = [(even[j + 1] if j + 1 < z else r) - even[j] for j in range(z)]
    if all(l >= max(w, 1) for l, w in zip(lengths, quotas)):
        return even
    base = [max(w, 1) for w in quotas]
    extra = r - sum(base)
    if extra < 0:
        raise InputError(f"the intervals cannot host the raise quotas {quotas} in Z/{r}Z")
    lengths = [l + s for l, s in zip(base, _largest_remainder(extra, quotas))]
    logger.debug("evenly spaced sigma too tight for quotas %s; using lengths %s", quotas, lengths)
    return [sum(lengths[:j]) for j in range(z)]


def choose_parameters(spec: SymSpec) -> SymSpec:
    """
    Fill f, sigma, omega and the slope pair, validating any overrides.

    Raises:
        InputError: the constraints on (b, z, a, r) fail, or no placement of
            the raise degrees exists
    """
    _check_feasible(spec)
    z, r = spec.z, spec.r
    f = spec.f
    if f is None:
        f = [_balanced(z_i, z) for z_i in spec.twist_slopes]
    elif len(f) != spec.c or any(len(row) != z or min(row) < 0 for row in f):
        raise InputError(f"f must be a non-negative {spec.c} x {z} matrix")
    elif [sum(row) for row in f] != spec.twist_slopes:
        raise InputError(f"rows of f must sum to a - b_i z/2 = {spec.twist_slopes}")
    partial = spec.model_copy(update={"f": f})
    quotas = partial.quotas()
    if sum(quotas) != spec.w:
        raise ConsistencyError(f"quotas {quotas} do not add up to w = a n = {spec.w}")
    sigma = spec.sigma
    if sigma is None:
        sigma = _choose_sigma(r, quotas)
    elif len(sigma) != z or sorted(set(sigma)) != list(sigma) or not all(0 <= s < r for s in sigma):
        raise InputError(f"sigma must list {z} increasing degrees in [0, {r})")
    partial = partial.model_copy(update={"sigma": list(sigma)})
    omega = spec.omega
    if omega is None:
        omega = []
        for j, quota in enumerate(quotas):
            start, end = partial.interval(j)
            if end - start < quota:
                raise InputError(f"interval [{start}, {end}) is too short for {quota} raises")
            omega += [(start + k) % r for k in range(quota)]
    else:
        omega = sorted({s % r for s in omega})
        for j, quota in enumerate(quotas):
            start, end = partial.interval(j)
            inside = sum(1 for s in omega if s in {d % r for d in range(start, end)})
            if inside != quota:
                raise InputError(f"omega has {inside} degrees in [{start}, {end}), expected {quota}")
    pair = spec.slope_pair
    if pair is None:
        pair = (Fraction(z, 2), Fraction(z, 2))
    elif pair[0] + pair[1] != z:
        raise InputError(f"slope pair {pair} must add up to z={z}")
    elif pair[0] != pair[1] and any(v.denominator != 1 or not 0 <= v <= z for v in pair):
        raise InputError(f"slope pair {pair} cannot be realized")
    return partial.model_copy(update={"omega": sorted(omega), "slope_pair": tuple(pair)})


def _require_complete(spec: SymSpec, ctx: RingContext) -> None:
    if not spec.is_complete:
        raise InputError("run choose_parameters on the spec first")
    if ctx.r != spec.r:
        raise InputError(f"the ring has r={ctx.r} but the spec has r={spec.r}")


def n_matrices(spec: SymSpec, ctx: RingContext) -> list[list[list[int]]]:
    """Integer matrices of phi_N per degree."""
    p = ctx.p
    identity = [[1, 0], [0, 1]]
    z_first, z_second = spec.slope_pair
    if z_first == z_second:
        special = [[[0, 1], [p, 0]]] * spec.z
    else:
        special = [[[p, 0], [0, 1]]] * int(z_first) + [[[1, 0], [0, p]]] * int(z_second)
    matrices = [identity] * spec.r
    for j, s in enumerate(spec.sigma):
        matrices = matrices[:s] + [special[j]] + matrices[s + 1:]
    return matrices


def build_N(spec: SymSpec, ctx: RingContext) -> Window:
    """
    The rank-2 window N: tau off the special degrees, the swap [[0,1],[p,0]] at
    every sigma_j for an isoclinal pair, diag(p,1) / diag(1,p) otherwise.
    """
    _require_complete(spec, ctx)
    return window_from_dieudonne(SigmaLinearMap.from_ints(ctx, n_matrices(spec, ctx)))


def build_Ni(spec: SymSpec, ctx: RingContext) -> list[SigmaLinearMap]:
    """Rank-one twists with p^{f_ij} at sigma_j and 1 elsewhere."""
    _require_complete(spec, ctx)
    twists = []
    for row in spec.f:
        exponents = [0] * spec.r
        for s, e in zip(spec.sigma, row):
            exponents[s] = e
        twists.append(SigmaLinearMap.from_ints(ctx, [[[ctx.p ** e]] for e in exponents]))
    return twists


def sym_block(g: RingMatrix, b: Sequence[int], scalars: Optional[Sequence[RingMatrix]] = None) -> RingMatrix:
    """sum_i scalars_i * Sym^{b_i} g as a block diagonal matrix."""
    blocks = []
    for i, power in enumerate(b):
        block = sym_matrix(g, power)
        if scalars is not None:
            block = block.series_scale(scalars[i])
        blocks.append(block)
    return RingMatrix.block_diag(blocks)


def product_operator(n_phi: SigmaLinearMap, twists: Sequence[SigmaLinearMap], b: Sequence[int]) -> SigmaLinearMap:
    """phi on P = sum_i N_i (x) Sym^{b_i} N."""
    return SigmaLinearMap([
        sym_block(n_phi[sigma], b, [t[sigma] for t in twists]) for sigma in range(n_phi.r)
    ])


class LadderStep(BaseModel):
    degree: int
    block: int
    label: int
    profile: list[list[int]]


def _chain_ok(profile: list[int]) -> bool:
    return all(profile[b] <= profile[b + 1] <= profile[b] + 1 for b in range(len(profile) - 1))


def legal_raises(profile: list[list[int]], target: list[list[int]]) -> list[tuple[int, int]]:
    """(block, label) pairs whose raise keeps 0 <= e <= b + f and the chain condition."""
    moves = []
    for i, row in enumerate(profile):
        for b in range(len(row) - 1, -1, -1):
            if row[b] >= target[i][b]:
                continue
            raised = row[:b] + [row[b] + 1] + row[b + 1:]
            if _chain_ok(raised):
                moves.append((i, b))
    return moves


def _next_raise(profile, target, pointer: int, rng: Optional[np.random.Generator]) -> tuple[int, int]:
    moves = legal_raises(profile, target)
    if not moves:
        raise LadderStuckError(f"no legal raise from profile {profile} towards {target}")
    if rng is not None:
        return moves[int(rng.integers(len(moves)))]
    c = len(profile)
    for offset in range(c):
        block = (pointer + offset) % c
        for move in moves:
            if move[0] == block:
                return move
    return moves[0]


def _exponent_vector(spec: SymSpec, profile: list[list[int]]) -> list[int]:
    vector = [0] * spec.n
    for i, row in enumerate(profile):
        for label, e in enumerate(row):
            vector[spec.sym_index(i, label)] = e
    return vector


def _divide_columns(matrix: RingMatrix, exponents: Sequence[int], what: str) -> RingMatrix:
    try:
        return RingMatrix.hstack([
            matrix.take(cols=[j]).divide_by_p(e, what=f"{what}, column {j}") for j, e in enumerate(exponents)
        ])
    except IntegralityError as exc:
        raise ConsistencyError(str(exc)) from exc


def _diag_p(ctx: RingContext, exponents: Sequence[int], tshape: tuple = ()) -> RingMatrix:
    return RingMatrix.from_ints(ctx, [
        [ctx.p ** e if i == j else 0 for j in range(len(exponents))] for i, e in enumerate(exponents)
    ], tshape)


@dataclass
class SymStructure:
    """
    N, the twists N_i, the product P, the lattice M and zeta_sigma = basis of M_sigma in P_sigma.
    """
    spec: SymSpec
    N: Window
    N_i: list[SigmaLinearMap]
    P: SigmaLinearMap
    M: Window
    zeta: list[RingMatrix]
    ladder_trace: list[LadderStep] = field(default_factory=list)

    @property
    def ctx(self) -> RingContext:
        return self.N.ctx

    def expected_slopes(self) -> SlopeMultiset:
        """{z_i + l z' + (b_i - l) z''}."""
        z_first, z_second = self.spec.slope_pair
        values = []
        for z_i, b in zip(self.spec.twist_slopes, self.spec.b):
            values += [z_i + l * z_first + (b - l) * z_second for l in range(b + 1)]
        return SlopeMultiset(values=values)


def build_M(spec: SymSpec, N: Window, N_i: Sequence[SigmaLinearMap]) -> SymStructure:
    """
    Walk every interval [sigma_j, sigma_{j+1}): the basis of M at sigma_j + k is
    Phi_P^(k) tau^k(Sym B_j) diag(p^-e), with one raise of the profile e on each
    step leaving a degree of omega. The last step lands on Sym B_{j+1}.

    Raises:
        LadderStuckError: no legal raise exists
        ConsistencyError: the lattice reached at sigma_{j+1} is not the product lattice
    """
    ctx = N.ctx
    _require_complete(spec, ctx)
    r, z = spec.r, spec.z
    P = product_operator(N.phi, N_i, spec.b)
    omega = set(spec.omega)
    rng = np.random.default_rng(spec.raise_seed) if spec.raise_order == "random" else None
    starts = [sym_block(N.decomposition.basis(s), spec.b) for s in spec.sigma]
    bases: list[Optional[RingMatrix]] = [None] * r
    operators: list[Optional[RingMatrix]] = [None] * r
    trace: list[LadderStep] = []
    for j in range(z):
        start, end = spec.interval(j)
        target = [[label + spec.f[i][j] for label in range(b + 1)] for i, b in enumerate(spec.b)]
        profile = [[0] * (b + 1) for b in spec.b]
        pointer = 0
        bases[start % r] = starts[j]
        for k in range(1, end - start + 1):
            degree = (start + k - 1) % r
            before = _exponent_vector(spec, profile)
            if degree in omega:
                block, label = _next_raise(profile, target, pointer, rng)
                profile[block][label] += 1
                pointer = (block + 1) % spec.c
                trace.append(LadderStep(degree=degree, block=block, label=label,
                                        profile=[list(row) for row in profile]))
                logger.debug("degree %d: raise e_(%d,%d) -> %s", degree, label, block, profile)
            after = _exponent_vector(spec, profile)
            image = P.iterate(start % r, k) @ starts[j].frobenius(k)
            if k < end - start:
                bases[(start + k) % r] = _divide_columns(image, after, f"M at degree {(start + k) % r}")
                operators[degree] = _diag_p(ctx, [e1 - e0 for e0, e1 in zip(before, after)])
                continue
            if profile != target:
                raise ConsistencyError(f"interval {j} ends with profile {profile}, expected {target}")
            landing = _divide_columns(image, after, f"lattice at sigma_{(j + 1) % z}")
            if not linalg.is_invertible(landing):
                raise ConsistencyError(
                    f"the lattice reached at degree {end % r} is not the product lattice"
                )
            following = starts[(j + 1) % z]
            delta = [e1 - e0 for e0, e1 in zip(before, after)]
            operators[degree] = linalg.inverse(following) @ landing @ _diag_p(ctx, delta)
    phi_m = SigmaLinearMap(operators)
    M = Window(phi_m, normal_decomposition(phi_m))
    logger.info("built M of rank %d with %d raises", spec.n, len(trace))
    return SymStructure(spec=spec, N=N, N_i=list(N_i), P=P, M=M, zeta=list(bases), ladder_trace=trace)


def build_sym(spec: SymSpec, ctx: RingContext) -> SymStructure:
    """choose_parameters, build_N, build_Ni and build_M in one go."""
    spec = spec if spec.is_complete else choose_parameters(spec)
    return build_M(spec, build_N(spec, ctx), build_Ni(spec, ctx))


class SymReport(VerificationReport):
    title: str = "Sym structure"
    spec: dict = Field(default_factory=dict)
    ranks_M: list[int] = Field(default_factory=list)
    dims_N: list[int] = Field(default_factory=list)
    dims_M: list[int] = Field(default_factory=list)
    slopes_N: Optional[SlopeMultiset] = None
    slopes_M: Optional[SlopeMultiset] = None
    expected_slopes_M: Optional[SlopeMultiset] = None
    ladder: list[LadderStep] = Field(default_factory=list)

    def print_results(self) -> None:
        print(f"\nb={self.spec.get('b')} z={self.spec.get('z')} a={self.spec.get('a')} r={self.spec.get('r')}")
        print(f"dim N/N1 = {self.dims_N}, dim M/M1 = {self.dims_M}")
        print(f"slopes N = {self.slopes_N}, slopes M = {self.slopes_M} (expected {self.expected_slopes_M})")
        super().print_results()


def verify_sym(structure: SymStructure) -> SymReport:
    """
    Rank table, (S.1)-(S.4), the dimension tables of N and M, and the slope oracle for M.
    """
    spec = structure.spec
    ctx = structure.ctx
    N, M, P = structure.N, structure.M, structure.P
    report = SymReport(
        spec=spec.model_dump(mode="json"),
        ranks_M=M.ranks,
        dims_N=N.quotient_dims(),
        dims_M=M.quotient_dims(),
        ladder=structure.ladder_trace,
    )
    report.add(CheckResult.from_bool("rank_M", all(n == spec.n for n in M.ranks), witness=M.ranks))

    special = spec.special_degrees()
    expected_n = [1 if s in special else 2 for s in range(spec.r)]
    n_window = verify_window(N)
    report.add(CheckResult.from_bool(
        "S.1", n_window.passed and N.quotient_dims() == expected_n,
        witness=None if n_window.passed else [c.name for c in n_window.failures()],
        detail=f"dim N/N1 = {N.quotient_dims()}",
    ))

    twist_ok = True
    for i, twist in enumerate(structure.N_i):
        slope = graded_slopes(twist)
        if twist.quasi or slope.values != (Fraction(spec.twist_slopes[i]),):
            twist_ok = False
            report.add(CheckResult(name="S.2", status=CheckStatus.FAIL, witness={"block": i, "slope": str(slope)}))
            break
    if twist_ok:
        report.add(CheckResult(name="S.2", status=CheckStatus.PASS, detail=f"z_i = {spec.twist_slopes}"))

    bad = None
    for sigma in range(spec.r):
        left = P[sigma] @ structure.zeta[sigma].frobenius()
        right = structure.zeta[(sigma + 1) % spec.r] @ M.phi[sigma]
        if not left.congruent(right, ctx.N):
            bad = sigma
            break
    report.add(CheckResult.from_bool("S.3", bad is None, degree=bad, precision=ctx.N))

    single = {s for s, d in enumerate(N.quotient_dims()) if d == 1}
    lattice_bad = next((s for s in sorted(single) if not linalg.is_invertible(structure.zeta[s])), None)
    report.add(CheckResult.from_bool(
        "S.4", lattice_bad is None and single == special, degree=lattice_bad,
        witness=None if single == special else {"rank_one_quotients": sorted(single), "sigma": sorted(special)},
    ))

    omega = set(spec.omega)
    expected_m = [spec.n - 1 if s in omega else spec.n for s in range(spec.r)]
    report.add(CheckResult.from_bool("dims_M", M.quotient_dims() == expected_m, witness=M.quotient_dims()))

    chains = all(_chain_ok(row) for step in structure.ladder_trace for row in step.profile)
    report.add(CheckResult.from_bool("ladder_chain", chains))
    raises = [sum(1 for step in structure.ladder_trace if step.degree in {d % spec.r for d in range(*spec.interval(j))})
              for j in range(spec.z)]
    report.add(CheckResult.from_bool("ladder_quota", raises == spec.quotas(), witness=raises))

    report.slopes_N = graded_slopes(N.phi)
    report.slopes_M = graded_slopes(M.phi)
    report.expected_slopes_M = structure.expected_slopes()
    report.add(CheckResult.from_bool(
        "slopes_N", report.slopes_N == SlopeMultiset(values=spec.slope_pair), witness=str(report.slopes_N),
    ))
    report.add(CheckResult.from_bool(
        "slopes_M", report.slopes_M == report.expected_slopes_M, witness=str(report.slopes_M),
    ))
    report.calculate_status()
    return report


def sym_power_rep(g: RingMatrix, structure: SymStructure,
                  skeletons: Optional[tuple[Skeleton, Skeleton]] = None) -> RingMatrix:
    """
    pi(g) = zeta_0^{-1} (sum_i Sym^{b_i} g) zeta_0 for g acting on N_0.

    With skeletons (of N and of M at degree 0), g is read in the skeleton basis
    of N and pi(g) is returned in the skeleton basis of M.

    Raises:
        MissingSkeletonError: a skeleton is partial
    """
    zeta = structure.zeta[0]
    if skeletons is None:
        return linalg.invert(zeta) @ sym_block(g, structure.spec.b) @ zeta
    n_skeleton, m_skeleton = skeletons
    n_skeleton.require_complete("rank-2 module")
    m_skeleton.require_complete("symmetric power")
    lattice_g = n_skeleton.basis @ g @ linalg.invert(n_skeleton.basis)
    lattice_pi = linalg.invert(zeta) @ sym_block(lattice_g, structure.spec.b) @ zeta
    return linalg.invert(m_skeleton.basis) @ lattice_pi @ m_skeleton.basis


__all__ = [
    "LadderStep",
    "SymReport",
    "SymSpec",
    "SymStructure",
    "build_M",
    "build_N",
    "build_Ni",
    "build_sym",
    "choose_parameters",
    "product_operator",
    "sym_block",
    "sym_power_rep",
    "verify_sym",
]
