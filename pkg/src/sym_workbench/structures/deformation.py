"""
Deformation sequences of the rank-2 window N, the one-parameter deformations
of N and M over W(k)[[t]] they induce, and the generic-fibre slope checks.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from pydantic import Field

from sym_workbench.arithmetic import linalg
from sym_workbench.arithmetic.series import RingMatrix
from sym_workbench.errors import ConsistencyError, InputError, LatticeError, SequenceNotFoundError, TruncationError
from sym_workbench.semilinear.graded_module import SigmaLinearMap
from sym_workbench.semilinear.slopes import GenericSlopes, SlopeMultiset, generic_slopes, graded_slopes
from sym_workbench.structures.sym_structure import SymStructure, sym_block
from sym_workbench.windows.base_verifier import CheckResult, CheckStatus, VerificationReport
from sym_workbench.windows.window import Frame, Window
from sym_workbench.windows.window_verifier import verify_window

logger = logging.getLogger(__name__)


class Alternative(str, Enum):
    CONGRUENT = "congruent"
    DROPS_TO_M1 = "drops_to_m1"


@dataclass
class DeformationSequence:
    """
    Vectors e_sigma outside N_{sigma,1}; at each degree either phi(e_{sigma-1}) = e_sigma
    mod p, or phi(e_{sigma-1}) lies in N_{sigma,1}.
    """
    e: list[RingMatrix]
    alt: list[Alternative]
    seed: tuple[int, int] = (0, 0)

    @property
    def drops(self) -> set[int]:
        return {sigma for sigma, a in enumerate(self.alt) if a == Alternative.DROPS_TO_M1}

    def key(self) -> tuple:
        return tuple(tuple(int(x) for x in e.data.flatten()) for e in self.e)

    def to_json(self) -> dict:
        return {
            "e": [[row[0] for row in e.to_ints()] for e in self.e],
            "alt": [a.value for a in self.alt],
            "seed": list(self.seed),
        }


def _reduce(x: RingMatrix) -> RingMatrix:
    """Plain lift of the reduction mod p."""
    return RingMatrix(x.ctx, x.data % x.ctx.p)


def in_m1(N: Window, sigma: int, x: RingMatrix) -> bool:
    """x in N_{sigma,1} = L + pT: its T-coordinates vanish mod p."""
    coords = linalg.inverse(N.decomposition.basis(sigma)) @ x
    l = N.decomposition.l_rank(sigma)
    if l == coords.rows:
        return True
    return coords.take(rows=range(l, coords.rows)).is_zero(1)


def _lowest_outside(N: Window, sigma: int) -> Optional[RingMatrix]:
    identity = RingMatrix.identity(N.ctx, N.phi.rank(sigma))
    for k in range(identity.cols):
        candidate = identity.take(cols=[k])
        if not in_m1(N, sigma, candidate):
            return candidate
    return None


def _check_preconditions(N: Window, require_nonzero_slopes: bool) -> None:
    if N.frame != Frame.POINT:
        raise InputError("deformation sequences live on a point-frame window")
    if any(n != 2 for n in N.ranks):
        raise InputError(f"deformation sequences need a rank-2 window, got ranks {N.ranks}")
    if any(d < 1 for d in N.quotient_dims()):
        raise InputError(f"dim N/N1 must be at least 1 in every degree, got {N.quotient_dims()}")
    if require_nonzero_slopes:
        slopes = graded_slopes(N.phi)
        if any(s == 0 for s in slopes.values):
            raise InputError(f"every graded slope of N must be non-zero, got {slopes}")


def _propagate(N: Window, start: int, seed: RingMatrix) -> tuple[Optional[DeformationSequence], RingMatrix]:
    """
    Run the propagation around the cycle from e_start = seed. Returns the
    sequence (None when the closure at start fails) and the closing image.
    """
    r = N.r
    e: list[Optional[RingMatrix]] = [None] * r
    alt: list[Optional[Alternative]] = [None] * r
    e[start] = seed
    previous = seed
    for step in range(1, r + 1):
        sigma = (start + step) % r
        image = N.phi.apply(sigma - 1, previous)
        if step == r:
            if in_m1(N, sigma, image):
                alt[sigma] = Alternative.DROPS_TO_M1
            elif (image - e[sigma]).is_zero(1):
                alt[sigma] = Alternative.CONGRUENT
            else:
                return None, _reduce(image)
            break
        if in_m1(N, sigma, image):
            e[sigma] = _lowest_outside(N, sigma)
            alt[sigma] = Alternative.DROPS_TO_M1
        else:
            e[sigma] = _reduce(image)
            alt[sigma] = Alternative.CONGRUENT
        previous = e[sigma]
    return DeformationSequence(e=list(e), alt=list(alt)), image


def sequence_problems(N: Window, seq: DeformationSequence) -> list[str]:
    """Violations of the sequence invariants (empty when valid)."""
    problems = []
    special = {sigma for sigma, d in enumerate(N.quotient_dims()) if d < N.phi.rank(sigma)}
    for sigma in range(N.r):
        if in_m1(N, sigma, seq.e[sigma]):
            problems.append(f"e_{sigma} lies in N_{sigma},1")
        image = N.phi.apply(sigma - 1, seq.e[sigma - 1])
        drops = in_m1(N, sigma, image)
        congruent = (image - seq.e[sigma]).is_zero(1)
        if drops == congruent:
            problems.append(f"degree {sigma}: {'both' if drops else 'neither'} alternatives hold")
        elif (seq.alt[sigma] == Alternative.DROPS_TO_M1) != drops:
            problems.append(f"degree {sigma}: flag {seq.alt[sigma].value} does not match")
        if drops and sigma not in special:
            problems.append(f"degree {sigma}: drops to N_1 outside the special degrees")
    return problems


def find_deformation_sequence(N: Window, require_nonzero_slopes: bool = True,
                              start: int = 0) -> DeformationSequence:
    """
    Propagate from the lowest basis vector outside N_{start,1}; when the cycle
    does not close, retry with the closing image as the new seed (at most
    rank * r seeds).

    Raises:
        InputError: N is not rank 2, some dim N/N1 is 0, or a graded slope is 0
        SequenceNotFoundError: no seed closes the cycle
    """
    _check_preconditions(N, require_nonzero_slopes)
    seed = _lowest_outside(N, start)
    witness = None
    for attempt in range(N.phi.rank(start) * N.r):
        seq, closing = _propagate(N, start, seed)
        if seq is not None:
            seq.seed = (start, attempt)
            problems = sequence_problems(N, seq)
            if problems:
                raise SequenceNotFoundError(f"propagated sequence is invalid: {problems}")
            logger.debug("deformation sequence found after %d seeds, drops at %s", attempt + 1, sorted(seq.drops))
            return seq
        witness = closing.to_ints()
        seed = closing
    raise SequenceNotFoundError(f"no deformation sequence closes at degree {start}; last closing image {witness}")


def enumerate_deformation_sequences(N: Window, limit: int = 8,
                                    require_nonzero_slopes: bool = True) -> list[DeformationSequence]:
    """Distinct valid sequences reachable from every standard seed at every degree."""
    _check_preconditions(N, require_nonzero_slopes)
    found: dict[tuple, DeformationSequence] = {}
    for start in range(N.r):
        identity = RingMatrix.identity(N.ctx, N.phi.rank(start))
        seeds = [identity.take(cols=[k]) for k in range(identity.cols)]
        seeds.append(identity.take(cols=[0]) + identity.take(cols=[1]))
        for index, seed in enumerate(seeds):
            if in_m1(N, start, seed):
                continue
            seq, _ = _propagate(N, start, seed)
            if seq is None or sequence_problems(N, seq):
                continue
            seq.seed = (start, index)
            found.setdefault(seq.key(), seq)
            if len(found) >= limit:
                return list(found.values())
    return list(found.values())


@dataclass
class DeformedWindow:
    """A series-frame window whose value at t = 0 is `source`."""
    window: Window
    source: Window
    u: list[RingMatrix]
    sequence: Optional[DeformationSequence] = None
    kind: str = "N"
    extras: dict = field(default_factory=dict)

    @property
    def phi(self) -> SigmaLinearMap:
        return self.window.phi

    @property
    def truncation(self) -> int:
        return self.window.phi.tshape[0]

    def specializes(self) -> bool:
        return self.window.phi.at_zero() == self.source.phi


def deformation_operators(N: Window, seq: DeformationSequence, T: int) -> list[RingMatrix]:
    """
    u_sigma = 1 + t v_sigma, with v_sigma = 0 at congruent degrees and, where the
    sequence drops, v(phi(e_{sigma-1})) = e_sigma and v(e_sigma) = 0.

    Raises:
        ConsistencyError: {phi(e_{sigma-1}), e_sigma} is not a basis
    """
    ctx = N.ctx
    operators = []
    for sigma in range(N.r):
        identity = RingMatrix.identity(ctx, N.phi.rank(sigma), (T,))
        if seq.alt[sigma] != Alternative.DROPS_TO_M1:
            operators.append(identity)
            continue
        image = N.phi.apply(sigma - 1, seq.e[sigma - 1])
        q = RingMatrix.hstack([image, seq.e[sigma]])
        if not linalg.is_invertible(q):
            raise ConsistencyError(f"degree {sigma}: phi(e_{sigma - 1}) and e_{sigma} do not form a basis")
        target = RingMatrix.hstack([seq.e[sigma], RingMatrix.zeros(ctx, q.rows, 1)])
        v = target @ linalg.inverse(q)
        operators.append(identity + v.lift((T,)).shift(1))
    return operators


def deform_N(N: Window, seq: DeformationSequence, T: Optional[int] = None) -> DeformedWindow:
    """phi~ = u_sigma o phi on the degree-(sigma-1) part; truncated at t^T."""
    T = T or N.ctx.T
    u = deformation_operators(N, seq, T)
    phi = SigmaLinearMap([u[(sigma + 1) % N.r] @ N.phi[sigma].lift((T,)) for sigma in range(N.r)])
    return DeformedWindow(window=Window(phi, N.decomposition), source=N, u=u, sequence=seq, kind="N")


def deform_M(structure: SymStructure, seq: DeformationSequence, T: Optional[int] = None) -> DeformedWindow:
    """
    u^M_sigma = zeta_sigma^{-1} (sum_i Sym^{b_i} u_sigma) zeta_sigma, which preserves
    the lattice M_sigma where zeta_sigma is unimodular.

    Raises:
        LatticeError: some u^M_sigma is not integral
    """
    T = T or structure.ctx.T
    M = structure.M
    u_n = deformation_operators(structure.N, seq, T)
    u_m, u_p = [], []
    for sigma in range(M.r):
        lifted = sym_block(u_n[sigma], structure.spec.b)
        zeta = structure.zeta[sigma]
        conjugated = linalg.invert(zeta).lift((T,)) @ lifted @ zeta.lift((T,))
        if not conjugated.is_integral:
            raise LatticeError(f"degree {sigma}: the deformation does not preserve the lattice M")
        u_m.append(conjugated)
        u_p.append(lifted)
    phi = SigmaLinearMap([u_m[(sigma + 1) % M.r] @ M.phi[sigma].lift((T,)) for sigma in range(M.r)])
    product = SigmaLinearMap([u_p[(sigma + 1) % M.r] @ structure.P[sigma].lift((T,)) for sigma in range(M.r)])
    return DeformedWindow(window=Window(phi, M.decomposition), source=M, u=u_m, sequence=seq, kind="M",
                          extras={"product": product})


class SuffReport(VerificationReport):
    title: str = "Sufficient deformation"
    special_slopes_N: Optional[SlopeMultiset] = None
    special_slopes_M: Optional[SlopeMultiset] = None
    generic_slopes_N: Optional[SlopeMultiset] = None
    generic_slopes_M: Optional[SlopeMultiset] = None
    expected_generic_M: Optional[SlopeMultiset] = None
    truncation: Optional[int] = None
    required_truncation: Optional[int] = None
    generic_truncation: Optional[int] = None
    certified_truncation: Optional[int] = None
    drops: list[int] = Field(default_factory=list)

    def print_results(self) -> None:
        print(f"\nspecial fibre: N {self.special_slopes_N}, M {self.special_slopes_M}")
        print(f"generic fibre (T={self.generic_truncation}, drop term needs T={self.required_truncation})"
              f": N {self.generic_slopes_N}, M {self.generic_slopes_M}"
              f" (expected {self.expected_generic_M})")
        super().print_results()


def expected_generic_slopes(structure: SymStructure) -> SlopeMultiset:
    """{z_i + (b_i - l) z}: the slope formula for the split pair (0, z)."""
    z = structure.spec.z
    values = []
    for z_i, b in zip(structure.spec.twist_slopes, structure.spec.b):
        values += [Fraction(z_i + (b - l) * z) for l in range(b + 1)]
    return SlopeMultiset(values=values)


def drop_exponents(seq: DeformationSequence, p: int) -> list[int]:
    """
    Per degree d, the power of t at which every drop of the sequence enters
    the r-fold cycle at d: there u_s is twisted (d - s) mod r times, so its t
    becomes t^(p^((d - s) mod r)).
    """
    r = len(seq.alt)
    return [sum(p ** ((d - s) % r) for s in seq.drops) for d in range(r)]


def drop_exponent(seq: DeformationSequence, p: int) -> int:
    return min(drop_exponents(seq, p))


def _sym_weight(b: int) -> int:
    # power of the drop term at the deepest vertex of the Sym^b polygon
    return max((j * (b + 1 - j) for j in range(1, b + 1)), default=0)


def generic_truncations(seq: DeformationSequence, structure: SymStructure) -> tuple[int, int]:
    """Truncations at which N~ and M~ first carry the terms that lower their polygons."""
    exponent = drop_exponent(seq, structure.ctx.p)
    weight = sum(_sym_weight(b) for b in structure.spec.b)
    return exponent + 1, weight * exponent + 1


def _at_truncation(deformed: DeformedWindow, structure: SymStructure, T: int) -> SigmaLinearMap:
    if T == deformed.truncation or deformed.sequence is None:
        return deformed.phi
    if deformed.kind == "N":
        return deform_N(deformed.source, deformed.sequence, T).phi
    return deform_M(structure, deformed.sequence, T).phi


def _generic_check(name: str, deformed: DeformedWindow, structure: SymStructure, required: int,
                   expected: SlopeMultiset, certify: bool,
                   limit: Optional[int]) -> tuple[CheckResult, Optional[GenericSlopes]]:
    T = max(deformed.truncation, required)
    if limit is not None and T > limit:
        return CheckResult(
            name=name, status=CheckStatus.PRECISION, witness={"required_truncation": required, "limit": limit},
            detail=f"the drop term sits at t^{required - 1}, beyond the truncation limit {limit}",
        ), None
    phi = _at_truncation(deformed, structure, T)
    doubled = _at_truncation(deformed, structure, 2 * T) if certify and deformed.sequence is not None else None
    degree = None
    if deformed.sequence is not None and deformed.sequence.drops:
        exponents = drop_exponents(deformed.sequence, structure.ctx.p)
        degree = exponents.index(min(exponents))
    try:
        generic = generic_slopes(phi, doubled, degree)
    except TruncationError as exc:
        return CheckResult(
            name=name, status=CheckStatus.PRECISION, witness={"truncation": T}, detail=str(exc),
        ), None
    return CheckResult.from_bool(name, generic.slopes == expected, witness=str(generic.slopes)), generic


def check_suff(N_def: DeformedWindow, M_def: DeformedWindow, structure: SymStructure,
               certify: bool = True, max_truncation: Optional[int] = None) -> SuffReport:
    """
    (a) some degree outside omega has M_1 = pM and M~ satisfies (W.4);
    (b) generic slopes {0, z} for N~ and {z_i + (b_i - l) z} for M~;
    (c) the special fibres keep their slopes.

    The generic slopes are read at the larger of T and the truncation the
    drop positions need. N~ is certified against twice that truncation;
    M~ is certified the same way only when N~ is not.
    Beyond `max_truncation`, or when the certification disagrees, (b) is
    reported as PRECISION.
    """
    spec = structure.spec
    report = SuffReport(truncation=N_def.truncation, drops=sorted(N_def.sequence.drops) if N_def.sequence else [])
    omega = set(spec.omega)
    candidates = [s for s in range(spec.r) if s not in omega and structure.M.decomposition.l_rank(s) == 0]
    m_window = verify_window(M_def.window)
    w4 = m_window.check("W.4")
    report.add(CheckResult.from_bool(
        "ordinary_degree", bool(candidates), witness={"degrees": candidates},
        detail="a degree outside omega with M_1 = pM",
    ))
    report.add(CheckResult(
        name="W.4_deformed_M", status=w4.status if w4 else CheckStatus.UNKNOWN,
        witness=w4.witness if w4 else None,
    ))

    required_n, required_m = generic_truncations(N_def.sequence, structure) if N_def.sequence else (1, 1)
    report.required_truncation = max(required_n, required_m)
    report.expected_generic_M = expected_generic_slopes(structure)
    check_n, generic_n = _generic_check(
        "generic_N", N_def, structure, required_n, SlopeMultiset(values=[0, spec.z]), certify, max_truncation,
    )
    # M~ comes from the same sequence as N~, so a certified N~ certifies it
    certify_m = certify and (generic_n is None or generic_n.certified_truncation is None)
    check_m, generic_m = _generic_check(
        "generic_M", M_def, structure, required_m, report.expected_generic_M, certify_m, max_truncation,
    )
    report.add(check_n)
    report.add(check_m)
    if generic_n is not None:
        report.generic_truncation = generic_n.truncation
        report.certified_truncation = generic_n.certified_truncation
        report.generic_slopes_N = generic_n.slopes
    if generic_m is not None:
        report.generic_slopes_M = generic_m.slopes

    report.special_slopes_N = graded_slopes(N_def.phi.at_zero())
    report.special_slopes_M = graded_slopes(M_def.phi.at_zero())
    unchanged = (report.special_slopes_N == graded_slopes(structure.N.phi)
                 and report.special_slopes_M == graded_slopes(structure.M.phi))
    report.add(CheckResult.from_bool("special_fibre_unchanged", unchanged))
    report.add(CheckResult.from_bool(
        "specializes", N_def.specializes() and M_def.specializes(), precision=structure.ctx.N,
    ))
    report.calculate_status()
    return report


__all__ = [
    "Alternative",
    "DeformationSequence",
    "DeformedWindow",
    "SuffReport",
    "check_suff",
    "deform_M",
    "deform_N",
    "drop_exponent",
    "drop_exponents",
    "enumerate_deformation_sequences",
    "find_deformation_sequence",
    "generic_truncations",
    "sequence_problems",
]
