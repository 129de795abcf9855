import itertools
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from sympy import Poly, isprime, symbols

from sym_workbench.errors import InputError, RingConstructionError

logger = logging.getLogger(__name__)

RANK_CAP = 64


class RingParams(BaseModel):
    """
    Parameters of the coefficient ring Z_q = W(F_{p^r}) / p^N and of the
    truncated series frame Z_q[[t]] / t^T.

    p: odd prime
    r: grading period and residue degree
    N: p-adic working precision (exponent)
    T: t-adic truncation order
    D: maximal power of p allowed in denominators
    """
    model_config = ConfigDict(frozen=True)

    p: int = 3
    r: int = Field(default=1, ge=1)
    N: int = Field(default=5, ge=1)
    T: int = Field(default=8, ge=1)
    D: int = Field(default=0, ge=0)

    @field_validator("p")
    @classmethod
    def _odd_prime(cls, value: int) -> int:
        if value < 3 or not isprime(value):
            raise ValueError(f"p must be an odd prime, got {value}")
        return value


def required_denominator_budget(p: int, T: int) -> int:
    """
    Largest p-adic valuation of i! for i < T.
    """
    budget, power = 0, p
    while power <= T - 1:
        budget += (T - 1) // power
        power *= p
    return budget


def headroom(params: RingParams) -> int:
    """
    Guard digits carried on top of N so that divisions by p, by i! and by the
    Faddeev-LeVerrier indices never eat into the certified digits.
    """
    return 4 * params.D + math.ceil(math.log(RANK_CAP, params.p)) + 6


def dtype_for(modulus: int):
    # int64 while a product of two residues fits in 62 bits; contractions go through modular_tensordot
    if modulus.bit_length() <= 31:
        return np.int64
    return object


DIRECT_BITS = 24


def modular_tensordot(a: np.ndarray, b: np.ndarray, axes, q: int) -> np.ndarray:
    """
    np.tensordot reduced mod q. Above DIRECT_BITS the int64 left factor is
    split into 16-bit halves, so every partial sum stays below 2^63 for up to
    2^15 accumulated terms.
    """
    if a.dtype == object or b.dtype == object or q.bit_length() <= DIRECT_BITS:
        return np.tensordot(a, b, axes) % q
    a = a % q
    high = np.tensordot(a >> 16, b, axes) % q
    low = np.tensordot(a & 0xFFFF, b, axes) % q
    return (high * 65536 + low) % q


def _poly_mod(coeffs: list[int], modulus_poly: Sequence[int], q: int) -> list[int]:
    """Reduce a polynomial (low degree first) modulo a monic polynomial."""
    r = len(modulus_poly) - 1
    coeffs = [c % q for c in coeffs]
    for deg in range(len(coeffs) - 1, r - 1, -1):
        lead = coeffs[deg]
        if lead:
            for k in range(r + 1):
                coeffs[deg - r + k] = (coeffs[deg - r + k] - lead * modulus_poly[k]) % q
    coeffs = coeffs[:r] + [0] * max(0, r - len(coeffs))
    return coeffs


def least_irreducible(p: int, r: int) -> tuple[int, ...]:
    """
    Lexicographically least monic irreducible polynomial of degree r over F_p.

    Candidates x^r + c_{r-1}x^{r-1} + ... + c_0 are enumerated with the tuple
    (c_0, ..., c_{r-1}) in lexicographic order. Returned low degree first,
    including the leading 1.
    """
    x = symbols("x")
    for tail in itertools.product(range(p), repeat=r):
        coeffs = list(tail) + [1]
        if r == 1 or Poly(list(reversed(coeffs)), x, modulus=p).is_irreducible:
            return tuple(coeffs)
    raise RingConstructionError(f"no irreducible polynomial of degree {r} over F_{p}")


@dataclass(frozen=True, eq=False)
class RingContext:
    """
    Immutable arithmetic context for Z_q = (Z/p^prec)[x]/(m(x)).

    Elements are coordinate vectors of length r with respect to the power
    basis 1, x, ..., x^{r-1}. The Frobenius tau is stored as the image of x and
    applied as the r x r matrix whose j-th column holds tau(x)^j.
    """
    params: RingParams
    prec: int
    modulus_poly: tuple[int, ...]
    frobenius_image: tuple[int, ...]
    mult_table: np.ndarray
    frobenius_matrix: np.ndarray

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def r(self) -> int:
        return self.params.r

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def T(self) -> int:
        return self.params.T

    @property
    def D(self) -> int:
        return self.params.D

    @property
    def modulus(self) -> int:
        return self.p ** self.prec

    @property
    def dtype(self):
        return dtype_for(self.modulus)

    def with_precision(self, prec: int) -> "RingContext":
        if prec == self.prec:
            return self
        return _build_context(self.params, prec)

    def with_truncation(self, T: int) -> "RingContext":
        if T == self.T:
            return self
        return replace(self, params=self.params.model_copy(update={"T": T}))

    def residue_context(self) -> "RingContext":
        """Context for the residue field F_{p^r} (precision 1)."""
        return self.with_precision(1)

    # coordinate-level arithmetic, broadcasting over leading axes

    def reduce(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(coords, dtype=self.dtype) % self.modulus

    def zero_coords(self) -> np.ndarray:
        return np.zeros(self.r, dtype=self.dtype)

    def one_coords(self) -> np.ndarray:
        one = self.zero_coords()
        one[0] = 1
        return one

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        outer = (np.asarray(a)[..., :, None] * np.asarray(b)[..., None, :]) % self.modulus
        return modular_tensordot(outer, self.mult_table, ([outer.ndim - 2, outer.ndim - 1], [0, 1]), self.modulus)

    def frobenius_coords(self, a: np.ndarray, power: int = 1) -> np.ndarray:
        result = np.asarray(a, dtype=self.dtype)
        for _ in range(power % self.r if self.r > 1 else 0):
            result = modular_tensordot(result, self.frobenius_matrix, ([result.ndim - 1], [1]), self.modulus)
        return result

    def power(self, a: np.ndarray, exponent: int) -> np.ndarray:
        result = self.one_coords()
        base = np.asarray(a, dtype=self.dtype) % self.modulus
        while exponent:
            if exponent & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            exponent >>= 1
        return result

    def is_unit(self, a: np.ndarray) -> bool:
        return bool(np.any(np.asarray(a) % self.p != 0))

    def inverse(self, a: np.ndarray) -> np.ndarray:
        """
        Inverse of a unit: a^(p^r - 2) inverts it mod p, Newton steps lift it.
        """
        if not self.is_unit(a):
            raise ArithmeticError("element is not a unit")
        a = np.asarray(a, dtype=self.dtype) % self.modulus
        inv = self.power(a, self.p ** self.r - 2)
        two = 2 * self.one_coords()
        for _ in range(self.prec.bit_length() + 1):
            inv = self.mul(inv, (two - self.mul(a, inv)) % self.modulus)
        return inv

    def valuation_coords(self, a: np.ndarray) -> float:
        """p-adic valuation of one element (inf for zero)."""
        values = [int(c) % self.modulus for c in np.asarray(a).reshape(-1)]
        best = math.inf
        for value in values:
            if value:
                v = 0
                while value % self.p == 0:
                    value //= self.p
                    v += 1
                best = min(best, v)
        return best

    def random_coords(self, rng: np.random.Generator, shape: tuple = ()) -> np.ndarray:
        digits = rng.integers(0, self.p, size=shape + (self.r, self.prec))
        weights = np.array([self.p ** k for k in range(self.prec)], dtype=object)
        return (digits.astype(object) * weights).sum(axis=-1).astype(self.dtype) % self.modulus

    def element(self, coeffs: Sequence[int] | int) -> "UnramifiedElement":
        if isinstance(coeffs, (int, np.integer)):
            coords = self.zero_coords()
            coords[0] = int(coeffs)
        else:
            coords = np.asarray([int(c) for c in coeffs], dtype=self.dtype)
            if coords.shape != (self.r,):
                raise InputError(f"expected {self.r} coordinates, got {len(coords)}")
        return UnramifiedElement(self, self.reduce(coords))

    def generator(self) -> "UnramifiedElement":
        """The class of x; zero when r = 1 since m(x) = x then."""
        coords = self.zero_coords()
        if self.r > 1:
            coords[1] = 1
        return UnramifiedElement(self, coords)

    def describe(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "N": self.N,
            "T": self.T,
            "D": self.D,
            "working_precision": self.prec,
            "modulus_polynomial": [int(c) for c in self.modulus_poly],
            "frobenius_of_generator": [int(c) for c in self.frobenius_image],
        }


class UnramifiedElement:
    """
    Element of W(F_{p^r}) truncated at the context precision.
    """
    __slots__ = ("ctx", "coords")

    def __init__(self, ctx: RingContext, coords: np.ndarray) -> None:
        self.ctx = ctx
        self.coords = ctx.reduce(coords)

    def __add__(self, other: "UnramifiedElement") -> "UnramifiedElement":
        return UnramifiedElement(self.ctx, self.coords + other.coords)

    def __sub__(self, other: "UnramifiedElement") -> "UnramifiedElement":
        return UnramifiedElement(self.ctx, self.coords - other.coords)

    def __neg__(self) -> "UnramifiedElement":
        return UnramifiedElement(self.ctx, -self.coords)

    def __mul__(self, other: "UnramifiedElement | int") -> "UnramifiedElement":
        if isinstance(other, (int, np.integer)):
            return UnramifiedElement(self.ctx, self.coords * (int(other) % self.ctx.modulus))
        return UnramifiedElement(self.ctx, self.ctx.mul(self.coords, other.coords))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnramifiedElement):
            return NotImplemented
        return bool(np.all(self.coords % self.ctx.modulus == other.coords % self.ctx.modulus))

    def __hash__(self) -> int:
        return hash(tuple(int(c) for c in self.coords))

    def __repr__(self) -> str:
        return f"UnramifiedElement({[int(c) for c in self.coords]})"

    def frobenius(self, power: int = 1) -> "UnramifiedElement":
        return UnramifiedElement(self.ctx, self.ctx.frobenius_coords(self.coords, power))

    def inverse(self) -> "UnramifiedElement":
        return UnramifiedElement(self.ctx, self.ctx.inverse(self.coords))

    def valuation(self) -> float:
        return self.ctx.valuation_coords(self.coords)

    def to_json(self) -> dict:
        return {"denom_exp": 0, "terms": [[int(c) for c in self.coords]]}


def frobenius(a: UnramifiedElement) -> UnramifiedElement:
    return a.frobenius()


def _refine_frobenius(params: RingParams, prec: int, modulus_poly: tuple[int, ...],
                      mult_table: np.ndarray, dtype) -> tuple[int, ...]:
    """
    Newton iteration z <- z - m(z)/m'(z) from the seed x^p until stable.
    """
    p, r = params.p, params.r
    q = p ** prec
    scratch = RingContext(params, prec, modulus_poly, tuple([0] * r), mult_table, np.eye(r, dtype=dtype))

    x = scratch.zero_coords()
    if r > 1:
        x[1] = 1
    z = scratch.power(x, p)
    derivative_poly = [k * modulus_poly[k] for k in range(1, r + 1)]

    def evaluate(poly: Sequence[int], point: np.ndarray) -> np.ndarray:
        acc = scratch.zero_coords()
        for coeff in reversed(poly):
            acc = scratch.mul(acc, point)
            acc[0] = (acc[0] + coeff) % q
        return acc

    for step in range(2 * prec.bit_length() + 8):
        value = evaluate(modulus_poly, z)
        if not np.any(value % q != 0):
            logger.debug("Frobenius root stable after %d refinement steps", step)
            return tuple(int(c) for c in z)
        slope = evaluate(derivative_poly, z)
        try:
            correction = scratch.mul(value, scratch.inverse(slope))
        except ArithmeticError as exc:
            raise RingConstructionError("m'(z) is not a unit: modulus is not separable") from exc
        z = (z - correction) % q
    raise RingConstructionError(f"Frobenius refinement did not stabilise mod {p}^{prec}")


@lru_cache(maxsize=64)
def _build_context(params: RingParams, prec: int) -> RingContext:
    p, r = params.p, params.r
    q = p ** prec
    modulus_poly = least_irreducible(p, r)
    dtype = dtype_for(q)

    mult_table = np.zeros((r, r, r), dtype=dtype)
    for a in range(r):
        for b in range(r):
            monomial = [0] * (a + b) + [1]
            mult_table[a, b, :] = _poly_mod(monomial, modulus_poly, q)

    image = _refine_frobenius(params, prec, modulus_poly, mult_table, dtype)

    scratch = RingContext(params, prec, modulus_poly, image, mult_table, np.eye(r, dtype=dtype))
    frob_matrix = np.zeros((r, r), dtype=dtype)
    column = scratch.one_coords()
    image_coords = np.asarray(image, dtype=dtype)
    for j in range(r):
        frob_matrix[:, j] = column
        column = scratch.mul(column, image_coords)
    return RingContext(params, prec, modulus_poly, image, mult_table, frob_matrix)


def make_ring(params: RingParams, prec: Optional[int] = None) -> RingContext:
    """
    Build the arithmetic context for the given parameters.

    Args:
        params: ring parameters (validated)
        prec: working exponent; defaults to N plus the headroom guard digits
    Returns:
        RingContext with the modulus, Frobenius table and multiplication tensor
    """
    if params.p < 3 or not isprime(params.p):
        raise InputError(f"p must be an odd prime, got {params.p}")
    if prec is None:
        prec = params.N + headroom(params)
    ctx = _build_context(params, prec)
    logger.debug("built ring p=%d r=%d prec=%d modulus=%s", params.p, params.r, prec, ctx.modulus_poly)
    return ctx
