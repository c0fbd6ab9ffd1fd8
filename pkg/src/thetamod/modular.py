"""Integer modular-group arithmetic and its action on the upper half plane.

Covers the 2x2 integer matrices of determinant one, the Moebius action
tau -> (a tau + b)/(c tau + d), the principal branch of complex powers,
Gauss reduction of tau into the fundamental domain |Re tau| <= 1/2,
|tau| >= 1, and the change of variables (H, h, k, v) with v = -i(c tau + d)
used throughout the transformation-law machinery.

Matrix entries are Python integers, so all group arithmetic is exact at any
size; a broken determinant is detected at construction rather than silently
corrupting downstream multiplier computations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, NonConvergenceError, ValidationError

__all__ = [
    "ModularMatrix",
    "IDENTITY",
    "S_INVERSION",
    "T_SHIFT",
    "require_upper_half",
    "moebius_apply",
    "principal_power",
    "reduce_to_fundamental_domain",
    "TransformParams",
    "transform_params_from_matrix",
    "neg_mod_inverse",
]


def require_upper_half(tau: complex) -> complex:
    """Return tau as a complex number, insisting on Im tau > 0."""
    t = complex(tau)
    if not (math.isfinite(t.real) and math.isfinite(t.imag)):
        raise DomainError(f"tau must be finite, got {t}")
    if not t.imag > 0:
        raise DomainError(f"tau must lie in the upper half plane, got {t}")
    return t


@dataclass(frozen=True)
class ModularMatrix:
    """Integer matrix (a, b; c, d) with a*d - b*c = 1 exactly."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValidationError(f"matrix entry {name}={value!r} is not an integer")
        det = self.a * self.d - self.b * self.c
        if det != 1:
            raise ValidationError(f"determinant must be 1, got {det}")

    def __matmul__(self, other: "ModularMatrix") -> "ModularMatrix":
        return ModularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "ModularMatrix":
        return ModularMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "ModularMatrix":
        return ModularMatrix(self.d, -self.b, -self.c, self.a)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


IDENTITY = ModularMatrix(1, 0, 0, 1)
S_INVERSION = ModularMatrix(0, -1, 1, 0)
T_SHIFT = ModularMatrix(1, 1, 0, 1)


def moebius_apply(mat: ModularMatrix, tau: complex) -> complex:
    """Apply (a tau + b)/(c tau + d); determinant one keeps Im > 0."""
    t = require_upper_half(tau)
    return (mat.a * t + mat.b) / (mat.c * t + mat.d)


def principal_power(base: complex, exponent: complex) -> complex:
    """base**exponent with the argument taken in (-pi, pi].

    Negative real bases get argument +pi, including values that arrive with a
    negative-zero imaginary part from upstream arithmetic.
    """
    b = complex(base)
    if b == 0:
        raise DomainError("0 cannot be raised to a complex power on the principal branch")
    if b.imag == 0.0:
        b = complex(b.real, 0.0)  # clears -0.0 so Arg lands on +pi, not -pi
    return cmath.exp(complex(exponent) * cmath.log(b))


def reduce_to_fundamental_domain(
    tau: complex, max_steps: int = 1000
) -> tuple[ModularMatrix, complex]:
    """Gauss-reduce tau into |Re| <= 1/2, |tau| >= 1.

    Returns (A, tau') with tau' = A tau.  Boundary points are accepted as-is
    (no canonical side is forced); Im tau' >= Im tau always.  Inputs that fail
    to settle within max_steps (pathologically close to the real line at
    precision limits) raise NonConvergenceError.
    """
    t = require_upper_half(tau)
    mat = IDENTITY
    for _ in range(max_steps):
        shift = round(t.real)
        if shift:
            mat = ModularMatrix(1, -shift, 0, 1) @ mat
            t = complex(t.real - shift, t.imag)
        if abs(t) < 1.0 - 1e-15:
            mat = S_INVERSION @ mat
            t = -1 / t
        else:
            return mat, moebius_apply(mat, tau)
    raise NonConvergenceError(
        f"fundamental-domain reduction did not settle within {max_steps} steps for tau={tau}"
    )


@dataclass(frozen=True)
class TransformParams:
    """Change-of-variables parameters H, h, k and v = -i(c tau + d).

    Derived from a matrix with c > 0 via H = a, k = c, h = -d; then k > 0,
    gcd(h, k) = 1 and H*h = -1 (mod k) hold, and tau = (h + iv)/k recovers
    the original point.
    """

    H: int
    h: int
    k: int
    v: complex

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k <= 0:
            raise ValidationError(f"k must be a positive integer, got {self.k!r}")
        if math.gcd(self.h, self.k) != 1:
            raise ValidationError(f"h={self.h} and k={self.k} must be coprime")
        if (self.H * self.h + 1) % self.k != 0:
            raise ValidationError(
                f"H*h = {self.H * self.h} is not -1 modulo k={self.k}"
            )


def transform_params_from_matrix(mat: ModularMatrix, tau: complex) -> TransformParams:
    """Read off (H, h, k, v) from a matrix with c > 0 at the point tau.

    The congruence H*h = -1 (mod k) and gcd(h, k) = 1 follow from the unit
    determinant; they are asserted by the TransformParams constructor.
    """
    if mat.c <= 0:
        raise ValidationError(
            "c must be positive; negate the matrix first (-A acts identically on tau)"
        )
    t = require_upper_half(tau)
    v = -1j * (mat.c * t + mat.d)
    return TransformParams(H=mat.a, h=-mat.d, k=mat.c, v=v)


def neg_mod_inverse(h: int, k: int) -> int:
    """The unique H in [0, k) with H*h = -1 (mod k); 0 when k = 1."""
    if not isinstance(k, int) or isinstance(k, bool) or k <= 0:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    if k == 1:
        return 0
    if math.gcd(h, k) != 1:
        raise DomainError(f"h={h} has no inverse modulo k={k} (gcd != 1)")
    return (-pow(h, -1, k)) % k
