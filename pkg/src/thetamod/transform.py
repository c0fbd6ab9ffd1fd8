"""The transformation law as an algorithm.

For a matrix A = (a, b; c, d) with c > 0 the law reads

    theta1(z/(c tau + d), A tau)
        = eps1(A) * (-i(c tau + d))^{1/2} * exp(pi i c z^2/(c tau + d))
          * theta1(z, tau)

with eps1 the unit multiplier from the dedekind module and the square root on
the principal branch.  This module evaluates the right side directly, reduces
(z, tau) into the fast-convergence region (fundamental domain for tau, then
|Im z| <= Im tau / 2 via quasi-periodicity), exposes the fast evaluator built
on that reduction, and measures transformation residuals for verification
sweeps.

Quasi-periodicity used by the z-reduction (derivable by reindexing the
series):

    theta1(z + m + n tau, tau)
        = (-1)^{m+n} exp(-i pi n^2 tau - 2 i pi n z) theta1(z, tau).

The c = 0 leg of the reducer uses theta1(z, tau + 1) = e^{i pi/4}
theta1(z, tau), another series identity, because the law above assumes c > 0
and translations are exact.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from statistics import median

from .dedekind import eta_multiplier, theta_multiplier
from .errors import ValidationError
from .modular import (
    ModularMatrix,
    moebius_apply,
    principal_power,
    reduce_to_fundamental_domain,
    require_upper_half,
)
from .theta import (
    DEFAULT_CONTROL,
    TruncationControl,
    eta,
    lattice_distance,
    theta1_series,
    theta1_series_info,
)

__all__ = [
    "TINY",
    "transform_rhs",
    "reduce_z",
    "ReductionTrace",
    "reduce_theta_arguments",
    "theta1_fast",
    "theta1_fast_info",
    "FastEval",
    "verify_transformation",
    "verify_eta_transformation",
    "random_modular_matrix",
    "random_tau",
    "random_z",
    "SweepCase",
    "SweepResult",
    "transform_sweep",
]

# absolute floor for relative residuals, so exact zeros do not divide by zero
TINY = 1e-300

_TWO_PI = 2.0 * math.pi


def transform_rhs(
    mat: ModularMatrix, z: complex, tau: complex, ctl: TruncationControl = DEFAULT_CONTROL
) -> complex:
    """Right side of the law: eps1 * (-i(c tau+d))^{1/2} e^{pi i c z^2/(c tau+d)} theta1(z, tau)."""
    if mat.c <= 0:
        raise ValidationError(f"transformation law requires c > 0, got c={mat.c}")
    t = require_upper_half(tau)
    zz = complex(z)
    den = mat.c * t + mat.d
    return (
        theta_multiplier(mat).value
        * principal_power(-1j * den, 0.5)
        * cmath.exp(1j * math.pi * mat.c * zz * zz / den)
        * theta1_series(zz, t, ctl)
    )


def reduce_z(z: complex, tau: complex) -> tuple[complex, int, int, complex]:
    """Shift z by the lattice into |Re| <= 1/2, |Im| <= Im(tau)/2.

    Returns (z_red, m, n, prefactor) with z = z_red + m + n tau and
    theta1(z, tau) = prefactor * theta1(z_red, tau), where
    prefactor = (-1)^{m+n} exp(-i pi n^2 tau - 2 i pi n z_red).  For very
    large n the prefactor is genuinely of size exp(pi n^2 Im tau) and may
    overflow, as the function value itself does.
    """
    t = require_upper_half(tau)
    zz = complex(z)
    n = round(zz.imag / t.imag)
    partial = zz - n * t
    m = round(partial.real)
    z_red = partial - m
    sign = 1.0 if (m + n) % 2 == 0 else -1.0
    prefactor = sign * cmath.exp(-1j * math.pi * n * n * t - 2j * math.pi * n * z_red)
    return z_red, int(m), int(n), prefactor


@dataclass(frozen=True)
class ReductionTrace:
    """Record of one full (z, tau) reduction.

    Semantics: theta1(z_reduced, tau_reduced) = prefactor * theta1(z, tau),
    so replaying the trace recovers the original value as
    (series at the reduced point) / prefactor.  lattice_shift holds the
    (m, n) quasi-periodicity shift applied to z after the tau reduction;
    prefactor_log_phase is the principal argument of the prefactor.
    """

    matrix: ModularMatrix
    tau_reduced: complex
    z_reduced: complex
    lattice_shift: tuple[int, int]
    prefactor: complex
    prefactor_log_phase: float


def reduce_theta_arguments(z: complex, tau: complex) -> ReductionTrace:
    """Reduce tau to the fundamental domain and z by quasi-periodicity.

    Applies the transformation law in the inverse direction for the c != 0
    reduction matrix (negated if needed so c > 0), or exact tau-translations
    for the c = 0 leg.
    """
    t = require_upper_half(tau)
    zz = complex(z)
    mat, tau_red = reduce_to_fundamental_domain(t)
    if mat.c == 0:
        if mat.a < 0:
            mat = -mat
        # pure translation: theta1(z, tau + b) = e^{i pi b / 4} theta1(z, tau)
        zeta = zz
        law_factor = cmath.exp(1j * math.pi * mat.b / 4)
    else:
        if mat.c < 0:
            mat = -mat
        den = mat.c * t + mat.d
        zeta = zz / den
        law_factor = (
            theta_multiplier(mat).value
            * principal_power(-1j * den, 0.5)
            * cmath.exp(1j * math.pi * mat.c * zz * zz / den)
        )
    z_red, m_shift, n_shift, z_prefactor = reduce_z(zeta, tau_red)
    # theta1(zeta, tau_red) = law_factor * theta1(z, tau)
    #                      = z_prefactor * theta1(z_red, tau_red)
    prefactor = law_factor / z_prefactor
    return ReductionTrace(
        matrix=mat,
        tau_reduced=tau_red,
        z_reduced=z_red,
        lattice_shift=(m_shift, n_shift),
        prefactor=prefactor,
        prefactor_log_phase=cmath.phase(prefactor),
    )


@dataclass(frozen=True)
class FastEval:
    """theta1_fast result with its trace and reduced-series bookkeeping."""

    value: complex
    trace: ReductionTrace
    terms: int
    error_bound: float


def _prefactor_condition(mat: ModularMatrix, z: complex, tau: complex, trace: ReductionTrace) -> float:
    """Relative roundoff scale of the reduction prefactor.

    The prefactor is a product of exponentials; an exponent E computed with
    relative error kappa*eps perturbs the value by ~|E|*kappa*eps.  The
    dominant exponents are pi c z^2/(c tau + d), whose denominator can
    cancel (conditioning kappa_den), and the quasi-periodicity exponent
    pi n^2 tau + 2 pi n z_red.
    """
    m_shift, n_shift = trace.lattice_shift
    quasi = math.pi * n_shift * n_shift * abs(tau) + _TWO_PI * abs(n_shift) * abs(
        trace.z_reduced
    )
    if mat.c == 0:
        gauss = 0.25 * math.pi * abs(mat.b)
        kappa_den = 1.0
    else:
        den = mat.c * complex(tau) + mat.d
        gauss = math.pi * mat.c * abs(z) ** 2 / abs(den)
        kappa_den = (abs(mat.c * complex(tau)) + abs(mat.d)) / abs(den)
    return 32.0 + 8.0 * (gauss * kappa_den + quasi + abs(m_shift))


def theta1_fast_info(
    z: complex, tau: complex, ctl: TruncationControl = DEFAULT_CONTROL
) -> FastEval:
    """theta1 via argument reduction, reporting the reduced-point term count.

    The error bound combines the reduced-series bound with a roundoff
    allowance for the prefactor's exponentials.
    """
    trace = reduce_theta_arguments(z, tau)
    info = theta1_series_info(trace.z_reduced, trace.tau_reduced, ctl)
    value = info.value / trace.prefactor
    scale = abs(trace.prefactor)
    if scale > 0 and math.isfinite(scale):
        condition = _prefactor_condition(trace.matrix, complex(z), complex(tau), trace)
        err = info.error_bound / scale + condition * 2.0**-52 * abs(value)
    else:
        err = math.inf
    return FastEval(value, trace, info.terms, err)


def theta1_fast(z: complex, tau: complex, ctl: TruncationControl = DEFAULT_CONTROL) -> complex:
    """theta1(z, tau) evaluated after argument reduction.

    Matches theta1_series wherever the latter converges, and keeps working
    arbitrarily close to the real tau axis, where the direct series needs
    unboundedly many terms.
    """
    return theta1_fast_info(z, tau, ctl).value


def verify_transformation(
    mat: ModularMatrix, z: complex, tau: complex, ctl: TruncationControl = DEFAULT_CONTROL
) -> float:
    """Relative residual of the law at (A, z, tau).

    The left side theta1(z/(c tau+d), A tau) is evaluated by the direct
    series (after a plain quasi-periodicity shift of its argument, which is a
    series identity independent of the law being tested); the right side by
    transform_rhs.  Returns |lhs - rhs| / max(|lhs|, TINY).
    """
    if mat.c <= 0:
        raise ValidationError(f"transformation law requires c > 0, got c={mat.c}")
    t = require_upper_half(tau)
    zz = complex(z)
    den = mat.c * t + mat.d
    tau_image = moebius_apply(mat, t)
    z_image = zz / den
    z_red, _, _, pref = reduce_z(z_image, tau_image)
    lhs = pref * theta1_series(z_red, tau_image, ctl)
    rhs = transform_rhs(mat, zz, t, ctl)
    return abs(lhs - rhs) / max(abs(lhs), TINY)


def verify_eta_transformation(
    mat: ModularMatrix, tau: complex, ctl: TruncationControl = DEFAULT_CONTROL
) -> float:
    """Relative residual of eta(A tau) = eps(A) (-i(c tau+d))^{1/2} eta(tau)."""
    if mat.c <= 0:
        raise ValidationError(f"eta transformation requires c > 0, got c={mat.c}")
    t = require_upper_half(tau)
    den = mat.c * t + mat.d
    lhs = eta(moebius_apply(mat, t), ctl)
    rhs = eta_multiplier(mat).value * principal_power(-1j * den, 0.5) * eta(t, ctl)
    return abs(lhs - rhs) / max(abs(lhs), TINY)


def random_modular_matrix(
    rng: random.Random, c_max: int = 20, entry_bound: int = 50
) -> ModularMatrix:
    """Uniform-ish determinant-one matrix with 1 <= c <= c_max, |a|,|b|,|d| <= entry_bound."""
    while True:
        c = rng.randint(1, c_max)
        d = rng.randint(-entry_bound, entry_bound)
        if math.gcd(c, d) != 1:
            continue
        a0 = pow(d % c, -1, c) if c > 1 else 0
        lo = math.ceil((-entry_bound - a0) / c)
        hi = math.floor((entry_bound - a0) / c)
        if lo > hi:
            continue
        a = a0 + c * rng.randint(lo, hi)
        b = (a * d - 1) // c
        if abs(b) > entry_bound:
            continue
        return ModularMatrix(a, b, c, d)


def random_tau(rng: random.Random, im_range: tuple[float, float] = (0.3, 3.0)) -> complex:
    """tau with |Re| <= 1 and Im in the given range."""
    return complex(rng.uniform(-1.0, 1.0), rng.uniform(*im_range))


def random_z(rng: random.Random, tau: complex, min_lattice_distance: float = 0.05) -> complex:
    """z in the unit disc, at least min_lattice_distance from the zero lattice."""
    while True:
        zz = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        if abs(zz) <= 1.0 and lattice_distance(zz, tau) >= min_lattice_distance:
            return zz


@dataclass(frozen=True)
class SweepCase:
    matrix: ModularMatrix
    z: complex
    tau: complex
    residual: float


@dataclass(frozen=True)
class SweepResult:
    kind: str
    seed: int
    cases: tuple[SweepCase, ...]

    @property
    def max_residual(self) -> float:
        return max(case.residual for case in self.cases)

    @property
    def median_residual(self) -> float:
        return float(median(case.residual for case in self.cases))


def transform_sweep(
    count: int,
    seed: int,
    kind: str = "theta",
    ctl: TruncationControl = DEFAULT_CONTROL,
) -> SweepResult:
    """Seeded random sweep of transformation residuals.

    kind "theta" measures the theta1 law (z drawn off the lattice), kind
    "eta" the eta law (z recorded as 0).  Deterministic for a fixed seed.
    """
    if kind not in ("theta", "eta"):
        raise ValidationError(f"unknown sweep kind {kind!r}")
    if count < 1:
        raise ValidationError(f"count must be positive, got {count}")
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        mat = random_modular_matrix(rng)
        tau = random_tau(rng)
        if kind == "theta":
            zz = random_z(rng, tau)
            residual = verify_transformation(mat, zz, tau, ctl)
        else:
            zz = 0j
            residual = verify_eta_transformation(mat, tau, ctl)
        cases.append(SweepCase(mat, zz, tau, residual))
    return SweepResult(kind=kind, seed=seed, cases=tuple(cases))
