"""Shared extended-precision oracles for the test suite.

Every oracle here is a direct summation or product evaluated with mpmath at
elevated working precision, independent of the code paths under test.
"""

from __future__ import annotations

import mpmath as mp


def mp_theta1_direct(z: complex, tau: complex, terms: int = 200, dps: int = 50) -> complex:
    """Two-sided direct summation of the theta series at extended precision."""
    with mp.workdps(dps):
        zz = mp.mpc(z)
        tt = mp.mpc(tau)
        total = mp.mpc(0)
        for n in range(-terms, terms):
            half = n + mp.mpf(1) / 2
            total += (-1) ** n * mp.exp(
                1j * mp.pi * tt * half * half + (2 * n + 1) * 1j * mp.pi * zz
            )
        return complex(-1j * total)


def mp_theta1_jtheta(z: complex, tau: complex, dps: int = 40) -> complex:
    """mpmath's own theta implementation, as a second independent route."""
    with mp.workdps(dps):
        q = mp.exp(1j * mp.pi * mp.mpc(tau))
        return complex(mp.jtheta(1, mp.pi * mp.mpc(z), q))


def mp_eta_direct(tau: complex, terms: int = 200, dps: int = 50) -> complex:
    """Direct product for the eta function at extended precision."""
    with mp.workdps(dps):
        tt = mp.mpc(tau)
        prod = mp.mpc(1)
        for n in range(1, terms + 1):
            prod *= 1 - mp.exp(2j * mp.pi * n * tt)
        return complex(mp.exp(1j * mp.pi * tt / 12) * prod)
