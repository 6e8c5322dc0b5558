"""Closed-form results: the exponential-well tower and the weak-binding limit.

The exponential well -b e^{-x/q} on the half line x >= 0 admits an explicit
family of states whose energies depend only on (n, q, m); the well strength
b drops out of the spectrum entirely.  Each profile is a Kummer function of
an imaginary argument dressed with complex powers.  It oscillates at spatial
frequency sqrt(E^2 - m^2) far from the wall instead of decaying, so the
family sits above the mass gap and carries no intrinsic norm; profiles are
normalised over whatever grid they are evaluated on.

The Coulomb comparison pairs the matching solver against the weak-binding
estimate E = m + eps/m, with the cutoff shrinking like 1/m so that the well
keeps a fixed shape in units of the Compton length.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from . import matchsolver
from .errors import DomainError, InvalidParameter, NonConvergence
from .fvcore import ANTIPARTICLE, PARTICLE, WaveFunction, normalize
from .potentials import CoulombCutoff
from .specfun import kummer_m

GENERAL = "general"
WEAK = "weak"

_NR_DELTA_SCALE = 0.05    # cutoff delta = 0.05 / m in the limit sweep
_NR_WINDOW_FLOOR = 0.6    # scan window lower edge as a fraction of m
_NR_SCAN_POINTS = 4000


@dataclass(frozen=True)
class PowerExpState:
    """One member of the exponential-well tower."""

    n: int
    E: float
    kappa: float
    b: float
    q: float
    m: float

    def __post_init__(self):
        if self.n < 0:
            raise InvalidParameter("PowerExpState: n must be >= 0")
        if self.b <= 0 or self.q <= 0 or self.m <= 0:
            raise InvalidParameter("PowerExpState: b, q, m must be positive")
        if self.kappa < 0:
            raise InvalidParameter("PowerExpState: kappa must be >= 0")


@dataclass(frozen=True)
class NrLimitComparison:
    """Matching-solver eigenvalue next to its weak-binding estimate."""

    n: int
    alpha: float
    m: float
    E_relativistic: float
    E_nonrel: float
    gap: float


def powerexp_energy(n: int, q: float, m: float, branch: str = PARTICLE) -> float:
    """Energy of the n-th exponential-well state.

    The exact rational value (m^2 q^2 + (n + 1/2)^2) / (2 q (n + 1/2)),
    negated on the antiparticle branch.  Every level lies above the mass m,
    and for large n the spacing approaches the constant 1/(2q).
    """
    if n < 0:
        raise InvalidParameter("powerexp_energy: n must be >= 0")
    if q <= 0 or m <= 0:
        raise InvalidParameter("powerexp_energy: q and m must be positive")
    s = n + 0.5
    value = (m * m * q * q + s * s) / (2.0 * q * s)
    if branch == PARTICLE:
        return value
    if branch == ANTIPARTICLE:
        return -value
    raise InvalidParameter(f"powerexp_energy: unknown branch {branch!r}")


def powerexp_state(n: int, b: float, q: float, m: float,
                   branch: str = PARTICLE) -> PowerExpState:
    """Assemble the level-n state record, deriving E and kappa."""
    E = powerexp_energy(n, q, m, branch)
    kappa = math.sqrt(max(E * E - m * m, 0.0))
    return PowerExpState(n=n, E=E, kappa=kappa, b=b, q=q, m=m)


def powerexp_wavefunction(state: PowerExpState, grid: Sequence[float]) -> WaveFunction:
    """Evaluate the closed-form profile on a half-line grid.

    The profile is

        psi_s(x) = N e^{x/(2q)} z^{1/2 + i q kappa} e^{-z/2} M(a, c, z),
        z = 2 i b q e^{-x/q},  a = 1/2 + i q E + i q kappa,  c = 1 + 2 i q kappa,

    with every complex power on the principal branch.  Since z sits on the
    positive imaginary axis, the outer prefactor collapses exactly to
    exp(-i kappa x) times a constant, which is how it is evaluated here (the
    naive product of a growing exponential and a shrinking power would
    overflow long before the mathematical value does).  The overall phase is
    fixed by making the left grid edge value real and positive, and the
    result is L2-normalised over the grid.
    """
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise InvalidParameter("powerexp_wavefunction: need a 1-D grid with >= 3 points")
    if x[0] < 0.0:
        raise DomainError("powerexp_wavefunction: grid must lie in x >= 0")
    q, b = state.q, state.b
    power = 0.5 + 1j * q * state.kappa
    a = 0.5 + 1j * q * state.E + 1j * q * state.kappa
    c = 1.0 + 2j * q * state.kappa
    # principal branch of log z at x = 0; the x dependence of z^power is the
    # exact factor exp(-power * x / q), folded into the exponent below
    log_z0 = math.log(2.0 * b * q) + 1j * (math.pi / 2.0)
    vals = np.empty(x.size, dtype=complex)
    for i, xi in enumerate(x):
        z = 2j * b * q * math.exp(-xi / q)
        vals[i] = cmath.exp(-1j * state.kappa * xi + power * log_z0
                            - 0.5 * z) * kummer_m(a, c, z)
    edge = vals[0]
    if abs(edge) > 0.0:
        vals *= abs(edge) / edge
    wf = WaveFunction(grid=x, values=vals, energy=state.E, mass=state.m)
    return normalize(wf, None, mode="l2")


def nr_coulomb_binding(n: int, alpha: float, m: float, form: str = GENERAL) -> float:
    """Weak-binding energy shift eps_n of the cutoff Coulomb well.

    Returns the (negative) shift in the parameterisation E = m + eps/m.
    The "general" form keeps the alpha-dependent effective quantum number
    n + 1/2 + sqrt(1 - 4 alpha^2)/2; the "weak" form is the hydrogen-like
    1/(n+1)^2 rule the two agree with as alpha -> 0.
    """
    if n < 0:
        raise InvalidParameter("nr_coulomb_binding: n must be >= 0")
    if m <= 0:
        raise InvalidParameter("nr_coulomb_binding: m must be positive")
    if abs(alpha) > 0.5:
        raise InvalidParameter("nr_coulomb_binding: need |alpha| <= 1/2")
    if form == GENERAL:
        effective = n + 0.5 + 0.5 * math.sqrt(1.0 - 4.0 * alpha * alpha)
    elif form == WEAK:
        effective = float(n + 1)
    else:
        raise InvalidParameter(f"nr_coulomb_binding: unknown form {form!r}")
    return -alpha * alpha * m / (2.0 * effective * effective)


def nonrel_energy(n: int, alpha: float, m: float, form: str = WEAK) -> float:
    """E = m + eps_n / m, the weak-binding estimate of the level energy."""
    return m + nr_coulomb_binding(n, alpha, m, form) / m


def nr_limit_compare(n: int, alpha: float, m_list: Iterable[float],
                     form: str = WEAK) -> List[NrLimitComparison]:
    """Compare odd cutoff-Coulomb levels against the weak-binding estimate.

    For each mass the cutoff is delta = 0.05/m and the n-th odd-parity level
    is taken from the matching solver; the estimate defaults to the
    hydrogen-like "weak" form, which is the curve the level sweep is usually
    plotted against.  Raises NonConvergence if the requested level is not
    resolved in the scan window.
    """
    if n < 0:
        raise InvalidParameter("nr_limit_compare: n must be >= 0")
    out = []
    for m in m_list:
        m = float(m)
        if m <= 0:
            raise InvalidParameter("nr_limit_compare: each m must be positive")
        pot = CoulombCutoff(alpha=alpha, delta=_NR_DELTA_SCALE / m)
        problem = matchsolver.MatchingProblem(
            pot=pot, m=m, parity=matchsolver.ODD,
            window=(_NR_WINDOW_FLOOR * m, m * (1.0 - 1e-9)),
            scan_points=_NR_SCAN_POINTS)
        report = matchsolver.solve(problem)
        if len(report.roots) <= n:
            raise NonConvergence(
                f"nr_limit_compare: only {len(report.roots)} odd levels "
                f"resolved at m={m}, need index {n}")
        e_rel = report.roots[n].energy
        e_nr = nonrel_energy(n, alpha, m, form)
        out.append(NrLimitComparison(n=n, alpha=alpha, m=m,
                                     E_relativistic=e_rel, E_nonrel=e_nr,
                                     gap=abs(e_rel - e_nr)))
    return out
