"""Eigenvalues of the cutoff-regularised Coulomb and Cornell families.

Inside |x| < delta the potential is flat, so the scalar profile is a plain
trigonometric (or hyperbolic) wave and its logarithmic derivative at the
cutoff is elementary.  Outside, the decaying solution is a Whittaker function
(Coulomb) or a Gaussian-damped Tricomi function (Cornell).  Bound states are
the energies where the two logarithmic derivatives meet at |x| = delta.

The residual L_out(E) - L_in(E) is scanned over an energy grid; sign-change
brackets are kept only when both endpoints pass a pole test on the exterior
Tricomi factor (its zeros produce fake sign changes through a pole of L_out),
then refined by Brent's method and re-verified.  This mirrors the protocol
that produced the reference spectra this package is tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import potentials, specfun
from .errors import (AnchorSingularity, Fv1dError, InteriorPole,
                     InvalidParameter, PoleAtZero)
from .fvcore import PARTICLE, EigenSolution, WaveFunction, count_nodes, normalize
from .potentials import Cornell, CoulombCutoff, PotentialSpec

EVEN = "even"
ODD = "odd"

_POLE_EPS = 1e-3        # exterior-solution magnitude floor at bracket endpoints
_ACCEPT_RESIDUAL = 0.1  # refined root kept only if |L_out - L_in| is below this
_WINDOW_CAP = 1e-6      # window is capped at m (1 - cap); excludes core states
_CORE_AMPLITUDE = 1e6   # interior/exterior amplitude ratio rejection threshold


@dataclass
class MatchingProblem:
    pot: PotentialSpec
    m: float
    parity: str
    window: tuple
    scan_points: int = 2000

    def __post_init__(self):
        if not isinstance(self.pot, (CoulombCutoff, Cornell)):
            raise InvalidParameter("matching solver handles the cutoff families only")
        if self.parity not in (EVEN, ODD):
            raise InvalidParameter(f"parity must be even or odd, got {self.parity!r}")
        if not self.m > 0:
            raise InvalidParameter("mass must be positive")
        lo, hi = self.window
        if not (0.0 < lo < hi < self.m):
            raise InvalidParameter(
                f"window {self.window} must satisfy 0 < lo < hi < m={self.m}")
        if self.scan_points < 16:
            raise InvalidParameter("scan_points too small to bracket anything")


@dataclass
class ScanReport:
    brackets: list = field(default_factory=list)        # (E_a, E_b) kept
    rejected_poles: list = field(default_factory=list)  # (E_a, E_b, reason)
    roots: list = field(default_factory=list)           # EigenSolution, ascending E
    energies: np.ndarray | None = None                  # scan grid (diagnostics)
    residuals: np.ndarray | None = None                 # residual samples
    pole_flags: np.ndarray | None = None                # exterior-magnitude failures


# ---------------------------------------------------------------------------
# interior side
# ---------------------------------------------------------------------------

def interior_momentum(pot: PotentialSpec, E: float, m: float):
    """Wavenumber of the flat-core solution: (value, imaginary_flag).

    The core coefficient (E - eV(0))^2 - m^2 may have either sign; a positive
    value gives an oscillating interior with real p, a negative one gives the
    hyperbolic interior with decay constant q = sqrt(-p^2).
    """
    core = float(potentials.eval(pot, 0.0))
    p2 = (E - core) ** 2 - m * m
    if p2 >= 0.0:
        return math.sqrt(p2), False
    return math.sqrt(-p2), True


def interior_logderiv(pot: PotentialSpec, E: float, m: float, parity: str) -> float:
    """d/dx ln psi_in at x = delta^- for the requested parity."""
    delta = pot.delta
    core = float(potentials.eval(pot, 0.0))
    p2 = (E - core) ** 2 - m * m
    t2 = p2 * delta * delta
    if abs(t2) < 1e-12:  # |p| delta < 1e-6: series limits through p^2 = 0
        if parity == EVEN:
            return -p2 * delta
        return 1.0 / delta - p2 * delta / 3.0
    if p2 > 0.0:
        p = math.sqrt(p2)
        t = p * delta
        r = math.remainder(t, math.pi)
        if parity == EVEN:
            if math.pi / 2.0 - abs(r) < 1e-10:
                raise InteriorPole(f"tan pole at p*delta = {t}")
            return -p * math.tan(t)
        if abs(r) < 1e-10:
            raise InteriorPole(f"cot pole at p*delta = {t}")
        return p / math.tan(t)
    q = math.sqrt(-p2)
    t = q * delta
    # analytic continuation p -> iq of the formulas above
    if parity == EVEN:
        return q * math.tanh(t)
    return q / math.tanh(t)


def _interior_branch_index(pot, E, m, parity) -> int:
    """Integer that changes exactly when p*delta crosses a tan/cot pole."""
    core = float(potentials.eval(pot, 0.0))
    p2 = (E - core) ** 2 - m * m
    if p2 <= 0.0:
        return 0
    t = math.sqrt(p2) * pot.delta
    if parity == EVEN:
        return int(math.floor(t / math.pi + 0.5))
    return int(math.floor(t / math.pi))


# ---------------------------------------------------------------------------
# exterior side
# ---------------------------------------------------------------------------

def _coulomb_params(pot: CoulombCutoff, E: float, m: float):
    k = math.sqrt(m * m - E * E)
    lam = E * pot.alpha / k
    mu = 0.5 * math.sqrt(1.0 - 4.0 * pot.alpha ** 2)
    return k, lam, mu


def _cornell_params(pot: Cornell, E: float, m: float):
    mu_t = 0.5 * math.sqrt(1.0 - 4.0 * pot.alpha ** 2)
    mu = 0.5 + mu_t
    a_k = (mu + 1.0) / 2.0 + (m * m - E * E) / (4.0 * pot.beta) \
        - E * pot.alpha / math.sqrt(2.0 * pot.beta)
    b_k = mu_t + 0.5
    return mu_t, a_k, b_k


def _exterior_magnitude(pot: PotentialSpec, E: float, m: float) -> float:
    """Tricomi factor of the exterior solution at the matching point.

    Its zeros are poles of the exterior log-derivative; bracket endpoints
    must stay clear of them.  The smooth positive prefactors are dropped so
    that an absolute threshold is meaningful.
    """
    if isinstance(pot, Cornell):
        _, a_k, b_k = _cornell_params(pot, E, m)
        return specfun.tricomi_u(a_k, b_k, pot.beta * pot.delta ** 2)
    k, lam, mu = _coulomb_params(pot, E, m)
    return specfun.tricomi_u(mu - lam + 0.5, 1.0 + 2.0 * mu, 2.0 * k * pot.delta)


def exterior_logderiv(pot: PotentialSpec, E: float, m: float) -> float:
    """d/dx ln psi_out at x = delta^+ (decaying exterior branch)."""
    if not (0.0 < abs(E) < m):
        raise InvalidParameter("exterior solution defined inside the mass gap only")
    if isinstance(pot, Cornell):
        mu_t, a_k, b_k = _cornell_params(pot, E, m)
        delta = pot.delta
        z = pot.beta * delta * delta
        u_ld = specfun.tricomi_u_logderiv(a_k, b_k, z)
        return (mu_t + 0.5) / delta - pot.beta * delta + 2.0 * pot.beta * delta * u_ld
    k, lam, mu = _coulomb_params(pot, E, m)
    return specfun.whittaker_w_logderiv(lam, mu, k, pot.delta)


def matching_residual(problem: MatchingProblem, E: float) -> float:
    """Exterior minus interior log-derivative; eigenvalues are its zeros."""
    return exterior_logderiv(problem.pot, E, problem.m) \
        - interior_logderiv(problem.pot, E, problem.m, problem.parity)


# ---------------------------------------------------------------------------
# scanning and refinement
# ---------------------------------------------------------------------------

def _scan(problem: MatchingProblem, energies: np.ndarray):
    res = np.full(energies.shape, np.nan)
    umag = np.full(energies.shape, np.nan)
    bidx = np.zeros(energies.shape, dtype=int)
    for i, e in enumerate(energies):
        try:
            res[i] = matching_residual(problem, float(e))
            umag[i] = _exterior_magnitude(problem.pot, float(e), problem.m)
            bidx[i] = _interior_branch_index(problem.pot, float(e), problem.m,
                                             problem.parity)
        except (InteriorPole, PoleAtZero, OverflowError):
            continue
    return res, umag, bidx


def _collect_brackets(energies, res, umag, bidx):
    kept, rejected = [], []
    for i in range(len(energies) - 1):
        ra, rb = res[i], res[i + 1]
        if not (np.isfinite(ra) and np.isfinite(rb)):
            continue
        if ra == 0.0:        # exact grid hit; treat as a degenerate bracket
            kept.append((float(energies[i]), float(energies[i + 1])))
            continue
        if ra * rb >= 0.0:
            continue
        ea, eb = float(energies[i]), float(energies[i + 1])
        ua, ub = umag[i], umag[i + 1]
        if not (abs(ua) > _POLE_EPS and abs(ub) > _POLE_EPS):
            rejected.append((ea, eb, "exterior_magnitude"))
            continue
        if ua * ub < 0.0:
            rejected.append((ea, eb, "exterior_zero_crossing"))
            continue
        if bidx[i] != bidx[i + 1]:
            rejected.append((ea, eb, "interior_pole"))
            continue
        kept.append((ea, eb))
    return kept, rejected


def solve(problem: MatchingProblem) -> ScanReport:
    """Locate all matching eigenvalues inside the problem window.

    An empty ``roots`` list is a valid outcome (e.g. below the coupling
    threshold at which the first level enters the gap).
    """
    lo, hi = problem.window
    hi = min(hi, problem.m * (1.0 - _WINDOW_CAP))
    if hi <= lo:
        return ScanReport()
    report = ScanReport()
    energies = np.linspace(lo, hi, problem.scan_points)
    res, umag, bidx = _scan(problem, energies)
    report.energies, report.residuals = energies, res
    report.pole_flags = ~(np.abs(umag) > _POLE_EPS)
    kept, rejected = _collect_brackets(energies, res, umag, bidx)

    # Verification pass at doubled density: the root set must be stable
    # against halving the scan step, so any bracket found only by the finer
    # grid is added to the work list.
    fine = np.linspace(lo, hi, 2 * problem.scan_points)
    fres, fumag, fbidx = _scan(problem, fine)
    fkept, frej = _collect_brackets(fine, fres, fumag, fbidx)
    for br in fkept:
        if not any(a <= br[0] <= b or a <= br[1] <= b for a, b in kept):
            kept.append(br)
    kept.sort()
    report.brackets = kept
    report.rejected_poles = rejected + [r for r in frej
                                        if not any(abs(r[0] - q[0]) < 1e-12
                                                   for q in rejected)]

    roots: list[EigenSolution] = []
    for ea, eb in kept:
        try:
            e_root = brentq(lambda e: matching_residual(problem, e), ea, eb,
                            xtol=1e-12, rtol=8.9e-16, maxiter=200)
        except (Fv1dError, ValueError, OverflowError):
            report.rejected_poles.append((ea, eb, "refinement_failed"))
            continue
        r_final = matching_residual(problem, e_root)
        if not abs(r_final) < _ACCEPT_RESIDUAL:
            report.rejected_poles.append((ea, eb, "residual_check"))
            continue
        if any(abs(e_root - s.energy) < 1e-9 * problem.m for s in roots):
            continue
        try:
            wf = build_wavefunction(problem, _bare_solution(e_root, problem), 2401)
        except AnchorSingularity:
            report.rejected_poles.append((ea, eb, "anchor_singularity"))
            continue
        if _core_amplitude_ratio(wf, problem.pot) > _CORE_AMPLITUDE:
            report.rejected_poles.append((ea, eb, "core_state"))
            continue
        roots.append(EigenSolution(
            energy=e_root, branch=PARTICLE, parity=problem.parity,
            nodes=count_nodes(wf), solver="matching", residual=abs(r_final)))
    roots.sort(key=lambda s: s.energy)
    report.roots = roots
    return report


def _bare_solution(energy: float, problem: MatchingProblem) -> EigenSolution:
    return EigenSolution(energy=energy, branch=PARTICLE, parity=problem.parity,
                         nodes=-1, solver="matching", residual=math.nan)


def _core_amplitude_ratio(wf: WaveFunction, pot) -> float:
    inside = np.abs(wf.grid) < pot.delta
    if not inside.any() or inside.all():
        return 0.0
    out_max = np.abs(wf.values[~inside]).max()
    in_max = np.abs(wf.values[inside]).max()
    return math.inf if out_max == 0 else in_max / out_max


# ---------------------------------------------------------------------------
# wavefunction assembly
# ---------------------------------------------------------------------------

def _exterior_value(pot: PotentialSpec, E: float, m: float, r: float) -> float:
    """Decaying exterior profile at r = |x| >= delta (unnormalised)."""
    if isinstance(pot, Cornell):
        mu_t, a_k, b_k = _cornell_params(pot, E, m)
        z = pot.beta * r * r
        # switch to the asymptotic branch early: at z = 25 its truncation
        # error is far below the connection formula's cancellation loss
        u = specfun.tricomi_u(a_k, b_k, z, switchover=25.0)
        return r ** (mu_t + 0.5) * math.exp(-0.5 * z) * u
    k, lam, mu = _coulomb_params(pot, E, m)
    return specfun.whittaker_w(lam, mu, 2.0 * k * r, switchover=25.0)


def build_wavefunction(problem: MatchingProblem, solution: EigenSolution,
                       grid_size: int | None = None) -> WaveFunction:
    """Assemble the piecewise eigenfunction on a symmetric uniform grid.

    The interior trig/hyperbolic branch is anchored to the exterior value at
    the cutoff, the exterior carries the parity sign for x < 0, and the
    result is L2-normalised.
    """
    pot, m, parity = problem.pot, problem.m, problem.parity
    E = solution.energy
    n = int(grid_size or 4801)
    if n % 2 == 0:
        n += 1          # symmetric grid with an exact x = 0 sample
    lo, hi = potentials.domain(pot, energy=E, mass=m)
    x = np.linspace(lo, hi, n)
    delta = pot.delta

    core = float(potentials.eval(pot, 0.0))
    p2 = (E - core) ** 2 - m * m
    anchor = _exterior_value(pot, E, m, delta)

    half = x[n // 2:]                  # x >= 0, includes 0
    vals = np.empty_like(half)
    outside = half >= delta
    for i in np.nonzero(outside)[0]:
        vals[i] = _exterior_value(pot, E, m, float(half[i]))
    r_in = half[~outside]
    if p2 >= 0.0:
        p = math.sqrt(p2)
        if parity == EVEN:
            den = math.cos(p * delta)
            if abs(den) < 1e-12:
                raise AnchorSingularity(f"cos(p*delta) = {den} at E = {E}")
            vals[~outside] = anchor / den * np.cos(p * r_in)
        else:
            den = math.sin(p * delta)
            if abs(den) < 1e-12:
                if p * delta < 1e-6:   # p -> 0: interior degenerates to A x
                    vals[~outside] = anchor / delta * r_in
                else:
                    raise AnchorSingularity(f"sin(p*delta) = {den} at E = {E}")
            else:
                vals[~outside] = anchor / den * np.sin(p * r_in)
    else:
        q = math.sqrt(-p2)
        if parity == EVEN:
            vals[~outside] = anchor / math.cosh(q * delta) * np.cosh(q * r_in)
        else:
            vals[~outside] = anchor / math.sinh(q * delta) * np.sinh(q * r_in)

    sign = 1.0 if parity == EVEN else -1.0
    full = np.concatenate([sign * vals[:0:-1], vals])
    wf = WaveFunction(grid=x, values=full, energy=E, mass=m)
    return normalize(wf, pot, mode="l2")
