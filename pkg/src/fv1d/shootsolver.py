"""Shooting-method spectra for the smooth full-line wells.

The Poschl-Teller well is solved by parity shooting: integrate the master
equation from the origin with even or odd initial data and demand the
exponentially decaying combination at the right edge.  The Woods-Saxon well
is asymmetric, so the integration starts at the far left edge instead; its
default is a hard-box condition at both ends because the well's reported
levels sit above the left decay threshold (see ``ws_mismatch``).

The integrator is an embedded Dormand-Prince 5(4) pair with proportional
step control.  A scalar pure-float path serves root refinement and
wavefunction assembly; a vectorised path advances a whole energy grid in
lock step for the scan phase, controlling the step on the worst error in
the batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import potentials
from .errors import (InvalidParameter, NoRoots, NonConvergence,
                     OutsideDecayWindow, StepUnderflow)
from .fvcore import PARTICLE, EigenSolution, WaveFunction, count_nodes, normalize
from .matchsolver import ScanReport
from .potentials import PoschlTeller, PotentialSpec, WoodsSaxon

DECAY = "decay"
BOX = "box"

_RENORM = 1e100
_MIN_STEP_FRACTION = 1e-14

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# b5 - b4: weights of the embedded error estimate
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525,
      -1 / 40)


@dataclass
class OdeState:
    """Scalar integration state; amplitude is psi * exp(log_scale)."""
    x: float
    psi: float
    dpsi: float
    log_scale: float = 0.0


@dataclass
class ShootingProblem:
    pot: PotentialSpec
    m: float
    parity: str
    window: tuple
    L: float | None = None
    ode_tol: float = 1e-10
    scan_points: int = 1500
    boundary_mode: str = BOX

    def __post_init__(self):
        if isinstance(self.pot, PoschlTeller):
            if self.parity not in ("even", "odd"):
                raise InvalidParameter("Poschl-Teller shooting needs even or odd parity")
            if self.L is None:
                self.L = 8.0 * self.pot.d
            self.boundary_mode = DECAY
        elif isinstance(self.pot, WoodsSaxon):
            if self.parity != "none":
                raise InvalidParameter("Woods-Saxon has no parity; pass parity='none'")
            if self.L is None:
                self.L = 30.0
            if self.boundary_mode not in (DECAY, BOX):
                raise InvalidParameter(f"unknown boundary_mode {self.boundary_mode!r}")
        else:
            raise InvalidParameter("shooting solver handles Poschl-Teller and Woods-Saxon")
        if not self.m > 0:
            raise InvalidParameter("mass must be positive")
        lo, hi = self.window
        if not lo < hi:
            raise InvalidParameter(f"empty energy window {self.window}")


# ---------------------------------------------------------------------------
# scalar integrator (pure floats; used by refinement and assembly)
# ---------------------------------------------------------------------------

def integrate(pot: PotentialSpec, m: float, E: float, state: OdeState,
              to_x: float, tol: float) -> OdeState:
    """Advance the master equation psi'' = -[(E-eV)^2 - m^2] psi to ``to_x``.

    Adaptive embedded 5(4) stepping with per-step relative error below
    ``tol``; the amplitude is renormalised whenever it exceeds 1e100 and the
    discarded factor is accumulated in ``log_scale``.
    """
    if not 1e-13 <= tol <= 1e-6:
        raise InvalidParameter(f"ode tolerance {tol} outside [1e-13, 1e-6]")
    x, psi, dpsi, log_scale = state.x, state.psi, state.dpsi, state.log_scale
    span = to_x - x
    if span == 0.0:
        return OdeState(x, psi, dpsi, log_scale)
    direction = 1.0 if span > 0 else -1.0
    h_min = _MIN_STEP_FRACTION * abs(span)
    h = direction * max(abs(span) / 100.0, h_min)
    m2 = m * m
    ev = potentials.eval_scalar

    def deriv(xx, p, dp):
        v = ev(pot, xx)
        return dp, -((E - v) ** 2 - m2) * p

    while (to_x - x) * direction > 0.0:
        if abs(h) > abs(to_x - x):
            h = to_x - x
        kp = [0.0] * 7
        kd = [0.0] * 7
        kp[0], kd[0] = deriv(x, psi, dpsi)
        for s in range(1, 7):
            ps, ds = psi, dpsi
            row = _A[s]
            for j in range(s):
                ps += h * row[j] * kp[j]
                ds += h * row[j] * kd[j]
            kp[s], kd[s] = deriv(x + _C[s] * h, ps, ds)
        p5 = psi + h * sum(b * k for b, k in zip(_B5, kp))
        d5 = dpsi + h * sum(b * k for b, k in zip(_B5, kd))
        ep = h * sum(e * k for e, k in zip(_E, kp))
        ed = h * sum(e * k for e, k in zip(_E, kd))
        scale = tol * max(math.hypot(psi, dpsi), math.hypot(p5, d5), 1e-30)
        err = math.hypot(ep, ed) / scale
        if err <= 1.0:
            x += h
            psi, dpsi = p5, d5
            mag = max(abs(psi), abs(dpsi))
            if mag > _RENORM:
                psi /= mag
                dpsi /= mag
                log_scale += math.log(mag)
            grow = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
            h *= max(0.2, grow)
        else:
            h *= max(0.1, 0.9 * err ** -0.25)
        if abs(h) < h_min:
            raise StepUnderflow(f"step {h} below {h_min} at x = {x}")
    return OdeState(x, psi, dpsi, log_scale)


# ---------------------------------------------------------------------------
# batched integrator (one step schedule shared across an energy grid)
# ---------------------------------------------------------------------------

def _integrate_batch(pot, m, E, psi, dpsi, x0, x1, tol):
    """Vectorised counterpart of :func:`integrate` over an energy array."""
    E = np.asarray(E, dtype=float)
    psi = np.broadcast_to(np.asarray(psi, dtype=float), E.shape).copy()
    dpsi = np.broadcast_to(np.asarray(dpsi, dtype=float), E.shape).copy()
    log_scale = np.zeros(E.shape)
    span = x1 - x0
    direction = 1.0 if span > 0 else -1.0
    h_min = _MIN_STEP_FRACTION * abs(span)
    h = direction * abs(span) / 100.0
    x = x0
    m2 = m * m

    def deriv(xx, p, dp):
        v = potentials.eval(pot, xx)
        return dp, -((E - v) ** 2 - m2) * p

    while (x1 - x) * direction > 0.0:
        if abs(h) > abs(x1 - x):
            h = x1 - x
        kp = [None] * 7
        kd = [None] * 7
        kp[0], kd[0] = deriv(x, psi, dpsi)
        for s in range(1, 7):
            ps, ds = psi, dpsi
            row = _A[s]
            for j in range(s):
                ps = ps + h * row[j] * kp[j]
                ds = ds + h * row[j] * kd[j]
            kp[s], kd[s] = deriv(x + _C[s] * h, ps, ds)
        p5 = psi + h * sum(b * k for b, k in zip(_B5, kp) if b)
        d5 = dpsi + h * sum(b * k for b, k in zip(_B5, kd) if b)
        ep = h * sum(e * k for e, k in zip(_E, kp) if e)
        ed = h * sum(e * k for e, k in zip(_E, kd) if e)
        scale = tol * np.maximum(np.hypot(psi, dpsi), np.hypot(p5, d5))
        np.maximum(scale, tol * 1e-30, out=scale)
        err = float(np.max(np.hypot(ep, ed) / scale))
        if err <= 1.0:
            x += h
            psi, dpsi = p5, d5
            mag = np.maximum(np.abs(psi), np.abs(dpsi))
            big = mag > _RENORM
            if big.any():
                psi = np.where(big, psi / np.where(big, mag, 1.0), psi)
                dpsi = np.where(big, dpsi / np.where(big, mag, 1.0), dpsi)
                log_scale += np.where(big, np.log(np.where(big, mag, 1.0)), 0.0)
            grow = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
            h *= max(0.2, grow)
        else:
            h *= max(0.1, 0.9 * err ** -0.25)
        if abs(h) < h_min:
            raise StepUnderflow(f"batch step {h} below {h_min} at x = {x}")
    return psi, dpsi, log_scale


# ---------------------------------------------------------------------------
# mismatch functionals
# ---------------------------------------------------------------------------

def pt_mismatch(problem: ShootingProblem, E) -> float | np.ndarray:
    """Decay mismatch at x = L for the parity solution started at the origin.

    Zero exactly when the integrated solution is proportional to
    exp(-kappa_plus x) at the right edge.  Accepts a scalar or an array of
    energies; the array form shares one adaptive step schedule.
    """
    m, L = problem.m, problem.L
    if np.isscalar(E):
        if not 0.0 < E < m:
            raise InvalidParameter("bound-state energy must lie inside the gap")
        kap = math.sqrt(m * m - E * E)
        init = (1.0, 0.0) if problem.parity == "even" else (0.0, 1.0)
        st = integrate(problem.pot, m, float(E),
                       OdeState(0.0, init[0], init[1]), L, problem.ode_tol)
        num = st.dpsi + kap * st.psi
        den = math.hypot(st.dpsi, kap * st.psi)
        return num / den if den > 0.0 else 0.0
    E = np.asarray(E, dtype=float)
    kap = np.sqrt(m * m - E * E)
    init = (1.0, 0.0) if problem.parity == "even" else (0.0, 1.0)
    psi, dpsi, _ = _integrate_batch(problem.pot, m, E, init[0], init[1],
                                    0.0, L, problem.ode_tol)
    den = np.hypot(dpsi, kap * psi)
    return (dpsi + kap * psi) / np.where(den > 0.0, den, 1.0)


def ws_mismatch(problem: ShootingProblem, E) -> float | np.ndarray:
    """Right-edge mismatch for the Woods-Saxon integration started at -L.

    Box mode shoots from psi(-L) = 0 and is zero when psi(L) = 0.  Decay
    mode starts on the growing exponential of the left-decaying solution and
    is zero when the right edge is purely decaying; it requires
    m^2 > (E + eV0)^2 so that the left decay constant is real.
    """
    m, L = problem.m, problem.L
    scalar = np.isscalar(E)
    E_arr = np.asarray(E, dtype=float)
    if np.any(E_arr <= 0.0) or np.any(E_arr >= m):
        raise InvalidParameter("bound-state energy must lie inside the gap")
    if problem.boundary_mode == DECAY:
        v0 = problem.pot.v0
        km2 = m * m - (E_arr + v0) ** 2
        if np.any(km2 <= 0.0):
            raise OutsideDecayWindow(
                f"left decay needs E < m - eV0 = {m - v0}; got E = {E}")
        if scalar:
            kam = math.sqrt(float(km2))
            st = integrate(problem.pot, m, float(E),
                           OdeState(-L, 1.0, kam, log_scale=-kam * L),
                           L, problem.ode_tol)
            kap = math.sqrt(m * m - float(E_arr) ** 2)
            num = st.dpsi + kap * st.psi
            den = math.hypot(st.dpsi, kap * st.psi)
            return num / den if den > 0.0 else 0.0
        kam = np.sqrt(km2)
        psi, dpsi, _ = _integrate_batch(problem.pot, m, E_arr,
                                        np.ones_like(E_arr), kam,
                                        -L, L, problem.ode_tol)
        kap = np.sqrt(m * m - E_arr ** 2)
        den = np.hypot(dpsi, kap * psi)
        return (dpsi + kap * psi) / np.where(den > 0.0, den, 1.0)
    if scalar:
        st = integrate(problem.pot, m, float(E), OdeState(-L, 0.0, 1.0),
                       L, problem.ode_tol)
        den = math.hypot(st.psi, st.dpsi)
        return st.psi / den if den > 0.0 else 0.0
    psi, dpsi, _ = _integrate_batch(problem.pot, m, E_arr, 0.0, 1.0,
                                    -L, L, problem.ode_tol)
    den = np.hypot(psi, dpsi)
    return psi / np.where(den > 0.0, den, 1.0)


def _mismatch(problem, E):
    if isinstance(problem.pot, PoschlTeller):
        return pt_mismatch(problem, E)
    return ws_mismatch(problem, E)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def solve(problem: ShootingProblem) -> ScanReport:
    """Scan, bracket, and refine every mismatch zero in the energy window.

    Raises NoRoots when the scan shows no sign change at all.
    """
    lo, hi = problem.window
    lo = max(lo, 1e-12)
    hi = min(hi, problem.m * (1.0 - 1e-9))
    if problem.boundary_mode == DECAY and isinstance(problem.pot, WoodsSaxon):
        hi = min(hi, (problem.m - problem.pot.v0) * (1.0 - 1e-9))
        if hi <= lo:
            raise OutsideDecayWindow(
                "decay-mode window is empty: it requires E < m - eV0")
    energies = np.linspace(lo, hi, problem.scan_points)
    res = np.asarray(_mismatch(problem, energies))
    report = ScanReport(energies=energies, residuals=res,
                        pole_flags=np.zeros(energies.shape, dtype=bool))
    sign = np.sign(res)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if flips.size == 0:
        raise NoRoots(f"no mismatch sign change in window ({lo}, {hi})")
    roots = []
    for i in flips:
        ea, eb = float(energies[i]), float(energies[i + 1])
        report.brackets.append((ea, eb))
        e_root = brentq(lambda e: float(_mismatch(problem, e)), ea, eb,
                        xtol=1e-10, rtol=8.9e-16, maxiter=200)
        residual = _defect(problem, e_root)
        wf = build_wavefunction(problem, _bare(problem, e_root), 1201)
        roots.append(EigenSolution(
            energy=e_root, branch=PARTICLE, parity=problem.parity,
            nodes=_robust_nodes(wf, problem.ode_tol), solver="shooting",
            residual=residual))
    roots.sort(key=lambda s: s.energy)
    report.roots = roots
    return report


def _bare(problem, energy):
    return EigenSolution(energy=energy, branch=PARTICLE, parity=problem.parity,
                         nodes=-1, solver="shooting", residual=math.nan)


def _defect(problem, energy: float) -> float:
    """Scale-free derivative jump of the two-sided solution at the joint.

    The wall mismatch that locates an eigenvalue is exponentially steep in E
    for deeply bound states (its slope carries a factor e^{2 kappa L}), so
    its value at the refined root saturates at the normalisation bound and
    says nothing about quality.  Joining the two stable pieces at the outer
    turning point instead gives a Wronskian whose sensitivity to E grows
    only polynomially with the domain, so this number is small precisely
    when the shipped state is good.  Both factors are normalised per side,
    which cancels the integrator's overflow rescaling.
    """
    E, m, L = energy, problem.m, problem.L
    pot, tol = problem.pot, problem.ode_tol
    kappa = math.sqrt(max(m * m - E * E, 1e-30))
    if isinstance(pot, PoschlTeller):
        init = (1.0, 0.0) if problem.parity == "even" else (0.0, 1.0)
        lstart = OdeState(0.0, init[0], init[1])
        rstart = OdeState(L, 1.0, -kappa)
        depth = pot.v0 / (m - E) if m - E > 0.0 else 0.0
        x_turn = pot.d * math.acosh(math.sqrt(depth)) if depth > 1.0 else 0.5 * L
        x_turn = min(max(x_turn, 0.05 * L), 0.95 * L)
    else:
        if problem.boundary_mode == DECAY:
            kam = math.sqrt(max(m * m - (E + pot.v0) ** 2, 1e-30))
            lstart = OdeState(-L, 1.0, kam)
            rstart = OdeState(L, 1.0, -kappa)
        else:
            lstart = OdeState(-L, 0.0, 1.0)
            rstart = OdeState(L, 0.0, -1.0)
        ratio = pot.v0 / (m - E) - 1.0 if m - E > 0.0 else 0.0
        x_turn = pot.big_r + pot.a * math.log(ratio) if ratio > 0.0 else 0.0
        x_turn = min(max(x_turn, -0.9 * L), 0.9 * L)
    sl = integrate(pot, m, E, lstart, x_turn, tol)
    sr = integrate(pot, m, E, rstart, x_turn, tol)
    wronskian = sl.psi * sr.dpsi - sl.dpsi * sr.psi
    return abs(wronskian) / (math.hypot(sl.psi, sl.dpsi)
                             * math.hypot(sr.psi, sr.dpsi))


def _robust_nodes(wf: WaveFunction, ode_tol: float) -> int:
    """Node count with the untrustworthy outer tails trimmed away.

    Relative noise on a shot trajectory grows like the square of the ratio
    of the peak envelope to the local one, so where the envelope has fallen
    to 1e-3 of the peak the integrated sign is still good to ~1e-4 at the
    default tolerance, while much further out it may flip freely.  Genuine
    interior nodes of a single-well state sit where the envelope is of order
    the peak, so counting stops at the outermost samples above the cut.
    """
    v = wf.values
    alive = np.where(np.abs(v) >= 1e-3 * float(np.abs(v).max()))[0]
    lo, hi = int(alive[0]), int(alive[-1])
    if hi - lo < 1:
        return 0
    trimmed = replace(wf, grid=wf.grid[lo:hi + 1], values=v[lo:hi + 1])
    return count_nodes(trimmed)


def box_drift(problem: ShootingProblem, solution: EigenSolution,
              alt_L: float = 40.0) -> float:
    """Re-solve one box level at a larger half-length; return the energy shift.

    Large drift marks a level as box-dependent rather than a genuine decaying
    bound state.
    """
    wide = replace(problem, L=alt_L)
    lo = max(solution.energy - 0.05, 1e-9)
    hi = min(solution.energy + 0.05, problem.m * (1 - 1e-9))
    wide = replace(wide, window=(lo, hi), scan_points=400)
    try:
        rep = solve(wide)
    except NoRoots:
        return math.inf
    return min(abs(s.energy - solution.energy) for s in rep.roots)


# ---------------------------------------------------------------------------
# wavefunction assembly
# ---------------------------------------------------------------------------

def build_wavefunction(problem: ShootingProblem, solution: EigenSolution,
                       grid_size: int | None = None) -> WaveFunction:
    """Re-integrate at the eigenvalue and sample on a uniform grid.

    Each profile is assembled from two pieces joined near the outermost
    classical turning point, with each piece integrated in its stable
    direction: outward through the allowed region, and inward from the far
    boundary through the forbidden tail.  One-sided integration would let
    the growing mode swamp the tail, since at an eigenvalue found to finite
    precision its coefficient is small but not zero.  Poschl-Teller profiles
    are built on [0, L] and mirrored by parity; Woods-Saxon profiles span
    the full interval.  The result is L2-normalised.
    """
    n = int(grid_size or 2401)
    if n % 2 == 0:
        n += 1
    E, m, L = solution.energy, problem.m, problem.L
    pot = problem.pot
    tol = problem.ode_tol
    kappa = math.sqrt(max(m * m - E * E, 1e-30))
    if isinstance(pot, PoschlTeller):
        half = np.linspace(0.0, L, n // 2 + 1)
        init = (1.0, 0.0) if problem.parity == "even" else (0.0, 1.0)
        depth = pot.v0 / (m - E) if m - E > 0.0 else 0.0
        x_turn = pot.d * math.acosh(math.sqrt(depth)) if depth > 1.0 else 0.5 * L
        j = int(np.clip(np.searchsorted(half, x_turn), 2, half.size - 3))
        vals = _two_sided(pot, m, E, half, tol,
                          OdeState(0.0, init[0], init[1]),
                          OdeState(L, 1.0, -kappa), j)
        sign = 1.0 if problem.parity == "even" else -1.0
        vals = np.concatenate([sign * vals[:0:-1], vals])
        grid = np.concatenate([-half[:0:-1], half])
    else:
        grid = np.linspace(-L, L, n)
        if problem.boundary_mode == DECAY:
            v0 = pot.v0
            km2 = m * m - (E + v0) ** 2
            if km2 <= 0.0:
                raise OutsideDecayWindow(
                    f"left decay needs E < m - eV0 = {m - v0}; got E = {E}")
            kam = math.sqrt(km2)
            lstart = OdeState(-L, 1.0, kam, log_scale=-kam * L)
            rstart = OdeState(L, 1.0, -kappa)
        else:
            lstart = OdeState(-L, 0.0, 1.0)
            rstart = OdeState(L, 0.0, -1.0)
        ratio = pot.v0 / (m - E) - 1.0 if m - E > 0.0 else 0.0
        x_turn = pot.big_r + pot.a * math.log(ratio) if ratio > 0.0 else 0.0
        j = int(np.clip(np.searchsorted(grid, x_turn), 2, grid.size - 3))
        vals = _two_sided(pot, m, E, grid, tol, lstart, rstart, j)
    wf = WaveFunction(grid=grid, values=vals, energy=E, mass=m)
    return normalize(wf, pot, mode="l2")


def _two_sided(pot, m, E, xs: np.ndarray, tol: float,
               lstart: OdeState, rstart: OdeState, j: int) -> np.ndarray:
    """Join a forward piece on xs[:j+1] and a backward piece on xs[j-1:].

    The two samples the pieces share select the joint: the one where both
    are largest fixes the scale of the backward piece, so a node falling
    exactly on the nominal joint cannot poison the splice.
    """
    lv, ls = _sample(pot, m, E, lstart, xs[:j + 1], tol)
    rv, rs = _sample(pot, m, E, rstart, xs[j - 1:][::-1], tol)
    rv, rs = rv[::-1], rs[::-1]
    left = lv * np.exp(ls - ls.max())
    right = rv * np.exp(rs - rs.max())
    overlap = np.minimum(np.abs(left[-2:]), np.abs(right[:2]))
    k = int(np.argmax(overlap))
    if overlap[k] == 0.0:
        raise NonConvergence("two-sided splice: both joint samples vanish")
    g = j - 1 + k
    return np.concatenate([left[:g + 1], (left[g] / right[k]) * right[k + 1:]])


def _sample(pot, m, E, start: OdeState, xs: np.ndarray, tol: float):
    vals = np.empty(xs.shape)
    scales = np.empty(xs.shape)
    st = start
    if xs[0] != start.x:
        st = integrate(pot, m, E, st, float(xs[0]), tol)
    vals[0], scales[0] = st.psi, st.log_scale
    for i in range(1, len(xs)):
        st = integrate(pot, m, E, st, float(xs[i]), tol)
        vals[i], scales[i] = st.psi, st.log_scale
    return vals, scales
