"""Shared two-component algebra: spinor reconstruction, charge density, norms.

The second-order wave equation is solved for a single scalar profile
psi_s(x); everything two-component is recovered algebraically from it and
from the local mixing factor

    f(x) = (E - eV(x)) / m,

namely psi1 = (1+f)/2 psi_s, psi2 = (1-f)/2 psi_s and the conserved charge
density rho = |psi1|^2 - |psi2|^2 = f |psi_s|^2.  Those identities hold
pointwise and exactly, and the tests pin them down as such.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List

import numpy as np
from scipy.integrate import simpson

from . import potentials
from .errors import InvalidParameter, NegativeCharge, ZeroNorm
from .potentials import PotentialSpec

PARTICLE = "particle"
ANTIPARTICLE = "antiparticle"


@dataclass
class WaveFunction:
    """Scalar master-equation profile sampled on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray
    energy: float
    mass: float

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.grid.ndim != 1 or self.grid.size < 2:
            raise InvalidParameter("WaveFunction: grid must be 1-D with >= 2 points")
        if self.values.shape != self.grid.shape:
            raise InvalidParameter("WaveFunction: grid/values length mismatch")
        if not np.all(np.diff(self.grid) > 0):
            raise InvalidParameter("WaveFunction: grid must be strictly increasing")
        if not (np.all(np.isfinite(self.grid)) and np.all(np.isfinite(self.values))):
            raise InvalidParameter("WaveFunction: non-finite samples")
        if not self.mass > 0:
            raise InvalidParameter("WaveFunction: mass must be positive")


@dataclass
class SpinorField:
    """Reconstructed two-component field and its charge density."""

    grid: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    rho: np.ndarray
    f: np.ndarray   # local particle/antiparticle mixing factor


@dataclass(frozen=True)
class EigenSolution:
    """One discrete level, tagged with how it was obtained."""

    energy: float
    branch: str          # "particle" | "antiparticle"
    parity: str          # "even" | "odd" | "none"
    nodes: int
    solver: str          # "matching" | "shooting" | "closedform" | "oracle"
    residual: float


def master_coefficient(pot: PotentialSpec, energy: float, mass: float, x):
    """Coefficient (E - eV(x))^2 - m^2 multiplying psi_s in the wave equation."""
    v = potentials.eval(pot, x)
    return (energy - v) ** 2 - mass * mass


def mixing_factor(pot: PotentialSpec, energy: float, mass: float, x):
    """Local mixing factor f(x) = (E - eV(x)) / m."""
    return (energy - potentials.eval(pot, x)) / mass


def reconstruct_spinor(wf: WaveFunction, pot: PotentialSpec) -> SpinorField:
    """Rebuild the two components and the charge density from psi_s."""
    f = np.asarray(mixing_factor(pot, wf.energy, wf.mass, wf.grid), dtype=float)
    psi1 = 0.5 * (1.0 + f) * wf.values
    psi2 = 0.5 * (1.0 - f) * wf.values
    rho = (np.abs(psi1) ** 2 - np.abs(psi2) ** 2).real
    return SpinorField(grid=wf.grid, psi1=psi1, psi2=psi2, rho=rho, f=f)


def component_ratio(spinor: SpinorField) -> np.ma.MaskedArray:
    """|psi2/psi1| per grid point, masked wherever psi1 (numerically) vanishes."""
    a1 = np.abs(spinor.psi1)
    a2 = np.abs(spinor.psi2)
    peak = a1.max() if a1.size else 0.0
    dead = a1 < 1e-14 * peak if peak > 0 else np.ones_like(a1, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dead, 0.0, a2 / np.where(dead, 1.0, a1))
    return np.ma.masked_array(ratio, mask=dead)


def normalize(wf: WaveFunction, pot: PotentialSpec, mode: str = "charge") -> WaveFunction:
    """Rescale psi_s so the L2 norm or the total charge equals one.

    Charge mode uses the signed integral of rho; locally negative stretches
    of the density are physical for these states and are not clipped.
    """
    if wf.grid.size < 3:
        raise InvalidParameter("normalize: need at least 3 grid points")
    mode_l = mode.lower()
    if mode_l == "l2":
        integral = float(simpson(np.abs(wf.values) ** 2, x=wf.grid))
        if integral < 1e-300:
            raise ZeroNorm(f"normalize: L2 norm integral = {integral}")
    elif mode_l == "charge":
        f = np.asarray(mixing_factor(pot, wf.energy, wf.mass, wf.grid), dtype=float)
        rho = f * np.abs(wf.values) ** 2
        integral = float(simpson(rho, x=wf.grid))
        if abs(integral) < 1e-300:
            raise ZeroNorm(f"normalize: charge integral = {integral}")
        if integral <= 0.0:
            raise NegativeCharge(
                f"normalize: total charge {integral:.3e} <= 0; "
                "use L2 mode or the antiparticle convention")
    else:
        raise InvalidParameter(f"normalize: unknown mode {mode!r}")
    return replace(wf, values=wf.values / np.sqrt(integral))


def count_nodes(wf: WaveFunction) -> int:
    """Strict sign changes of psi_s, with a dead-band against tail chatter."""
    v = wf.values
    if np.iscomplexobj(v):
        if np.abs(v.imag).max() > 1e-12 * max(np.abs(v).max(), 1e-300):
            raise InvalidParameter("count_nodes: wavefunction is essentially complex")
        v = v.real
    peak = np.abs(v).max()
    if peak == 0.0:
        return 0
    live = v[np.abs(v) >= 1e-9 * peak]
    if live.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(np.sign(live)) != 0))


def conjugate_spectrum(solutions: List[EigenSolution]) -> List[EigenSolution]:
    """Map a particle-branch spectrum onto the antiparticle branch (E -> -E)."""
    flipped = []
    for s in solutions:
        branch = ANTIPARTICLE if s.branch == PARTICLE else PARTICLE
        flipped.append(replace(s, energy=-s.energy, branch=branch))
    return flipped
