"""The five external-potential families and their pointwise evaluation.

All couplings enter the wave equation only through the product eV(x), so each
family stores that combination directly (e.g. ``alpha`` is charge times
Coulomb strength).  The two singular families carry a cutoff length ``delta``
inside which the potential is frozen at its boundary value, which keeps the
one-dimensional problem self-adjoint without losing the exterior physics.

``eval`` is numpy-aware: scalars in, scalar out; arrays in, arrays out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .config import SolverConfig
from .errors import DomainError, InvalidParameter


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameter(msg)


@dataclass(frozen=True)
class CoulombCutoff:
    """Attractive Coulomb tail alpha/|x| with the core frozen inside |x| < delta."""

    alpha: float
    delta: float

    def __post_init__(self):
        _require(self.delta > 0, "CoulombCutoff: delta must be positive")
        _require(abs(self.alpha) <= 0.5,
                 "CoulombCutoff: |alpha| <= 1/2 required for a real exterior exponent")
        _require(self.alpha != 0, "CoulombCutoff: alpha must be nonzero")


@dataclass(frozen=True)
class Cornell:
    """Coulomb-plus-linear potential, cutoff-regularised like CoulombCutoff."""

    alpha: float
    beta: float
    delta: float

    def __post_init__(self):
        _require(self.delta > 0, "Cornell: delta must be positive")
        _require(self.beta > 0, "Cornell: beta must be positive")
        _require(abs(self.alpha) <= 0.5,
                 "Cornell: |alpha| <= 1/2 required for a real exterior exponent")
        _require(self.alpha != 0, "Cornell: alpha must be nonzero")


@dataclass(frozen=True)
class PowerExp:
    """Half-line exponential well eV(x) = -b exp(-x/q), defined for x >= 0.

    The decaying-power generalisation exp(-(x/q)^p) is representable through
    the ``p`` field, but every solver in this package requires p = 1, the only
    case with a closed-form bound-state family.
    """

    b: float
    q: float
    p: float = 1.0

    def __post_init__(self):
        _require(self.b > 0, "PowerExp: b must be positive")
        _require(self.q > 0, "PowerExp: q must be positive")
        _require(self.p > 0, "PowerExp: p must be positive")


@dataclass(frozen=True)
class PoschlTeller:
    """Smooth symmetric well eV(x) = -v0 / cosh^2(x/d)."""

    v0: float
    d: float

    def __post_init__(self):
        _require(self.v0 > 0, "PoschlTeller: v0 must be positive")
        _require(self.d > 0, "PoschlTeller: d must be positive")


@dataclass(frozen=True)
class WoodsSaxon:
    """Asymmetric saturating well -v0 / (1 + exp((x - R)/a)).

    Flat at depth -v0 far to the left of the surface at x = R, vanishing far
    to the right; ``a`` sets the surface thickness.
    """

    v0: float
    big_r: float
    a: float

    def __post_init__(self):
        _require(self.v0 > 0, "WoodsSaxon: v0 must be positive")
        _require(self.a > 0, "WoodsSaxon: a must be positive")


PotentialSpec = Union[CoulombCutoff, Cornell, PowerExp, PoschlTeller, WoodsSaxon]


def eval(pot: PotentialSpec, x):
    """Pointwise eV(x) for any family; broadcasts over array-valued x."""
    if isinstance(pot, CoulombCutoff):
        xc = np.maximum(np.abs(x), pot.delta)
        return pot.alpha / xc
    if isinstance(pot, Cornell):
        xc = np.maximum(np.abs(x), pot.delta)
        return pot.alpha / xc + pot.beta * xc
    if isinstance(pot, PowerExp):
        xa = np.asarray(x, dtype=float)
        if np.any(xa < 0):
            raise DomainError("PowerExp potential is defined on the half-line x >= 0")
        arg = xa / pot.q if pot.p == 1.0 else (xa / pot.q) ** pot.p
        out = -pot.b * np.exp(-arg)
        return out if out.ndim else float(out)
    if isinstance(pot, PoschlTeller):
        return -pot.v0 / np.cosh(np.asarray(x, dtype=float) / pot.d) ** 2
    if isinstance(pot, WoodsSaxon):
        return -pot.v0 / (1.0 + np.exp((np.asarray(x, dtype=float) - pot.big_r) / pot.a))
    raise InvalidParameter(f"unknown potential type: {type(pot).__name__}")


def eval_scalar(pot: PotentialSpec, x: float) -> float:
    """Scalar-only eV(x) on the math module, for integrator inner loops.

    Semantics match ``eval``; the only difference is that no numpy machinery
    is touched, which matters when the call sits inside a per-step loop.
    """
    if isinstance(pot, CoulombCutoff):
        xc = max(abs(x), pot.delta)
        return pot.alpha / xc
    if isinstance(pot, Cornell):
        xc = max(abs(x), pot.delta)
        return pot.alpha / xc + pot.beta * xc
    if isinstance(pot, PowerExp):
        if x < 0:
            raise DomainError("PowerExp potential is defined on the half-line x >= 0")
        arg = x / pot.q if pot.p == 1.0 else (x / pot.q) ** pot.p
        return -pot.b * math.exp(-arg)
    if isinstance(pot, PoschlTeller):
        t = x / pot.d
        if abs(t) > 350.0:
            return 0.0
        return -pot.v0 / math.cosh(t) ** 2
    if isinstance(pot, WoodsSaxon):
        t = (x - pot.big_r) / pot.a
        if t > 700.0:
            return 0.0
        return -pot.v0 / (1.0 + math.exp(t))
    raise InvalidParameter(f"unknown potential type: {type(pot).__name__}")


def is_even(pot: PotentialSpec) -> bool:
    """True when eV(-x) = eV(x), so eigenstates split into parity classes."""
    return isinstance(pot, (CoulombCutoff, Cornell, PoschlTeller))


def domain(pot: PotentialSpec, config: SolverConfig | None = None,
           energy: float | None = None, mass: float | None = None):
    """Computational interval (lo, hi) on which wavefunctions are evaluated.

    For the Coulomb family the natural extent scales with the exterior decay
    length 1/sqrt(m^2 - E^2); pass ``energy`` and ``mass`` to adapt it, else a
    conservative fixed width is used.  A ``config.domain_half_width`` override
    always wins for the symmetric families.
    """
    half = config.domain_half_width if config is not None else None
    if isinstance(pot, CoulombCutoff):
        if half is None:
            if energy is not None and mass is not None and abs(energy) < mass:
                k = math.sqrt(mass * mass - energy * energy)
                half = min(40.0 / max(k, 1e-12), 200.0)
            else:
                half = 200.0
        return (-half, half)
    if isinstance(pot, Cornell):
        return (-half, half) if half is not None else (-60.0, 60.0)
    if isinstance(pot, PowerExp):
        return (0.0, half) if half is not None else (0.0, 20.0 * pot.q)
    if isinstance(pot, PoschlTeller):
        return (-half, half) if half is not None else (-8.0 * pot.d, 8.0 * pot.d)
    if isinstance(pot, WoodsSaxon):
        return (-half, half) if half is not None else (-30.0, 30.0)
    raise InvalidParameter(f"unknown potential type: {type(pot).__name__}")
