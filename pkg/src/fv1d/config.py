"""Run-level configuration shared by the solvers and the command line tool."""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass
class SolverConfig:
    """Tunable knobs that are not part of the physics.

    Every field has a usable default; the CLI overlays values from a config
    file and then from explicit flags.  ``None`` means "use the per-family
    default" wherever a family-dependent value is involved.
    """

    scan_points: int | None = None      # energy-scan resolution for bracketing
    brent_tol: float = 1e-12            # absolute tolerance of root refinement
    ode_tol: float = 1e-10              # per-step relative error of the RK5(4) pair
    grid_size: int = 4801               # samples used when a wavefunction is stored
    domain_half_width: float | None = None  # override for the symmetric families
    window: tuple[float, float] | None = None  # energy search window (lo, hi)
    normalization: str = "charge"       # "charge" or "l2"
    threads: int | None = None          # max parallel workers for scan refinement

    def replace_from(self, mapping: dict) -> "SolverConfig":
        """Return a copy updated with the given key/value pairs.

        Unknown keys raise ``KeyError`` so typos in config files surface
        instead of being silently dropped.
        """
        known = {f.name for f in fields(self)}
        bad = set(mapping) - known
        if bad:
            raise KeyError(f"unknown config keys: {sorted(bad)}")
        merged = {f.name: getattr(self, f.name) for f in fields(self)}
        merged.update(mapping)
        return SolverConfig(**merged)
