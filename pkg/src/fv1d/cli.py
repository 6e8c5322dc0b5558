"""Command line front end.

Five subcommands cover the workflow: ``solve`` for spectra, ``scan`` for
residual or mismatch traces, ``wavefunction`` for sampled spinor fields,
``nrlimit`` for the weak-binding comparison sweep, and ``oracle-check``
for the independent cross-validation table.

Output is deliberately boring: fixed column schemas, fixed float
formatting, LF line endings, and a write-to-temp-then-rename so a failed
run never leaves a partial file.  Identical inputs give byte-identical
files, except for the JSON manifest timestamp, which ``--no-manifest``
removes for byte-comparison workflows.

Exit codes: 0 success (an empty spectrum is success), 2 bad flags or
window, 3 solver failure, 4 requested level missing, 5 oracle
disagreement above tolerance.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, closedform, fvcore, matchsolver, oracle, potentials, shootsolver
from .errors import Fv1dError, InvalidParameter, NoRoots
from .potentials import Cornell, CoulombCutoff, PoschlTeller, PowerExp, WoodsSaxon

_CSV_VERSION = "# fv1d-csv-v1"
_WF_COLUMNS = "x,psi_s_re,psi_s_im,psi1_re,psi1_im,psi2_re,psi2_im,rho,f,ratio"

_POTENTIALS = ("coulomb", "cornell", "power-exp", "poschl-teller", "woods-saxon")
_MATCHING = ("coulomb", "cornell")
_SHOOTING = ("poschl-teller", "woods-saxon")

# flag name -> converter used when the value arrives from a config file
_CONVERTERS = {
    "mass": float, "alpha": float, "beta": float, "delta": float,
    "b": float, "q": float, "v0": float, "d": float, "big_r": float,
    "a": float, "emin": float, "emax": float, "ode_tol": float,
    "L": float, "tol": float, "grid": int, "n": int, "n_max": int,
    "potential": str, "parity": str, "norm": str, "boundary": str,
    "fmt": str, "out": str,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            _overlay_config(args, args.config)
        handler = _DISPATCH[args.command]
        return handler(args)
    except (InvalidParameter, ValueError) as exc:
        print(f"fv1d: {exc}", file=sys.stderr)
        return 2
    except Fv1dError as exc:
        print(f"fv1d: solver failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"fv1d: {exc}", file=sys.stderr)
        return 3


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fv1d",
        description="Bound states of the one-dimensional two-component "
                    "relativistic wave equation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="compute a spectrum")
    _shared_flags(p_solve)
    p_solve.add_argument("--n-max", dest="n_max", type=int, default=None,
                         help="highest closed-form level (power-exp only)")

    p_scan = sub.add_parser("scan", help="residual or mismatch trace")
    _shared_flags(p_scan)

    p_wf = sub.add_parser("wavefunction", help="sampled fields of one level")
    _shared_flags(p_wf)
    p_wf.add_argument("--n", type=int, default=None,
                      help="level index within the selected parity (default 0)")

    p_nr = sub.add_parser("nrlimit", help="weak-binding comparison sweep")
    _shared_flags(p_nr, list_valued=("alpha", "mass"))
    p_nr.add_argument("--n", type=int, default=None,
                      help="level index to compare (default 0)")

    p_oc = sub.add_parser("oracle-check", help="independent solver validation")
    _shared_flags(p_oc)
    p_oc.add_argument("--tol", type=float, default=None,
                      help="largest acceptable energy gap (default 1e-5)")
    return parser


def _shared_flags(p: argparse.ArgumentParser, list_valued=()) -> None:
    def num(name):
        return str if name in list_valued else float

    p.add_argument("--potential", choices=_POTENTIALS)
    p.add_argument("--mass", type=num("mass"), default=None)
    p.add_argument("--alpha", type=num("alpha"), default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--v0", type=float, default=None)
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--big-r", dest="big_r", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--parity", choices=("even", "odd", "both"), default=None)
    p.add_argument("--emin", type=float, default=None)
    p.add_argument("--emax", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--ode-tol", dest="ode_tol", type=float, default=None)
    p.add_argument("--norm", choices=("l2", "charge"), default=None)
    p.add_argument("--boundary", choices=("decay", "box"), default=None)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--no-manifest", dest="no_manifest", action="store_true")


def _overlay_config(args: argparse.Namespace, path: str) -> None:
    """Fill unset flags from a `key = value` file; explicit flags win."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameter(
                    f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key == "format":
                key = "fmt"
            if key not in _CONVERTERS:
                raise InvalidParameter(f"{path}:{lineno}: unknown key {key!r}")
            if getattr(args, key, None) is None and hasattr(args, key):
                setattr(args, key, _CONVERTERS[key](value.strip()))


def _need(args, flag, fallback=None):
    value = getattr(args, flag, None)
    if value is None:
        if fallback is None:
            raise InvalidParameter(f"--{flag.replace('_', '-')} is required here")
        return fallback
    return value


def _build_potential(args) -> potentials.PotentialSpec:
    name = _need(args, "potential")
    if name == "coulomb":
        return CoulombCutoff(alpha=_need(args, "alpha"), delta=_need(args, "delta"))
    if name == "cornell":
        return Cornell(alpha=_need(args, "alpha"), beta=_need(args, "beta"),
                       delta=_need(args, "delta"))
    if name == "power-exp":
        return PowerExp(b=_need(args, "b", 1.0), q=_need(args, "q"))
    if name == "poschl-teller":
        return PoschlTeller(v0=_need(args, "v0"), d=_need(args, "d"))
    return WoodsSaxon(v0=_need(args, "v0"), big_r=_need(args, "big_r", 0.0),
                      a=_need(args, "a"))


def _window(args, m: float):
    lo = _need(args, "emin", 0.01 * m)
    hi = _need(args, "emax", m * (1.0 - 1e-4))
    if not 0.0 < lo < hi:
        raise InvalidParameter(f"empty or negative energy window ({lo}, {hi})")
    return lo, hi


def _parities(args, name: str):
    if name == "woods-saxon":
        return ["none"]
    parity = _need(args, "parity", "both")
    return ["even", "odd"] if parity == "both" else [parity]


# ---------------------------------------------------------------------------
# spectrum assembly shared by solve / wavefunction / oracle-check
# ---------------------------------------------------------------------------

def _solve_spectrum(args, pot, m: float):
    """Return [(EigenSolution, problem)] ascending in energy."""
    name = args.potential
    window = _window(args, m)
    pairs = []
    for parity in _parities(args, name):
        if name in _MATCHING:
            problem = matchsolver.MatchingProblem(pot=pot, m=m, parity=parity,
                                                 window=window)
            report = matchsolver.solve(problem)
        else:
            kwargs = {}
            if getattr(args, "L", None) is not None:
                kwargs["L"] = args.L
            if getattr(args, "boundary", None) is not None:
                kwargs["boundary_mode"] = args.boundary
            problem = shootsolver.ShootingProblem(
                pot=pot, m=m, parity=parity, window=window,
                ode_tol=_need(args, "ode_tol", 1e-10), **kwargs)
            try:
                report = shootsolver.solve(problem)
            except NoRoots:
                continue
        pairs.extend((sol, problem) for sol in report.roots)
    pairs.sort(key=lambda item: item[0].energy)
    return pairs


def _closedform_levels(args, pot: PowerExp, m: float):
    n_max = _need(args, "n_max", 0)
    if n_max < 0:
        raise InvalidParameter("--n-max must be >= 0")
    return [closedform.powerexp_state(n, pot.b, pot.q, m) for n in range(n_max + 1)]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_solve(args) -> int:
    pot = _build_potential(args)
    m = _need(args, "mass", 1.0)
    if args.potential == "power-exp":
        rows = [{"n": st.n, "parity": "none", "branch": "particle",
                 "energy": st.E, "nodes": st.n, "residual": 0.0}
                for st in _closedform_levels(args, pot, m)]
    else:
        rows = [{"n": i, "parity": sol.parity, "branch": sol.branch,
                 "energy": sol.energy, "nodes": sol.nodes,
                 "residual": sol.residual}
                for i, (sol, _) in enumerate(_solve_spectrum(args, pot, m))]
    fmt = _need(args, "fmt", "json")
    if fmt == "json":
        payload = {"levels": rows}
        if not args.no_manifest:
            payload["manifest"] = _manifest(args, "solve")
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [_CSV_VERSION, "n,parity,branch,energy,nodes"]
        lines += ["{n},{parity},{branch},{energy:.11e},{nodes}".format(**row)
                  for row in rows]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def _cmd_scan(args) -> int:
    pot = _build_potential(args)
    m = _need(args, "mass", 1.0)
    lo, hi = _window(args, m)
    name = args.potential
    if name == "power-exp":
        raise InvalidParameter("scan does not apply to the closed-form family")
    parities = _parities(args, name)
    if len(parities) != 1:
        raise InvalidParameter("scan needs a single --parity, not 'both'")
    parity = parities[0]
    if name in _MATCHING:
        problem = matchsolver.MatchingProblem(pot=pot, m=m, parity=parity,
                                             window=(lo, hi))
        report = matchsolver.solve(problem)
        energies = report.energies
        residuals = report.residuals
        flags = report.pole_flags.astype(int)
    else:
        problem = shootsolver.ShootingProblem(
            pot=pot, m=m, parity=parity, window=(lo, hi),
            ode_tol=_need(args, "ode_tol", 1e-10),
            **({"L": args.L} if getattr(args, "L", None) is not None else {}))
        energies = np.linspace(*problem.window, _need(args, "grid", 1500))
        mism = (shootsolver.pt_mismatch if isinstance(pot, PoschlTeller)
                else shootsolver.ws_mismatch)
        residuals = np.asarray(mism(problem, energies), dtype=float)
        flags = np.zeros(energies.size, dtype=int)
    lines = [_CSV_VERSION, "E,residual,pole_flag"]
    lines += ["{:.11e},{:.11e},{}".format(e, r, f)
              for e, r, f in zip(energies, residuals, flags)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_wavefunction(args) -> int:
    pot = _build_potential(args)
    m = _need(args, "mass", 1.0)
    n = _need(args, "n", 0)
    norm = _need(args, "norm", "l2")
    if _need(args, "fmt", "csv") != "csv":
        raise InvalidParameter("wavefunction output is CSV only")
    if args.potential == "power-exp":
        state = closedform.powerexp_state(n, pot.b, pot.q, m)
        half_width = _need(args, "L", 10.0 * pot.q)
        grid = np.linspace(0.0, half_width, _need(args, "grid", 2401))
        wf = closedform.powerexp_wavefunction(state, grid)
    else:
        pairs = _solve_spectrum(args, pot, m)
        if n < 0 or n >= len(pairs):
            print(f"fv1d: level {n} not found ({len(pairs)} levels in window)",
                  file=sys.stderr)
            return 4
        solution, problem = pairs[n]
        if isinstance(problem, matchsolver.MatchingProblem):
            wf = matchsolver.build_wavefunction(problem, solution,
                                                _need(args, "grid", 2401))
        else:
            wf = shootsolver.build_wavefunction(problem, solution,
                                                _need(args, "grid", 2401))
    if norm == "charge":
        wf = fvcore.normalize(wf, pot, mode="charge")
    spinor = fvcore.reconstruct_spinor(wf, pot)
    ratio = np.ma.filled(fvcore.component_ratio(spinor), math.nan)
    cols = [wf.grid,
            np.real(wf.values), np.imag(wf.values),
            np.real(spinor.psi1), np.imag(spinor.psi1),
            np.real(spinor.psi2), np.imag(spinor.psi2),
            np.real(spinor.rho), np.real(spinor.f), ratio]
    lines = [_CSV_VERSION, _WF_COLUMNS]
    lines += [",".join(f"{float(c[i]):.11e}" for c in cols)
              for i in range(wf.grid.size)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_nrlimit(args) -> int:
    alphas = _float_list(_need(args, "alpha"), "--alpha")
    masses = _float_list(_need(args, "mass"), "--mass")
    n = _need(args, "n", 0)
    jobs = [(a, m) for a in alphas for m in masses]
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        futures = [pool.submit(closedform.nr_limit_compare, n, a, [m])
                   for a, m in jobs]
        results = [f.result()[0] for f in futures]
    lines = [_CSV_VERSION, "alpha,m,E_rel,E_nr,gap"]
    lines += ["{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}".format(
        c.alpha, c.m, c.E_relativistic, c.E_nonrel, c.gap) for c in results]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_oracle_check(args) -> int:
    pot = _build_potential(args)
    m = _need(args, "mass", 1.0)
    if args.potential == "power-exp":
        raise InvalidParameter(
            "oracle-check does not apply to the closed-form family")
    tol = _need(args, "tol", 1e-5)
    lo, hi = _window(args, m)
    if getattr(args, "L", None) is not None:
        dom = (-args.L, args.L)
    else:
        dom = potentials.domain(pot, energy=0.5 * (lo + hi), mass=m)
    cfg = oracle.OracleConfig(grid_points=_need(args, "grid", 40000),
                              domain=dom, window=(lo, hi))
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        fut_oracle = pool.submit(oracle.oracle_spectrum, pot, m, cfg)
        fut_primary = pool.submit(_solve_spectrum, args, pot, m)
        oracle_energies = fut_oracle.result()
        primary = [sol.energy for sol, _ in fut_primary.result()]
    rows = []
    ok = len(primary) == len(oracle_energies)
    for i in range(max(len(primary), len(oracle_energies))):
        p = primary[i] if i < len(primary) else None
        o = oracle_energies[i] if i < len(oracle_energies) else None
        gap = abs(p - o) if p is not None and o is not None else None
        if gap is None or not gap < tol:
            ok = False
        rows.append({"primary": p, "oracle": o, "gap": gap})
    payload = {"count_primary": len(primary),
               "count_oracle": len(oracle_energies),
               "tol": tol, "agree": ok, "levels": rows}
    if not args.no_manifest:
        payload["manifest"] = _manifest(args, "oracle-check")
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if ok else 5


_DISPATCH = {
    "solve": _cmd_solve,
    "scan": _cmd_scan,
    "wavefunction": _cmd_wavefunction,
    "nrlimit": _cmd_nrlimit,
    "oracle-check": _cmd_oracle_check,
}


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _float_list(text, flag: str):
    try:
        values = [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidParameter(f"{flag}: {exc}") from None
    if not values:
        raise InvalidParameter(f"{flag}: empty list")
    return values


def _thread_count() -> int:
    raw = os.environ.get("FV1D_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise InvalidParameter(f"FV1D_THREADS must be an integer, got {raw!r}")
        if n < 1:
            raise InvalidParameter("FV1D_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _manifest(args, command: str) -> dict:
    pot_keys = ("potential", "alpha", "beta", "delta", "b", "q", "v0", "d",
                "big_r", "a")
    solver_keys = ("mass", "parity", "emin", "emax", "grid", "ode_tol", "norm",
                   "boundary", "L", "n", "n_max", "tol")
    pick = lambda keys: {k: getattr(args, k) for k in keys
                         if getattr(args, k, None) is not None}
    return {"command": command,
            "potential": pick(pot_keys),
            "solver": pick(solver_keys),
            "version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc)
                         .isoformat(timespec="seconds")}


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fv1d-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out_path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


if __name__ == "__main__":
    sys.exit(main())
