"""Command line front end emitting reproducible JSON/CSV artifacts.

Six subcommands: ground-state, psi, constants, beta-table, phi-scan,
energy-check.  Every artifact starts with a provenance block (package
version, grid parameters, seed) and is byte-identical across reruns with
the same flags.  Ground states are cached under a content-addressed
directory keyed by the solver inputs, so repeated commands skip the
expensive solve; cached and fresh runs serialize to the same bytes.

Failures exit nonzero with a single JSON object {"error": <class>,
"detail": <message>} on stdout.  A scan without interior critical points
is reported as a warning, not an error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constants import (
    beta_table,
    compute_constants,
    gamma,
    product_exponent,
    table_csv,
)
from .correction import correction_profiles, verify_L0_identities
from .energy import (
    PeakConfig,
    admissible,
    build_W,
    build_Y,
    energy_coefficient_fit,
    expansion_compare,
    loglog_slope,
    residual_norm,
    residual_slopes,
)
from .geometry import (
    FlatSpace,
    NoInteriorCritical,
    RoundSphere,
    WarpedSphere,
    phi,
    scan_phi,
)
from .groundstate import GroundState, identity_report, solve_ground_state

# solver settings mirrored into cache keys and provenance
_SOLVER = {"tol": 1e-13, "n_nodes": 4000, "r_cap": 60.0}

_DEF_EPS = "0.1,0.07,0.05,0.035"
_DEF_CACHE = "~/.cache/multipeak"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _dump(payload: dict) -> str:
    return json.dumps(_jsonable(payload), indent=2) + "\n"


def _provenance(args, **grid) -> dict:
    return {
        "version": __version__,
        "grid": {**_SOLVER, **grid},
        "seed": getattr(args, "seed", 0),
    }


def _flat_provenance(args, **grid) -> dict:
    prov = _provenance(args, **grid)
    flat = {"version": prov["version"], "seed": prov["seed"]}
    for k, v in sorted(prov["grid"].items()):
        flat[f"grid_{k}"] = v
    return flat


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _resolve_exponent(args) -> tuple:
    """(n, p, m) from --n with either --m or --p."""
    if args.n is None:
        raise ValueError("--n is required")
    n = int(args.n)
    if args.m is not None and args.p is not None:
        raise ValueError("give either --m or --p, not both")
    if args.m is not None:
        m = int(args.m)
        return n, product_exponent(n, m), m
    if args.p is not None:
        return n, float(args.p), None
    raise ValueError("give --m or --p")


def _cache_dir(args) -> Path:
    raw = args.cache_dir or os.environ.get("MULTIPEAK_CACHE_DIR", _DEF_CACHE)
    return Path(raw).expanduser()


def cached_ground_state(n: int, p: float, cache: Path) -> GroundState:
    """Solve or load the ground state, content-addressed by solver inputs."""
    key_src = json.dumps(
        {"n": n, "p": repr(p), "solver": _SOLVER, "version": __version__},
        sort_keys=True,
    )
    key = hashlib.sha256(key_src.encode()).hexdigest()[:24]
    path = cache / f"gs-{key}.json"
    if path.exists():
        return GroundState.load(path)
    gs = solve_ground_state(n, p, **_SOLVER)
    cache.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    gs.save(tmp)
    os.replace(tmp, path)
    return gs


# ------------------------------------------------------------- subcommands


def cmd_ground_state(args) -> int:
    n, p, m = _resolve_exponent(args)
    gs = cached_ground_state(n, p, _cache_dir(args))
    payload = {
        "provenance": _provenance(args),
        "n": n,
        "p": p,
        "m": m,
        "record": gs.to_dict(),
        "identity_report": identity_report(gs),
    }
    _emit(_dump(payload), args.out)
    return 0


def cmd_psi(args) -> int:
    n, p, m = _resolve_exponent(args)
    gs = cached_ground_state(n, p, _cache_dir(args))
    cp = correction_profiles(gs)
    payload = {
        "provenance": _provenance(args),
        "n": n,
        "p": p,
        "m": m,
        "correction": cp.to_dict(),
        "identity_report": verify_L0_identities(gs),
    }
    _emit(_dump(payload), args.out)
    return 0


def cmd_constants(args) -> int:
    if args.n is None or args.m is None:
        raise ValueError("constants needs --n and --m")
    n, m = int(args.n), int(args.m)
    gs = cached_ground_state(n, product_exponent(n, m), _cache_dir(args))
    cp = correction_profiles(gs)
    dc = compute_constants(gs, cp, m)
    rng = np.random.default_rng(args.seed)
    vals = []
    for _ in range(10):
        b = rng.standard_normal(n)
        vals.append(gamma(gs, b / np.linalg.norm(b)).value)
    vals = np.asarray(vals)
    payload = {
        "provenance": _provenance(args),
        "constants": dc.row(),
        "gamma": {
            "directions": 10,
            "mean": float(vals.mean()),
            "spread": float(np.ptp(vals) / abs(vals.mean())),
        },
    }
    _emit(_dump(payload), args.out)
    return 0


def cmd_beta_table(args) -> int:
    max_N = int(args.max_N)
    if max_N < 6:
        raise ValueError("--max-N must be at least 6")
    cache = _cache_dir(args)
    pairs = [
        (n, m)
        for n in range(3, max_N - 2)
        for m in range(3, max_N - 2)
        if n + m <= max_N
    ]
    rows = []
    for n, m in pairs:
        gs = cached_ground_state(n, product_exponent(n, m), cache)
        rows.append(compute_constants(gs, correction_profiles(gs), m))
    _emit(table_csv(rows, provenance=_flat_provenance(args, max_N=max_N)), args.out)
    return 0


def _load_warp_profile(path: str):
    data = np.loadtxt(path, delimiter=",", comments="#")
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError("warp profile csv needs two columns: t, f")
    return data[:, 0], data[:, 1]


def _scan_model(args):
    name = (args.model or "sphere").lower()
    n = int(args.n)
    if name in ("sphere", "round", "roundsphere"):
        return RoundSphere(n, 1.0)
    if name in ("warped", "warpedsphere"):
        if not args.profile:
            raise ValueError("warped model needs --profile <csv>")
        t, f_vals = _load_warp_profile(args.profile)
        return WarpedSphere.from_samples(n, t, f_vals)
    raise ValueError(f"unknown model {args.model!r}; use sphere or warped")


def cmd_phi_scan(args) -> int:
    if args.n is None or args.m is None:
        raise ValueError("phi-scan needs --n and --m")
    n, m = int(args.n), int(args.m)
    model = _scan_model(args)
    gs = cached_ground_state(n, product_exponent(n, m), _cache_dir(args))
    dc = compute_constants(gs, correction_profiles(gs), m)
    warning = None
    try:
        scan = scan_phi(model, dc)
    except NoInteriorCritical as e:
        warning = f"NoInteriorCritical: {e}"
        scan = e.scan

    lines = []
    prov = _flat_provenance(args, resolution=len(scan.t), model=type(model).__name__)
    for key in sorted(prov):
        lines.append(f"# {key}: {prov[key]}")
    lines.append("t,s,lap_s,ric2,riem2,phi")
    for t, pv in zip(scan.t, scan.phi):
        cp = model.curvature_at(t) if not isinstance(model, RoundSphere) \
            else model.curvature_at()
        cells = (t, cp.s, cp.lap_s, cp.ric2, cp.riem2, pv)
        lines.append(",".join(repr(float(c)) for c in cells))
    csv_text = "\n".join(lines) + "\n"

    points = {
        "provenance": _provenance(args, resolution=len(scan.t)),
        "model": type(model).__name__,
        "warning": warning,
        "points": [
            {"t": c.t, "phi": c.phi, "kind": c.kind} for c in scan.points
        ],
    }
    if args.out:
        _emit(csv_text, args.out)
        stem = Path(args.out)
        _emit(_dump(points), stem.with_suffix(".points.json"))
    else:
        sys.stdout.write(csv_text)
        sys.stdout.write(_dump(points))
    return 0


def _energy_model(args):
    name = (args.model or "sphere").lower()
    n = int(args.n)
    if name in ("sphere", "round", "roundsphere"):
        return RoundSphere(n, 1.0)
    if name in ("flat", "flatspace"):
        return FlatSpace(n)
    raise ValueError(f"unknown model {args.model!r}; use sphere or flat")


def _default_centers(model, K: int):
    if isinstance(model, FlatSpace):
        if K != 1:
            raise ValueError("flat runs support K=1 only")
        return [np.zeros(model.n)]
    base = 0.8
    if K == 1:
        return [model.point(base)]
    return [model.point(base), model.point(base + 0.6)]


def cmd_energy_check(args) -> int:
    if args.n is None or args.m is None:
        raise ValueError("energy-check needs --n and --m")
    n, m = int(args.n), int(args.m)
    K = int(args.K)
    if K not in (1, 2):
        raise ValueError("--K must be 1 or 2")
    eps_ladder = tuple(float(e) for e in args.eps.split(","))
    if not eps_ladder or any(e <= 0 for e in eps_ladder):
        raise ValueError("--eps needs positive comma-separated values")
    model = _energy_model(args)
    cache = _cache_dir(args)
    gs = cached_ground_state(n, product_exponent(n, m), cache)
    cp = correction_profiles(gs)
    dc = compute_constants(gs, cp, m)
    centers = _default_centers(model, K)
    gamma_value = None
    if K >= 2:
        e1 = np.zeros(n)
        e1[0] = 1.0
        gamma_value = gamma(gs, e1).value

    per_eps = []
    rem_abs = []
    for eps in eps_ladder:
        config = PeakConfig(epsilon=eps, centers=list(centers), cutoff_r=1.2)
        ok, margin = admissible(model, config, gs, rho=args.rho)
        bd = expansion_compare(model, config, gs, cp, dc, gamma_value=gamma_value)
        res_w = residual_norm(model, build_W(model, config, gs, c_bold=dc.c_bold))
        res_y = residual_norm(model, build_Y(model, config, gs, profiles=cp, dc=dc))
        rem_abs.append(abs(bd.remainder))
        per_eps.append(
            {
                "epsilon": eps,
                "admissible": bool(ok),
                "margin": margin,
                "breakdown": bd.as_dict(),
                "residual_W": res_w,
                "residual_Y": res_y,
                "remainder_over_eps4": bd.remainder / eps ** 4,
            }
        )

    slopes = residual_slopes(
        model, gs, cp, dc, center=centers[0], eps_ladder=eps_ladder
    )
    rem_slope, rem_r2 = loglog_slope(eps_ladder, rem_abs)
    payload = {
        "provenance": _provenance(args, eps_ladder=list(eps_ladder)),
        "model": type(model).__name__,
        "n": n,
        "m": m,
        "K": K,
        "per_eps": per_eps,
        "residual_slopes": slopes,
        "remainder_slope": rem_slope,
        "remainder_r2": rem_r2,
    }
    if K == 1:
        # three basis terms; fewer than 4 rungs makes the fit meaningless
        if len(eps_ladder) >= 4:
            fit = energy_coefficient_fit(
                model, gs, cp, dc, center=centers[0], eps_ladder=eps_ladder
            )
            s_val = model.curvature_at(centers[0]).s
            payload["coefficient_fit"] = fit
            payload["predicted"] = {
                "eps2_coeff": 0.5 * dc.beta * s_val,
                "eps4_phi": phi(model.curvature_at(centers[0]), dc),
            }
        else:
            payload["note"] = "coefficient fit skipped: needs >= 4 epsilon values"
    _emit(_dump(payload), args.out)
    return 0


# ------------------------------------------------------------- dispatcher


def _add_common(sp):
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.add_argument("--cache-dir", dest="cache_dir")
    sp.add_argument("--config")


# flags left unset by both the command line and the config file
_FALLBACKS = {"seed": 0, "eps": _DEF_EPS, "model": "sphere", "K": 1, "max_N": 9}


def _finalize(args):
    for key, value in _FALLBACKS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    args.seed = int(args.seed)
    if hasattr(args, "K"):
        args.K = int(args.K)
    if hasattr(args, "max_N"):
        args.max_N = int(args.max_N)
    return args


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="multipeak",
        description="ground states, curvature corrections, and peak energetics",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ground-state", help="solve and serialize one ground state")
    _add_common(sp)
    sp.set_defaults(func=cmd_ground_state)

    sp = sub.add_parser("psi", help="second-order correction profiles")
    _add_common(sp)
    sp.set_defaults(func=cmd_psi)

    sp = sub.add_parser("constants", help="dimensional constants for one (n, m)")
    _add_common(sp)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("beta-table", help="constants table over n+m <= max-N")
    _add_common(sp)
    sp.add_argument("--max-N", dest="max_N", type=int)
    sp.set_defaults(func=cmd_beta_table)

    sp = sub.add_parser("phi-scan", help="concentration functional along a model")
    _add_common(sp)
    sp.add_argument("--model")
    sp.add_argument("--profile", help="warp profile csv (t, f)")
    sp.set_defaults(func=cmd_phi_scan)

    sp = sub.add_parser("energy-check", help="energy expansion and residual report")
    _add_common(sp)
    sp.add_argument("--model")
    sp.add_argument("--eps")
    sp.add_argument("--K", dest="K", type=int)
    sp.add_argument("--rho", type=float, default=None,
                    help="placement radius for the admissibility check")
    sp.set_defaults(func=cmd_energy_check)
    return ap


def _apply_config(args):
    """Fill unset flags from a key=value file; flags always win."""
    if not getattr(args, "config", None):
        return args
    pairs = {}
    for raw in Path(args.config).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        k, v = line.split("=", 1)
        pairs[k.strip().replace("-", "_")] = v.strip()
    for key, value in pairs.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args = _finalize(_apply_config(args))
        return args.func(args)
    except Exception as e:  # noqa: BLE001 - every failure becomes one json object
        sys.stdout.write(_dump({"error": type(e).__name__, "detail": str(e)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
