"""Command-line entry points: per-module checks, experiments, and the suite runner.

Subcommands: green, verify-potential, charges, spinwave-check, taylor-check,
simulate, growth, limits-check, suite.  Outputs are deterministic for a fixed
seed (sorted JSON keys, no timestamps); exit code 1 flags a scientific
assertion failure, 2 an IO/configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import charges, lattice, limits, potential, renorm, sampler, spinwave, svgplot


class ConfigError(Exception):
    pass


def _out_path(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _write_json(args, name: str, payload) -> str:
    path = _out_path(args, name)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1, default=float)
        fh.write("\n")
    return path


def _write_csv(args, name: str, header: list, rows: list) -> str:
    path = _out_path(args, name)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")
    return path


def _load_domain(args) -> lattice.Domain:
    if args.domain:
        with open(args.domain) as fh:
            return lattice.Domain([tuple(p) for p in json.load(fh)])
    return lattice.Domain.box(args.box)


# -- subcommands ---------------------------------------------------------

def cmd_green(args) -> int:
    dom = _load_domain(args)
    if args.f:
        with open(args.f) as fh:
            f = lattice.SiteVector(dom, np.asarray(json.load(fh), dtype=float))
    else:
        f = lattice.SiteVector.delta(dom, (0, 0))
    sigma = lattice.solve_green(dom, f, args.tol)
    lap = lattice.laplacian_apply(dom, sigma)
    residual = float(np.linalg.norm(lap.values - f.values))
    _write_json(args, "green.json", {
        "sigma": sigma.values.tolist(),
        "quadratic_form": f.dot(sigma),
        "residual": residual,
    })
    return 0


def cmd_verify_potential(args) -> int:
    spec = potential.PotentialSpec("psos", p=args.p, beta=args.beta)
    ext = potential.Extension(spec, series_tol=args.tol)
    x_max, x_step = args.grid_x
    if args.grid_a:
        a_vals = args.grid_a
    else:
        _, a_vals = potential.default_grid(ext.eps_beta, x_max, x_step)
    x = np.arange(-x_max, x_max + 0.5 * x_step, x_step)
    rep = potential.verify_assumptions(ext, x, a_vals)
    _write_json(args, "assumptions.json", {
        "p": args.p, "beta": args.beta,
        "c_beta_fit": rep.c_beta_fit, "c_beta_prime_fit": rep.c_beta_prime_fit,
        "max_ratio_violation": rep.max_ratio_violation,
        "stats": rep.stats, "grid": rep.grid,
        "series_window": ext.series_window, "series_tail": ext.achieved_tail,
    })
    rows = []
    lv = ext.log_eval(x.astype(complex))
    for a in a_vals:
        ratios = np.real(ext.log_eval(x + 1j * a) - lv) / potential.g_profile(a)
        rows.extend([(float(xx), float(a), float(r)) for xx, r in zip(x, ratios)])
    _write_csv(args, "assumption_ratios.csv", ["x", "a", "ratio"], rows)
    return 0


def cmd_charges(args) -> int:
    dom = lattice.Domain.box(args.box)
    with open(args.rho) as fh:
        rho = charges.ChargeDensity({(x, y): q for x, y, q in json.load(fh)})
    sc = charges.sc_lambda(dom, rho, args.M, args.alpha)
    cover = charges.square_cover(rho, args.k)
    payload = {
        "d_lambda": charges.d_lambda(dom, rho),
        "sc_lambda": sc,
        "A_lambda": charges.a_lambda(dom, rho, args.M, args.alpha),
        "cover_k": {"k": args.k, "squares": [list(s) for s in cover.squares],
                    "minimal": cover.minimal},
        "sep_squares": {str(k): [list(s) for s in
                                 charges.sep_squares(dom, rho, k, args.M, args.alpha)]
                        for k in range(1, sc + 1)},
        "centre": list(charges.centre(dom, rho)),
    }
    _write_json(args, "charges.json", payload)
    return 0


def cmd_spinwave_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    dom = lattice.Domain.box(args.box)
    params = spinwave.EnergyParams(c_beta=args.c_beta, gamma_beta=args.gamma)
    min_ratio = math.inf
    max_grad = 0.0
    max_norm = 0.0
    n_charges = 0
    first_wave = None
    for _ in range(args.ensembles):
        ens = charges.random_ensemble(dom, rng, args.M, args.alpha, args.charges)
        rep = spinwave.energy_bound_check(ens, dom, params)
        if rep["rows"]:
            min_ratio = min(min_ratio, rep["min_ratio"])
            max_norm = max(max_norm, rep["max_norm_ratio"])
            n_charges += len(rep["rows"])
        if first_wave is None and ens.charges:
            asm = spinwave.assemble(ens.charges[0], ens, dom, args.gamma)
            first_wave = asm.wave
            max_grad = asm.wave.max_edge_gradient()
    payload = {"ensembles": args.ensembles, "charges": n_charges,
               "min_energy_ratio": min_ratio, "max_edge_gradient": max_grad,
               "max_norm_ratio": max_norm, "gamma": args.gamma}
    _write_json(args, "spinwave.json", payload)
    if args.svg and first_wave is not None:
        vals = {s: first_wave.value(*s) for s in first_wave.nonzero_sites()}
        svgplot.heatmap(vals, _out_path(args, "spinwave.svg"), title="spin wave")
    return 0 if min_ratio > 0 else 1


def cmd_taylor_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    ext = potential.Extension(potential.PotentialSpec("psos", p=args.p, beta=args.beta),
                              series_tol=1e-6)
    rep = potential.verify_assumptions(
        ext, np.arange(-10.0, 10.5, 1.0), [0.5, min(2.0, args.gamma), args.gamma])
    c_beta = rep.c_beta_fit
    dom = lattice.Domain.box(args.box)
    rows = []
    failures = 0
    for i in range(args.instances):
        ens = charges.random_ensemble(dom, rng, args.M, args.alpha, 1)
        if not ens.charges:
            continue
        rho = ens.charges[0]
        asm = spinwave.assemble(rho, ens, dom, args.gamma)
        energy = spinwave.energy(rho, asm.wave,
                                 spinwave.EnergyParams(c_beta, args.gamma))
        act = renorm.renorm_activity(renorm.synthetic_K(rho, asm.a_value), energy)
        z = act.z if abs(act.z) <= 0.125 else math.copysign(0.125, act.z)
        inst = renorm.TaylorInstance(
            rho, asm.wave,
            lattice.SiteVector(dom, rng.uniform(-5, 5, dom.n)),
            lattice.SiteVector(dom, rng.normal(0, 0.05, dom.n)),
            lattice.SiteVector(dom, rng.normal(0, 0.05, dom.n)),
            lattice.SiteVector(dom, rng.uniform(0, 1, dom.n)), z)
        res = renorm.taylor_check(inst, ext, c_beta)
        slack = res["r_bound"] - res["err"]
        rows.append((i, res["lhs"], res["S"], res["r_bound"], slack))
        failures += 0 if res["pass"] else 1
    _write_csv(args, "taylor.csv", ["instance", "lhs", "S", "bound", "slack"], rows)
    return 0 if failures == 0 else 1


def _parse_tilt(text):
    if not text:
        return None
    ux, uy = (float(v) for v in text.split(","))
    return (ux, uy)


def cmd_simulate(args) -> int:
    dom = lattice.Domain.box(args.box)
    rng = np.random.default_rng(args.seed)
    if args.zeta_mode == "zero":
        zeta = None
    elif args.zeta_mode == "random":
        zeta = rng.random(dom.n)
    elif args.zeta_mode == "antisym":
        zeta = sampler.antisymmetric_zeta(dom, rng)
    else:
        raise ConfigError("zeta-mode must be zero|random|antisym")
    spec = sampler.ModelSpec(potential.PotentialSpec("psos", p=args.p, beta=args.beta),
                             dom, tilt=_parse_tilt(args.tilt), zeta=zeta)
    obs = {"phi0": lattice.SiteVector.delta(dom, (0, 0))}
    stats = sampler.run_chain(spec, obs, args.sweeps, args.burn_in, args.seed,
                              n_chains=args.chains)
    rows = []
    for name, ob in stats.observables.items():
        rows.append((args.box, name, ob["mean"], ob["var"], ob["se_var"], ob["tau_int"]))
    _write_csv(args, args.out or "simulate.csv",
               ["N", "observable", "mean", "var", "se", "tau_int"], rows)
    return 0


def cmd_growth(args) -> int:
    res = sampler.variance_growth_experiment(
        args.p, args.beta, _parse_tilt(args.tilt), args.sizes,
        sweeps=args.sweeps, burn_in=args.burn_in, n_chains=args.chains,
        seed=args.seed)
    rows = [(r["N"], r["var"], r["se"], r["green"], r["tau_int"]) for r in res["rows"]]
    _write_csv(args, "growth.csv", ["N", "var", "se", "green", "tau_int"], rows)
    _write_json(args, "growth.json", {k: v for k, v in res.items() if k != "rows"})
    svgplot.line_plot(
        [{"x": [2 * r["N"] + 1 for r in res["rows"]],
          "y": [r["var"] for r in res["rows"]],
          "err": [3 * r["se"] for r in res["rows"]], "label": "Var(phi_0)"}],
        _out_path(args, "growth.svg"), logx=True,
        title=f"variance growth p={args.p} beta={args.beta}",
        xlabel="ln(2N+1)", ylabel="variance")
    return 0


def cmd_limits_check(args) -> int:
    if args.which == "comb":
        ext = potential.Extension(potential.PotentialSpec("psos", p=1.0, beta=1.0),
                                  series_tol=1e-6)

        def f(x):
            return np.real(ext.eval(np.asarray(x, dtype=complex))) * np.exp(-x * x)

        rows = limits.comb_convergence(f, args.N or [1, 2, 4, 8, 200])
        _write_csv(args, "comb.csv", ["N", "integral", "target", "error"],
                   [(r["N"], r["integral"], r["target"], r["error"]) for r in rows])
        ok = all(rows[i]["error"] <= rows[i - 1]["error"] + 1e-12
                 for i in range(1, len(rows)))
        return 0 if ok else 1
    if args.which == "translate":
        ext = potential.Extension(potential.PotentialSpec("psos", p=args.p, beta=args.beta),
                                  series_tol=1e-5)
        shifts = [[0.3], [0.25, -0.2], [0.2, -0.1, 0.25]]
        rows = []
        worst = 0.0
        for a in shifts:
            res = limits.complex_translation_check(ext, a, L=7.0, panel=1.4, order=16)
            rel = res["diff"] / abs(res["lhs"])
            worst = max(worst, rel)
            rows.append((len(a), repr(a), res["lhs"].real, res["diff"], rel))
        _write_csv(args, "translate.csv", ["n", "a", "lhs", "diff", "rel"], rows)
        return 0 if worst <= 1e-6 else 1
    if args.which == "bridge":
        spec = potential.PotentialSpec("psos", p=args.p, beta=args.beta)
        rows = limits.regularized_weight_bridge(spec, [1.0, 0.1, 0.01, 0.001, 0.0])
        _write_csv(args, "bridge.csv", ["eps", "value", "window"],
                   [(r["eps"], r["value"], r["window"]) for r in rows])
        ref = rows[-1]["value"]
        gaps = [abs(r["value"] - ref) for r in rows[:-1]]
        ok = all(gaps[i + 1] <= gaps[i] + 1e-12 for i in range(len(gaps) - 1))
        return 0 if ok else 1
    raise ConfigError(f"unknown limits check {args.which!r}")


# -- suite ----------------------------------------------------------------

def _suite_potential_interpolation(params, seed):
    worst = 0.0
    for p in params.get("p", [0.5, 1.0, 1.5, 2.0]):
        for beta in params.get("beta", [0.1, 0.5, 1.0]):
            spec = potential.PotentialSpec("psos", p=p, beta=beta)
            ext = potential.Extension(spec)
            n = np.arange(-50, 51)
            vals = ext.eval(n.astype(complex))
            ws = np.array([potential.weight(spec, int(k)) for k in n])
            worst = max(worst, float(np.max(np.abs(vals - ws))))
    return worst <= params.get("tol", 1e-9), {"max_interp_error": worst}


def _suite_gamma_regime(params, seed):
    ext = potential.Extension(
        potential.PotentialSpec("psos", p=params.get("p", 1.0), beta=params["beta"]),
        series_tol=1e-6)
    x, a = potential.default_grid(ext.eps_beta, x_max=20.0, x_step=1.0)
    rep = potential.verify_assumptions(ext, x, a)
    gp = potential.gamma_params(ext, rep, params.get("C4", 1.0),
                                c=params.get("c", 0.2), C3=params.get("C3", 1.0))
    return bool(gp["satisfied"]), {"gamma_beta": gp["gamma_beta"],
                                   "terms": list(gp["terms"]),
                                   "c_beta_fit": rep.c_beta_fit}


def _suite_cover_oracle(params, seed):
    rng = np.random.default_rng(seed)
    from itertools import combinations
    trials = params.get("trials", 50)
    for _ in range(trials):
        pts = {(int(rng.integers(-8, 9)), int(rng.integers(-8, 9)))
               for _ in range(int(rng.integers(1, 7)))}
        rho = charges.ChargeDensity({p: 1 for p in pts})
        k = int(rng.integers(0, 3))
        mine = len(charges.square_cover(rho, k))
        side = 1 << k
        cands = [c for c, _ in charges._candidate_corners(sorted(pts), side)]
        best = None
        for r in range(1, len(pts) + 1):
            for combo in combinations(cands, r):
                if all(any(charges._covers(c, side, p) for c in combo) for p in pts):
                    best = r
                    break
            if best is not None:
                break
        if mine != best:
            return False, {"support": sorted(pts), "k": k, "mine": mine, "brute": best}
    return True, {"trials": trials}


def _suite_lattice_green(params, seed):
    rng = np.random.default_rng(seed)
    import scipy.linalg as sla
    worst = 0.0
    for _ in range(params.get("trials", 20)):
        N = int(rng.integers(1, 4))
        dom = lattice.Domain.box(N)
        f = lattice.SiteVector(dom, rng.normal(size=dom.n))
        sg = lattice.solve_green(dom, f, 1e-12)
        dense = sla.solve(dom.laplacian_matrix().toarray(), f.values)
        worst = max(worst, float(np.max(np.abs(sg.values - dense))))
    return worst <= params.get("tol", 1e-8), {"max_cg_vs_dense": worst}


def _suite_spinwave(params, seed):
    rng = np.random.default_rng(seed)
    dom = lattice.Domain.box(params.get("box", 24))
    gamma = params.get("gamma", 1.0)
    pr = spinwave.EnergyParams(c_beta=params.get("c_beta", 1e-8), gamma_beta=gamma)
    min_ratio = math.inf
    for _ in range(params.get("ensembles", 20)):
        ens = charges.random_ensemble(dom, rng, params.get("M", 16), 1.75, 3)
        rep = spinwave.energy_bound_check(ens, dom, pr)
        if rep["rows"]:
            min_ratio = min(min_ratio, rep["min_ratio"])
    return min_ratio > 0, {"min_energy_ratio": min_ratio}


_SUITE_REGISTRY = {
    "potential.interpolation": _suite_potential_interpolation,
    "potential.gamma-regime": _suite_gamma_regime,
    "charges.cover-oracle": _suite_cover_oracle,
    "lattice.green-oracle": _suite_lattice_green,
    "spinwave.energy": _suite_spinwave,
}


def run_suite(config: dict, out_dir: str, threads: int = 1) -> int:
    allowed = {"seed", "items", "label"}
    unknown = set(config) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    seed = config.get("seed")
    items = config.get("items", [])
    if seed is None and items:
        raise ConfigError("suite configs must pin a seed")
    jobs = []
    for it in items:
        if set(it) - {"name", "params"}:
            raise ConfigError(f"unknown item keys in {it}")
        if it["name"] not in _SUITE_REGISTRY:
            raise ConfigError(f"unknown check {it['name']!r}")
        jobs.append((it["name"], it.get("params", {})))

    results = []

    def run_one(job):
        name, params = job
        t0 = time.time()
        ok, details = _SUITE_REGISTRY[name](params, seed)
        return {"name": name, "status": "pass" if ok else "fail",
                "seconds": round(time.time() - t0, 3), "details": details}

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, jobs))
    else:
        results = [run_one(j) for j in jobs]

    constants = {}
    for r in results:
        for key in ("c_beta_fit", "min_energy_ratio", "beta_eff_fit"):
            if key in r["details"]:
                constants[f"{r['name']}.{key}"] = r["details"][key]
    manifest = {"seed": seed, "items": results, "constants": constants}
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1, default=float)
        fh.write("\n")
    failed = [r["name"] for r in results if r["status"] != "pass"]
    if failed:
        print("FAILED checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def cmd_suite(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    return run_suite(config, args.out_dir, threads=args.threads)


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="soslab")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("green", help="Dirichlet Green solve")
    g.add_argument("--box", type=int, default=8)
    g.add_argument("--domain")
    g.add_argument("--f")
    g.add_argument("--tol", type=float, default=1e-10)
    g.set_defaults(func=cmd_green)

    vp = sub.add_parser("verify-potential", help="strip-extension assumption fits")
    vp.add_argument("--p", type=float, default=1.0)
    vp.add_argument("--beta", type=float, default=0.5)
    vp.add_argument("--grid-x", type=lambda s: tuple(float(v) for v in s.split(",")),
                    default=(40.0, 0.25), metavar="MAX,STEP")
    vp.add_argument("--grid-a", type=lambda s: [float(v) for v in s.split(",")],
                    default=None)
    vp.add_argument("--tol", type=float, default=1e-8)
    vp.set_defaults(func=cmd_verify_potential)

    c = sub.add_parser("charges", help="charge-density combinatorics")
    c.add_argument("--rho", required=True)
    c.add_argument("--box", type=int, default=16)
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--M", type=int, default=charges.DEFAULT_M)
    c.add_argument("--alpha", type=float, default=charges.DEFAULT_ALPHA)
    c.set_defaults(func=cmd_charges)

    sw = sub.add_parser("spinwave-check", help="spin-wave property sweep")
    sw.add_argument("--ensembles", type=int, default=20)
    sw.add_argument("--charges", type=int, default=3)
    sw.add_argument("--box", type=int, default=24)
    sw.add_argument("--M", type=int, default=16)
    sw.add_argument("--alpha", type=float, default=1.75)
    sw.add_argument("--gamma", type=float, default=1.0)
    sw.add_argument("--beta", type=float, default=1e-8)
    sw.add_argument("--c-beta", type=float, default=1e-8)
    sw.add_argument("--p", type=float, default=1.0)
    sw.add_argument("--svg", action="store_true")
    sw.set_defaults(func=cmd_spinwave_check)

    tc = sub.add_parser("taylor-check", help="observable-ratio expansion checks")
    tc.add_argument("--instances", type=int, default=50)
    tc.add_argument("--p", type=float, default=1.0)
    tc.add_argument("--beta", type=float, default=1e-60)
    tc.add_argument("--gamma", type=float, default=12.0)
    tc.add_argument("--box", type=int, default=16)
    tc.add_argument("--M", type=int, default=16)
    tc.add_argument("--alpha", type=float, default=1.75)
    tc.set_defaults(func=cmd_taylor_check)

    sim = sub.add_parser("simulate", help="heat-bath sampling run")
    sim.add_argument("--p", type=float, default=1.0)
    sim.add_argument("--beta", type=float, default=0.1)
    sim.add_argument("--box", type=int, default=8)
    sim.add_argument("--tilt", default="")
    sim.add_argument("--zeta-mode", default="zero")
    sim.add_argument("--sweeps", type=int, default=2000)
    sim.add_argument("--burn-in", type=int, default=400)
    sim.add_argument("--chains", type=int, default=8)
    sim.add_argument("--out", default="")
    sim.set_defaults(func=cmd_simulate)

    gr = sub.add_parser("growth", help="variance-growth experiment")
    gr.add_argument("--p", type=float, default=1.0)
    gr.add_argument("--beta", type=float, default=0.1)
    gr.add_argument("--tilt", default="")
    gr.add_argument("--sizes", type=lambda s: [int(v) for v in s.split(",")],
                    default=[8, 16, 32])
    gr.add_argument("--sweeps", type=int, default=4000)
    gr.add_argument("--burn-in", type=int, default=800)
    gr.add_argument("--chains", type=int, default=32)
    gr.set_defaults(func=cmd_growth)

    lc = sub.add_parser("limits-check", help="comb/translation/bridge numerics")
    lc.add_argument("--which", choices=["comb", "translate", "bridge"], required=True)
    lc.add_argument("--p", type=float, default=1.0)
    lc.add_argument("--beta", type=float, default=0.5)
    lc.add_argument("--N", type=lambda s: [int(v) for v in s.split(",")], default=None)
    lc.set_defaults(func=cmd_limits_check)

    st = sub.add_parser("suite", help="run a named-check suite from a JSON config")
    st.add_argument("--config", required=True)
    st.set_defaults(func=cmd_suite)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    np.random.seed(args.seed % (2 ** 32))
    try:
        return args.func(args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config/io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
