"""Declarative experiment runner with reproducible seeds and reports.

Each run writes ``summary.json`` (resolved config echoed back, pass/fail,
key statistics) and ``detail.csv`` (one row per sample or orbit) into the
output directory.  Exit status is 0 iff every check in the run passed.
Configs are TOML (key-value with nested sections) or JSON files with the
same schema; see the repository README for the schema and examples.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:          # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from .actions import conjugate_action, perturb_action
from .errors import GShadowError, InputError
from .expansivity import dynamical_ball, mu_expansivity_report, separation_search
from .groups import FreeAbelian, cayley_ball, generating_set, reduce_word
from .models import BUILTIN_MODELS, build_model, freeabelian_diagonal_action
from .pseudo_orbits import (
    convert_generating_set,
    perturbed_orbit,
    transport_orbit,
)
from .shadowing import (
    check_persistence,
    shadow_diagonal_linear,
    shadow_generic,
)
from .stability import (
    build_H_window,
    build_semiconjugacy,
    extract_persistence_witness,
    singleton_H_from_map,
    verify_H_properties,
    verify_semiconjugacy,
)
from .uniformity import LebesgueMeasure, MetricEntourage, dmax

EXPERIMENTS = (
    "shadowing",
    "persistence",
    "expansivity",
    "mu-expansivity",
    "stability",
    "mu-stability",
    "genset-conversion",
    "conjugacy-transport",
)

DEFAULTS = {
    "ball_radius": 10,
    "oracle": {"cells": 64, "rounds": 4, "shrink": 8.0, "cross_check": False,
               "agreement_tol": 1e-6},
    "tolerances": {"residual": 1e-6, "volume_threshold": 1e-6,
                   "audit": 1e-9},
}


def load_config(path):
    path = Path(path)
    text = path.read_bytes()
    if path.suffix == ".toml":
        return tomllib.loads(text.decode())
    if path.suffix == ".json":
        return json.loads(text)
    # sniff: JSON starts with '{'
    stripped = text.decode().lstrip()
    if stripped.startswith("{"):
        return json.loads(stripped)
    return tomllib.loads(text.decode())


def resolve_config(raw):
    """Fill defaults and validate; returns the fully resolved config dict."""
    cfg = json.loads(json.dumps(raw))  # deep copy, JSON-typed
    if "experiment" not in cfg:
        raise InputError("config is missing 'experiment'")
    if cfg["experiment"] not in EXPERIMENTS:
        raise InputError(
            f"unknown experiment {cfg['experiment']!r}; one of {EXPERIMENTS}"
        )
    if "model" not in cfg or "name" not in cfg["model"]:
        raise InputError("config is missing model.name")
    if cfg["model"]["name"] not in BUILTIN_MODELS:
        raise InputError(f"unknown model {cfg['model']['name']!r}")
    cfg["model"].setdefault("params", {})
    cfg.setdefault("ball_radius", DEFAULTS["ball_radius"])
    if cfg["ball_radius"] < 0:
        raise InputError("ball_radius must be >= 0")
    for section, values in (("oracle", DEFAULTS["oracle"]),
                            ("tolerances", DEFAULTS["tolerances"])):
        cfg.setdefault(section, {})
        for key, val in values.items():
            cfg[section].setdefault(key, val)
    if "seed" not in cfg:
        raise InputError("config must set a seed (reproducibility is mandatory)")
    for key in ("entourages",):
        if key in cfg:
            for name, val in cfg[key].items():
                if not val > 0:
                    raise InputError(f"{key}.{name} must be positive")
    if "samples" in cfg:
        if cfg["samples"].get("count", 1) < 1:
            raise InputError("samples.count must be >= 1")
        if "box" not in cfg["samples"]:
            raise InputError("samples.box is required")
    return cfg


def _sample_points(cfg, rng, count=None):
    box = np.asarray(cfg["samples"]["box"], dtype=float)
    n = count if count is not None else int(cfg["samples"]["count"])
    return [rng.uniform(box[:, 0], box[:, 1]) for _ in range(n)]


def _fmt(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_fmt(x) for x in v)
    return str(v)


def write_reports(out_dir, cfg, passed, summary, detail_rows, fieldnames):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "config": cfg,
        "passed": bool(passed),
        "summary": summary,
        "version": __version__,
    }
    (out_dir / "summary.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    )
    with open(out_dir / "detail.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in detail_rows:
            writer.writerow({k: _fmt(row.get(k, "")) for k in fieldnames})


# ---------------------------------------------------------------------------
# experiment implementations


def _run_shadowing(cfg, rng):
    phi = build_model(cfg["model"]["name"], cfg["model"]["params"])
    ball = cayley_ball(phi.genset, int(cfg["ball_radius"]))
    eta = float(cfg["orbit"]["eta"])
    count = int(cfg["orbit"]["count"])
    bound = float(cfg["tolerances"].get(
        "radius_bound", eta * (1.0 + phi.max_lipschitz())
    ))
    oracle = cfg["oracle"]
    rows = []
    worst = 0.0
    worst_gap = 0.0
    all_pass = True
    xs = _sample_points(cfg, rng, count)
    for i, x in enumerate(xs):
        po = perturbed_orbit(phi, ball, x, eta, seed=rng)
        result = shadow_diagonal_linear(po, phi)
        ok = result.tracing_radius <= bound
        gap = ""
        if oracle["cross_check"]:
            bf = shadow_generic(po, phi, cells=int(oracle["cells"]),
                                rounds=int(oracle["rounds"]),
                                shrink=float(oracle["shrink"]))
            gap = dmax(result.point, bf.point)
            worst_gap = max(worst_gap, gap)
            ok = ok and gap <= float(oracle["agreement_tol"])
        all_pass = all_pass and ok
        worst = max(worst, result.tracing_radius)
        rows.append({
            "index": i, "x": list(x), "declared_eps": po.declared_epsilon,
            "realized_eps": po.realized_epsilon, "y": list(result.point),
            "radius": result.tracing_radius, "oracle_gap": gap, "pass": ok,
        })
    summary = {"max_radius": worst, "radius_bound": bound,
               "max_oracle_gap": worst_gap, "orbits": count}
    fields = ["index", "x", "declared_eps", "realized_eps", "y", "radius",
              "oracle_gap", "pass"]
    return all_pass, summary, rows, fields


def _run_persistence(cfg, rng):
    phi = build_model(cfg["model"]["name"], cfg["model"]["params"])
    psi, bound = perturb_action(
        phi, float(cfg["perturbation"]["amplitude"]),
        omega=cfg["perturbation"].get("omega", 1.0),
        seed=int(cfg["seed"]),
    )
    ball = cayley_ball(phi.genset, int(cfg["ball_radius"]))
    entourage = MetricEntourage(float(cfg["entourages"]["eps_E"]))
    samples = _sample_points(cfg, rng)
    report = check_persistence(phi, psi, ball, samples, entourage, bound)
    rows = [
        {"index": i, "x": list(r.x), "y": list(r.y), "radius": r.radius,
         "pass": r.passed}
        for i, r in enumerate(report.rows)
    ]
    summary = {"max_radius": report.max_radius, "epsilon": report.epsilon,
               "certified_bound": bound}
    return report.all_pass, summary, rows, ["index", "x", "y", "radius", "pass"]


def _run_expansivity(cfg, rng):
    phi = build_model(cfg["model"]["name"], cfg["model"]["params"])
    entourage = MetricEntourage(float(cfg["entourages"]["eps_D"]))
    count = int(cfg["samples"]["count"])
    rows = []
    all_found = True
    for i in range(count):
        x = _sample_points(cfg, rng, 1)[0]
        y = _sample_points(cfg, rng, 1)[0]
        if np.array_equal(x, y):
            continue
        cert = separation_search(phi, x, y, entourage,
                                 max_radius=int(cfg["ball_radius"]))
        found = cert is not None
        all_found = all_found and found
        rows.append({
            "index": i, "x": list(x), "y": list(y), "found": found,
            "word_length": cert.searched_radius if found else "",
            "distance": cert.attained_distance if found else "",
        })
    summary = {"pairs": len(rows), "all_separated": all_found}
    fields = ["index", "x", "y", "found", "word_length", "distance"]
    return all_found, summary, rows, fields


def _run_mu_expansivity(cfg, rng):
    phi = build_model(cfg["model"]["name"], cfg["model"]["params"])
    entourage = MetricEntourage(float(cfg["entourages"]["eps_D"]))
    mu = LebesgueMeasure(phi.dimension)
    radii = [int(m) for m in cfg["radii"]]
    samples = _sample_points(cfg, rng)
    report = mu_expansivity_report(
        phi, entourage, samples, radii, mu,
        threshold=float(cfg["tolerances"]["volume_threshold"]),
    )
    rows = []
    for i, vols in enumerate(report.volumes):
        for m, v in zip(report.radii, vols):
            rows.append({"sample": i, "radius": m, "volume": float(v)})
    summary = {
        "analytic_ratio": report.analytic_ratio,
        "observed_ratios": sorted({r for rs in report.ratios for r in rs}),
        "threshold": report.threshold,
    }
    return report.passed, summary, rows, ["sample", "radius", "volume"]


def _test_elements(cfg, genset):
    words = cfg.get("test_words", [["b"], ["b^-1"], ["b", "b"]])
    return [reduce_word(tuple(w), genset) for w in words]


def _run_stability(cfg, rng):
    phi = build_model(cfg["model"]["name"], cfg["model"]["params"])
    psi, bound = perturb_action(
        phi, float(cfg["perturbation"]["amplitude"]),
        omega=cfg["perturbation"].get("omega", 1.0),
        seed=int(cfg["seed"]),
    )
    ball = cayley_ball(phi.genset, int(cfg["ball_radius"]))
    entourage = MetricEntourage(float(cfg["entourages"]["eps_E"]))
    samples = _sample_points(cfg, rng)
    table = build_semiconjugacy(phi, psi, ball, entourage, samples, bound)
    report = verify_semiconjugacy(
        table, phi, psi, ball, _test_elements(cfg, phi.genset),
        tol=float(cfg["tolerances"]["residual"]),
        certified_bound=bound,
    )
    mu = LebesgueMeasure(phi.dimension)
    singleton = singleton_H_from_map(
        table, mu, entourage, residual_tol=float(cfg["tolerances"]["residual"])
    )
    rows = [
        {"index": i, "x": list(r.x), "fx": list(r.fx), "radius": r.radius,
         "solved": r.solved, "pass": r.passed}
        for i, r in enumerate(table.rows)
    ]
    passed = table.all_pass and report.passed and singleton.passed
    summary = {
        "max_radius": table.max_radius,
        "max_identity_distance": report.max_identity_distance,
        "max_equivariance_residual": report.max_equivariance_residual,
        "singleton_conditions": {
            "domain_complete": singleton.domain_complete,
            "null_values": singleton.null_values,
            "near_identity": singleton.near_identity,
            "equivariant": singleton.equivariant,
        },
    }
    fields = ["index", "x", "fx", "radius", "solved", "pass"]
    return passed, summary, rows, fields


def _run_mu_stability(cfg, rng):
    phi = build_model(cfg["model"]["name"], cfg["model"]["params"])
    psi, bound = perturb_action(
        phi, float(cfg["perturbation"]["amplitude"]),
        omega=cfg["perturbation"].get("omega", 1.0),
        seed=int(cfg["seed"]),
    )
    eps_prime = MetricEntourage(float(cfg["entourages"]["eps_E_prime"]))
    mu = LebesgueMeasure(phi.dimension)
    radii = [int(m) for m in cfg["radii"]]
    h = _test_elements(cfg, phi.genset)[0]
    samples = _sample_points(cfg, rng)
    rows = []
    all_pass = True
    for i, x in enumerate(samples):
        report = verify_H_properties(phi, psi, x, h, radii, mu, eps_prime)
        hw = build_H_window(phi, psi, eps_prime, x, radii)
        witness = extract_persistence_witness(hw, phi, psi)
        ok = report.passed and witness is not None and witness.passed
        all_pass = all_pass and ok
        rows.append({
            "index": i, "x": list(x), "nesting": report.nesting_ok,
            "sandwich": report.sandwich_ok,
            "final_volume": report.mu_values[-1],
            "witness_distance": witness.max_distance if witness else "",
            "pass": ok,
        })
    summary = {"radii": radii, "eps_prime": eps_prime.epsilon,
               "certified_bound": bound}
    fields = ["index", "x", "nesting", "sandwich", "final_volume",
              "witness_distance", "pass"]
    return all_pass, summary, rows, fields


def _run_genset_conversion(cfg, rng):
    params = cfg["model"]["params"]
    phi = build_model(cfg["model"]["name"], params)
    if not isinstance(phi.genset.family, FreeAbelian):
        raise InputError("genset-conversion runs on the free abelian model")
    t_values = {
        sym: tuple(int(v) for v in vec)
        for sym, vec in cfg["source_genset"].items()
    }
    t_genset = generating_set(phi.genset.family, t_values)
    t_action = freeabelian_diagonal_action(
        t_genset, base=float(params.get("base", 2.0))
    )
    eta = float(cfg["orbit"]["eta"])
    count = int(cfg["orbit"]["count"])
    t_radius = int(cfg["ball_radius"])
    t_ball = cayley_ball(t_genset, t_radius)
    rows = []
    all_pass = True
    worst = 0.0
    for i, x in enumerate(_sample_points(cfg, rng, count)):
        po = perturbed_orbit(t_action, t_ball, x, eta, seed=rng)
        converted = convert_generating_set(po, t_action, phi)
        ok = converted.realized_epsilon <= converted.declared_epsilon
        all_pass = all_pass and ok
        worst = max(worst, converted.realized_epsilon)
        rows.append({
            "index": i, "x": list(x),
            "source_eps": po.declared_epsilon,
            "converted_declared": converted.declared_epsilon,
            "converted_realized": converted.realized_epsilon,
            "pass": ok,
        })
    summary = {"max_realized": worst, "t_radius": t_radius}
    fields = ["index", "x", "source_eps", "converted_declared",
              "converted_realized", "pass"]
    return all_pass, summary, rows, fields


def _run_conjugacy_transport(cfg, rng):
    phi = build_model(cfg["model"]["name"], cfg["model"]["params"])
    h = np.asarray(cfg["conjugacy"]["scales"], dtype=float)
    psi = conjugate_action(phi, h)
    ball = cayley_ball(phi.genset, int(cfg["ball_radius"]))
    eta = float(cfg["orbit"]["eta"])
    count = int(cfg["orbit"]["count"])
    tol = float(cfg["tolerances"]["audit"])
    eps_d = MetricEntourage(float(cfg["entourages"]["eps_D"]))
    mu = LebesgueMeasure(phi.dimension)
    rows = []
    all_pass = True
    from fractions import Fraction
    for i, x in enumerate(_sample_points(cfg, rng, count)):
        po = perturbed_orbit(phi, ball, x, eta, seed=rng)
        y = shadow_diagonal_linear(po, phi).point
        po_t = transport_orbit(po, h, psi)
        y_t = shadow_diagonal_linear(po_t, psi).point
        gap = dmax(y_t, y * h)
        # dynamical-ball transport: entourage scaled through h, exact center
        gamma = dynamical_ball(phi, x, eps_d, m=4)
        scaled = MetricEntourage(eps_d.epsilon * float(np.max(np.abs(h))))
        exact_center = [Fraction(float(s)) * Fraction(float(c))
                        for s, c in zip(h, x)]
        gamma_t = dynamical_ball(psi, x * h, scaled, m=4,
                                 exact_center=exact_center)
        image = gamma.linear_image([Fraction(float(s)) for s in h])
        gamma_ok = gamma_t.contains_boxset(image) and image.contains_boxset(gamma_t)
        pulled = mu.pullback(h)
        vol_ok = pulled.measure(image) == mu.measure(gamma)
        ok = gap <= tol and gamma_ok and vol_ok
        all_pass = all_pass and ok
        rows.append({
            "index": i, "x": list(x), "shadow_gap": gap,
            "gamma_transport_exact": gamma_ok,
            "pullback_volume_exact": vol_ok, "pass": ok,
        })
    summary = {"h_scales": list(map(float, h)), "tolerance": tol}
    fields = ["index", "x", "shadow_gap", "gamma_transport_exact",
              "pullback_volume_exact", "pass"]
    return all_pass, summary, rows, fields


RUNNERS = {
    "shadowing": _run_shadowing,
    "persistence": _run_persistence,
    "expansivity": _run_expansivity,
    "mu-expansivity": _run_mu_expansivity,
    "stability": _run_stability,
    "mu-stability": _run_mu_stability,
    "genset-conversion": _run_genset_conversion,
    "conjugacy-transport": _run_conjugacy_transport,
}


def run_experiment(cfg, out_dir):
    cfg = resolve_config(cfg)
    rng = np.random.default_rng(int(cfg["seed"]))
    passed, summary, rows, fields = RUNNERS[cfg["experiment"]](cfg, rng)
    write_reports(out_dir, cfg, passed, summary, rows, fields)
    return passed


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gshadow",
        description="numerical shadowing/stability experiments for group actions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="worker count (row order is fixed regardless)")

    sub.add_parser("list-models", help="print the builtin model catalog")

    p_val = sub.add_parser("validate-config", help="check a config file")
    p_val.add_argument("--config", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list-models":
        for name in sorted(BUILTIN_MODELS):
            entry = BUILTIN_MODELS[name]
            params = ", ".join(f"{k}={v}" for k, v in entry["params"].items())
            print(f"{name}: {entry['description']}")
            print(f"  defaults: {params}")
            print(f"  experiments: {', '.join(entry['experiments'])}")
        return 0
    try:
        cfg = load_config(args.config)
        if args.command == "validate-config":
            resolve_config(cfg)
            print("config OK")
            return 0
        if args.seed is not None:
            cfg["seed"] = args.seed
        passed = run_experiment(cfg, args.out)
    except (GShadowError, OSError, json.JSONDecodeError,
            tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print("PASS" if passed else "FAIL")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
