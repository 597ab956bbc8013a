"""Experiment orchestration: configs, dispatch, artifacts.

Every experiment is a pure function of (config, seed): identical configs
produce byte-identical CSV/JSON artifacts (the report's wall time is
recorded in memory but zeroed on disk to keep the files diffable).
"""

from __future__ import annotations

import csv
import dataclasses
import math
import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import corona, crosses, finite_intensity, product, stats, svg
from . import field as sfield
from .hyperbolic import DISK, random_mobius
from .product import ProductIsometry, ProductPoint

EXPERIMENTS = ("volume", "delays", "corona_portrait", "coverage", "mushroom",
               "field", "tiebreak", "end_probe", "nml_probe", "isometry_check")

DEFAULTS: dict[str, dict] = {
    "volume": {"radii": "0.1,0.5,1,2,5,10"},
    "delays": {"lam": 1e-4, "replicas": 1000, "s_min": -3.0, "s_max": 1.0,
               "bins": 8, "reference": "exact"},
    "corona_portrait": {"r_cutoff": 1000.0, "points": 1000,
                        "radius_scale": 3.0},
    "coverage": {"r1": 1.0, "events": 20000, "L": 10.0, "n": 512,
                 "mode": "crosses", "stop_fraction": 0.999,
                 "unconditional": 0},
    "mushroom": {"theta": 0.7, "phi": -0.4, "r": 2.0, "r1": 1.0, "y": 0.9,
                 "L": 10.0, "n": 512, "configs": 1},
    "field": {"eps": 1e-3, "y_max": 200.0, "rate_y_max": 20000.0,
              "eps_grid": "1e-2,1e-3,1e-4", "track_atoms": 5},
    "tiebreak": {"n": 1000000},
    "end_probe": {"replicas": 20, "directions": 50, "r_cutoff": 1000.0,
                  "t_max": 15.0, "t_points": 16, "delta": 0.1,
                  "target": 0.95},
    "nml_probe": {"replicas": 20, "t_max": 10.0, "grid": 33, "target": 0.95},
    "isometry_check": {"triples": 10000, "box_replicas": 2000, "scale": 0.5,
                       "r_box": 5.0},
}


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    parameters: dict = dc_field(default_factory=dict)
    output_dir: str = "."

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; "
                             f"choose from {', '.join(EXPERIMENTS)}")


def merged_parameters(config: ExperimentConfig) -> dict:
    """Defaults overlaid with the config's parameters; unknown keys and
    uncoercible values are rejected with per-field diagnostics."""
    defaults = DEFAULTS[config.experiment]
    out = dict(defaults)
    for key, value in config.parameters.items():
        if key not in defaults:
            raise ValueError(
                f"parameter {key!r} not valid for {config.experiment!r}; "
                f"valid: {', '.join(sorted(defaults))}")
        kind = type(defaults[key])
        try:
            out[key] = kind(value)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"parameter {key!r}: cannot read {value!r} "
                             f"as {kind.__name__}") from exc
    return out


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating))
                        else v for v in row])


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in str(text).split(",") if tok.strip()]


def run(config: ExperimentConfig) -> stats.TestReport:
    """Dispatch, collect the report, write artifacts deterministically."""
    params = merged_parameters(config)
    os.makedirs(config.output_dir, exist_ok=True)
    runner = _RUNNERS[config.experiment]
    with stats.Timer() as timer:
        report = runner(config, params)
    report.parameters = {**params}
    report.seed = config.seed
    report.wall_time = 0.0     # artifacts must not depend on timing
    report.to_json(os.path.join(config.output_dir,
                                f"{config.experiment}.report.json"))
    report.wall_time = timer.elapsed
    return report


# ---------------------------------------------------------------------------

def _run_volume(config, p) -> stats.TestReport:
    radii = _float_list(p["radii"])
    rows = []
    worst = 0.0
    for r in radii:
        closed = float(product.ball_volume(r))
        quad = product.ball_volume_quadrature(r)
        rel = abs(closed - quad) / quad
        worst = max(worst, rel)
        rows.append((r, closed, quad, rel))
    _write_csv(os.path.join(config.output_dir, "volume.csv"),
               ("r", "closed_form", "quadrature", "rel_error"), rows)
    rep = stats.TestReport("volume", config.seed, worst < 1e-8)
    rep.statistics["max_rel_error"] = worst
    return rep


def _run_delays(config, p) -> stats.TestReport:
    edges = np.linspace(p["s_min"], p["s_max"], int(p["bins"]) + 1)
    dr = finite_intensity.delay_convergence_test(
        p["lam"], int(p["replicas"]), edges, config.seed)
    rows = [(a, b, o, el, ee, zl, ze)
            for a, b, o, el, ee, zl, ze in zip(
                edges[:-1], edges[1:], dr.observed_mean, dr.expected_limit,
                dr.expected_exact, dr.z_limit, dr.z_exact)]
    _write_csv(os.path.join(config.output_dir, "delays.csv"),
               ("s_lo", "s_hi", "observed_mean", "expected_limit",
                "expected_exact", "z_limit", "z_exact"), rows)
    rep = stats.TestReport("delays", config.seed,
                           dr.passed(reference=p["reference"]))
    rep.statistics.update(
        ks_limit=dr.ks_limit, ks_limit_pvalue=dr.ks_limit_pvalue,
        ks_exact=dr.ks_exact, ks_exact_pvalue=dr.ks_exact_pvalue,
        max_abs_z_limit=float(np.max(np.abs(dr.z_limit))),
        max_abs_z_exact=float(np.max(np.abs(dr.z_exact))))
    return rep


def _run_corona_portrait(config, p) -> stats.TestReport:
    rng = stats.rng_stream(config.seed, 0)
    sample = corona.sample_corona(p["r_cutoff"], rng)
    sample.to_csv(os.path.join(config.output_dir, "corona_portrait.csv"))
    svg.corona_portrait(sample.theta, sample.phi, sample.r,
                        os.path.join(config.output_dir, "corona_portrait.svg"),
                        radius_scale=p["radius_scale"],
                        max_points=int(p["points"]))
    rep = stats.TestReport("corona_portrait", config.seed, True)
    rep.statistics["n_points"] = len(sample)
    return rep


def _run_coverage(config, p) -> stats.TestReport:
    rng = stats.rng_stream(config.seed, 0)
    r1 = float(rng.exponential(1.0)) if int(p["unconditional"]) else p["r1"]
    events = crosses.sample_deposition(int(p["events"]), rng)
    res = crosses.coverage_run(r1, events, L=p["L"], n=int(p["n"]),
                               mode=p["mode"],
                               stop_fraction=p["stop_fraction"])
    x, y, t = events
    rows = [(i + 1, t[i], res.fractions[i]) for i in range(res.events_used)]
    _write_csv(os.path.join(config.output_dir, "coverage.csv"),
               ("event_index", "t", "coverage_fraction"), rows)
    svg.coverage_curve(res.fractions,
                       os.path.join(config.output_dir, "coverage.svg"))
    k = (r1 / (r1 + t[:res.events_used])) \
        * (1.0 + x[:res.events_used] ** 2) * (1.0 + y[:res.events_used] ** 2)
    svg.crosses_portrait(x[:res.events_used], y[:res.events_used], k, p["L"],
                         os.path.join(config.output_dir, "crosses.svg"))
    reached = res.events_to_fraction(p["stop_fraction"])
    rep = stats.TestReport("coverage", config.seed, reached is not None)
    rep.statistics.update(final_fraction=float(res.fractions[-1]),
                          events_to_target=reached, r1=r1,
                          events_used=res.events_used)
    return rep


def _run_mushroom(config, p) -> stats.TestReport:
    rng = stats.rng_stream(config.seed, 0)
    n_cfg = int(p["configs"])
    violations = 0
    all_touch = True
    for i in range(n_cfg):
        if n_cfg == 1:
            theta, phi, r, r1, y = (p["theta"], p["phi"], p["r"], p["r1"],
                                    p["y"])
        else:
            theta, phi, y = rng.standard_cauchy(3)
            r1 = rng.exponential(1.0)
            r = r1 + rng.exponential(1.0)
            if abs(phi - y) < 1e-3:
                y += 1.0
        mr = crosses.mushroom_region(theta, phi, r, r1, y,
                                     L=p["L"], n=int(p["n"]))
        violations += mr.line_violations
        all_touch = all_touch and mr.touch_within_cell
        if i == 0:
            svg.mask_figure(mr.mask, p["L"],
                            os.path.join(config.output_dir, "mushroom.svg"))
    rep = stats.TestReport("mushroom", config.seed,
                           violations == 0 and all_touch)
    rep.statistics.update(configs=n_cfg, line_violations=violations,
                          touch_within_cell=all_touch)
    return rep


def _run_field(config, p) -> stats.TestReport:
    eps = p["eps"]
    y_max = p["y_max"]
    s = sfield.rescaled_field_sample(sfield.TravelerState(eps), y_max,
                                     stats.rng_stream(config.seed, 0))
    lim = sfield.limit_field_sample(1.0, 1.0, y_max,
                                    stats.rng_stream(config.seed, 1))
    _write_csv(os.path.join(config.output_dir, "field.csv"),
               ("theta_hat", "phi_hat", "y"),
               zip(s.theta_hat, s.phi_hat, s.y))
    pvals = {name: stats.ks_two_sample(a, b)[1]
             for name, a, b in (("theta_hat", s.theta_hat, lim.theta_hat),
                                ("phi_hat", s.phi_hat, lim.phi_hat),
                                ("y", s.y, lim.y))}
    eps_grid = _float_list(p["eps_grid"])
    rates = sfield.measure_rate_constant(eps_grid, p["rate_y_max"],
                                         config.seed + 1)
    vals = [v for v, _ in rates.values()]
    stable = max(vals) / min(vals) - 1.0 <= 0.05 if min(vals) > 0 else False

    # per-atom value tracks against -log eps for the figure
    k = int(p["track_atoms"])
    sweep = np.logspace(-1, -4, 13)
    tracks = np.full((k, sweep.size), np.nan)
    for j, e in enumerate(sweep):
        sj = sfield.rescaled_field_sample(sfield.TravelerState(float(e)),
                                          y_max,
                                          stats.rng_stream(config.seed, 100 + j))
        m = min(k, len(sj))
        tracks[:m, j] = sj.y[:m]
    svg.field_atom_tracks(-np.log(sweep), tracks,
                          os.path.join(config.output_dir, "field.svg"))

    rep = stats.TestReport("field", config.seed,
                           all(v > 0.01 for v in pvals.values()) and stable)
    rep.statistics.update({f"ks_pvalue_{k_}": v for k_, v in pvals.items()})
    rep.statistics["rate_stable_5pct"] = stable
    for e, (v, se) in rates.items():
        rep.add_estimate(f"rate_eps_{e:g}", v, se,
                         max(int(v * p["rate_y_max"]), 1))
    return rep


def _run_tiebreak(config, p) -> stats.TestReport:
    n = int(p["n"])
    e1 = sfield.tiebreak_estimate("direct_Z", n, stats.rng_stream(config.seed, 0))
    e2 = sfield.tiebreak_estimate("corona_limit", n,
                                  stats.rng_stream(config.seed, 1))
    _write_csv(os.path.join(config.output_dir, "tiebreak.csv"),
               ("method", "estimate", "stderr", "n"),
               [(e.method, e.value, e.stderr, e.n) for e in (e1, e2)])
    target = sfield.TIEBREAK_CONSTANT
    tol = max(0.001, 4.0 * max(e1.stderr, e2.stderr))
    agree = abs(e1.value - e2.value) <= 3.0 * math.hypot(e1.stderr, e2.stderr)
    ok = (abs(e1.value - target) <= tol and abs(e2.value - target) <= tol
          and agree)
    rep = stats.TestReport("tiebreak", config.seed, ok)
    rep.add_estimate("direct_Z", e1.value, e1.stderr, n)
    rep.add_estimate("corona_limit", e2.value, e2.stderr, n)
    rep.statistics.update(target=target, agree_3se=agree)
    return rep


def _run_end_probe(config, p) -> stats.TestReport:
    t_grid = np.linspace(1.0, p["t_max"], int(p["t_points"]))
    delta = p["delta"]
    n_dir = int(p["directions"])
    total = 0
    exited = 0
    rows = []
    for rep_i in range(int(p["replicas"])):
        rng = stats.rng_stream(config.seed, rep_i)
        sample = corona.sample_corona(p["r_cutoff"], rng)
        taus1 = np.empty(n_dir)
        taus2 = np.empty(n_dir)
        filled = 0
        while filled < n_dir:
            c1 = rng.uniform(-np.pi, np.pi, size=n_dir)
            c2 = rng.uniform(-np.pi, np.pi, size=n_dir)
            off_end = ((np.abs(np.angle(np.exp(1j * (c1 - sample.theta[0])))) > delta)
                       & (np.abs(np.angle(np.exp(1j * (c2 - sample.phi[0])))) > delta))
            take = min(n_dir - filled, int(off_end.sum()))
            taus1[filled:filled + take] = c1[off_end][:take]
            taus2[filled:filled + take] = c2[off_end][:take]
            filled += take
        ex = sfield.end_probe_exit_fraction(sample, taus1, taus2, t_grid)
        total += n_dir
        exited += int(ex.sum())
        rows.append((rep_i, n_dir, int(ex.sum())))
    _write_csv(os.path.join(config.output_dir, "end_probe.csv"),
               ("replica", "directions", "exits"), rows)
    frac = exited / total
    rep = stats.TestReport("end_probe", config.seed, frac >= p["target"])
    rep.add_estimate("exit_fraction", frac,
                     math.sqrt(frac * (1 - frac) / total), total)
    return rep


def _run_nml_probe(config, p) -> stats.TestReport:
    n_rep = int(p["replicas"])
    t_count = int(round(p["t_max"]))      # unit t-steps up to t_max
    hits = 0
    worst = 0.0
    rows = []
    for i in range(n_rep):
        rng = stats.rng_stream(config.seed, i)
        phi1 = rng.uniform(-np.pi, np.pi)
        theta2 = rng.uniform(-np.pi, np.pi)
        r1 = rng.exponential(1.0)
        r2 = r1 + rng.exponential(1.0)
        pt = corona.CoronaPoint(0.0, phi1, r1)
        qt = corona.CoronaPoint(theta2, 0.0, r2)
        wit = corona.nml_unbounded_probe(pt, qt, p["t_max"],
                                         grid=int(p["grid"]))
        ok = len(wit) == t_count
        hits += ok
        if wit:
            worst = max(worst, max(w.residual for w in wit))
        rows.append((i, len(wit), int(ok)))
    _write_csv(os.path.join(config.output_dir, "nml_probe.csv"),
               ("replica", "witness_count", "all_t"), rows)
    frac = hits / n_rep
    rep = stats.TestReport("nml_probe", config.seed, frac >= p["target"])
    rep.add_estimate("all_t_fraction", frac,
                     math.sqrt(max(frac * (1 - frac), 1e-12) / n_rep), n_rep)
    rep.statistics["max_witness_residual"] = worst
    return rep


def _random_product_isometry(rng, scale):
    return ProductIsometry(random_mobius(rng, scale),
                           random_mobius(rng, scale),
                           bool(rng.integers(0, 2)))


def _run_isometry_check(config, p) -> stats.TestReport:
    rng = stats.rng_stream(config.seed, 0)
    worst = 0.0
    for _ in range(int(p["triples"])):
        g = _random_product_isometry(rng, p["scale"])
        rho = rng.uniform(0.0, 0.95, size=2)
        ang = rng.uniform(-np.pi, np.pi, size=2)
        z = ProductPoint(rho[0] * np.exp(1j * ang[0]),
                         rho[1] * np.exp(1j * ang[1]), DISK)
        cp = corona.CoronaPoint(rng.uniform(-np.pi, np.pi),
                                rng.uniform(-np.pi, np.pi),
                                rng.exponential(1.0) + 1e-3)
        before = corona.separation(z, cp)
        after = corona.separation(product.isometry_apply(g, z),
                                  corona.corona_isometry_apply(g, cp))
        worst = max(worst, abs(after - before) / before)

    # measure invariance: pushed-forward box counts vs fresh box counts
    g = _random_product_isometry(stats.rng_stream(config.seed, 1), p["scale"])
    r_box = p["r_box"]
    r_source = corona.pushforward_covers(g, r_box)
    n_push = 0
    n_fresh = 0
    for i in range(int(p["box_replicas"])):
        rng_i = stats.rng_stream(config.seed, 1000 + i)
        src = corona.sample_corona(r_source, rng_i)
        pushed = corona.corona_isometry_apply_sample(g, src, r_box)
        n_push += int(np.sum((pushed.theta >= 0) & (pushed.theta <= 1)
                             & (pushed.phi >= 0) & (pushed.phi <= 1)))
        fresh = corona.sample_corona(r_box, stats.rng_stream(config.seed,
                                                             500000 + i))
        n_fresh += int(np.sum((fresh.theta >= 0) & (fresh.theta <= 1)
                              & (fresh.phi >= 0) & (fresh.phi <= 1)))
    z_box = ((n_push - n_fresh) / math.sqrt(n_push + n_fresh)
             if n_push + n_fresh else 0.0)
    _write_csv(os.path.join(config.output_dir, "isometry_check.csv"),
               ("pushforward_box_count", "fresh_box_count", "z"),
               [(float(n_push), float(n_fresh), z_box)])
    rep = stats.TestReport("isometry_check", config.seed,
                           worst < 1e-10 and abs(z_box) <= 3.0)
    rep.statistics.update(max_equivariance_residual=worst, box_zscore=z_box,
                          box_count_pushforward=n_push,
                          box_count_fresh=n_fresh)
    return rep


_RUNNERS = {
    "volume": _run_volume,
    "delays": _run_delays,
    "corona_portrait": _run_corona_portrait,
    "coverage": _run_coverage,
    "mushroom": _run_mushroom,
    "field": _run_field,
    "tiebreak": _run_tiebreak,
    "end_probe": _run_end_probe,
    "nml_probe": _run_nml_probe,
    "isometry_check": _run_isometry_check,
}
