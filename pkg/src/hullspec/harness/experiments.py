"""Experiment drivers.  Each takes an :class:`ExperimentConfig` and returns a
:class:`ResultRecord`; nothing here prints or touches the filesystem."""
from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from .. import groupoid as gl
from ..bloch import band_spectrum, bloch_vs_finite_volume, hofstadter_spectrum
from ..magnetic import cocycle_from_flux
from ..schrodinger import OperatorSpec, fibonacci_model, laplacian, potential_model, validate
from ..spectra import CompactRealSet, hausdorff_distance
from ..symdyn import (GOLDEN, CertificationError, PeriodicConfiguration, convergent_approximants,
                      fibonacci_subshift, min_distance_to_periodic, splice_subshift,
                      sturmian_subshift, subshift_distance)
from .config import ExperimentConfig
from .records import ResultRecord, Table, format_distance

ALGEBRA_TOL = 1e-12
NORM_TOL = 1e-10

NAMED_SLOPES = {
    "golden": GOLDEN,
    "silver": math.sqrt(2.0) - 1.0,
    "sqrt2": math.sqrt(2.0) - 1.0,
}


def resolve_model(name: str, coupling: float) -> OperatorSpec:
    """``laplacian``, ``fibonacci`` (v = coupling on 'a'), ``alternating``
    (v = +-coupling on a/b) or ``file:PATH`` holding an operator spec."""
    if name == "laplacian":
        return laplacian()
    if name == "fibonacci":
        return fibonacci_model(coupling)
    if name == "alternating":
        return potential_model({"a": coupling, "b": -coupling})
    if name.startswith("file:"):
        with open(name[5:], encoding="utf-8") as fh:
            return OperatorSpec.from_text(fh.read())
    raise ValueError(f"unknown model {name!r}")


def _intervals(S: CompactRealSet) -> list:
    return [[lo, hi] for lo, hi in S.intervals]


def _spectrum_error(bs) -> float:
    c = bs.certificate
    return c.edge_error + c.tol


def _attach(rec: ResultRecord, label: str, bs):
    cert = bs.certificate.to_dict()
    cert["label"] = label
    rec.certificates.append(cert)
    if not bs.certificate.converged:
        rec.degrade(f"{label}: edge refinement hit max_iter")


def _slope(alpha):
    return NAMED_SLOPES[alpha] if isinstance(alpha, str) else float(alpha)


def _approximant_spectra(cfg: ExperimentConfig, rec: ResultRecord):
    spec = resolve_model(cfg["model"], cfg["coupling"])
    validate(spec).raise_if_invalid()
    apps = convergent_approximants(_slope(cfg["alpha"]), cfg["count"])
    if apps.terminated:
        raise ValueError("slope is rational at this depth; periodic approximation needs an irrational slope")
    out = []
    for frac, Y in apps:
        x = Y.points()[0]
        bs = band_spectrum(spec, x, cfg["grid"], cfg["tol"], cfg["max_iter"])
        _attach(rec, f"slope {frac}", bs)
        out.append((frac, Y, x, bs))
    return out


def _timed(fn):
    def run(cfg: ExperimentConfig) -> ResultRecord:
        t0 = time.perf_counter()
        rec = fn(cfg)
        rec.wall_clock = time.perf_counter() - t0
        return rec

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _inputs(cfg: ExperimentConfig) -> dict:
    return {"kind": cfg.kind, **{k: v for k, v in cfg.params.items() if k not in ("out", "format")}}


# ---------------------------------------------------------------------------

@_timed
def run_bands(cfg: ExperimentConfig) -> ResultRecord:
    """Band spectrum of one periodic model, with an optional ring cross-check."""
    rec = ResultRecord("bands", _inputs(cfg))
    spec = resolve_model(cfg["model"], cfg["coupling"])
    x = PeriodicConfiguration(cfg["word"])
    validate(spec).raise_if_invalid()
    bs = band_spectrum(spec, x, cfg["grid"], cfg["tol"], cfg["max_iter"])
    _attach(rec, "bands", bs)
    rec.outputs["bands"] = [list(b) for b in bs.bands]
    rec.outputs["spectrum"] = _intervals(bs.spectrum)
    rec.tables["bands"] = Table(["band", "lo", "hi"], [[j, lo, hi] for j, (lo, hi) in enumerate(bs.bands)])
    if cfg["cells"] > 0:
        dev = bloch_vs_finite_volume(spec, x, cfg["cells"])
        rec.outputs["finite_volume_deviation"] = dev
        rec.check("bloch_vs_finite_volume", dev < 1e-8, dev)
    return rec


@_timed
def run_converge(cfg: ExperimentConfig) -> ResultRecord:
    """Spectra of periodic approximants and their Cauchy table, next to the
    dictionary distance of each approximant to the limit subshift."""
    rec = ResultRecord("converge", _inputs(cfg))
    apps = _approximant_spectra(cfg, rec)
    limit = sturmian_subshift(_slope(cfg["alpha"]))
    n = len(apps)
    S = [bs.spectrum for *_, bs in apps]
    err = [_spectrum_error(bs) for *_, bs in apps]
    D = [[hausdorff_distance(S[i], S[j]) for j in range(n)] for i in range(n)]
    consecutive = [D[i][i + 1] for i in range(n - 1)]
    rows = []
    summary = []
    for i, (frac, Y, x, bs) in enumerate(apps):
        dd = subshift_distance(Y, limit, cfg["horizon"])
        nxt = D[i][i + 1] if i + 1 < n else ""
        rows.append([i, str(frac), frac.denominator, x.word, nxt, D[i][n - 1], str(dd), float(dd),
                     len(bs.spectrum)])
        summary.append({
            "slope": str(frac), "period": frac.denominator, "word": x.word,
            "spectrum": _intervals(bs.spectrum), "dictionary_distance": str(dd),
            "to_finest": D[i][n - 1],
            "to_finest_text": format_distance(D[i][n - 1], err[i] + err[-1]),
        })
    rec.outputs["approximants"] = summary
    rec.outputs["pairwise"] = D
    rec.outputs["consecutive"] = consecutive
    rec.outputs["consecutive_text"] = [format_distance(d, err[i] + err[i + 1])
                                       for i, d in enumerate(consecutive)]
    rec.outputs["consecutive_decreasing"] = all(b < a for a, b in zip(consecutive, consecutive[1:]))
    rec.tables["converge"] = Table(
        ["index", "slope", "period", "word", "d_H_next", "d_H_finest", "dictionary_distance",
         "dictionary_distance_real", "n_intervals"], rows)
    rec.tables["pairwise"] = Table(["i"] + [str(j) for j in range(n)],
                                   [[i] + D[i] for i in range(n)])
    return rec


def poly_eval(coeffs, E):
    return sum(c * np.asarray(E, dtype=float) ** k for k, c in enumerate(coeffs))


def poly_norm(coeffs, S: CompactRealSet) -> float:
    """``max |p(E)|`` over ``S`` for a real polynomial of degree <= 2 (coefficients low to high)."""
    coeffs = list(coeffs)
    if len(coeffs) > 3 and any(coeffs[3:]):
        raise ValueError("degree must be at most 2")
    pts = list(S.endpoints())
    if len(coeffs) == 3 and coeffs[2] != 0:
        vertex = -coeffs[1] / (2 * coeffs[2])
        if S.contains(vertex):
            pts.append(vertex)
    return float(np.max(np.abs(poly_eval(coeffs, pts))))


def poly_lipschitz(coeffs, lo: float, hi: float) -> float:
    """``max |p'|`` on ``[lo, hi]``; ``p'`` is affine so the endpoints suffice."""
    c = list(coeffs) + [0.0] * (3 - len(coeffs))
    return max(abs(c[1] + 2 * c[2] * lo), abs(c[1] + 2 * c[2] * hi))


@_timed
def run_p2check(cfg: ExperimentConfig) -> ResultRecord:
    """``||p(H_n)||`` along approximants and the Lipschitz consistency bound."""
    coeffs = list(cfg["poly"])
    if len(coeffs) > 3:
        raise ValueError("degree must be at most 2")
    rec = ResultRecord("p2check", _inputs(cfg))
    apps = _approximant_spectra(cfg, rec)
    S = [bs.spectrum for *_, bs in apps]
    err = [_spectrum_error(bs) for *_, bs in apps]
    norms = [poly_norm(coeffs, s) for s in S]
    rows, ok = [], True
    for i in range(len(S) - 1):
        d = hausdorff_distance(S[i], S[i + 1])
        lip = poly_lipschitz(coeffs, min(S[i].lo, S[i + 1].lo), max(S[i].hi, S[i + 1].hi))
        gap = abs(norms[i] - norms[i + 1])
        bound = lip * (d + err[i] + err[i + 1]) + 1e-12
        ok &= gap <= bound
        rows.append([i, i + 1, norms[i], norms[i + 1], gap, lip, d, bound, gap <= bound])
    rec.outputs["norms"] = norms
    rec.outputs["slopes"] = [str(f) for f, *_ in apps]
    rec.tables["p2check"] = Table(["i", "j", "norm_i", "norm_j", "gap", "lipschitz", "d_H",
                                   "bound", "holds"], rows)
    rec.check("lipschitz_consistency", ok, len(rows))
    return rec


@_timed
def run_butterfly(cfg: ExperimentConfig) -> ResultRecord:
    """Hofstadter spectra over a list of rational fluxes plus a continuity table."""
    rec = ResultRecord("butterfly", _inputs(cfg))
    fluxes = sorted({(p, q) for p, q in cfg["fluxes"]}, key=lambda f: Fraction(*f))
    for p, q in fluxes:
        if math.gcd(p, q) != 1 or q < 1:
            raise ValueError(f"flux {p}/{q} is not a reduced fraction")
        if q > cfg["qmax"]:
            raise ValueError(f"flux {p}/{q} exceeds qmax = {cfg['qmax']}")
    grid = min(cfg["grid"], 32)
    spectra, rows, errs = {}, [], {}
    for p, q in fluxes:
        bs = hofstadter_spectrum(p, q, cfg["coupling"], grid, cfg["tol"], cfg["max_iter"],
                                 return_bands=True)
        _attach(rec, f"flux {p}/{q}", bs)
        spectra[(p, q)] = bs.spectrum
        errs[(p, q)] = _spectrum_error(bs)
        for lo, hi in bs.bands:
            rows.append([p, q, p / q, lo, hi])
    rec.tables["butterfly"] = Table(["pflux", "qflux", "flux_real", "band_lo", "band_hi"], rows)
    rec.outputs["spectra"] = {f"{p}/{q}": _intervals(S) for (p, q), S in spectra.items()}
    if len(fluxes) > 1:
        cont = []
        for a, b in zip(fluxes, fluxes[1:]):
            d = hausdorff_distance(spectra[a], spectra[b])
            cont.append([f"{a[0]}/{a[1]}", f"{b[0]}/{b[1]}", d,
                         format_distance(d, errs[a] + errs[b])])
        rec.tables["continuity"] = Table(["flux_a", "flux_b", "d_H", "d_H_text"], cont)
    worst = 0.0
    for p, q in fluxes:
        mirror = ((q - p) % q if q > 1 else p, q)
        if mirror in spectra and mirror != (p, q):
            worst = max(worst, hausdorff_distance(spectra[(p, q)], spectra[mirror]))
    rec.outputs["reflection_deviation"] = worst
    rec.check("flux_reflection", worst < 1e-8, worst)
    return rec


@_timed
def run_counterexample(cfg: ExperimentConfig) -> ResultRecord:
    """The splice orbit closure stays at distance >= 1/2 from every periodic orbit,
    while Sturmian convergents approach the Fibonacci subshift."""
    rec = ResultRecord("counterexample", _inputs(cfg))
    Y = splice_subshift()
    try:
        bound, word = min_distance_to_periodic(Y, cfg["pmax"], cfg["window"])
    except CertificationError as exc:
        rec.degrade(str(exc))
        return rec
    rec.outputs["bound"] = str(bound)
    rec.outputs["bound_real"] = float(bound)
    rec.outputs["attained_by"] = word
    rec.check("splice_bound", bound >= Fraction(1, 2), str(bound))
    fib = fibonacci_subshift()
    rows, dists = [], []
    for frac, X in convergent_approximants(GOLDEN, cfg["control"]):
        d = subshift_distance(X, fib, cfg["horizon"])
        dists.append(d)
        rows.append([str(frac), frac.denominator, str(d), float(d)])
    rec.tables["control"] = Table(["slope", "period", "dictionary_distance",
                                   "dictionary_distance_real"], rows)
    rec.outputs["control"] = [str(d) for d in dists]
    rec.check("control_decreasing", all(b < a for a, b in zip(dists, dists[1:])))
    return rec


# ---------------------------------------------------------------------------
# groupoid battery

def _rand_fn(rng, G):
    return gl.ArrowFunction(G, rng.normal(size=G.n_arrows) + 1j * rng.normal(size=G.n_arrows))


def _vdiff(a, b) -> float:
    return float(np.max(np.abs(a.values - b.values))) if len(a.values) else 0.0


def groupoid_battery(G, sigma, rng) -> dict:
    """Worst deviation of every algebra identity on one random instance.

    Keys ending in ``_exact`` are booleans that must be True.
    """
    f, g, h = (_rand_fn(rng, G) for _ in range(3))
    conv, st = gl.convolve, gl.star
    out = {}
    out["cocycle_identity"] = gl.validate_cocycle(sigma).max_deviation
    out["associativity"] = _vdiff(conv(conv(f, g, sigma), h, sigma), conv(f, conv(g, h, sigma), sigma))
    out["double_star"] = _vdiff(st(st(f, sigma), sigma), f)
    out["star_antihom"] = _vdiff(st(conv(f, g, sigma), sigma), conv(st(g, sigma), st(f, sigma), sigma))
    unit = gl.unit_indicator(G)
    out["unit"] = max(_vdiff(conv(unit, f, sigma), f), _vdiff(conv(f, unit, sigma), f))
    rep = 0.0
    for x in range(G.n_units):
        Pf, Pg = gl.left_regular(f, x, sigma), gl.left_regular(g, x, sigma)
        rep = max(rep, float(np.abs(gl.left_regular(conv(f, g, sigma), x, sigma) - Pf @ Pg).max()),
                  float(np.abs(gl.left_regular(st(f, sigma), x, sigma) - Pf.conj().T).max()))
    out["representation"] = rep
    nf = gl.reduced_norm(f, sigma)
    out["c_star"] = abs(gl.reduced_norm(conv(st(f, sigma), f, sigma), sigma) - nf ** 2)
    out["norm_bound"] = max(0.0, nf - gl.norm_inf1(f, sigma))
    cov = 0.0
    for orb in gl.orbits(G):
        svs = [np.linalg.svd(gl.left_regular(f, x, sigma), compute_uv=False) for x in sorted(orb)]
        cov = max([cov] + [float(np.abs(s - svs[0]).max()) for s in svs[1:]])
    out["covariance"] = cov
    exact, shrink = True, 0.0
    for M, _ in gl.invariant_subsets(G)[:8]:
        fM, sM = gl.restrict(f, M, sigma)
        gM, _ = gl.restrict(g, M, sigma)
        fgM, _ = gl.restrict(conv(f, g, sigma), M, sigma)
        fsM, _ = gl.restrict(st(f, sigma), M, sigma)
        exact &= np.array_equal(fgM.values, conv(fM, gM, sM).values)
        exact &= np.array_equal(fsM.values, st(fM, sM).values)
        shrink = max(shrink, gl.reduced_norm(fM, sM) - nf)
    out["restriction_exact"] = bool(exact)
    out["restriction_norm_increase"] = max(0.0, shrink)
    a = f + st(f, sigma)
    out["spectrum_union"] = hausdorff_distance(gl.spectrum_of_normal(a, sigma, "orbits"),
                                               gl.spectrum_of_normal(a, sigma, "all"))
    tau = np.exp(2j * np.pi * rng.random(G.n_arrows))
    twisted = sigma * gl.coboundary(G, tau)
    ftw = gl.ArrowFunction(G, f.values / tau)
    out["coboundary_norm"] = abs(gl.reduced_norm(ftw, twisted) - nf)
    return out


BATTERY_TOL = {
    "cocycle_identity": ALGEBRA_TOL,
    "associativity": ALGEBRA_TOL,
    "double_star": ALGEBRA_TOL,
    "star_antihom": ALGEBRA_TOL,
    "unit": ALGEBRA_TOL,
    "representation": ALGEBRA_TOL,
    "covariance": ALGEBRA_TOL,
    "c_star": NORM_TOL,
    "norm_bound": NORM_TOL,
    "restriction_norm_increase": NORM_TOL,
    "spectrum_union": NORM_TOL,
    "coboundary_norm": NORM_TOL,
}


@_timed
def run_groupoid_selftest(cfg: ExperimentConfig) -> ResultRecord:
    """Random groupoids and cocycles through the whole identity battery."""
    rec = ResultRecord("groupoid-selftest", _inputs(cfg))
    rng = np.random.default_rng(cfg["seed"])
    worst = {k: 0.0 for k in BATTERY_TOL}
    passes = {k: 0 for k in list(BATTERY_TOL) + ["restriction_exact"]}
    sizes = []
    for _ in range(cfg["count"]):
        G, sigma = gl.random_groupoid(rng, families=tuple(cfg["families"]),
                                      twisted=cfg["twisted"])
        sizes.append(G.n_arrows)
        res = groupoid_battery(G, sigma, rng)
        for k, tol in BATTERY_TOL.items():
            worst[k] = max(worst[k], res[k])
            passes[k] += res[k] < tol
        passes["restriction_exact"] += res["restriction_exact"]
    G, sigma = cocycle_from_flux(Fraction(1, 2), 2)
    mag = gl.validate_cocycle(sigma)
    rec.outputs["worst"] = worst
    rec.outputs["passes"] = passes
    rec.outputs["instances"] = cfg["count"]
    rec.outputs["arrows"] = sizes
    rec.outputs["magnetic_cocycle"] = {"triples": mag.triples, "max_deviation": mag.max_deviation}
    rows = [[k, passes[k], cfg["count"], worst.get(k, ""), BATTERY_TOL.get(k, "exact")]
            for k in passes]
    rec.tables["selftest"] = Table(["identity", "passed", "instances", "worst", "tolerance"], rows)
    for k in passes:
        rec.check(k, passes[k] == cfg["count"], worst.get(k))
    rec.check("magnetic_cocycle", mag.ok and mag.max_deviation == 0.0, mag.max_deviation)
    return rec


RUNNERS = {
    "bands": run_bands,
    "converge": run_converge,
    "p2check": run_p2check,
    "butterfly": run_butterfly,
    "counterexample": run_counterexample,
    "groupoid-selftest": run_groupoid_selftest,
}


def run(cfg: ExperimentConfig) -> ResultRecord:
    return RUNNERS[cfg.kind](cfg)
