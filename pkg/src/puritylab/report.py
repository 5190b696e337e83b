"""Structured analysis reports (JSON body plus a plain-text rendering)."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from fractions import Fraction

from . import __version__
from .rate import RateReport, rate_from_factorization
from .separability import (
    ENTANGLEMENT_DETECTED,
    INCONCLUSIVE,
    MixedAnalysis,
    PurityProfile,
    finest_factorization,
    is_separable_pure,
    np_mixed,
    purity_profile,
)
from .states import PureState, State, as_density

SCHEMA = "purity-lab/1"
BASIS_ORDER = "mixed-radix, site 0 most significant"

_fraction = {
    "type": "object",
    "required": ["num", "den", "value"],
    "properties": {"num": {"type": "integer"}, "den": {"type": "integer", "minimum": 1},
                   "value": {"type": "number"}},
    "additionalProperties": False,
}
_int_list = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_sites = {"type": "array", "items": {"type": "integer", "minimum": 0}}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "tool", "input", "tolerances", "verdict"],
    "properties": {
        "schema": {"const": SCHEMA},
        "tool": {"type": "object", "required": ["name", "version"]},
        "input": {
            "type": "object",
            "required": ["kind", "expression", "file", "dims", "n", "basis_order"],
            "properties": {
                "kind": {"enum": ["pure", "mixed"]},
                "expression": {"type": ["string", "null"]},
                "file": {"type": ["string", "null"]},
                "dims": {"type": "array", "items": {"type": "integer", "minimum": 2}},
                "n": {"type": "integer", "minimum": 1},
                "basis_order": {"type": "string"},
            },
        },
        "tolerances": {
            "type": "object",
            "required": ["purity", "max_dim"],
            "properties": {"purity": {"type": "number"}, "max_dim": {"type": "integer"}},
        },
        "verdict": {"type": "string"},
        "separability": {
            "type": "object",
            "required": ["gamma_1", "witnesses", "fully_entangled"],
            "properties": {"gamma_1": {"type": "integer"}, "witnesses": _sites,
                           "fully_entangled": {"type": "boolean"}},
        },
        "profile": {
            "type": "object",
            "required": ["s", "gammas", "gamma_max"],
            "properties": {"s": _int_list, "gammas": _int_list, "gamma_max": _int_list},
        },
        "factorization": {
            "type": "object",
            "required": ["factors"],
            "properties": {"factors": {"type": "array", "items": {
                "type": "object", "required": ["sites", "tag"],
                "properties": {"sites": _sites, "tag": {"enum": ["entangled", "singleton"]}}}}},
        },
        "rate": {
            "type": "object",
            "required": ["e_total", "classification", "per_factor", "measure_caveat"],
            "properties": {
                "e_total": _fraction,
                "classification": {"enum": ["separable", "partial", "maximal"]},
                "measure_caveat": {"type": "boolean"},
                "per_factor": {"type": "array", "items": {
                    "type": "object", "required": ["sites", "s", "rate", "plausibly_maximal"],
                    "properties": {"sites": _sites, "s": {"type": "integer"}, "rate": _fraction,
                                   "plausibly_maximal": {"type": ["boolean", "null"]}}}},
            },
        },
        "mixed": {
            "type": "object",
            "required": ["s", "stage_gammas", "n_p", "gamma_max_mixed", "verdict", "pure_factors"],
            "properties": {
                "s": _int_list,
                "stage_gammas": _int_list,
                "n_p": {"type": "integer", "minimum": 0},
                "gamma_max_mixed": {"type": "array", "items": {"type": ["integer", "null"]}},
                "verdict": {"enum": [ENTANGLEMENT_DETECTED, "necessary-condition-passed", INCONCLUSIVE]},
                "pure_factors": {"type": "array", "items": _sites},
            },
        },
        "timing_ms": {"type": "object", "additionalProperties": {"type": "number"}},
    },
    "oneOf": [{"required": ["rate"], "not": {"required": ["mixed"]}},
              {"required": ["mixed"], "not": {"required": ["rate"]}}],
}


def fraction_json(f: Fraction) -> dict:
    return {"num": f.numerator, "den": f.denominator, "value": float(f)}


def profile_json(p: PurityProfile) -> dict:
    return {"s": list(range(1, p.n)), "gammas": list(p.gammas), "gamma_max": list(p.gamma_max)}


def rate_json(r: RateReport) -> dict:
    return {
        "e_total": fraction_json(r.e_total),
        "classification": r.classification,
        "measure_caveat": r.measure_caveat,
        "heuristic": "plausibly_maximal: every site of the factor is maximally mixed (necessary only)",
        "per_factor": [
            {"sites": list(f.sites), "s": f.s, "rate": fraction_json(f.rate),
             "plausibly_maximal": f.plausibly_maximal}
            for f in r.per_factor
        ],
    }


def mixed_json(m: MixedAnalysis) -> dict:
    return {
        "s": list(range(1, m.n)),
        "stage_gammas": list(m.stage_gammas),
        "n_p": m.n_p,
        "gamma_max_mixed": list(m.gamma_max_mixed),
        "verdict": m.verdict,
        "pure_factors": [list(f) for f in m.pure_factors],
    }


class _Timer:
    def __init__(self):
        self.ms: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        yield
        self.ms[name] = round((time.perf_counter() - t0) * 1e3, 3)


def build_report(state: State, *, expression: str | None = None, file: str | None = None,
                 tol: float = 1e-9, max_dim: int = 4096, force_mixed: bool = False,
                 profile: bool | None = None, workers: int = 1, timing: bool = True,
                 extra_timing: dict | None = None) -> dict:
    """Run the analyses matching the input kind and collect them in one dict.

    Pure inputs get the separability verdict, profile, factorization and
    rate.  Mixed inputs (or ``force_mixed``) get the n_p analysis; their
    purity profile is only computed when ``profile`` is true.
    """
    timer = _Timer()
    mixed = force_mixed or not isinstance(state, PureState)
    if profile is None:
        profile = not mixed
    rep: dict = {
        "schema": SCHEMA,
        "tool": {"name": "purity-lab", "version": __version__},
        "input": {"kind": "mixed" if mixed else "pure", "expression": expression, "file": file,
                  "dims": list(state.dims), "n": state.n, "basis_order": BASIS_ORDER},
        "tolerances": {"purity": tol, "max_dim": max_dim},
    }
    if mixed:
        rho = as_density(state)
        if profile and rho.n > 1:
            with timer.stage("profile"):
                rep["profile"] = profile_json(purity_profile(rho, tol, workers))
        with timer.stage("np_mixed"):
            analysis = np_mixed(rho, tol, workers)
        rep["verdict"] = analysis.verdict
        rep["mixed"] = mixed_json(analysis)
    else:
        with timer.stage("separability"):
            verdict = is_separable_pure(state, tol, workers)
        if profile and state.n > 1:
            with timer.stage("profile"):
                rep["profile"] = profile_json(purity_profile(state, tol, workers))
        with timer.stage("factorization"):
            fac = finest_factorization(state, tol, workers)
        with timer.stage("rate"):
            rate = rate_from_factorization(state, fac, tol)
        rep["verdict"] = verdict.label
        rep["separability"] = {
            "gamma_1": verdict.gamma_1,
            "witnesses": list(verdict.witnesses),
            "fully_entangled": len(fac.factors) == 1 and state.n > 1,
        }
        rep["factorization"] = {"factors": [{"sites": list(f.sites.members), "tag": f.tag}
                                            for f in fac.factors]}
        rep["rate"] = rate_json(rate)
    if timing:
        rep["timing_ms"] = {**(extra_timing or {}), **timer.ms}
    return rep


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _frac_text(f: dict) -> str:
    return f"{f['num']}/{f['den']} ({f['value']!r})" if f["den"] != 1 else f"{f['num']} ({f['value']!r})"


def _sites_text(sites) -> str:
    return "{" + ",".join(str(s) for s in sites) + "}"


def render_text(rep: dict) -> str:
    inp = rep["input"]
    n = inp["n"]
    lines = []
    source = inp["expression"] if inp["expression"] is not None else inp["file"]
    lines.append(f"input    : {source}")
    lines.append(f"kind     : {inp['kind']}, n = {n}, dims = {inp['dims']}")
    tol = rep["tolerances"]
    lines.append(f"tolerance: purity {tol['purity']!r}, max_dim {tol['max_dim']}")
    lines.append(f"verdict  : {rep['verdict']}")
    if "separability" in rep:
        sep = rep["separability"]
        lines.append(f"fully entangled: {'yes' if sep['fully_entangled'] else 'no'}")
        if sep["witnesses"]:
            lines.append(f"mixed single-site reductions: {_sites_text(sep['witnesses'])}")
    if "profile" in rep:
        p = rep["profile"]
        lines.append("purity numbers:")
        for s, g, m in zip(p["s"], p["gammas"], p["gamma_max"]):
            lines.append(f"  γ_{s} = {g} / C({n},{s}) = {g} / {m}")
    if "factorization" in rep:
        parts = [f"{_sites_text(f['sites'])} {f['tag']}" for f in rep["factorization"]["factors"]]
        lines.append("factors  : " + ", ".join(parts))
    if "rate" in rep:
        r = rep["rate"]
        lines.append(f"entanglement rate: e_total = {_frac_text(r['e_total'])} [{r['classification']}]")
        for f in r["per_factor"]:
            if f["s"] >= 2:
                flag = "" if f["plausibly_maximal"] else " (not maximally mixed locally)"
                lines.append(f"  {_sites_text(f['sites'])}: s = {f['s']}, e = {_frac_text(f['rate'])}{flag}")
        if r["measure_caveat"]:
            lines.append("  caveat: some entangled factor fails the maximal-entanglement heuristic")
    if "mixed" in rep:
        m = rep["mixed"]
        lines.append("sequential trace-out:")
        for s, g, mx in zip(m["s"], m["stage_gammas"], m["gamma_max_mixed"]):
            ceiling = f" / C({m['n_p']},{s}) = {g} / {mx}" if mx is not None else ""
            lines.append(f"  γ_{s} = {g}{ceiling}")
        lines.append(f"n_p = {m['n_p']}")
        if m["pure_factors"]:
            lines.append("pure sub-states: " + ", ".join(_sites_text(f) for f in m["pure_factors"]))
    if "timing_ms" in rep:
        lines.append("timing (ms): " + ", ".join(f"{k} {v!r}" for k, v in rep["timing_ms"].items()))
    return "\n".join(lines) + "\n"
