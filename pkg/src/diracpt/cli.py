"""Command-line front end: ``diracpt scatter|bound|verify|catalog``.

Exit codes: 0 success, 1 a verification check failed, 2 configuration
error (bad flags, parameters or expressions), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import boundstates, susy, verify
from .core import AsymptoticLimits, PhysicalParams, principal_sqrt
from .errors import ConfigError, DiracPTError, NumericalError, WrongPotentialClass
from .integrator import IntegratorConfig, reduce_schrodinger, scatter
from .potentials import CATALOG, SCHEMA, PotentialModel, Tail, make_from_expressions, make_model

CSV_COLUMNS = ("E", "k_minus_re", "k_minus_im", "T_LR_re", "T_LR_im", "abs_T_LR",
               "R_LR_re", "R_LR_im", "abs_R_LR", "T_RL_re", "T_RL_im", "R_RL_re", "R_RL_im",
               "nu_phase", "unitarity_defect", "pt_exact", "wronskian_drift", "error")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

# option defaults; a --config file sits between these and explicit flags
DEFAULTS = {
    "model": None, "param": [], "expr_V": None, "expr_S": None, "expr_P": None,
    "limits": None, "tail": None, "E_min": None, "E_max": None, "E_count": 1,
    "k_min": None, "k_max": None, "k_count": None, "L": None, "rtol": None,
    "format": None, "out": None, "jobs": 1, "suite": "all", "partners": None,
    "negative": False, "threshold": False,
}


@dataclass
class RunConfig:
    command: str
    model: PotentialModel | None = None
    energies: list = field(default_factory=list)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    format: str = "csv"
    out: str | None = None
    jobs: int = 1
    options: dict = field(default_factory=dict)


def fmt(v) -> str:
    """17 significant digits: round-trips every double."""
    return "%.17g" % v


def _parse_complex(s: str) -> complex:
    try:
        return complex(str(s).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"not a complex number: {s!r}") from None


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _parse_limits(s) -> AsymptoticLimits:
    vals = s if isinstance(s, (list, tuple)) else str(s).split(",")
    if len(vals) != 6:
        raise ConfigError("--limits needs six values: V-,V+,S-,S+,P-,P+")
    return AsymptoticLimits(*(_parse_complex(v) for v in vals))


def _parse_tail(s) -> Tail:
    if isinstance(s, dict):
        return Tail.from_dict(s)
    kind, _, rate = str(s).partition(":")
    if kind == "constant":
        return Tail.constant()
    try:
        r = float(rate)
    except ValueError:
        raise ConfigError(f"--tail expects kind:rate, got {s!r}") from None
    if kind == "exponential":
        return Tail.exponential(r)
    if kind == "algebraic":
        return Tail.algebraic(r)
    raise ConfigError(f"unknown tail kind {kind!r}")


def build_model(opts: dict) -> PotentialModel:
    params = opts["param"] if isinstance(opts["param"], dict) else _parse_params(opts["param"])
    exprs = [opts["expr_V"], opts["expr_S"], opts["expr_P"]]
    if any(e is not None for e in exprs):
        if opts["model"]:
            raise ConfigError("give either --model or --expr-V/S/P, not both")
        m = float(params.pop("m")) if "m" in params else 1.0
        bindings = {k: _parse_complex(v) for k, v in params.items()}
        limits = _parse_limits(opts["limits"]) if opts["limits"] is not None else None
        tail = _parse_tail(opts["tail"]) if opts["tail"] is not None else None
        return make_from_expressions(*(e or "0" for e in exprs), limits=limits, tail=tail,
                                     bindings=bindings, m=m)
    if not opts["model"]:
        raise ConfigError("a model is required: --model NAME or --expr-V/S/P")
    return make_model(opts["model"], **params)


def _mass(model: PotentialModel) -> float:
    return float(model.params.get("m", 1.0))


def energy_grid(opts: dict, model: PotentialModel) -> list[float]:
    if opts["k_min"] is not None:
        n = int(opts["k_count"] or opts["E_count"] or 1)
        ks = _grid(float(opts["k_min"]), opts["k_max"], n)
        m = _mass(model)
        V, S, P = model.limits.side("+")
        return [float((V + principal_sqrt((m + S) ** 2 + P * P + k * k)).real) for k in ks]
    if opts["E_min"] is None:
        raise ConfigError("an energy grid is required: --E-min [--E-max --E-count]")
    return list(_grid(float(opts["E_min"]), opts["E_max"], int(opts["E_count"])))


def _grid(lo: float, hi, n: int) -> np.ndarray:
    if n < 1:
        raise ConfigError("grid count must be >= 1")
    if n == 1:
        return np.array([lo])
    if hi is None or not lo < float(hi):
        raise ConfigError("grid needs min < max when count > 1")
    return np.linspace(lo, float(hi), n)


def integrator_config(opts: dict) -> IntegratorConfig:
    kw = {}
    if opts["L"] is not None:
        kw["L"] = float(opts["L"])
    if opts["rtol"] is not None:
        kw["rtol"] = float(opts["rtol"])
    return IntegratorConfig(**kw)


# ---------------------------------------------------------------- scatter

def _scatter_row(model: PotentialModel, cfg: IntegratorConfig, E: float) -> dict:
    row = {"E": E}
    try:
        r = scatter(model, PhysicalParams(_mass(model), E), cfg)
    except DiracPTError as exc:
        row.update({c: math.nan for c in CSV_COLUMNS[1:-1]})
        row["pt_exact"] = False
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    km = r.channel.k_minus
    row.update(k_minus_re=km.real, k_minus_im=km.imag,
               T_LR_re=r.T_LR.real, T_LR_im=r.T_LR.imag, abs_T_LR=abs(r.T_LR),
               R_LR_re=r.R_LR.real, R_LR_im=r.R_LR.imag, abs_R_LR=abs(r.R_LR),
               T_RL_re=r.T_RL.real, T_RL_im=r.T_RL.imag, R_RL_re=r.R_RL.real, R_RL_im=r.R_RL.imag,
               nu_phase=r.nu_phase, unitarity_defect=r.unitarity_defect,
               pt_exact=bool(r.pt_exact.holds),
               wronskian_drift=r.wronskian_drift if r.wronskian_drift is not None else math.nan,
               error="")
    return row


def scatter_rows(cfg: RunConfig) -> list[dict]:
    work = lambda E: _scatter_row(cfg.model, cfg.integrator, E)
    if cfg.jobs > 1 and len(cfg.energies) > 1:
        # the compiled kernel releases the GIL; map keeps grid order
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(work, cfg.energies))
    return [work(E) for E in cfg.energies]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        out = []
        for c in CSV_COLUMNS:
            v = row[c]
            if c == "pt_exact":
                out.append("true" if v else "false")
            elif c == "error":
                out.append(v)
            else:
                out.append(fmt(v))
        w.writerow(out)
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def cmd_scatter(cfg: RunConfig) -> int:
    rows = scatter_rows(cfg)
    if cfg.format == "json":
        doc = {"schema": SCHEMA, "model": cfg.model.to_dict(),
               "rows": [{k: _json_value(v) for k, v in r.items()} for r in rows]}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        text = rows_to_csv(rows)
    _emit(text, cfg.out)
    return EXIT_NUMERIC if any(r["error"] for r in rows) else EXIT_OK


# ---------------------------------------------------------------- bound

def _partner_records(model: PotentialModel) -> list:
    """Per-partner levels by shooting, tagged U1/U2."""
    pair = susy.build_pair(model)
    names = ("pseudoscalar1", "pseudoscalar2") if pair.kind == susy.PSEUDOSCALAR else ("scalar1", "scalar2")
    m = _mass(model)
    out = []
    for tag, which in zip(("U1", "U2"), names):
        red = reduce_schrodinger(model, PhysicalParams(m, 1.5 * m), which)
        for rec in boundstates.shoot(red):
            rec.partner = tag
            out.append(rec)
    return out


def bound_records(cfg: RunConfig) -> list[dict]:
    model = cfg.model
    m = _mass(model)
    branches = (1.0, -1.0) if cfg.options.get("negative") else (1.0,)
    recs = []
    for b in branches:
        recs.extend(boundstates.transmission_poles(model, m=m, branch=b, cfg=cfg.integrator))
    partners = cfg.options.get("partners")
    if partners is None:
        # partner spectra are only informative when they differ (unbroken SUSY)
        try:
            partners = susy.build_pair(model).exact
        except WrongPotentialClass:
            partners = False
    if partners:
        recs.extend(_partner_records(model))
    out = [dict(r.summary(), schema=SCHEMA) for r in recs]
    try:
        z = boundstates.zero_energy_classify(model, m, cfg.integrator)
    except ConfigError:
        z = None
    if z is not None and (z.kind == "ZeroMode" or (z.kind and cfg.options.get("threshold"))):
        out.append({"schema": SCHEMA, "E": z.E, "E_imag": 0.0, "kappa": 0.0,
                    "eps_eff": (z.E * z.E - m * m) / (2 * m), "kind": z.kind,
                    "norm_ok": bool(z.normalizable), "method": "threshold", "partner": "",
                    "detail": z.detail})
    return out


def cmd_bound(cfg: RunConfig) -> int:
    recs = bound_records(cfg)
    _emit(json.dumps(recs, indent=1) + "\n", cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------- verify / catalog

def cmd_verify(suite: str, fmt_: str | None, out: str | None) -> int:
    checks, elapsed = verify.main_run(suite)
    doc = dict(verify.as_json(checks), schema=SCHEMA, suite=suite)
    if fmt_ == "json":
        _emit(json.dumps(doc, indent=1) + "\n", out)
    else:
        print(verify.report(checks, elapsed))
        if out:
            _emit(json.dumps(doc, indent=1) + "\n", out)
    return EXIT_OK if doc["passed"] else EXIT_VERIFY


def cmd_catalog(fmt_: str | None, out: str | None) -> int:
    if fmt_ == "json":
        doc = {"schema": SCHEMA, "models": [{"name": e.name, "defaults": e.defaults,
                                             "description": e.description} for e in CATALOG.values()]}
        _emit(json.dumps(doc, indent=1) + "\n", out)
    else:
        lines = []
        for e in CATALOG.values():
            defaults = ", ".join(f"{k}={v}" for k, v in e.defaults.items())
            lines.append(f"{e.name:<18} {e.description}\n{'':<18} defaults: {defaults}")
        _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- argument handling

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diracpt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file of option values; flags override it")
        sp.add_argument("--format", choices=("csv", "json", "text"), default=argparse.SUPPRESS)
        sp.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")

    def model_opts(sp):
        sp.add_argument("--model", default=argparse.SUPPRESS, help="catalog model name")
        sp.add_argument("--param", action="append", default=argparse.SUPPRESS, metavar="K=V",
                        help="model parameter, or DSL binding for expression models (repeatable)")
        for c in "VSP":
            sp.add_argument(f"--expr-{c}", dest=f"expr_{c}", default=argparse.SUPPRESS,
                            help=f"DSL expression for {c}(x)")
        sp.add_argument("--limits", default=argparse.SUPPRESS, metavar="V-,V+,S-,S+,P-,P+")
        sp.add_argument("--tail", default=argparse.SUPPRESS, metavar="KIND[:RATE]",
                        help="exponential:RATE, algebraic:POWER or constant")
        sp.add_argument("--L", type=float, default=argparse.SUPPRESS, help="integration half-box")
        sp.add_argument("--rtol", type=float, default=argparse.SUPPRESS)

    sc = sub.add_parser("scatter", help="T/R over an energy grid")
    common(sc)
    model_opts(sc)
    sc.add_argument("--E-min", dest="E_min", type=float, default=argparse.SUPPRESS)
    sc.add_argument("--E-max", dest="E_max", type=float, default=argparse.SUPPRESS)
    sc.add_argument("--E-count", dest="E_count", type=int, default=argparse.SUPPRESS)
    sc.add_argument("--k-min", dest="k_min", type=float, default=argparse.SUPPRESS)
    sc.add_argument("--k-max", dest="k_max", type=float, default=argparse.SUPPRESS)
    sc.add_argument("--k-count", dest="k_count", type=int, default=argparse.SUPPRESS)
    sc.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker threads")

    bd = sub.add_parser("bound", help="bound states and threshold states")
    common(bd)
    model_opts(bd)
    grp = bd.add_mutually_exclusive_group()
    grp.add_argument("--partners", dest="partners", action="store_true", default=argparse.SUPPRESS,
                     help="add per-partner levels (default: only when SUSY is unbroken)")
    grp.add_argument("--no-partners", dest="partners", action="store_false", default=argparse.SUPPRESS)
    bd.add_argument("--negative", action="store_true", default=argparse.SUPPRESS,
                    help="also search the negative-energy branch")
    bd.add_argument("--threshold", action="store_true", default=argparse.SUPPRESS,
                    help="also report half-bound threshold states")

    vf = sub.add_parser("verify", help="run verification suites")
    common(vf)
    vf.add_argument("suite", nargs="?", default=argparse.SUPPRESS,
                    choices=verify.SUITES + ("all",))

    ct = sub.add_parser("catalog", help="list catalog models")
    common(ct)
    return p


def resolve_options(ns: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    given = vars(ns)
    if given.get("config"):
        try:
            with open(given["config"], encoding="utf-8") as fh:
                file_opts = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {given['config']!r}: {exc}") from None
        for k, v in file_opts.items():
            key = k.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {k!r}")
            opts[key] = v
    for k, v in given.items():
        if k in DEFAULTS:
            opts[k] = v
    opts["command"] = given["command"]
    return opts


def make_run_config(opts: dict) -> RunConfig:
    cmd = opts["command"]
    cfg = RunConfig(cmd, format=opts["format"] or ("json" if cmd == "bound" else "csv"),
                    out=opts["out"], jobs=max(1, int(opts["jobs"] or 1)),
                    options={"partners": opts["partners"], "negative": bool(opts["negative"]),
                             "threshold": bool(opts["threshold"])})
    cfg.model = build_model(opts)
    cfg.integrator = integrator_config(opts)
    if cmd == "scatter":
        cfg.energies = energy_grid(opts, cfg.model)
    return cfg


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        opts = resolve_options(ns)
        if opts["command"] == "verify":
            return cmd_verify(opts["suite"], opts["format"], opts["out"])
        if opts["command"] == "catalog":
            return cmd_catalog(opts["format"], opts["out"])
        cfg = make_run_config(opts)
        return cmd_scatter(cfg) if cfg.command == "scatter" else cmd_bound(cfg)
    except ConfigError as exc:
        print(f"diracpt: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"diracpt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
