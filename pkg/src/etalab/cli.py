"""Command-line front end.

Every run emits a JSON envelope

    {"schema": "etalab/1", "tool_version": ..., "config": {...},
     "result": {...}, "diagnostics": {"warnings": [...], "flagged": [...]}}

to ``--json PATH`` (written atomically) or stdout. Exit codes: 0 success,
2 configuration error, 3 analytic precondition (gap) violated, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .conjugacy import conj_class, sl2z_is_torsion
from .eta import QuadraturePlan, converge_tower, eta_quadrature, eta_spectral_oracle
from .groups import BudgetExceeded, ball, ball_count, psi
from .growth import GrowthConstants, class_growth_rate, growth_rate, uniform_class_growth_rate
from .separation import AtLeast, distinguishes, injective_radius, separation_rate
from .spectral import GapError, line_gap, spectrum_on_cover
from .specs import SpecError, parse_cover, parse_element, parse_group, parse_operator, parse_tower

SCHEMA = "etalab/1"
ENVELOPE_KEYS = ("schema", "tool_version", "config", "result", "diagnostics")

EXIT_OK, EXIT_CONFIG, EXIT_GAP, EXIT_BUDGET = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    action: str | None = None
    group: str | None = None
    tower: str | None = None
    op: str | None = None
    cover: str | None = None
    class_spec: str | None = None
    plan: dict = field(default_factory=dict)
    json_path: str | None = None
    csv_path: str | None = None
    seed: int = 0
    threads: int = 1
    budgets: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


@dataclass
class Diagnostics:
    warnings: list[str] = field(default_factory=list)
    flagged: list[Any] = field(default_factory=list)
    wall_time: float | None = None


def make_envelope(config: RunConfig, result: dict, diag: Diagnostics) -> dict:
    d = asdict(diag)
    if d["wall_time"] is None:
        del d["wall_time"]
    env = {"schema": SCHEMA, "tool_version": __version__, "config": asdict(config), "result": result, "diagnostics": d}
    validate_envelope(env)
    return env


def validate_envelope(env: dict) -> None:
    extra = set(env) - set(ENVELOPE_KEYS)
    missing = set(ENVELOPE_KEYS) - set(env)
    if extra or missing:
        raise ValueError(f"envelope keys: unknown {sorted(extra)}, missing {sorted(missing)}")
    if env["schema"] != SCHEMA:
        raise ValueError(f"schema {env['schema']!r} is not {SCHEMA!r}")
    if set(env["diagnostics"]) - {"warnings", "flagged", "wall_time"}:
        raise ValueError("unknown diagnostics fields")


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, AtLeast):
        return {"at_least": x.value}
    return x


def dumps(env: dict) -> str:
    return json.dumps(_clean(env), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    """CSV cell with the same shortest round-trip repr that json uses."""
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else str(x)
    return str(x)


# --- group ----------------------------------------------------------------------


def _window(s: str | None, default: tuple[int, int]) -> tuple[int, int]:
    if not s:
        return default
    try:
        lo, hi = (int(v) for v in s.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad window {s!r}") from exc
    if lo < 0 or hi - lo < 2:
        raise ConfigError("window needs at least 3 radii")
    return lo, hi


def _class(group, spec: str | None):
    if not spec:
        raise ConfigError("--class is required")
    rep = parse_element(group, spec)
    try:
        return conj_class(group, rep)
    except NotImplementedError as exc:
        raise ConfigError(str(exc)) from exc


def _tower(group, cfg: RunConfig):
    tower = parse_tower(group, cfg.tower)
    for q in tower:
        q.budget = int(cfg.budgets.get("order", q.budget))
    return tower


def cmd_group(cfg: RunConfig, args, diag: Diagnostics) -> dict:
    group = parse_group(cfg.group or "")
    cap = int(cfg.budgets.get("radius", 8))
    if cfg.action == "constants":
        radius = int(cfg.extra.get("radius") or 12)
        # at least five radii by default: shorter fits cannot tell n^d from e^{Kn}
        window = _window(cfg.extra.get("window"), (max(1, min(4, radius - 4)), radius))
        fit = growth_rate(group, window)
        counts = [[k, ball_count(group, k)] for k in range(window[0], window[1] + 1)]
        K_class = 0.0
        K_u = 0.0
        R = 0.0
        class_fit = None
        if cfg.class_spec:
            cls = _class(group, cfg.class_spec)
            cf = class_growth_rate(group, cls, window)
            K_class = cf.rate
            class_fit = asdict(cf)
            if cfg.tower:
                tower = _tower(group, cfg)
                K_u = uniform_class_growth_rate(tower, cls.representative).rate
                R = separation_rate(tower, cls, cap).rate
        gc = GrowthConstants.build(fit.rate, K_class, K_u, R, fit_window=window)
        if fit.subexponential:
            diag.warnings.append("ball growth below the subexponential threshold; K_Gamma reported as 0")
        return {
            "group": group.name,
            "constants": gc.to_dict(),
            "growth_fit": asdict(fit),
            "class_fit": class_fit,
            "separation_rate_R": R,
            "ball_counts": counts,
        }
    cls = _class(group, cfg.class_spec)
    if not cfg.tower:
        raise ConfigError("--tower is required")
    tower = _tower(group, cfg)
    torsion_only = bool(cfg.extra.get("torsion_only"))
    restrict = None
    if torsion_only:
        if group.kind != "sl2z":
            raise ConfigError("--torsion-only applies to sl2z")
        restrict = sl2z_is_torsion
    if cfg.action == "radius":
        rows = []
        for q in tower:
            r = injective_radius(q, cls, cap, restrict)
            rows.append({"quotient": str(q), "order": q.order, "radius": str(r), "radius_value": r.value if isinstance(r, AtLeast) else r, "capped": isinstance(r, AtLeast)})
        out = {"group": group.name, "class": str(cls), "cap": cap, "torsion_only": torsion_only, "rows": rows}
        if group.kind == "sl2z":
            out["psi_of_representative"] = psi(cls.representative)
        return out
    if cfg.action == "seprate":
        sr = separation_rate(tower, cls, cap)
        if sr.lower_bound_only:
            diag.flagged.append("all radii at cap: lower-bound only")
        return {"group": group.name, "class": str(cls), "cap": cap, "R": sr.rate, "lower_bound_only": sr.lower_bound_only, "bounded_classes": sr.bounded_classes, "rows": sr.rows}
    if cfg.action == "distinguish":
        F_radius = int(cfg.extra.get("F_radius") or 3)
        F = ball(group, F_radius)
        k = distinguishes(tower, cls, F)
        if k is None:
            diag.flagged.append("no distinguishing index within the tower")
        return {
            "group": group.name,
            "class": str(cls),
            "F": f"ball of radius {F_radius} ({len(F)} elements)",
            "index": k,
            "quotient": str(tower[k]) if k is not None else None,
            "evidence_only": True,
        }
    raise ConfigError(f"unknown group action {cfg.action!r}")


# --- spectral / eta --------------------------------------------------------------


def _plan(cfg: RunConfig) -> QuadraturePlan:
    try:
        return QuadraturePlan(**{k: v for k, v in cfg.plan.items() if v is not None})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_spectrum(cfg: RunConfig, args, diag: Diagnostics) -> dict:
    op = parse_operator(cfg.op or "")
    cover = parse_cover(cfg.cover or "n=1")
    K = int(cfg.extra.get("kmax") or 16)
    out: dict = {"operator": asdict(op), "gap_certificate": op.gap_certificate}
    if cover.is_line:
        out["line_gap"] = line_gap(op, int(cfg.extra.get("theta_grid") or 64))
        return out
    try:
        data = spectrum_on_cover(op, cover.n, K)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    window = float(cfg.extra.get("window") or 20.0)
    ev = data.eigenvalues
    sel = np.abs(ev) <= window
    if data.flagged:
        diag.flagged.append(f"truncation bound {data.truncation_bound:.3e}")
    out.update({"n": cover.n, "K_max": K, "window": window, "eigenvalues": ev[sel].tolist(), "cell": data.block[sel].tolist(), "truncation_bound": data.truncation_bound, "cover_gap": data.gap})
    return out


def cmd_eta(cfg: RunConfig, args, diag: Diagnostics) -> dict:
    op = parse_operator(cfg.op or "")
    cover = parse_cover(cfg.cover or "n=1")
    a = _int(cfg.class_spec, "class")
    res = eta_quadrature(op, cover, a, _plan(cfg), allow_identity=bool(cfg.extra.get("allow_identity")))
    out = {"operator": asdict(op), "cover": str(cover), "eta": res.to_dict()}
    if res.flagged:
        diag.flagged.append(f"certified error {res.total_error:.3e} above tolerance")
    diag.warnings.extend(res.notes)
    if cfg.extra.get("oracle") and not cover.is_line:
        out["oracle"] = eta_spectral_oracle(op, cover.n, a).to_dict()
    return out


def _int(s: str | None, what: str) -> int:
    try:
        return int(s)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"--{what} must be an integer") from exc


def cmd_converge(cfg: RunConfig, args, diag: Diagnostics) -> dict:
    op = parse_operator(cfg.op or "")
    try:
        ns = [int(x) for x in (cfg.tower or "").split(",") if x]
    except ValueError as exc:
        raise ConfigError("--tower must be a comma-separated list of cover degrees") from exc
    if len(ns) < 2:
        raise ConfigError("a tower needs at least two covers")
    a = _int(cfg.class_spec, "class")
    ref = cfg.extra.get("reference_n")
    rep = converge_tower(op, ns, a, _plan(cfg), line=not cfg.extra.get("no_line"), reference_n=int(ref) if ref else None)
    for i in rep.flagged_rows:
        diag.flagged.append({"row": i, "n": rep.rows[i].n})
    out = rep.to_dict()
    out["csv_columns"] = CSV_COLUMNS
    return out


CSV_COLUMNS = ["n", "eta_n", "quad_err", "tail_bound", "trunc_bound", "eta_line", "abs_diff"]


def converge_csv(result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    line = result["line_value"]
    eta_line = line["value"] if isinstance(line, dict) else None
    for r in result["rows"]:
        e = r["eta"]
        w.writerow([_fmt(v) for v in (r["n"], e["value"], e["quadrature_error"], e["tail_bound"], e["truncation_bound"], eta_line, r["abs_diff"])])
    return buf.getvalue()


def cmd_decay(cfg: RunConfig, args, diag: Diagnostics) -> dict:
    from .decay import DecayError, decay_check

    op = parse_operator(cfg.op or "")
    cover = parse_cover(cfg.cover or "line")
    if cover.is_line and op.gap_certificate <= 0:
        raise GapError("line cover gapless for this family" if op.components == 1 else "no gap certificate on the line")
    mu = float(cfg.extra.get("mu") or 1.5)
    try:
        fit = decay_check(op, cover, mu=mu, raise_on_violation=False)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if fit.violations:
        diag.flagged.extend(f"{v.kind} t={v.t} a={v.a}" for v in fit.violations)
    return {"operator": asdict(op), "cover": str(cover), "fit": fit.to_dict(), "passed": not fit.violations}


def cmd_selftest(cfg: RunConfig, args, diag: Diagnostics) -> dict:
    """Fast sanity checks across the modules."""
    from .eta import eta_closed_form_1comp, sign_integral
    from .groups import free_group, sl2z
    from .quotients import psi_quotient
    from .spectral import CoverSpec, ModelOperator, verify_folding

    checks = {}
    checks["sign_integral"] = all(abs(sign_integral(l) - math.copysign(1, l)) < 1e-10 for l in (0.5, -0.5, 2.0, -2.0))
    checks["free_ball_2"] = ball_count(free_group(2), 2) == 17
    G = sl2z()
    checks["psi_table"] = [psi(G.element(w)) for w in ("", "x", "xx", "yyy", "xxx", "y", "yy", "yyyy", "yyyyy")] == [0, 3, 6, 6, 9, 2, 4, 8, 10]
    q = psi_quotient(G)
    checks["x_not_x3_mod_psi"] = q.pi(G.element("xxx")) not in q.class_of(q.pi(G.element("x")))
    op = ModelOperator(2, 1.0, 0.3, 0.25)
    checks["folding"] = verify_folding(op, 2, 1.0, 0.1, 0.6) < 1e-10
    o1 = ModelOperator(1, 0.0, 0.0, 0.25)
    r = eta_quadrature(o1, CoverSpec.finite(2), 1)
    checks["eta_closed_form"] = abs(r.complex_value - eta_closed_form_1comp(o1, 2, 1)) < 1e-6
    failed = [k for k, v in checks.items() if not v]
    if failed:
        diag.flagged.extend(failed)
    return {"checks": checks, "passed": not failed}


COMMANDS = {"group": cmd_group, "spectrum": cmd_spectrum, "eta": cmd_eta, "converge": cmd_converge, "decay": cmd_decay, "selftest": cmd_selftest}


# --- argument parsing --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message on stderr
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", dest="json_path", metavar="PATH")
    common.add_argument("--tol", type=float)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--wall-time", type=float, help="seconds; exceeding it exits with code 4")
    common.add_argument("--timing", action="store_true", help="record wall time in diagnostics")

    p = _Parser(prog="etalab", description="Delocalized eta invariants on covers and the group constants behind them.")
    p.add_argument("--version", action="version", version=f"etalab {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    g = sub.add_parser("group", parents=[common], help="growth constants, injective radii, separation")
    g.add_argument("action", choices=["constants", "distinguish", "seprate", "separate", "radius"])
    g.add_argument("--group", required=True)
    g.add_argument("--class", dest="class_spec")
    g.add_argument("--tower")
    g.add_argument("--radius", type=int, help="ball radius for constants")
    g.add_argument("--window", help="fit window LO,HI")
    g.add_argument("--cap", type=int, default=8, help="BFS radius cap for injective radii")
    g.add_argument("--F-radius", dest="F_radius", type=int, default=3)
    g.add_argument("--torsion-only", action="store_true")
    g.add_argument("--order-budget", type=int, default=1_000_000)

    s = sub.add_parser("spectrum", parents=[common], help="cover spectrum or line gap")
    s.add_argument("--op", required=True)
    s.add_argument("--cover", default="n=1")
    s.add_argument("--kmax", type=int, default=16)
    s.add_argument("--window", type=float, default=20.0)
    s.add_argument("--theta-grid", dest="theta_grid", type=int, default=64)

    e = sub.add_parser("eta", parents=[common], help="certified delocalized eta")
    e.add_argument("--op", required=True)
    e.add_argument("--cover", default="n=1")
    e.add_argument("--class", dest="class_spec", required=True)
    e.add_argument("--oracle", action="store_true", help="also run the spectral-sum oracle")
    e.add_argument("--allow-identity", action="store_true")
    _plan_args(e)

    c = sub.add_parser("converge", parents=[common], help="tower of covers against the line")
    c.add_argument("--op", required=True)
    c.add_argument("--tower", required=True, help="cover degrees, e.g. 2,4,8,16")
    c.add_argument("--class", dest="class_spec", required=True)
    c.add_argument("--csv", dest="csv_path")
    c.add_argument("--no-line", action="store_true")
    c.add_argument("--reference-n", type=int, help="compare with this finite cover instead of the line")
    _plan_args(c)

    d = sub.add_parser("decay", parents=[common], help="fit dominating functions")
    d.add_argument("--op", required=True)
    d.add_argument("--cover", default="line")
    d.add_argument("--mu", type=float, default=1.5)

    sub.add_parser("selftest", parents=[common], help="quick consistency checks")
    return p


def _plan_args(p):
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-split", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--bloch-nodes", type=int)


def config_from_args(args) -> RunConfig:
    action = getattr(args, "action", None)
    if action == "separate":
        action = "seprate"
    plan = {}
    for key in ("t_min", "t_split", "t_max", "bloch_nodes"):
        if getattr(args, key, None) is not None:
            plan[key] = getattr(args, key)
    if args.tol is not None:
        plan["tol"] = args.tol
    extra = {}
    for key in ("radius", "window", "F_radius", "torsion_only", "kmax", "theta_grid", "oracle", "allow_identity", "no_line", "reference_n", "mu"):
        if hasattr(args, key):
            extra[key] = getattr(args, key)
    budgets = {}
    if hasattr(args, "cap"):
        budgets["radius"] = args.cap
    if hasattr(args, "order_budget"):
        budgets["order"] = args.order_budget
    if args.wall_time is not None:
        budgets["wall_time"] = args.wall_time
    return RunConfig(
        subcommand=args.subcommand,
        action=action,
        group=getattr(args, "group", None),
        tower=getattr(args, "tower", None),
        op=getattr(args, "op", None),
        cover=getattr(args, "cover", None),
        class_spec=getattr(args, "class_spec", None),
        plan=plan,
        json_path=args.json_path,
        csv_path=getattr(args, "csv_path", None),
        seed=args.seed,
        threads=args.threads,
        budgets=budgets,
        extra=extra,
    )


def run(cfg: RunConfig, args=None) -> tuple[int, dict | None]:
    diag = Diagnostics()
    start = time.perf_counter()
    try:
        result = COMMANDS[cfg.subcommand](cfg, args, diag)
    except (SpecError, ConfigError) as exc:
        print(f"etalab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG, None
    except GapError as exc:
        print(f"etalab: {exc}", file=sys.stderr)
        return EXIT_GAP, None
    except BudgetExceeded as exc:
        print(f"etalab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET, None
    elapsed = time.perf_counter() - start
    wall = cfg.budgets.get("wall_time")
    if wall is not None and elapsed > wall:
        print(f"etalab: budget exceeded: wall time {elapsed:.1f}s > {wall}s", file=sys.stderr)
        return EXIT_BUDGET, None
    if args is not None and getattr(args, "timing", False):
        diag.wall_time = elapsed
    return EXIT_OK, make_envelope(cfg, result, diag)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    code, env = run(cfg, args)
    if env is None:
        return code
    text = dumps(env)
    if cfg.json_path:
        atomic_write(cfg.json_path, text)
    else:
        sys.stdout.write(text)
    if cfg.csv_path and cfg.subcommand == "converge":
        atomic_write(cfg.csv_path, converge_csv(_clean(env["result"])))
    return code


if __name__ == "__main__":
    sys.exit(main())
