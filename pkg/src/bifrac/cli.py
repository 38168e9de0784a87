"""Command-line front end: classification, matrix reduction, numeric
probes, exponent-region sweeps and norm evaluation.

Configs are JSON files with exact rationals written as strings ("3/2",
"inf"); matrices are nested row-major arrays.  Output is byte
deterministic for identical configs and seeds: JSON keys are sorted
and CSV rows are emitted in lexicographic order with LF endings.

Exit codes: 0 bounded / success, 1 unbounded, 2 invalid input or
out-of-hypothesis configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Optional

from .classifier import (Clause, HypothesisError, OperatorConfig, Verdict,
                         classify_bilinear, classify_linear, classify_radial,
                         make_config)
from .exponents import Exponent, homogeneous_lambda
from .functions import descriptor_from_dict, witness_for
from .matrices import (RankDeficientStackError, RationalMatrix,
                       joint_normal_form, rank, single_normal_form)
from .operators import (GridSpec, NonIntegrableError, QuadratureSpec,
                        blowup_probe, default_quad, dilation_slope,
                        eval_bilinear, eval_linear, eval_radial,
                        lq_norm_on_grid)

EXIT_BOUNDED = 0
EXIT_UNBOUNDED = 1
EXIT_INVALID = 2


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization helpers


def _matrix_to_lists(M: RationalMatrix):
    return [[str(v) for v in M.row(i)] for i in range(M.rows)]


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _dump_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(str(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# config parsing


def _require(cfg: dict, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"config is missing required keys: {missing}")


def _resolve_lambda(cfg: dict, n1, n2, m, p1, p2, q):
    raw = cfg.get("lambda", "auto")
    if raw == "auto":
        return homogeneous_lambda(n1, n2, m, p1, p2, q), True
    return Fraction(raw), False


def _bilinear_config(cfg: dict):
    _require(cfg, "n1", "n2", "m", "D1", "D2", "p1", "p2", "q")
    p1 = Exponent.from_value(cfg["p1"])
    p2 = Exponent.from_value(cfg["p2"])
    q = Exponent.from_value(cfg["q"])
    lam, auto = _resolve_lambda(cfg, cfg["n1"], cfg["n2"], cfg["m"],
                                p1, p2, q)
    oc = make_config(cfg["n1"], cfg["n2"], cfg["m"], cfg["D1"], cfg["D2"],
                     p1, p2, q, lam)
    return oc, auto


def _quad_spec(cfg: dict, args, dim: int) -> QuadratureSpec:
    spec = default_quad(dim)
    qc = cfg.get("quad", {})
    fields = ("scheme", "max_depth", "samples", "truncation_radius",
              "target_rel_err", "seed", "base_depth")
    spec = replace(spec, **{k: qc[k] for k in fields if k in qc})
    if args.depth is not None:
        spec = replace(spec, max_depth=args.depth)
    if args.samples is not None:
        spec = replace(spec, samples=args.samples)
    if args.trunc is not None:
        spec = replace(spec, truncation_radius=args.trunc)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    return spec


def _grid_spec(cfg: dict, args) -> GridSpec:
    gc = cfg.get("grid", {})
    grid = GridSpec(**{k: gc[k] for k in ("half_width", "points_per_axis")
                       if k in gc})
    if args.grid is not None:
        grid = replace(grid, points_per_axis=args.grid)
    return grid


def _witness(cfg: dict, key: str):
    witnesses = cfg.get("witnesses", {})
    if key not in witnesses:
        raise ConfigError(f"config is missing witness descriptor {key!r}")
    return descriptor_from_dict(witnesses[key])


# ---------------------------------------------------------------------------
# commands


def cmd_classify(cfg: dict, args) -> int:
    oc, auto = _bilinear_config(cfg)
    verdict = classify_bilinear(oc)
    record = verdict.to_record()
    record["lambda_resolved"] = str(oc.lam) if auto else None
    _emit(_dump_json(record), args.out)
    return EXIT_BOUNDED if verdict.bounded else EXIT_UNBOUNDED


def cmd_reduce(cfg: dict, args) -> int:
    _require(cfg, "D1", "D2")
    D1 = RationalMatrix.from_rows(cfg["D1"])
    D2 = RationalMatrix.from_rows(cfg["D2"])
    if D1.cols != D2.cols:
        raise ConfigError("D1 and D2 must share column count")
    m = D1.cols
    stacked = rank(D1.stack(D2))
    record = {"r1": rank(D1), "r2": rank(D2), "stacked_rank": stacked,
              "m": m}
    s1 = single_normal_form(D1)
    s2 = single_normal_form(D2)
    record["single"] = {
        "D1": {"P": _matrix_to_lists(s1.P), "Q": _matrix_to_lists(s1.Q),
               "r": s1.r, "reconstructs": s1.reconstructs(D1)},
        "D2": {"P": _matrix_to_lists(s2.P), "Q": _matrix_to_lists(s2.Q),
               "r": s2.r, "reconstructs": s2.reconstructs(D2)},
    }
    if stacked == m:
        jf = joint_normal_form(D1, D2)
        record["joint"] = {
            "P1": _matrix_to_lists(jf.P1), "P2": _matrix_to_lists(jf.P2),
            "Q": _matrix_to_lists(jf.Q),
            "block_widths": list(jf.block_widths),
            "reconstructs": jf.reconstructs(D1, D2),
        }
    else:
        record["joint"] = "unavailable"
    _emit(_dump_json(record), args.out)
    return EXIT_BOUNDED


def cmd_sweep(cfg: dict, args) -> int:
    _require(cfg, "n1", "n2", "m", "D1", "D2")
    sweep = cfg.get("sweep", {})
    divisor = sweep.get("divisor", 8)
    if not (isinstance(divisor, int) and 2 <= divisor <= 64):
        raise ConfigError("sweep divisor must be an integer in [2, 64]")
    n1, n2, m = cfg["n1"], cfg["n2"], cfg["m"]
    D1 = RationalMatrix.from_rows(cfg["D1"])
    D2 = RationalMatrix.from_rows(cfg["D2"])
    rows = []
    for i1 in range(divisor + 1):
        for i2 in range(divisor + 1):
            for iq in range(divisor + 1):
                a1 = Fraction(i1, divisor)
                a2 = Fraction(i2, divisor)
                b = Fraction(iq, divisor)
                p1 = Exponent(a1)
                p2 = Exponent(a2)
                q = Exponent(b)
                lam = homogeneous_lambda(n1, n2, m, p1, p2, q)
                try:
                    oc = OperatorConfig(n1, n2, m, D1, D2, p1, p2, q, lam)
                    verdict = classify_bilinear(oc)
                    bounded, clause = verdict.bounded, verdict.clause.value
                except HypothesisError as exc:
                    bounded, clause = False, exc.clause.value
                rows.append((a1, a2, b,
                             "true" if bounded else "false", clause))
    _emit(_dump_csv(("inv_p1", "inv_p2", "inv_q", "bounded", "clause"),
                    rows), args.out)
    return EXIT_BOUNDED


def cmd_probe(cfg: dict, args) -> int:
    oc, auto = _bilinear_config(cfg)
    quad = _quad_spec(cfg, args, oc.n1 + oc.n2)
    grid = _grid_spec(cfg, args)
    verdict = classify_bilinear(oc)
    record = {"verdict": verdict.to_record(),
              "lambda_resolved": str(oc.lam) if auto else None}
    csv_text = None
    if "a_list" in cfg:
        if oc.q.is_infinite:
            raise ConfigError("slope probes require q < inf")
        f1 = _witness(cfg, "f1")
        f2 = _witness(cfg, "f2")
        report = dilation_slope(oc, f1, f2, [float(a) for a in cfg["a_list"]],
                                grid=grid, quad=quad)
        record["dilation"] = report.to_record()
        csv_text = _dump_csv(("a", "ratio", "err"),
                             list(zip(report.dilations, report.ratios,
                                      report.ratio_errors)))
    if not verdict.bounded:
        family = witness_for(oc, verdict.clause)
        ratios = blowup_probe(oc, family, grid=grid, quad=quad)
        monotone = all(b > a for a, b in zip(ratios, ratios[1:]))
        record["blowup"] = {"ratios": ratios,
                            "monotone_growth": monotone}
    text = _dump_json(record)
    if args.out and args.out.endswith(".csv") and csv_text is not None:
        sys.stdout.write(text)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        _emit(text, args.out)
    return EXIT_BOUNDED


def cmd_norm(cfg: dict, args) -> int:
    operator = cfg.get("operator", "bilinear")
    if operator == "bilinear":
        oc, _ = _bilinear_config(cfg)
        quad = _quad_spec(cfg, args, oc.n1 + oc.n2)
        f1 = _witness(cfg, "f1")
        f2 = _witness(cfg, "f2")
        if "x" in cfg:
            est = eval_bilinear(oc, f1, f2, [float(v) for v in cfg["x"]],
                                quad)
        else:
            est = lq_norm_on_grid(oc, f1, f2, _grid_spec(cfg, args), quad)
    elif operator == "linear":
        _require(cfg, "n", "m", "D", "lambda", "x")
        n, m = cfg["n"], cfg["m"]
        quad = _quad_spec(cfg, args, n)
        est = eval_linear(n, m, RationalMatrix.from_rows(cfg["D"]),
                          Fraction(cfg["lambda"]), _witness(cfg, "f"),
                          [float(v) for v in cfg["x"]], quad)
    elif operator == "radial":
        _require(cfg, "n", "m", "lambda", "x")
        n, m = cfg["n"], cfg["m"]
        quad = _quad_spec(cfg, args, n)
        est = eval_radial(n, m, Fraction(cfg["lambda"]), _witness(cfg, "f"),
                          [float(v) for v in cfg["x"]], quad)
    else:
        raise ConfigError(f"unknown operator {operator!r}")
    _emit(_dump_json(est.to_record()), args.out)
    return EXIT_BOUNDED


_COMMANDS = {"classify": cmd_classify, "reduce": cmd_reduce,
             "sweep": cmd_sweep, "probe": cmd_probe, "norm": cmd_norm}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bifrac",
        description="Boundedness classification and numerical probes for "
                    "bilinear fractional integral operators.")
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--mode", choices=sorted(_COMMANDS),
                        help="command mode (overrides the config's mode)")
    parser.add_argument("--out", help="also write the output to this path")
    parser.add_argument("--seed", type=int, help="quadrature seed override")
    parser.add_argument("--depth", type=int,
                        help="adaptive max depth override")
    parser.add_argument("--samples", type=int,
                        help="quasi-random sample count override")
    parser.add_argument("--grid", type=int,
                        help="grid points per axis override")
    parser.add_argument("--trunc", type=float,
                        help="truncation box half-width override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    mode = args.mode or cfg.get("mode")
    if mode not in _COMMANDS:
        print(f"error: unknown or missing mode {mode!r}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return _COMMANDS[mode](cfg, args)
    except (ConfigError, HypothesisError, NonIntegrableError,
            RankDeficientStackError, ValueError, TypeError,
            ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
