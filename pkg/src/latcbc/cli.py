"""Command-line interface.

Subcommands: construct, error, bound, verify, points, compare.  Every option
can also come from a JSON file passed with ``--config``; flags win.

Exit codes: 0 success, 1 construction infeasible, 2 configuration error,
3 bound violation.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import DEFAULT_GRID, BoundViolation, bound_report, verify_construction
from .cbc import cbc_construct
from .exclusions import KINDS, ExclusionError, ExclusionPolicy
from .korobov import SmoothnessAlpha, Weights, error_sq, error_sq_bruteforce
from .numtheory import ModulusContext

EXIT_OK, EXIT_INFEASIBLE, EXIT_CONFIG, EXIT_VIOLATION = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


_POWER_RE = re.compile(r"^\s*([0-9.eE+-]+)\s*\^\s*j\s*$")
_INVERSE_RE = re.compile(r"^\s*1\s*/\s*j\s*\^\s*([0-9.eE+-]+)\s*$")


def parse_weights(spec, s: int) -> list[float]:
    """Explicit list (``"1,0.5"`` or a JSON list), ``"c^j"`` or ``"1/j^a"``."""
    if spec is None:
        raise ConfigError("weights: missing")
    if isinstance(spec, (list, tuple)):
        vals = [float(x) for x in spec]
    else:
        text = str(spec)
        m = _POWER_RE.match(text)
        m2 = _INVERSE_RE.match(text)
        try:
            if m:
                c = float(m.group(1))
                vals = [c**j for j in range(1, s + 1)]
            elif m2:
                p = float(m2.group(1))
                vals = [j**-p for j in range(1, s + 1)]
            else:
                vals = [float(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"weights: cannot parse {text!r}") from exc
    if len(vals) < s:
        raise ConfigError(f"weights: {len(vals)} values given but s = {s}")
    if any(not (v >= 0.0) or math.isinf(v) for v in vals):
        raise ConfigError("weights: values must be finite and nonnegative")
    return vals[:s]


def _int_list(text, field: str) -> list[int]:
    if isinstance(text, (list, tuple)):
        items = text
    else:
        items = [x for x in str(text).split(",") if x.strip()]
    try:
        return [int(x) for x in items]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{field}: expected comma-separated integers, got {text!r}") from exc


@dataclass
class RunConfig:
    N: int
    s: int
    alpha: float
    weights: list[float]
    weights_spec: object
    policy: ExclusionPolicy
    lambda_grid: int = DEFAULT_GRID
    method: str = "auto"

    @property
    def ctx(self) -> ModulusContext:
        return ModulusContext(self.N)

    @property
    def w(self) -> Weights:
        return Weights.product(self.weights)


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    return data


def _pick(args, conf: dict, name: str, default=None):
    val = getattr(args, name, None)
    if val is None:
        val = conf.get(name, default)
    return val


def _policy(args, conf: dict, kind=None) -> ExclusionPolicy:
    raw = conf.get("policy")
    base = dict(raw) if isinstance(raw, dict) else {"kind": raw} if raw else {}
    if kind is not None:
        base["kind"] = kind
    elif getattr(args, "policy", None) is not None:
        base["kind"] = args.policy
    for key in ("delta", "s_star", "explicit"):
        val = getattr(args, key, None)
        if val is None:
            val = conf.get(key)
        if val is not None:
            base[key] = val
    if isinstance(base.get("explicit"), str):
        try:
            base["explicit"] = json.loads(base["explicit"])
        except json.JSONDecodeError as exc:
            raise ConfigError(f"explicit: invalid JSON: {exc}") from exc
    base.setdefault("kind", "none")
    try:
        return ExclusionPolicy.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"policy: {exc}") from exc


def _run_config(args, conf: dict, need_s: bool = True) -> RunConfig:
    try:
        N = int(_pick(args, conf, "N"))
    except (TypeError, ValueError):
        raise ConfigError("N: missing or not an integer") from None
    if N < 2:
        raise ConfigError("N: must be >= 2")
    s_raw = _pick(args, conf, "s")
    if s_raw is None and need_s:
        raise ConfigError("s: missing")
    s = int(s_raw) if s_raw is not None else 0
    if need_s and s < 1:
        raise ConfigError("s: must be >= 1")
    try:
        alpha = float(_pick(args, conf, "alpha", 2.0))
        SmoothnessAlpha(alpha)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"alpha: {exc}") from exc
    spec = _pick(args, conf, "weights")
    weights = parse_weights(spec, s) if need_s else []
    grid = int(_pick(args, conf, "lambda_grid", DEFAULT_GRID))
    if grid < 2:
        raise ConfigError("lambda_grid: must be >= 2")
    method = _pick(args, conf, "method", "auto")
    if method not in ("auto", "naive", "fft"):
        raise ConfigError(f"method: unknown value {method!r}")
    return RunConfig(N, s, alpha, weights, spec, _policy(args, conf), grid, method)


def _dump_json(obj, path) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _construct(cfg: RunConfig, policy: ExclusionPolicy):
    if not SmoothnessAlpha(cfg.alpha).closed_form_available:
        raise ConfigError(f"alpha: construction needs alpha in (2, 4, 6), got {cfg.alpha}")
    return cbc_construct(cfg.N, cfg.s, cfg.w, cfg.alpha, policy, method=cfg.method)


def artifact_dict(cfg: RunConfig, result, policy: ExclusionPolicy) -> dict:
    return {
        "N": cfg.N,
        "s": cfg.s,
        "alpha": cfg.alpha,
        "weights": cfg.weights,
        "weights_spec": cfg.weights_spec if isinstance(cfg.weights_spec, (str, list)) else None,
        "policy": policy.to_dict(),
        "g": result.g,
        "e2_trace": result.e2_trace,
        "exclusion_sizes": result.exclusion_sizes,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def cmd_construct(args) -> int:
    cfg = _run_config(args, _load_config(args.config))
    result = _construct(cfg, cfg.policy)
    out = _pick(args, {}, "output") or "lattice.json"
    _dump_json(artifact_dict(cfg, result, cfg.policy), out)
    print(f"g = {result.g}")
    print(f"e2 = {result.e2_trace[-1]!r}")
    return EXIT_OK


def load_vector(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
        data["g"] = [int(x) for x in data["g"]]
        data["N"] = int(data["N"])
        data["alpha"] = float(data["alpha"])
        data["weights"] = [float(x) for x in data["weights"]]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"vector: cannot load {path}: {exc}") from exc
    data.setdefault("exclusion_sizes", [0] * (len(data["g"]) - 1))
    return data


def _vector_arg(args, conf):
    path = _pick(args, conf, "vector")
    if path is None:
        raise ConfigError("vector: missing (pass --vector FILE)")
    return load_vector(path)


def cmd_verify(args) -> int:
    conf = _load_config(args.config)
    vec = _vector_arg(args, conf)
    ctx = ModulusContext(vec["N"])
    g = vec["g"]
    w = Weights.product(vec["weights"])
    grid = int(_pick(args, conf, "lambda_grid", DEFAULT_GRID))
    try:
        # recompute from the vector itself so an edited file cannot pass on stale numbers
        e2 = [error_sq(g[:d], ctx, w, vec["alpha"]) for d in range(1, len(g) + 1)]
    except ValueError as exc:
        raise ConfigError(f"vector: {exc}") from exc
    code = EXIT_OK
    try:
        report = verify_construction(g, e2, vec["exclusion_sizes"], w, vec["alpha"], ctx, grid)
    except BoundViolation as exc:
        report = exc.report
        print(f"bound violated at dimension {exc.dimension}", file=sys.stderr)
        code = EXIT_VIOLATION
    data = {"N": ctx.N, "alpha": vec["alpha"], "g": g, **report.to_dict()}
    _dump_json(data, _pick(args, conf, "output") or "-")
    return code


def format_point(x: float) -> str:
    return f"{x:.17g}"


def lattice_points(N: int, g, tent: bool = False) -> np.ndarray:
    n = np.arange(N, dtype=np.int64)[:, None]
    pts = ((n * np.asarray(g, dtype=np.int64)[None, :]) % N) / N
    if tent:
        pts = 1.0 - np.abs(2.0 * pts - 1.0)
    return pts


def cmd_points(args) -> int:
    conf = _load_config(args.config)
    vec = _vector_arg(args, conf)
    tent = bool(args.tent or conf.get("tent", False))
    pts = lattice_points(vec["N"], vec["g"], tent)
    buf = io.StringIO()
    for row in pts:
        buf.write(" ".join(format_point(x) for x in row))
        buf.write("\n")
    out = _pick(args, conf, "output")
    if out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue())
    return EXIT_OK


def cmd_error(args) -> int:
    conf = _load_config(args.config)
    g = _int_list(_pick(args, conf, "g"), "g")
    args.s = args.s if args.s is not None else conf.get("s", len(g))
    cfg = _run_config(args, conf)
    if len(g) > cfg.s:
        raise ConfigError(f"g: {len(g)} components but s = {cfg.s}")
    ctx, w = cfg.ctx, cfg.w
    bad = [x for x in g if not ctx.is_unit(x)]
    if bad:
        raise ConfigError(f"g: components {bad} are not units modulo {cfg.N}")
    out = {"N": cfg.N, "alpha": cfg.alpha, "g": g}
    out["closed_form"] = (
        error_sq(g, ctx, w, cfg.alpha) if SmoothnessAlpha(cfg.alpha).closed_form_available else None
    )
    H = _pick(args, conf, "trunc")
    if H is not None:
        try:
            out["bruteforce"] = error_sq_bruteforce(g, ctx, w, cfg.alpha, int(H))
        except ValueError as exc:
            raise ConfigError(f"trunc: {exc}") from exc
        out["trunc"] = int(H)
    _dump_json(out, _pick(args, conf, "output") or "-")
    return EXIT_OK


def cmd_bound(args) -> int:
    conf = _load_config(args.config)
    cfg = _run_config(args, conf)
    sizes_raw = _pick(args, conf, "excl_sizes")
    sizes = _int_list(sizes_raw, "excl_sizes") if sizes_raw is not None else [0] * (cfg.s - 1)
    if len(sizes) != cfg.s - 1:
        raise ConfigError(f"excl_sizes: need s - 1 = {cfg.s - 1} values (|E_2|..|E_s|)")
    delta = _pick(args, conf, "bound_delta")
    try:
        report = bound_report(cfg.s, cfg.w, cfg.alpha, cfg.ctx.phi, sizes, cfg.lambda_grid,
                              delta=None if delta is None else float(delta))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _dump_json({"N": cfg.N, "alpha": cfg.alpha, **report.to_dict()}, _pick(args, conf, "output") or "-")
    return EXIT_OK


def projection_counts(g, N: int, d: int) -> tuple[int, int]:
    """(components among the first d equal to an earlier one,
    pairs i < j <= d with g_i + g_j = 0 mod N)."""
    prefix = g[:d]
    repeated = sum(1 for j in range(d) if prefix[j] in prefix[:j])
    anti = sum(1 for i in range(d) for j in range(i + 1, d) if (prefix[i] + prefix[j]) % N == 0)
    return repeated, anti


COMPARE_FIELDS = ("policy", "d", "g_d", "exclusion_size", "e2", "bound", "lambda_star",
                  "repeated", "antidiagonal_pairs")


def compare_rows(cfg: RunConfig, kinds) -> list[dict]:
    rows = []
    for kind in kinds:
        policy = ExclusionPolicy.from_dict({**cfg.policy.to_dict(), "kind": kind})
        result = _construct(cfg, policy)
        report = bound_report(cfg.s, cfg.w, cfg.alpha, cfg.ctx.phi, result.exclusion_sizes,
                              cfg.lambda_grid, result.e2_trace)
        for row in report.rows:
            d = row.d
            rep, anti = projection_counts(result.g, cfg.N, d)
            rows.append({
                "policy": kind,
                "d": d,
                "g_d": result.g[d - 1],
                "exclusion_size": result.exclusion_sizes[d - 2] if d > 1 else 0,
                "e2": row.e2,
                "bound": row.bound,
                "lambda_star": row.lambda_star,
                "repeated": rep,
                "antidiagonal_pairs": anti,
            })
    return rows


def cmd_compare(args) -> int:
    conf = _load_config(args.config)
    cfg = _run_config(args, conf)
    raw = _pick(args, conf, "policies", "none,no_repeat,no_diagonal")
    kinds = [k.strip() for k in (raw if isinstance(raw, list) else str(raw).split(",")) if k.strip()]
    if len(kinds) < 2:
        raise ConfigError("policies: name at least two policies")
    unknown = [k for k in kinds if k not in KINDS]
    if unknown:
        raise ConfigError(f"policies: unknown {unknown}")
    if "no_diagonal_capped" in kinds and cfg.policy.s_star is None:
        raise ConfigError("s_star: required for no_diagonal_capped")
    rows = compare_rows(cfg, kinds)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COMPARE_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    out = _pick(args, conf, "output")
    if out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue())
    return EXIT_OK


def _add_problem_args(p, with_policy=True):
    p.add_argument("--config", help="JSON file with default values for any option")
    p.add_argument("--N", type=int, help="modulus (number of points)")
    p.add_argument("--s", type=int, help="dimension")
    p.add_argument("--alpha", type=float, help="smoothness (closed form for 2, 4, 6)")
    p.add_argument("--weights", help='product weights: "1,0.5,...", "c^j" or "1/j^a"')
    p.add_argument("--lambda-grid", dest="lambda_grid", type=int, help="lambda grid size")
    if with_policy:
        p.add_argument("--policy", choices=KINDS)
        p.add_argument("--delta", type=float, help="budget: max |E_d| / phi(N)")
        p.add_argument("--s-star", dest="s_star", type=int, help="cap for no_diagonal_capped")
        p.add_argument("--explicit", help='JSON: {"2": [..], "3": [..]} or list of lists')
        p.add_argument("--method", choices=("auto", "naive", "fft"))
    p.add_argument("-o", "--output", help="output path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latcbc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a generating vector")
    _add_problem_args(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("error", help="squared worst-case error of a given vector")
    _add_problem_args(p, with_policy=False)
    p.add_argument("--g", help="generating vector, comma separated")
    p.add_argument("--trunc", type=int, help="also evaluate the truncated dual sum with this H")
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("bound", help="evaluate the error bound for given exclusion sizes")
    _add_problem_args(p, with_policy=False)
    p.add_argument("--excl-sizes", dest="excl_sizes", help="|E_2|,...,|E_s|")
    p.add_argument("--delta", dest="bound_delta", type=float,
                   help="also report the uniform-delta bound")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="check a constructed vector against the bound")
    p.add_argument("--config")
    p.add_argument("--vector", help="JSON file written by construct")
    p.add_argument("--lambda-grid", dest="lambda_grid", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("points", help="write the lattice point set")
    p.add_argument("--config")
    p.add_argument("--vector", help="JSON file written by construct")
    p.add_argument("--tent", action="store_true", help="apply x -> 1 - |2x - 1|")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("compare", help="CSV comparison of exclusion policies")
    _add_problem_args(p)
    p.add_argument("--policies", help="comma separated policy kinds")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExclusionError as exc:
        print(f"construction infeasible at dimension {exc.dimension}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
