"""Command-line entry point.

Subcommands: ``field``, ``ortho``, ``extremal``, ``table``, ``verify``.
Exit codes: 0 pass, 1 fail, 2 budget skip, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import extremal as ex
from . import verify
from .ffgeom import GeometryError, gaussian_binomial
from .gf import FieldError
from .linalg_k import (
    OrthogonalityError,
    c_matrix_criterion,
    definitional_orthogonality_falsifier,
    hadamard_bound,
    hadamard_equality,
    pair_orthogonal,
    parse_vector,
    residue_rank,
    set_orthogonal,
    vector_to_str,
    wedge_norm,
)
from .valued import (
    ParseError,
    PrecisionError,
    ValuedError,
    ValuedFieldSpec,
    absval,
    elem_to_str,
    gamma,
    laurent,
    padic,
    parse_elem,
    ve_add,
    ve_div,
    ve_mul,
    ve_sub,
    valuation,
)

EXIT_OK, EXIT_FAIL, EXIT_SKIP, EXIT_USAGE = 0, 1, 2, 64
FORMATS = ("md", "csv", "jsonl")
CONFIG_ENV = "ULTRAORTHO_CONFIG"


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    backend: str = "laurent"
    base: int = 2
    precision: int = 4
    profile: str = "default"
    format: str = "md"
    cache: Optional[str] = None
    workers: int = 1

    def validate(self) -> "CliConfig":
        if self.backend not in ("laurent", "padic"):
            raise UsageError(f"backend must be laurent or padic, got {self.backend!r}")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        if self.precision < 1:
            raise UsageError("precision must be >= 1")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        return self

    def field(self) -> ValuedFieldSpec:
        try:
            if self.backend == "laurent":
                return laurent(self.base, self.precision)
            return padic(self.base, self.precision)
        except (FieldError, ValuedError) as exc:
            raise UsageError(str(exc)) from None


_INT_KEYS = {"base", "precision", "workers"}


def read_config_file(path: str) -> Dict[str, str]:
    """``key=value`` lines; ``#`` starts a comment."""
    out = {}
    known = {f.name for f in fields(CliConfig)}
    with open(path) as fh:
        for no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{no}: expected key=value")
            key, value = (t.strip() for t in line.split("=", 1))
            if key not in known:
                raise UsageError(f"{path}:{no}: unknown key {key!r}")
            out[key] = value
    return out


def build_config(args: argparse.Namespace) -> CliConfig:
    """Defaults < config file < environment < command-line flags."""
    cfg = CliConfig()
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        try:
            raw = read_config_file(path)
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        try:
            cfg = replace(cfg, **{k: int(v) if k in _INT_KEYS else v for k, v in raw.items()})
        except ValueError as exc:
            raise UsageError(f"bad config value: {exc}") from None
    env_cache = os.environ.get(ex.ResultCache.ENV)
    if env_cache:
        cfg.cache = env_cache
    for name in ("backend", "base", "precision", "profile", "format", "cache", "workers"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    return cfg.validate()


# -- output --

def emit(rows: List[Dict[str, object]], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if not rows:
        return
    cols = list(rows[0])
    if fmt == "jsonl":
        for r in rows:
            out.write(json.dumps(r, sort_keys=False) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        out.write(buf.getvalue())
    else:
        cells = [[_cell(r[c]) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        out.write("| " + " | ".join(c.ljust(w) for c, w in zip(cols, widths)) + " |\n")
        out.write("|" + "|".join("-" * (w + 2) for w in widths) + "|\n")
        for row in cells:
            out.write("| " + " | ".join(v.ljust(w) for v, w in zip(row, widths)) + " |\n")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- field --

def cmd_field(args, cfg: CliConfig) -> int:
    K = cfg.field()
    if args.action == "info":
        F = K.residue
        emit([{"backend": K.backend, "residue_order": F.q, "characteristic": F.p,
               "modulus": F.modulus_str(), "uniformizer": K.pi_name, "precision": K.precision}], cfg.format)
        return EXIT_OK
    if args.action == "eval":
        if len(args.operands) != 1:
            raise UsageError("field eval takes one element")
        a = parse_elem(K, args.operands[0])
        emit([_elem_row(a)], cfg.format)
        return EXIT_OK
    if len(args.operands) != 2:
        raise UsageError(f"field {args.action} takes two elements")
    a, b = (parse_elem(K, t) for t in args.operands)
    op = {"add": ve_add, "sub": ve_sub, "mul": ve_mul, "div": ve_div}[args.action]
    emit([_elem_row(op(a, b))], cfg.format)
    return EXIT_OK


def _elem_row(a) -> Dict[str, object]:
    nu = valuation(a)
    return {"value": elem_to_str(a), "valuation": "inf" if nu == float("inf") else nu,
            "norm": str(absval(a)), "residue": str(gamma(a)) if nu >= 0 else "-"}


# -- ortho --

def cmd_ortho(args, cfg: CliConfig) -> int:
    K = cfg.field()
    vs = [parse_vector(K, t) for t in args.vectors]
    mode = args.mode
    if mode == "pair":
        if len(vs) != 2:
            raise UsageError("ortho pair takes exactly two vectors")
        ok = pair_orthogonal(vs[0], vs[1])
        emit([{"mode": mode, "orthogonal": ok, "verdict": _verdict(ok)}], cfg.format)
    elif mode == "set":
        ok = set_orthogonal(vs)
        emit([{"mode": mode, "residue_rank": residue_rank(vs), "size": len(vs),
               "minor_criterion": c_matrix_criterion(vs), "orthogonal": ok, "verdict": _verdict(ok)}],
             cfg.format)
    elif mode == "wedge":
        norm, bound = wedge_norm(vs), hadamard_bound(vs)
        ok = hadamard_equality(vs)
        emit([{"mode": mode, "wedge_norm": str(norm), "hadamard_bound": str(bound),
               "orthogonal": ok, "verdict": _verdict(ok)}], cfg.format)
    else:
        verdict = definitional_orthogonality_falsifier(vs, args.depth)
        emit([{"mode": mode, "depth": args.depth, "found": verdict.found, "counterexample": str(verdict),
               "verdict": "not orthogonal" if verdict.found else "no counterexample at this depth"}],
             cfg.format)
        return EXIT_OK
    return EXIT_OK


def _verdict(ok: bool) -> str:
    return "orthogonal" if ok else "not orthogonal"


# -- extremal --

def _parse_extremal_params(quantity: str, nums: Sequence[int]):
    if quantity == "omega":
        if len(nums) != 5:
            raise UsageError("omega takes q n s k l")
        q, n, s, k, l = nums
    else:
        if len(nums) != 4:
            raise UsageError(f"{quantity} takes q n k l")
        (q, n, k, l), s = nums, 0
    return q, n, s, k, l


def run_extremal(quantity: str, q: int, n: int, s: int, k: int, l: int, cfg: CliConfig,
                 cache: Optional[ex.ResultCache] = None, symmetry: bool = False) -> ex.ExtremalResult:
    if cache is not None:
        hit = cache.lookup(quantity, q, n, s, k, l)
        if hit is not None:
            return hit
    prof = verify.get_profile(cfg.profile)
    K = laurent(q, cfg.precision) if quantity in ("delta", "omega", "theta", "gamma") else None
    res = ex.solve(quantity, q, n, k, l, s=s, K=K, workers=cfg.workers, symmetry=symmetry or None,
                   node_limit=prof["node_limit"], budget=prof["subset_budget"])
    if cache is not None:
        cache.store(res)
    return res


def cmd_extremal(args, cfg: CliConfig) -> int:
    quantity = args.quantity.lower()
    if quantity not in ex.QUANTITIES:
        raise UsageError(f"unknown quantity {quantity!r}; expected one of {', '.join(ex.QUANTITIES)}")
    q, n, s, k, l = _parse_extremal_params(quantity, args.params)
    cache = ex.ResultCache(cfg.cache) if cfg.cache else None
    res = run_extremal(quantity, q, n, s, k, l, cfg, cache, args.symmetry)
    row = {"quantity": quantity, "q": q, "n": n, "s": s, "k": k, "l": l, "value": res.value,
           "method": res.method, "validation": res.validation}
    if args.witness and cfg.format != "md":
        row["witness"] = res.witness
    emit([row], cfg.format)
    if args.witness and cfg.format == "md":
        sys.stdout.write("\n```json\n" + ex.canonical_witness(res) + "\n```\n")
    return EXIT_OK


# -- table --

def parse_range(text: str) -> List[int]:
    """``3``, ``2..6`` or ``2,3,5``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError(f"empty range {text!r}")
    return out


def table_rows(quantity: str, qs, ns, ss, ks, ls, cfg: CliConfig) -> List[Dict[str, object]]:
    rows = []
    cache = ex.ResultCache(cfg.cache) if cfg.cache else None
    for q in qs:
        for n in ns:
            for s in (ss if quantity == "omega" else [0]):
                for l in ls:
                    for k in ks:
                        if k < l:
                            continue
                        res = run_extremal(quantity, q, n, s, k, l, cfg, cache)
                        row = {"quantity": quantity, "q": q, "n": n, "s": s, "k": k, "l": l, "value": res.value}
                        row.update(_bound_columns(quantity, q, n, s, k, l, res.value))
                        rows.append(row)
    return rows


def _bound_columns(quantity, q, n, s, k, l, value) -> Dict[str, object]:
    if quantity in ("delta", "omega"):
        m = (q ** n - 1) // (q - 1) if quantity == "delta" else gaussian_binomial(n, s, q)
        lo, hi = ex.sandwich_bounds(m, k, l)
        return {"lower": lo, "upper": hi}
    if quantity == "theta":
        lower = Fraction(q ** n - 1, q ** (l - 1) - 1) if l >= 2 else None
        return {"ratio": _frac(Fraction(value, k)), "ratio_lower": _frac(lower) if lower else "-",
                "ratio_upper": q ** n - 1}
    full = q ** n - 1 if quantity == "ind" else (q ** n - 1) // (q - 1)
    return {"full": full}


def cmd_table(args, cfg: CliConfig) -> int:
    quantity = args.quantity.lower()
    if quantity not in ex.QUANTITIES:
        raise UsageError(f"unknown quantity {quantity!r}; expected one of {', '.join(ex.QUANTITIES)}")
    try:
        grids = [parse_range(t) for t in (args.q, args.n, args.s, args.k, args.l)]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    emit(table_rows(quantity, *grids, cfg), cfg.format)
    return EXIT_OK


# -- verify --

def cmd_verify(args, cfg: CliConfig) -> int:
    if args.list:
        emit([{"check": c, "summary": verify.REGISTRY[c].summary} for c in verify.list_checks()], cfg.format)
        return EXIT_OK
    try:
        verify.get_profile(cfg.profile)
    except verify.UnknownProfile as exc:
        raise UsageError(exc.args[0]) from None
    if args.check and args.params:
        try:
            grid = [json.loads(args.params)]
        except json.JSONDecodeError as exc:
            raise UsageError(f"--params is not JSON: {exc}") from None
        reports = [verify.run_check(args.check[0], grid=grid, profile=cfg.profile)]
        summary = verify.Summary(cfg.profile, reports, reports[0].elapsed)
    else:
        summary = verify.run_all(cfg.profile, workers=cfg.workers, ids=args.check or None)
    if cfg.format == "md":
        print(summary.table())
    elif cfg.format == "jsonl":
        for line in summary.records():
            print(line)
    else:
        emit([{k: v for k, v in r.record().items() if k not in ("counterexamples", "notes")}
              for r in summary.reports], "csv")
    return summary.exit_code


# -- parser --

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's unset flags from hiding top-level ones
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="key=value config file (also $%s)" % CONFIG_ENV)
    common.add_argument("--backend", choices=("laurent", "padic"))
    common.add_argument("--base", type=int, help="residue order q (laurent) or prime p (padic)")
    common.add_argument("--precision", type=int, help="retained digits N")
    common.add_argument("--profile", help="budget profile: tiny, default, extended")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--cache", help="result cache path (also $%s)" % ex.ResultCache.ENV)
    common.add_argument("--workers", type=int)

    p = _Parser(prog="ultraortho", description="Ultrametric orthogonality and extremal set sizes.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("field", parents=[common], help="valued-field arithmetic")
    f.add_argument("action", choices=("info", "eval", "add", "sub", "mul", "div"))
    f.add_argument("operands", nargs="*")
    f.set_defaults(func=cmd_field)

    o = sub.add_parser("ortho", parents=[common], help="orthogonality tests")
    o.add_argument("mode", choices=("pair", "set", "wedge", "falsify"))
    o.add_argument("vectors", nargs="+", help='vector literals such as "(1, x^-1)"')
    o.add_argument("--depth", type=int, default=1, help="falsifier digit depth")
    o.set_defaults(func=cmd_ortho)

    e = sub.add_parser("extremal", parents=[common], help="one extremal value")
    e.add_argument("quantity", help=", ".join(ex.QUANTITIES))
    e.add_argument("params", nargs="+", type=int, help="q n k l (omega: q n s k l)")
    e.add_argument("--witness", action="store_true")
    e.add_argument("--symmetry", action="store_true", help="fix e_1..e_l in the search")
    e.set_defaults(func=cmd_extremal)

    t = sub.add_parser("table", parents=[common], help="extremal values over a grid")
    t.add_argument("quantity")
    t.add_argument("--q", default="2")
    t.add_argument("--n", default="2")
    t.add_argument("--s", default="1")
    t.add_argument("--k", default="2..4")
    t.add_argument("--l", default="2")
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("verify", parents=[common], help="replay every registered check")
    v.add_argument("--check", action="append", help="run only this check id (repeatable)")
    v.add_argument("--params", help="JSON parameter dict replayed against a single --check")
    v.add_argument("--list", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"ultraortho: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"ultraortho: parse error at position {exc.pos}: {exc.msg}", file=sys.stderr)
        return EXIT_USAGE
    except (ex.ParameterError, OrthogonalityError, verify.UnknownCheck, ValuedError, FieldError,
            GeometryError) as exc:
        print(f"ultraortho: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionError as exc:
        print(f"ultraortho: precision error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ex.BudgetExceeded as exc:
        print(f"ultraortho: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_SKIP


if __name__ == "__main__":
    sys.exit(main())
