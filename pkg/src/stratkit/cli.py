"""Command-line interface: every subcommand wraps one library operation and prints JSON.

Exit codes: 0 success, 1 bad input (a JSON error object is printed), 2 an
internal consistency check failed.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import redirect_stdout
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import beta as B
from . import filtcalc as FC
from . import hn as H
from . import minnorm as MN
from . import series as S
from . import strata_census as SC
from ._json import dumps, frac_str, parse_frac, parse_int
from .errors import InputError, InvariantError, StratError
from .poset import covering_pairs, to_dot


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with status 2
        raise InputError(message)


def _load(text: str | None, what: str) -> Any:
    if text is None:
        raise InputError(f"missing {what}")
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {text[1:]}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON for {what}: {exc}") from exc


def _primary(args: argparse.Namespace, what: str) -> Any:
    if getattr(args, "file", None) is not None:
        return _load("@" + args.file, what)
    return _load(getattr(args, "json", None), what)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise InputError(f"expected a comma-separated list of integers, got {text!r}") from exc


def _weights(args: argparse.Namespace) -> B.WeightSystem:
    if args.weights is not None:
        return B.WeightSystem.from_json(_load(args.weights, "weights"))
    if None in (args.g, args.n, args.d, args.mults, args.atoms):
        raise InputError("give --weights, or all of --g --n --d --mults --atoms")
    return B.build_weight_system(args.g, args.n, args.d, _ints(args.mults), _ints(args.atoms))


def _hasse(items: list, compare: Callable, fmt: str) -> Any:
    edges = covering_pairs(items, compare)
    labels = [dumps(x.to_json()) for x in items]
    if fmt == "dot":
        return to_dot(labels, edges)
    return {"nodes": [x.to_json() for x in items], "edges": [[lo, hi] for lo, hi in edges]}


# ---------------------------------------------------------------------------
# handlers


def _hn_enumerate(a):
    return [mu.to_json() for mu in H.enumerate_hn_types(a.n, a.d, a.g, a.max_codim)]


def _hn_codim(a):
    return {"codim": H.hn_codim(H.HNType.from_json(_primary(a, "HN type")), a.g)}


def _hn_compare(a):
    x = H.HNType.from_json(_load(a.a, "first type"))
    y = H.HNType.from_json(_load(a.b, "second type"))
    return {"relation": H.hn_compare(x, y).value}


def _hn_hasse(a):
    return _hasse(H.enumerate_hn_types(a.n, a.d, a.g, a.max_codim), H.hn_compare, a.format)


def _poincare(a):
    return S.poincare_M(a.n, a.d, a.g, a.truncation).to_json()


def _census_reductive(a):
    return [c.to_json() for c in SC.census(a.n, a.d)]


def _census_group_data(a):
    cls = SC.ReductiveClass.from_json(_primary(a, "reductive class"))
    return SC.group_data(cls, a.d_eff, a.g).to_json()


def _census_mumford(a):
    return [e.to_json() for e in SC.mumford_census(a.n, a.d, a.g)]


def _jh_enumerate(a):
    return [x.to_json() for x in SC.enumerate_jh_indices(a.n, a.d, a.g, a.max_codim)]


def _jh_validate(a):
    return SC.validate_jh_index(_primary(a, "index")).to_json()


def _jh_codim(a):
    x = SC.validate_jh_index(_primary(a, "index"))
    return {"codim": SC.jh_codim(x, a.g, a.variant), "variant": a.variant}


def _jh_compare(a):
    x = SC.validate_jh_index(_load(a.a, "first index"))
    y = SC.validate_jh_index(_load(a.b, "second index"))
    return {"relation": SC.jh_compare(x, y).value}


def _jh_hasse(a):
    return _hasse(SC.enumerate_jh_indices(a.n, a.d, a.g, a.max_codim), SC.jh_compare, a.format)


def _beta_from_partition(a):
    ws = _weights(a)
    return B.beta_from_partition(B.IndexedPartition.from_json(_primary(a, "partition")), ws).to_json()


def _beta_of_index(a):
    x = SC.validate_jh_index(_primary(a, "index"))
    if len(x.blocks) != 1:
        raise InputError("beta of-index needs a single-block index")
    blk = x.blocks[0]
    g, n, d = a.g, a.n, a.d
    if None in (g, n, d):
        raise InputError("beta of-index needs --g --n --d")
    ws = B.build_weight_system(g, n, d, blk.row_sums(), blk.atoms)
    return B.beta_of_jh_index(x, ws).to_json()


def _beta_verify(a):
    ws = _weights(a)
    obj = _primary(a, "beta data")
    try:
        ip = B.IndexedPartition.from_json(obj["partition"])
        coords = tuple(parse_frac(c) for c in obj["coords"])
    except (KeyError, TypeError) as exc:
        raise InputError("beta data needs 'partition' and 'coords'") from exc
    bd = B.beta_from_partition(ip, ws)
    normsq = sum((c * c / p for c, p in zip(coords, ws.index_p)), Fraction(0))
    claimed = B.BetaData(**{**bd.__dict__, "coords": coords, "normsq": normsq})
    return B.verify_beta(claimed, ws).to_json()


def _beta_minnorm(a):
    obj = _primary(a, "point set")
    try:
        pts = [[parse_frac(x) for x in p] for p in obj["points"]]
        metric = [parse_frac(x) for x in obj["metric"]] if obj.get("metric") is not None else None
    except (KeyError, TypeError) as exc:
        raise InputError("point set needs 'points' (and optionally 'metric')") from exc
    res = MN.min_norm_point(pts, metric, method=a.method)
    return {
        "point": [frac_str(x) for x in res.point],
        "normsq": frac_str(res.normsq),
        "coefficients": [frac_str(x) for x in res.coefficients],
    }


def _beta_pivot_range(a):
    ws = _weights(a)
    bd = B.beta_from_partition(B.IndexedPartition.from_json(_primary(a, "partition")), ws)
    lo, hi = B.pivot_range(bd)
    return {"lo": lo, "hi": hi, "k_minus": bd.k_minus, "k_plus": bd.k_plus}


def _beta_canonicalize(a):
    ws = _weights(a)
    obj = _primary(a, "raw partition")
    try:
        raw = [(c["h"], parse_int(c["m"], "m"), c["members"]) for c in obj["cells"]]
    except (KeyError, TypeError) as exc:
        raise InputError("raw partition needs 'cells' with h, m, members") from exc
    return B.canonicalize_partition(raw, ws).to_json()


def _beta_pairing(a):
    ws = _weights(a)
    bd = B.beta_from_partition(B.IndexedPartition.from_json(_primary(a, "partition")), ws)
    return [{"k1": k1, "k2": k2, "relation": rel.value} for (k1, k2), rel in sorted(B.pairing_table(bd).items())]


def _gr_json(counter) -> list:
    return [{"mult": m, "atom": atom.to_json()} for atom, m in sorted(counter.items())]


def _filt_gr(a):
    return _gr_json(FC.gr_of(FC.FiltSpec.from_json(_primary(a, "filtration"))))


def _filt_sum(a):
    x = FC.FiltSpec.from_json(_load(a.a, "first filtration"))
    y = FC.FiltSpec.from_json(_load(a.b, "second filtration"))
    return FC.direct_sum(x, y, a.mode).to_json()


def _filt_dual(a):
    return FC.dualize(FC.FiltSpec.from_json(_primary(a, "filtration"))).to_json()


def _filt_merge(a):
    x = FC.DeltaFilt.from_json(_load(a.a, "first delta-filtration"))
    y = FC.DeltaFilt.from_json(_load(a.b, "second delta-filtration"))
    return FC.balanced_merge(x, y).to_json()


def _filt_classify(a):
    df = FC.DeltaFilt.from_json(_primary(a, "delta-filtration"))
    ctx = None if None in (a.g, a.n, a.d) else (a.g, a.n, a.d)
    return FC.classify(df, ctx).to_json()


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stratkit", description="Exact combinatorics of strata of vector bundles on curves.")
    top = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(sub, name, handler, *opts):
        q = sub.add_parser(name)
        q.set_defaults(handler=handler)
        for o in opts:
            o(q)
        return q

    def nd(q):
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--d", type=int, required=True)

    def genus(q):
        q.add_argument("--g", type=int, required=True)

    def cutoff(q):
        q.add_argument("--max-codim", type=int, required=True)

    def fmt(q):
        q.add_argument("--format", choices=["json", "dot"], default="json")

    def primary(q):
        grp = q.add_mutually_exclusive_group(required=True)
        grp.add_argument("--file")
        grp.add_argument("--json")

    def pair(q):
        q.add_argument("--a", required=True, help="inline JSON or @path")
        q.add_argument("--b", required=True, help="inline JSON or @path")

    def weights(q):
        q.add_argument("--weights", help="weight system JSON or @path")
        q.add_argument("--g", type=int)
        q.add_argument("--n", type=int)
        q.add_argument("--d", type=int)
        q.add_argument("--mults")
        q.add_argument("--atoms")

    def context(q):
        q.add_argument("--g", type=int)
        q.add_argument("--n", type=int)
        q.add_argument("--d", type=int)

    hn = top.add_parser("hn").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(hn, "enumerate", _hn_enumerate, nd, genus, cutoff)
    leaf(hn, "codim", _hn_codim, primary, genus)
    leaf(hn, "compare", _hn_compare, pair)
    leaf(hn, "hasse", _hn_hasse, nd, genus, cutoff, fmt)

    q = leaf(top, "poincare", _poincare, nd, genus)
    q.add_argument("--truncation", type=int, default=None)

    cen = top.add_parser("census").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(cen, "reductive", _census_reductive, nd)
    q = leaf(cen, "group-data", _census_group_data, primary, genus)
    q.add_argument("--d-eff", type=int, required=True)
    leaf(cen, "mumford", _census_mumford, nd, genus)

    jh = top.add_parser("jh").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(jh, "enumerate", _jh_enumerate, nd, genus, cutoff)
    leaf(jh, "validate", _jh_validate, primary)
    q = leaf(jh, "codim", _jh_codim, primary, genus)
    q.add_argument("--variant", choices=["statement", "proof"], default="statement")
    leaf(jh, "compare", _jh_compare, pair)
    leaf(jh, "hasse", _jh_hasse, nd, genus, cutoff, fmt)

    be = top.add_parser("beta").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(be, "from-partition", _beta_from_partition, primary, weights)
    leaf(be, "of-index", _beta_of_index, primary, context)
    leaf(be, "verify", _beta_verify, primary, weights)
    q = leaf(be, "minnorm", _beta_minnorm, primary)
    q.add_argument("--method", choices=["auto", "wolfe", "faces"], default="auto")
    leaf(be, "pivot-range", _beta_pivot_range, primary, weights)
    leaf(be, "canonicalize", _beta_canonicalize, primary, weights)
    leaf(be, "pairing", _beta_pairing, primary, weights)

    fi = top.add_parser("filt").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(fi, "gr", _filt_gr, primary)
    q = leaf(fi, "sum", _filt_sum, pair)
    q.add_argument("--mode", choices=["max", "min"], default="max")
    leaf(fi, "dual", _filt_dual, primary)
    leaf(fi, "merge", _filt_merge, pair)
    leaf(fi, "classify", _filt_classify, primary, context)
    return p


def _error(exc: BaseException, kind: str) -> str:
    return dumps({"error": {"kind": kind, "message": str(exc)}}) + "\n"


def execute(argv: Sequence[str]) -> tuple[int, str]:
    """Run one invocation and return (exit code, output text)."""
    parser = build_parser()
    try:
        with redirect_stdout(io.StringIO()):  # argparse --help writes here
            args = parser.parse_args(list(argv))
        result = args.handler(args)
    except InvariantError as exc:
        return 2, _error(exc, exc.kind)
    except StratError as exc:
        return 1, _error(exc, exc.kind)
    except SystemExit as exc:  # --help
        return int(exc.code or 0), parser.format_help()
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        return 2, _error(exc, "internal")
    if isinstance(result, str):
        return 0, result
    return 0, dumps(result) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    code, out = execute(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
