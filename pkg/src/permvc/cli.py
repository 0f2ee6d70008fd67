"""Command-line entry point: ``permvc <group> <command> [options]``.

Exit status: 0 for an answer, 1 for a property violation or an empty find,
2 for usage and input errors (always a single diagnostic line).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import ackfun, constructions, oracle, patterns, vcdim
from .core import (
    FormatError,
    InvariantError,
    Matrix01,
    Permutation,
    parse_family,
    parse_matrix,
    parse_sequence,
    serialize_family,
    serialize_matrix,
    serialize_sequence,
)

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Bad input detected after argument parsing; reported with exit 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _matrix(path: str) -> Matrix01:
    return parse_matrix(_read(path))


def _pattern_arg(text: str) -> Matrix01:
    """``DS<s>`` names a DS matrix; anything else is a matrix file."""
    if text.upper().startswith("DS") and text[2:].isdigit():
        return patterns.ds_matrix(int(text[2:]))
    return _matrix(text)


def _symbols(path: str) -> list:
    """Plain symbol list; block separators are ignored and repeats are allowed."""
    try:
        text = _read(path).decode("ascii")
    except UnicodeDecodeError:
        raise UsageError(f"{path} is not ASCII") from None
    return [int(t) if t.lstrip("-").isdigit() else t for t in text.split() if t != "|"]


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected a list of integers, got {text!r}") from None


def _perm(text: str) -> Permutation:
    return Permutation(tuple(_ints(text)))


def _kv(text: str) -> dict:
    out = {}
    for part in filter(None, text.replace(" ", ",").split(",")):
        key, eq, val = part.partition("=")
        if not eq:
            raise UsageError(f"expected key=value, got {part!r}")
        try:
            out[key.strip()] = int(val)
        except ValueError:
            raise UsageError(f"{key} must be an integer") from None
    return out


def _grid(a: Matrix01) -> dict:
    return {"m": a.m, "n": a.n, "grid": a.to_grid()}


def _budget(args) -> oracle.SearchBudget:
    return oracle.SearchBudget(node_limit=args.node_limit, time_limit=args.time_limit, workers=args.workers)


def _num(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


# ---------------------------------------------------------------------------
# commands; each returns (exit code, payload dict, text)
# ---------------------------------------------------------------------------


def cmd_ack(args):
    if args.cmd == "alpha":
        v = ackfun.inv_ackermann(args.m)
        return 0, {"value": v}, str(v)
    if args.cmd == "alphad":
        v = ackfun.alpha_d(args.d, args.m)
        return 0, {"value": v}, str(v)
    if args.cmd == "R":
        v = ackfun.recurrence_R(args.s, args.d)
        return 0, {"value": v}, str(v)
    if args.cmd == "D":
        v = ackfun.recurrence_D(args.s, args.d)
        return 0, {"value": v}, str(v)
    if args.cmd == "derived":
        params = ackfun.HierarchyParams(Fraction(args.cprime))
        try:
            v = ackfun.derived_params(args.kind, params, **_kv(args.args))
        except KeyError as exc:
            raise UsageError(f"--args is missing {exc.args[0]}") from None
        payload = {"value": _num(v)}
        if args.kind == "gamma":
            payload.update(cPrime=str(params.c_prime), provenance=params.notes)
        return 0, payload, str(_num(v))
    if args.cmd == "verify":
        bad = []
        for d in range(1, args.d_max + 1):
            for m in range(1, args.m_max + 1):
                if ackfun.alpha_d(d, m) != ackfun.alpha_d_direct(d, m):
                    bad.append({"d": d, "m": m})
        closed = [d for d in range(2, args.closed_max + 1) if ackfun.recurrence_D(3, d) != 2 * d + 1]
        payload = {"alphaChecked": args.d_max * args.m_max, "alphaMismatches": bad[:10],
                   "alphaMismatchCount": len(bad), "d3ClosedFormFailures": closed}
        ok = not bad and not closed
        text = (f"alpha_d memoized vs direct: {len(bad)} mismatches over d <= {args.d_max}, m <= {args.m_max}\n"
                f"D_3(d) = 2d+1 failures for d <= {args.closed_max}: {closed or 'none'}")
        return (0 if ok else 1), payload, text
    raise AssertionError(args.cmd)


def cmd_patterns(args):
    if args.cmd == "ds-matrix":
        a = patterns.ds_matrix(args.s)
        return 0, _grid(a), serialize_matrix(a).rstrip("\n")
    if args.cmd == "contains":
        host, pat = _matrix(args.host), _pattern_arg(args.pattern)
        emb = patterns.contains_pattern(host, pat)
        if emb is None:
            return 1, {"found": False, "witness": None}, "absent"
        return 0, {"found": True, "witness": emb.to_json()}, f"rows {list(emb.rows)} cols {list(emb.cols)}"
    if args.cmd in ("formation", "split"):
        host = _matrix(args.matrix)
        if args.cmd == "split":
            w = patterns.split_formation(host, args.r, args.s)
        elif args.widest:
            w = patterns.widest_formation(host, args.s, args.mode, args.B)
        else:
            if args.r is None:
                raise UsageError("--r is required unless --widest is given")
            w = patterns.find_formation(host, args.r, args.s, args.mode, args.B)
        if w is None:
            return 1, {"found": False, "witness": None}, "absent"
        parts = " ".join(f"[{lo},{hi}]" for lo, hi in w.partition.intervals)
        return 0, {"found": True, "witness": w.to_json()}, f"columns {list(w.columns)} partition {parts}"
    if args.cmd == "mst":
        seq = patterns.mst(_matrix(args.matrix))
        return 0, {"blocks": [list(b) for b in seq.blocks]}, serialize_sequence(seq).rstrip("\n")
    if args.cmd == "sparsify":
        out, removed = patterns.sparsify(_symbols(args.sequence), args.r)
        return 0, {"sequence": out, "removed": removed}, f"{' '.join(map(str, out))}\nremoved {removed}"
    if args.cmd == "is-ds":
        v = patterns.is_ds_sequence(_symbols(args.sequence), args.s)
        return 0, {"value": v}, str(v).lower()
    raise AssertionError(args.cmd)


def _family_json(fam) -> list:
    return [list(p.image) for p in fam]


def cmd_vcdim(args):
    if args.cmd == "compute":
        v = vcdim.vc_dimension(parse_family(_read(args.family)))
        return 0, {"value": v}, str(v)
    if args.cmd == "shattered":
        fam = parse_family(_read(args.family))
        pos = _ints(args.positions)
        if any(not 1 <= j <= fam.n for j in pos) or len(set(pos)) != len(pos):
            raise UsageError(f"positions must be distinct values in 1..{fam.n}")
        v = vcdim.is_shattered(fam, sorted(pos))
        return 0, {"value": v}, str(v).lower()
    if args.cmd == "fullness":
        a = _matrix(args.matrix)
        v = vcdim.fullness(a)
        return 0, {"value": v, "witness": vcdim.full_tuple(a, v) if v else None}, str(v)
    if args.cmd == "synthetic":
        fam = vcdim.synthetic_family(args.seed)
        return 0, {"n": fam.n, "family": _family_json(fam)}, serialize_family(fam).rstrip("\n")
    if args.cmd == "compress":
        fam = parse_family(_read(args.family))
        if args.gamma is not None:
            params = vcdim.params_for_gamma(args.k, fam.n, Fraction(args.gamma))
        else:
            params = ackfun.HierarchyParams(Fraction(args.cprime))
        try:
            trace = vcdim.compress_family(fam, args.k, params)
        except vcdim.VCDimensionExceeded as exc:
            raise UsageError(str(exc)) from None
        data = trace.to_json()
        if args.trace:
            with open(args.trace, "w") as fh:
                json.dump(data, fh, indent=1)
        if args.figure:
            from .report import plot_trace

            plot_trace(trace, args.figure)
        ok = all(ph.within_bound for ph in trace.phases)
        lines = [f"gamma {trace.gamma} (c' = {params.c_prime}; {params.notes})",
                 f"iterations {len(trace.iterations)} in {len(trace.phases)} phases",
                 f"phase bounds respected: {'yes' if ok else 'NO'}",
                 f"stop: {trace.stop_reason}",
                 f"final size {trace.final_size}, density {trace.final_density}"]
        return (0 if ok else 1), data, "\n".join(lines)
    raise AssertionError(args.cmd)


def cmd_construct(args):
    if args.cmd == "smt":
        a = constructions.smt(parse_sequence(_read(args.sequence)))
        return 0, _grid(a), serialize_matrix(a).rstrip("\n")
    if args.cmd == "j2":
        a = constructions.j2_expand(_perm(args.perm), args.drop)
        return 0, _grid(a), serialize_matrix(a).rstrip("\n")
    if args.cmd == "flatten":
        fs = sorted(constructions.flattenings(_perm(args.perm), args.drop), key=lambda a: a.to_grid())
        text = "\n\n".join(serialize_matrix(a).rstrip("\n") for a in fs)
        return 0, {"count": len(fs), "matrices": [_grid(a) for a in fs]}, text
    if args.cmd == "phi":
        sets = constructions.phi(args.l, args.drop, cap=args.cap)
        out, blocks = [], []
        for fs in sets:
            ms = sorted(fs, key=lambda a: a.to_grid())
            out.append([_grid(a) for a in ms])
            blocks.append("\n".join(serialize_matrix(a).rstrip("\n") for a in ms))
        return 0, {"count": len(sets), "sets": out}, "\n--\n".join(blocks)
    if args.cmd == "tile":
        a = constructions.tile_and_pad(_matrix(args.matrix), args.n)
        return 0, _grid(a), serialize_matrix(a).rstrip("\n")
    if args.cmd == "family":
        build = constructions.build_family(_matrix(args.matrix), args.sampler, args.budget, args.seed)
        payload = {"n": build.family.n, "size": len(build.family), "complete": build.complete,
                   "choices": build.choices, "maxPreimages": build.max_preimages(),
                   "family": _family_json(build.family)}
        return 0, payload, serialize_family(build.family).rstrip("\n")
    if args.cmd == "gends3":
        try:
            seq = constructions.gen_ds3(args.n, args.mult, node_limit=args.node_limit)
        except constructions.Infeasible as exc:
            return 1, {"found": False, "reason": "infeasible", "detail": str(exc)}, f"infeasible: {exc}"
        except constructions.BudgetExhausted as exc:
            return 1, {"found": False, "reason": "budget", "detail": str(exc)}, f"undecided: {exc}"
        return 0, {"found": True, "blocks": [list(b) for b in seq.blocks]}, serialize_sequence(seq).rstrip("\n")
    raise AssertionError(args.cmd)


def _oracle_text(res: oracle.OracleResult) -> str:
    value = "infinite" if res.value == oracle.INFINITE else str(res.value)
    lines = [value if res.exact else f"{value} (lower bound, search budget exhausted)"]
    w = res.witness
    if isinstance(w, Matrix01):
        lines += w.to_grid()
    elif w is not None:
        lines.append(json.dumps(res.to_json()["witness"]))
    return "\n".join(lines)


def cmd_oracle(args):
    b = _budget(args)
    if args.cmd == "hunt":
        rep = oracle.counterexample_search(args.lemma, param=args.param, r=args.r, count=args.budget,
                                           adversarial=args.adversarial if args.adversarial is not None
                                           else args.budget // 5,
                                           seed=args.seed, max_rows=args.max_rows, budget=b)
        text = (f"{rep.lemma}: {rep.candidates} candidates, {rep.hypothesis_met} met the hypothesis, "
                f"{len(rep.violations)} violations in {rep.elapsed:.1f}s"
                + (" (time limit hit)" if rep.exhausted else ""))
        return (0 if rep.ok else 1), rep.to_json(), text
    if args.cmd == "p":
        res = oracle.brute_p(args.k, args.n, b)
    elif args.cmd == "r":
        res = oracle.brute_r(args.k, args.n, b)
    elif args.cmd == "mex":
        res = oracle.brute_mex(_pattern_arg(args.pattern), args.n, b, method=args.method)
    elif args.cmd == "lambda":
        res = oracle.brute_lambda(args.s, args.n, b)
    elif args.cmd == "delta":
        res = oracle.brute_delta(args.r, args.s, args.k, args.m, b)
    elif args.cmd == "seq":
        res = oracle.brute_seq_extremal(args.kind, args.r, args.s, args.size, args.k, b)
    else:
        raise AssertionError(args.cmd)
    return 0, res.to_json(), _oracle_text(res)


def cmd_report(args):
    from .report import write_report

    parts = [p for p in args.parts.split(",") if p]
    written = write_report(args.out, parts, seeds=range(args.seeds), budget=_budget(args))
    text = "\n".join(f"{k}: {v['csv']} {v['png']}" for k, v in written.items())
    return 0, {"written": written}, text


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser(default_workers: int = 1) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=default_workers)

    search = _Parser(add_help=False)
    search.add_argument("--node-limit", type=int, default=oracle.SearchBudget.node_limit)
    search.add_argument("--time-limit", type=float, default=oracle.SearchBudget.time_limit)

    p = _Parser(prog="permvc", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name, *parents, **kw):
        return group.add_parser(name, parents=[common, *parents], **kw)

    ack = groups.add_parser("ack", help="inverse Ackermann hierarchy and recurrences")
    ack.set_defaults(func=cmd_ack)
    a = ack.add_subparsers(dest="cmd", required=True)
    s = sub(a, "alpha", help="least k with alpha_k(m) <= 3")
    s.add_argument("--m", type=int, required=True)
    s = sub(a, "alphad")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    for name in ("R", "D"):
        s = sub(a, name)
        s.add_argument("--s", type=int, required=True)
        s.add_argument("--d", type=int, required=True)
    s = sub(a, "derived", help="beta, gamma or mu")
    s.add_argument("--kind", choices=("beta", "gamma", "mu"), required=True)
    s.add_argument("--args", required=True, help="e.g. s=3,m=8")
    s.add_argument("--cprime", default="1")
    s = sub(a, "verify", help="memoized vs direct alpha_d and the D_3 closed form")
    s.add_argument("--d-max", type=int, default=4)
    s.add_argument("--m-max", type=int, default=2 ** 16)
    s.add_argument("--closed-max", type=int, default=20)

    pat = groups.add_parser("patterns", help="containment, formations, sequences")
    pat.set_defaults(func=cmd_patterns)
    a = pat.add_subparsers(dest="cmd", required=True)
    s = sub(a, "ds-matrix")
    s.add_argument("--s", type=int, required=True)
    s = sub(a, "contains")
    s.add_argument("--host", required=True)
    s.add_argument("--pattern", required=True, help="matrix file or DS<s>")
    s = sub(a, "formation")
    s.add_argument("--matrix", required=True)
    s.add_argument("--r", type=int)
    s.add_argument("--s", type=int, required=True)
    s.add_argument("--mode", choices=("plain", "doubled", "fat"), default="plain")
    s.add_argument("--B", type=int, default=1)
    s.add_argument("--widest", action="store_true", help="maximize the number of columns")
    s = sub(a, "split", help="(r,s)-formation from an (sr,s)-formation of the matrix sequence")
    s.add_argument("--matrix", required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--s", type=int, required=True)
    s = sub(a, "mst")
    s.add_argument("--matrix", required=True)
    s = sub(a, "sparsify")
    s.add_argument("--sequence", required=True)
    s.add_argument("--r", type=int, required=True)
    s = sub(a, "is-ds")
    s.add_argument("--sequence", required=True)
    s.add_argument("--s", type=int, required=True)

    vc = groups.add_parser("vcdim", help="VC-dimension, fullness, compression")
    vc.set_defaults(func=cmd_vcdim)
    a = vc.add_subparsers(dest="cmd", required=True)
    s = sub(a, "compute")
    s.add_argument("--family", required=True)
    s = sub(a, "shattered")
    s.add_argument("--family", required=True)
    s.add_argument("--positions", required=True, help="e.g. 1,3,4")
    s = sub(a, "fullness")
    s.add_argument("--matrix", required=True)
    s = sub(a, "synthetic", help="seeded family of VC-dimension at most 2")
    s = sub(a, "compress")
    s.add_argument("--family", required=True)
    s.add_argument("--k", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--cprime", default="1")
    g.add_argument("--gamma", help="pick c' so that gamma equals this value")
    s.add_argument("--trace", help="write the JSON trace here")
    s.add_argument("--figure", help="write a density plot (PNG) here")

    con = groups.add_parser("construct", help="lower-bound construction pipeline")
    con.set_defaults(func=cmd_construct)
    a = con.add_subparsers(dest="cmd", required=True)
    s = sub(a, "smt")
    s.add_argument("--sequence", required=True)
    for name in ("j2", "flatten"):
        s = sub(a, name)
        s.add_argument("--perm", required=True, help="images, e.g. 2,1")
        s.add_argument("--drop", type=int)
    s = sub(a, "phi")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--drop", type=int)
    s.add_argument("--cap", type=int, default=constructions.PHI_CAP)
    s = sub(a, "tile")
    s.add_argument("--matrix", required=True)
    s.add_argument("--n", type=int, required=True)
    s = sub(a, "family")
    s.add_argument("--matrix", required=True)
    s.add_argument("--sampler", choices=("exhaustive", "random"), default="exhaustive")
    s.add_argument("--budget", type=int, default=100_000)
    s = sub(a, "gends3")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mult", type=int, required=True)
    s.add_argument("--node-limit", type=int, default=500_000)

    orc = groups.add_parser("oracle", help="exact small values and counterexample hunts")
    orc.set_defaults(func=cmd_oracle)
    a = orc.add_subparsers(dest="cmd", required=True)
    for name in ("p", "r"):
        s = sub(a, name, search)
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--n", type=int, required=True)
    s = sub(a, "mex", search)
    s.add_argument("--pattern", required=True, help="matrix file or DS<s>")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--method", choices=("bb", "exhaustive"), default="bb")
    s = sub(a, "lambda", search)
    s.add_argument("--s", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s = sub(a, "delta", search)
    for name in ("r", "s", "k", "m"):
        s.add_argument(f"--{name}", type=int, required=True)
    s = sub(a, "seq", search)
    s.add_argument("--kind", choices=("F", "Pi"), required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--s", type=int, required=True)
    s.add_argument("--size", type=int, required=True, help="n for F, m for Pi")
    s.add_argument("--k", type=int)
    s = sub(a, "hunt", search)
    s.add_argument("--lemma", choices=oracle.LEMMAS, required=True)
    s.add_argument("--budget", type=int, default=1000, help="random candidates")
    s.add_argument("--adversarial", type=int, help="planted candidates (default budget/5)")
    s.add_argument("--param", type=int, default=2, help="l for the flattening lemmas, s otherwise")
    s.add_argument("--r", type=int, default=2)
    s.add_argument("--max-rows", type=int, default=10)

    rep = groups.add_parser("report", parents=[common, search], help="CSV tables and PNG figures")
    rep.set_defaults(func=cmd_report, cmd=None)
    rep.add_argument("--out", required=True)
    rep.add_argument("--parts", default="extremal,alpha,compression")
    rep.add_argument("--seeds", type=int, default=20, help="synthetic families in the compression table")
    return p


def _default_workers() -> int:
    raw = os.environ.get("PERMVC_DEFAULT_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def main(argv=None) -> int:
    parser = build_parser(_default_workers())
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, payload, text = args.func(args)
    except (UsageError, FormatError, InvariantError, oracle.CapExceeded, ValueError) as exc:
        print(f"permvc: error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        command = args.group if args.cmd is None else f"{args.group} {args.cmd}"
        out = {"schemaVersion": SCHEMA_VERSION, "command": command}
        out.update(payload)
        print(json.dumps(out, default=str))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
