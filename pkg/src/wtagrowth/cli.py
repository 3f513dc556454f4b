"""Command-line front end.

Exit codes: ``analyze`` returns 0 for a polynomial verdict, 2 for
exponential and 3 for empty (the highest code when several files are
given).  Every command returns 64 on usage or parse
errors (including unreadable files), 65 when the input is well-formed but
unusable (alphabet mismatch, exceeded cap, ambiguous query automaton, ...)
and 70 when an internal self-check fails.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import formats
from .automaton import count_accepting_runs, trim, value
from .core import parse_tree, print_context, print_tree
from .errors import ParseError, WtaError
from .gen import random_automaton
from .growth import EMPTY, EXPONENTIAL, analyze, check_exp_witness, check_poly_witness
from .mtt import (
    OUTPUT_CAP, ANNOTATION_CAP, HatTransducer, branches, mtt_eval, parse_mtt, print_output,
    print_rhs, verify_height_lemma,
)
from .oracle import brute_barbells, brute_growth, brute_heavy

EXIT_EXPONENTIAL = 2
EXIT_EMPTY = 3
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INTERNAL = 70

MAX_TREE = 12
MAX_CONTEXT = 8
MAX_MARKS = 3


class UsageError(Exception):
    pass


class SelfCheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _tree_arg(arg: str) -> str:
    """A tree given inline, or ``@path`` to read it from a file."""
    return _read(arg[1:]).strip() if arg.startswith("@") else arg


def _load(path):
    text = _read(path)
    if text.lstrip().startswith("{\""):
        return formats.automaton_from_dict(json.loads(text))
    return formats.parse_automaton(text)


def _emit(out, d, fmt):
    if fmt == "json":
        out.write(formats.dumps(d))
    else:
        for k, v in d.items():
            if k != "format":
                out.write(f"{k}: {v if not isinstance(v, (dict, list)) else json.dumps(v)}\n")


# -- commands ------------------------------------------------------------------

def _analyze_one(path, witness):
    A = _load(path)
    t0 = time.perf_counter()
    rep = analyze(A, witness=witness)
    elapsed = time.perf_counter() - t0
    if witness:
        B = rep.trimmed
        if rep.exp_witness is not None and not check_exp_witness(B, rep.exp_witness):
            raise SelfCheckFailed(f"{path}: exponential witness failed its value check")
        if rep.pattern is not None and rep.verdict.degree and not check_poly_witness(
                B, rep.pattern, rep.accept_context, rep.verdict.degree):
            raise SelfCheckFailed(f"{path}: pumping witness failed its run-count check")
    if rep.verdict == EMPTY:
        code = EXIT_EMPTY
    elif rep.verdict == EXPONENTIAL:
        code = EXIT_EXPONENTIAL
    else:
        code = 0
    return rep.to_dict(), elapsed, code


def cmd_analyze(args, out):
    if args.jobs > 1 and len(args.file) > 1:
        with ProcessPoolExecutor(min(args.jobs, len(args.file))) as pool:
            results = list(pool.map(_analyze_one, args.file,
                                    [args.witness] * len(args.file)))
    else:
        results = [_analyze_one(f, args.witness) for f in args.file]
    docs = []
    for path, (d, elapsed, _) in zip(args.file, results):
        if args.timing:
            d["timing"] = round(elapsed, 6)
        docs.append(d)
    if len(docs) == 1:
        _emit(out, {"format": formats.FORMAT, **docs[0]}, args.format)
    elif args.format == "json":
        out.write(formats.dumps({"format": formats.FORMAT, "reports": [
            {"file": path, **d} for path, d in zip(args.file, docs)]}))
    else:
        for path, d in zip(args.file, docs):
            out.write(f"== {path}\n")
            _emit(out, d, "text")
    return max(code for _, _, code in results)


def cmd_value(args, out):
    A = _load(args.automaton)
    t = parse_tree(_tree_arg(args.tree), A.alphabet)
    v = value(A, t)
    if args.format == "json":
        out.write(formats.dumps(formats.value_to_dict(A, v)))
    else:
        out.write(f"{v.accepting}\n")
    return 0


def cmd_count_runs(args, out):
    A = _load(args.automaton)
    t = parse_tree(_tree_arg(args.tree), A.alphabet)
    out.write(f"{count_accepting_runs(A, t)}\n")
    return 0


def cmd_trim(args, out):
    B = trim(_load(args.file))
    if args.format == "json":
        out.write(formats.dumps(formats.automaton_to_dict(B)))
    else:
        out.write(formats.print_automaton(B))
    return 0


def cmd_oracle(args, out):
    A = _load(args.file)
    if args.what == "growth":
        out.write("n,maxValue\n")
        for n, v in enumerate(brute_growth(A, args.max_size), 1):
            out.write(f"{n},{v}\n")
    elif args.what == "heavy":
        hit = brute_heavy(A, args.max_context)
        if hit is None:
            out.write("none\n")
        else:
            q, C = hit
            out.write(f"{A.states[q]} {print_context(C, A.alphabet)}\n")
    else:
        for q1, q2 in sorted(brute_barbells(A, args.max_context)):
            out.write(f"{A.states[q1]} {A.states[q2]}\n")
    return 0


def cmd_query(args, out):
    from .query import MarkedAlphabet, build_bf, query_growth
    A = _load(args.file)
    if args.what == "bf":
        marked = MarkedAlphabet.from_alphabet(A.alphabet, args.max_marks)
        B = build_bf(A, marked)
        if args.format == "json":
            out.write(formats.dumps(formats.automaton_to_dict(B)))
        else:
            out.write(formats.print_automaton(B))
        return 0
    rep = query_growth(A, args.ell, args.max_marks)
    _emit(out, {"format": formats.FORMAT, **rep.to_dict()}, args.format)
    return 0


def cmd_mtt(args, out):
    T = parse_mtt(_read(args.file))
    if args.what == "hat":
        H = HatTransducer(T)
        names = [n for n, _ in H.states]
        balpha = H.branch_alphabet.alphabet
        out.write("states " + " ".join(f"{n}:{r}" for n, r in H.states) + "\n")
        for a in range(len(T.input)):
            out.write(f"letter {T.input.name(a)} annotations {H.count(a)}\n")
            for s, opts in enumerate(H.options(a)):
                shown = " | ".join(print_rhs(o, T, balpha, names) for o in opts)
                out.write(f"  {names[s]}: {shown}\n")
        return 0
    if args.tree is None:
        raise UsageError(f"mtt {args.what} needs an input tree")
    t = parse_tree(_tree_arg(args.tree), T.input)
    if args.what == "eval":
        out.write(print_output(mtt_eval(T, t, args.output_cap), T.output) + "\n")
    elif args.what == "branches":
        H = HatTransducer(T)
        bs = branches(mtt_eval(T, t, args.output_cap), H.branch_alphabet)
        for b in sorted(print_tree(b, H.branch_alphabet.alphabet) for b in bs):
            out.write(b + "\n")
    else:
        r = verify_height_lemma(T, t, args.max_annotations, args.literal, args.output_cap)
        out.write(f"height {r.height}\nmax_branch_size {r.max_branch_size}\n"
                  f"annotations {r.annotations}\ndistinct_outputs {r.distinct_outputs}\n"
                  f"membership {'ok' if r.membership else 'FAILED'}\n"
                  f"result {'ok' if r.ok else 'FAILED'}\n")
        if not r.ok:
            return EXIT_INTERNAL
    return 0


def cmd_gen(args, out):
    rng = random.Random(args.seed)
    docs = [random_automaton(rng, max_states=args.states) for _ in range(args.count)]
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for i, A in enumerate(docs):
            with open(os.path.join(args.out, f"aut{i:04d}.wta"), "w", encoding="utf-8") as f:
                f.write(formats.print_automaton(A))
    else:
        for i, A in enumerate(docs):
            out.write(f"# automaton {i}\n" + formats.print_automaton(A))
    return 0


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wtagrowth",
                description="Growth analysis for weighted tree automata.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp, default="text"):
        sp.add_argument("--format", choices=["json", "text"], default=default)

    sp = sub.add_parser("analyze", help="decide Empty / Exponential / Polynomial(k)")
    sp.add_argument("file", nargs="+")
    sp.add_argument("--jobs", type=int, default=1,
                    help="analyze several files in parallel processes")
    sp.add_argument("--witness", action="store_true",
                    help="include a self-checked witness family")
    sp.add_argument("--timing", action="store_true",
                    help="add wall-clock time (output is then not reproducible)")
    fmt(sp, "json")
    sp.set_defaults(run=cmd_analyze)

    for name, fn in (("value", cmd_value), ("count-runs", cmd_count_runs)):
        sp = sub.add_parser(name)
        sp.add_argument("automaton")
        sp.add_argument("tree", help="term, or @path to read it from a file")
        fmt(sp)
        sp.set_defaults(run=fn)

    sp = sub.add_parser("trim")
    sp.add_argument("file")
    fmt(sp)
    sp.set_defaults(run=cmd_trim)

    sp = sub.add_parser("oracle", help="brute-force ground truth on small objects")
    sp.add_argument("what", choices=["growth", "heavy", "barbells"])
    sp.add_argument("file")
    sp.add_argument("--max-size", type=int, default=MAX_TREE)
    sp.add_argument("--max-context", type=int, default=MAX_CONTEXT)
    sp.set_defaults(run=cmd_oracle)

    sp = sub.add_parser("query", help="set-query counting through ambiguity")
    sp.add_argument("what", choices=["bf", "growth"])
    sp.add_argument("file")
    sp.add_argument("--ell", type=int)
    sp.add_argument("--max-marks", type=int, default=MAX_MARKS)
    fmt(sp, "json")
    sp.set_defaults(run=cmd_query)

    sp = sub.add_parser("mtt", help="macro tree transducers")
    sp.add_argument("what", choices=["eval", "branches", "hat", "verify-height"])
    sp.add_argument("file")
    sp.add_argument("tree", nargs="?")
    sp.add_argument("--output-cap", type=int, default=OUTPUT_CAP)
    sp.add_argument("--max-annotations", type=int, default=ANNOTATION_CAP)
    sp.add_argument("--literal", action="store_true",
                    help="enumerate annotations one by one")
    sp.set_defaults(run=cmd_mtt)

    sp = sub.add_parser("gen", help="seeded random automata")
    sp.add_argument("--states", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--out", help="directory for one file per automaton")
    sp.set_defaults(run=cmd_gen)
    return p


def _positive(args):
    for k in ("max_size", "max_context", "max_marks", "output_cap", "max_annotations",
              "states", "count", "jobs"):
        v = getattr(args, k, None)
        if v is not None and v < 1:
            raise UsageError(f"--{k.replace('_', '-')} must be positive")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        _positive(args)
        return args.run(args, out)
    except (UsageError, ParseError, json.JSONDecodeError) as e:
        print(f"wtagrowth: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SelfCheckFailed as e:
        print(f"wtagrowth: internal check failed: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (WtaError, ValueError, KeyError) as e:
        print(f"wtagrowth: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # noqa: BLE001
        print(f"wtagrowth: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
