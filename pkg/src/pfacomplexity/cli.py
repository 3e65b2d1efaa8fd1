"""Command-line interface: ``pfacx <command> ...``.

Results go to standard output as JSON, logs to standard error.  Exit codes:
0 on success, 2 for bad input, 3 when a budget runs out or a threshold is
undetermined.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import blackbox, classical, classify, core, enumerate as enum, gamma, ifs
from .core import BudgetError, InputError, Pfa, PreconditionError, word, word_str

log = logging.getLogger("pfacomplexity")

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3


class _Exit(Exception):
    def __init__(self, code, payload):
        self.code, self.payload = code, payload


# -- input helpers ------------------------------------------------------------------

def _read_json(path):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not JSON: {exc}") from exc


def _unwrap(data, *keys):
    # accept bundles such as store records, which nest the machine
    for k in keys:
        if isinstance(data, dict) and k in data and isinstance(data[k], dict):
            return data[k]
    return data


def _load_pfa(args) -> Pfa:
    A = Pfa.from_json(_unwrap(_read_json(args.pfa), "witness", "pfa"))
    if args.mode == core.FLOAT and A.mode != core.FLOAT:
        A = A.to_float()
    return A


def _load_ifs2(path) -> ifs.Ifs2:
    return ifs.Ifs2.from_json(_unwrap(_read_json(path), "ifs2"))


def _scalar(x):
    return str(x) if not isinstance(x, float) else x


def _emit(obj):
    print(json.dumps(obj))


# -- commands -------------------------------------------------------------------------

def cmd_rho(args):
    A = _load_pfa(args)
    return {"word": args.word, "rho": _scalar(core.rho(A, args.word))}


def cmd_gap(args):
    A = _load_pfa(args)
    return {"word": args.word, "gap": _scalar(core.gap(A, args.word, budget=args.budget or core.DEFAULT_GAP_BUDGET))}


def _search_kwargs(args):
    kw = {"alphabet": args.alphabet}
    if args.budget:
        kw["budget"] = args.budget
    if getattr(args, "max_states", None):
        kw["max_states"] = args.max_states
    return kw


def cmd_ad(args):
    return classical.ad(args.word, **_search_kwargs(args)).to_json()


def cmd_an(args):
    return classical.an(args.word, **_search_kwargs(args)).to_json()


def cmd_nfa2pfa(args):
    data = _unwrap(_read_json(args.nfa), "witness")
    return classical.nfa_to_pfa(classical.Nfa.from_json(data)).to_json()


def cmd_reverse(args):
    return core.reverse_pfa(_load_pfa(args)).to_json()


def cmd_drop_prefix(args):
    return core.drop_prefix(_load_pfa(args), args.prefix).to_json()


def cmd_classify2(args):
    fam = classify.is_class2(args.word)
    if fam is None:
        return {"classified": False}
    return {"classified": True, "family": fam.to_json()}


def cmd_witness2(args):
    w = word(args.word)
    fam = classify.is_class2(w)
    if fam is None:
        raise PreconditionError(f"{args.word} is not in a classified family")
    I = classify.witness_class2(w)
    L = 2 * len(w) + 4
    return {"word": args.word, "family": fam.to_json(), "ifs2": I.to_json(), "verified_up_to": L,
            "pfa": ifs.ifs2_to_pfa(I).to_json()}


def cmd_trace(args):
    return {"trace": classify.extremal_trace(_load_ifs2(args.ifs), args.length).to_json()}


def cmd_witnessed_lang(args):
    I = _load_ifs2(args.ifs)
    words = classify.witnessed_language(I, args.length)
    out = {"length": args.length, "words": [word_str(u) for u in words],
           "label": classify.diagnostics_label(I)}
    if args.tail:
        out["tail"] = classify.check_regular_tail(words, args.length).to_json()
    return out


def _gamma_kwargs(args):
    kw = {"eps": args.eps, "seed": args.seed, "alphabet": args.alphabet}
    if args.restarts is not None:
        kw["restarts"] = args.restarts
    if args.budget:
        kw["max_boxes"] = args.budget
    return kw


def cmd_gamma(args):
    enc = gamma.gamma_enclosure(args.k, args.word, **_gamma_kwargs(args))
    out = enc.to_json()
    if not enc.complete:
        raise _Exit(EXIT_BUDGET, out)
    return out


def cmd_ap_delta(args):
    res = gamma.ap_delta(args.word, args.delta, **_gamma_kwargs(args))
    if isinstance(res, gamma.Undetermined):
        raise _Exit(EXIT_BUDGET, res.to_json())
    return {"word": args.word, "delta": args.delta, "value": res}


def cmd_enum_e(args):
    pts = gamma.enumerate_E(args.word, **_gamma_kwargs(args))
    return {"word": args.word, "points": [p.to_json() for p in pts]}


def _search_budget(args):
    kw = {"wall_clock": args.wall_clock, "max_denominator": args.max_denominator}
    if args.budget:
        kw["max_machines"] = args.budget
    return enum.SearchBudget(**kw)


def cmd_semidecide(args):
    progress = (lambda rec: _emit({"progress": rec})) if args.progress else None
    res = enum.semidecide_ap_le(args.word, args.k, _search_budget(args), alphabet=args.alphabet,
                                seed=args.seed, progress=progress)
    return res.to_json()


def cmd_ap_bound(args):
    res = enum.ap_upper_bound(args.word, _search_budget(args), alphabet=args.alphabet, seed=args.seed)
    return {"word": args.word, **res.to_json()}


def cmd_blackbox(args):
    A = _load_pfa(args)
    kw = {"budget": args.budget} if args.budget else {}
    rep = blackbox.run_experiment(A, args.word, float(core.parse_scalar(args.delta)), args.epsilon,
                                  margin=None if args.margin is None else float(core.parse_scalar(args.margin)),
                                  seed=args.seed, **kw)
    return rep.to_json()


def _store(args):
    from .store import WitnessStore
    return WitnessStore(args.store)


def cmd_store_add(args):
    rec = _store(args).add(args.word, _load_pfa(args), provenance=args.provenance)
    return rec.to_json()


def cmd_store_list(args):
    return {"records": [r.to_json() for r in _store(args).records()]}


def cmd_store_verify(args):
    problems = _store(args).verify()
    out = {"ok": not problems, "problems": problems}
    if problems:
        raise _Exit(EXIT_INPUT, out)
    return out


# -- parser -----------------------------------------------------------------------------

def _global_flags(parser, suppress):
    d = (lambda v: argparse.SUPPRESS if suppress else v)
    parser.add_argument("--seed", type=int, default=d(0), help="random seed")
    parser.add_argument("--budget", type=int, default=d(None), help="work budget (meaning depends on command)")
    parser.add_argument("--eps", type=float, default=d(gamma.DEFAULT_EPS), help="target enclosure width")
    parser.add_argument("--mode", choices=(core.RATIONAL, core.FLOAT), default=d(core.RATIONAL))
    parser.add_argument("--alphabet", type=int, default=d(None), help="alphabet size (default: inferred)")
    parser.add_argument("-v", "--verbose", action="count", default=d(0))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pfacx", description="Probabilistic automatic complexity toolkit")
    _global_flags(p, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, *opts):
        sp = sub.add_parser(name, help=help, parents=[common])
        for flags, kw in opts:
            sp.add_argument(*flags, **kw)
        sp.set_defaults(func=func)
        return sp

    W = (("--word",), {"required": True})
    PFA = (("--pfa",), {"required": True, "help": "PFA JSON file, or - for stdin"})
    IFS = (("--ifs",), {"required": True, "help": "two-map system JSON (a, b, c, d, x0)"})
    LEN = (("--length",), {"type": int, "required": True})
    K = (("--k",), {"type": int, "required": True})
    RESTARTS = (("--restarts",), {"type": int, "default": None})
    MAXS = (("--max-states",), {"type": int, "default": None})
    WALL = (("--wall-clock",), {"type": float, "default": 20.0})
    DEN = (("--max-denominator",), {"type": int, "default": 2})

    add("rho", cmd_rho, "acceptance probability of a word", PFA, W)
    add("gap", cmd_gap, "exact gap of a word", PFA, W)
    add("ad", cmd_ad, "deterministic automatic complexity", W, MAXS)
    add("an", cmd_an, "nondeterministic automatic complexity", W, MAXS)
    add("nfa2pfa", cmd_nfa2pfa, "lift an NFA witness to a PFA", (("--nfa",), {"required": True}))
    add("reverse", cmd_reverse, "PFA for reversed words", PFA)
    add("drop-prefix", cmd_drop_prefix, "PFA after reading a prefix", PFA, (("--prefix",), {"required": True}))
    add("classify2", cmd_classify2, "is the word in a two-state family?", W)
    add("witness2", cmd_witness2, "construct a two-state witness", W)
    add("trace", cmd_trace, "extremal trace of a two-map system", IFS, LEN)
    add("witnessed-lang", cmd_witnessed_lang, "words witnessed by a two-map system", IFS, LEN,
        (("--tail",), {"action": "store_true", "help": "also match the tail against the eventual patterns"}))
    add("gamma", cmd_gamma, "certified enclosure of the best gap", K, W, RESTARTS)
    add("ap-delta", cmd_ap_delta, "least k with gap above delta", W, (("--delta",), {"required": True}), RESTARTS)
    add("enum-e", cmd_enum_e, "enclosures at every k below the DFA complexity", W, RESTARTS)
    add("semidecide", cmd_semidecide, "search for a k-state witness", W, K, WALL, DEN,
        (("--progress",), {"action": "store_true", "help": "stream progress records"}))
    add("ap-bound", cmd_ap_bound, "best certified upper bound on the state count", W, WALL, DEN)
    add("blackbox", cmd_blackbox, "statistical gap test by sampling", PFA, W,
        (("--delta",), {"required": True}), (("--epsilon",), {"type": float, "default": 0.05}),
        (("--margin",), {"default": None}))

    st = sub.add_parser("store", help="persistent witness store")
    ssub = st.add_subparsers(dest="store_command", required=True)
    STORE = (("--store",), {"default": None, "help": "store file (default: $PFACX_STORE or witnesses.jsonl)"})
    for name, func, opts in (("add", cmd_store_add, [W, PFA, (("--provenance",), {"default": "user"})]),
                             ("list", cmd_store_list, []), ("verify", cmd_store_verify, [])):
        sp = ssub.add_parser(name, parents=[common])
        for flags, kw in [STORE, *opts]:
            sp.add_argument(*flags, **kw)
        sp.set_defaults(func=func)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if hasattr(args, "word"):
            word(args.word)  # fail early on non-digit words
        _emit(args.func(args))
        return EXIT_OK
    except _Exit as exc:
        _emit(exc.payload)
        return exc.code
    except (InputError, PreconditionError) as exc:
        log.error("%s", exc)
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return EXIT_INPUT
    except (BudgetError, classify.WitnessError) as exc:
        log.error("%s", exc)
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return EXIT_BUDGET


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
