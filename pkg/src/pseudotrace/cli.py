"""Command-line entry point: every suite prints a deterministic report; exit 1 on any FAIL."""

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from ._report import report, summarize
from .errors import ConvergenceDomainError, TruncationOverflow


def _seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("PSEUDOTRACE_SEED", "0"))


def _digest(obj):
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def _sort_key(check):
    return (check["identity"], json.dumps(check["indices"], sort_keys=True))


def make_report(suite, checks, inputs, result=None):
    checks = sorted(checks, key=_sort_key)
    out = {"suite": suite, "version": __version__, "inputs": inputs, "input_digest": _digest(inputs),
           "counts": summarize(checks), "checks": checks}
    if result is not None:
        out["result"] = result
    return out


def emit(rep, fmt, stream=None):
    stream = sys.stdout if stream is None else stream
    if fmt == "json":
        stream.write(json.dumps(rep, sort_keys=True, indent=1) + "\n")
        return
    for c in rep["checks"]:
        idx = " ".join(f"{k}={v}" for k, v in sorted(c["indices"].items()))
        line = f"{c['status']:7} {c['identity']} {idx}"
        if c.get("detail"):
            line += f"  ({c['detail']})"
        stream.write(line + "\n")
    if "result" in rep:
        stream.write(json.dumps(rep["result"], sort_keys=True, indent=1) + "\n")
    counts = rep["counts"]
    stream.write(f"{rep['suite']}: {counts['PASS']} passed, {counts['FAIL']} failed, "
                 f"{counts['SKIPPED']} skipped\n")


# -- suites ---------------------------------------------------------------------------


def run_identities(args):
    from .combinatorics import verify_binomial_identities
    seed = _seed(args)
    raw = verify_binomial_identities(args.max, args.samples, seed)
    checks = [{"identity": r["id"], "indices": r["params"], "status": r["status"]} for r in raw]
    return make_report("identities", checks, {"suite": args.suite, "max": args.max,
                                              "samples": args.samples, "seed": seed})


def _parse_tau(text):
    return complex(text.replace(" ", "").replace("i", "j"))


def run_qexp(args):
    from . import qexp
    action = args.action
    inputs = {"action": action, "x_lo": args.x_lo, "x_hi": args.x_hi, "q_order": args.q_order}
    if action == "expand":
        inputs["kernel"] = args.kernel
        inputs["weight"] = args.weight
        if args.kernel == "eisenstein":
            result = qexp.eisenstein_qexp(args.weight, args.q_order).to_json()
        else:
            builders = {
                "wp2-tilde": lambda: qexp.tilde_wp2(args.x_hi, args.q_order),
                "wp1-tilde": lambda: qexp.tilde_wp1_minus_g2x(args.x_hi, args.q_order),
                "wp2": lambda: qexp.wp2_x_expansion(max(1, (args.x_hi + 1) // 2), args.q_order),
                "wp1": lambda: qexp.wp1_x_expansion(max(0, (args.x_hi - 1) // 2), args.q_order),
            }
            ds = builders[args.kernel]()
            result = ds.restrict((args.x_lo, args.x_hi), args.q_order).to_json()
        return make_report("qexp", [], inputs, result)
    if action in ("kernels", "lemma-a1"):
        return make_report("qexp", kernel_checks(args.x_lo, args.x_hi, args.q_order), inputs)
    inputs.update({"tau": args.tau, "weight": args.weight_list, "tol": args.tol})
    return make_report("qexp", modular_checks(args.tau, args.weight_list, args.q_order, args.tol), inputs)


def kernel_checks(x_lo=-2, x_hi=8, q_order=8):
    from . import qexp
    res = qexp.kernel_expansion_check((max(x_lo, -2), x_hi), q_order, (max(x_lo, -1), x_hi + 1))
    checks = []
    for key in ("wp2", "wp1"):
        part = res[key]
        checks.append(report("kernel-" + key, {"x_window": part["x_window"], "q_order": q_order},
                             lambda d=part["discrepancies"]: d))
    checks.append(report("kernel-derivative", {"x_hi": x_hi, "q_order": q_order},
                         lambda: qexp.derivative_relation_residual(x_hi, q_order)))
    return checks


def modular_checks(taus, weights, q_order=40, tol=1e-6):
    from . import qexp
    checks = []
    for tau in taus:
        for w in weights:
            idx = {"tau": tau, "weight": w, "q_order": q_order}
            try:
                err = qexp.modular_numeric_check(w, _parse_tau(tau), q_order)
            except ConvergenceDomainError as exc:
                checks.append({"identity": "modularity", "indices": idx, "status": "FAIL",
                               "detail": str(exc)})
                continue
            entry = {"identity": "modularity", "indices": idx,
                     "status": "PASS" if err < tol else "FAIL", "detail": f"residual {err:.3e}"}
            checks.append(entry)
    return checks


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def run_algebra(args):
    from . import algkit
    if args.action == "laws":
        seed = _seed(args)
        checks = algkit.verify_corpus_laws(seed, args.pairs, args.slfs)
        return make_report("algebra", checks, {"action": "laws", "seed": seed, "pairs": args.pairs,
                                                "slfs": args.slfs})
    data = _load_json(args.slf)
    A = algkit.FinDimAlgebra.from_json(data["algebra"])
    phi = [algkit.Fraction(x) for x in data["slf"]]
    basic = not args.central
    if "bimodule" in data:
        bm = data["bimodule"]
        M = algkit.Bimodule(A, [[[algkit.Fraction(x) for x in r] for r in m] for m in bm["left"]],
                            [[[algkit.Fraction(x) for x in r] for r in m] for m in bm["right"]])
        dec = algkit.decompose_slf_bimodule(A, M, phi, basic=basic, seed=_seed(args))
        checks = [report("bimodule-reconstruction", {}, dec.reconstruction_holds),
                  report("bimodule-f-laws", {}, dec.f_laws_hold)]
    else:
        dec = algkit.decompose_slf_algebra(A, phi, basic=basic, seed=_seed(args))
        checks = [report("slf-reconstruction", {}, dec.reconstruction_holds),
                  report("radical-annihilates", {}, dec.radical_annihilates)]
    return make_report("algebra", checks, {"action": "decompose", "data": data, "basic": basic},
                       _jsonable(dec.report()))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)


def _vertex_data(args):
    from . import modekit
    if getattr(args, "data", None):
        return modekit.from_json(_load_json(args.data))
    return modekit.builtin(args.algebra, args.D)


def _vector_json(V, vec):
    return {V.labels[i]: str(c) for i, c in sorted(vec.c.items())}


def run_voa(args):
    from . import modekit
    V = _vertex_data(args)
    inputs = {"action": args.action, "algebra": V.name, "D": V.D}
    if args.action == "check":
        checks = modekit.verify_u1_identities(V) + modekit.verify_mode_algebra(V, N_max=args.N)
        inputs["N_max"] = args.N
        return make_report("voa", checks, inputs)
    u, v = V.state(args.u), V.state(args.v)
    inputs.update({"op": args.op, "u": V.labels[args.u], "v": V.labels[args.v], "N": args.N})
    if args.op == "star_n":
        result = _vector_json(V, modekit.star_n(V, u, v, args.N))
    elif args.op == "bullet_n":
        result = _vector_json(V, modekit.bullet_n(V, u, v, args.N))
    else:
        inputs.update({"k": args.k, "n": args.n, "l": args.l, "flavor": args.flavor, "side": args.side})
        mu = modekit.UMatrix.single(args.N, args.k, args.n, u)
        mv = modekit.UMatrix.single(args.N, args.n, args.l, v)
        prod = modekit.diamond(V, mu, mv, args.flavor, args.side)
        result = {f"{k},{l}": _vector_json(V, x) for (k, l), x in sorted(prod.entries.items())}
    return make_report("voa", [], inputs, result)


def qtrace_checks(V, q_order, suite):
    from . import qtrace
    ctx = qtrace.TraceContext(V)
    S = qtrace.shifted_trace(ctx, q_order)
    if suite == "character":
        # o(U(1) 1) is the identity, so each coefficient is a graded dimension
        one = V.one()
        return [report("character", {"n": n, "coefficient": str(S.coefficient(one, n))},
                       lambda n=n: S.coefficient(one, n) - len(ctx.grade_states(n)))
                for n in range(S.q_order + 1)]
    if suite == "blocks":
        checks = qtrace.conformal_block_reports(S)
        for w in qtrace.test_vectors(V):
            checks += qtrace.verify_operator_identities(V, w, q_order=q_order)
        return checks
    if suite in ("residue-lemma", "lemma11"):
        return qtrace.residue_lemma_grid(V, 3)
    return qtrace.verify_derived_trace_identities(S)


def run_qtrace(args):
    V = _vertex_data(args)
    q_order = args.q_order
    if V.closed and q_order is None:
        q_order = 4
    inputs = {"algebra": V.name, "D": V.D, "q_order": q_order, "suite": args.suite}
    try:
        checks = qtrace_checks(V, q_order, args.suite)
    except TruncationOverflow as exc:
        checks = [{"identity": args.suite, "indices": {"q_order": q_order}, "status": "FAIL",
                   "detail": str(exc)}]
    return make_report("qtrace", checks, inputs)


def run_all(args):
    from . import algkit, combinatorics, modekit
    seed = _seed(args)
    checks = []

    def tag(prefix, items):
        for c in items:
            checks.append(dict(c, identity=f"{prefix}/{c['identity']}"))

    tag("identities", [{"identity": r["id"], "indices": r["params"], "status": r["status"]}
                       for r in combinatorics.verify_binomial_identities(12, 20, seed)])
    tag("qexp", kernel_checks())
    tag("qexp", modular_checks(["2i", "1+2i"], [4, 6]))
    tag("algebra", algkit.verify_corpus_laws(seed))
    for V in (modekit.builtin("heisenberg", 4), modekit.builtin("trivial")):
        tag("voa", modekit.verify_u1_identities(V) + modekit.verify_mode_algebra(V))
    for V, q in ((modekit.builtin("heisenberg", 5), 5), (modekit.builtin("trivial"), 4)):
        tag("qtrace", qtrace_checks(V, q, "blocks"))
    H6 = modekit.builtin("heisenberg", 6)
    tag("qtrace", qtrace_checks(H6, 6, "residue-lemma"))
    tag("qtrace", qtrace_checks(H6, 6, "derived"))
    return make_report("all", checks, {"seed": seed})


# -- parser -------------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="pseudotrace", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=["json", "text"], default="json")
    fmt.add_argument("--seed", type=int, default=None,
                     help="seed for randomized sweeps (default: $PSEUDOTRACE_SEED or 0)")
    sub = p.add_subparsers(dest="command", required=True)

    ident = sub.add_parser("identities", help="binomial identity sweeps")
    isub = ident.add_subparsers(dest="action", required=True)
    iv = isub.add_parser("verify", parents=[fmt])
    iv.add_argument("--suite", choices=["binomial", "appendixB"], default="binomial",
                    help="appendixB is an alias of binomial")
    iv.add_argument("--max", type=int, default=12)
    iv.add_argument("--samples", type=int, default=20)
    iv.set_defaults(func=run_identities)

    qe = sub.add_parser("qexp", help="kernel expansions and their checks")
    qsub = qe.add_subparsers(dest="action", required=True)
    for name in ("expand", "kernels", "modular"):
        aliases = ["lemma-a1"] if name == "kernels" else []
        sp = qsub.add_parser(name, parents=[fmt], aliases=aliases)
        sp.add_argument("--x-lo", type=int, default=-2)
        sp.add_argument("--x-hi", type=int, default=8)
        sp.add_argument("--q-order", type=int, default=40 if name == "modular" else 8)
        if name == "expand":
            sp.add_argument("--kernel", choices=["wp2", "wp1", "wp2-tilde", "wp1-tilde", "eisenstein"],
                            default="wp2-tilde")
            sp.add_argument("--weight", type=int, default=4, help="Eisenstein weight 2k")
        if name == "modular":
            sp.add_argument("--tau", action="append", default=None, help="e.g. 2i or 1+2i (repeatable)")
            sp.add_argument("--weight", dest="weight_list", type=int, action="append", default=None)
            sp.add_argument("--tol", type=float, default=1e-6, help="absolute tolerance (default 1e-6)")
        sp.set_defaults(func=run_qexp)

    al = sub.add_parser("algebra", help="symmetric linear functions on finite-dimensional algebras")
    asub = al.add_subparsers(dest="action", required=True)
    dec = asub.add_parser("decompose", parents=[fmt])
    dec.add_argument("--slf", required=True, help="JSON file with algebra, slf and optional bimodule")
    dec.add_argument("--central", action="store_true", help="use central idempotents only (no basic reduction)")
    dec.set_defaults(func=run_algebra)
    laws = asub.add_parser("laws", parents=[fmt])
    laws.add_argument("--pairs", type=int, default=50)
    laws.add_argument("--slfs", type=int, default=3)
    laws.set_defaults(func=run_algebra)

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--algebra", choices=["heisenberg", "trivial"], default="heisenberg")
    data.add_argument("--D", type=int, default=4)
    data.add_argument("--data", help="vertex data JSON file (overrides --algebra)")

    voa = sub.add_parser("voa", help="mode products at a weight cutoff")
    vsub = voa.add_subparsers(dest="action", required=True)
    prod = vsub.add_parser("product", parents=[fmt, data])
    prod.add_argument("--op", choices=["star_n", "bullet_n", "diamond"], required=True)
    prod.add_argument("--u", type=int, default=1, help="basis index")
    prod.add_argument("--v", type=int, default=1, help="basis index")
    prod.add_argument("--N", type=int, default=0)
    prod.add_argument("--k", type=int, default=0)
    prod.add_argument("--n", type=int, default=0)
    prod.add_argument("--l", type=int, default=0)
    prod.add_argument("--flavor", choices=["tilde", "plain"], default="tilde")
    prod.add_argument("--side", choices=["left", "right"], default="left")
    prod.set_defaults(func=run_voa)
    chk = vsub.add_parser("check", parents=[fmt, data])
    chk.add_argument("--N", type=int, default=2)
    chk.set_defaults(func=run_voa)

    qt = sub.add_parser("qtrace", help="shifted traces and genus-one conditions")
    qsub2 = qt.add_subparsers(dest="action", required=True)
    run = qsub2.add_parser("run", parents=[fmt, data])
    run.add_argument("--q-order", type=int, default=None)
    run.add_argument("--suite", choices=["character", "blocks", "residue-lemma", "lemma11", "derived"],
                     default="blocks", help="lemma11 is an alias of residue-lemma")
    run.set_defaults(func=run_qtrace)

    everything = sub.add_parser("all", parents=[fmt], help="every suite at acceptance settings")
    everything.set_defaults(func=run_all)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "action", None) == "modular":
        args.tau = args.tau or ["2i", "1+2i"]
        args.weight_list = args.weight_list or [4, 6]
    try:
        rep = args.func(args)
    except (OSError, KeyError, ValueError) as exc:
        parser.exit(2, f"pseudotrace: error: {exc}\n")
    emit(rep, args.format)
    return 1 if rep["counts"]["FAIL"] else 0


if __name__ == "__main__":
    sys.exit(main())
