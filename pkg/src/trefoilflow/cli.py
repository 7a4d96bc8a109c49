"""Command-line entry point.

Every subcommand reads an optional INI file (``--config``; keys from the
``[common]`` section and the section named after the subcommand) and then
applies command-line flags on top.  A JSON summary goes to stdout; its
``status`` is ok, fail or unresolved and the exit code is 0 only for ok.
Module errors print a diagnostic JSON and exit 1; usage errors exit 2.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 1, 2

SELFTEST_SUITES = {
    "tpoint-find": ["lorenz"],
    "trefoil-certify": ["lorenz", "knots"],
    "lorenz-orbit": ["lorenz"],
    "model-classify": ["model"],
    "model-horseshoe": ["model"],
    "model-orbit": ["model"],
    "modular-return": ["modular"],
    "modular-itinerary": ["modular"],
    "knot-from-word": ["knots"],
    "ghys-check": ["knots", "modular", "model", "ghys"],
    "sweep": ["hyperbolic", "lorenz", "model", "modular", "knots", "ghys"],
}


# --- JSON with 17 significant digits ------------------------------------------------


def _encode(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "value"):  # enums
        return _encode(obj.value)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj)


def _emit(summary: dict) -> int:
    print(dumps(summary))
    return EXIT_OK if summary.get("status") == "ok" else EXIT_ERROR


def _write_json(args, name, obj):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, name)
        with open(path, "w") as fh:
            fh.write(dumps(obj) + "\n")
        return path
    return None


def _out_path(args, name):
    if not args.out:
        return None
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _words(s):
    return [w for w in str(s).replace(",", " ").split() if w]


def _floats(s):
    return [float(v) for v in str(s).replace(",", " ").split()]


# --- subcommands ---------------------------------------------------------------------


def cmd_tpoint_find(args):
    from .lorenz import LorenzParams, TPointDivergence, find_tpoint

    try:
        res = find_tpoint(LorenzParams(args.sigma0, args.rho0, args.beta), tol=args.tol,
                          integrator_tol=args.integrator_tol, eps=args.eps,
                          max_iter=args.max_iter)
    except TPointDivergence as exc:
        _write_json(args, "tpoint_log.json", exc.history)
        return dict(status="unresolved", error=str(exc), history=exc.history)
    log = _write_json(args, "tpoint_log.json", res.history)
    return dict(status="ok", rho=res.params.rho, sigma=res.params.sigma, beta=res.params.beta,
                miss=[res.miss.dx, res.miss.dy], miss_norm=res.miss.norm,
                iterations=res.iterations, condition=res.condition, log=log)


def cmd_trefoil_certify(args):
    from .lorenz import LorenzParams, assemble_trefoil, certify_trefoil, find_tpoint

    if args.rho is None or args.sigma is None:
        tp = find_tpoint(LorenzParams(10.0, 30.0, args.beta), integrator_tol=args.tol)
        p = tp.params
    else:
        p = LorenzParams(args.sigma, args.rho, args.beta)
    radii = _floats(args.radii)
    cert = certify_trefoil(p, radii=radii, directions=args.directions, seed=args.seed,
                           tol=args.tol)
    path = _out_path(args, "trefoil.csv")
    if path:
        assemble_trefoil(p, radius=radii[0], tol=args.tol).to_csv(path)
    ok = cert["consistent"] and cert["alexander"] == [1, -1, 1]
    return dict(status="ok" if ok else "fail", rho=p.rho, sigma=p.sigma, beta=p.beta,
                alexander=cert["alexander"], consistent=cert["consistent"],
                results=cert["results"], polyline=path)


def cmd_lorenz_orbit(args):
    from .lorenz import LorenzParams, integrate

    p = LorenzParams(args.sigma, args.rho, args.beta)
    traj = integrate([args.x0, args.y0, args.z0], p, args.T, args.tol)
    path = _out_path(args, "trajectory.csv")
    if path:
        traj.to_csv(path, per_step=args.per_step)
    return dict(status="ok", final=list(traj.final), t_final=float(traj.t[-1]),
                steps=traj.steps, rejected=traj.rejected, trajectory=path)


def _model_params(args):
    from .model import ModelParams

    return ModelParams(args.r, args.nu, args.delta)


def cmd_model_classify(args):
    from .model import classify_regime, export_graph_csv, kneading

    mp = _model_params(args)
    rep = classify_regime(mp, depth=args.depth)
    k = kneading(mp, args.kneading_length)
    path = _out_path(args, "return_map.csv")
    if path:
        export_graph_csv(path, mp)
    return dict(status="ok", r=mp.r, regime=rep.regime, inventory=rep.inventory,
                witnesses=rep.witnesses,
                kneading=dict(plus=k.plus, minus=k.minus, escape_step=k.escape_step,
                              escape_status=k.escape_status, truncated=k.truncated),
                graph=path)


def cmd_model_horseshoe(args):
    from .model import export_survivors_csv, horseshoe_markov, realized_words

    mp = _model_params(args)
    hs = horseshoe_markov(mp, depth=args.depth)
    rw = realized_words(mp, args.length)
    path = _out_path(args, "survivors.csv")
    if path:
        export_survivors_csv(path, mp, args.length)
    ok = (np.array_equal(hs.transition, np.ones((2, 2), dtype=int))
          and hs.x_orientation_preserved and hs.y_orientation_preserved
          and rw["realized"] == rw["distinct"] == 2 ** args.length)
    return dict(status="ok" if ok else "fail", r=mp.r, transition=hs.transition.tolist(),
                rectangles=hs.rectangles, x_orientation_preserved=hs.x_orientation_preserved,
                y_orientation_preserved=hs.y_orientation_preserved, entropy=hs.entropy,
                log2=math.log(2), periodic=rw, survivors=path)


def cmd_model_orbit(args):
    from .model import ReturnMapPoint, itinerary, orbit, periodic_orbit_from_word

    mp = _model_params(args)
    if args.word:
        pt = periodic_orbit_from_word(args.word, mp)
        n = args.n or len(args.word)
    else:
        pt = ReturnMapPoint(args.x, args.y)
        n = args.n or 16
    pts = orbit(pt, mp, n)
    path = _out_path(args, "model_orbit.csv")
    if path:
        with open(path, "w") as fh:
            fh.write("k,x,y,status\n")
            for k, q in enumerate(pts):
                fh.write(f"{k},{q.x!r},{q.y!r},{q.status.value}\n")
    it = itinerary(pt, mp, n)
    out = dict(status="ok", start=[pt.x, pt.y], itinerary=it,
               final=dict(x=pts[-1].x, y=pts[-1].y, status=pts[-1].status.value), orbit=path)
    if args.word:
        periodic = abs(pts[len(args.word)].x - pt.x) < 1e-9 and it[:len(args.word)] == args.word
        out["periodic"] = periodic
        out["status"] = "ok" if periodic else "fail"
    return out


def _section(l):
    from .modular import build_representation, section_geometry

    rep = build_representation(l)
    return rep, section_geometry(rep)


def cmd_modular_return(args):
    from .modular import (CornerOrbit, SectionPoint, Wandering, first_return, seed_periodic,
                          theta_bounds)

    rep, sec = _section(args.l)
    if args.word:
        pt = seed_periodic(rep, sec, args.word).point
    else:
        theta = args.theta
        if theta is None:
            tb = theta_bounds(sec, args.x)
            theta = (tb.lower + tb.upper) / 2
        pt = SectionPoint(args.x, theta)
    steps = []
    fate = "returned"
    path = _out_path(args, "returns.csv")
    try:
        for _ in range(args.n):
            st = first_return(rep, sec, pt)
            steps.append(dict(x=pt.x, theta=pt.theta, x_next=st.point.x,
                              theta_next=st.point.theta, letter=st.letter, time=st.time))
            pt = st.point
    except Wandering as exc:
        fate = "wandering"
        steps.append(dict(x=pt.x, theta=pt.theta, wandering_time=exc.time))
    except CornerOrbit as exc:
        return dict(status="unresolved", error=str(exc), steps=steps)
    if path:
        with open(path, "w") as fh:
            fh.write("x,theta,x_next,theta_next,letter,time\n")
            for s in steps:
                if "letter" in s:
                    fh.write(f"{s['x']!r},{s['theta']!r},{s['x_next']!r},{s['theta_next']!r},"
                             f"{s['letter']},{s['time']!r}\n")
    return dict(status="ok", l=args.l, trims=list(sec.trims), fate=fate,
                itinerary="".join(s.get("letter", "") for s in steps), steps=steps,
                returns=path)


def cmd_modular_itinerary(args):
    from .knots.words import LorenzWord
    from .modular import itinerary, seed_periodic

    rep, sec = _section(args.l)
    results = []
    for w in _words(args.word):
        s = seed_periodic(rep, sec, w)
        it = itinerary(rep, sec, s.point, args.periods * len(w))
        results.append(dict(word=w, seed=[s.point.x, s.point.theta], rotation=s.word,
                            itinerary=it, length=s.length,
                            agree=LorenzWord(w).cyclic_equal(it[:len(w)])
                            and it == s.word * args.periods))
    _write_json(args, "itineraries.json", results)
    return dict(status="ok" if all(r["agree"] for r in results) else "fail", l=args.l,
                results=results)


def _knot(w):
    from .knots import knot_certificate
    from .knots.words import LorenzWord

    lw = LorenzWord(w)
    c = knot_certificate(lw)
    return dict(word=lw.symbols, normal_form=lw.normal_form().symbols, strands=c.strands,
                braid=c.braid, genus=c.genus, alexander=c.alexander,
                alexander_diagram=c.alexander_diagram, seifert_genus=c.seifert_genus,
                consistent=c.consistent)


def cmd_knot_from_word(args):
    from .knots import braid_closure_diagram, lorenz_braid

    res = _knot(args.word)
    path = _out_path(args, "pd.json")
    if path:
        with open(path, "w") as fh:
            fh.write(braid_closure_diagram(lorenz_braid(args.word)).to_json() + "\n")
    res["status"] = "ok" if res["consistent"] else "fail"
    res["pd"] = path
    return res


def _ghys(w, l, r):
    from .knots import ghys_word_check
    from .model import ModelParams

    rep, sec = _section(l)
    return ghys_word_check(w, rep, sec, ModelParams(r)).to_dict()


def cmd_ghys_check(args):
    from .knots.words import primitive_mixed_words

    words = _words(args.word) if args.word else [w.symbols for w in
                                                 primitive_mixed_words(args.max_len)]
    reports = [_ghys(w, args.l, args.r) for w in words]
    _write_json(args, "ghys.json", reports)
    failed = [r["word"] for r in reports if not r["ok"]]
    return dict(status="ok" if not failed else "fail", l=args.l, r=args.r, words=len(words),
                failed=failed, reports=reports if args.verbose or len(words) == 1 else None)


def cmd_sweep(args):
    """Fan independent word runs over worker threads and merge the results by word."""
    from .knots.words import primitive_mixed_words

    words = [w.symbols for w in primitive_mixed_words(args.max_len)]
    if args.sample and args.sample < len(words):
        rng = np.random.default_rng(args.seed)
        words = sorted(rng.choice(words, size=args.sample, replace=False).tolist())
    if args.kind == "ghys":
        job = lambda w: _ghys(w, args.l, args.r)
        good = lambda res: res["ok"]
    elif args.kind == "knot":
        job = _knot
        good = lambda res: res["consistent"]
    else:
        def job(w):
            from .model import itinerary, periodic_orbit_from_word

            mp = _model_params(args)
            it = itinerary(periodic_orbit_from_word(w, mp), mp, len(w))
            return dict(word=w, itinerary=it)
        good = lambda res: res["itinerary"] == res["word"]
    with ThreadPoolExecutor(max_workers=args.workers) as ex:
        results = dict(zip(words, ex.map(job, words)))
    merged = {w: results[w] for w in sorted(results)}
    _write_json(args, f"sweep_{args.kind}.json", merged)
    failed = [w for w, res in merged.items() if not good(res)]
    return dict(status="ok" if not failed else "fail", kind=args.kind, words=len(merged),
                failed=failed, seed=args.seed)


# --- parser and config ---------------------------------------------------------------


def _common(p):
    p.add_argument("--config", help="INI file; [common] and [<command>] sections")
    p.add_argument("--out", help="directory for CSV/JSON artifacts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--selftest", action="store_true", help="run the module invariant suite")


def _lorenz_flags(p, rho=28.0, sigma=10.0):
    p.add_argument("--rho", type=float, default=rho)
    p.add_argument("--sigma", type=float, default=sigma)
    p.add_argument("--beta", type=float, default=8.0 / 3.0)


def _model_flags(p):
    p.add_argument("--r", type=float, default=0.1)
    p.add_argument("--nu", type=float, default=0.3)
    p.add_argument("--delta", type=float, default=0.6)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trefoilflow", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tpoint-find", help="Newton search for the T-point in (rho, sigma)")
    _common(p)
    p.add_argument("--rho0", type=float, default=30.0)
    p.add_argument("--sigma0", type=float, default=10.0)
    p.add_argument("--beta", type=float, default=8.0 / 3.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--integrator-tol", type=float, default=1e-10)
    p.add_argument("--eps", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=100)
    p.set_defaults(func=cmd_tpoint_find)

    p = sub.add_parser("trefoil-certify", help="assemble the heteroclinic loop and compute its knot")
    _common(p)
    _lorenz_flags(p, rho=None, sigma=None)
    p.add_argument("--radii", default="500,1000")
    p.add_argument("--directions", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_trefoil_certify)

    p = sub.add_parser("lorenz-orbit", help="integrate one trajectory")
    _common(p)
    _lorenz_flags(p)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--z0", type=float, default=1.0)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--per-step", type=int, default=1)
    p.set_defaults(func=cmd_lorenz_orbit)

    p = sub.add_parser("model-classify", help="regime of the return-map family at r")
    _common(p)
    _model_flags(p)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--kneading-length", type=int, default=16)
    p.set_defaults(func=cmd_model_classify)

    p = sub.add_parser("model-horseshoe", help="Markov structure and periodic orbits for r > 0")
    _common(p)
    _model_flags(p)
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--length", type=int, default=8)
    p.set_defaults(func=cmd_model_horseshoe)

    p = sub.add_parser("model-orbit", help="orbit of a point or the periodic orbit of a word")
    _common(p)
    _model_flags(p)
    p.add_argument("--word")
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--y", type=float, default=0.0)
    p.add_argument("--n", type=int, default=0)
    p.set_defaults(func=cmd_model_orbit)

    p = sub.add_parser("modular-return", help="iterate the first-return map on the section")
    _common(p)
    p.add_argument("--l", type=float, default=0.5)
    p.add_argument("--x", type=float, default=0.1)
    p.add_argument("--theta", type=float, default=None,
                   help="default: middle of the core angle range at x")
    p.add_argument("--word", help="start on the periodic geodesic of this word instead")
    p.add_argument("--n", type=int, default=8)
    p.set_defaults(func=cmd_modular_return)

    p = sub.add_parser("modular-itinerary", help="itinerary of the periodic geodesic of a word")
    _common(p)
    p.add_argument("--l", type=float, default=0.5)
    p.add_argument("--word", default="LR")
    p.add_argument("--periods", type=int, default=1)
    p.set_defaults(func=cmd_modular_itinerary)

    p = sub.add_parser("knot-from-word", help="template braid, genus and Alexander polynomial")
    _common(p)
    p.add_argument("--word", default="LR")
    p.set_defaults(func=cmd_knot_from_word)

    p = sub.add_parser("ghys-check", help="modular, model and knot codings of words")
    _common(p)
    p.add_argument("--l", type=float, default=0.5)
    p.add_argument("--r", type=float, default=0.1)
    p.add_argument("--word", help="comma or space separated words; default all up to --max-len")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_ghys_check)

    p = sub.add_parser("sweep", help="parallel sweep over primitive mixed words")
    _common(p)
    _model_flags(p)
    p.add_argument("--kind", choices=["ghys", "knot", "model"], default="ghys")
    p.add_argument("--l", type=float, default=0.5)
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_sweep)
    return ap


def _apply_config(ap, sp, args):
    """Config values fill in every option not given on the command line."""
    cp = configparser.ConfigParser()
    try:
        if not cp.read(args.config):
            sp.error(f"cannot read config file {args.config}")
    except configparser.Error as exc:
        sp.error(f"bad config file: {exc}")
    actions = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
    given = set()
    for tok in sys.argv[1:] if args._argv is None else args._argv:
        if tok.startswith("--"):
            given.add(tok[2:].split("=")[0].replace("-", "_"))
    for section in ("common", args.command):
        if not cp.has_section(section):
            continue
        for key, raw in cp.items(section):
            dest = key.replace("-", "_")
            if dest not in actions:
                if section == "common":
                    continue
                sp.error(f"unknown config key {key!r} in [{section}]")
            if dest in given:
                continue
            act = actions[dest]
            if isinstance(act, argparse._StoreTrueAction):
                val = cp.getboolean(section, key)
            else:
                try:
                    val = act.type(raw) if act.type else raw
                except ValueError:
                    sp.error(f"bad value {raw!r} for {key}")
                if act.choices and val not in act.choices:
                    sp.error(f"{key} must be one of {act.choices}")
            setattr(args, dest, val)


def run(argv=None) -> int:
    from .hyperbolic import HyperbolicError
    from .knots import DiagramError, NotAKnot
    from .lorenz import LorenzError
    from .model import ModelError

    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args._argv = argv
    sp = ap._subparsers._group_actions[0].choices[args.command]
    if args.config:
        try:
            _apply_config(ap, sp, args)
        except SystemExit:
            return EXIT_USAGE
    if args.selftest:
        from . import selftest

        return _emit(dict(command=args.command, **selftest.run(SELFTEST_SUITES[args.command])))
    try:
        summary = args.func(args)
    except (LorenzError, ModelError, HyperbolicError, DiagramError, NotAKnot, ValueError) as exc:
        print(dumps(dict(status="fail", command=args.command, error=type(exc).__name__,
                         message=str(exc))))
        return EXIT_ERROR
    summary = dict(summary)
    summary["command"] = args.command
    return _emit(summary)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
