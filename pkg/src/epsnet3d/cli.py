"""Command line: ``epsnet3d gen | epsnet | hit | cover | verify | bench``.

Exit codes: 0 success, 1 bad input, 2 verification failure, 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .approx import HittingInstance, bg_hitting_set, lp_hitting_set, set_cover
from .decompose import PolytopeFamily, polytope_net
from .errors import EpsNetError, InputError, NetVerificationFailed
from .geometry import ConvexPolytope, Halfspace
from .harness import (PRESETS, DISTRIBUTIONS, InstanceSpec, exact_opt, generate, greedy_baseline,
                      verify_net)
from .planar import cone_net

# canonical JSON -------------------------------------------------------------


def dumps(obj) -> str:
    """Sorted keys, floats at 17 significant digits, no whitespace variation."""
    return _enc(obj) + "\n"


def _enc(x) -> str:
    if isinstance(x, dict):
        items = sorted((str(k), v) for k, v in x.items())
        return "{" + ", ".join(f"{_enc(k)}: {_enc(v)}" for k, v in items) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_enc(v) for v in x) + "]"
    if isinstance(x, np.ndarray):
        return _enc(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if not math.isfinite(v):
            raise ValueError("non-finite float in output")
        return format(v, ".17g")
    if x is None:
        return "null"
    if isinstance(x, str):
        import json
        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def loads(text: str):
    import json
    return json.loads(text)


def family_to_json(fam: PolytopeFamily) -> dict:
    return {"pieces": [{"vertices": T.vertices.tolist(),
                        "facets": [{"normal": h.normal.tolist(), "offset": h.offset} for h in T.facets]}
                       for T in fam.pieces]}


def family_from_json(doc: dict) -> PolytopeFamily:
    pieces = []
    for p in doc["pieces"]:
        facets = [Halfspace.from_normal(f["normal"], f["offset"]) for f in p["facets"]]
        pieces.append(ConvexPolytope.from_representations(p["vertices"], facets))
    return PolytopeFamily(tuple(pieces))


def instance_to_json(inst: HittingInstance, seed: int) -> dict:
    return {"polytope": family_to_json(inst.family), "points": inst.points.tolist(),
            "translates": inst.ranges.tolist(), "seed": seed}


def read_instance(path: str) -> tuple[HittingInstance, dict]:
    try:
        doc = loads(Path(path).read_text())
        fam = family_from_json(doc["polytope"])
        inst = HittingInstance(np.asarray(doc["points"], float).reshape(-1, 3), fam,
                               np.asarray(doc.get("translates", []), float).reshape(-1, 3))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read instance {path}: {exc}") from None
    return inst, doc


def write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# commands -------------------------------------------------------------------

def cmd_gen(args) -> int:
    spec = InstanceSpec(seed=args.seed, n=args.n, distribution=args.distribution, preset=args.preset,
                        vertices=args.vertices, n_ranges=args.ranges)
    inst = generate(spec)
    write(args.out, dumps(instance_to_json(inst, args.seed)))
    return 0


def _lowest_cone(fam: PolytopeFamily):
    from .decompose import vertex_cones
    T = fam.pieces[0]
    V = T.vertices
    v = int(np.lexsort((V[:, 1], V[:, 0], V[:, 2]))[0])
    return vertex_cones(T, v)[0]


def cmd_epsnet(args) -> int:
    inst, doc = read_instance(args.instance)
    eps = args.epsilon
    if not (0 < eps <= 1):
        raise InputError(f"--epsilon must lie in (0, 1], got {eps}")
    n = inst.n
    if args.mode == "cone":
        C = _lowest_cone(inst.family)
        m = max(1, math.ceil(eps * n - 1e-9))
        r = cone_net(inst.points, C, m, seed=args.seed, keep_trace=bool(args.svg)) if n else None
        net = r.net if r else []
        bound = r.bound if r else 0
        breakdown = r.stats if r else {}
        trace = (C, r.trace) if r and r.trace is not None else None
    else:
        res = polytope_net(inst.points, inst.family, eps, seed=args.seed)
        net, bound, breakdown = res.net, res.bound, res.breakdown
        trace = None
        if args.svg and n:
            C = _lowest_cone(inst.family)
            m = max(1, math.ceil(eps * n - 1e-9))
            trace = (C, cone_net(inst.points, C, m, seed=args.seed, keep_trace=True).trace)
    out = {"epsilon": eps, "mode": args.mode, "net": [int(i) for i in net], "size": len(net),
           "bound": int(bound), "breakdown": breakdown, "seed": doc.get("seed", args.seed)}
    write(args.out, dumps(out))
    if args.svg and trace is not None and trace[1] is not None:
        from .svg import render_cone_net
        C, tr = trace
        Path(args.svg).write_text(render_cone_net(tr, C, net if args.mode == "cone" else []))
    return 0


def _with_oracle(sol, inst, mode, args) -> dict:
    out = {"chosen": sol.chosen, "size": sol.size,
           "certificate": {str(k): v for k, v in sorted(sol.certificate.items())},
           "stats": {k: v for k, v in sol.stats.items() if isinstance(v, (int, float, str))}}
    if args.oracle:
        g = greedy_baseline(inst, mode)
        out["greedy"] = g.size
        try:
            opt = exact_opt(inst, mode, cap=args.cap).opt_value
            out["opt"] = opt
            out["ratio"] = sol.size / opt if opt else None
        except EpsNetError as exc:
            out["opt"] = None
            out["oracle_note"] = str(exc)
    return out


def cmd_hit(args) -> int:
    inst, _ = read_instance(args.instance)
    if args.solver == "lp":
        sol = lp_hitting_set(inst, args.gamma, seed=args.seed)
    else:
        sol = bg_hitting_set(inst, seed=args.seed)
    M = inst.membership
    for r, p in sol.certificate.items():
        if not M[r, p]:
            raise NetVerificationFailed(f"certificate for range {r} is wrong")
    if len(sol.certificate) != len(M):
        raise NetVerificationFailed("solution leaves a range unhit")
    write(args.out, dumps(_with_oracle(sol, inst, "hitting", args)))
    return 0


def cmd_cover(args) -> int:
    inst, _ = read_instance(args.instance)
    sol = set_cover(inst, seed=args.seed, solver=args.solver, gamma=args.gamma)
    write(args.out, dumps(_with_oracle(sol, inst, "cover", args)))
    return 0


def cmd_verify(args) -> int:
    inst, _ = read_instance(args.instance)
    try:
        net_doc = loads(Path(args.net).read_text())
        net = [int(i) for i in net_doc["net"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read net {args.net}: {exc}") from None
    eps = args.epsilon if args.epsilon is not None else float(net_doc["epsilon"])
    if any(i < 0 or i >= inst.n for i in net):
        raise InputError("net refers to a point outside the instance")
    shape = _lowest_cone(inst.family) if net_doc.get("mode") == "cone" else inst.family
    res = verify_net(inst.points, shape, eps, net)
    if res.ok:
        print(f"ok: no translate with >= {eps:g}*n points avoids the {len(net)}-point net")
        return 0
    print(f"violator: offset {res.violator} (piece {res.piece}) holds {res.count} points and no net point")
    return 2


def cmd_bench(args) -> int:
    rows = []
    lines = []
    for i, preset in enumerate(PRESETS):
        seed = args.seed + i
        inst = generate(InstanceSpec(seed=seed, n=args.n, preset=preset, n_ranges=args.ranges))
        t0 = time.perf_counter()
        res = polytope_net(inst.points, inst.family, args.epsilon, seed=seed)
        ok = verify_net(inst.points, inst.family, args.epsilon, res.net).ok
        row = {"preset": preset, "seed": seed, "n": inst.n, "epsilon": args.epsilon,
               "net": len(res.net), "bound": res.bound, "verified": ok}
        if args.ranges:
            sol = bg_hitting_set(inst, seed=seed)
            row["hit"] = sol.size
            row["greedy"] = greedy_baseline(inst).size
        row["seconds"] = round(time.perf_counter() - t0, 3)
        rows.append(row)
        lines.append(dumps(row))
    keys = list(rows[0])
    table = [" | ".join(keys), " | ".join("---" for _ in keys)]
    table += [" | ".join(str(r.get(k, "")) for k in keys) for r in rows]
    write(args.out, "\n".join(table) + "\n")
    if args.jsonl:
        Path(args.jsonl).write_text("".join(lines))
    return 0


# parser ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="epsnet3d", description="Epsilon-nets, hitting sets and set covers for translates in 3D.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a seeded instance")
    g.add_argument("--preset", choices=PRESETS, default="cube")
    g.add_argument("--distribution", choices=DISTRIBUTIONS, default="uniform-box")
    g.add_argument("--vertices", type=int, default=6, help="vertex count for random-convex")
    g.add_argument("--n", type=int, default=60)
    g.add_argument("--ranges", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("epsnet", help="build an epsilon-net")
    e.add_argument("instance")
    e.add_argument("--epsilon", type=float, required=True)
    e.add_argument("--mode", choices=("polytope", "cone"), default="polytope")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--svg")
    e.add_argument("--out")
    e.set_defaults(func=cmd_epsnet)

    for name, func in (("hit", cmd_hit), ("cover", cmd_cover)):
        h = sub.add_parser(name, help=f"{'hitting set' if name == 'hit' else 'set cover'} for the instance")
        h.add_argument("instance")
        h.add_argument("--solver", choices=("bg", "lp"), default="bg")
        h.add_argument("--gamma", type=float, default=0.1)
        h.add_argument("--oracle", action="store_true", help="compare with the exact optimum")
        h.add_argument("--cap", type=int, default=4)
        h.add_argument("--seed", type=int, default=0)
        h.add_argument("--out")
        h.set_defaults(func=func)

    v = sub.add_parser("verify", help="check a net against every canonical translate")
    v.add_argument("instance")
    v.add_argument("net")
    v.add_argument("--epsilon", type=float)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="seeded suite over all presets")
    b.add_argument("--n", type=int, default=40)
    b.add_argument("--ranges", type=int, default=0)
    b.add_argument("--epsilon", type=float, default=0.5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--jsonl")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NetVerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return exc.exit_code
    except EpsNetError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
