"""``treebodies`` command line.

Every command writes an artifact ``{"command", "params", "result"}``. The
``verify`` command re-runs the recorded command from its parameters, re-checks
the stored certificates, and fails if anything differs.

Exit codes: 0 ok, 1 verification failure, 2 schema error, 3 construction
error, 4 resource bound exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import category, genericity, measure
from .clopen import ClopenSet
from .dense_open import MillerU
from .dyadic import Dyadic
from .errors import (
    ConvergenceFuelExhausted,
    LevelOverflow,
    SchemaError,
    TreeBodiesError,
)
from .oracles import full_tree, level_split_tree, oracle_from_json as tree_oracle_from_json
from .trees import Alphabet, FiniteTree, TreeKind, check_kind, tree_to_dot

EXIT_OK, EXIT_VERIFY, EXIT_SCHEMA, EXIT_CONSTRUCTION, EXIT_RESOURCE = 0, 1, 2, 3, 4


def _load_json(arg: str | None):
    """Inline JSON text or a path to a JSON file."""
    if arg is None:
        return None
    text = arg if arg.lstrip().startswith(("{", "[")) else None
    if text is None:
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise SchemaError(f"cannot read {arg}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {arg!r}: {exc}") from None


def _positive(name: str, value: int | None) -> None:
    if value is not None and value < 1:
        raise SchemaError(f"--{name} must be positive")


# ---------------------------------------------------------------------------
# commands: each takes a params dict and returns (result json, ok, main tree)


def run_inscribe_category(p: dict):
    seq = category.sequence_from_json(p["sequence"])
    r = category.inscribe_category(seq, p["levels"], p["max_levels"])
    rep = category.verify_inscription(r, seq)
    out = r.to_json()
    out["report"] = rep.to_json()
    return out, rep.ok, r.miller_approx


def run_inscribe_measure(p: dict):
    stages = measure.stages_from_json(p["stages"])
    r = measure.inscribe_measure(stages, p["levels"])
    ok = all(c.holds for c in r.log) and bool(check_kind(r.tree, TreeKind.UNIFORMLY_PERFECT, r.tree.height))
    return r.to_json(), ok, r.tree


def run_silver_in_closed(p: dict):
    F = ClopenSet.from_json(p["set"])
    r = measure.silver_in_closed(F, p["levels"])
    ok = all(c.holds for c in r.log) and bool(check_kind(r.tree, TreeKind.SILVER, r.tree.height))
    return r.to_json(), ok, r.tree


def run_build_fsigma(p: dict):
    mu = measure.measure_from_json(p["measure"])
    st = measure.build_f_sigma_avoiding_miller(mu, p["n"], p["depth"], p["fuel"])
    return st.to_json(), st.bound == measure.f_sigma_bound(p["n"], p["depth"]), st.tree


def _witness_tree(p: dict, default):
    return tree_oracle_from_json(p["tree"]) if p.get("tree") is not None else default


def run_witness(p: dict):
    kind = p["kind"]
    if kind == "miller":
        T = _witness_tree(p, full_tree(Alphabet.OMEGA))
        rounds = p["rounds"]
        w = category.miller_avoidance_witness(T, rounds, p["fuel"])
        while p.get("bound") and w.checked_generator_bound < p["bound"]:
            rounds += 1
            w = category.miller_avoidance_witness(T, rounds, p["fuel"])
        ok = not p.get("bound") or w.checked_generator_bound >= p["bound"]
        nodes = [w.x_prefix, w.y_prefix]
        return w.to_json(), ok, FiniteTree.closure(nodes, Alphabet.OMEGA)
    if kind == "laver":
        T = _witness_tree(p, full_tree(Alphabet.OMEGA))
        x = category.laver_witness(T, p["depth"], p["fuel"])
        stem = len(T.stem(p["fuel"]))
        ok = all(a != 0 for a in x[stem:])
        return {"x_prefix": list(x), "stem_length": stem}, ok, FiniteTree.closure([x], Alphabet.OMEGA)
    if kind == "silver-square":
        T = _witness_tree(p, full_tree(Alphabet.BINARY))
        w = category.silver_square_witness(T, p["depth"])
        return w.to_json(), True, FiniteTree.closure([w.x_prefix, w.y_prefix], T.alphabet)
    if kind == "up-miller":
        T = _witness_tree(p, level_split_tree([0, 2, 4]))
        w = category.up_miller_witness(T, p["depth"], p["n"])
        return w.to_json(), True, FiniteTree.closure([w.point], Alphabet.OMEGA)
    if kind == "small-set":
        T = _witness_tree(p, full_tree(Alphabet.BINARY))
        w = measure.small_set_witness(T, p["depth"])
        covered_past = [n for n, (lo, hi) in enumerate(w.intervals) if lo > w.difference]
        ok = w.x_prefix != w.y_prefix and set(covered_past) <= set(w.hit_intervals) and w.partial_sum <= w.bound
        return w.to_json(), ok, FiniteTree.closure([w.x_prefix, w.y_prefix], T.alphabet)
    raise SchemaError(f"unknown witness kind {kind!r}")


def run_generic(p: dict):
    schedule = genericity.schedule_from_json(p["schedule"])
    tree, chain = genericity.meet_dense(genericity.root_condition(), schedule)
    rep = genericity.verify_generic(tree, chain, schedule)
    out = {"tree": tree.to_json(), "chain": chain.to_json(),
           "failures": [[k, repr(v)] for k, v in rep.failures]}
    return out, rep.ok, tree


RUNNERS = {
    "inscribe-category": run_inscribe_category,
    "inscribe-measure": run_inscribe_measure,
    "silver-in-closed": run_silver_in_closed,
    "build-fsigma": run_build_fsigma,
    "witness": run_witness,
    "generic": run_generic,
}


def _certificates_hold(result) -> bool:
    """Every stored ``certified_mass``/``threshold`` pair still satisfies its inequality."""
    for c in result.get("log", []) if isinstance(result, dict) else []:
        value, thr = Dyadic.parse(c["certified_mass"]), Dyadic.parse(c["threshold"])
        if not (value > thr if c.get("strict", True) else value >= thr):
            return False
    return True


def verify_artifact(artifact) -> list:
    """Problems found when replaying ``artifact`` (empty when it checks out)."""
    if not isinstance(artifact, dict) or not {"command", "params", "result"} <= set(artifact):
        raise SchemaError("artifact needs 'command', 'params' and 'result'")
    cmd = artifact["command"]
    if cmd not in RUNNERS:
        raise SchemaError(f"unknown command {cmd!r}")
    problems = []
    stored = artifact["result"]
    if cmd == "inscribe-category":
        seq = category.sequence_from_json(artifact["params"]["sequence"])
        rep = category.verify_inscription(category.InscriptionResult.from_json(stored), seq)
        problems += [f"inscription: {c} {d!r}" for c, d in rep.failures]
    if not _certificates_hold(stored):
        problems.append("a stored certificate does not satisfy its inequality")
    fresh, ok, _ = RUNNERS[cmd](artifact["params"])
    if not ok:
        problems.append("re-run does not certify")
    if json.loads(json.dumps(fresh)) != stored:
        problems.append("stored result differs from the re-run")
    return problems


# ---------------------------------------------------------------------------


def _params(args) -> dict:
    cmd = args.command
    if cmd == "inscribe-category":
        seq = _load_json(args.sequence) or {"kind": "constant", "oracle": MillerU().to_json()}
        category.sequence_from_json(seq)
        return {"sequence": seq, "levels": args.levels, "max_levels": args.max_levels}
    if cmd == "inscribe-measure":
        return {"stages": _load_json(args.stages) or {"builtin": "band_complement", "max_stage": None},
                "levels": args.levels}
    if cmd == "silver-in-closed":
        return {"set": _load_json(args.set) or {"generators": [[0]]}, "levels": args.levels}
    if cmd == "build-fsigma":
        return {"measure": _load_json(args.measure) or {"builtin": "geometric"},
                "n": args.n, "depth": args.depth, "fuel": args.fuel}
    if cmd == "witness":
        depth = args.depth if args.depth is not None else {"laver": 5, "up-miller": 6}.get(args.kind, 6)
        return {"kind": args.kind, "tree": _load_json(args.tree), "rounds": args.rounds, "depth": depth,
                "fuel": args.fuel, "bound": args.bound, "n": args.n}
    if cmd == "generic":
        sched = _load_json(args.schedule)
        if sched is None:
            sched = [r.to_json() for r in genericity.default_schedule()]
        return {"schedule": sched}
    raise SchemaError(f"unknown command {cmd}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treebodies", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the artifact here instead of stdout")
        sp.add_argument("--emit", choices=["json", "dot"], default="json")
        sp.add_argument("--seed", type=int, default=0, help="reserved for randomized sweeps")
        return sp

    sp = common(sub.add_parser("inscribe-category", help="Miller tree with a uniformly perfect subtree"))
    sp.add_argument("--sequence", help="dense-sequence descriptor (JSON text or file)")
    sp.add_argument("--levels", type=int, default=2)
    sp.add_argument("--max-levels", type=int, default=category.DEFAULT_MAX_LEVELS)

    sp = common(sub.add_parser("inscribe-measure", help="uniformly perfect square inside clopen stages"))
    sp.add_argument("--stages", help="stage family descriptor (JSON text or file)")
    sp.add_argument("--levels", type=int, default=2)

    sp = common(sub.add_parser("silver-in-closed", help="Silver tree inside a clopen set"))
    sp.add_argument("--set", help="clopen set JSON {'generators': [...]}")
    sp.add_argument("--levels", type=int, default=2)

    sp = common(sub.add_parser("build-fsigma", help="finitely branching stage of the F-sigma set"))
    sp.add_argument("--measure", help="measure descriptor (default geometric)")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--fuel", type=int, default=10_000)

    sp = common(sub.add_parser("witness", help="avoidance witnesses"))
    sp.add_argument("--kind", required=True, choices=["miller", "laver", "silver-square", "up-miller", "small-set"])
    sp.add_argument("--tree", help="tree-oracle descriptor (JSON text or file)")
    sp.add_argument("--rounds", type=int, default=3)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--fuel", type=int, default=10_000)
    sp.add_argument("--bound", type=int, help="minimum generator bound to certify")
    sp.add_argument("--n", type=int, default=1, help="index of the open set G_n (up-miller)")

    sp = common(sub.add_parser("generic", help="meet a schedule of dense sets"))
    sp.add_argument("--schedule", help="schedule JSON array (default: the full default schedule)")

    sp = sub.add_parser("verify", help="replay an artifact")
    sp.add_argument("artifact")
    return ap


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for name in ("levels", "depth", "fuel", "rounds", "bound", "max_levels"):
            _positive(name, getattr(args, name, None))
        if args.command == "verify":
            problems = verify_artifact(_load_json(args.artifact))
            for p in problems:
                print(f"FAIL {p}", file=sys.stderr)
            print("ok" if not problems else f"{len(problems)} problem(s)")
            return EXIT_OK if not problems else EXIT_VERIFY
        params = _params(args)
        result, ok, tree = RUNNERS[args.command](params)
    except (LevelOverflow, ConvergenceFuelExhausted) as exc:
        print(f"resource bound: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except TreeBodiesError as exc:
        print(f"construction error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    if args.emit == "dot":
        _write(tree_to_dot(tree), args.out)
    else:
        artifact = {"command": args.command, "params": params, "result": result}
        _write(json.dumps(artifact, indent=1) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VERIFY


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
