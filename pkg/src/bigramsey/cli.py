"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 validation failure.  Every run leaves a
manifest (argv, seed, sha256 of inputs and outputs, wall time) next to
``--out`` as ``<out>.manifest.json``, or on stderr when there is no ``--out``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import codings, colorings, degrees, diagrams, semigroups
from .structures import (RelationalStructure, chain, empty_structure, enumerate_2types,
                         graph, roelcke_witness)

log = logging.getLogger("bigramsey")


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


@dataclass
class RunManifest:
    subcommand: str
    argv: list[str]
    seed: int
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    wall_time_seconds: float = 0.0


def _sha(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Run:
    def __init__(self, args, argv):
        self.args = args
        self.manifest = RunManifest(args.command, list(argv), args.seed)

    def read_json(self, path: str):
        self.manifest.inputs[path] = _sha(path)
        return json.loads(Path(path).read_text())

    def read_structure(self, path: str) -> RelationalStructure:
        return RelationalStructure.from_json(self.read_json(path))

    def emit(self, text: str, path: str | None = None):
        """Write ``text`` to ``path`` (default ``--out``) or stdout."""
        path = path or self.args.out
        if path:
            Path(path).write_text(text)
            self.manifest.outputs[path] = _sha(path)
        else:
            sys.stdout.write(text)

    def emit_json(self, obj, path: str | None = None):
        self.emit(json.dumps(obj, indent=1, sort_keys=True) + "\n", path)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--budget-seconds", type=float, default=None)


def _maps(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x != "")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="bigramsey", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("coding", help="grow a tree coding")
    p.add_argument("action", choices=["grow"])
    p.add_argument("--kind", required=True, choices=codings.KINDS)
    p.add_argument("--rounds", type=int, default=0)
    p.add_argument("--parts", type=int, default=2)
    p.add_argument("--height", type=int, default=2)
    p.add_argument("--branch", type=int, default=2)
    p.add_argument("--dot", help="also write the tree in DOT format")
    _common(p)

    p = sub.add_parser("degrees", help="big Ramsey degree table")
    p.add_argument("--family", required=True, choices=degrees.FAMILIES)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--parts", type=int, default=2)
    p.add_argument("--height", type=int, default=2)
    p.add_argument("--window", type=int, default=degrees.DEFAULT_WINDOW)
    p.add_argument("--no-oracle", action="store_true")
    _common(p)

    p = sub.add_parser("color", help="coloring calculus")
    p.add_argument("action", choices=["expansion", "persist", "diagram", "induce", "search"])
    p.add_argument("--kind", default="devlin", choices=codings.BINARY_KINDS)
    p.add_argument("--rounds", type=int, default=40)
    p.add_argument("--k", type=int, default=2, help="chain length for 'expansion'")
    p.add_argument("--ambient-out", help="'expansion': where to write the ambient structure")
    p.add_argument("--coloring", nargs="+", default=[], help="coloring JSON file(s)")
    p.add_argument("--structures", nargs="+", default=[], help="structure JSON files")
    p.add_argument("--inclusion", type=_maps, help="'induce': embedding B -> A_n, e.g. 0,1")
    _common(p)

    p = sub.add_parser("diagram", help="r-diagrams")
    p.add_argument("action", choices=["validate", "iso", "expand", "jep", "ap", "random", "devlin"])
    p.add_argument("files", nargs="*")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--fp", type=_maps)
    p.add_argument("--fq", type=_maps)
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--levels", type=int, default=3, help="'random'/'devlin': number of levels")
    p.add_argument("--rounds", type=int, default=40, help="'devlin': coding depth")
    _common(p)

    p = sub.add_parser("semigroup", help="finite semigroup facts")
    p.add_argument("action", choices=["verify"])
    p.add_argument("--size", type=int)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--table", help="JSON n x n table to verify")
    _common(p)

    p = sub.add_parser("types", help="2-types and Roelcke witnesses")
    p.add_argument("action", choices=["count", "roelcke"])
    p.add_argument("--family", choices=["chain", "edgeless", "path"])
    p.add_argument("--sizes", type=int, nargs="+", default=[3, 4])
    p.add_argument("--m-struct", help="structure JSON (default: one point)")
    p.add_argument("--ambient", nargs="+", default=[], help="structure JSON files")
    p.add_argument("--n-max", type=int, default=4)
    _common(p)

    p = sub.add_parser("verify-all", help="run every acceptance check")
    p.add_argument("--skip-slow", action="store_true", help="skip the k = 4 degree check")
    _common(p)
    return top


# --- subcommands ---------------------------------------------------------------

def cmd_coding(run: Run):
    a = run.args
    if a.kind == "ultrametric":
        c = codings.build_ultrametric(a.height, a.branch)
    elif a.kind == "sinf":
        c = codings.build_sinf(a.rounds)
    else:
        parts = a.parts if a.kind == "qn" else 1
        c = codings.grow(codings.new_coding(a.kind, a.seed, parts), a.rounds)
        problems = codings.check_invariants(c)
        if problems:
            raise ValidationFailure("; ".join(problems))
    run.emit_json(codings.to_json(c))
    if a.dot:
        run.emit(codings.to_dot(c), a.dot)


def cmd_degrees(run: Run):
    a = run.args
    table = degrees.degree_table(a.family, a.kmax, budget_seconds=a.budget_seconds, seed=a.seed,
                                 parts=a.parts, height=a.height, window=a.window,
                                 threads=a.threads, with_oracle=not a.no_oracle)
    run.emit(table.to_csv())
    bad = [r for r in table.rows if r.stabilized and r.oracle is not None and r.degree != r.oracle]
    if bad:
        raise ValidationFailure(f"{len(bad)} rows disagree with the oracle")


def _need(items, k, what):
    if len(items) != k:
        raise UsageError(f"expected {k} {what}, got {len(items)}")
    return items


def _coloring(run, path, source=None, target=None):
    c = colorings.Coloring.from_json(run.read_json(path))
    return colorings.Coloring(c.domain, c.colors, source, target)


def cmd_color(run: Run):
    a = run.args
    if a.action == "expansion":
        c = codings.grow(codings.new_coding(a.kind, a.seed), a.rounds)
        K = codings.emit_structure(c)
        base = codings.base_language(c)
        if a.kind != "devlin":
            raise UsageError("'expansion' builds chain colorings of the devlin coding")
        col, _ = colorings.expansion_coloring(K, chain(a.k), base)
        run.emit_json(col.to_json())
        if a.ambient_out:
            run.emit_json(K.reduct(base).to_json(), a.ambient_out)
        return
    S = [run.read_structure(p) for p in a.structures]
    if a.action == "persist":
        Am, An, AN = _need(S, 3, "structures (A_m A_n A_N)")
        g = _coloring(run, _need(a.coloring, 1, "coloring")[0])
        ok, witness = colorings.persistence_check(
            g, colorings.all_copies(An, AN), colorings.all_copies(Am, An))
        run.emit_json({"persistence": ok, "failing_copy": witness})
    elif a.action == "diagram":
        Am, An = _need(S, 2, "structures (A_m A_n)")
        gm, gn = (_coloring(run, p) for p in _need(a.coloring, 2, "colorings (gamma_m gamma_n)"))
        try:
            cell = colorings.coloring_diagram(gm, gn, colorings.all_copies(Am, An))
        except colorings.ColoringError as e:
            raise ValidationFailure(str(e))
        run.emit_json({"rows": list(cell.rows), "connectors": [list(f) for f in cell.connectors],
                       "cells": {f"{j}|f{fi}": v for (j, fi), v in sorted(
                           cell.table.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))}})
    elif a.action == "induce":
        B, An, AN = _need(S, 3, "structures (B A_n A_N)")
        g = _coloring(run, _need(a.coloring, 1, "coloring")[0], An, AN)
        if a.inclusion is None:
            raise UsageError("--inclusion is required")
        res = colorings.induced_coloring(g, B, a.inclusion, AN)
        out = res.coloring.to_json()
        out["excluded"] = [list(f) for f in res.excluded]
        run.emit_json(out)
    elif a.action == "search":
        Am, An, AN = _need(S, 3, "structures (A_m A_n A_N)")
        g, d = (_coloring(run, p) for p in _need(a.coloring, 2, "colorings (gamma delta)"))
        s = colorings.refinement_search(g, d, colorings.all_copies(An, AN),
                                        colorings.all_copies(Am, An))
        run.emit_json({"copy": None if s is None else list(s),
                       "status": "found" if s is not None else "none at this depth"})


def devlin_diagram(levels: int, rounds: int, seed: int = 0) -> diagrams.Diagram:
    c = codings.grow(codings.new_coding("devlin", seed), rounds)
    K = codings.emit_structure(c)
    ex = [chain(k) for k in range(1, levels + 1)]
    cols = [colorings.expansion_coloring(K, A, ("<",))[0] for A in ex]
    return diagrams.diagram_from_colorings(cols, ex)


def cmd_diagram(run: Run):
    a = run.args
    if a.action == "random":
        D = diagrams.random_diagram(random.Random(a.seed), a.levels)
        run.emit_json(D.to_json())
        return
    if a.action == "devlin":
        run.emit_json(devlin_diagram(a.levels, a.rounds, a.seed).to_json())
        return
    Ds = [diagrams.Diagram.from_json(run.read_json(p)) for p in a.files]
    if a.action == "validate":
        D = _need(Ds, 1, "diagram file")[0]
        rep = diagrams.validate(D)
        run.emit_json({"valid": rep.ok, "violations": rep.violations})
        if not rep.ok:
            raise ValidationFailure(f"{len(rep.violations)} violations")
    elif a.action == "iso":
        D1, D2 = _need(Ds, 2, "diagram files")
        sigma = diagrams.isomorphic(D1, D2)
        run.emit_json({"isomorphic": sigma is not None,
                       "sigma": None if sigma is None else [{str(k): v for k, v in s.items()}
                                                            for s in sigma]})
        if sigma is None:
            raise ValidationFailure("not isomorphic")
    elif a.action == "expand":
        D = _need(Ds, 1, "diagram file")[0]
        if D.structures is None:
            raise UsageError("the diagram file carries no exhaustion structures")
        E = diagrams.expansion_from_diagram(D)
        run.emit_json([[s.to_json() for s in level] for level in E])
    elif a.action == "jep":
        D = _need(Ds, 1, "diagram file")[0]
        w = diagrams.jep_check(D, a.m, a.p, a.q, a.n_max)
        run.emit_json({"witness": None if w is None else [w[0], w[1], list(w[2])],
                       "status": "found" if w else f"none up to level {a.n_max}"})
    elif a.action == "ap":
        D = _need(Ds, 1, "diagram file")[0]
        if a.fp is None or a.fq is None:
            raise UsageError("--fp and --fq are required")
        try:
            w = diagrams.ap_check(D, a.m, a.n, a.p, a.q, a.fp, a.fq, a.n_max)
        except diagrams.DiagramError as e:
            raise UsageError(str(e))
        run.emit_json({"witness": None if w is None else [w[0], w[1], list(w[2]), list(w[3])],
                       "status": "found" if w else f"none up to level {a.n_max}"})


def cmd_semigroup(run: Run):
    a = run.args
    if a.table:
        raw = run.read_json(a.table)
        ok, witness = semigroups.check_associativity(raw)
        if not ok:
            run.emit_json({"associative": False, "witness": list(witness)})
            raise ValidationFailure(f"not associative at {witness}")
        tables = [semigroups.SemigroupTable(tuple(map(tuple, raw)))]
    elif a.size is None:
        raise UsageError("give --size or --table")
    elif a.exhaustive:
        tables = [semigroups.SemigroupTable(t) for n in range(1, a.size + 1)
                  for t in semigroups.table_catalog(n)]
    elif a.samples:
        tables = semigroups.random_tables(a.size, a.samples, a.seed)
    else:
        raise UsageError("give --exhaustive or --samples")
    failures = []
    for T in tables:
        rep = semigroups.verify_semifacts(T)
        if not rep.ok:
            failures.append({"table": T.to_json(), "report": rep.lines()})
    run.emit_json({"tables": len(tables), "failures": failures})
    if failures:
        raise ValidationFailure(f"{len(failures)} tables violate a clause")


def _family(name: str, n: int) -> RelationalStructure:
    if name == "chain":
        return chain(n)
    if name == "edgeless":
        return empty_structure(n)
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def cmd_types(run: Run):
    a = run.args
    if a.family:
        ambient = [_family(a.family, n) for n in a.sizes]
        point = _family(a.family, 1)
    else:
        ambient = [run.read_structure(p) for p in a.ambient]
        point = None
    m = run.read_structure(a.m_struct) if a.m_struct else point
    if m is None:
        raise UsageError("give --m-struct or --family")
    if a.action == "count":
        counts = [len(enumerate_2types(m, A)) for A in ambient]
        run.emit_json({"sizes": [A.size for A in ambient], "counts": counts})
    else:
        if a.family:
            ambient = [_family(a.family, n) for n in range(0, a.n_max + 1)]
        w = roelcke_witness(m, ambient, a.n_max)
        run.emit_json({"witness": w, "status": "found" if w is not None
                       else f"unknown at depth {a.n_max}"})


def cmd_verify_all(run: Run):
    from .acceptance import run_all

    results = run_all(skip_slow=run.args.skip_slow)
    lines = [r.line() for r in results]
    run.emit("\n".join(lines) + "\n")
    if not all(r.passed for r in results):
        raise ValidationFailure("some acceptance checks failed")


COMMANDS = {"coding": cmd_coding, "degrees": cmd_degrees, "color": cmd_color,
            "diagram": cmd_diagram, "semigroup": cmd_semigroup, "types": cmd_types,
            "verify-all": cmd_verify_all}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    level = os.environ.get("BRW_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_help())
    except UsageError as e:
        sys.stderr.write(str(e))
        return 1
    run = Run(args, argv)
    start = time.monotonic()
    code = 0
    try:
        COMMANDS[args.command](run)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return 1
    except (FileNotFoundError, json.JSONDecodeError) as e:
        sys.stderr.write(f"usage error: {e}\n")
        return 1
    except (ValidationFailure, ValueError, degrees.InvariantViolation) as e:
        # domain errors (bad structures, diagrams, tables) are ValueErrors
        sys.stderr.write(f"validation failure: {e}\n")
        code = 2
    run.manifest.wall_time_seconds = round(time.monotonic() - start, 3)
    text = json.dumps(asdict(run.manifest), indent=1, sort_keys=True) + "\n"
    if args.out:
        Path(args.out + ".manifest.json").write_text(text)
    else:
        sys.stderr.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
