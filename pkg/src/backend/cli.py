"""
Command-line front door.

Each verb reads the text formats, runs one composition of backend
operations and returns a CommandResult. The report goes to stdout and ends
with the summary line; diagnostics go to stderr through logging.

Exit codes: 0 affirmative, 1 negative or absent, 2 input or budget error.
"""

import argparse
import hashlib
import logging
import os
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from src.backend.algebra.groups import FiniteGroup, WordSystem, builtin, solves_pair
from src.backend.coloured.analysis import classify_systems, cleft_search, equivalence_report
from src.backend.coloured.registry import registry
from src.backend.config_loader import CONFIG, load_config_file
from src.backend.conviviality import elementary_conviviality_graph, quotient_conviviality_graph
from src.backend.errors import GadgetError, MatroidError, WorkbenchError
from src.backend.formats import (
    read_gaingraph,
    read_group,
    read_matroid,
    read_system,
    write_complement,
    write_gaingraph,
    write_matroid,
)
from src.backend.gadgets import (
    build_h_gadget,
    build_lambda_gadget,
    closing_cycle_lengths,
    designated_cycles,
    find_dagger_params,
    minimal_balanced_letters,
)
from src.backend.graphs.gain import gain_frame_matroid
from src.backend.logic import lambda_bound, lint_formula, parse_formula, satisfies
from src.backend.matroids.matroid import Matroid, projective_plane, proper_amalgam, validate_matroid
from src.backend.models.results import AFFIRMATIVE, NEGATIVE, CommandResult, failure
from src.backend.utils.formatting import format_subset

logger = logging.getLogger(__name__)


class _Inputs:
    """Reads input files and keeps a digest of everything the command saw."""

    def __init__(self, argv: Sequence[str]):
        self._hash = hashlib.sha256("\0".join(argv).encode("utf-8"))

    def read(self, path: str) -> str:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
        self._hash.update(text.encode("utf-8"))
        return text

    def text_or_file(self, value: str) -> str:
        """File contents when ``value`` names a file, otherwise the value itself."""
        return self.read(value) if os.path.isfile(value) else value

    def group(self, value: str) -> FiniteGroup:
        if os.path.isfile(value):
            return read_group(self.read(value))
        return builtin(value)

    @property
    def digest(self) -> str:
        return self._hash.hexdigest()


def _write(result: CommandResult, path: str, text: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    result.wrote(path)


def _elements(group: FiniteGroup, value: str) -> List[int]:
    return [group.index_of(x.strip()) for x in value.split(",") if x.strip()]


def _formula(inputs: _Inputs, value: str):
    return parse_formula(inputs.text_or_file(value))


def _delta(f, value: Optional[int]) -> int:
    return f.min_delta if value is None else value


# ==================== VERBS ====================

def cmd_check_sentence(args, inputs: _Inputs) -> CommandResult:
    h = read_matroid(inputs.read(args.matroid), validate=False)
    f = _formula(inputs, args.formula)
    verdict = satisfies(h, f)
    result = CommandResult("check-sentence", "SAT" if verdict else "UNSAT", AFFIRMATIVE if verdict else NEGATIVE)
    result.add(f"formula: {f.render()}")
    result.add(result.verdict)
    return result


def cmd_frame_matroid(args, inputs: _Inputs) -> CommandResult:
    g = read_gaingraph(inputs.read(args.gaingraph))
    m = gain_frame_matroid(g)
    result = CommandResult("frame-matroid", "BUILT")
    result.add(f"frame matroid on {m.size} elements, rank {m.rank()}")
    result.add(f"unbalanced loops: {format_subset(g.unbalanced_loops())}")
    _write(result, args.out, write_matroid(m))
    return result


def _read_matroid_strict(inputs: _Inputs, path: str) -> Matroid:
    m = read_matroid(inputs.read(path))
    if not isinstance(m, Matroid):
        raise MatroidError(f"{path}: expected a matroid file, got a hypergraph")
    return m


def cmd_amalgam(args, inputs: _Inputs) -> CommandResult:
    m1 = _read_matroid_strict(inputs, args.left)
    m2 = _read_matroid_strict(inputs, args.right)
    amalgam = proper_amalgam(m1, m2)
    result = CommandResult("amalgam", "BUILT")
    result.add(f"proper amalgam on {amalgam.size} elements, rank {amalgam.rank()}")
    _write(result, args.out, write_matroid(amalgam))
    return result


def cmd_registry(args, inputs: _Inputs) -> CommandResult:
    m = read_system(inputs.read(args.system))
    f = _formula(inputs, args.formula)
    value = registry(m, f, {}, f.var, _delta(f, args.delta))
    result = CommandResult("registry", "COMPUTED")
    result.add(f"formula: {f.render()}")
    result.add(f"registry: {value.render(m.colours)}")
    result.add(f"nodes: {value.node_count}")
    return result


def cmd_equiv(args, inputs: _Inputs) -> CommandResult:
    m1 = read_system(inputs.read(args.system_a))
    m2 = read_system(inputs.read(args.system_b))
    f = _formula(inputs, args.formula)
    report = equivalence_report(m1, m2, f, _delta(f, args.delta), args.max_ground)
    verdict = report.summary().split(" ", 1)[0]
    result = CommandResult("equiv", verdict, AFFIRMATIVE if report.registry_equal else NEGATIVE)
    result.add(report.summary())
    if report.cleft is not None:
        result.add(f"sum with side {report.cleft.satisfied_side} satisfies the formula")
    return result


def cmd_cleft_search(args, inputs: _Inputs) -> CommandResult:
    m1 = read_system(inputs.read(args.system_a))
    m2 = read_system(inputs.read(args.system_b))
    f = _formula(inputs, args.formula)
    cleft = cleft_search(m1, m2, f, max_ground=args.max_ground, threads=args.threads)
    if cleft is None:
        result = CommandResult("cleft-search", "ABSENT", NEGATIVE)
        result.add(f"no cleft up to |V|={args.max_ground}")
        return result
    result = CommandResult("cleft-search", "FOUND")
    result.add(f"cleft at |V|={cleft.complement.size}, satisfied by side {cleft.satisfied_side}")
    for variable, labels in cleft.tau:
        result.add(f"tau Z{variable} = {format_subset(labels)}")
    if args.out:
        _write(result, args.out, write_complement(cleft.complement))
    else:
        result.lines += write_complement(cleft.complement).rstrip("\n").split("\n")
    return result


def _gadget_report(result: CommandResult, gadget) -> None:
    result.add(f"family {gadget.family}: {len(gadget.graph.vertices)} vertices, {len(gadget.graph.edges)} edges")
    for name, value in gadget.numbers.items():
        result.add(f"{name} = {value}")
    for cycle in designated_cycles(gadget):
        state = "balanced" if cycle.balanced else "UNBALANCED"
        result.add(f"designated cycle {cycle.name}: {state}")


def _gadget_h(args, group: FiniteGroup, star_only: bool):
    gens = _elements(group, args.gens)
    s = group.index_of(args.s) if args.s else None
    M = group.index_of(args.M) if args.M else None
    notes: List[str] = []
    if args.auto_params:
        params = find_dagger_params(group, gens, args.N, star_only=star_only)
        if params is None and not star_only:
            params = find_dagger_params(group, gens, args.N, star_only=True)
            if params is not None:
                notes.append(f"the D/Q layer does not fit in {group.label}; built the star part only")
                star_only = True
        if params is None:
            return None, notes
        s, M = params.s, params.M
    if s is None or M is None:
        raise GadgetError("give --s and --M, or --auto-params")
    gadget = build_h_gadget(group, gens, s, M, N=args.N, star_only=star_only)
    closing = closing_cycle_lengths(gadget)
    notes.append(f"balanced closing cycles: {sum(c.balanced for c in closing)} of {len(closing)}")
    notes.append(f"fewest letters on a balanced closing cycle: {minimal_balanced_letters(gadget)}")
    return gadget, notes


def _gadget_lambda(args, group: FiniteGroup, star_only: bool):
    gamma1 = _elements(group, args.gamma1)
    gamma2 = _elements(group, args.gamma2)
    M = group.index_of(args.M) if args.M else None
    notes: List[str] = []
    if args.auto_params:
        params = find_dagger_params(group, gammas=(gamma1, gamma2), star_only=star_only)
        if params is None and not star_only:
            params = find_dagger_params(group, gammas=(gamma1, gamma2), star_only=True)
            if params is not None:
                notes.append(f"the D/Q layer does not fit in {group.label}; built the star part only")
                star_only = True
        if params is None:
            return None, notes
        M = params.M
    if M is None:
        raise GadgetError("give --M, or --auto-params")
    return build_lambda_gadget(group, gamma1, gamma2, M, star_only=star_only), notes


def cmd_gadget(args, inputs: _Inputs) -> CommandResult:
    group = inputs.group(args.group)
    if args.family == "h":
        if not args.gens or args.N is None:
            raise GadgetError("the h family needs --gens and --N")
        gadget, notes = _gadget_h(args, group, args.star_only)
    else:
        if not args.gamma1 or not args.gamma2:
            raise GadgetError("the lambda family needs --gamma1 and --gamma2")
        gadget, notes = _gadget_lambda(args, group, args.star_only)
    if gadget is None:
        result = CommandResult("gadget", "ABSENT", NEGATIVE)
        result.add(f"no parameters satisfy the side conditions in {group.label}")
        return result
    result = CommandResult("gadget", "BUILT-STAR" if gadget.star_only else "BUILT")
    _gadget_report(result, gadget)
    result.lines += notes
    text = write_gaingraph(gadget.gaining, gadget.manifest_lines())
    if args.out:
        _write(result, args.out, text)
    else:
        result.lines += text.rstrip("\n").split("\n")
    return result


def cmd_conviviality(args, inputs: _Inputs) -> CommandResult:
    H = inputs.group(args.group)
    F = inputs.group(args.subgroup)
    graph = elementary_conviviality_graph(H, F, threads=args.threads)
    if args.quotient:
        graph = quotient_conviviality_graph(graph)
    result = CommandResult("conviviality", "BUILT")
    result.add(f"{'quotient' if args.quotient else 'elementary'} graph: {graph.size} vertices, {graph.edge_count()} edges")
    for label, cell in zip(graph.labels(), graph.cells):
        result.add(f"vertex {label} (classes {','.join(str(i) for i in cell)})")
    if args.dot:
        _write(result, args.dot, graph.to_dot())
    if args.csv:
        graph.to_frame().to_csv(args.csv)
        result.wrote(args.csv)
    return result


def cmd_solve_words(args, inputs: _Inputs) -> CommandResult:
    group = inputs.group(args.group)
    system = WordSystem.from_text(args.eq or [], args.neq or [], args.arity)
    witness = solves_pair(group, system)
    if witness is None:
        result = CommandResult("solve-words", "ABSENT", NEGATIVE)
        result.add(f"{group.label} does not solve the system")
        return result
    result = CommandResult("solve-words", "SOLVED")
    result.add("witness: " + " ".join(f"x{i + 1}={group.names[g]}" for i, g in enumerate(witness)))
    return result


def cmd_pg(args, inputs: _Inputs) -> CommandResult:
    m = projective_plane(args.p)
    result = CommandResult("pg", "BUILT")
    result.add(f"projective plane over GF({args.p}): {m.size} points, {len(m.long_lines())} lines")
    _write(result, args.out, write_matroid(m))
    return result


def cmd_validate(args, inputs: _Inputs) -> CommandResult:
    h = read_matroid(inputs.read(args.matroid), validate=False)
    outcome = validate_matroid(h)
    if isinstance(outcome, Matroid):
        result = CommandResult("validate", "VALID")
        result.add(f"matroid on {outcome.size} elements, rank {outcome.rank()}")
        return result
    result = CommandResult("validate", "INVALID", NEGATIVE)
    result.add(outcome.describe())
    return result


def cmd_lambda(args, inputs: _Inputs) -> CommandResult:
    f = _formula(inputs, args.formula)
    value = lambda_bound(f, args.s, args.t, _delta(f, args.delta))
    result = CommandResult("lambda", "COMPUTED")
    result.add(f"formula: {f.render()}")
    result.add(f"bound: {value}")
    return result


def cmd_classify(args, inputs: _Inputs) -> CommandResult:
    systems = [read_system(inputs.read(path)) for path in args.systems]
    f = _formula(inputs, args.formula)
    classification = classify_systems(systems, f, _delta(f, args.delta), threads=args.threads)
    within = classification.within_bound
    result = CommandResult("classify", "WITHIN-BOUND" if within else "ABOVE-BOUND", AFFIRMATIVE if within else NEGATIVE)
    result.add(f"{len(systems)} systems, {classification.count} registry classes, bound {classification.bound}")
    for i, members in enumerate(classification.classes):
        result.add(f"class {i}: " + " ".join(args.systems[j] for j in members))
    if args.csv:
        classification.to_frame().to_csv(args.csv, index=False)
        result.wrote(args.csv)
    return result


def cmd_lint(args, inputs: _Inputs) -> CommandResult:
    suggestion, messages = lint_formula(inputs.text_or_file(args.formula))
    result = CommandResult("lint", "CLEAN" if not messages else "RENAMED", AFFIRMATIVE if not messages else NEGATIVE)
    result.lines += messages
    result.add(f"suggestion: {suggestion}")
    return result


VERBS: Dict[str, Callable] = {
    "check-sentence": cmd_check_sentence,
    "frame-matroid": cmd_frame_matroid,
    "amalgam": cmd_amalgam,
    "registry": cmd_registry,
    "equiv": cmd_equiv,
    "cleft-search": cmd_cleft_search,
    "gadget": cmd_gadget,
    "conviviality": cmd_conviviality,
    "solve-words": cmd_solve_words,
    "pg": cmd_pg,
    "validate": cmd_validate,
    "lambda": cmd_lambda,
    "classify": cmd_classify,
    "lint": cmd_lint,
}


# ==================== PARSER ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="workbench", description="Definability workbench for gain-graphic matroids")
    parser.add_argument("--config", help="key=value file overriding the environment configuration")
    parser.add_argument("--parallel", type=int, nargs="?", const=os.cpu_count() or 1, default=None, metavar="N",
                        help="worker threads for the parallel searches (default: all cores)")
    parser.add_argument("--ledger", action="store_true", help="record this run in the check ledger")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check-sentence", help="decide a sentence on a matroid or hypergraph")
    p.add_argument("--matroid", required=True)
    p.add_argument("--formula", required=True, help="formula file or formula text")

    p = sub.add_parser("frame-matroid", help="frame matroid of a gain graph")
    p.add_argument("--gaingraph", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("amalgam", help="proper amalgam of two matroids over their shared elements")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("registry", help="registry of a coloured system for a sentence")
    p.add_argument("--system", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--delta", type=int)

    for verb, default_ground in (("equiv", 1), ("cleft-search", 1)):
        p = sub.add_parser(verb, help="compare two coloured systems for a sentence")
        p.add_argument("--system-a", required=True)
        p.add_argument("--system-b", required=True)
        p.add_argument("--formula", required=True)
        p.add_argument("--delta", type=int)
        p.add_argument("--max-ground", type=int, default=default_ground)
        if verb == "cleft-search":
            p.add_argument("--out", help="write the cleft complement here")

    p = sub.add_parser("gadget", help="build an H or Lambda gadget")
    p.add_argument("family", choices=["h", "lambda"])
    p.add_argument("--group", required=True, help="group file or shorthand such as cyclic20")
    p.add_argument("--gens", help="comma separated generator names (h)")
    p.add_argument("--N", type=int, help="row count (h)")
    p.add_argument("--s")
    p.add_argument("--M")
    p.add_argument("--gamma1", help="comma separated element names (lambda)")
    p.add_argument("--gamma2", help="comma separated element names (lambda)")
    p.add_argument("--auto-params", action="store_true")
    p.add_argument("--star-only", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("conviviality", help="F-conviviality graph of a finite group")
    p.add_argument("--group", required=True)
    p.add_argument("--subgroup", required=True, help="the group F")
    p.add_argument("--quotient", action="store_true")
    p.add_argument("--dot")
    p.add_argument("--csv")

    p = sub.add_parser("solve-words", help="search a group for a solution of a word system")
    p.add_argument("--group", required=True)
    p.add_argument("--eq", nargs="*")
    p.add_argument("--neq", nargs="*")
    p.add_argument("--arity", type=int)

    p = sub.add_parser("pg", help="projective plane PG(2, p)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="check the independence axioms")
    p.add_argument("--matroid", required=True)

    p = sub.add_parser("lambda", help="registry-count bound")
    p.add_argument("--formula", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--delta", type=int)

    p = sub.add_parser("classify", help="partition coloured systems by registry")
    p.add_argument("--systems", nargs="+", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--delta", type=int)
    p.add_argument("--csv")

    p = sub.add_parser("lint", help="suggest renames for conjunction clashes")
    p.add_argument("--formula", required=True)

    return parser


def _record(result: CommandResult, digest: str) -> None:
    try:
        from src.database.ledger_manager import get_ledger_manager

        get_ledger_manager(CONFIG["ledger_url"]).record_run(
            result.verb, digest, result.verdict, result.exit_code, result.summary, result.elapsed_seconds
        )
    except Exception as e:
        logger.warning(f"could not record the run in the ledger: {e}")


def execute(argv: Sequence[str]) -> CommandResult:
    """Parse argv and run the verb; configuration overrides last for this call only."""
    args = build_parser().parse_args(list(argv))
    saved = dict(CONFIG)
    started = time.perf_counter()
    inputs = _Inputs(argv)
    try:
        if args.config:
            CONFIG.update(load_config_file(args.config, CONFIG))
        args.threads = args.parallel or CONFIG["threads"]
        try:
            result = VERBS[args.verb](args, inputs)
        except (WorkbenchError, RuntimeError, OSError) as exc:
            logger.error(f"{args.verb}: {exc}")
            result = failure(args.verb, str(exc))
        result.elapsed_seconds = time.perf_counter() - started
        if args.ledger or CONFIG["ledger_enabled"]:
            _record(result, inputs.digest)
        return result
    except (RuntimeError, OSError) as exc:
        logger.error(f"configuration: {exc}")
        return failure(args.verb, str(exc))
    finally:
        CONFIG.clear()
        CONFIG.update(saved)


def run(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    result = execute(sys.argv[1:] if argv is None else argv)
    (stdout or sys.stdout).write(result.render())
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
    return result.exit_code
