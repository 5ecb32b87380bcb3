"""
Readers and writers for the workbench text formats: groups, gain graphs
(with an optional gadget manifest), matroids and hypergraphs, coloured
systems and complements.

Blank lines and ``#`` comments are ignored; every reader failure is a
FormatError carrying the line number.
"""

import logging
import re
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.backend.algebra.groups import FiniteGroup, builtin, from_table
from src.backend.coloured.systems import ColouredComplement, ColouredSystem
from src.backend.errors import FormatError, InputError
from src.backend.graphs.gain import Gaining
from src.backend.graphs.multigraph import Multigraph
from src.backend.matroids.matroid import Hypergraph, Matroid
from src.backend.utils.formatting import canonical_masks, format_tokens, parse_tokens

logger = logging.getLogger(__name__)

_SHORTHAND = re.compile(r"^(cyclic|dihedral|symmetric)(\d+)$")


class _Lines:
    """Cursor over (line number, tokens) pairs."""

    def __init__(self, text: str):
        self._items: List[Tuple[int, List[str]]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                self._items.append((number, stripped.split()))
        self._pos = 0

    def peek(self) -> Optional[Tuple[int, List[str]]]:
        return self._items[self._pos] if self._pos < len(self._items) else None

    def next(self, what: str) -> Tuple[int, List[str]]:
        item = self.peek()
        if item is None:
            last = self._items[-1][0] if self._items else None
            raise FormatError(f"unexpected end of file, expected {what}", last)
        self._pos += 1
        return item

    def header(self, *names: str) -> str:
        number, tokens = self.next(" or ".join(names))
        if tokens != [tokens[0]] or tokens[0] not in names:
            raise FormatError(f"expected header {' or '.join(names)}, got {' '.join(tokens)!r}", number)
        return tokens[0]

    def __iter__(self) -> Iterator[Tuple[int, List[str]]]:
        while self.peek() is not None:
            yield self.next("a line")


# ==================== GROUPS ====================

def _read_group(lines: _Lines) -> FiniteGroup:
    number, tokens = lines.next("a group line")
    if tokens[0] != "group" or len(tokens) < 2:
        raise FormatError(f"expected a group line, got {' '.join(tokens)!r}", number)
    kind, rest = tokens[1], tokens[2:]
    try:
        if kind in ("cyclic", "dihedral", "symmetric"):
            if len(rest) != 1 or not rest[0].isdigit():
                raise FormatError(f"group {kind} takes one integer", number)
            return builtin(f"{kind}{rest[0]}")
        if kind == "product":
            if len(rest) != 2:
                raise FormatError("group product takes two group names such as cyclic2", number)
            return builtin(f"{rest[0]}x{rest[1]}")
        if kind == "table":
            return _read_table(lines, number)
    except InputError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc), number) from exc
    raise FormatError(f"unknown group kind {kind!r}", number)


def _read_table(lines: _Lines, header_line: int) -> FiniteGroup:
    number, tokens = lines.next("an elements line")
    if tokens[0] != "elements" or len(tokens) < 2:
        raise FormatError("group table needs an elements line", number)
    names = tokens[1:]
    rows: Dict[str, List[str]] = {}
    for _ in names:
        number, tokens = lines.next("a row line")
        if tokens[0] != "row" or len(tokens) < 2 or not tokens[1].endswith(":"):
            raise FormatError("expected 'row <name>: <name>...'", number)
        name = tokens[1][:-1]
        if name not in names:
            raise FormatError(f"row for undeclared element {name!r}", number)
        if name in rows:
            raise FormatError(f"duplicate row for {name!r}", number)
        if len(tokens) - 2 != len(names):
            raise FormatError(f"row {name} has {len(tokens) - 2} entries, expected {len(names)}", number)
        rows[name] = tokens[2:]
    try:
        return from_table(names, [rows[n] for n in names])
    except InputError as exc:
        raise FormatError(str(exc), header_line) from exc


def read_group(text: str) -> FiniteGroup:
    lines = _Lines(text)
    group = _read_group(lines)
    extra = lines.peek()
    if extra is not None:
        raise FormatError(f"unexpected content after the group: {' '.join(extra[1])!r}", extra[0])
    return group


def group_lines(group: FiniteGroup) -> List[str]:
    """Shorthand when the label names a built-in group equal to this one, else the full table."""
    parts = group.label.split("x")
    if 1 <= len(parts) <= 2 and all(_SHORTHAND.match(p) for p in parts):
        try:
            same = builtin(group.label) == group
        except InputError:
            same = False
        if same:
            if len(parts) == 1:
                kind, n = _SHORTHAND.match(parts[0]).groups()
                return [f"group {kind} {n}"]
            return [f"group product {parts[0]} {parts[1]}"]
    names = group.names
    lines = ["group table", "elements " + " ".join(names)]
    for i, name in enumerate(names):
        lines.append(f"row {name}: " + " ".join(names[int(j)] for j in group.table[i]))
    return lines


def write_group(group: FiniteGroup) -> str:
    return "\n".join(group_lines(group)) + "\n"


# ==================== GAIN GRAPHS ====================

def read_gaingraph(text: str, max_edges: Optional[int] = None) -> Gaining:
    """Gaining from a gaingraph file; a trailing manifest section is ignored."""
    lines = _Lines(text)
    lines.header("gaingraph")
    group = _read_group(lines)
    vertices: List[str] = []
    edges: List[Tuple[str, str, str]] = []
    gains: Dict[str, int] = {}
    for number, tokens in lines:
        kind = tokens[0]
        if kind == "manifest":
            break
        try:
            if kind == "vertex" and len(tokens) == 2:
                vertices.append(tokens[1])
            elif kind == "edge" and len(tokens) == 5:
                label, u, v, element = tokens[1:]
                if label in gains:
                    raise FormatError(f"duplicate edge label {label!r}", number)
                edges.append((label, u, v))
                gains[label] = group.index_of(element)
            elif kind == "loop" and len(tokens) == 4:
                label, u, element = tokens[1:]
                if label in gains:
                    raise FormatError(f"duplicate edge label {label!r}", number)
                edges.append((label, u, u))
                gains[label] = group.index_of(element)
            else:
                raise FormatError(f"unrecognised gain-graph line {' '.join(tokens)!r}", number)
        except FormatError:
            raise
        except InputError as exc:
            raise FormatError(str(exc), number) from exc
    try:
        graph = Multigraph(vertices, edges, max_edges=max_edges)
        return Gaining(graph, group, gains)
    except InputError as exc:
        raise FormatError(str(exc)) from exc


def read_manifest(text: str) -> Dict[str, List[str]]:
    """Key -> tokens for every manifest line (``collection A``, ``base``, ``parameter s`` ...)."""
    out: Dict[str, List[str]] = {}
    inside = False
    for number, tokens in _Lines(text):
        if tokens == ["manifest"]:
            inside = True
            continue
        if not inside:
            continue
        line = " ".join(tokens)
        if ":" in line:
            key, value = line.split(":", 1)
            out[key.strip()] = value.split()
        elif tokens[0] == "family" and len(tokens) == 2:
            out["family"] = tokens[1:]
        else:
            raise FormatError(f"unrecognised manifest line {line!r}", number)
    return out


def write_gaingraph(g: Gaining, manifest: Sequence[str] = ()) -> str:
    names = g.group.names
    lines = ["gaingraph"] + group_lines(g.group)
    lines += [f"vertex {v}" for v in g.graph.vertices]
    for e in g.graph.edges:
        gain = names[g.gain(e.label)]
        if e.is_loop:
            lines.append(f"loop {e.label} {e.u} {gain}")
        else:
            lines.append(f"edge {e.label} {e.u} {e.v} {gain}")
    if manifest:
        lines.append("manifest")
        lines += list(manifest)
    return "\n".join(lines) + "\n"


# ==================== MATROIDS AND HYPERGRAPHS ====================

def _subset(ground_pos: Dict[str, int], tokens: Sequence[str], number: int) -> int:
    mask = 0
    for label in parse_tokens(tokens):
        if label not in ground_pos:
            raise FormatError(f"unknown element {label!r}", number)
        bit = 1 << ground_pos[label]
        if mask & bit:
            raise FormatError(f"element {label!r} repeated", number)
        mask |= bit
    return mask


def read_matroid(text: str, validate: bool = True):
    """
    Matroid (header ``matroid``, axioms checked) or Hypergraph (header ``hypergraph``).

    With ``validate=False`` a matroid file comes back as a plain Hypergraph so
    the caller can report the violated axiom itself.
    """
    lines = _Lines(text)
    kind = lines.header("matroid", "hypergraph")
    number, tokens = lines.next("a ground line")
    if tokens[0] != "ground":
        raise FormatError("expected 'ground <label>...'", number)
    ground = parse_tokens(tokens[1:])
    pos = {x: i for i, x in enumerate(ground)}
    if len(pos) != len(ground):
        raise FormatError("ground labels must be unique", number)
    indep: List[int] = []
    circuits: List[int] = []
    for number, tokens in lines:
        if tokens[0] == "indep":
            indep.append(_subset(pos, tokens[1:], number))
        elif tokens[0] == "circuit":
            if kind == "hypergraph":
                raise FormatError("hypergraph files list hyperedges with indep lines", number)
            circuits.append(_subset(pos, tokens[1:], number))
        else:
            raise FormatError(f"unrecognised matroid line {' '.join(tokens)!r}", number)
        if indep and circuits:
            raise FormatError("a file lists either indep lines or circuit lines, not both", number)
    try:
        if circuits:
            m = Matroid.from_circuits(ground, circuits, validate=validate)
            return m if validate else Hypergraph(m.ground, m.table)
        table = np.zeros(1 << len(ground), dtype=bool)
        table[indep] = True
        if kind == "hypergraph" or not validate:
            return Hypergraph(ground, table)
        return Matroid(ground, table)
    except FormatError:
        raise
    except InputError as exc:
        raise FormatError(str(exc)) from exc


def write_matroid(h: Hypergraph) -> str:
    header = "matroid" if isinstance(h, Matroid) else "hypergraph"
    lines = [header, "ground " + format_tokens(h.ground)]
    for mask in canonical_masks(h.size):
        if h.table[mask]:
            lines.append("indep " + format_tokens(h.labels(mask)))
    return "\n".join(lines) + "\n"


# ==================== COLOURED SYSTEMS ====================

def _ground_and_colours(lines: _Lines) -> Tuple[List[str], List[str]]:
    number, tokens = lines.next("a ground line")
    if tokens[0] != "ground":
        raise FormatError("expected 'ground <label>...'", number)
    ground = parse_tokens(tokens[1:])
    number, tokens = lines.next("a colours line")
    if tokens[0] != "colours" or len(tokens) < 2:
        raise FormatError("expected 'colours <name>...'", number)
    return ground, tokens[1:]


def read_system(text: str, max_colours: Optional[int] = None) -> ColouredSystem:
    lines = _Lines(text)
    lines.header("system")
    ground, colours = _ground_and_colours(lines)
    pos = {x: i for i, x in enumerate(ground)}
    cpos = {c: i for i, c in enumerate(colours)}
    table = np.full(1 << len(ground), -1, dtype=np.int64)
    default = None
    for number, tokens in lines:
        if tokens[0] == "default" and len(tokens) == 2:
            if tokens[1] not in cpos:
                raise FormatError(f"unknown colour {tokens[1]!r}", number)
            default = cpos[tokens[1]]
        elif tokens[0] == "colour" and len(tokens) >= 3:
            if tokens[-1] not in cpos:
                raise FormatError(f"unknown colour {tokens[-1]!r}", number)
            mask = _subset(pos, tokens[1:-1], number)
            if table[mask] >= 0:
                raise FormatError("subset coloured twice", number)
            table[mask] = cpos[tokens[-1]]
        else:
            raise FormatError(f"unrecognised system line {' '.join(tokens)!r}", number)
    missing = table < 0
    if missing.any():
        if default is None:
            raise FormatError(f"{int(missing.sum())} subsets have no colour and there is no default")
        table[missing] = default
    try:
        return ColouredSystem(ground, colours, table, max_colours=max_colours)
    except InputError as exc:
        raise FormatError(str(exc)) from exc


def write_system(m: ColouredSystem) -> str:
    lines = ["system", "ground " + format_tokens(m.ground), "colours " + " ".join(m.colours)]
    for mask in canonical_masks(m.size):
        lines.append(f"colour {format_tokens(m.labels(mask))} {m.colours[int(m.table[mask])]}")
    return "\n".join(lines) + "\n"


def read_complement(text: str, max_colours: Optional[int] = None) -> ColouredComplement:
    lines = _Lines(text)
    lines.header("complement")
    ground, colours = _ground_and_colours(lines)
    pos = {x: i for i, x in enumerate(ground)}
    cpos = {c: i for i, c in enumerate(colours)}
    accepted = []
    for number, tokens in lines:
        if tokens[0] != "accept" or len(tokens) < 3:
            raise FormatError(f"unrecognised complement line {' '.join(tokens)!r}", number)
        if tokens[-1] not in cpos:
            raise FormatError(f"unknown colour {tokens[-1]!r}", number)
        accepted.append((_subset(pos, tokens[1:-1], number), cpos[tokens[-1]]))
    try:
        return ColouredComplement.from_accepted(ground, colours, accepted, max_colours=max_colours)
    except InputError as exc:
        raise FormatError(str(exc)) from exc


def write_complement(pi: ColouredComplement) -> str:
    lines = ["complement", "ground " + format_tokens(pi.ground), "colours " + " ".join(pi.colours)]
    for mask in canonical_masks(pi.size):
        for i, colour in enumerate(pi.colours):
            if pi.table[mask, i]:
                lines.append(f"accept {format_tokens(pi.labels(mask))} {colour}")
    return "\n".join(lines) + "\n"
