"""Boundary connection patterns of cylinder slabs.

A slab of a width-``w`` cylinder has ``w`` undirected horizontal edges
crossing each of its two boundary cuts.  Injecting rays inward through every
boundary edge and chasing them until they leave the slab pairs up the 2w
boundary slots L_0..L_{w-1}, R_0..R_{w-1}; interior orbits that never touch
the boundary are counted separately as closed loops.  Patterns of adjacent
slabs compose by identifying the shared cut, which is what makes exhaustive
scans over all mirror configurations of a slab tractable: the crossing count
of a configuration depends only on the composition of its per-column
patterns.

Slots are named by (side, row) with side "L" or "R".  A pair with one L and
one R slot is a crossing strand.  Since a ray can never exit backwards
through the very edge it entered (a U-turn would be required), the matching
has no fixed points, so the number of crossing pairs always has the parity
of ``w``.

Patterns are defined for the mirror model on cylinders of any width; the
Manhattan variant is restricted to even width, where each crossing edge is
traversable in only one direction and the same chase pairs entry slots to
exit slots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .dynamics import scatter_direction
from .environment import MANHATTAN, MIRROR, EnvironmentSpec, VertexState, vertex_state
from .geometry import (
    ConfigurationError,
    DirectedEdge,
    Direction,
    Geometry,
    Point,
    Slab,
    manhattan_horizontal_dir,
)

Slot = tuple[str, int]

SCAN_STATES = (VertexState.EMPTY, VertexState.MIRROR_NE, VertexState.MIRROR_NW)
SCAN_SIZE_GUARD = 10_000_000


def _slot_key(s: Slot) -> tuple[int, int]:
    return (0 if s[0] == "L" else 1, s[1])


def _canonical_pairs(matching: dict[Slot, Slot]) -> tuple[tuple[Slot, Slot], ...]:
    pairs = set()
    for a, b in matching.items():
        pair = tuple(sorted((a, b), key=_slot_key))
        pairs.add(pair)
    return tuple(sorted(pairs, key=lambda p: _slot_key(p[0])))


@dataclass(frozen=True)
class ConnectionPattern:
    """Perfect matching on the 2w boundary slots of a slab, plus the count of
    trajectories confined entirely to its interior."""

    width: int
    pairs: tuple[tuple[Slot, Slot], ...]
    closed_loops: int = 0

    def matching(self) -> dict[Slot, Slot]:
        m: dict[Slot, Slot] = {}
        for a, b in self.pairs:
            m[a] = b
            m[b] = a
        return m

    @property
    def crossing_count(self) -> int:
        """Number of left-right strands."""
        return sum(1 for a, b in self.pairs if a[0] != b[0])

    def canonical(self) -> str:
        """Whitespace-free form used in golden files."""
        body = ",".join(f"({a[0]}{a[1]},{b[0]}{b[1]})" for a, b in self.pairs)
        return f"w={self.width};pairs={body};loops={self.closed_loops}"

    def __str__(self) -> str:
        body = ",".join(f"({a[0]}{a[1]},{b[0]}{b[1]})" for a, b in self.pairs)
        return f"w={self.width}; pairs={body}; loops={self.closed_loops}"

    @staticmethod
    def from_matching(width: int, matching: dict[Slot, Slot], closed_loops: int = 0) -> "ConnectionPattern":
        return ConnectionPattern(width, _canonical_pairs(matching), closed_loops)


def identity_pattern(width: int) -> ConnectionPattern:
    return ConnectionPattern.from_matching(width, {("L", y): ("R", y) for y in range(width)})


StateFn = Callable[[Point], VertexState]


def _entry_slots(slab: Slab, model: str) -> list[tuple[Slot, DirectedEdge]]:
    g = slab.geometry
    entries = []
    for y in range(g.width):
        east = DirectedEdge(Point(slab.x_min - 1, y), Direction.E)
        west = DirectedEdge(Point(slab.x_max + 1, y), Direction.W)
        if model == MIRROR:
            entries.append((("L", y), east))
            entries.append((("R", y), west))
        else:
            # Manhattan: each crossing edge is one-way; rows pointing east
            # enter on the left, rows pointing west enter on the right.
            if manhattan_horizontal_dir(y) is Direction.E:
                entries.append((("L", y), east))
            else:
                entries.append((("R", y), west))
    return entries


def _chase(
    g: Geometry, slab: Slab, state_fn: StateFn, entry: DirectedEdge
) -> tuple[Slot, list[DirectedEdge]]:
    """Follow a ray injected through a boundary edge until it leaves the slab.

    Returns the exit slot and every directed edge traversed (entry included).
    Injected rays always exit: the step map is injective and nothing inside
    the slab can map back onto the entry edge, whose tail lies outside.
    """
    e = entry
    traversed = [e]
    while True:
        head = g.reduce(Point(e.tail.x + e.direction.dx, e.tail.y + e.direction.dy))
        if head.x < slab.x_min:
            return ("L", e.tail.y), traversed
        if head.x > slab.x_max:
            return ("R", e.tail.y), traversed
        e = DirectedEdge(head, scatter_direction(state_fn(head), e.direction, head))
        traversed.append(e)


def pattern_from_states(
    g: Geometry, slab: Slab, state_fn: StateFn, model: str = MIRROR
) -> ConnectionPattern:
    """Connection pattern of a slab under an explicit scatterer assignment."""
    if g.kind != "cylinder":
        raise ConfigurationError("connection patterns are defined on cylinders only")
    if model == MANHATTAN and g.width % 2:
        raise ConfigurationError("manhattan requires even width")
    w = g.width
    matching: dict[Slot, Slot] = {}
    used: set[DirectedEdge] = set()
    for slot, entry in _entry_slots(slab, model):
        exit_slot, traversed = _chase(g, slab, state_fn, entry)
        used.update(traversed)
        if slot in matching:
            # Mirror-model reversibility: the chase from the partner must
            # come straight back.
            assert matching[slot] == exit_slot, (slot, matching[slot], exit_slot)
        else:
            assert exit_slot not in matching, (slot, exit_slot)
            matching[slot] = exit_slot
            matching[exit_slot] = slot

    directed_loops = 0
    for x in range(slab.x_min, slab.x_max + 1):
        for y in range(w):
            v = Point(x, y)
            for d in Direction:
                if model == MANHATTAN and d not in (
                    manhattan_horizontal_dir(y),
                    Direction.N if x % 2 == 0 else Direction.S,
                ):
                    continue
                e0 = DirectedEdge(v, d)
                head = g.reduce(Point(x + d.dx, y + d.dy))
                if not slab.contains(head) or e0 in used:
                    continue
                # walk the interior cycle through e0
                e = e0
                while True:
                    used.add(e)
                    h = g.reduce(Point(e.tail.x + e.direction.dx, e.tail.y + e.direction.dy))
                    assert slab.contains(h), "interior orbit reached the boundary"
                    e = DirectedEdge(h, scatter_direction(state_fn(h), e.direction, h))
                    if e == e0:
                        break
                directed_loops += 1
    if model == MIRROR:
        # each undirected interior loop is traversed by two directed orbits
        assert directed_loops % 2 == 0
        closed_loops = directed_loops // 2
    else:
        closed_loops = directed_loops
    return ConnectionPattern.from_matching(w, matching, closed_loops)


def slab_pattern(spec: EnvironmentSpec, slab: Slab) -> ConnectionPattern:
    """Connection pattern of a slab in a seeded environment."""
    if slab.geometry != spec.geometry:
        raise ConfigurationError("slab geometry does not match the environment")
    return pattern_from_states(spec.geometry, slab, lambda v: vertex_state(spec, v), spec.model)


def _compose_matchings(
    ma: dict[Slot, Slot], mb: dict[Slot, Slot], width: int
) -> tuple[dict[Slot, Slot], int]:
    """Glue a's right slots onto b's left slots; returns the boundary matching
    on a.L and b.R plus the number of cycles formed at the junction."""
    result: dict[Slot, Slot] = {}
    seen_junctions: set[int] = set()

    def walk(start: Slot, in_a: bool) -> Slot:
        nxt = (ma if in_a else mb)[start]
        while True:
            if in_a:
                if nxt[0] == "L":
                    return nxt
                seen_junctions.add(nxt[1])
                nxt = mb[("L", nxt[1])]
                in_a = False
            else:
                if nxt[0] == "R":
                    return nxt
                seen_junctions.add(nxt[1])
                nxt = ma[("R", nxt[1])]
                in_a = True

    for y in range(width):
        for start, in_a in ((("L", y), True), (("R", y), False)):
            if start in result:
                continue
            end = walk(start, in_a)
            result[start] = end
            result[end] = start

    cycles = 0
    for y in range(width):
        if y in seen_junctions:
            continue
        cycles += 1
        seen_junctions.add(y)
        side_a = True
        cur = y
        while True:
            nxt = ma[("R", cur)] if side_a else mb[("L", cur)]
            assert nxt[0] == ("R" if side_a else "L"), "cycle walk left the junction set"
            cur = nxt[1]
            side_a = not side_a
            if cur == y and side_a:
                break
            seen_junctions.add(cur)
    return result, cycles


def compose(a: ConnectionPattern, b: ConnectionPattern) -> ConnectionPattern:
    """Pattern of the union of two adjacent slabs (a on the left)."""
    if a.width != b.width:
        raise ConfigurationError(f"width mismatch: {a.width} vs {b.width}")
    matching, cycles = _compose_matchings(a.matching(), b.matching(), a.width)
    return ConnectionPattern.from_matching(a.width, matching, a.closed_loops + b.closed_loops + cycles)


def config_states(width: int, length: int, config: tuple[int, ...]) -> dict[Point, VertexState]:
    """Explicit scatterer assignment of a scan configuration.

    ``config`` holds one base-3^width digit per column (columns 0..length-1,
    left to right); within a column, row y is the base-3 digit
    (config[x] // 3**y) % 3, with 0=empty, 1=NE, 2=NW.
    """
    states = {}
    for x in range(length):
        c = config[x]
        for y in range(width):
            states[Point(x, y)] = SCAN_STATES[(c // 3**y) % 3]
    return states


def column_patterns(width: int) -> list[ConnectionPattern]:
    """Patterns of a single cylinder column, one per base-3^width config index."""
    g = Geometry.cylinder(width)
    slab = Slab(g, 0, 0)
    pats = []
    for c in range(3**width):
        states = [SCAN_STATES[(c // 3**y) % 3] for y in range(width)]
        pats.append(pattern_from_states(g, slab, lambda v: states[v.y]))
    return pats


@dataclass(frozen=True)
class ScanResult:
    width: int
    length: int
    configurations: int
    min_crossings: int
    witnesses: tuple[tuple[int, ...], ...]
    distinct_matchings: int

    def witness_states(self) -> list[dict[Point, VertexState]]:
        return [config_states(self.width, self.length, w) for w in self.witnesses]


def exhaustive_parity_scan(width: int, length: int, max_witnesses: int = 4) -> ScanResult:
    """Minimum crossing count over every mirror configuration of a slab.

    Enumerates all 3**(width*length) assignments of {empty, NE, NW} on the
    slab's vertices.  The crossing count of an assignment equals that of the
    composition of its per-column patterns, so configurations are walked as
    base-3^width digit strings with memoized pattern composition; the
    tests cross-check this against direct per-configuration chases.
    """
    total = 3 ** (width * length)
    if total > SCAN_SIZE_GUARD:
        raise ConfigurationError(
            f"scan size 3^({width}*{length}) = {total} exceeds the desk-scale guard {SCAN_SIZE_GUARD}"
        )
    cols = column_patterns(width)

    pairs_index: dict[tuple, int] = {}
    pairs_list: list[tuple] = []
    matchings: list[dict[Slot, Slot]] = []
    crossings: list[int] = []

    def intern(pairs: tuple) -> int:
        idx = pairs_index.get(pairs)
        if idx is None:
            idx = len(pairs_list)
            pairs_index[pairs] = idx
            pairs_list.append(pairs)
            p = ConnectionPattern(width, pairs)
            matchings.append(p.matching())
            crossings.append(p.crossing_count)
        return idx

    col_ids = [intern(p.pairs) for p in cols]
    trans: dict[tuple[int, int], int] = {}

    best = width + 1
    witnesses: list[tuple[int, ...]] = []
    for config in itertools.product(range(3**width), repeat=length):
        mid = col_ids[config[0]]
        for c in config[1:]:
            key = (mid, c)
            nxt = trans.get(key)
            if nxt is None:
                glued, _ = _compose_matchings(matchings[mid], matchings[col_ids[c]], width)
                nxt = intern(_canonical_pairs(glued))
                trans[key] = nxt
            mid = nxt
        cc = crossings[mid]
        if cc < best:
            best = cc
            witnesses = [config]
        elif cc == best and len(witnesses) < max_witnesses:
            witnesses.append(config)
    return ScanResult(
        width=width,
        length=length,
        configurations=total,
        min_crossings=best,
        witnesses=tuple(witnesses),
        distinct_matchings=len(pairs_list),
    )


def crossing_profile(g: Geometry, max_length: int, state_fn: StateFn) -> list[int]:
    """Crossing counts of the slabs [0, 0], [0, 1], ..., [0, max_length-1].

    One left-to-right sweep: the pattern of a longer slab is the shorter
    slab's pattern composed with one more column, so all prefix lengths come
    out of a single pass.  Mirror model only (its scatter rule is translation
    invariant, so every column can be chased in place).  Used by the
    transmission experiment.
    """
    if max_length < 1:
        raise ConfigurationError("max_length must be >= 1")
    column = Slab(g, 0, 0)
    out: list[int] = []
    acc: Optional[ConnectionPattern] = None
    for x in range(max_length):
        states = [state_fn(Point(x, y)) for y in range(g.width)]
        col = pattern_from_states(g, column, lambda v, _s=states: _s[v.y], MIRROR)
        acc = col if acc is None else compose(acc, col)
        out.append(acc.crossing_count)
    return out
