"""Deterministic one-step ray map for both models, and the trajectory tracer.

Scattering happens at the head vertex of the current directed edge.  In the
Manhattan model an empty vertex passes the ray straight through and a mirror
forces the unique orientation-consistent perpendicular turn.  In the mirror
model the two-sided mirrors act as

    NE "/":  E->N, N->E, W->S, S->W
    NW "\\": E->S, S->E, W->N, N->W

and an empty vertex means straight passage.  Both maps are bijections on the
set of (valid) directed edges, so on a finite geometry every orbit is
periodic and the first revisited edge is the start edge itself; the tracer
exploits this and detects closure by start-edge revisit only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .environment import MANHATTAN, EnvironmentSpec, VertexState, vertex_state
from .geometry import (
    ConfigurationError,
    DirectedEdge,
    Direction,
    Point,
    advance,
    is_manhattan_valid,
    manhattan_horizontal_dir,
    manhattan_vertical_dir,
)

CLOSED = "Closed"
WINDOW_ESCAPE = "WindowEscape"
STEP_CAPPED = "StepCapped"

_NE_MAP = {
    Direction.E: Direction.N,
    Direction.N: Direction.E,
    Direction.W: Direction.S,
    Direction.S: Direction.W,
}
_NW_MAP = {
    Direction.E: Direction.S,
    Direction.S: Direction.E,
    Direction.W: Direction.N,
    Direction.N: Direction.W,
}


@dataclass(frozen=True)
class TrajectoryRecord:
    """Outcome of tracing one ray.

    status is Closed (start edge revisited; period recorded), WindowEscape
    (|x| reached the window bound; boundary records the offending column),
    or StepCapped.  max_abs_x is the running maximum of |x| over visited
    tail vertices.
    """

    start: DirectedEdge
    status: str
    steps_taken: int
    max_abs_x: int
    distinct_vertices: int
    period: Optional[int] = None
    boundary: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {
            "start": str(self.start),
            "status": self.status,
            "period": self.period,
            "boundary": self.boundary,
            "steps_taken": self.steps_taken,
            "max_abs_x": self.max_abs_x,
            "distinct_vertices": self.distinct_vertices,
        }


def scatter_direction(state: VertexState, incoming: Direction, v: Point) -> Direction:
    """Outgoing direction after scattering at vertex ``v`` in state ``state``."""
    if state is VertexState.EMPTY:
        return incoming
    if state is VertexState.MIRROR:
        # The unique other outgoing edge at v: perpendicular, direction fixed
        # by the parity convention.
        if incoming.is_horizontal:
            return manhattan_vertical_dir(v.x)
        return manhattan_horizontal_dir(v.y)
    if state is VertexState.MIRROR_NE:
        return _NE_MAP[incoming]
    return _NW_MAP[incoming]


def step(spec: EnvironmentSpec, e: DirectedEdge) -> DirectedEdge:
    """One application of the ray map; the returned edge has tail advance(e)."""
    if spec.model == MANHATTAN and not is_manhattan_valid(e, spec.geometry):
        raise ConfigurationError(f"edge {e} violates the Manhattan orientation")
    v = advance(e, spec.geometry)
    return DirectedEdge(v, scatter_direction(vertex_state(spec, v), e.direction, v))


def step_inverse(spec: EnvironmentSpec, e: DirectedEdge) -> DirectedEdge:
    """Unique preimage of ``e`` under step.

    The scatterer acting on the predecessor sits at e.tail; both mirror maps
    are involutions on directions and the Manhattan turn swaps the two
    incoming directions, which at a given vertex coincide with the two
    outgoing ones.
    """
    v = e.tail
    state = vertex_state(spec, v)
    if state is VertexState.EMPTY:
        incoming = e.direction
    elif state is VertexState.MIRROR:
        if spec.model == MANHATTAN and not is_manhattan_valid(e, spec.geometry):
            raise ConfigurationError(f"edge {e} violates the Manhattan orientation")
        if e.direction.is_horizontal:
            incoming = manhattan_vertical_dir(v.x)
        else:
            incoming = manhattan_horizontal_dir(v.y)
    elif state is VertexState.MIRROR_NE:
        incoming = _NE_MAP[e.direction]
    else:
        incoming = _NW_MAP[e.direction]
    tail = spec.geometry.reduce(Point(v.x - incoming.dx, v.y - incoming.dy))
    return DirectedEdge(tail, incoming)


def reverse_edge(e: DirectedEdge, spec: EnvironmentSpec) -> DirectedEdge:
    """The same undirected edge traversed the other way."""
    return DirectedEdge(advance(e, spec.geometry), e.direction.reversed())


def trace(
    spec: EnvironmentSpec,
    start: DirectedEdge,
    max_steps: int = 1_000_000,
    window: Optional[int] = None,
    track_vertices: bool = True,
) -> TrajectoryRecord:
    """Iterate the ray map from ``start`` until closure, window escape, or cap.

    A window ``L`` confines the trajectory to |x| < L: the trace reports
    WindowEscape as soon as a visited tail has |x| >= L (the start vertex is
    checked before the first step, so window 0 escapes immediately).
    ``track_vertices`` may be disabled for speed; it only affects the
    distinct_vertices count, never the status.
    """
    if max_steps < 1:
        raise ConfigurationError(f"max_steps must be >= 1, got {max_steps}")
    start = DirectedEdge(spec.geometry.reduce(start.tail), start.direction)
    e = start
    max_abs_x = abs(e.tail.x)
    seen: set = {e.tail} if track_vertices else set()

    def record(status: str, steps: int, **kw: object) -> TrajectoryRecord:
        return TrajectoryRecord(
            start=start,
            status=status,
            steps_taken=steps,
            max_abs_x=max_abs_x,
            distinct_vertices=len(seen),
            **kw,
        )

    if window is not None and abs(e.tail.x) >= window:
        return record(WINDOW_ESCAPE, 0, boundary=e.tail.x)

    for steps in range(1, max_steps + 1):
        e = step(spec, e)
        x = e.tail.x
        if abs(x) > max_abs_x:
            max_abs_x = abs(x)
        if track_vertices:
            seen.add(e.tail)
        if e == start:
            return record(CLOSED, steps, period=steps)
        if window is not None and abs(x) >= window:
            return record(WINDOW_ESCAPE, steps, boundary=x)
    return record(STEP_CAPPED, max_steps)
