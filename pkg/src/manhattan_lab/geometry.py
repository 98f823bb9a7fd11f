"""Lattice geometries (plane, cylinder, torus) and the Manhattan orientation.

Coordinate conventions used throughout the package:

* ``x`` is the column index.  On a cylinder it is the infinite coordinate.
* ``y`` is the row index.  On a cylinder of circumference ``w`` it is stored
  reduced modulo ``w``; on a torus both coordinates are stored reduced.

The Manhattan orientation assigns horizontal edges east on even rows and
west on odd rows, and vertical edges north on even columns and south on odd
columns.  Every vertex then has exactly one horizontal and one vertical
outgoing edge (and likewise incoming).  The orientation is only consistent
around a periodic direction when that dimension is even, hence tori must
have even sides and Manhattan dynamics rejects odd cylinders.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class ConfigurationError(ValueError):
    """A precondition on model/geometry/parameters was violated."""


class Point(NamedTuple):
    """Lattice vertex: column ``x``, row ``y``."""

    x: int
    y: int


class Direction(Enum):
    """Compass direction of a directed lattice edge; unit steps on Z^2."""

    E = (1, 0)
    N = (0, 1)
    W = (-1, 0)
    S = (0, -1)

    @property
    def dx(self) -> int:
        return self.value[0]

    @property
    def dy(self) -> int:
        return self.value[1]

    @property
    def is_horizontal(self) -> bool:
        return self.value[1] == 0

    def reversed(self) -> "Direction":
        return _REVERSE[self]

    def __str__(self) -> str:
        return self.name

    @staticmethod
    def parse(token: str) -> "Direction":
        try:
            return Direction[token.strip().upper()]
        except KeyError:
            raise ConfigurationError(f"unknown direction {token!r} (expected E/N/W/S)") from None


_REVERSE = {
    Direction.E: Direction.W,
    Direction.W: Direction.E,
    Direction.N: Direction.S,
    Direction.S: Direction.N,
}


class DirectedEdge(NamedTuple):
    """A lattice position plus travel direction; the state of the ray dynamics."""

    tail: Point
    direction: Direction

    def __str__(self) -> str:
        return f"{self.tail.x},{self.tail.y},{self.direction.name}"

    @staticmethod
    def parse(token: str) -> "DirectedEdge":
        parts = token.split(",")
        if len(parts) != 3:
            raise ConfigurationError(f"bad edge {token!r} (expected x,y,DIR)")
        try:
            x, y = int(parts[0]), int(parts[1])
        except ValueError:
            raise ConfigurationError(f"bad edge coordinates in {token!r}") from None
        return DirectedEdge(Point(x, y), Direction.parse(parts[2]))


PLANE = "plane"
CYLINDER = "cylinder"
TORUS = "torus"


@dataclass(frozen=True)
class Geometry:
    """One of the three lattice families: infinite plane, cylinder, torus.

    Cylinder: ``Z x (Z/width)``, the periodic coordinate is y.  Torus sides
    must be even so the Manhattan orientation closes up; odd cylinders are
    allowed (mirror model only).
    """

    kind: str
    width: int = 0      # cylinder circumference
    wx: int = 0         # torus dimensions
    wy: int = 0

    @staticmethod
    def plane() -> "Geometry":
        return Geometry(PLANE)

    @staticmethod
    def cylinder(width: int) -> "Geometry":
        if width < 1:
            raise ConfigurationError(f"cylinder width must be positive, got {width}")
        return Geometry(CYLINDER, width=width)

    @staticmethod
    def torus(wx: int, wy: int) -> "Geometry":
        if wx < 2 or wy < 2 or wx % 2 or wy % 2:
            raise ConfigurationError(f"torus dimensions must be positive even integers, got {wx}x{wy}")
        return Geometry(TORUS, wx=wx, wy=wy)

    @staticmethod
    def parse(token: str) -> "Geometry":
        """Parse the CLI syntax: plane | cylinder:<w> | torus:<wx>x<wy>."""
        token = token.strip()
        if token == PLANE:
            return Geometry.plane()
        if token.startswith("cylinder:"):
            try:
                return Geometry.cylinder(int(token.split(":", 1)[1]))
            except ValueError:
                raise ConfigurationError(f"bad cylinder width in {token!r}") from None
        if token.startswith("torus:"):
            dims = token.split(":", 1)[1].split("x")
            if len(dims) == 2:
                try:
                    return Geometry.torus(int(dims[0]), int(dims[1]))
                except ValueError:
                    pass
            raise ConfigurationError(f"bad torus size in {token!r} (expected torus:<wx>x<wy>)")
        raise ConfigurationError(f"unknown geometry {token!r}")

    def __str__(self) -> str:
        if self.kind == PLANE:
            return PLANE
        if self.kind == CYLINDER:
            return f"cylinder:{self.width}"
        return f"torus:{self.wx}x{self.wy}"

    @property
    def periodic_dims_even(self) -> bool:
        if self.kind == PLANE:
            return True
        if self.kind == CYLINDER:
            return self.width % 2 == 0
        return True  # torus sides are even by construction

    def reduce(self, p: Point) -> Point:
        """Reduce a point into the fundamental domain."""
        if self.kind == PLANE:
            return p
        if self.kind == CYLINDER:
            return Point(p.x, p.y % self.width)
        return Point(p.x % self.wx, p.y % self.wy)


def advance(e: DirectedEdge, g: Geometry) -> Point:
    """Head vertex of a directed edge, with periodic wrapping applied."""
    return g.reduce(Point(e.tail.x + e.direction.dx, e.tail.y + e.direction.dy))


def manhattan_horizontal_dir(y: int) -> Direction:
    return Direction.E if y % 2 == 0 else Direction.W


def manhattan_vertical_dir(x: int) -> Direction:
    return Direction.N if x % 2 == 0 else Direction.S


def manhattan_outgoing(v: Point, g: Geometry) -> tuple[DirectedEdge, DirectedEdge]:
    """The unique horizontal and vertical outgoing directed edges at ``v``.

    Requires every periodic dimension of ``g`` to be even, otherwise the row
    and column parities are not well defined.
    """
    if not g.periodic_dims_even:
        raise ConfigurationError("manhattan requires even width")
    v = g.reduce(v)
    return (
        DirectedEdge(v, manhattan_horizontal_dir(v.y)),
        DirectedEdge(v, manhattan_vertical_dir(v.x)),
    )


def is_manhattan_valid(e: DirectedEdge, g: Geometry) -> bool:
    """Whether a directed edge respects the Manhattan orientation."""
    if not g.periodic_dims_even:
        return False
    tail = g.reduce(e.tail)
    if e.direction.is_horizontal:
        return e.direction is manhattan_horizontal_dir(tail.y)
    return e.direction is manhattan_vertical_dir(tail.x)


@dataclass(frozen=True)
class Slab:
    """All columns ``x_min..x_max`` of a cylinder, across the full circumference."""

    geometry: Geometry
    x_min: int
    x_max: int

    def __post_init__(self) -> None:
        if self.geometry.kind != CYLINDER:
            raise ConfigurationError("slabs are defined on cylinders only")
        if self.x_min > self.x_max:
            raise ConfigurationError(f"empty slab: x_min={self.x_min} > x_max={self.x_max}")

    @property
    def length(self) -> int:
        return self.x_max - self.x_min + 1

    def contains(self, p: Point) -> bool:
        return self.x_min <= p.x <= self.x_max


class CutEdge(NamedTuple):
    """One undirected horizontal edge crossing a vertical cut, with its two
    directed slots."""

    row: int
    eastbound: DirectedEdge
    westbound: DirectedEdge


def cut_slots(g: Geometry, k: int) -> list[CutEdge]:
    """Horizontal edges crossing the cut between columns ``k`` and ``k+1``.

    Returns one entry per row, in increasing row order.  Each undirected
    crossing edge carries an eastbound slot (tail in column ``k``) and a
    westbound slot (tail in column ``k+1``).
    """
    if g.kind != CYLINDER:
        raise ConfigurationError("cut slots are defined on cylinders only")
    return [
        CutEdge(
            row=y,
            eastbound=DirectedEdge(Point(k, y), Direction.E),
            westbound=DirectedEdge(Point(k + 1, y), Direction.W),
        )
        for y in range(g.width)
    ]
