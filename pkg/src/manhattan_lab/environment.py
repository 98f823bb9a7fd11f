"""Deterministic scatterer fields and the reproducible randomness contract.

All randomness in the package flows through counter-based streams built on
the SplitMix64 finalizer ``mix64``.  A stream is identified by
``(seed, lane, counter)`` and its outputs are a pure function of those three
integers, so environments need no storage: the scatterer state of a vertex
is recomputed on demand from the vertex coordinates, bit-exactly, on any
platform and from any worker.

Density convention: everything is parameterized by the mirror density ``r``
at lattice vertices.  Depending on which percolation dictionary one adopts,
``r`` plays the role of ``p`` or of ``1 - p``; outputs of this package
always record ``r`` and never a ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import ConfigurationError, Geometry, Point

MASK64 = (1 << 64) - 1

MANHATTAN = "manhattan"
MIRROR = "mirror"
MODELS = (MANHATTAN, MIRROR)


def mix64(x: int) -> int:
    """SplitMix64 finalizer; all arithmetic modulo 2^64.  mix64(0) == 0."""
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def zigzag(n: int) -> int:
    """Map signed to unsigned integers: 0,-1,1,-2,... -> 0,1,2,3,..."""
    return 2 * n if n >= 0 else -2 * n - 1


@dataclass
class RandomStream:
    """Counter-based random stream; output is a pure function of
    (seed, lane, counter).  Distinct lanes are independent streams.  A
    stream value is owned by a single logical consumer at a time."""

    seed: int
    lane: int = 0
    counter: int = 0

    def raw64(self) -> int:
        v = mix64(mix64(self.seed) ^ mix64(self.lane) ^ self.counter)
        self.counter = (self.counter + 1) & MASK64
        return v

    def uniform01(self) -> float:
        """Top 53 bits of the next raw draw, divided by 2^53; in [0, 1)."""
        return (self.raw64() >> 11) * 2.0 ** -53


def uniform01(stream: RandomStream) -> float:
    return stream.uniform01()


class VertexState(Enum):
    EMPTY = "empty"
    MIRROR = "mirror"          # manhattan model: undifferentiated mirror
    MIRROR_NE = "NE"           # mirror model: "/" mirror
    MIRROR_NW = "NW"           # mirror model: "\" mirror

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class EnvironmentSpec:
    """A lazily evaluated scatterer field over lattice vertices.

    model:       "manhattan" (mirror present / empty) or "mirror"
                 (NE / NW / empty two-sided mirrors).
    density:     mirror density r in [0, 1] at vertices.
    ne_fraction: probability that a mirror is NE rather than NW
                 (mirror model only).
    seed:        64-bit stream seed.
    """

    model: str
    geometry: Geometry
    density: float
    seed: int
    ne_fraction: float = 0.5

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ConfigurationError(f"unknown model {self.model!r}")
        if not 0.0 <= self.density <= 1.0:
            raise ConfigurationError(f"density must be in [0,1], got {self.density}")
        if not 0.0 <= self.ne_fraction <= 1.0:
            raise ConfigurationError(f"ne_fraction must be in [0,1], got {self.ne_fraction}")
        if self.model == MANHATTAN and not self.geometry.periodic_dims_even:
            raise ConfigurationError("manhattan requires even width")


def vertex_lane(v: Point) -> int:
    """Stream lane identifying a lattice vertex."""
    return mix64(zigzag(v.x) ^ mix64(zigzag(v.y)))


def vertex_state(spec: EnvironmentSpec, v: Point) -> VertexState:
    """Scatterer state at vertex ``v``; pure in (spec, v)."""
    v = spec.geometry.reduce(v)
    stream = RandomStream(spec.seed, lane=vertex_lane(v))
    u = stream.uniform01()
    if u >= spec.density:
        return VertexState.EMPTY
    if spec.model == MANHATTAN:
        return VertexState.MIRROR
    u2 = stream.uniform01()  # counter 1: orientation draw
    return VertexState.MIRROR_NE if u2 < spec.ne_fraction else VertexState.MIRROR_NW


def _normal_pair(stream: RandomStream) -> tuple[float, float]:
    # Box-Muller; 1-u keeps the log argument in (0, 1].  np.log rather than
    # math.log so that the vectorized twin of this sampler is bit-identical.
    u1 = stream.uniform01()
    u2 = stream.uniform01()
    radius = math.sqrt(-2.0 * float(np.log(1.0 - u1)))
    angle = 2.0 * math.pi * u2
    return radius * math.cos(angle), radius * math.sin(angle)


def haar_su2(stream: RandomStream) -> np.ndarray:
    """Haar-distributed SU(2) matrix via a normalized random quaternion.

    Draws four standard normals (two Box-Muller pairs), normalizes the
    quaternion (a, b, c, d), and returns
    ``[[a+ib, c+id], [-c+id, a-ib]]``; unitary with determinant one.
    """
    while True:
        a, b = _normal_pair(stream)
        c, d = _normal_pair(stream)
        norm = math.sqrt(a * a + b * b + c * c + d * d)
        if norm > 0.0:
            break
    a, b, c, d = a / norm, b / norm, c / norm, d / norm
    return np.array(
        [[complex(a, b), complex(c, d)], [complex(-c, d), complex(a, -b)]],
        dtype=np.complex128,
    )


def replica_stream(seed: int, point_index: int, replica_index: int) -> RandomStream:
    """The stream owned by one (grid point, replica) work unit."""
    return RandomStream(seed, lane=mix64(point_index) ^ replica_index)


def replica_environment_seed(seed: int, point_index: int, replica_index: int) -> int:
    """Environment seed for one replica: the first raw draw of its stream."""
    return replica_stream(seed, point_index, replica_index).raw64()
