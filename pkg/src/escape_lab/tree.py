"""Vertex addressing and metric for the homogeneous tree.

The tree has one distinguished root and every vertex has exactly ``d + 1``
neighbours.  A vertex is addressed by its branch path from the root: the
root is the empty path, its ``d + 1`` neighbours are ``(0,)`` … ``(d,)``,
and every later step picks one of the ``d`` forward children.  Addresses
serialise as dot-separated indices, with the empty string for the root
(e.g. ``"0.1.1"``).

The tree is never materialised; all operations are pure functions on
paths.  Sphere sizes follow from the branching structure: level ``n >= 1``
holds ``(d + 1) * d**(n - 1)`` vertices, because the root opens ``d + 1``
branches and each branch multiplies by ``d`` per level.  (A tempting but
wrong count is ``(d + 1) * d**n``, which overcounts by one factor of
``d``; the enumeration tests pin the correct value.)
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .errors import AddressError, ConfigError

VertexId = tuple[int, ...]

ROOT: VertexId = ()


@dataclass(frozen=True)
class TreeParams:
    """Branching parameter of the homogeneous tree (degree ``d + 1``)."""

    d: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 2:
            raise ConfigError(f"tree parameter d must be an integer >= 2, got {self.d!r}")


def validate_vertex(v: VertexId, params: TreeParams) -> VertexId:
    """Check that a path is a legal address for this tree."""
    d = params.d
    for pos, step in enumerate(v):
        limit = d if pos == 0 else d - 1
        if not isinstance(step, int) or step < 0 or step > limit:
            raise AddressError(
                f"address component {step!r} at position {pos} out of range 0..{limit}"
            )
    return v


def parse_vertex(text: str, params: TreeParams) -> VertexId:
    """Parse a dot-separated address; the empty string is the root."""
    if text == "":
        return ROOT
    try:
        path = tuple(int(part) for part in text.split("."))
    except ValueError:
        raise AddressError(f"malformed vertex address {text!r}") from None
    return validate_vertex(path, params)


def format_vertex(v: VertexId) -> str:
    """Serialise an address as a dot-separated string ('' for the root)."""
    return ".".join(str(step) for step in v)


def level(v: VertexId) -> int:
    """Distance from the root."""
    return len(v)


def neighbors(v: VertexId, params: TreeParams) -> list[VertexId]:
    """All ``d + 1`` neighbours: the parent (if any) plus forward children."""
    d = params.d
    out: list[VertexId] = []
    if v:
        out.append(v[:-1])
        out.extend(v + (j,) for j in range(d))
    else:
        out.extend((j,) for j in range(d + 1))
    return out


def distance(x: VertexId, y: VertexId) -> int:
    """Graph distance: combined depth below the longest common prefix."""
    k = 0
    for a, b in zip(x, y):
        if a != b:
            break
        k += 1
    return len(x) + len(y) - 2 * k


def m_predecessor(x: VertexId, m: int, params: TreeParams | None = None) -> VertexId:
    """The ancestor ``m`` steps toward the root."""
    if m < 0:
        raise ConfigError(f"predecessor step count must be >= 0, got {m}")
    if m > len(x):
        raise AddressError(
            f"vertex at level {len(x)} has no predecessor {m} steps up"
        )
    return x[: len(x) - m]


def in_forward_subtree(x: VertexId, y: VertexId) -> bool:
    """True iff ``y`` lies in the forward subtree rooted at ``x``
    (equivalently, ``x`` is a prefix of ``y``; every vertex is in its
    own forward subtree)."""
    return len(y) >= len(x) and y[: len(x)] == x


def sphere_size(n: int, params: TreeParams) -> int:
    """Exact number of vertices at level ``n``."""
    if n < 0:
        raise ConfigError(f"level must be >= 0, got {n}")
    if n == 0:
        return 1
    return (params.d + 1) * params.d ** (n - 1)


def ball_size(n: int, params: TreeParams) -> int:
    """Exact number of vertices at levels ``0..n``."""
    if n < 0:
        raise ConfigError(f"level must be >= 0, got {n}")
    d = params.d
    return 1 + (d + 1) * (d**n - 1) // (d - 1)


def min_distance(xs: Iterable[VertexId], ys: Iterable[VertexId]) -> int | None:
    """Minimum pairwise tree distance between two vertex sets.

    Runs in O(total address length) by indexing, for every prefix ``p``
    of a ``ys`` vertex, the cheapest descent cost ``len(y) - len(p)``;
    the distance from any ``x`` is then the best climb-plus-descent over
    the prefixes of ``x``.  For the minimising pair the optimal prefix is
    exactly their longest common prefix, so the result equals the true
    minimum.  Returns None if either set is empty.
    """
    best_to: dict[VertexId, int] = {}
    for y in ys:
        ly = len(y)
        for k in range(ly + 1):
            p = y[:k]
            cost = ly - k
            cur = best_to.get(p)
            if cur is None or cost < cur:
                best_to[p] = cost
    best: int | None = None
    for x in xs:
        lx = len(x)
        for k in range(lx + 1):
            cost = best_to.get(x[:k])
            if cost is not None:
                total = lx - k + cost
                if best is None or total < best:
                    best = total
    return best
