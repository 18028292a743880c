"""Small named graphs used in the docs, the CLI walkthroughs, and the tests."""
from __future__ import annotations

from .graphs import Graph, build_graph


def pair() -> Graph:
    """Two nodes, one link."""
    return build_graph(2, [(0, 1)])


def path(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(n: int) -> Graph:
    """Hub 0 plus n - 1 leaves."""
    return build_graph(n, [(0, i) for i in range(1, n)])


def barbell7() -> Graph:
    """Two triangles {0,1,2} and {4,5,6} joined through bridge node 3."""
    edges = [(0, 1), (0, 2), (1, 2), (4, 5), (4, 6), (5, 6), (2, 3), (3, 4)]
    return build_graph(7, edges)


def lattice(width: int, height: int) -> Graph:
    edges = []
    for y in range(height):
        for x in range(width):
            s = y * width + x
            if x + 1 < width:
                edges.append((s, s + 1))
            if y + 1 < height:
                edges.append((s, s + width))
    return build_graph(width * height, edges)


def torus(width: int, height: int) -> Graph:
    edges = set()
    for y in range(height):
        for x in range(width):
            s = y * width + x
            right = y * width + (x + 1) % width
            down = ((y + 1) % height) * width + x
            for t in (right, down):
                if s != t:
                    edges.add((min(s, t), max(s, t)))
    return build_graph(width * height, sorted(edges))


def directed_chain(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)], directed=True)


def directed_cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)], directed=True)


_REGISTRY = {
    "k2": pair,
    "p3": lambda: path(3),
    "triangle": lambda: cycle(3),
    "star-s4": lambda: star(4),
    "barbell7": barbell7,
    "chain3-directed": lambda: directed_chain(3),
    "lattice-8x8": lambda: lattice(8, 8),
}


def toy_graph(name: str) -> Graph:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValueError(f"unknown toy graph {name!r}; choices: {sorted(_REGISTRY)}") from None


def toy_names() -> list[str]:
    return sorted(_REGISTRY)
