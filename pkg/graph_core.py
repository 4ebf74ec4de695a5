#!/usr/bin/env python3
"""
Interaction graphs over agents 0..n-1.

Vertex sets are frozensets of ints; the searches work on int bitmasks
internally (bit v set means vertex v is a member) and convert at the edges.
Canonical order of vertex sets is by size, then by sorted member tuple.
"""
from dataclasses import dataclass, field

import networkx as nx

from solver_errors import GraphFormatError, InputError, UnknownFamilyError


def vertex_set(members):
    return frozenset(int(v) for v in members)


def canonical_key(s):
    return (len(s), tuple(sorted(s)))


def to_mask(s):
    mask = 0
    for v in s:
        mask |= 1 << v
    return mask


def from_mask(mask):
    members = []
    while mask:
        low = mask & -mask
        members.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(members)


def mask_members(mask):
    """Sorted member list of a bitmask."""
    return sorted(from_mask(mask))


def mask_key(mask):
    return (mask.bit_count(), tuple(mask_members(mask)))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph; edges are stored as (low, high) pairs."""
    n: int
    edges: frozenset = frozenset()
    adjacency: tuple = field(init=False, repr=False, compare=False)
    neighbor_masks: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InputError("a graph needs at least one vertex")
        adjacency = [set() for _ in range(self.n)]
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge ({u}, {v}) out of range for n={self.n}")
            normalized.add((min(u, v), max(u, v)))
            adjacency[u].add(v)
            adjacency[v].add(u)
        object.__setattr__(self, "edges", frozenset(normalized))
        object.__setattr__(self, "adjacency", tuple(frozenset(a) for a in adjacency))
        object.__setattr__(self, "neighbor_masks", tuple(to_mask(a) for a in adjacency))

    @property
    def vertices(self):
        return range(self.n)

    @property
    def full_mask(self):
        return (1 << self.n) - 1

    def sorted_edges(self):
        return sorted(self.edges)

    def check_vertices(self, s):
        bad = [v for v in s if not (0 <= v < self.n)]
        if bad:
            raise InputError(f"vertex index out of range for n={self.n}: {sorted(bad)}")

    def is_connected_mask(self, mask):
        return mask_connected(self.neighbor_masks, mask)

    def components_of_mask(self, mask):
        """Connected components of G[mask], as bitmasks in order of lowest member."""
        components = []
        rest = mask
        while rest:
            seed = rest & -rest
            comp = _reach(self.neighbor_masks, seed, rest)
            components.append(comp)
            rest &= ~comp
        return components

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.sorted_edges())
        return g


def from_networkx(nx_graph):
    """Graph from a networkx graph; nodes are renumbered in sorted order."""
    relabeled = nx.convert_node_labels_to_integers(nx_graph, ordering="sorted")
    return Graph(relabeled.number_of_nodes(), frozenset(relabeled.edges()))


def _reach(neighbor_masks, seed, within):
    seen = seed
    frontier = seed
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        new = neighbor_masks[low.bit_length() - 1] & within & ~seen
        seen |= new
        frontier |= new
    return seen


def mask_connected(neighbor_masks, mask):
    if mask == 0:
        return False
    return _reach(neighbor_masks, mask & -mask, mask) == mask


# --- edge-list documents ---

def parse_graph(text):
    """Parse an edge-list document: header "n m", then m lines "u v"; '#' lines are comments."""
    header = None
    edges = []
    seen = set()
    last_line = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        last_line = line_no
        parts = line.split()
        if header is None:
            if len(parts) != 2 or not all(_is_int(p) for p in parts):
                raise GraphFormatError(line_no, f"malformed header {line!r}, expected 'n m'")
            n, m = int(parts[0]), int(parts[1])
            if n < 1 or m < 0:
                raise GraphFormatError(line_no, f"malformed header {line!r}, need n >= 1 and m >= 0")
            header = (n, m)
            continue
        n, m = header
        if len(parts) != 2 or not all(_is_int(p) for p in parts):
            raise GraphFormatError(line_no, f"malformed edge {line!r}, expected 'u v'")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(line_no, f"vertex index out of range in {line!r} (n={n})")
        if u == v:
            raise GraphFormatError(line_no, f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(line_no, f"duplicate edge {key}")
        if len(edges) == m:
            raise GraphFormatError(line_no, f"more than the {m} edges announced in the header")
        seen.add(key)
        edges.append(key)
    if header is None:
        raise GraphFormatError(max(last_line, 1), "missing header")
    if len(edges) != header[1]:
        raise GraphFormatError(last_line, f"expected {header[1]} edges, found {len(edges)}")
    return Graph(header[0], frozenset(edges))


def format_graph(g):
    lines = [f"{g.n} {len(g.edges)}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def _is_int(token):
    try:
        int(token)
    except ValueError:
        return False
    return True


# --- connectivity and enumeration ---

def is_connected_induced(g, s):
    if not s:
        raise InputError("empty vertex set has no connectivity; callers must reject it first")
    g.check_vertices(s)
    return g.is_connected_mask(to_mask(s))


def connected_set_masks(g, min_size=1, max_size=None):
    """
    Bitmasks of all connected induced subsets with min_size <= |S| <= max_size,
    in canonical order. Each set is grown exactly once from its lowest vertex
    by exclusive-neighbourhood extension.
    """
    if max_size is None:
        max_size = g.n
    if not (1 <= min_size <= max_size <= g.n):
        raise InputError(f"inconsistent size bounds {min_size}..{max_size} for n={g.n}")
    nbr = g.neighbor_masks
    found = []

    def extend(sub, size, ext, sub_nbr, above):
        if size >= min_size:
            found.append(sub)
        if size == max_size:
            return
        while ext:
            low = ext & -ext
            ext ^= low
            w = low.bit_length() - 1
            exclusive = nbr[w] & ~sub & ~sub_nbr & above
            extend(sub | low, size + 1, ext | exclusive, sub_nbr | nbr[w], above)

    for v in range(g.n):
        above = g.full_mask & ~((1 << (v + 1)) - 1)
        extend(1 << v, 1, nbr[v] & above, nbr[v], above)
    found.sort(key=mask_key)
    return found


def enumerate_connected_sets(g, min_size=1, max_size=None):
    return [from_mask(m) for m in connected_set_masks(g, min_size, max_size)]


def min_vertex_separator(g, a, b):
    """
    Minimum a-b separator size by unit-capacity vertex-split max flow.

    Terminals are never split. Every shared vertex of a and b counts once
    and is removed; a direct edge between an a-only and a b-only vertex
    carries one unit, since no vertex outside the terminals can cut it.
    """
    if not a or not b:
        raise InputError("separator terminals must be non-empty")
    g.check_vertices(a)
    g.check_vertices(b)
    shared = set(a) & set(b)
    left = set(a) - shared
    right = set(b) - shared
    if not left or not right:
        return len(shared)
    terminals = left | right
    flow = nx.DiGraph()
    for v in g.vertices:
        if v in shared:
            continue
        if v in terminals:
            flow.add_edge(("in", v), ("out", v))
        else:
            flow.add_edge(("in", v), ("out", v), capacity=1)
    for u, v in g.sorted_edges():
        if u in shared or v in shared:
            continue
        crossing = (u in left and v in right) or (u in right and v in left)
        for x, y in ((u, v), (v, u)):
            if crossing:
                flow.add_edge(("out", x), ("in", y), capacity=1)
            else:
                flow.add_edge(("out", x), ("in", y))
    for v in left:
        flow.add_edge("source", ("in", v))
    for v in right:
        flow.add_edge(("out", v), "sink")
    return len(shared) + int(nx.maximum_flow_value(flow, "source", "sink"))


# --- named families ---

def _positive(name, value):
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise InputError(f"{name} must be a positive integer, got {value!r}")
    return value


def path_graph(n):
    return from_networkx(nx.path_graph(_positive("n", n)))


def star_graph(leaves):
    """Center 0, leaves 1..leaves."""
    return from_networkx(nx.star_graph(_positive("leaves", leaves)))


def clique_graph(n):
    return from_networkx(nx.complete_graph(_positive("n", n)))


def grid_graph(k):
    """k x k grid, vertex (i, j) numbered i*k + j (row-major)."""
    return from_networkx(nx.grid_2d_graph(_positive("k", k), k))


def grid_row(k, i):
    return frozenset(i * k + j for j in range(k))


def grid_column(k, j):
    return frozenset(i * k + j for i in range(k))


def path_power_graph(n, r):
    """r-th power of the path 0..n-1: i ~ j iff 0 < |i - j| <= r."""
    _positive("n", n)
    _positive("r", r)
    if r >= n:
        raise InputError(f"path_power needs r < n, got n={n}, r={r}")
    return from_networkx(nx.power(nx.path_graph(n), r))


FAMILIES = {
    "path": (path_graph, 1),
    "star": (star_graph, 1),
    "clique": (clique_graph, 1),
    "grid": (grid_graph, 1),
    "path_power": (path_power_graph, 2),
}


def generate(family, *params):
    if family not in FAMILIES:
        raise UnknownFamilyError(f"unknown graph family {family!r}; known: {', '.join(FAMILIES)}")
    builder, arity = FAMILIES[family]
    if len(params) != arity:
        raise InputError(f"{family} takes {arity} parameter(s), got {len(params)}")
    return builder(*params)


# --- random and exhaustive corpora ---

def random_connected_graph(n, p, rng, attempts=1000):
    """Erdős–Rényi G(n, p) resampled until connected; every draw comes from rng."""
    _positive("n", n)
    for _ in range(attempts):
        candidate = nx.gnp_random_graph(n, p, seed=rng.randrange(2**32))
        if nx.is_connected(candidate):
            return from_networkx(candidate)
    raise InputError(f"no connected G({n}, {p}) sample in {attempts} attempts")


def random_tree(n, rng):
    _positive("n", n)
    if n <= 2:
        return path_graph(n)
    sequence = [rng.randrange(n) for _ in range(n - 2)]
    return from_networkx(nx.from_prufer_sequence(sequence))


def small_connected_graphs(max_n=6):
    """Every connected graph on 1..max_n vertices up to isomorphism (max_n <= 7)."""
    return [
        from_networkx(atlas_graph)
        for atlas_graph in nx.graph_atlas_g()
        if 1 <= atlas_graph.number_of_nodes() <= max_n and nx.is_connected(atlas_graph)
    ]


# --- grid minor models ---

@dataclass(frozen=True)
class MinorModel:
    """Branch sets of a k x k grid minor; coordinates run 1..k."""
    k: int
    branch_sets: dict

    def branch_set(self, i, j):
        return self.branch_sets[(i, j)]


def identity_minor_model(k):
    return MinorModel(k, {(i, j): frozenset({(i - 1) * k + (j - 1)})
                          for i in range(1, k + 1) for j in range(1, k + 1)})


def validate_minor_model(g, m):
    violations = []
    if m.k < 1:
        return [f"grid side must be positive, got {m.k}"]
    expected = {(i, j) for i in range(1, m.k + 1) for j in range(1, m.k + 1)}
    present = set(m.branch_sets)
    for cell in sorted(expected - present):
        violations.append(f"missing branch set for cell {cell}")
    for cell in sorted(present - expected, key=repr):
        violations.append(f"branch set for unknown cell {cell}")
    owner = {}
    for cell in sorted(present & expected):
        members = m.branch_sets[cell]
        if not members:
            violations.append(f"branch set {cell} is empty")
            continue
        bad = sorted(v for v in members if not (0 <= v < g.n))
        if bad:
            violations.append(f"branch set {cell} has out-of-range vertices {bad}")
            continue
        if not g.is_connected_mask(to_mask(members)):
            violations.append(f"branch set {cell} is not connected")
        for v in sorted(members):
            if v in owner:
                violations.append(f"vertex {v} shared by branch sets {owner[v]} and {cell}")
            else:
                owner[v] = cell
    if violations:
        return violations
    for i in range(1, m.k + 1):
        for j in range(1, m.k + 1):
            for other in ((i + 1, j), (i, j + 1)):
                if other not in expected:
                    continue
                if not _touching(g, m.branch_sets[(i, j)], m.branch_sets[other]):
                    violations.append(f"no host edge between branch sets {(i, j)} and {other}")
    return violations


def _touching(g, x, y):
    return any(g.adjacency[u] & y for u in x)
