#!/usr/bin/env python3
"""
Thickets, vine decompositions and tree decompositions.

Validators return lists of violations (an empty list means the certificate
holds). The exact searches for the thicket number, the vinewidth and the
treewidth work on vertex bitmasks and stop with BudgetExceeded above their
size limits.
"""
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from discrete_solvers import DEFAULT_NODE_BUDGET, min_hitting_set
from graph_core import (canonical_key, connected_set_masks, from_mask, grid_column, grid_graph,
                        grid_row, mask_key, mask_members, path_power_graph, to_mask)
from solver_errors import BudgetExceeded, CertificateError, InputError, InternalConsistencyError

MAX_WIDTH_VERTICES = 9
MAX_TREEWIDTH_VERTICES = 12


# --- certificate types ---

@dataclass(frozen=True)
class Thicket:
    """Family of connected vertex sets, stored deduplicated in canonical order."""
    sets: tuple

    def __post_init__(self):
        normalized = {frozenset(s) for s in self.sets}
        object.__setattr__(self, "sets", tuple(sorted(normalized, key=canonical_key)))


@dataclass(frozen=True)
class VineDecomposition:
    """Labelled tree; node t has label labels[t], links are node index pairs."""
    labels: tuple
    links: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(frozenset(l) for l in self.labels))
        object.__setattr__(self, "links", tuple(tuple(link) for link in self.links))

    @property
    def width(self):
        return max((len(l) for l in self.labels), default=0)

    def tree_adjacency(self):
        adjacency = [set() for _ in self.labels]
        for a, b in self.links:
            adjacency[a].add(b)
            adjacency[b].add(a)
        return adjacency

    def node_sets(self, n):
        """T_v for every vertex v < n."""
        sets = [set() for _ in range(n)]
        for t, label in enumerate(self.labels):
            for v in label:
                if 0 <= v < n:
                    sets[v].add(t)
        return sets


@dataclass(frozen=True)
class TreeDecomposition(VineDecomposition):
    @property
    def width(self):
        return max((len(l) for l in self.labels), default=0) - 1


# --- thickets ---

def validate_thicket(g, t):
    violations = []
    if not t.sets:
        violations.append("thicket has no sets")
    for s in t.sets:
        if not s:
            violations.append("empty set in thicket")
            continue
        bad = sorted(v for v in s if not (0 <= v < g.n))
        if bad:
            violations.append(f"set {sorted(s)} has out-of-range vertices {bad}")
            continue
        if not g.is_connected_mask(to_mask(s)):
            violations.append(f"set {sorted(s)} is not connected")
    for a, b in combinations(t.sets, 2):
        if not a & b:
            violations.append(f"sets {sorted(a)} and {sorted(b)} are disjoint")
    return violations


def require_thicket(g, t):
    violations = validate_thicket(g, t)
    if violations:
        raise CertificateError("thicket", violations)


def hitting_size(g, t, node_budget=DEFAULT_NODE_BUDGET):
    require_thicket(g, t)
    return min_hitting_set(t.sets, g.n, node_budget).size


def thicket_number_exact(g, max_vertices=MAX_WIDTH_VERTICES, node_budget=DEFAULT_NODE_BUDGET,
                         upper_bound=None):
    """
    tau(G) with a maximizing thicket.

    tau(G) >= k exactly when every (k-1)-set X can be avoided by a member, and
    enlarging a member to its whole component of G - X keeps the family a
    thicket. So the search picks, for each X, one component of G - X with at
    least k vertices (a member is itself a transversal), all pairwise meeting.
    """
    if g.n > max_vertices:
        raise BudgetExceeded("vertex", max_vertices, f"thicket number of a {g.n}-vertex graph")
    limit = (g.n + 1) // 2
    if upper_bound is not None:
        limit = min(limit, upper_bound)
    best_k = 1
    best = [g.components_of_mask(g.full_mask)[0]]
    search = ComponentChoiceSearch(g, node_budget)
    for k in range(2, limit + 1):
        family = search.run(k)
        if family is None:
            break
        best_k, best = k, family
    return best_k, Thicket(tuple(from_mask(m) for m in best))


class ComponentChoiceSearch:
    def __init__(self, g, node_budget):
        self.g = g
        self.node_budget = node_budget
        self.nodes = 0

    def domains(self, k):
        domains = set()
        full = self.g.full_mask
        for combo in combinations(range(self.g.n), k - 1):
            rest = full & ~to_mask(combo)
            options = tuple(c for c in self.g.components_of_mask(rest) if c.bit_count() >= k)
            if not options:
                return None
            domains.add(options)
        return sorted(domains, key=lambda d: (len(d), d))

    def run(self, k):
        domains = self.domains(k)
        if domains is None:
            return None
        chosen = []
        if self.assign(domains, chosen):
            return sorted(set(chosen), key=mask_key)
        return None

    def assign(self, domains, chosen):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded("node", self.node_budget, "thicket search")
        open_domains = []
        for domain in domains:
            if any(c in chosen for c in domain):
                continue
            options = [c for c in domain if all(c & other for other in chosen)]
            if not options:
                return False
            open_domains.append(options)
        if not open_domains:
            return True
        target = min(open_domains, key=lambda d: (len(d), d))
        for c in target:
            chosen.append(c)
            if self.assign(open_domains, chosen):
                return True
            chosen.pop()
        return False


def minimize_thicket(g, t, node_budget=DEFAULT_NODE_BUDGET):
    """Drop members, in canonical order, whenever the hitting size stays the same."""
    target = hitting_size(g, t, node_budget)
    kept = list(t.sets)
    for s in list(kept):
        trial = [x for x in kept if x != s]
        if trial and min_hitting_set(trial, g.n, node_budget).size == target:
            kept = trial
    return Thicket(tuple(kept))


# --- decompositions ---

def _tree_violations(d):
    m = len(d.labels)
    if m == 0:
        return ["decomposition has no nodes"]
    violations = []
    seen = set()
    for link in d.links:
        if len(link) != 2:
            violations.append(f"link {link} is not a node pair")
            continue
        a, b = link
        if not (0 <= a < m and 0 <= b < m):
            violations.append(f"link {link} names a missing node")
            continue
        if a == b:
            violations.append(f"link {link} is a loop")
            continue
        key = (min(a, b), max(a, b))
        if key in seen:
            violations.append(f"duplicate link {key}")
        seen.add(key)
    if violations:
        return violations
    if len(seen) != m - 1:
        violations.append(f"{m} nodes need {m - 1} links, found {len(seen)}")
    reached = _tree_reach(d.tree_adjacency(), 0, set(range(m)))
    if len(reached) != m:
        violations.append("decomposition tree is disconnected")
    return violations


def _tree_reach(adjacency, start, allowed):
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for s in adjacency[t]:
            if s in allowed and s not in seen:
                seen.add(s)
                queue.append(s)
    return seen


def _decomposition_violations(g, d, strict):
    violations = _tree_violations(d)
    if violations:
        return violations
    for t, label in enumerate(d.labels):
        bad = sorted(v for v in label if not (0 <= v < g.n))
        if bad:
            violations.append(f"node {t} label has out-of-range vertices {bad}")
    adjacency = d.tree_adjacency()
    node_sets = d.node_sets(g.n)
    for v in g.vertices:
        nodes = node_sets[v]
        if not nodes:
            violations.append(f"vertex {v} appears in no label")
        elif len(_tree_reach(adjacency, min(nodes), nodes)) != len(nodes):
            violations.append(f"nodes containing vertex {v} are not connected")
    for u, v in g.sorted_edges():
        tu, tv = node_sets[u], node_sets[v]
        if tu & tv:
            continue
        if not strict and any(adjacency[a] & tv for a in tu):
            continue
        relation = "share a node" if strict else "share or neighbour a node"
        violations.append(f"edge ({u}, {v}): node sets do not {relation}")
    return violations


def validate_vine(g, d):
    return _decomposition_violations(g, d, strict=False)


def validate_tree_decomposition(g, d):
    return _decomposition_violations(g, d, strict=True)


def vinewidth_exact(g, max_vertices=MAX_WIDTH_VERTICES, node_budget=DEFAULT_NODE_BUDGET,
                    cross_check=True):
    """
    nu(G) with a minimum-width vine decomposition.

    Contracting nested neighbouring labels never widens a decomposition, so
    every node can be taken to introduce at least one vertex. The search then
    picks the introduced block B of a connected vertex set W whose outside
    neighbours are ancestors; the node label is B plus the ancestors adjacent
    to W - B, and each component of W - B hangs below as its own child.
    Children are ordered by lowest vertex and the root is node 0.
    """
    if g.n > max_vertices:
        raise BudgetExceeded("vertex", max_vertices, f"vinewidth of a {g.n}-vertex graph")
    search = VineSearch(g, node_budget)
    width, decomposition = search.run()
    if cross_check:
        tau, _ = thicket_number_exact(g, max_vertices, node_budget)
        if tau != width:
            raise InternalConsistencyError(f"thicket number {tau} differs from vinewidth {width}")
    return width, decomposition


class VineSearch:
    def __init__(self, g, node_budget):
        self.g = g
        self.nbr = g.neighbor_masks
        self.node_budget = node_budget
        self.memo = {}

    def boundary(self, w):
        around = 0
        for v in mask_members(w):
            around |= self.nbr[v]
        return around & ~w

    def label_of(self, w, block):
        rest = w & ~block
        label = block
        for u in mask_members(self.boundary(w)):
            if self.nbr[u] & rest:
                label |= 1 << u
        return label

    def solve(self, w):
        if w in self.memo:
            return self.memo[w][0]
        if len(self.memo) >= self.node_budget:
            raise BudgetExceeded("node", self.node_budget, "vinewidth search")
        ancestors = mask_members(self.boundary(w))
        best_width, best_block = w.bit_count() + len(ancestors) + 1, None
        block = w
        while block:
            rest = w & ~block
            own = block.bit_count() + sum(1 for u in ancestors if self.nbr[u] & rest)
            if own < best_width:
                width = own
                for component in self.g.components_of_mask(rest):
                    width = max(width, self.solve(component))
                    if width >= best_width:
                        break
                if width < best_width:
                    best_width, best_block = width, block
            block = (block - 1) & w
        self.memo[w] = (best_width, best_block)
        return best_width

    def run(self):
        roots = self.g.components_of_mask(self.g.full_mask)
        width = max(self.solve(c) for c in roots)
        labels, links = [], []
        for c in roots:
            self.build(c, 0 if labels else None, labels, links)
        return width, VineDecomposition(tuple(labels), tuple(links))

    def build(self, w, parent, labels, links):
        block = self.memo[w][1]
        node = len(labels)
        labels.append(from_mask(self.label_of(w, block)))
        if parent is not None:
            links.append((parent, node))
        for component in self.g.components_of_mask(w & ~block):
            self.build(component, node, labels, links)


def vine_to_tree(d, g=None):
    """Subdivide every link; the middle node carries the union of both end labels."""
    if g is not None:
        violations = validate_vine(g, d)
    else:
        violations = _tree_violations(d)
        if not violations:
            adjacency = d.tree_adjacency()
            n = max((max(l) for l in d.labels if l), default=-1) + 1
            for v, nodes in enumerate(d.node_sets(n)):
                if nodes and len(_tree_reach(adjacency, min(nodes), nodes)) != len(nodes):
                    violations.append(f"nodes containing vertex {v} are not connected")
    if violations:
        raise CertificateError("vine decomposition", violations)
    labels = list(d.labels)
    links = []
    m = len(labels)
    for k, (a, b) in enumerate(sorted((min(l), max(l)) for l in d.links)):
        middle = m + k
        labels.append(d.labels[a] | d.labels[b])
        links.extend([(a, middle), (middle, b)])
    return TreeDecomposition(tuple(labels), tuple(links))


def node_separator_check(g, d, t):
    """True iff no edge joins vertices hanging off different subtrees at node t, once V_t is removed."""
    adjacency = d.tree_adjacency()
    if not (0 <= t < len(d.labels)):
        raise InputError(f"node {t} does not exist")
    if len(adjacency[t]) < 2:
        raise InputError(f"node {t} is a leaf")
    separator = d.labels[t]
    others = set(range(len(d.labels))) - {t}
    parts = []
    for start in sorted(adjacency[t]):
        nodes = _tree_reach(adjacency, start, others)
        parts.append(set().union(*(d.labels[s] for s in nodes)) - separator)
    for i, j in combinations(range(len(parts)), 2):
        if any(g.adjacency[u] & parts[j] for u in parts[i]):
            return False
    return True


def internal_nodes(d):
    return [t for t, around in enumerate(d.tree_adjacency()) if len(around) >= 2]


def pad_labels(d):
    """
    Grow every label to the width of d. Nodes are visited breadth-first from
    node 0 and borrow lowest-index vertices from the parent first, then from
    the other neighbours by node index; passes repeat until all labels are full.
    """
    target = d.width
    adjacency = d.tree_adjacency()
    labels = [set(l) for l in d.labels]
    parent = {0: None}
    order = []
    queue = deque([0])
    while queue:
        t = queue.popleft()
        order.append(t)
        for s in sorted(adjacency[t]):
            if s not in parent:
                parent[s] = t
                queue.append(s)
    while any(len(l) < target for l in labels):
        progress = False
        for t in order:
            sources = [parent[t]] if parent[t] is not None else []
            sources += [s for s in sorted(adjacency[t]) if s != parent[t]]
            for s in sources:
                for v in sorted(labels[s] - labels[t]):
                    if len(labels[t]) >= target:
                        break
                    labels[t].add(v)
                    progress = True
        if not progress:
            raise InternalConsistencyError("label padding stalled")
    return VineDecomposition(tuple(frozenset(l) for l in labels), d.links)


# --- treewidth ---

def treewidth_ordering(g, max_vertices=MAX_TREEWIDTH_VERTICES):
    """
    Exact treewidth and an optimal elimination ordering by dynamic programming
    over the set S of vertices eliminated first: eliminating v after S costs
    the number of outside vertices reachable from v through S.
    """
    if g.n > max_vertices:
        raise BudgetExceeded("vertex", max_vertices, f"treewidth of a {g.n}-vertex graph")
    nbr = g.neighbor_masks
    size = 1 << g.n
    best = [0] * size
    last = [0] * size
    best[0] = -1
    for s in range(1, size):
        value = None
        for v in mask_members(s):
            bit = 1 << v
            before = s ^ bit
            reach = _reach_through(nbr, v, before)
            around = 0
            for u in mask_members(reach):
                around |= nbr[u]
            cost = max(best[before], (around & ~(before | bit)).bit_count())
            if value is None or cost < value:
                value, last[s] = cost, v
        best[s] = value
    order = []
    s = size - 1
    while s:
        order.append(last[s])
        s ^= 1 << last[s]
    order.reverse()
    return best[size - 1], order


def _reach_through(nbr, v, through):
    seen = 1 << v
    frontier = seen
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        new = nbr[low.bit_length() - 1] & through & ~seen
        seen |= new
        frontier |= new
    return seen


def treewidth_exact(g, max_vertices=MAX_TREEWIDTH_VERTICES):
    return treewidth_ordering(g, max_vertices)[0]


def elimination_decomposition(g, order):
    """Tree decomposition whose bags are each vertex with its later neighbours at elimination time."""
    if sorted(order) != list(g.vertices):
        raise InputError("elimination ordering must list every vertex once")
    graph = g.to_networkx()
    position = {v: i for i, v in enumerate(order)}
    bags = []
    for v in order:
        neighbours = set(graph[v])
        bags.append(frozenset(neighbours | {v}))
        for a, b in combinations(sorted(neighbours), 2):
            graph.add_edge(a, b)
        graph.remove_node(v)
    links = []
    for i, v in enumerate(order):
        later = bags[i] - {v}
        if later:
            links.append((i, min(position[u] for u in later)))
        elif i != len(order) - 1:
            links.append((i, len(order) - 1))
    return TreeDecomposition(tuple(bags), tuple(links))


# --- named certificates ---

def trivial_forest_vine(g):
    """Each vertex its own node; the tree is the forest itself with components chained to vertex 0."""
    forest = g.to_networkx()
    if not nx.is_forest(forest):
        raise InputError("trivial vine decomposition needs a forest")
    links = list(g.sorted_edges())
    for component in g.components_of_mask(g.full_mask)[1:]:
        links.append((0, (component & -component).bit_length() - 1))
    return VineDecomposition(tuple(frozenset({v}) for v in g.vertices), tuple(links))


def clique_vine(n):
    if n < 1:
        raise InputError("clique size must be positive")
    if n == 1:
        return VineDecomposition((frozenset({0}),))
    half = (n + 1) // 2
    return VineDecomposition((frozenset(range(half)), frozenset(range(half, n))), ((0, 1),))


def grid_column_vine(k):
    labels = tuple(grid_column(k, j) for j in range(k))
    return VineDecomposition(labels, tuple((j, j + 1) for j in range(k - 1)))


def pathpower_vine(n, r):
    """Consecutive blocks of r path positions on a path of nodes; width r."""
    path_power_graph(n, r)
    labels = tuple(frozenset(range(start, min(start + r, n))) for start in range(0, n, r))
    return VineDecomposition(labels, tuple((q, q + 1) for q in range(len(labels) - 1)))


def grid_cross_thicket(k):
    """Every row-plus-column cross of the k x k grid; hitting size k."""
    grid_graph(k)
    return Thicket(tuple(grid_row(k, i) | grid_column(k, j) for i in range(k) for j in range(k)))


def grid_rowcol_thicket(k):
    grid_graph(k)
    return Thicket(tuple(grid_row(k, i) | grid_column(k, i) for i in range(k)))


def clique_majority_thicket(n):
    """All subsets of K_n with more than half the vertices; hitting size ceil(n/2)."""
    if n < 1:
        raise InputError("clique size must be positive")
    return Thicket(tuple(frozenset(c) for c in combinations(range(n), n // 2 + 1)))


def pathpower_thicket(n, r):
    """
    Connected sets inside the first 3r positions that meet all three blocks of
    r positions and hold more than r/2 members in at least two of them.
    """
    if n < 3 * r:
        raise InputError(f"path-power thicket needs n >= 3r, got n={n}, r={r}")
    path_power_graph(n, r)
    host = path_power_graph(3 * r, r)
    blocks = [to_mask(range(b * r, (b + 1) * r)) for b in range(3)]
    sets = []
    for mask in connected_set_masks(host, 3, 3 * r):
        counts = [(mask & block).bit_count() for block in blocks]
        if all(counts) and sum(1 for c in counts if 2 * c > r) >= 2:
            sets.append(from_mask(mask))
    return Thicket(tuple(sets))
