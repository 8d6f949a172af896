"""Tree decompositions, treewidth, and bounded-variable query compilation.

Width is computed on the Gaifman graph (elements adjacent when they share a
tuple); a tuple's elements form a clique there, so every valid graph
decomposition covers every tuple and the two width notions coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EpqError, LimitExceeded, ParseError
from .formulas import Atom, Equality, Exists, conj

@dataclass(frozen=True)
class TreeDecomposition:
    """A tree over named nodes plus one non-empty bag of elements per node."""

    nodes: tuple
    edges: tuple
    bags: dict

    def width(self):
        return max(len(bag) for bag in self.bags.values()) - 1

    __hash__ = None


def gaifman_adjacency(a):
    """Adjacency sets of the Gaifman graph of a structure."""
    adj = {elem: set() for elem in a.universe}
    for sym in a.signature:
        for t in a.relations[sym.name]:
            distinct = set(t)
            for x in distinct:
                adj[x].update(distinct - {x})
    return adj


def _is_tree(nodes, edges):
    if not nodes:
        return False
    if len(edges) != len(nodes) - 1:
        return False
    neighbours = {n: set() for n in nodes}
    for x, y in edges:
        if x not in neighbours or y not in neighbours or x == y:
            return False
        neighbours[x].add(y)
        neighbours[y].add(x)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        for nxt in neighbours[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(nodes)


def validate_decomposition(a, d):
    """True iff tree-ness, per-element connectivity, and tuple coverage all hold.

    Elements appearing in no bag are tolerated as long as they occur in no
    tuple; bags must be non-empty subsets of the universe.
    """
    if len(set(d.nodes)) != len(d.nodes):
        return False
    if set(d.bags) != set(d.nodes):
        return False
    if not _is_tree(d.nodes, d.edges):
        return False
    members = set(a.universe)
    for bag in d.bags.values():
        if not bag or not set(bag) <= members:
            return False

    neighbours = {n: set() for n in d.nodes}
    for x, y in d.edges:
        neighbours[x].add(y)
        neighbours[y].add(x)
    occurrences = {}
    for node in d.nodes:
        for elem in d.bags[node]:
            occurrences.setdefault(elem, set()).add(node)
    for elem, nodes in occurrences.items():
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            for nxt in neighbours[stack.pop()]:
                if nxt in nodes and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if seen != nodes:
            return False

    for sym in a.signature:
        for t in a.relations[sym.name]:
            wanted = set(t)
            if not any(wanted <= d.bags[node] for node in d.nodes):
                return False
    return True


def _bits(mask):
    while mask:
        bit = mask & -mask
        yield bit.bit_length() - 1
        mask ^= bit


def _elimination_cost(adj_masks, through, v):
    # Vertices outside ``through``+{v} reachable from v via already-eliminated
    # vertices: the degree v would have when eliminated after ``through``.
    reach = 1 << v
    ext = adj_masks[v]
    frontier = adj_masks[v] & through
    while frontier:
        reach |= frontier
        step = 0
        for u in _bits(frontier):
            step |= adj_masks[u]
        ext |= step
        frontier = step & through & ~reach
    return (ext & ~(through | (1 << v))).bit_count()


def decomposition_from_order(a, order):
    """Tree decomposition induced by an elimination order over the universe."""
    adj = gaifman_adjacency(a)
    adj = {elem: set(neigh) for elem, neigh in adj.items()}
    position = {elem: i for i, elem in enumerate(order)}
    bags = []
    for elem in order:
        neigh = set(adj[elem])
        bags.append((elem, frozenset({elem} | neigh)))
        for u in neigh:
            adj[u].update(neigh - {u})
            adj[u].discard(elem)
        del adj[elem]

    node_ids = [f"t{i}" for i in range(len(order))]
    edges = []
    has_parent_link = []
    for i, (elem, bag) in enumerate(bags):
        rest = bag - {elem}
        if rest:
            j = min(position[u] for u in rest)
            edges.append((node_ids[i], node_ids[j]))
            has_parent_link.append(True)
        else:
            has_parent_link.append(False)
    # one component per connected piece of the graph; chain the loose ends
    loose = [node_ids[i] for i in range(len(bags)) if not has_parent_link[i]]
    for first, second in zip(loose, loose[1:]):
        edges.append((first, second))
    return TreeDecomposition(
        tuple(node_ids), tuple(edges), {node_ids[i]: bags[i][1] for i in range(len(bags))}
    )


def treewidth_exact(a, *, max_universe=20):
    """Optimal width plus a witnessing decomposition, by subset dynamic programming.

    States are sets of already-eliminated elements; the cost of eliminating v
    after a set is its forward degree through that set.  Exponential in the
    universe size, hence the guard.
    """
    n = len(a.universe)
    if n == 0:
        raise EpqError("treewidth needs a non-empty universe")
    if n > max_universe:
        raise LimitExceeded("exact treewidth universe size", max_universe)
    index = {elem: i for i, elem in enumerate(a.universe)}
    adj_masks = [0] * n
    for elem, neigh in gaifman_adjacency(a).items():
        for u in neigh:
            adj_masks[index[elem]] |= 1 << index[u]

    memo = {0: -1}

    def best(mask):
        cached = memo.get(mask)
        if cached is not None:
            return cached
        out = n
        for v in _bits(mask):
            rest = mask & ~(1 << v)
            out = min(out, max(best(rest), _elimination_cost(adj_masks, rest, v)))
        memo[mask] = out
        return out

    full = (1 << n) - 1
    width = best(full)

    order_rev = []
    mask = full
    while mask:
        pick = None
        pick_cost = None
        for v in _bits(mask):
            rest = mask & ~(1 << v)
            cost = max(best(rest), _elimination_cost(adj_masks, rest, v))
            if pick is None or cost < pick_cost:
                pick, pick_cost = v, cost
        order_rev.append(pick)
        mask &= ~(1 << pick)
    order = [a.universe[v] for v in reversed(order_rev)]
    witness = decomposition_from_order(a, order)
    return width, witness


def treewidth_upper(a):
    """Width and decomposition from the min-fill elimination heuristic."""
    adj = {elem: set(neigh) for elem, neigh in gaifman_adjacency(a).items()}
    position = {elem: i for i, elem in enumerate(a.universe)}
    order = []
    while adj:
        best_elem = None
        best_key = None
        for elem, neigh in adj.items():
            fill = 0
            ns = list(neigh)
            for i, u in enumerate(ns):
                for w in ns[i + 1 :]:
                    if w not in adj[u]:
                        fill += 1
            key = (fill, position[elem])
            if best_key is None or key < best_key:
                best_elem, best_key = elem, key
        neigh = adj[best_elem]
        for u in neigh:
            adj[u].update(neigh - {u})
            adj[u].discard(best_elem)
        del adj[best_elem]
        order.append(best_elem)
    witness = decomposition_from_order(a, order)
    return witness.width(), witness


def _rooted(d, root):
    neighbours = {n: [] for n in d.nodes}
    for x, y in d.edges:
        neighbours[x].append(y)
        neighbours[y].append(x)
    children = {n: [] for n in d.nodes}
    depth = {root: 0}
    preorder = {}
    stack = [(root, None)]
    counter = 0
    while stack:
        node, parent = stack.pop()
        preorder[node] = counter
        counter += 1
        for nxt in sorted(neighbours[node], reverse=True):
            if nxt != parent:
                children[node].append(nxt)
                depth[nxt] = depth[node] + 1
                stack.append((nxt, node))
    for node in children:
        children[node].sort()
    return children, depth, preorder


def _variable_pool(k):
    pad = len(str(k))
    return [f"x{str(i).zfill(pad)}" for i in range(1, k + 1)]


def pp_from_decomposition(a, d, k):
    """Primitive positive sentence over at most k variable names equivalent to
    the canonical query of ``a``.

    The decomposition is rooted at its least node and walked depth first; one
    variable name stays live per bag element, names freed when an element
    leaves scope are re-quantified (lexicographically first free name wins),
    and each tuple's atom is emitted at the shallowest bag covering it.
    """
    if not validate_decomposition(a, d):
        raise EpqError("decomposition is not valid for the structure")
    if d.width() >= k:
        raise EpqError(f"decomposition width {d.width()} is not below {k}")
    root = min(d.nodes)
    children, depth, preorder = _rooted(d, root)

    placed = {node: [] for node in d.nodes}
    for sym in a.signature:
        for t in sorted(a.relations[sym.name]):
            wanted = set(t)
            covering = [n for n in d.nodes if wanted <= d.bags[n]]
            home = min(covering, key=lambda n: (depth[n], preorder[n]))
            placed[home].append((sym.name, t))

    pool = _variable_pool(k)
    rank = {elem: i for i, elem in enumerate(a.universe)}

    def build(node, inherited):
        bag = d.bags[node]
        var_of = dict(inherited)
        new_elems = sorted((e for e in bag if e not in var_of), key=rank.__getitem__)
        free = [name for name in pool if name not in set(var_of.values())]
        new_vars = []
        for elem, name in zip(new_elems, free):
            var_of[elem] = name
            new_vars.append(name)
        parts = [
            Atom(sym, tuple(var_of[e] for e in t)) for sym, t in sorted(placed[node])
        ]
        for child in children[node]:
            passed = {e: var_of[e] for e in bag & d.bags[child]}
            parts.append(build(child, passed))
        if parts:
            body = conj(parts)
        else:
            anchor = next(iter(sorted(var_of.values())))
            body = Equality(anchor, anchor)
        out = body
        for name in reversed(new_vars):
            out = Exists(name, out)
        return out

    return build(root, {})


def decide_ppk(psi, k, *, signature=None, max_core=24, max_exact_tw=20, max_nodes=10_000_000):
    """Whether a primitive positive sentence can be written with k variables.

    Equivalent to the core of the sentence's induced structure having
    treewidth below k.
    """
    from .formulas import structure_of_pp
    from .homomorphism import core

    struct = structure_of_pp(psi, signature)
    small = core(struct, max_universe=max_core, max_nodes=max_nodes)
    width, _ = treewidth_exact(small, max_universe=max_exact_tw)
    return width < k


def parse_decomposition(text):
    """Parse the 'node ID e1 e2 ...' / 'edge ID ID' format."""
    nodes = []
    bags = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) < 3:
                raise ParseError("node line needs an id and at least one element", lineno)
            node = parts[1]
            if node in bags:
                raise ParseError(f"duplicate node id {node!r}", lineno)
            nodes.append(node)
            bags[node] = frozenset(parts[2:])
        elif parts[0] == "edge":
            if len(parts) != 3:
                raise ParseError("edge line needs exactly two node ids", lineno)
            edges.append((parts[1], parts[2]))
        else:
            raise ParseError(f"unexpected line starting with {parts[0]!r}", lineno)
    if not nodes:
        raise ParseError("decomposition text has no node lines", 1)
    for x, y in edges:
        if x not in bags or y not in bags:
            raise ParseError(f"edge references unknown node: {x} {y}", 1)
    return TreeDecomposition(tuple(nodes), tuple(edges), bags)


def format_decomposition(d):
    lines = [
        "node " + node + " " + " ".join(sorted(d.bags[node])) for node in sorted(d.nodes)
    ]
    lines += ["edge " + x + " " + y for x, y in sorted(tuple(sorted(e)) for e in d.edges)]
    return "\n".join(lines) + "\n"
