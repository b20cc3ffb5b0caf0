"""Shared test utilities: independent oracles and random-structure helpers.

The d-separation oracle enumerates every simple path between two nodes and
applies the blocking definition literally (chain/fork middles blocked when
conditioned, colliders blocked unless they or a descendant is conditioned).
It shares no code with the reachability implementation under test.
"""

import itertools

from causaluplift.graph import Dag


def enumerate_paths(dag, a, b):
    """All simple paths a..b as tuples of (middle_node, is_collider)."""
    nbrs = {
        v: sorted(dag.parents(v) | dag.children(v), key=dag.nodes.index)
        for v in dag.nodes
    }
    has_edge = set(dag.edges)
    paths = []

    def walk(node, visited, middles, arrived_into):
        for nxt in nbrs[node]:
            departs_out = (node, nxt) in has_edge
            new_middles = middles
            if arrived_into is not None:
                is_collider = arrived_into and not departs_out
                new_middles = middles + ((node, is_collider),)
            if nxt == b:
                paths.append(new_middles)
            elif nxt not in visited:
                walk(nxt, visited | {nxt}, new_middles, departs_out)

    walk(a, {a}, (), None)
    return paths


def path_blocked(middles, z, desc):
    for node, is_collider in middles:
        if is_collider:
            if node not in z and not (desc[node] & z):
                return True
        elif node in z:
            return True
    return False


def d_separated_oracle(dag, x, y, z, desc=None, path_cache=None):
    """Literal path-enumeration d-separation; independent of the package
    implementation."""
    z = set(z)
    if desc is None:
        desc = {v: dag.descendants(v) for v in dag.nodes}
    for a in x:
        for b in y:
            if path_cache is not None:
                key = (a, b) if a <= b else (b, a)
                if key not in path_cache:
                    path_cache[key] = enumerate_paths(dag, key[0], key[1])
                paths = path_cache[key]
            else:
                paths = enumerate_paths(dag, a, b)
            for middles in paths:
                if not path_blocked(middles, z, desc):
                    return False
    return True


def enumerate_all_dags(n_nodes):
    """Every labeled DAG on n_nodes, exactly once (as edge tuples)."""
    names = [f"V{i}" for i in range(n_nodes)]
    pairs = [(i, j) for i in range(n_nodes) for j in range(i + 1, n_nodes)]
    seen = set()
    out = []
    for perm in itertools.permutations(range(n_nodes)):
        for mask in range(1 << len(pairs)):
            edges = tuple(
                sorted(
                    (names[perm[i]], names[perm[j]])
                    for k, (i, j) in enumerate(pairs)
                    if mask >> k & 1
                )
            )
            if edges not in seen:
                seen.add(edges)
                out.append(Dag(names, edges))
    return out


def random_dag(rng, n_nodes, edge_prob=0.3, prefix="V"):
    names = [f"{prefix}{i}" for i in range(n_nodes)]
    order = rng.permutation(n_nodes)
    edges = []
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < edge_prob:
                edges.append((names[order[i]], names[order[j]]))
    return Dag(names, edges)


def random_setting_dag(rng, n_pre=6, edge_prob=0.3):
    """Random DAG obeying the pretreatment setting: T in PA(Y), Y childless,
    everything else a non-descendant of T and Y."""
    pre = [f"P{i}" for i in range(n_pre)]
    nodes = pre + ["T", "Y"]
    edges = []
    for i in range(n_pre):
        for j in range(i + 1, n_pre):
            if rng.random() < edge_prob:
                edges.append((pre[i], pre[j]))
    for p in pre:
        if rng.random() < 0.4:
            edges.append((p, "T"))
        if rng.random() < 0.4:
            edges.append((p, "Y"))
    edges.append(("T", "Y"))
    return Dag(nodes, edges)
