"""Held-out evaluation (distinct nodes influenced) and ranking baselines.

A seed's influence evidence is the set of participants in the test cascades
it initiated; the metric is the size of the union over the whole seed set,
so overlapping audiences are only counted once. Seeds never count
themselves. Baselines produce plain rankings whose top slice is evaluated
with the same metric.
"""

from dataclasses import dataclass, field


@dataclass
class EvaluationResult:
    seed_set_size: int
    dni: int
    per_seed_contribution: dict = field(default_factory=dict)  # seed id -> new nodes


@dataclass
class RankedBaseline:
    method: str
    ranking: list  # (node id, score), score non-increasing, ties id-ascending

    def top(self, size):
        return [node for node, _ in self.ranking[:size]]


def influenced_sets(test):
    """Map each test initiator to the union of its cascades' event nodes."""
    by_initiator = {}
    for c in test.cascades:
        by_initiator.setdefault(c.initiator, set()).update(c.event_nodes())
    return by_initiator


def dni(seeds, test):
    """Distinct nodes influenced by the seed set over the test corpus.

    Seeds are processed in order; each contributes whatever its test
    cascades add beyond nodes already claimed. Seeds without test cascades
    (and repeated seeds) contribute zero.
    """
    evidence = influenced_sets(test)
    union = set()
    contributions = {}
    for seed in seeds:
        if seed in contributions:
            continue
        added = evidence.get(seed, set()) - union
        union |= added
        contributions[seed] = len(added)
    return EvaluationResult(
        seed_set_size=len(seeds), dni=len(union), per_seed_contribution=contributions
    )


def _adjacency(edges):
    adj = {}
    for src, dst in edges:
        adj.setdefault(src, set()).add(dst)
        adj.setdefault(dst, set()).add(src)
    return adj


def core_numbers(edges):
    """Core number of every node of the undirected simple graph.

    Peeling: repeatedly remove a minimum-degree node; a node's core number
    is the largest minimum degree seen up to its removal. Quadratic in the
    node count, which is fine at the corpus sizes this package targets.
    """
    adj = _adjacency(edges)
    degree = {v: len(nbrs) for v, nbrs in adj.items()}
    remaining = set(adj)
    cores = {}
    level = 0
    while remaining:
        v = min(remaining, key=lambda u: (degree[u], u))
        level = max(level, degree[v])
        cores[v] = level
        remaining.discard(v)
        for w in adj[v]:
            if w in remaining:
                degree[w] -= 1
    return cores


def kcore_ranking(edges):
    """Rank nodes by core number descending, ties by id ascending."""
    if not edges:
        raise ValueError("empty edge list")
    cores = core_numbers(edges)
    ranking = sorted(cores.items(), key=lambda kv: (-kv[1], kv[0]))
    return RankedBaseline(method="kcore", ranking=ranking)


def avg_size_ranking(train):
    """Rank train initiators by mean cascade event count, descending."""
    totals = {}
    counts = {}
    for c in train.cascades:
        totals[c.initiator] = totals.get(c.initiator, 0) + c.size
        counts[c.initiator] = counts.get(c.initiator, 0) + 1
    scores = {u: totals[u] / counts[u] for u in totals}
    ranking = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return RankedBaseline(method="avgsize", ranking=ranking)
