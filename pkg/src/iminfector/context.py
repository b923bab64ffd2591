"""Turn train cascades into the interleaved multi-task training stream.

Each cascade contributes ceil(oversample * m) influencer-context pairs,
drawn with replacement from a distribution inversely proportional to the
copying time of each participant, followed by one influencer-size pair
whose target is the min-max normalized cascade length.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyCascade
from ._util import slack_ceil


@dataclass(frozen=True)
class ContextPair:
    """Classification pair: dense influencer index, dense context node index."""

    influencer: int
    context: int


@dataclass(frozen=True)
class SizePair:
    """Regression pair: dense influencer index, normalized size in [0, 1]."""

    influencer: int
    size_target: float


def sampling_distribution(cascade):
    """Probability of each event being drawn as a context node.

    P(v) is proportional to 1 / max(t_v - t_u, 1) where t_u is the cascade
    start time; delays under one tick are clamped to 1 so simultaneous
    reposts stay finite and keep the fast-copier ordering.
    """
    if not cascade.events:
        raise EmptyCascade(f"cascade started by {cascade.initiator} has no events")
    delays = np.array(
        [max(e.time - cascade.start_time, 1) for e in cascade.events], dtype=np.float64
    )
    weights = 1.0 / delays
    return weights / weights.sum()


def size_targets(train):
    """Min-max normalized cascade sizes, in corpus order.

    All-equal sizes carry no signal, so the degenerate case maps every
    cascade to 0.5 instead of raising.
    """
    sizes = np.array([c.size for c in train.cascades], dtype=np.float64)
    m_min, m_max = sizes.min(), sizes.max()
    if m_max == m_min:
        return np.full(len(sizes), 0.5)
    return (sizes - m_min) / (m_max - m_min)


def build_training_stream(train, oversample=1.2, rng_seed=0):
    """Materialize one epoch's training stream as a list of pairs.

    Stream order follows cascade input order; within a cascade all
    ContextPairs precede the single SizePair. Identical rng_seed values
    reproduce the identical stream.
    """
    if not train.cascades:
        raise ValueError("empty train corpus")
    rng = np.random.default_rng(rng_seed)
    targets = size_targets(train)
    stream = []
    for cascade, y_c in zip(train.cascades, targets):
        x = train.influencer_index[cascade.initiator]
        probs = sampling_distribution(cascade)
        node_idx = np.array(
            [train.node_index[e.node] for e in cascade.events], dtype=np.int64
        )
        n_draws = slack_ceil(oversample * cascade.size)
        draws = rng.choice(node_idx, size=n_draws, replace=True, p=probs)
        stream.extend(ContextPair(x, int(ctx)) for ctx in draws)
        stream.append(SizePair(x, float(y_c)))
    return stream


def dump_pairs(stream, path):
    """Write a stream as TSV: influencer, target, kind (C|S), value."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("influencer\ttarget\tkind\tvalue\n")
        for pair in stream:
            if isinstance(pair, ContextPair):
                fh.write(f"{pair.influencer}\t{pair.context}\tC\t1\n")
            else:
                fh.write(f"{pair.influencer}\t-\tS\t{pair.size_target!r}\n")
