"""Parsing, validation, temporal splitting and statistics for cascade logs.

A cascade log is UTF-8 text, one cascade per line:

    <initiator>:<start_time> TAB <node>:<time> <node>:<time> ...

Ids match ``[^\\s:]+`` and times are non-negative integers. Lines starting
with ``#`` are comments. An edge list file is one ``src TAB dst`` per line.
"""

import re
from dataclasses import dataclass, field

from .exceptions import (
    DegenerateSplit,
    EmptyCascade,
    MalformedLine,
    TimeOrderViolation,
)
from ._util import slack_ceil

_ID_RE = re.compile(r"[^\s:]+\Z")
_TIME_RE = re.compile(r"[0-9]+\Z")


@dataclass(frozen=True)
class CascadeEvent:
    """One node reposting at an absolute time (not a delay)."""

    node: str
    time: int


@dataclass(frozen=True)
class Cascade:
    initiator: str
    start_time: int
    events: tuple  # tuple[CascadeEvent], sorted by time, initiator excluded

    @property
    def size(self):
        return len(self.events)

    def event_nodes(self):
        return {e.node for e in self.events}


def make_cascade(initiator, start_time, events, line_number=None):
    """Build a validated cascade from raw (node, time) event pairs.

    Events are sorted by time (stable), duplicate participants keep only
    their earliest occurrence, and the initiator is dropped from the event
    list (it is already infected at the start).
    """
    for node, time in events:
        if time < start_time:
            raise TimeOrderViolation(
                f"event {node}:{time} precedes start time {start_time}",
                line_number,
            )
    ordered = sorted(events, key=lambda nt: nt[1])
    seen = {initiator}
    cleaned = []
    for node, time in ordered:
        if node in seen:
            continue
        seen.add(node)
        cleaned.append(CascadeEvent(node, time))
    if not cleaned:
        raise EmptyCascade(
            f"cascade started by {initiator} has no events after validation",
            line_number,
        )
    return Cascade(initiator, start_time, tuple(cleaned))


@dataclass
class CascadeCorpus:
    """Cascades plus dense, gap-free index maps for nodes and influencers.

    Indices are assigned in sorted id order, so they are stable for a given
    id set regardless of line order. ``node_index`` covers every id seen
    anywhere (initiator or event); ``influencer_index`` covers initiators.
    """

    cascades: list
    node_index: dict = field(init=False)
    influencer_index: dict = field(init=False)

    def __post_init__(self):
        nodes = set()
        initiators = set()
        for c in self.cascades:
            nodes.add(c.initiator)
            initiators.add(c.initiator)
            nodes.update(e.node for e in c.events)
        self.node_index = {nid: i for i, nid in enumerate(sorted(nodes))}
        self.influencer_index = {nid: i for i, nid in enumerate(sorted(initiators))}

    @property
    def n_nodes(self):
        return len(self.node_index)

    @property
    def n_influencers(self):
        return len(self.influencer_index)

    def node_ids(self):
        return sorted(self.node_index, key=self.node_index.get)

    def influencer_ids(self):
        return sorted(self.influencer_index, key=self.influencer_index.get)


def _parse_token(token, line_number, what):
    parts = token.split(":")
    if len(parts) != 2:
        raise MalformedLine(f"bad {what} token {token!r}", line_number)
    node, time = parts
    if not _ID_RE.match(node):
        raise MalformedLine(f"bad node id {node!r}", line_number)
    if not _TIME_RE.match(time):
        raise MalformedLine(f"bad time {time!r} in {token!r}", line_number)
    return node, int(time)


def parse_cascades(lines):
    """Parse a cascade log into a corpus.

    ``lines`` is any iterable of strings (an open file works). Raises
    MalformedLine / TimeOrderViolation / EmptyCascade with the 1-based line
    number of the first offending line.
    """
    cascades = []
    for line_number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedLine(
                f"expected '<initiator> TAB <events>', got {len(fields)} field(s)",
                line_number,
            )
        initiator, start_time = _parse_token(fields[0], line_number, "initiator")
        tokens = fields[1].split()
        if not tokens:
            raise EmptyCascade(f"cascade started by {initiator} has no events", line_number)
        events = [_parse_token(t, line_number, "event") for t in tokens]
        cascades.append(make_cascade(initiator, start_time, events, line_number))
    return CascadeCorpus(cascades)


def serialize_cascades(corpus):
    """Render a corpus back to the one-cascade-per-line text format."""
    out = []
    for c in corpus.cascades:
        events = " ".join(f"{e.node}:{e.time}" for e in c.events)
        out.append(f"{c.initiator}:{c.start_time}\t{events}")
    return "\n".join(out) + "\n" if out else ""


def load_cascades(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_cascades(fh)


def save_cascades(corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_cascades(corpus))


def temporal_split(corpus, train_fraction):
    """Split a corpus into (train, test) by cascade start time.

    The earliest ceil(train_fraction * count) cascades form the train side;
    ties on start_time keep input order. Each side rebuilds its own indices.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0,1), got {train_fraction}")
    if not corpus.cascades:
        raise DegenerateSplit("empty corpus")
    ordered = sorted(corpus.cascades, key=lambda c: c.start_time)
    n_train = slack_ceil(train_fraction * len(ordered))
    if n_train == 0 or n_train == len(ordered):
        raise DegenerateSplit(
            f"{len(ordered)} cascades at fraction {train_fraction} would leave "
            "an empty train or test side"
        )
    return CascadeCorpus(ordered[:n_train]), CascadeCorpus(ordered[n_train:])


@dataclass
class InitiatorStats:
    """Training-side activity counts and test-side success measures."""

    cascades_started: int = 0
    cascades_participated: int = 0
    test_dni: int = 0
    test_total_size: int = 0
    test_count: int = 0


def initiator_stats(train, test):
    """Per-node activity/success record over a train/test corpus pair.

    Returns a dict keyed by node id covering every node seen in either
    corpus. Initiation and participation are counted disjointly; the test
    measures are the number of test cascades started, their cumulative size,
    and the distinct nodes appearing in them.
    """
    stats = {}

    def row(node):
        if node not in stats:
            stats[node] = InitiatorStats()
        return stats[node]

    for nid in train.node_index:
        row(nid)
    for nid in test.node_index:
        row(nid)

    for c in train.cascades:
        row(c.initiator).cascades_started += 1
        for e in c.events:
            row(e.node).cascades_participated += 1

    influenced = {}
    for c in test.cascades:
        r = row(c.initiator)
        r.test_count += 1
        r.test_total_size += c.size
        influenced.setdefault(c.initiator, set()).update(c.event_nodes())
    for node, nodes in influenced.items():
        stats[node].test_dni = len(nodes)
    return stats


def parse_edges(lines):
    """Parse an edge list; drops self-loops and collapses duplicate pairs."""
    edges = []
    seen = set()
    for line_number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedLine("expected '<src> TAB <dst>'", line_number)
        src, dst = fields
        if not _ID_RE.match(src) or not _ID_RE.match(dst):
            raise MalformedLine(f"bad node id in {line!r}", line_number)
        if src == dst:
            continue
        if (src, dst) in seen:
            continue
        seen.add((src, dst))
        edges.append((src, dst))
    return edges


def load_edges(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edges(fh)


def save_edges(edges, path):
    with open(path, "w", encoding="utf-8") as fh:
        for src, dst in edges:
            fh.write(f"{src}\t{dst}\n")


def derive_edges(corpus):
    """Initiator-to-participant edges implied by a corpus, deduplicated.

    Gives cascade-only datasets something to feed graph baselines.
    """
    edges = []
    seen = set()
    for c in corpus.cascades:
        for e in c.events:
            pair = (c.initiator, e.node)
            if pair in seen:
                continue
            seen.add(pair)
            edges.append(pair)
    return edges
