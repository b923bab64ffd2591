"""Diffusion-probability matrix: norm pruning and per-candidate budgets.

Candidates are the trained influencer rows, ranked by the Euclidean norm of
their source embedding. The top P percent are kept; each keeps a softmax
row over all nodes as its diffusion probabilities, and a budget lambda_u
proportional to its share of the total candidate norm.
"""

import math
import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import AllZeroNorms, CorruptFile, FormatVersionMismatch
from .model import forward_classify
from ._util import slack_ceil

MAGIC = b"DPM1"


@dataclass
class DiffusionMatrix:
    candidates: list  # original influencer row indices, pruned order
    candidate_ids: list  # id strings aligned with candidates
    probs: np.ndarray  # len(candidates) x N, each row a softmax distribution
    norms: np.ndarray  # Euclidean norm of O_u per candidate

    @property
    def n_candidates(self):
        return len(self.candidates)

    @property
    def n_nodes(self):
        return self.probs.shape[1]


@dataclass
class SpreadBudget:
    lambdas: np.ndarray  # positive ints, one per candidate


def build_matrix(model, prune_percent):
    """Keep the top ceil(P * I / 100) influencers by embedding norm.

    Order is norm descending, ties by id ascending (index ascending when the
    model carries no id table). Rows are forward_classify outputs, so they
    match the training-time softmax bit for bit.
    """
    if not 0.0 < prune_percent <= 100.0:
        raise ValueError(f"prune_percent must be in (0, 100], got {prune_percent}")
    I = model.n_influencers
    norms = np.linalg.norm(model.O, axis=1)
    if model.influencer_ids is not None:
        order = sorted(range(I), key=lambda u: (-norms[u], model.influencer_ids[u]))
    else:
        order = sorted(range(I), key=lambda u: (-norms[u], u))
    kept = order[: slack_ceil(prune_percent * I / 100.0)]
    if model.influencer_ids is not None:
        ids = [model.influencer_ids[u] for u in kept]
    else:
        ids = [str(u) for u in kept]
    probs = np.stack([forward_classify(model, u) for u in kept])
    return DiffusionMatrix(
        candidates=kept,
        candidate_ids=ids,
        probs=probs,
        norms=norms[kept].copy(),
    )


def compute_budgets(matrix, n_nodes):
    """lambda_u = ceil(N * norm_u / sum of candidate norms), clamped to >= 1.

    The denominator runs over the pruned candidate set. A zero-norm
    candidate would get ceil(0) = 0 and sit inert in the queue forever, so
    it is clamped to 1.
    """
    total = math.fsum(matrix.norms)
    if total == 0.0:
        raise AllZeroNorms("every candidate has a zero-norm embedding")
    lambdas = np.array(
        [max(1, slack_ceil(n_nodes * norm / total)) for norm in matrix.norms],
        dtype=np.int64,
    )
    return SpreadBudget(lambdas=lambdas)


def _pack_ids(ids):
    chunks = []
    for s in ids:
        b = s.encode("utf-8")
        chunks.append(struct.pack("<I", len(b)))
        chunks.append(b)
    return b"".join(chunks)


def save_matrix(matrix, budgets, path):
    """Write the DPM1 binary: magic, dims, candidate ids, norms, lambdas, rows."""
    n, N = matrix.probs.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<QQ", n, N))
        fh.write(_pack_ids(matrix.candidate_ids))
        fh.write(np.ascontiguousarray(matrix.norms, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(budgets.lambdas, dtype="<u8").tobytes())
        fh.write(np.ascontiguousarray(matrix.probs, dtype="<f8").tobytes())


def _take(buf, offset, count, path):
    end = offset + count
    if end > len(buf):
        raise CorruptFile(f"{path}: truncated (needed {end} bytes, have {len(buf)})")
    return buf[offset:end], end


def load_matrix(path):
    """Read a DPM1 file back into (DiffusionMatrix, SpreadBudget).

    Candidate indices are re-based to row positions; original model row
    numbers are not stored because downstream stages address candidates by
    id string.
    """
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < len(MAGIC) or buf[: len(MAGIC)] != MAGIC:
        raise FormatVersionMismatch(f"{path}: not a DPM1 diffusion-matrix file")
    offset = len(MAGIC)
    raw, offset = _take(buf, offset, 16, path)
    n, N = struct.unpack("<QQ", raw)
    if n < 1 or N < 1:
        raise CorruptFile(f"{path}: bad dimensions candidates={n} nodes={N}")
    ids = []
    for _ in range(n):
        raw, offset = _take(buf, offset, 4, path)
        (length,) = struct.unpack("<I", raw)
        raw, offset = _take(buf, offset, length, path)
        ids.append(raw.decode("utf-8"))
    raw, offset = _take(buf, offset, n * 8, path)
    norms = np.frombuffer(raw, dtype="<f8").copy()
    raw, offset = _take(buf, offset, n * 8, path)
    lambdas = np.frombuffer(raw, dtype="<u8").astype(np.int64)
    raw, offset = _take(buf, offset, n * N * 8, path)
    probs = np.frombuffer(raw, dtype="<f8").reshape(n, N).copy()
    if offset != len(buf):
        raise CorruptFile(f"{path}: {len(buf) - offset} trailing bytes")
    matrix = DiffusionMatrix(
        candidates=list(range(n)), candidate_ids=ids, probs=probs, norms=norms
    )
    return matrix, SpreadBudget(lambdas=lambdas)
