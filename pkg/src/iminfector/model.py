"""The INFECTOR network: a shared embedding layer feeding two output heads.

Source embeddings O (one row per influencer) and target embeddings T (one
column per node) are trained by plain SGD on an alternating stream: each
influencer-context pair takes a softmax/NLL step, each influencer-size pair
takes a sigmoid/squared-loss step through the untrainable all-ones vector C.
Everything is float64; gradient tolerances depend on it.
"""

import struct
import time
from dataclasses import dataclass, field

import numpy as np

from .context import ContextPair
from .exceptions import CorruptFile, FormatVersionMismatch, NonFiniteUpdate

MAGIC = b"INFV1"


@dataclass
class ModelConfig:
    embed_dim: int = 50
    learning_rate: float = 0.1
    epochs: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        if self.embed_dim < 1:
            raise ValueError(f"embed_dim must be >= 1, got {self.embed_dim}")
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


@dataclass
class InfectorModel:
    O: np.ndarray  # I x E source embeddings
    T: np.ndarray  # E x N target embeddings
    b_t: np.ndarray  # N classification bias
    b_c: float  # regression bias
    C: np.ndarray  # E, all ones, never trained
    influencer_ids: list = None  # row u of O belongs to influencer_ids[u]
    node_ids: list = None  # column v of T belongs to node_ids[v]

    @property
    def n_influencers(self):
        return self.O.shape[0]

    @property
    def n_nodes(self):
        return self.T.shape[1]

    @property
    def embed_dim(self):
        return self.O.shape[1]


@dataclass
class TrainReport:
    """Per-epoch mean losses and wall times, filled in by train()."""

    classify_loss: list = field(default_factory=list)
    regress_loss: list = field(default_factory=list)
    epoch_seconds: list = field(default_factory=list)


def init_model(config, n_influencers, n_nodes, influencer_ids=None, node_ids=None):
    """Fresh model with O, T uniform in [-0.5/E, 0.5/E] and zero biases.

    The init generator is seeded with (rng_seed, 0) so its draws stay
    distinct from the per-epoch context streams seeded with rng_seed+epoch.
    """
    if n_influencers < 1 or n_nodes < 1:
        raise ValueError("model needs at least one influencer and one node")
    E = config.embed_dim
    rng = np.random.default_rng([config.rng_seed, 0])
    half = 0.5 / E
    O = rng.uniform(-half, half, size=(n_influencers, E))
    T = rng.uniform(-half, half, size=(E, n_nodes))
    return InfectorModel(
        O=O,
        T=T,
        b_t=np.zeros(n_nodes),
        b_c=0.0,
        C=np.ones(E),
        influencer_ids=influencer_ids,
        node_ids=node_ids,
    )


def forward_classify(model, u):
    """Softmax over all nodes for influencer row u, max-stabilized."""
    z = model.O[u] @ model.T + model.b_t
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def forward_regress(model, u):
    """Sigmoid of the O_u coordinate sum (O_u dot ones) plus bias."""
    z = float(model.O[u] @ model.C) + model.b_c
    if z >= 0.0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


def step_classify(model, pair, lr):
    """One SGD step on the classification head; returns the pre-update loss.

    The softmax/NLL gradient w.r.t. the logits collapses to phi - y, so the
    parameter gradients are T(phi - y) for O_u, the outer product
    O_u (phi - y)^T for T, and phi - y for b_t. Both matrix gradients use the
    pre-update O_u / T values (a single simultaneous step).
    """
    u, y = pair.influencer, pair.context
    phi = forward_classify(model, u)
    loss = -np.log(phi[y])
    g = phi.copy()
    g[y] -= 1.0
    grad_O_u = model.T @ g
    grad_T = np.outer(model.O[u], g)
    model.O[u] -= lr * grad_O_u
    model.T -= lr * grad_T
    model.b_t -= lr * g
    if not (
        np.isfinite(loss)
        and np.isfinite(model.O[u]).all()
        and np.isfinite(model.T).all()
        and np.isfinite(model.b_t).all()
    ):
        raise NonFiniteUpdate("classification step produced a non-finite value")
    return float(loss)


def step_regress(model, pair, lr):
    """One SGD step on the regression head; returns the pre-update loss.

    The gradient w.r.t. O_u is the scalar -2(y_c - phi_c) phi_c (1 - phi_c)
    broadcast across all E coordinates, because dz_c/dO_u = C = ones. T and
    C are untouched.
    """
    u, y_c = pair.influencer, pair.size_target
    phi_c = forward_regress(model, u)
    loss = (y_c - phi_c) ** 2
    g = -2.0 * (y_c - phi_c) * phi_c * (1.0 - phi_c)
    model.O[u] -= lr * g
    model.b_c -= lr * g
    if not (np.isfinite(loss) and np.isfinite(model.O[u]).all() and np.isfinite(model.b_c)):
        raise NonFiniteUpdate("regression step produced a non-finite value")
    return float(loss)


def train(model, stream_producer, config):
    """Alternating SGD over fresh streams, one per epoch.

    ``stream_producer(epoch)`` must return that epoch's list of training
    pairs (epoch counts from 0). The model is updated in place; the report
    carries mean losses per head and wall time for each epoch.
    """
    report = TrainReport()
    lr = config.learning_rate
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        stream = stream_producer(epoch)
        if not stream:
            raise ValueError(f"stream for epoch {epoch} is empty")
        classify_losses = []
        regress_losses = []
        for step, pair in enumerate(stream):
            try:
                if isinstance(pair, ContextPair):
                    classify_losses.append(step_classify(model, pair, lr))
                else:
                    regress_losses.append(step_regress(model, pair, lr))
            except NonFiniteUpdate as exc:
                raise NonFiniteUpdate(str(exc), epoch=epoch, step=step) from None
        report.classify_loss.append(
            float(np.mean(classify_losses)) if classify_losses else 0.0
        )
        report.regress_loss.append(
            float(np.mean(regress_losses)) if regress_losses else 0.0
        )
        report.epoch_seconds.append(time.perf_counter() - t0)
    return model, report


def _pack_ids(ids):
    chunks = []
    for s in ids:
        b = s.encode("utf-8")
        chunks.append(struct.pack("<I", len(b)))
        chunks.append(b)
    return b"".join(chunks)


def save_embeddings(model, path):
    """Write the INFV1 binary: magic, dims, O, T, b_t, b_c, then id tables.

    The id tables (length-prefixed UTF-8 strings, influencers then nodes)
    follow the fixed-layout prefix so downstream stages can name rows and
    columns without the original cascade file.
    """
    I, E = model.O.shape
    N = model.T.shape[1]
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<QQQ", E, I, N))
        fh.write(np.ascontiguousarray(model.O, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.T, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.b_t, dtype="<f8").tobytes())
        fh.write(struct.pack("<d", model.b_c))
        if model.influencer_ids is not None and model.node_ids is not None:
            fh.write(_pack_ids(model.influencer_ids))
            fh.write(_pack_ids(model.node_ids))


def _take(buf, offset, count, path):
    end = offset + count
    if end > len(buf):
        raise CorruptFile(f"{path}: truncated (needed {end} bytes, have {len(buf)})")
    return buf[offset:end], end


def _read_ids(buf, offset, count, path):
    ids = []
    for _ in range(count):
        raw, offset = _take(buf, offset, 4, path)
        (n,) = struct.unpack("<I", raw)
        raw, offset = _take(buf, offset, n, path)
        ids.append(raw.decode("utf-8"))
    return ids, offset


def load_embeddings(path):
    """Read an INFV1 file back into an InfectorModel (lossless round-trip)."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < len(MAGIC) or buf[: len(MAGIC)] != MAGIC:
        raise FormatVersionMismatch(f"{path}: not an INFV1 embedding file")
    offset = len(MAGIC)
    raw, offset = _take(buf, offset, 24, path)
    E, I, N = struct.unpack("<QQQ", raw)
    if E < 1 or I < 1 or N < 1:
        raise CorruptFile(f"{path}: bad dimensions E={E} I={I} N={N}")

    def matrix(rows, cols):
        nonlocal offset
        raw, offset_ = _take(buf, offset, rows * cols * 8, path)
        offset = offset_
        return np.frombuffer(raw, dtype="<f8").reshape(rows, cols).copy()

    O = matrix(I, E)
    T = matrix(E, N)
    b_t = matrix(1, N).reshape(N)
    raw, offset = _take(buf, offset, 8, path)
    (b_c,) = struct.unpack("<d", raw)
    influencer_ids = node_ids = None
    if offset < len(buf):
        influencer_ids, offset = _read_ids(buf, offset, I, path)
        node_ids, offset = _read_ids(buf, offset, N, path)
        if offset != len(buf):
            raise CorruptFile(f"{path}: {len(buf) - offset} trailing bytes")
    return InfectorModel(
        O=O,
        T=T,
        b_t=b_t,
        b_c=float(b_c),
        C=np.ones(E),
        influencer_ids=influencer_ids,
        node_ids=node_ids,
    )
