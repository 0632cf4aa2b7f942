"""Label embeddings for domain names: CBOW with negative sampling.

Names are treated as sentences whose words are the labels, left-padded with
a reserved token so every sentence has the same length and the informative
right-hand labels land at fixed positions.  A small continuous-bag-of-words
model is trained by plain SGD: the context is the mean of the surrounding
input vectors, the center label is the positive target, and a handful of
negatives are drawn from the unigram distribution raised to 0.75 (padding
excluded from draws).  Updates apply the exact logistic-loss gradient, so
they can be checked against finite differences.

Training is single-threaded and sequential on purpose: for one seed the
result is bit-for-bit reproducible.
"""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .names import DomainName

PAD_TOKEN = "*"

_MATRIX_MAGIC = b"IOTNMVE1"


@dataclass(frozen=True)
class EmbeddingConfig:
    vector_dim: int = 32
    window: int = 3          # context labels taken each side of the center
    pad_to: int = 40
    pad_token: str = PAD_TOKEN
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    min_lr: float = 1e-4
    min_count: int = 1
    seed: int = 0


@dataclass
class Vocabulary:
    words: list[str]
    word_to_index: dict[str, int]
    counts: list[int]
    cumulative: np.ndarray  # unigram^0.75 cumulative weights over words[1:]


@dataclass
class EmbeddingModel:
    config: EmbeddingConfig
    vocab: Vocabulary
    input_vectors: np.ndarray   # (V, dim)
    output_vectors: np.ndarray  # (V, dim)
    epoch_losses: list[float] = field(default_factory=list)

    def vector(self, token: str) -> np.ndarray:
        """Input vector for a token; zeros when out of vocabulary."""
        idx = self.vocab.word_to_index.get(token)
        if idx is None:
            return np.zeros(self.config.vector_dim)
        return self.input_vectors[idx]


@dataclass(frozen=True)
class NameVector:
    name: DomainName
    matrix: np.ndarray  # (pad_to, dim)

    @property
    def flat(self) -> np.ndarray:
        return self.matrix.reshape(-1)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    exp_x = np.exp(x[~pos])
    out[~pos] = exp_x / (1.0 + exp_x)
    return out


def pad_name(labels, config: EmbeddingConfig) -> tuple[str, ...]:
    """Left-pad a label sequence to the configured length."""
    labels = tuple(labels)
    if len(labels) > config.pad_to:
        raise InputError(
            f"name has {len(labels)} labels, more than pad_to={config.pad_to}"
        )
    return (config.pad_token,) * (config.pad_to - len(labels)) + labels


def pad_names(names, config: EmbeddingConfig) -> list[tuple[str, ...]]:
    return [pad_name(name.labels, config) for name in names]


def build_vocab(sequences, config: EmbeddingConfig) -> Vocabulary:
    """Count tokens and fix the vocabulary and negative-sampling table.

    The padding token always takes index 0 and never appears as a negative.
    Other tokens enter in first-appearance order when their count reaches
    min_count; the sampling table weights counts by the 3/4 power.
    """
    counts: dict[str, int] = {config.pad_token: 0}
    for seq in sequences:
        for token in seq:
            counts[token] = counts.get(token, 0) + 1
    words = [config.pad_token]
    words += [
        w for w, c in counts.items()
        if w != config.pad_token and c >= config.min_count
    ]
    if len(words) < 2:
        raise InputError("corpus needs at least one non-padding label in vocabulary")
    word_to_index = {w: i for i, w in enumerate(words)}
    weights = np.array([counts[w] for w in words[1:]], dtype=float) ** 0.75
    return Vocabulary(
        words=words,
        word_to_index=word_to_index,
        counts=[counts[w] for w in words],
        cumulative=np.cumsum(weights),
    )


def cbow_step(w_in: np.ndarray, w_out: np.ndarray, context: np.ndarray,
              center: int, negatives: np.ndarray):
    """Loss and exact gradients for one CBOW/negative-sampling step.

    context holds vocabulary indices of the surrounding labels (duplicates
    allowed and meaningful), center the positive target.  Returns
    (loss, targets, grad_out, grad_context) where grad_out rows align with
    targets = [center, *negatives] and grad_context is the gradient for each
    context occurrence (the mean pulls in a 1/len(context) factor).
    """
    h = w_in[context].mean(axis=0)
    targets = np.concatenate(([center], negatives)).astype(int)
    scores = w_out[targets] @ h
    loss = float(np.logaddexp(0.0, -scores[0]) + np.logaddexp(0.0, scores[1:]).sum())
    residual = -sigmoid(scores)
    residual[0] += 1.0  # positive target keeps label 1, negatives 0
    grad_out = -residual[:, None] * h[None, :]
    grad_context = -(residual @ w_out[targets]) / len(context)
    return loss, targets, grad_out, grad_context


def _context_slices(length: int, window: int) -> list[np.ndarray]:
    out = []
    for t in range(length):
        lo = max(0, t - window)
        hi = min(length, t + window + 1)
        out.append(np.array([p for p in range(lo, hi) if p != t], dtype=int))
    return out


def train_cbow(sequences, config: EmbeddingConfig, probe=None) -> EmbeddingModel:
    """Train input/output vectors over padded label sequences.

    The learning rate decays linearly from initial_lr to min_lr across all
    epochs * positions steps.  `probe`, when given, is called before each
    update with (step, w_in, w_out, context, center, negatives, lr) so tests
    can verify individual gradients.
    """
    sequences = list(sequences)
    vocab = build_vocab(sequences, config)
    lookup = vocab.word_to_index
    indexed = []
    for seq in sequences:
        idx = [lookup[t] for t in seq if t in lookup]
        if len(idx) >= 2:
            indexed.append(np.array(idx, dtype=int))
    if not indexed:
        raise InputError("no trainable sequences (all shorter than two known labels)")
    positions_per_epoch = sum(len(s) for s in indexed)
    total_steps = positions_per_epoch * config.epochs
    rng = np.random.default_rng(config.seed)
    size = len(vocab.words)
    w_in = (rng.random((size, config.vector_dim)) - 0.5) / config.vector_dim
    w_out = np.zeros((size, config.vector_dim))
    context_cache: dict[int, list[np.ndarray]] = {}
    lr_span = config.initial_lr - config.min_lr
    step = 0
    epoch_losses = []
    for _ in range(config.epochs):
        epoch_loss = 0.0
        for seq in indexed:
            length = len(seq)
            if length not in context_cache:
                context_cache[length] = _context_slices(length, config.window)
            contexts = context_cache[length]
            draws = rng.random((length, config.negatives)) * vocab.cumulative[-1]
            negatives_all = 1 + np.searchsorted(vocab.cumulative, draws, side="right")
            for t in range(length):
                lr = max(config.min_lr, config.initial_lr - lr_span * step / total_steps)
                step += 1
                center = int(seq[t])
                context = seq[contexts[t]]
                negatives = negatives_all[t]
                negatives = negatives[negatives != center]
                if probe is not None:
                    probe(step - 1, w_in, w_out, context, center, negatives, lr)
                loss, targets, grad_out, grad_context = cbow_step(
                    w_in, w_out, context, center, negatives
                )
                epoch_loss += loss
                np.add.at(w_out, targets, -lr * grad_out)
                np.add.at(w_in, context, -lr * grad_context)
        epoch_losses.append(epoch_loss / positions_per_epoch)
    return EmbeddingModel(
        config=config,
        vocab=vocab,
        input_vectors=w_in,
        output_vectors=w_out,
        epoch_losses=epoch_losses,
    )


def vectorize(name: DomainName, model: EmbeddingModel) -> NameVector:
    """Map a name to its (pad_to, dim) matrix of label vectors.

    Row i is the input vector of the i-th padded label; out-of-vocabulary
    labels map to all-zero rows.
    """
    padded = pad_name(name.labels, model.config)
    matrix = np.empty((model.config.pad_to, model.config.vector_dim))
    for row, token in enumerate(padded):
        matrix[row] = model.vector(token)
    return NameVector(name=name, matrix=matrix)


def vectorize_names(names, model: EmbeddingModel) -> np.ndarray:
    """Stack flattened name vectors into an (n, pad_to*dim) matrix."""
    names = list(names)
    out = np.empty((len(names), model.config.pad_to * model.config.vector_dim))
    for i, name in enumerate(names):
        out[i] = vectorize(name, model).flat
    return out


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def save_model(model: EmbeddingModel, path) -> None:
    """Write the input vectors as text.

    First line: dim, window, pad_to, vocabulary size, seed.  Then one line
    per word: the token followed by dim floats at 17 significant digits
    (lossless for float64).  Output vectors are training state and are not
    persisted.
    """
    cfg = model.config
    lines = [f"{cfg.vector_dim} {cfg.window} {cfg.pad_to} {len(model.vocab.words)} {cfg.seed}"]
    for idx, word in enumerate(model.vocab.words):
        if any(ch in word for ch in "\r\n"):
            raise InputError(f"token {word!r} cannot be serialized (line break)")
        values = " ".join(f"{v:.17g}" for v in model.input_vectors[idx])
        lines.append(f"{word} {values}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path) -> EmbeddingModel:
    """Read a model written by save_model; output vectors come back zeroed."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"embedding model not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise InputError(f"{path}: empty embedding file")
    header = lines[0].split()
    if len(header) != 5:
        raise InputError(f"{path}: bad header {lines[0]!r}")
    dim, window, pad_to, vocab_size, seed = (int(v) for v in header)
    if len(lines) - 1 != vocab_size:
        raise InputError(f"{path}: header claims {vocab_size} words, found {len(lines) - 1}")
    words: list[str] = []
    vectors = np.empty((vocab_size, dim))
    for row, line in enumerate(lines[1:]):
        parts = line.split(" ")
        if len(parts) < dim + 1:
            raise InputError(f"{path}: malformed vector line {row + 2}")
        # Tokens may themselves contain spaces; floats are the last dim fields.
        words.append(" ".join(parts[:-dim]))
        vectors[row] = [float(v) for v in parts[-dim:]]
    if not words or words[0] != PAD_TOKEN:
        raise InputError(f"{path}: first vocabulary entry must be the padding token")
    config = EmbeddingConfig(vector_dim=dim, window=window, pad_to=pad_to, seed=seed)
    vocab = Vocabulary(
        words=words,
        word_to_index={w: i for i, w in enumerate(words)},
        counts=[0] * vocab_size,
        cumulative=np.ones(max(1, vocab_size - 1)).cumsum(),
    )
    return EmbeddingModel(
        config=config,
        vocab=vocab,
        input_vectors=vectors,
        output_vectors=np.zeros_like(vectors),
    )


def write_matrix(matrix: np.ndarray, path) -> None:
    """Binary feature matrix: magic, uint32 rows, uint32 cols, little-endian
    float64 values in row-major order."""
    matrix = np.ascontiguousarray(matrix, dtype="<f8")
    if matrix.ndim != 2:
        raise InputError(f"matrix must be 2-D, got shape {matrix.shape}")
    rows, cols = matrix.shape
    header = _MATRIX_MAGIC + np.array([rows, cols], dtype="<u4").tobytes()
    Path(path).write_bytes(header + matrix.tobytes())


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"matrix file not found: {path}")
    blob = path.read_bytes()
    if len(blob) < 16 or blob[:8] != _MATRIX_MAGIC:
        raise InputError(f"{path}: not a name-vector matrix file")
    rows, cols = np.frombuffer(blob, dtype="<u4", count=2, offset=8)
    expected = 16 + int(rows) * int(cols) * 8
    if len(blob) != expected:
        raise InputError(f"{path}: expected {expected} bytes, found {len(blob)}")
    values = np.frombuffer(blob, dtype="<f8", offset=16)
    return values.reshape(int(rows), int(cols)).copy()


def pad_token_count(model: EmbeddingModel) -> int:
    return model.vocab.counts[0] if model.vocab.counts else 0


def seeded_config(config: EmbeddingConfig, seed: int) -> EmbeddingConfig:
    """A copy of config with a different seed."""
    return dataclasses.replace(config, seed=seed)
