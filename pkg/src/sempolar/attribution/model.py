"""Small differentiable source classifier over mean-pooled token vectors.

One hidden tanh layer and a logistic output; exact analytic gradients
with respect to every input token vector, which is what the integrated
gradients pass needs.  Training is full-batch gradient descent with a
fixed step and early stopping on validation loss, deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sempolar.errors import InputError, SempolarError
from sempolar.ingest.turns import SpeakerTurn
from sempolar.keywords import tokenize
from sempolar.store import EmbeddingProvider


def _sigmoid(z: np.ndarray | float):
    return 1.0 / (1.0 + np.exp(-z))


class ReferenceClassifier:
    """P(class a | turn) = sigmoid(w2 . tanh(W1^T xbar + b1) + b2)."""

    def __init__(self, w1: np.ndarray, b1: np.ndarray, w2: np.ndarray, b2: float):
        self.w1 = np.asarray(w1, dtype=np.float64)  # (d, h)
        self.b1 = np.asarray(b1, dtype=np.float64)  # (h,)
        self.w2 = np.asarray(w2, dtype=np.float64)  # (h,)
        self.b2 = float(b2)
        if not (
            np.all(np.isfinite(self.w1))
            and np.all(np.isfinite(self.b1))
            and np.all(np.isfinite(self.w2))
            and np.isfinite(self.b2)
        ):
            raise InputError("classifier parameters must be finite")

    @property
    def dimension(self) -> int:
        return self.w1.shape[0]

    def score_mean(self, xbar: np.ndarray) -> float:
        """Pre-sigmoid score of a pooled feature vector."""
        return float(np.tanh(xbar @ self.w1 + self.b1) @ self.w2 + self.b2)

    def forward(self, tokens: np.ndarray) -> float:
        """P(class a) for a (T, d) token matrix (or a single d-vector)."""
        tokens = np.atleast_2d(np.asarray(tokens, dtype=np.float64))
        return float(_sigmoid(self.score_mean(tokens.mean(axis=0))))

    def gradient(self, tokens: np.ndarray) -> np.ndarray:
        """dP/dtokens, same shape as ``tokens``; exact backprop."""
        arr = np.atleast_2d(np.asarray(tokens, dtype=np.float64))
        t = arr.shape[0]
        xbar = arr.mean(axis=0)
        a = np.tanh(xbar @ self.w1 + self.b1)
        p = _sigmoid(a @ self.w2 + self.b2)
        grad_xbar = self.w1 @ (self.w2 * (1.0 - a * a)) * (p * (1.0 - p))
        grad = np.tile(grad_xbar / t, (t, 1))
        return grad.reshape(np.shape(tokens))

    def predict(self, tokens: np.ndarray) -> int:
        """1 for class a, 0 for class b."""
        return int(self.forward(tokens) >= 0.5)

    def flipped(self) -> "FlippedClassifier":
        """Class roles swapped: P'(a) = 1 - P(a), gradients negated exactly."""
        return FlippedClassifier(self)


class FlippedClassifier:
    """View of a classifier with the class labels interchanged.

    Delegation (rather than negating the weights) keeps score negation
    bitwise exact, so flipped attribution reports mirror sign-perfectly.
    """

    def __init__(self, base: ReferenceClassifier):
        self.base = base

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def forward(self, tokens: np.ndarray) -> float:
        return 1.0 - self.base.forward(tokens)

    def gradient(self, tokens: np.ndarray) -> np.ndarray:
        return -self.base.gradient(tokens)

    def predict(self, tokens: np.ndarray) -> int:
        return int(self.forward(tokens) >= 0.5)

    def flipped(self) -> ReferenceClassifier:
        return self.base


@dataclass(frozen=True)
class TrainMetrics:
    accuracy: float
    f1: float
    precision: float
    recall: float
    epochs: int
    train_loss: float
    val_loss: float
    n_train: int
    n_val: int
    n_test: int


def turn_token_matrix(turn: SpeakerTurn, provider: EmbeddingProvider) -> np.ndarray:
    """(T, d) matrix of per-token context vectors for one turn."""
    tokens = tokenize(turn.text)
    if not tokens:
        raise InputError(f"turn {turn.turn_id!r} has no tokens")
    return np.stack([provider.embed(turn.text, i) for i in range(len(tokens))])


def _split_indices(n: int, split: tuple[float, float, float], rng: np.random.Generator):
    idx = rng.permutation(n)
    n_train = int(n * split[0])
    n_val = int(n * split[1])
    return idx[:n_train], idx[n_train : n_train + n_val], idx[n_train + n_val :]


def train_classifier(
    turns_a: list[SpeakerTurn],
    turns_b: list[SpeakerTurn],
    provider: EmbeddingProvider,
    *,
    split: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
    hidden: int = 16,
    learning_rate: float = 0.5,
    max_epochs: int = 2000,
    patience: int = 50,
    min_per_class: int = 50,
) -> tuple[ReferenceClassifier, TrainMetrics]:
    """Train the reference classifier on two turn corpora.

    Class a is labeled 1, class b is 0.  The 80/10/10 split is applied
    per class so every subset stays balanced; early stopping restores the
    parameters with the best validation loss.
    """
    if len(turns_a) < min_per_class or len(turns_b) < min_per_class:
        raise InputError(
            f"need at least {min_per_class} turns per class, got {len(turns_a)} and {len(turns_b)}"
        )
    ratio = max(len(turns_a), len(turns_b)) / min(len(turns_a), len(turns_b))
    if ratio > 9.0:
        raise InputError(
            f"class imbalance {ratio:.1f}:1 exceeds 9:1; resample the larger class before training"
        )
    if abs(sum(split) - 1.0) > 1e-9:
        raise InputError(f"split fractions must sum to 1, got {split}")

    feats_a = np.stack([turn_token_matrix(t, provider).mean(axis=0) for t in turns_a])
    feats_b = np.stack([turn_token_matrix(t, provider).mean(axis=0) for t in turns_b])
    d = feats_a.shape[1]

    rng = np.random.default_rng(seed)
    tr_a, va_a, te_a = _split_indices(len(turns_a), split, rng)
    tr_b, va_b, te_b = _split_indices(len(turns_b), split, rng)

    def assemble(ia, ib):
        X = np.concatenate([feats_a[ia], feats_b[ib]])
        y = np.concatenate([np.ones(len(ia)), np.zeros(len(ib))])
        return X, y

    X_tr, y_tr = assemble(tr_a, tr_b)
    X_va, y_va = assemble(va_a, va_b)
    X_te, y_te = assemble(te_a, te_b)

    w1 = rng.standard_normal((d, hidden)) / np.sqrt(d)
    b1 = np.zeros(hidden)
    w2 = rng.standard_normal(hidden) / np.sqrt(hidden)
    b2 = 0.0

    def loss_of(X, y, w1, b1, w2, b2) -> float:
        p = _sigmoid(np.tanh(X @ w1 + b1) @ w2 + b2)
        eps = 1e-12
        return float(-np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))

    best = (w1.copy(), b1.copy(), w2.copy(), b2)
    best_val = loss_of(X_va, y_va, *best)
    best_epoch = 0
    stale = 0
    epochs_run = 0
    n = X_tr.shape[0]
    for epoch in range(1, max_epochs + 1):
        z = X_tr @ w1 + b1
        a = np.tanh(z)
        p = _sigmoid(a @ w2 + b2)
        err = (p - y_tr) / n  # dL/dscore
        grad_w2 = a.T @ err
        grad_b2 = float(err.sum())
        da = np.outer(err, w2) * (1.0 - a * a)
        grad_w1 = X_tr.T @ da
        grad_b1 = da.sum(axis=0)

        w1 = w1 - learning_rate * grad_w1
        b1 = b1 - learning_rate * grad_b1
        w2 = w2 - learning_rate * grad_w2
        b2 = b2 - learning_rate * grad_b2
        epochs_run = epoch

        train_loss = loss_of(X_tr, y_tr, w1, b1, w2, b2)
        if not np.isfinite(train_loss):
            raise SempolarError(f"training diverged: non-finite loss at epoch {epoch}")
        val_loss = loss_of(X_va, y_va, w1, b1, w2, b2)
        if val_loss < best_val - 1e-12:
            best = (w1.copy(), b1.copy(), w2.copy(), b2)
            best_val = val_loss
            best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break

    model = ReferenceClassifier(*best)
    p_te = _sigmoid(np.tanh(X_te @ model.w1 + model.b1) @ model.w2 + model.b2)
    pred = (p_te >= 0.5).astype(float)
    tp = float(np.sum((pred == 1) & (y_te == 1)))
    fp = float(np.sum((pred == 1) & (y_te == 0)))
    fn = float(np.sum((pred == 0) & (y_te == 1)))
    accuracy = float(np.mean(pred == y_te)) if len(y_te) else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    metrics = TrainMetrics(
        accuracy=accuracy,
        f1=f1,
        precision=precision,
        recall=recall,
        epochs=best_epoch or epochs_run,
        train_loss=loss_of(X_tr, y_tr, *best),
        val_loss=best_val,
        n_train=X_tr.shape[0],
        n_val=X_va.shape[0],
        n_test=X_te.shape[0],
    )
    return model, metrics
