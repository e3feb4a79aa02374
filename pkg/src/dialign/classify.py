"""Linear one-vs-rest classifier trained by SGD on the hinge loss, and its metrics.

Features are either sparse term counts or a dense mean embedding. Rows are
L2-normalised before training and prediction. Each class gets its own
weight row; the L2 penalty shrinks all rows through a shared scale factor so
an update only touches the columns a sample actually uses.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import TrainingError
from .textprep.text import TokenizedDoc

UNDEFINED = "-"


@dataclass(frozen=True)
class FeatureVector:
    featurizer: str
    sparse: Mapping[str, float] | None = None
    dense: np.ndarray | None = None
    empty: bool = False

    @property
    def dim(self) -> int:
        return len(self.sparse) if self.sparse is not None else int(self.dense.shape[0])


def featurize_counts(doc) -> FeatureVector:
    tokens = doc.tokens if isinstance(doc, TokenizedDoc) else doc
    counts = Counter(tokens)
    return FeatureVector("counts", sparse=dict(counts), empty=not counts)


def featurize_embedding(doc, model) -> FeatureVector:
    """Mean of in-vocabulary vectors; zero vector with ``empty=True`` when none are known."""
    tokens = doc.tokens if isinstance(doc, TokenizedDoc) else doc
    rows = [model.index[t] for t in tokens if t in model.index]
    if not rows:
        return FeatureVector("embedding", dense=np.zeros(model.dim), empty=True)
    vec = model.vectors[rows].astype(np.float64).mean(axis=0)
    return FeatureVector("embedding", dense=vec)


@dataclass(frozen=True)
class SGDConfig:
    epochs: int = 5
    eta0: float = 0.1
    alpha: float = 1e-4
    normalize: bool = True

    def __post_init__(self):
        if self.epochs < 1 or self.eta0 <= 0 or self.alpha < 0:
            raise ValueError("invalid SGD configuration")


@dataclass
class LinearModel:
    classes: list[str]
    weights: np.ndarray  # (n_classes, dim)
    bias: np.ndarray
    featurizer: str
    features: list[str] | None = None  # column names for count features
    config: SGDConfig = field(default_factory=SGDConfig)

    def __post_init__(self):
        self._col = {f: i for i, f in enumerate(self.features)} if self.features is not None else None

    @property
    def dim(self) -> int:
        return int(self.weights.shape[1])

    def _row(self, fv: FeatureVector) -> tuple[np.ndarray, np.ndarray]:
        if fv.sparse is not None:
            pairs = sorted((self._col[f], float(v)) for f, v in fv.sparse.items() if f in self._col and v)
            idx = np.array([p[0] for p in pairs], dtype=np.int64)
            val = np.array([p[1] for p in pairs], dtype=np.float64)
        else:
            idx = np.arange(self.dim)
            val = np.asarray(fv.dense, dtype=np.float64)
        if self.config.normalize:
            norm = np.sqrt(val @ val)
            if norm > 0:
                val = val / norm
        return idx, val

    def decision_function(self, fv: FeatureVector) -> np.ndarray:
        idx, val = self._row(fv)
        return self.weights[:, idx] @ val + self.bias

    def predict(self, fv: FeatureVector) -> str:
        # argmax returns the first maximum, so ties go to the earliest class
        return self.classes[int(np.argmax(self.decision_function(fv)))]

    def predict_many(self, fvs: Iterable[FeatureVector]) -> list[str]:
        return [self.predict(fv) for fv in fvs]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("classes\t" + "\t".join(self.classes) + "\n")
            fh.write(f"dim\t{self.dim}\n")
            fh.write(f"featurizer\t{self.featurizer}\n")
            fh.write(f"config\t{self.config.epochs}\t{self.config.eta0!r}\t{self.config.alpha!r}\t{int(self.config.normalize)}\n")
            if self.features is not None:
                fh.write("features\t" + "\t".join(self.features) + "\n")
            fh.write("bias\t" + "\t".join(repr(float(b)) for b in self.bias) + "\n")
            for cls, row in zip(self.classes, self.weights):
                fh.write(f"w\t{cls}\t" + "\t".join(repr(float(x)) for x in row) + "\n")

    @classmethod
    def load(cls, path) -> "LinearModel":
        header: dict[str, list[str]] = {}
        rows = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip("\n").split("\t")
                if parts[0] == "w":
                    rows.append([float(x) for x in parts[2:]])
                else:
                    header[parts[0]] = parts[1:]
        epochs, eta0, alpha, norm = header["config"]
        config = SGDConfig(int(epochs), float(eta0), float(alpha), bool(int(norm)))
        weights = np.array(rows, dtype=np.float64).reshape(len(header["classes"]), int(header["dim"][0]))
        return cls(header["classes"], weights, np.array([float(b) for b in header["bias"]]),
                   header["featurizer"][0], header.get("features"), config)


def _as_feature(x) -> FeatureVector:
    if isinstance(x, FeatureVector):
        return x
    if isinstance(x, np.ndarray):
        return FeatureVector("embedding", dense=x)
    if isinstance(x, Mapping):
        return FeatureVector("counts", sparse=dict(x))
    return featurize_counts(x)


def train(examples: Sequence[tuple], config: SGDConfig | None = None, seed: int = 0) -> LinearModel:
    """One-vs-rest hinge-loss SGD with L2 penalty.

    ``examples`` are ``(features, label)`` pairs where features is a
    :class:`FeatureVector`, a count mapping, a dense array or a token sequence.
    Step size at update ``t`` (1-based, counted over all samples) is
    ``eta0 / (1 + (t - 1) / n)``, i.e. it decays as one over the epoch number.
    """
    config = config or SGDConfig()
    if not examples:
        raise TrainingError("empty training set")
    fvs = [_as_feature(x) for x, _ in examples]
    labels = [y for _, y in examples]
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise TrainingError("need at least two classes")
    kinds = {fv.featurizer for fv in fvs}
    if len(kinds) != 1:
        raise TrainingError("mixed featurizers in one training set")
    featurizer = kinds.pop()
    if featurizer == "counts":
        features = sorted({f for fv in fvs for f in fv.sparse})
        dim = len(features)
    else:
        features = None
        dim = int(fvs[0].dense.shape[0])
    if dim == 0:
        raise TrainingError("no features")
    model = LinearModel(classes, np.zeros((len(classes), dim)), np.zeros(len(classes)), featurizer, features, config)
    rows = [model._row(fv) for fv in fvs]
    cls_index = {c: i for i, c in enumerate(classes)}
    targets = np.full((len(examples), len(classes)), -1.0)
    for i, y in enumerate(labels):
        targets[i, cls_index[y]] = 1.0

    W = model.weights
    b = model.bias
    wscale = 1.0
    n = len(examples)
    rng = np.random.default_rng(seed)
    t = 0
    for _ in range(config.epochs):
        for i in rng.permutation(n):
            t += 1
            eta = config.eta0 / (1.0 + (t - 1) / n)
            idx, val = rows[i]
            y = targets[i]
            scores = wscale * (W[:, idx] @ val) + b
            wscale *= 1.0 - eta * config.alpha
            active = y * scores < 1.0
            if active.any():
                step = eta * y[active]
                W[np.ix_(active, idx)] += np.outer(step / wscale, val)
                b[active] += step
            if wscale < 1e-9:
                W *= wscale
                wscale = 1.0
    W *= wscale
    if not np.all(np.isfinite(W)):
        raise TrainingError("training diverged")
    return model


@dataclass(frozen=True)
class Metrics:
    classes: list[str]
    confusion: np.ndarray  # rows true, columns predicted
    precision: list
    recall: list
    f1: list
    support: list[int]
    macro_f1: float
    weighted_f1: float
    macro_precision: float
    macro_recall: float
    accuracy: float
    weighted_precision: float = 0.0
    weighted_recall: float = 0.0

    def per_class(self) -> dict[str, dict]:
        return {c: {"precision": p, "recall": r, "f1": f, "support": s}
                for c, p, r, f, s in zip(self.classes, self.precision, self.recall, self.f1, self.support)}

    def csv_rows(self) -> list[list[str]]:
        def fmt(x):
            return UNDEFINED if x is None else f"{x:.6f}"

        rows = [["class", "precision", "recall", "f1", "support"]]
        for c, p, r, f, s in zip(self.classes, self.precision, self.recall, self.f1, self.support):
            rows.append([c, fmt(p), fmt(r), fmt(f), str(s)])
        total = sum(self.support)
        rows.append(["accuracy", "", "", fmt(self.accuracy), str(total)])
        rows.append(["macro avg", fmt(self.macro_precision), fmt(self.macro_recall), fmt(self.macro_f1), str(total)])
        rows.append(["weighted avg", fmt(self.weighted_precision), fmt(self.weighted_recall), fmt(self.weighted_f1),
                     str(total)])
        return rows


def metrics_from_confusion(confusion, classes: Sequence[str]) -> Metrics:
    """Per-class and averaged scores from a confusion matrix (rows = truth).

    A class with no support and no predictions is undefined (``None``) and
    left out of the averages. Otherwise a zero denominator gives 0.
    """
    cm = np.asarray(confusion, dtype=np.int64)
    support = cm.sum(axis=1)
    predicted = cm.sum(axis=0)
    tp = np.diag(cm)
    prec, rec, f1 = [], [], []
    for i in range(len(classes)):
        if support[i] == 0 and predicted[i] == 0:
            prec.append(None), rec.append(None), f1.append(None)
            continue
        p = tp[i] / predicted[i] if predicted[i] else 0.0
        r = tp[i] / support[i] if support[i] else 0.0
        prec.append(float(p))
        rec.append(float(r))
        f1.append(float(2 * p * r / (p + r)) if p + r > 0 else 0.0)
    defined = [i for i in range(len(classes)) if f1[i] is not None]
    macro_f1 = math.fsum(f1[i] for i in defined) / len(defined) if defined else 0.0
    macro_p = math.fsum(prec[i] for i in defined) / len(defined) if defined else 0.0
    macro_r = math.fsum(rec[i] for i in defined) / len(defined) if defined else 0.0
    total = int(support.sum())

    def weighted_mean(values):
        return math.fsum(values[i] * int(support[i]) for i in defined) / total if total else 0.0

    weighted = weighted_mean(f1)
    accuracy = float(tp.sum() / total) if total else 0.0
    return Metrics(list(classes), cm, prec, rec, f1, [int(s) for s in support], macro_f1, weighted,
                   macro_p, macro_r, accuracy, weighted_mean(prec), weighted_mean(rec))


def confusion_matrix(y_true: Sequence[str], y_pred: Sequence[str], classes: Sequence[str]) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[index[t], index[p]] += 1
    return cm


def compute_metrics(y_true: Sequence[str], y_pred: Sequence[str], classes: Sequence[str] | None = None) -> Metrics:
    classes = sorted(set(y_true) | set(y_pred)) if classes is None else list(classes)
    return metrics_from_confusion(confusion_matrix(y_true, y_pred, classes), classes)


def evaluate(model: LinearModel, test: Sequence[tuple]) -> Metrics:
    if not test:
        raise ValueError("empty test set")
    fvs = [_as_feature(x) for x, _ in test]
    y_true = [y for _, y in test]
    classes = sorted(set(model.classes) | set(y_true))
    return compute_metrics(y_true, model.predict_many(fvs), classes)


def write_metrics_csv(metrics: Metrics, path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(metrics.csv_rows())


def top_features(model: LinearModel, cls: str, k: int = 10) -> list[tuple[str, float]]:
    """Highest-weight features for a class, ties broken by feature name."""
    if model.features is None:
        raise ValueError("top_features needs a count-featurized model")
    row = model.weights[model.classes.index(cls)]
    ranked = sorted(zip(model.features, row.tolist()), key=lambda fw: (-fw[1], fw[0]))
    return ranked[:k]
