"""Log-linear candidate reranking with a human feedback loop.

Each candidate formula for a question gets a feature vector; a linear model
turns the candidates into a softmax distribution per question. Training
maximizes the average log-probability mass the model puts on reference
candidates. References come from human marks where marks exist and from
answer matching elsewhere; the two groups contribute separate averages so
marked questions keep their weight as the corpus grows. Optional L1
shrinkage, full-batch AdaGrad steps.
"""
from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evaluator import Denotation
from .formula import Formula, NODE_KINDS, decompose, subformulas
from .provenance import mentioned_columns
from .table import Table

MODEL_VERSION = 1

_WORD_RE = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> set[str]:
    return set(_WORD_RE.findall(text.casefold()))


def formula_depth(f: Formula) -> int:
    """Nesting depth counted over subquery structure; atoms have depth 1."""
    children = decompose(f)
    if not children:
        return 1
    return 1 + max(formula_depth(c) for c in children)


_SIZE_BUCKETS = ("0", "1", "2to5", "over5")
_RESULT_KINDS = ("records", "values", "scalar")

FEATURE_NAMES = tuple(
    [f"kind:{k}" for k in NODE_KINDS]
    + ["depth", "column_overlap", "literal_hits"]
    + [f"type:{k}" for k in _RESULT_KINDS]
    + [f"size:{b}" for b in _SIZE_BUCKETS]
)

N_FEATURES = len(FEATURE_NAMES)


def _result_size(result: Denotation) -> int:
    if result.kind == "records":
        return len(result.records)
    if result.kind == "values":
        return len(result.values)
    return 1


def _size_bucket(size: int) -> str:
    if size == 0:
        return "0"
    if size == 1:
        return "1"
    if size <= 5:
        return "2to5"
    return "over5"


def _literal_renderings(f: Formula) -> list[str]:
    out = []
    for g in subformulas(f):
        for name in ("value", "bound", "left", "right"):
            v = getattr(g, name, None)
            if hasattr(v, "render"):
                out.append(v.render())
    return out


def featurize(
    question: str,
    formula: Formula,
    table: Table,
    result: Denotation | None,
) -> np.ndarray:
    """Fixed-width feature vector for one candidate.

    A failed evaluation (result None) zeroes the result-type and size
    blocks; the structural features still rank it.
    """
    del table  # column structure enters via the formula's mentions
    x = np.zeros(N_FEATURES)
    counts: dict[str, int] = {}
    for g in subformulas(formula):
        counts[g.kind] = counts.get(g.kind, 0) + 1
    for i, kind in enumerate(NODE_KINDS):
        x[i] = counts.get(kind, 0)
    base = len(NODE_KINDS)
    x[base] = formula_depth(formula)
    q_tokens = _tokens(question)
    col_tokens: set[str] = set()
    for column in mentioned_columns(formula):
        col_tokens |= _tokens(column)
    x[base + 1] = len(q_tokens & col_tokens)
    q_fold = question.casefold()
    x[base + 2] = sum(
        1 for lit in _literal_renderings(formula) if lit.casefold() in q_fold
    )
    if result is not None:
        x[base + 3 + _RESULT_KINDS.index(result.kind)] = 1.0
        bucket = _size_bucket(_result_size(result))
        x[base + 6 + _SIZE_BUCKETS.index(bucket)] = 1.0
    return x


def result_equals(result: Denotation | None, gold: list[str]) -> bool:
    """Does a denotation match a gold answer given as strings?

    Values and scalars compare by canonical rendering, case-insensitively
    and ignoring order. Record sets never match a textual answer.
    """
    if result is None or result.kind == "records":
        return False
    want = {g.strip().casefold() for g in gold}
    if result.kind == "scalar":
        got = {result.scalar.render().casefold()}
    else:
        got = {v.render().casefold() for v in result.values}
    return got == want


# ---------------------------------------------------------------------------
# Objective and gradient


@dataclass(frozen=True)
class Instance:
    """One question's candidates: a feature matrix plus reference flags."""

    features: np.ndarray  # (k, d)
    reference: np.ndarray  # (k,) bool
    annotated: bool = False

    def __post_init__(self) -> None:
        if self.features.ndim != 2:
            raise ValueError("features must be a (candidates, dims) matrix")
        if self.reference.shape != (self.features.shape[0],):
            raise ValueError("one reference flag per candidate required")
        if not self.reference.any():
            raise ValueError("instance needs at least one reference candidate")


def _logsumexp(scores: np.ndarray) -> float:
    m = float(np.max(scores))
    return m + float(np.log(np.sum(np.exp(scores - m))))


def candidate_distribution(
    theta: np.ndarray, features: np.ndarray
) -> np.ndarray:
    """Softmax over candidate scores."""
    scores = features @ theta
    scores = scores - np.max(scores)
    e = np.exp(scores)
    return e / np.sum(e)


def log_reference_likelihood(theta: np.ndarray, inst: Instance) -> float:
    """log of the probability mass on the instance's reference candidates."""
    scores = inst.features @ theta
    return _logsumexp(scores[inst.reference]) - _logsumexp(scores)


def _instance_gradient(theta: np.ndarray, inst: Instance) -> np.ndarray:
    p = candidate_distribution(theta, inst.features)
    p_ref = p[inst.reference]
    p_ref = p_ref / np.sum(p_ref)
    mean_ref = p_ref @ inst.features[inst.reference]
    mean_all = p @ inst.features
    return mean_ref - mean_all


def _group_means(values: list, dims: int | None = None):
    if not values:
        return 0.0 if dims is None else np.zeros(dims)
    if dims is None:
        return float(np.mean(values))
    return np.mean(values, axis=0)


def objective(
    theta: np.ndarray, instances: list[Instance], l1: float = 0.0
) -> float:
    """Mean reference log-likelihood, marked and unmarked groups averaged
    separately, minus the L1 penalty."""
    ann = [log_reference_likelihood(theta, i) for i in instances if i.annotated]
    ans = [
        log_reference_likelihood(theta, i)
        for i in instances
        if not i.annotated
    ]
    return (
        _group_means(ann)
        + _group_means(ans)
        - l1 * float(np.sum(np.abs(theta)))
    )


def objective_gradient(
    theta: np.ndarray, instances: list[Instance], l1: float = 0.0
) -> np.ndarray:
    ann = [_instance_gradient(theta, i) for i in instances if i.annotated]
    ans = [_instance_gradient(theta, i) for i in instances if not i.annotated]
    d = theta.shape[0]
    return (
        _group_means(ann, d)
        + _group_means(ans, d)
        - l1 * np.sign(theta)
    )


# ---------------------------------------------------------------------------
# Training


@dataclass(frozen=True)
class Hyperparams:
    epochs: int = 20
    learning_rate: float = 0.1
    l1: float = 0.0
    adagrad_init: float = 1e-8

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "l1": self.l1,
            "adagrad_init": self.adagrad_init,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparams":
        return cls(**d)


@dataclass
class TrainResult:
    theta: np.ndarray
    accumulators: np.ndarray
    # objective before training, then after each epoch
    history: list[float] = field(default_factory=list)


def train(
    instances: list[Instance],
    hyper: Hyperparams | None = None,
    theta0: np.ndarray | None = None,
    accum0: np.ndarray | None = None,
) -> TrainResult:
    """Full-batch AdaGrad ascent on the reranking objective."""
    hyper = hyper or Hyperparams()
    if not instances:
        raise ValueError("cannot train on zero instances")
    d = instances[0].features.shape[1]
    theta = np.zeros(d) if theta0 is None else theta0.astype(float).copy()
    accum = (
        np.full(d, hyper.adagrad_init)
        if accum0 is None
        else accum0.astype(float).copy()
    )
    history = [objective(theta, instances, hyper.l1)]
    for _ in range(hyper.epochs):
        g = objective_gradient(theta, instances, hyper.l1)
        accum += g * g
        theta += hyper.learning_rate * g / np.sqrt(accum)
        history.append(objective(theta, instances, hyper.l1))
    return TrainResult(theta=theta, accumulators=accum, history=history)


# ---------------------------------------------------------------------------
# Ranking and metrics


def rank_candidates(theta: np.ndarray, features: np.ndarray) -> list[int]:
    """Candidate positions ordered by score, ties kept in input order."""
    scores = features @ theta
    return [int(i) for i in np.argsort(-scores, kind="stable")]


@dataclass(frozen=True)
class EvalMetrics:
    correctness: float
    mrr: float
    n: int

    def to_dict(self) -> dict:
        return {"correctness": self.correctness, "mrr": self.mrr, "n": self.n}


def evaluate_ranking(
    theta: np.ndarray, instances: list[Instance]
) -> EvalMetrics:
    """Top-1 accuracy and mean reciprocal rank of the first reference."""
    if not instances:
        return EvalMetrics(correctness=0.0, mrr=0.0, n=0)
    hits = 0
    rr = 0.0
    for inst in instances:
        order = rank_candidates(theta, inst.features)
        if inst.reference[order[0]]:
            hits += 1
        for rank, pos in enumerate(order, start=1):
            if inst.reference[pos]:
                rr += 1.0 / rank
                break
    n = len(instances)
    return EvalMetrics(correctness=hits / n, mrr=rr / n, n=n)


def hybrid_choice(ranking: list[int], marked: frozenset[int] | set[int]) -> int:
    """Final pick: the model's best human-marked candidate, or its top one
    when nothing is marked."""
    for pos in ranking:
        if pos in marked:
            return pos
    return ranking[0]


def synthetic_instances(
    seed: int,
    n_questions: int = 50,
    n_candidates: int = 7,
    dims: int = 10,
    shift: float = 1.5,
) -> list[Instance]:
    """Sanity-check corpus: noise features with one planted winner each.

    A hidden direction separates the reference candidate from the rest by
    ``shift``, so a working trainer must beat the untrained ranking.
    """
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=dims)
    direction /= np.linalg.norm(direction)
    out = []
    for _ in range(n_questions):
        feats = rng.normal(size=(n_candidates, dims))
        ref_pos = int(rng.integers(0, n_candidates))
        feats[ref_pos] += shift * direction
        ref = np.zeros(n_candidates, dtype=bool)
        ref[ref_pos] = True
        out.append(Instance(feats, ref, annotated=False))
    return out


# ---------------------------------------------------------------------------
# Annotation aggregation and splits


def aggregate_annotations(votes: list[int | None]) -> frozenset[int] | None:
    """Combine per-worker picks for one question.

    A candidate backed by at least two workers counts as marked. With no
    such candidate, a strict majority of "none of these" verdicts yields an
    empty set (confidently no correct candidate); anything else yields None
    (no consensus, treat the question as unmarked).
    """
    counts: dict[int, int] = {}
    nones = 0
    for v in votes:
        if v is None:
            nones += 1
        else:
            counts[v] = counts.get(v, 0) + 1
    marked = frozenset(c for c, n in counts.items() if n >= 2)
    if marked:
        return marked
    if nones * 2 > len(votes):
        return frozenset()
    return None


def split_examples(items: list, dev_fraction: float = 0.2, seed: int = 0):
    """Deterministic shuffled train/dev split."""
    if not 0.0 <= dev_fraction < 1.0:
        raise ValueError("dev_fraction must be in [0, 1)")
    order = list(items)
    random.Random(seed).shuffle(order)
    n_dev = int(round(len(order) * dev_fraction))
    return order[n_dev:], order[:n_dev]


# ---------------------------------------------------------------------------
# Checkpoints


@dataclass(frozen=True)
class ModelState:
    theta: np.ndarray
    accumulators: np.ndarray | None = None
    feature_names: tuple[str, ...] = FEATURE_NAMES
    epochs_trained: int = 0
    hyper: Hyperparams = Hyperparams()

    def score_features(self, features: np.ndarray) -> np.ndarray:
        return features @ self.theta


def initial_model() -> ModelState:
    return ModelState(theta=np.zeros(N_FEATURES))


def save_model(path: str | Path, state: ModelState) -> None:
    doc = {
        "version": MODEL_VERSION,
        "dimension": int(state.theta.shape[0]),
        "feature_names": list(state.feature_names),
        "theta": [float(x) for x in state.theta],
        "accumulators": (
            None
            if state.accumulators is None
            else [float(x) for x in state.accumulators]
        ),
        "epochs_trained": state.epochs_trained,
        "hyperparams": state.hyper.to_dict(),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ModelState:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    version = doc.get("version")
    if version != MODEL_VERSION:
        raise ValueError(
            f"model checkpoint version {version!r} unsupported, "
            f"expected {MODEL_VERSION}"
        )
    names = tuple(doc["feature_names"])
    theta = np.asarray(doc["theta"], dtype=float)
    if len(names) != theta.shape[0]:
        raise ValueError("checkpoint theta does not match its feature names")
    if doc.get("dimension") not in (None, theta.shape[0]):
        raise ValueError("checkpoint dimension does not match theta")
    raw_accum = doc.get("accumulators")
    accum = None if raw_accum is None else np.asarray(raw_accum, dtype=float)
    if accum is not None and accum.shape != theta.shape:
        raise ValueError("checkpoint accumulators do not match theta")
    return ModelState(
        theta=theta,
        accumulators=accum,
        feature_names=names,
        epochs_trained=int(doc.get("epochs_trained", 0)),
        hyper=Hyperparams.from_dict(doc["hyperparams"]),
    )
