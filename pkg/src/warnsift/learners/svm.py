"""Linear SVM trained by deterministic full-batch subgradient descent.

Objective: 0.5*||w||^2 + C * sum_i c_{y_i} * max(0, 1 - y_i*(w.x_i + b))
with per-class costs c from the configured weighting. The bias rides along as
an unregularized augmented coordinate. Steps are scaled per coordinate by the
accumulated squared gradients (AdaGrad), which keeps the method stable across
the very different scales the training sets take during a session. The best
iterate by exact objective is kept, so the reported objective history never
increases.

Probabilities come from a sigmoid 1/(1+exp(A*s+B)) fitted on the training
scores by Newton iterations with the usual smoothed targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import TrainConfig, class_weights

_STALL_LIMIT = 40  # epochs without objective improvement before stopping
_WARM_PRIME = 24.0  # pseudo-count priming the step scale on warm starts


def _sigmoid_fitted(scores: np.ndarray, a: float, b: float) -> np.ndarray:
    f = a * scores + b
    out = np.empty_like(f)
    pos = f >= 0
    out[pos] = np.exp(-f[pos]) / (1.0 + np.exp(-f[pos]))
    out[~pos] = 1.0 / (1.0 + np.exp(f[~pos]))
    return out


def fit_sigmoid(scores: np.ndarray, y: np.ndarray, max_iter: int = 100) -> tuple[float, float]:
    """Newton fit of P(actionable | score) = 1/(1+exp(A*s+B)).

    Targets are the smoothed (n+1)/(n+2)-style values rather than hard 0/1,
    which keeps the fit finite on separable data.
    """
    scores = np.asarray(scores, dtype=np.float64)
    prior1 = int(np.sum(y > 0))
    prior0 = len(y) - prior1
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(y > 0, hi, lo)

    def nll(a: float, b: float) -> float:
        f = a * scores + b
        pos = f >= 0
        vals = np.empty_like(f)
        vals[pos] = t[pos] * f[pos] + np.log1p(np.exp(-f[pos]))
        vals[~pos] = (t[~pos] - 1.0) * f[~pos] + np.log1p(np.exp(f[~pos]))
        return float(vals.sum())

    sigma = 1e-12
    a = 0.0
    b = math.log((prior0 + 1.0) / (prior1 + 1.0))
    fval = nll(a, b)
    for _ in range(max_iter):
        p = _sigmoid_fitted(scores, a, b)
        d2 = p * (1.0 - p)
        h11 = sigma + float(np.sum(scores * scores * d2))
        h22 = sigma + float(np.sum(d2))
        h21 = float(np.sum(scores * d2))
        d1 = t - p
        g1 = float(np.sum(scores * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= 1e-10:
            na, nb = a + step * da, b + step * db
            nf = nll(na, nb)
            if nf < fval + 1e-4 * step * gd:
                a, b, fval = na, nb, nf
                break
            step *= 0.5
        else:
            break
    return a, b


@dataclass
class LinearSVM:
    kind = "linear_svm"

    w: np.ndarray
    b: float
    sigmoid_a: float
    sigmoid_b: float
    config: TrainConfig
    objective_history: list[float] = field(default_factory=list)
    epochs_run: int = 0
    schema_hash: str | None = None

    def score(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return X @ self.w + self.b

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid_fitted(self.score(X), self.sigmoid_a, self.sigmoid_b)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config.to_json(),
            "schema_hash": self.schema_hash,
            "parameters": {
                "w": self.w.tolist(),
                "b": self.b,
                "sigmoid_a": self.sigmoid_a,
                "sigmoid_b": self.sigmoid_b,
            },
            "objective_history": self.objective_history,
            "epochs_run": self.epochs_run,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LinearSVM":
        params = doc["parameters"]
        return cls(
            w=np.asarray(params["w"], dtype=np.float64),
            b=float(params["b"]),
            sigmoid_a=float(params["sigmoid_a"]),
            sigmoid_b=float(params["sigmoid_b"]),
            config=TrainConfig.from_json(doc["config"]),
            objective_history=[float(v) for v in doc.get("objective_history", [])],
            epochs_run=int(doc.get("epochs_run", 0)),
            schema_hash=doc.get("schema_hash"),
        )


def fit_linear_svm(
    X: np.ndarray,
    y: np.ndarray,
    cfg: TrainConfig,
    warm: LinearSVM | None = None,
    schema_hash: str | None = None,
) -> LinearSVM:
    n, d = X.shape
    cw = class_weights(y, cfg.class_weighting)
    yf = y.astype(np.float64)
    Xa = np.hstack([X, np.ones((n, 1))])
    cy = cw * yf

    if warm is not None and warm.w.shape == (d,):
        u = np.append(warm.w, warm.b)
        prime = _WARM_PRIME
    else:
        u = np.zeros(d + 1, dtype=np.float64)
        prime = 0.0

    def objective(u_vec: np.ndarray, margins: np.ndarray) -> float:
        hinge = np.maximum(0.0, 1.0 - margins)
        return 0.5 * float(u_vec[:d] @ u_vec[:d]) + cfg.C * float(cw @ hinge)

    accum = np.zeros(d + 1, dtype=np.float64)
    best_u = u.copy()
    best_obj = math.inf
    history: list[float] = []
    stall = 0
    epoch = 0
    for epoch in range(1, cfg.max_epochs + 1):
        margins = yf * (Xa @ u)
        obj = objective(u, margins)
        if obj < best_obj - cfg.tolerance * max(1.0, abs(best_obj)):
            stall = 0
        else:
            stall += 1
        if obj < best_obj:
            best_obj = obj
            best_u = u.copy()
        history.append(best_obj)
        if stall >= _STALL_LIMIT:
            break
        grad = np.append(u[:d], 0.0)  # the bias coordinate is unregularized
        viol = margins < 1.0
        if viol.any():
            grad -= cfg.C * (Xa[viol].T @ cy[viol])
        if epoch == 1 and prime > 0.0:
            accum += prime * grad * grad
        accum += grad * grad
        nonzero = accum > 0.0
        u[nonzero] -= grad[nonzero] / np.sqrt(accum[nonzero])

    margins = yf * (Xa @ u)
    obj = objective(u, margins)
    if obj < best_obj:
        best_obj = obj
        best_u = u.copy()
        history.append(best_obj)

    w = best_u[:d].copy()
    b = float(best_u[d])
    train_scores = X @ w + b
    a_fit, b_fit = fit_sigmoid(train_scores, y)
    return LinearSVM(
        w=w,
        b=b,
        sigmoid_a=a_fit,
        sigmoid_b=b_fit,
        config=cfg,
        objective_history=history,
        epochs_run=epoch,
        schema_hash=schema_hash,
    )
