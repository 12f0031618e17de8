"""Ownership verdicts: threshold computation and claim checking.

The threshold M is the mean, over a held-out known-hardware test set, of
the probability the classifier assigns to its own argmax label. A claim is
proven when the batch's majority prediction matches the claimed schedule
and the mean probability of that prediction clears M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from ..imaging import LabeledImageSet
from .classifier import WatermarkClassifier, predict_images8

OWNED = "owned"
NOT_PROVEN = "not-proven"


@dataclass(frozen=True)
class Verdict:
    claimed: str
    predicted: str
    mean_probability: float
    threshold: float
    decision: str
    note: str = ""

    def to_text(self) -> str:
        lines = [
            f"claimed: {self.claimed}",
            f"predicted: {self.predicted}",
            f"mean_probability: {self.mean_probability!r}",
            f"threshold: {self.threshold!r}",
            f"decision: {self.decision}",
        ]
        if self.note:
            lines.append(f"note: {self.note}")
        return "\n".join(lines) + "\n"


def _as_images8(images) -> np.ndarray:
    if isinstance(images, LabeledImageSet):
        return images.images8()
    return np.asarray(images, dtype=float).reshape(-1, 8, 8)


def compute_threshold(clf: WatermarkClassifier, known_test: LabeledImageSet | np.ndarray) -> float:
    """Mean predicted probability of the detected label over a test set."""
    images = _as_images8(known_test)
    if images.shape[0] == 0:
        raise DataError("threshold needs a nonempty test set")
    probs = predict_images8(clf, images)
    return float(probs.max(axis=1).mean())


def verify_ownership(
    clf: WatermarkClassifier,
    images,
    claim: str,
    threshold: float,
) -> Verdict:
    """Majority-argmax decision over an image batch against a claim."""
    batch = _as_images8(images)
    if batch.shape[0] == 0:
        raise DataError("ownership check needs a nonempty image batch")
    probs = predict_images8(clf, batch)
    votes = np.bincount(np.argmax(probs, axis=1), minlength=len(clf.label_map))
    majority = int(np.argmax(votes))  # ties resolve to the lowest class index
    predicted = clf.label_map[majority]
    mean_prob = float(probs[:, majority].mean())

    if claim not in clf.label_map:
        return Verdict(
            claimed=claim,
            predicted=predicted,
            mean_probability=mean_prob,
            threshold=threshold,
            decision=NOT_PROVEN,
            note=f"claimed schedule {claim!r} is not among the classifier labels",
        )
    owned = predicted == claim and mean_prob >= threshold
    return Verdict(
        claimed=claim,
        predicted=predicted,
        mean_probability=mean_prob,
        threshold=threshold,
        decision=OWNED if owned else NOT_PROVEN,
    )
