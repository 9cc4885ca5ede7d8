"""Threshold-gated score-level fusion of the PCA and ICA branches."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError, ParameterError
from .mlp import ScoreVector, classify_scores

AGREED, PCA, ICA = "AGREED", "PCA", "ICA"
AGREED_BELOW = "agreed-below-threshold"
PCA_BELOW = "pca-below-threshold"
ICA_BELOW = "ica-below-threshold"


@dataclass(frozen=True)
class FusionConfig:
    # +1 is allowed as an unreachable threshold (disables a branch)
    threshold_pca: float = 0.5
    threshold_ica: float = 0.5

    def __post_init__(self):
        for name in ("threshold_pca", "threshold_ica"):
            value = getattr(self, name)
            if not -1.0 < value <= 1.0:
                raise ParameterError(f"{name} must lie in (-1, 1], got {value}")


@dataclass(frozen=True)
class Decision:
    accepted: bool
    label: object = None
    score: float | None = None
    branch: str | None = None   # AGREED, PCA or ICA when accepted
    reason: str | None = None   # one of the *_BELOW reasons when denied

    @classmethod
    def accept(cls, label, score, branch):
        return cls(True, label, score, branch)

    @classmethod
    def deny(cls, reason):
        return cls(False, reason=reason)

    def __str__(self):
        if self.accepted:
            return f"ACCEPTED class={self.label} score={self.score:.4f} branch={self.branch}"
        return f"DENIED ({self.reason})"


def fuse_top(label_pca, score_pca, label_ica, score_ica, cfg: FusionConfig) -> Decision:
    """Fusion rule applied to each branch's winning (label, score)."""
    if label_pca == label_ica:
        if score_pca > cfg.threshold_pca and score_ica > cfg.threshold_ica:
            return Decision.accept(label_pca, max(score_pca, score_ica), AGREED)
        return Decision.deny(AGREED_BELOW)
    if score_pca > score_ica:
        if score_pca > cfg.threshold_pca:
            return Decision.accept(label_pca, score_pca, PCA)
        return Decision.deny(PCA_BELOW)
    # disagreeing branches with tied scores fall through to ICA
    if score_ica > cfg.threshold_ica:
        return Decision.accept(label_ica, score_ica, ICA)
    return Decision.deny(ICA_BELOW)


def fuse(pca_scores: ScoreVector, ica_scores: ScoreVector, cfg: FusionConfig) -> Decision:
    if tuple(pca_scores.class_ids) != tuple(ica_scores.class_ids):
        raise ConfigurationError("PCA and ICA score vectors cover different class sets")
    lp, sp = classify_scores(pca_scores)
    li, si = classify_scores(ica_scores)
    return fuse_top(lp, sp, li, si, cfg)


def single_branch(scores: ScoreVector, threshold: float, branch: str) -> Decision:
    """Baseline decision from one branch alone: accept iff score > threshold."""
    label, score = classify_scores(scores)
    if score > threshold:
        return Decision.accept(label, score, branch)
    return Decision.deny(PCA_BELOW if branch == PCA else ICA_BELOW)


def is_correct(decision: Decision, true_label) -> bool:
    """`true_label=None` marks an unknown probe, which must be denied."""
    if true_label is None:
        return not decision.accepted
    return decision.accepted and decision.label == true_label


def calibrate_thresholds(validation, grid) -> FusionConfig:
    """Pick the grid pair with the most correct accepts plus correct denies.

    `validation` holds (pca_scores, ica_scores, true_label) triples with
    true_label None for unknown probes. Ties go to the lowest threshold_pca,
    then the lowest threshold_ica.
    """
    validation = list(validation)
    grid = sorted(set((float(a), float(b)) for a, b in grid))
    if not validation or not grid:
        raise ValueError("calibration needs a non-empty validation set and grid")
    tops = []
    for pca_scores, ica_scores, truth in validation:
        if tuple(pca_scores.class_ids) != tuple(ica_scores.class_ids):
            raise ConfigurationError("PCA and ICA score vectors cover different class sets")
        tops.append((*classify_scores(pca_scores), *classify_scores(ica_scores), truth))
    best, best_count = None, -1
    for tp, ti in grid:
        cfg = FusionConfig(tp, ti)
        count = sum(is_correct(fuse_top(lp, sp, li, si, cfg), truth)
                    for lp, sp, li, si, truth in tops)
        if count > best_count:
            best, best_count = cfg, count
    return best
