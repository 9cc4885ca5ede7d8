"""Train both branches, classify probes, and tabulate evaluation reports."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import fusion, mlp
from .dataset_io import DatasetSplit, GrayImage
from .errors import BranchError, DivergenceError, HybridFaceError
from .fusion import FusionConfig
from .ica import IcaConfig, IcaModel, fit_ica, project_ica
from .mlp import MlpConfig, MlpNetwork, ScoreVector
from .pca import EigenModel, fit_pca_faces, project_pca
from .preprocess import PreprocessConfig, normalize, normalize_all

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SystemConfig:
    preprocess: PreprocessConfig = PreprocessConfig()
    m_prime: int | None = None
    ica: IcaConfig = IcaConfig()
    mlp: MlpConfig = MlpConfig()
    fusion: FusionConfig = FusionConfig()
    concurrent: bool = True


@dataclass(eq=False)
class HybridModel:
    preprocess_cfg: PreprocessConfig
    eigen: EigenModel
    ica: IcaModel
    net_pca: MlpNetwork
    net_ica: MlpNetwork
    fusion_cfg: FusionConfig
    class_ids: tuple
    scale_pca: float = 1.0
    scale_ica: float = 1.0
    format_version: int = FORMAT_VERSION
    reports: dict = field(default_factory=dict, repr=False)  # not persisted


@dataclass(frozen=True)
class Classification:
    decision: fusion.Decision
    pca_scores: ScoreVector
    ica_scores: ScoreVector

    @property
    def pca_top(self):
        return mlp.classify_scores(self.pca_scores)

    @property
    def ica_top(self):
        return mlp.classify_scores(self.ica_scores)


# -- training -------------------------------------------------------------------

def _class_index(split: DatasetSplit):
    class_ids = tuple(dict.fromkeys(im.subject for im in split.train))
    index = {c: i for i, c in enumerate(class_ids)}
    return class_ids, np.array([index[im.subject] for im in split.train])


def _ica_pre_projection(eigen: EigenModel, faces, dims):
    if dims is None or dims == eigen.m_prime:
        return eigen
    return fit_pca_faces(faces, dims)


def feature_scale(features) -> float:
    """RMS length of the training feature vectors.

    Network inputs are divided by this so they have unit length on
    average, keeping tanh units out of saturation at the default rates.
    """
    scale = float(np.sqrt(np.mean(np.sum(np.square(features), axis=1))))
    return scale if scale > 0 else 1.0


def _train_net(features, labels, n_classes, cfg: MlpConfig):
    scale = feature_scale(features)
    net = mlp.init_network((features.shape[1], cfg.hidden_units, n_classes), cfg)
    net, report = mlp.train(net, features / scale, labels, cfg)
    return net, report, scale


def _run_branches(pca_job, ica_job, concurrent):
    def guarded(name, job):
        try:
            return job()
        except HybridFaceError as exc:
            raise BranchError(name, exc) from exc

    if not concurrent:
        return guarded("PCA", pca_job), guarded("ICA", ica_job)
    with ThreadPoolExecutor(max_workers=2) as pool:
        fp = pool.submit(guarded, "PCA", pca_job)
        fi = pool.submit(guarded, "ICA", ica_job)
        return fp.result(), fi.result()


def train_system(split: DatasetSplit, cfg: SystemConfig = SystemConfig()) -> HybridModel:
    """Fit eigenfaces, infomax ICA and one classifier network per branch.

    The ICA branch works in the PCA face space (its own dimension when
    `cfg.ica.pca_prewhiten_dims` is set). After the shared eigenface fit the
    two branches are independent and run on separate threads when
    `cfg.concurrent`; each branch is seeded, so results do not depend on
    scheduling.
    """
    if not split.train:
        raise ValueError("training set is empty")
    class_ids, labels = _class_index(split)
    if len(class_ids) < 2:
        raise ValueError("training needs at least two subjects")
    faces = normalize_all([im.image for im in split.train], cfg.preprocess)
    try:
        eigen = fit_pca_faces(faces, cfg.m_prime)
    except HybridFaceError as exc:
        raise BranchError("PCA", exc) from exc

    def pca_job():
        return _train_net(project_pca(eigen, faces), labels, len(class_ids), cfg.mlp)

    def ica_job():
        pre = _ica_pre_projection(eigen, faces, cfg.ica.pca_prewhiten_dims)
        ica_model = fit_ica(faces, cfg.ica, pre)
        return ica_model, _train_net(ica_model.basis, labels, len(class_ids), cfg.mlp)

    (net_pca, rep_pca, scale_pca), (ica_model, (net_ica, rep_ica, scale_ica)) = _run_branches(
        pca_job, ica_job, cfg.concurrent)
    return HybridModel(cfg.preprocess, eigen, ica_model, net_pca, net_ica, cfg.fusion,
                       class_ids, scale_pca, scale_ica,
                       reports={"PCA": rep_pca, "ICA": rep_ica})


# -- classification -------------------------------------------------------------

def branch_scores(model: HybridModel, face) -> tuple[ScoreVector, ScoreVector]:
    """Score vectors of both branches for a normalized face vector."""
    sp = mlp.forward(model.net_pca, project_pca(model.eigen, face) / model.scale_pca)
    si = mlp.forward(model.net_ica, project_ica(model.ica, face) / model.scale_ica)
    return ScoreVector(sp, model.class_ids), ScoreVector(si, model.class_ids)


def classify(model: HybridModel, img: GrayImage) -> Classification:
    sp, si = branch_scores(model, normalize(img, model.preprocess_cfg))
    return Classification(fusion.fuse(sp, si, model.fusion_cfg), sp, si)


def _score_probes(model, images):
    if not images:
        return []
    faces = normalize_all(images, model.preprocess_cfg)
    sp = mlp.forward(model.net_pca, project_pca(model.eigen, faces) / model.scale_pca)
    si = mlp.forward(model.net_ica, project_ica(model.ica, faces) / model.scale_ica)
    return [(ScoreVector(a, model.class_ids), ScoreVector(b, model.class_ids))
            for a, b in zip(sp, si)]


# -- evaluation -----------------------------------------------------------------

SYSTEMS = ("PCA", "ICA", "HYBRID")


@dataclass(frozen=True)
class ProbeRecord:
    subject: int
    pose: int
    known: bool
    decisions: dict  # system name -> Decision


@dataclass
class SetResult:
    name: str
    known: bool
    count: int
    correct: dict        # system name -> count
    records: list

    def misclassified(self, system):
        return self.count - self.correct[system]

    def accuracy(self, system):
        return 100.0 * self.correct[system] / self.count


@dataclass
class EvalReport:
    sets: list

    def to_text(self) -> str:
        head = (f"{'Test set':<16}{'# images':>9}  {'PCA':>18}  {'ICA':>18}  {'HYBRID':>18}")
        lines = [head, "-" * len(head)]
        for s in self.sets:
            cells = [f"{s.accuracy(k):6.2f} ({s.misclassified(k):3d} miss)" for k in SYSTEMS]
            kind = "known" if s.known else "unknown"
            lines.append(f"{s.name + ' (' + kind + ')':<16}{s.count:>9}  "
                         + "  ".join(f"{c:>18}" for c in cells))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["set,count,acc_pca,acc_ica,acc_hybrid,miss_pca,miss_ica,miss_hybrid"]
        for s in self.sets:
            accs = ",".join(f"{s.accuracy(k):.2f}" for k in SYSTEMS)
            miss = ",".join(str(s.misclassified(k)) for k in SYSTEMS)
            lines.append(f"{s.name},{s.count},{accs},{miss}")
        return "\n".join(lines) + "\n"


def decide_all(sp: ScoreVector, si: ScoreVector, cfg: FusionConfig) -> dict:
    """Decisions of the single-branch baselines and the fused system."""
    return {
        "PCA": fusion.single_branch(sp, cfg.threshold_pca, fusion.PCA),
        "ICA": fusion.single_branch(si, cfg.threshold_ica, fusion.ICA),
        "HYBRID": fusion.fuse(sp, si, cfg),
    }


def evaluate(model: HybridModel, split: DatasetSplit) -> EvalReport:
    """Score every test set three ways: PCA only, ICA only and fused.

    Known probes count as correct when accepted with their own label,
    unknown probes when denied. Empty test sets are skipped with a warning.
    """
    results = []
    for ts in split.test_sets:
        if not ts.images:
            log.warning("test set %r is empty; omitted from the report", ts.name)
            continue
        scored = _score_probes(model, [im.image for im in ts.images])
        records, correct = [], dict.fromkeys(SYSTEMS, 0)
        for im, (sp, si) in zip(ts.images, scored):
            decisions = decide_all(sp, si, model.fusion_cfg)
            truth = im.subject if ts.known else None
            for name, d in decisions.items():
                correct[name] += fusion.is_correct(d, truth)
            records.append(ProbeRecord(im.subject, im.pose, ts.known, decisions))
        results.append(SetResult(ts.name, ts.known, len(ts.images), correct, records))
    return EvalReport(results)


def validation_scores(model: HybridModel, split: DatasetSplit):
    """(pca_scores, ica_scores, true label or None) for every test probe."""
    out = []
    for ts in split.test_sets:
        scored = _score_probes(model, [im.image for im in ts.images])
        for im, (sp, si) in zip(ts.images, scored):
            out.append((sp, si, im.subject if ts.known else None))
    return out


def calibrate(model: HybridModel, split: DatasetSplit, grid) -> HybridModel:
    """Return a copy of `model` with thresholds fitted on `split`'s test sets."""
    cfg = fusion.calibrate_thresholds(validation_scores(model, split), grid)
    return replace(model, fusion_cfg=cfg)


# -- hyperparameter sweep -------------------------------------------------------

SWEEP_HEADER = "lr,momentum,final_mse_pca,final_mse_ica,epochs_pca,epochs_ica"


def sweep_hyperparams(split: DatasetSplit, grid, cfg: SystemConfig = SystemConfig()) -> list[str]:
    """Train fresh network pairs for each (learn_rate, momentum) in `grid`.

    Features are extracted once; every grid point starts from the same
    seeded initial weights. Returns CSV lines, header first. A diverged
    network reports ``diverged`` in place of its MSE and epoch count.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    class_ids, labels = _class_index(split)
    faces = normalize_all([im.image for im in split.train], cfg.preprocess)
    eigen = fit_pca_faces(faces, cfg.m_prime)
    ica_model = fit_ica(faces, cfg.ica, _ica_pre_projection(eigen, faces, cfg.ica.pca_prewhiten_dims))
    feats = {"PCA": project_pca(eigen, faces), "ICA": ica_model.basis}

    rows = [SWEEP_HEADER]
    for lr, momentum in grid:
        mcfg = replace(cfg.mlp, learn_rate=float(lr), momentum=float(momentum))
        cells = {}
        for name, x in feats.items():
            try:
                _, rep, _ = _train_net(x, labels, len(class_ids), mcfg)
                cells[name] = (repr(rep.final_mse), str(rep.epochs_run))
            except DivergenceError:
                cells[name] = ("diverged", "diverged")
        rows.append(f"{float(lr)!r},{float(momentum)!r},{cells['PCA'][0]},{cells['ICA'][0]},"
                    f"{cells['PCA'][1]},{cells['ICA'][1]}")
    return rows


def parse_sweep_mse(cell: str) -> float:
    return math.inf if cell == "diverged" else float(cell)
