import logging
from dataclasses import replace

import numpy as np
import pytest

from hybridface import pipeline
from hybridface.dataset_io import DatasetSplit, TestSet
from hybridface.errors import BranchError, DegenerateDataError
from hybridface.fusion import FusionConfig
from hybridface.ica import IcaConfig
from hybridface.mlp import MlpConfig
from hybridface.modelio import dumps

from conftest import TOY_CFG


def test_toy_model_shapes(toy_model, toy_split):
    assert toy_model.class_ids == (0, 1, 2)
    assert toy_model.net_pca.dims[2] == toy_model.net_ica.dims[2] == 3
    assert toy_model.net_pca.dims[0] == toy_model.eigen.m_prime
    assert toy_model.eigen.n_train == len(toy_split.train)
    assert set(toy_model.reports) == {"PCA", "ICA"}


def test_training_images_are_accepted(toy_model, toy_split):
    for im in toy_split.train:
        d = pipeline.classify(toy_model, im.image).decision
        assert d.accepted and d.label == im.subject


def test_two_subject_two_pose_split(toy_split):
    train = [im for im in toy_split.train if im.subject < 2 and im.pose < 2]
    model = pipeline.train_system(DatasetSplit(train, []), TOY_CFG)
    assert model.net_pca.dims[2] == 2
    for im in train:
        d = pipeline.classify(model, im.image).decision
        assert d.accepted and d.label == im.subject


def test_bad_training_sets(toy_split):
    with pytest.raises(ValueError):
        pipeline.train_system(DatasetSplit([], []), TOY_CFG)
    one = [im for im in toy_split.train if im.subject == 0]
    with pytest.raises(ValueError, match="two subjects"):
        pipeline.train_system(DatasetSplit(one, []), TOY_CFG)


def test_branch_errors_are_named(toy_split):
    cfg = replace(TOY_CFG, ica=IcaConfig(learn_rate=500.0))
    with pytest.raises(BranchError) as info:
        pipeline.train_system(toy_split, cfg)
    assert info.value.branch == "ICA"
    same = [replace(im, image=toy_split.train[0].image) for im in toy_split.train]
    with pytest.raises(BranchError) as info:
        pipeline.train_system(DatasetSplit(same, []), TOY_CFG)
    assert info.value.branch == "PCA" and isinstance(info.value.cause, DegenerateDataError)


def test_concurrent_equals_sequential(toy_split, toy_model):
    seq = pipeline.train_system(toy_split, replace(TOY_CFG, concurrent=False))
    assert dumps(seq) == dumps(toy_model)


def test_own_ica_dimension(toy_split):
    model = pipeline.train_system(toy_split, replace(TOY_CFG, m_prime=5, ica=IcaConfig(pca_prewhiten_dims=3)))
    assert model.eigen.m_prime == 5 and model.ica.n_components == 3
    assert model.ica.pre_projection is not model.eigen


def test_classification_fields(toy_model, toy_split):
    result = pipeline.classify(toy_model, toy_split.train[0].image)
    assert result.pca_top[0] == 0
    assert len(result.pca_scores.scores) == 3


def test_evaluate_report(toy_model, toy_split):
    report = pipeline.evaluate(toy_model, toy_split)
    assert [s.name for s in report.sets] == ["known", "unknown"]
    known = report.sets[0]
    assert known.count == 3
    for rec in known.records:
        assert set(rec.decisions) == set(pipeline.SYSTEMS)
    csv = report.to_csv().splitlines()
    assert csv[0] == "set,count,acc_pca,acc_ica,acc_hybrid,miss_pca,miss_ica,miss_hybrid"
    assert len(csv) == 3 and csv[1].startswith("known,3,")
    assert "known (known)" in report.to_text()


def test_all_correct_set_reads_100(toy_model, toy_split):
    split = DatasetSplit(toy_split.train, [TestSet("train", True, toy_split.train)])
    s = pipeline.evaluate(toy_model, split).sets[0]
    assert all(s.accuracy(k) == 100.0 and s.misclassified(k) == 0 for k in pipeline.SYSTEMS)
    assert "100.00 (  0 miss)" in pipeline.evaluate(toy_model, split).to_text()


def test_empty_set_is_skipped(toy_model, toy_split, caplog):
    split = DatasetSplit(toy_split.train, [TestSet("empty", True, []), toy_split.test_sets[1]])
    with caplog.at_level(logging.WARNING):
        report = pipeline.evaluate(toy_model, split)
    assert [s.name for s in report.sets] == ["unknown"]
    assert "empty" in caplog.text


def test_calibrate_denies_unknowns(toy_model, toy_split):
    grid = [(a / 10, b / 10) for a in range(-5, 10) for b in range(-5, 10)]
    model = pipeline.calibrate(toy_model, toy_split, grid)
    report = pipeline.evaluate(model, toy_split)
    assert report.sets[1].accuracy("HYBRID") >= pipeline.evaluate(toy_model, toy_split).sets[1].accuracy("HYBRID")
    assert model.eigen is toy_model.eigen


def test_unknown_probe_denied_after_calibration(toy_model, toy_split):
    grid = [(0.5, 0.5), (0.9, 0.9), (1.0, 1.0)]
    model = pipeline.calibrate(toy_model, DatasetSplit(toy_split.train, [toy_split.test_sets[1]]), grid)
    for im in toy_split.test_sets[1].images:
        assert not pipeline.classify(model, im.image).decision.accepted


def test_sweep_rows(toy_split):
    cfg = replace(TOY_CFG, mlp=MlpConfig(hidden_units=4, max_epochs=5))
    rows = pipeline.sweep_hyperparams(toy_split, [(0.1, 0.5)], cfg)
    assert rows[0] == pipeline.SWEEP_HEADER and len(rows) == 2
    assert rows[1].startswith("0.1,0.5,")
    assert rows == pipeline.sweep_hyperparams(toy_split, [(0.1, 0.5)], cfg)
    with pytest.raises(ValueError):
        pipeline.sweep_hyperparams(toy_split, [], cfg)


def test_sweep_reports_divergence(toy_split, monkeypatch):
    from hybridface.errors import DivergenceError

    def boom(*args, **kwargs):
        raise DivergenceError("boom")
    monkeypatch.setattr(pipeline.mlp, "train", boom)
    rows = pipeline.sweep_hyperparams(toy_split, [(0.8, 0.9)], TOY_CFG)
    assert rows[1] == "0.8,0.9,diverged,diverged,diverged,diverged"
    assert pipeline.parse_sweep_mse("diverged") == np.inf


def test_feature_scale():
    assert pipeline.feature_scale(np.array([[3.0, 4.0], [0.0, 5.0]])) == 5.0
    assert pipeline.feature_scale(np.zeros((2, 2))) == 1.0


def test_default_thresholds(toy_model):
    assert toy_model.fusion_cfg == FusionConfig(0.5, 0.5)
