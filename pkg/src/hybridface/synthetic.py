"""Procedural "faces" for desk-scale experiments without a face database.

Every face starts from one shared template (two eyes, nose, mouth and a
head-shaped background). An identity moves and reweights the template
features and adds a few blobs of its own; a pose jitters all of that and
adds pixel noise and a brightness offset. Known and unknown identities come
from the same distribution, as real faces do.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset_io import DatasetSplit, GrayImage, LabeledImage, TestSet

# (x, y, sigma, amplitude) in units of the image size
_TEMPLATE = np.array([
    [0.32, 0.38, 0.07, -70.0],   # eyes
    [0.68, 0.38, 0.07, -70.0],
    [0.50, 0.56, 0.06, 35.0],    # nose
    [0.50, 0.74, 0.09, -55.0],   # mouth
])


@dataclass(frozen=True)
class SyntheticFaces:
    size: int = 16
    n_own_blobs: int = 3        # identity-specific features
    shape_spread: float = 0.06  # identity displacement of template features, image units
    amp_spread: float = 0.35    # identity reweighting of template features
    jitter: float = 0.35        # pose jitter of feature centres, pixels
    amp_jitter: float = 0.08
    brightness: float = 6.0     # grey levels
    noise: float = 6.0          # grey levels
    seed: int = 0

    def _identity(self, subject: int):
        rng = np.random.default_rng([self.seed, subject, 0])
        feats = _TEMPLATE.copy()
        feats[:, :2] += rng.normal(0, self.shape_spread, size=(len(feats), 2))
        feats[:, 2] *= rng.uniform(0.8, 1.25, size=len(feats))
        feats[:, 3] *= 1 + rng.normal(0, self.amp_spread, size=len(feats))
        own = np.column_stack([
            rng.uniform(0.15, 0.85, size=(self.n_own_blobs, 2)),
            rng.uniform(0.05, 0.12, size=self.n_own_blobs),
            rng.uniform(25, 60, size=self.n_own_blobs) * rng.choice([-1, 1], size=self.n_own_blobs),
        ])
        skin = rng.uniform(110, 160)
        return np.vstack([feats, own]), skin

    def image(self, subject: int, pose: int) -> GrayImage:
        feats, skin = self._identity(subject)
        rng = np.random.default_rng([self.seed, subject, 1, pose])
        s = self.size
        yy, xx = (np.mgrid[0:s, 0:s].astype(np.float64) + 0.5) / s
        head = np.exp(-(((xx - 0.5) / 0.42) ** 2 + ((yy - 0.52) / 0.5) ** 2) ** 2)
        img = 40 + (skin - 40) * head + rng.normal(0, self.brightness)
        centres = feats[:, :2] + rng.normal(0, self.jitter / s, size=(len(feats), 2))
        amps = feats[:, 3] * (1 + rng.normal(0, self.amp_jitter, size=len(feats)))
        for (cx, cy), sig, amp in zip(centres, feats[:, 2], amps):
            img += amp * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * sig * sig))
        img += rng.normal(0, self.noise, size=img.shape)
        return GrayImage(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))

    def labeled(self, subject: int, poses) -> list[LabeledImage]:
        return [LabeledImage(self.image(subject, p), subject, p) for p in poses]


def open_set_benchmark(gen: SyntheticFaces = SyntheticFaces(), n_known=10, n_unknown=2,
                       n_train=6, n_test=3, n_val=2, n_val_unknown=4, unknown_poses=9,
                       val_unknown_poses=3):
    """Build (split, validation) for an open-set experiment.

    Known subjects 0..n_known-1 contribute n_train training poses, n_test
    probes to the ``known`` test set and n_val probes to the validation
    slice. The next n_unknown subjects fill the ``unknown`` test set; a
    further disjoint group supplies the validation unknowns, so threshold
    calibration never sees a test identity.
    """
    known = range(n_known)
    unknown = range(n_known, n_known + n_unknown)
    val_unknown = range(n_known + n_unknown, n_known + n_unknown + n_val_unknown)
    train = [im for k in known for im in gen.labeled(k, range(n_train))]
    test_known = [im for k in known for im in gen.labeled(k, range(n_train, n_train + n_test))]
    test_unknown = [im for u in unknown for im in gen.labeled(u, range(unknown_poses))]
    val_k = [im for k in known
             for im in gen.labeled(k, range(n_train + n_test, n_train + n_test + n_val))]
    val_u = [im for u in val_unknown for im in gen.labeled(u, range(val_unknown_poses))]
    split = DatasetSplit(train, [TestSet("known", True, test_known),
                                 TestSet("unknown", False, test_unknown)])
    validation = DatasetSplit(train, [TestSet("validation-known", True, val_k),
                                      TestSet("validation-unknown", False, val_u)])
    return split, validation
