"""Hybrid PCA + ICA face recognition with score-level fusion."""

from .dataset_io import GrayImage, load_split, parse_pgm, read_manifest, write_pgm
from .fusion import Decision, FusionConfig, fuse
from .ica import IcaConfig, fit_ica, project_ica
from .mlp import MlpConfig
from .modelio import load_model, save_model
from .pca import fit_pca, project_pca
from .pipeline import SystemConfig, classify, evaluate, train_system
from .preprocess import PreprocessConfig, normalize

__version__ = "0.1.0"
