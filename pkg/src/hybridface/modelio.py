"""Text model file: header line, then named sections of scalars and matrices.

    HYBRIDFACE-MODEL 1
    [PREPROCESS]
    target_width 46
    ...
    [PCA]
    n_train 259
    matrix mean 1 2576
    <one line per matrix row, shortest round-trip float repr>
    ...
    [END]

Floats are written with ``repr`` so every value reads back bit-exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError, VersionError
from .fusion import FusionConfig
from .ica import IcaModel
from .mlp import MlpNetwork
from .pca import EigenModel
from .pipeline import FORMAT_VERSION, HybridModel
from .preprocess import PreprocessConfig

MAGIC = "HYBRIDFACE-MODEL"
SECTIONS = ("PREPROCESS", "CLASSES", "PCA", "ICA", "NET_PCA", "NET_ICA", "FUSION")


def _fmt(x) -> str:
    return repr(float(x))


class _Writer:
    def __init__(self):
        self.lines = []

    def section(self, name):
        self.lines.append(f"[{name}]")

    def scalar(self, key, value):
        self.lines.append(f"{key} {value}")

    def matrix(self, key, m):
        m = np.atleast_2d(np.asarray(m, dtype=np.float64))
        self.lines.append(f"matrix {key} {m.shape[0]} {m.shape[1]}")
        for row in m.tolist():
            self.lines.append(" ".join(map(repr, row)))

    def text(self):
        return "\n".join(self.lines) + "\n"


def _write_eigen(w, eigen: EigenModel, prefix=""):
    w.scalar(prefix + "n_train", eigen.n_train)
    w.matrix(prefix + "mean", eigen.mean[None, :])
    w.matrix(prefix + "eigenfaces", eigen.eigenfaces)
    w.matrix(prefix + "eigenvalues", eigen.eigenvalues[None, :])


def _write_net(w, net: MlpNetwork, scale: float):
    w.scalar("learn_rate", _fmt(net.learn_rate))
    w.scalar("momentum", _fmt(net.momentum))
    w.scalar("input_scale", _fmt(scale))
    w.matrix("w1", net.w1)
    w.matrix("b1", net.b1[None, :])
    w.matrix("w2", net.w2)
    w.matrix("b2", net.b2[None, :])


def dumps(model: HybridModel) -> str:
    w = _Writer()
    w.lines.append(f"{MAGIC} {model.format_version}")
    cfg = model.preprocess_cfg
    w.section("PREPROCESS")
    w.scalar("target_width", cfg.target_width)
    w.scalar("target_height", cfg.target_height)
    w.scalar("gamma", _fmt(cfg.gamma))
    w.scalar("equalize", int(cfg.equalize))
    w.section("CLASSES")
    w.scalar("ids", " ".join(str(c) for c in model.class_ids))
    w.section("PCA")
    _write_eigen(w, model.eigen)
    w.section("ICA")
    pre = model.ica.pre_projection
    if pre is None:
        w.scalar("pre_projection", "none")
    elif pre is model.eigen:
        w.scalar("pre_projection", "shared")
    else:
        w.scalar("pre_projection", "own")
        _write_eigen(w, pre, prefix="pre_")
    w.scalar("passes", model.ica.passes)
    w.matrix("whitening", model.ica.whitening)
    w.matrix("learned", model.ica.learned)
    w.matrix("unmixing", model.ica.unmixing)
    w.matrix("basis", model.ica.basis)
    w.matrix("row_means", model.ica.row_means[None, :])
    w.section("NET_PCA")
    _write_net(w, model.net_pca, model.scale_pca)
    w.section("NET_ICA")
    _write_net(w, model.net_ica, model.scale_ica)
    w.section("FUSION")
    w.scalar("threshold_pca", _fmt(model.fusion_cfg.threshold_pca))
    w.scalar("threshold_ica", _fmt(model.fusion_cfg.threshold_ica))
    w.lines.append("[END]")
    return w.text()


def save_model(model: HybridModel, path):
    Path(path).write_text(dumps(model))


class _Section:
    def __init__(self, name):
        self.name = name
        self.scalars = {}
        self.matrices = {}

    def get(self, key):
        if key not in self.scalars:
            raise FormatError(f"section {self.name} is missing {key!r}")
        return self.scalars[key]

    def mat(self, key):
        if key not in self.matrices:
            raise FormatError(f"section {self.name} is missing matrix {key!r}")
        return self.matrices[key]

    def vec(self, key):
        m = self.mat(key)
        if m.shape[0] != 1:
            raise ValidationError(f"{self.name}.{key} should be a single row, got {m.shape}")
        return m[0].copy()


def _parse_sections(text: str) -> dict:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty model file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != MAGIC:
        raise FormatError(f"not a model file (header {lines[0][:40]!r})")
    if head[1] != str(FORMAT_VERSION):
        raise VersionError(f"model format version {head[1]} is not supported (expected {FORMAT_VERSION})")
    sections, current, ended = {}, None, False
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            if name == "END":
                ended = True
                break
            current = sections.setdefault(name, _Section(name))
            continue
        if current is None:
            raise FormatError(f"line {i}: content before the first section")
        key, _, rest = line.partition(" ")
        if key == "matrix":
            try:
                mkey, rows, cols = rest.split()
                rows, cols = int(rows), int(cols)
            except ValueError:
                raise FormatError(f"line {i}: bad matrix header {line!r}") from None
            if i + rows > len(lines):
                raise FormatError(f"section {current.name}: matrix {mkey!r} is truncated")
            try:
                data = [float(tok) for row in lines[i:i + rows] for tok in row.split()]
            except ValueError:
                raise FormatError(f"section {current.name}: matrix {mkey!r} has a bad number") from None
            if len(data) != rows * cols:
                raise FormatError(f"section {current.name}: matrix {mkey!r} is truncated")
            current.matrices[mkey] = np.array(data, dtype=np.float64).reshape(rows, cols)
            i += rows
        else:
            current.scalars[key] = rest
    for name in SECTIONS:
        if name not in sections:
            raise FormatError(f"model file is missing section [{name}]")
    if not ended:
        raise FormatError("model file is truncated (no [END] marker)")
    return sections


def _read_eigen(sec: _Section, prefix="") -> EigenModel:
    return EigenModel(sec.vec(prefix + "mean"), sec.mat(prefix + "eigenfaces"),
                      sec.vec(prefix + "eigenvalues"), int(sec.get(prefix + "n_train")))


def _read_net(sec: _Section):
    net = MlpNetwork(sec.mat("w1"), sec.vec("b1"), sec.mat("w2"), sec.vec("b2"),
                     learn_rate=float(sec.get("learn_rate")), momentum=float(sec.get("momentum")))
    return net, float(sec.get("input_scale"))


def _parse_id(tok):
    try:
        return int(tok)
    except ValueError:
        return tok


def loads(text: str) -> HybridModel:
    s = _parse_sections(text)
    try:
        p = s["PREPROCESS"]
        pre_cfg = PreprocessConfig(int(p.get("target_width")), int(p.get("target_height")),
                                   float(p.get("gamma")), bool(int(p.get("equalize"))))
        class_ids = tuple(_parse_id(t) for t in s["CLASSES"].get("ids").split())
        eigen = _read_eigen(s["PCA"])
        ica_sec = s["ICA"]
        mode = ica_sec.get("pre_projection")
        if mode == "shared":
            pre = eigen
        elif mode == "own":
            pre = _read_eigen(ica_sec, prefix="pre_")
        elif mode == "none":
            pre = None
        else:
            raise FormatError(f"unknown pre_projection mode {mode!r}")
        ica = IcaModel(ica_sec.mat("whitening"), ica_sec.mat("learned"), ica_sec.mat("unmixing"),
                       ica_sec.mat("basis"), ica_sec.vec("row_means"), pre,
                       passes=int(ica_sec.get("passes")))
        net_pca, scale_pca = _read_net(s["NET_PCA"])
        net_ica, scale_ica = _read_net(s["NET_ICA"])
        fus = s["FUSION"]
        fusion_cfg = FusionConfig(float(fus.get("threshold_pca")), float(fus.get("threshold_ica")))
    except (ValueError, ArithmeticError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise ValidationError(f"invalid model contents: {exc}") from None
    model = HybridModel(pre_cfg, eigen, ica, net_pca, net_ica, fusion_cfg, class_ids,
                        scale_pca, scale_ica)
    validate(model)
    return model


def load_model(path) -> HybridModel:
    return loads(Path(path).read_text())


def validate(model: HybridModel):
    """Check cross-section dimensions; raises ValidationError."""
    e, ica = model.eigen, model.ica
    n_classes = len(model.class_ids)
    checks = [
        (e.mean.shape[0] == model.preprocess_cfg.vector_length,
         f"mean length {e.mean.shape[0]} != image size {model.preprocess_cfg.vector_length}"),
        (e.eigenfaces.shape[0] == e.mean.shape[0], "eigenface length differs from mean length"),
        (e.eigenvalues.shape[0] == e.m_prime, "eigenvalue count differs from eigenface count"),
        (model.net_pca.w1.shape[0] == e.m_prime,
         f"PCA network takes {model.net_pca.w1.shape[0]} inputs, model has {e.m_prime} eigenfaces"),
        (model.net_ica.w1.shape[0] == ica.n_components,
         f"ICA network takes {model.net_ica.w1.shape[0]} inputs, ICA has {ica.n_components} components"),
        (ica.whitening.shape == ica.learned.shape == ica.unmixing.shape,
         "ICA matrices disagree in shape"),
        (ica.basis.shape[1] == ica.n_components and ica.row_means.shape[0] == ica.n_components,
         "ICA basis or row means disagree with the component count"),
        (ica.pre_projection is None or ica.pre_projection.m_prime == ica.n_components,
         "ICA pre-projection width differs from the component count"),
        (model.net_pca.w2.shape[1] == n_classes and model.net_ica.w2.shape[1] == n_classes,
         f"networks must have {n_classes} outputs"),
    ]
    for net in (model.net_pca, model.net_ica):
        checks.append((net.b1.shape[0] == net.w1.shape[1] == net.w2.shape[0]
                       and net.b2.shape[0] == net.w2.shape[1], "network layer shapes disagree"))
        checks.append((all(np.all(np.isfinite(p)) for p in net.params()), "non-finite network weight"))
    for ok, message in checks:
        if not ok:
            raise ValidationError(message)


def models_equal(a: HybridModel, b: HybridModel) -> bool:
    """Field-by-field, bit-exact comparison of two models."""
    def same(x, y):
        x, y = np.asarray(x), np.asarray(y)
        return x.shape == y.shape and x.tobytes() == y.tobytes()

    def same_eigen(x, y):
        if x is None or y is None:
            return x is y
        return (x.n_train == y.n_train and same(x.mean, y.mean)
                and same(x.eigenfaces, y.eigenfaces) and same(x.eigenvalues, y.eigenvalues))

    def same_net(x, y):
        return (all(same(p, q) for p, q in zip(x.params(), y.params()))
                and same(x.learn_rate, y.learn_rate) and same(x.momentum, y.momentum))

    return (a.preprocess_cfg == b.preprocess_cfg
            and a.class_ids == b.class_ids
            and a.format_version == b.format_version
            and same_eigen(a.eigen, b.eigen)
            and same_eigen(a.ica.pre_projection, b.ica.pre_projection)
            and all(same(getattr(a.ica, f), getattr(b.ica, f))
                    for f in ("whitening", "learned", "unmixing", "basis", "row_means"))
            and a.ica.passes == b.ica.passes
            and same_net(a.net_pca, b.net_pca) and same_net(a.net_ica, b.net_ica)
            and same(a.scale_pca, b.scale_pca) and same(a.scale_ica, b.scale_ica)
            and same(a.fusion_cfg.threshold_pca, b.fusion_cfg.threshold_pca)
            and same(a.fusion_cfg.threshold_ica, b.fusion_cfg.threshold_ica))
