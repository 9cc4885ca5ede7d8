"""PGM codec and train/test split materialization.

Manifest format, one directive per line (lines starting with ``#`` are
comments)::

    root=faces
    pattern=s{subject}/{pose}.pgm
    known 1 train=1-7 test=8-10 set=test1
    unknown 38 test=1-3 set=test3

Pose lists accept comma-separated integers and inclusive ``a-b`` ranges.
``set=`` is optional; known probes default to the set ``known`` and
unknown probes to ``unknown``. A subject may appear on several ``unknown``
lines (one per test set) but on at most one ``known`` line.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, LengthError, ShapeError, UnsupportedDepthError


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image stored as a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ShapeError(f"image must be a non-empty 2-D grid, got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255) or np.any(px != np.round(px)):
                raise ValueError("pixels must be integers in [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_flat(cls, width: int, height: int, values) -> "GrayImage":
        values = np.asarray(values)
        if values.size != width * height:
            raise ShapeError(f"{values.size} pixels for a {width}x{height} image")
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.all(self.pixels == other.pixels))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True)
class LabeledImage:
    image: GrayImage
    subject: int
    pose: int
    path: str = ""


@dataclass
class KnownSubject:
    subject: int
    train_poses: list[int]
    test_poses: list[int]
    test_set: str = "known"


@dataclass
class UnknownSubject:
    subject: int
    test_poses: list[int]
    test_set: str = "unknown"


@dataclass
class SplitManifest:
    root: Path
    image_pattern: str
    known_subjects: list[KnownSubject] = field(default_factory=list)
    unknown_subjects: list[UnknownSubject] = field(default_factory=list)

    def validate(self):
        seen = set()
        for ks in self.known_subjects:
            if ks.subject in seen:
                raise FormatError(f"known subject {ks.subject} listed twice")
            seen.add(ks.subject)
            if not ks.train_poses:
                raise FormatError(f"known subject {ks.subject} has no training poses")
            overlap = set(ks.train_poses) & set(ks.test_poses)
            if overlap:
                raise FormatError(
                    f"subject {ks.subject}: poses {sorted(overlap)} in both train and test"
                )
        unknown_ids = {us.subject for us in self.unknown_subjects}
        clash = seen & unknown_ids
        if clash:
            raise FormatError(f"subjects {sorted(clash)} are both known and unknown")
        known_sets = {ks.test_set for ks in self.known_subjects}
        unknown_sets = {us.test_set for us in self.unknown_subjects}
        mixed = known_sets & unknown_sets
        if mixed:
            raise FormatError(f"test sets {sorted(mixed)} mix known and unknown probes")

    def image_path(self, subject: int, pose: int) -> Path:
        return self.root / self.image_pattern.format(subject=subject, pose=pose)


@dataclass
class TestSet:
    name: str
    known: bool
    images: list[LabeledImage]

    __test__ = False  # not a pytest class


@dataclass
class DatasetSplit:
    train: list[LabeledImage]
    test_sets: list[TestSet]

    def test_set(self, name: str) -> TestSet:
        for ts in self.test_sets:
            if ts.name == name:
                return ts
        raise KeyError(name)


# -- PGM ------------------------------------------------------------------------

_WS = b" \t\r\n\v\f"


def _header_tokens(data: bytes, count: int):
    """Read `count` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the terminating
    whitespace byte of the final token.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WS:
            pos += 1
        if pos >= n:
            raise LengthError("PGM header truncated")
        if data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WS and data[pos] != ord("#"):
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from a binary raster
    if pos < n and data[pos] in _WS:
        pos += 1
    return tokens, pos


def parse_pgm(data: bytes) -> GrayImage:
    """Decode a binary (P5) or ASCII (P2) PGM with maxval <= 255."""
    if len(data) < 2 or data[:2] not in (b"P5", b"P2"):
        raise FormatError(f"not a PGM file (magic {data[:2]!r})")
    magic = data[:2]
    try:
        (w, h, maxval), offset = _header_tokens(data[2:], 3)
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise FormatError(f"bad PGM header: {exc}") from None
    if width < 1 or height < 1:
        raise FormatError(f"bad PGM dimensions {width}x{height}")
    if maxval > 255:
        raise UnsupportedDepthError(f"maxval {maxval} > 255 is not supported")
    if maxval < 1:
        raise FormatError(f"bad PGM maxval {maxval}")
    body = data[2 + offset:]
    npix = width * height
    if magic == b"P5":
        if len(body) < npix:
            raise LengthError(f"PGM payload has {len(body)} bytes, expected {npix}")
        values = np.frombuffer(body, dtype=np.uint8, count=npix)
    else:
        fields = re.sub(rb"#[^\n]*", b"", body).split()
        if len(fields) < npix:
            raise LengthError(f"PGM payload has {len(fields)} samples, expected {npix}")
        try:
            values = np.array([int(f) for f in fields[:npix]], dtype=np.int64)
        except ValueError as exc:
            raise FormatError(f"bad ASCII PGM sample: {exc}") from None
        if values.min() < 0 or values.max() > maxval:
            raise FormatError("ASCII PGM sample outside [0, maxval]")
    return GrayImage.from_flat(width, height, values.astype(np.uint8))


def write_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def save_pgm(img: GrayImage, path):
    with open(path, "wb") as fh:
        fh.write(write_pgm(img))


# -- manifest -------------------------------------------------------------------

def parse_poses(text: str) -> list[int]:
    poses = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            a, b = part.split("-", 1)
            a, b = int(a), int(b)
            if b < a:
                raise FormatError(f"empty pose range {part!r}")
            poses.extend(range(a, b + 1))
        else:
            poses.append(int(part))
    if len(set(poses)) != len(poses):
        raise FormatError(f"duplicate poses in {text!r}")
    return sorted(poses)


def _format_poses(poses) -> str:
    return ",".join(str(p) for p in poses)


def parse_manifest(text: str, base_dir=".") -> SplitManifest:
    root = None
    pattern = None
    known, unknown = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line.startswith("root="):
                root = line[len("root="):].strip()
            elif line.startswith("pattern="):
                pattern = line[len("pattern="):].strip()
            else:
                words = line.split()
                kind, subject = words[0], int(words[1])
                opts = dict(w.split("=", 1) for w in words[2:])
                if kind == "known":
                    known.append(KnownSubject(
                        subject,
                        parse_poses(opts.pop("train", "")),
                        parse_poses(opts.pop("test", "")),
                        opts.pop("set", "known"),
                    ))
                elif kind == "unknown":
                    unknown.append(UnknownSubject(
                        subject,
                        parse_poses(opts.pop("test", "")),
                        opts.pop("set", "unknown"),
                    ))
                else:
                    raise FormatError(f"unknown directive {kind!r}")
                if opts:
                    raise FormatError(f"unexpected options {sorted(opts)}")
        except (ValueError, IndexError) as exc:
            raise FormatError(f"manifest line {lineno}: {exc}") from None
    if pattern is None:
        raise FormatError("manifest has no pattern= directive")
    root_path = Path(base_dir) / (root if root is not None else ".")
    manifest = SplitManifest(root_path, pattern, known, unknown)
    manifest.validate()
    return manifest


def read_manifest(path) -> SplitManifest:
    path = Path(path)
    return parse_manifest(path.read_text(), base_dir=path.parent)


def format_manifest(manifest: SplitManifest, root: str | None = None) -> str:
    lines = [f"root={root if root is not None else manifest.root}",
             f"pattern={manifest.image_pattern}"]
    for ks in manifest.known_subjects:
        lines.append(f"known {ks.subject} train={_format_poses(ks.train_poses)} "
                     f"test={_format_poses(ks.test_poses)} set={ks.test_set}")
    for us in manifest.unknown_subjects:
        lines.append(f"unknown {us.subject} test={_format_poses(us.test_poses)} set={us.test_set}")
    return "\n".join(lines) + "\n"


def load_split(manifest: SplitManifest, reader=read_pgm) -> DatasetSplit:
    """Load every image named by `manifest`.

    Train images follow manifest subject order, then ascending pose. Test
    sets appear in order of first mention.
    """
    manifest.validate()
    shape = None
    first_path = None

    def load(subject, pose):
        nonlocal shape, first_path
        path = manifest.image_path(subject, pose)
        if not os.path.exists(path):
            raise FileNotFoundError(f"missing image file: {path}")
        img = reader(path)
        if shape is None:
            shape, first_path = img.pixels.shape, path
        elif img.pixels.shape != shape:
            raise ShapeError(
                f"{path} is {img.width}x{img.height} but {first_path} is {shape[1]}x{shape[0]}"
            )
        return LabeledImage(img, subject, pose, str(path))

    train = [load(ks.subject, p) for ks in manifest.known_subjects for p in ks.train_poses]

    sets: dict[str, TestSet] = {}
    for ks in manifest.known_subjects:
        ts = sets.setdefault(ks.test_set, TestSet(ks.test_set, True, []))
        ts.images.extend(load(ks.subject, p) for p in ks.test_poses)
    for us in manifest.unknown_subjects:
        ts = sets.setdefault(us.test_set, TestSet(us.test_set, False, []))
        ts.images.extend(load(us.subject, p) for p in us.test_poses)
    return DatasetSplit(train, list(sets.values()))


def orl_manifest(root, pattern="s{subject}/{pose}.pgm") -> SplitManifest:
    """The ORL protocol: 37 known subjects with 7 training poses each.

    test1 holds poses 8-10 of subjects 1-20, test2 the same poses of
    subjects 21-37; subjects 38-40 are unknown and split over test3
    (poses 1-3), test4 (poses 4-6) and test5 (poses 7-10).
    """
    known = [KnownSubject(s, list(range(1, 8)), [8, 9, 10], "test1" if s <= 20 else "test2")
             for s in range(1, 38)]
    unknown = []
    for name, poses in (("test3", [1, 2, 3]), ("test4", [4, 5, 6]), ("test5", [7, 8, 9, 10])):
        unknown.extend(UnknownSubject(s, poses, name) for s in (38, 39, 40))
    return SplitManifest(Path(root), pattern, known, unknown)
