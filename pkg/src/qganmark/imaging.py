"""Image handling: digits ingestion, upscaling, Gaussian population
statistics and the Frechet distance between image sets.

The Frechet distance is computed on flattened raw pixels; no feature
extractor is involved, so only relative comparisons between image
populations are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError, ParseError, QganmarkError

COV_SYM_TOL = 1e-10
COV_EIG_TOL = -1e-8
FID_FLOOR = -1e-6


# ---------------------------------------------------------------------------
# digits dataset (8x8 grayscale, integer levels 0..16, 65-column CSV rows)

@dataclass(frozen=True)
class DigitsRecord:
    pixels: tuple[int, ...]  # 64 values in 0..16
    label: int

    def __post_init__(self):
        if len(self.pixels) != 64 or any(not 0 <= v <= 16 for v in self.pixels):
            raise DataError("digits record needs 64 pixel values in 0..16")
        if not 0 <= self.label <= 9:
            raise DataError(f"digit label {self.label} outside 0..9")


def load_digits_records(path: str | Path) -> list[DigitsRecord]:
    records = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 65:
            raise ParseError(f"expected 65 comma-separated values, got {len(parts)}", lineno)
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise ParseError(f"non-integer value in {line!r}", lineno) from None
        try:
            records.append(DigitsRecord(tuple(values[:64]), values[64]))
        except DataError as exc:
            raise ParseError(str(exc), lineno) from None
    return records


def save_digits_records(records: list[DigitsRecord], path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for rec in records:
            fh.write(",".join(str(v) for v in rec.pixels) + f",{rec.label}\n")


def load_digits(path: str | Path, label: int | None = None) -> np.ndarray:
    """(N, 8, 8) images scaled to [0, 1], optionally filtered by digit label."""
    records = load_digits_records(path)
    if label is not None:
        records = [r for r in records if r.label == label]
    if not records:
        raise DataError(f"no digit rows found in {path}" + (f" with label {label}" if label is not None else ""))
    arr = np.array([r.pixels for r in records], dtype=float) / 16.0
    return arr.reshape(-1, 8, 8)


def bundled_digits_path() -> Path:
    return Path(str(resources.files("qganmark") / "data" / "digits8x8.csv"))


# ---------------------------------------------------------------------------
# upscaling

def upscale(image: np.ndarray, side: int, method: str = "nearest") -> np.ndarray:
    """Deterministic upscaling of a square image to side x side."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2 or image.shape[0] != image.shape[1]:
        raise QganmarkError(f"expected a square image, got shape {image.shape}")
    src = image.shape[0]
    if side < src:
        raise QganmarkError(f"target side {side} smaller than source {src}")
    if method == "nearest":
        idx = (np.arange(side) * src) // side
        return image[np.ix_(idx, idx)]
    if method == "bilinear":
        # pixel-center alignment: sample at (i + 0.5) * src/side - 0.5
        pos = np.clip((np.arange(side) + 0.5) * src / side - 0.5, 0.0, src - 1.0)
        lo = np.floor(pos).astype(int)
        hi = np.minimum(lo + 1, src - 1)
        frac = pos - lo
        w_lo, w_hi = 1.0 - frac, frac
        rows = w_lo[:, None] * image[lo, :] + w_hi[:, None] * image[hi, :]
        return w_lo[None, :] * rows[:, lo] + w_hi[None, :] * rows[:, hi]
    raise QganmarkError(f"unknown upscale method {method!r}")


# ---------------------------------------------------------------------------
# population statistics and Frechet distance

@dataclass(frozen=True)
class GaussianStats:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if cov.shape != (mean.size, mean.size):
            raise DataError(f"covariance shape {cov.shape} does not match mean size {mean.size}")
        if np.max(np.abs(cov - cov.T)) > COV_SYM_TOL:
            raise DataError("covariance is not symmetric")


def gaussian_stats(images: np.ndarray) -> GaussianStats:
    """Sample mean and unbiased covariance of flattened image vectors."""
    x = np.asarray(images, dtype=float)
    x = x.reshape(x.shape[0], -1)
    if x.shape[0] < 2:
        raise DataError("need at least two samples for covariance")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (x.shape[0] - 1)
    return GaussianStats(mean, (cov + cov.T) / 2.0)


def _psd_sqrt(mat: np.ndarray, what: str) -> np.ndarray:
    evals, evecs = np.linalg.eigh((mat + mat.T) / 2.0)
    if evals.min() < COV_EIG_TOL:
        raise DataError(f"{what} has eigenvalue {evals.min()}, not PSD")
    evals = np.maximum(evals, 0.0)
    return (evecs * np.sqrt(evals)) @ evecs.T


def fid(a: GaussianStats, b: GaussianStats) -> float:
    """||m1 - m2||^2 + Tr(C1 + C2 - 2 (C1 C2)^(1/2)).

    The matrix square root comes from a symmetric eigendecomposition of
    sqrt(C1) C2 sqrt(C1), which shares its spectrum with C1 C2.
    """
    if a.mean.size != b.mean.size:
        raise DataError(f"dimension mismatch: {a.mean.size} vs {b.mean.size}")
    diff = a.mean - b.mean
    s1 = _psd_sqrt(a.cov, "first covariance")
    inner = s1 @ b.cov @ s1
    evals = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    if evals.min() < COV_EIG_TOL:
        raise DataError(f"product matrix has eigenvalue {evals.min()}, not PSD")
    trace_sqrt = np.sqrt(np.maximum(evals, 0.0)).sum()
    value = float(diff @ diff + np.trace(a.cov) + np.trace(b.cov) - 2.0 * trace_sqrt)
    if value < FID_FLOOR:
        raise DataError(f"Frechet distance {value} below numerical floor")
    return max(value, 0.0)


def fid_between_image_sets(first: np.ndarray, second: np.ndarray) -> float:
    return fid(gaussian_stats(first), gaussian_stats(second))


# ---------------------------------------------------------------------------
# labeled image sets (one row per generated image)

DATASET_HEADER = ["train_label", "infer_label", "seed"] + [f"p{i}" for i in range(64)]


@dataclass
class LabeledImageSet:
    """Generated 8x8 images tagged with training-hardware label,
    inference-hardware label and generation seed."""

    pixels: np.ndarray  # (N, 64) in [0, 1]
    train_labels: list[str]
    infer_labels: list[str]
    seeds: list[int]

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=float).reshape(len(self.train_labels), 64)
        n = len(self.train_labels)
        if not (len(self.infer_labels) == len(self.seeds) == n):
            raise DataError("label and seed columns must align with pixel rows")
        if self.pixels.size and (self.pixels.min() < 0.0 or self.pixels.max() > 1.0):
            raise DataError("pixels outside [0, 1]")

    def __len__(self) -> int:
        return len(self.train_labels)

    def images8(self) -> np.ndarray:
        return self.pixels.reshape(-1, 8, 8)

    def subset(self, mask) -> "LabeledImageSet":
        idx = np.flatnonzero(mask) if np.asarray(mask).dtype == bool else np.asarray(mask)
        return LabeledImageSet(
            self.pixels[idx],
            [self.train_labels[i] for i in idx],
            [self.infer_labels[i] for i in idx],
            [self.seeds[i] for i in idx],
        )

    @staticmethod
    def concat(parts: list["LabeledImageSet"]) -> "LabeledImageSet":
        if not parts:
            return LabeledImageSet(np.empty((0, 64)), [], [], [])
        return LabeledImageSet(
            np.concatenate([p.pixels for p in parts]),
            sum((p.train_labels for p in parts), []),
            sum((p.infer_labels for p in parts), []),
            sum((p.seeds for p in parts), []),
        )

    def save(self, path: str | Path) -> None:
        with Path(path).open("w") as fh:
            fh.write(",".join(DATASET_HEADER) + "\n")
            for i in range(len(self)):
                row = [self.train_labels[i], self.infer_labels[i], str(self.seeds[i])]
                row += [repr(float(v)) for v in self.pixels[i]]
                fh.write(",".join(row) + "\n")

    @staticmethod
    def load(path: str | Path) -> "LabeledImageSet":
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0].split(",") != DATASET_HEADER:
            raise ParseError(f"{path} lacks the labeled-image-set header", 1)
        pixels, train_labels, infer_labels, seeds = [], [], [], []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split(",")
            if len(parts) != len(DATASET_HEADER):
                raise ParseError(f"expected {len(DATASET_HEADER)} columns, got {len(parts)}", lineno)
            train_labels.append(parts[0])
            infer_labels.append(parts[1])
            try:
                seeds.append(int(parts[2]))
                pixels.append([float(v) for v in parts[3:]])
            except ValueError:
                raise ParseError(f"bad numeric value in row {parts[:3]}", lineno) from None
        arr = np.array(pixels, dtype=float) if pixels else np.empty((0, 64))
        return LabeledImageSet(arr, train_labels, infer_labels, seeds)
