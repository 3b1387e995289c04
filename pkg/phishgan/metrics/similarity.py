"""Similarity between real and generated URL matrices.

The matrices are compared as single-channel images with values in [0, 1].
"""

from __future__ import annotations

from collections.abc import Sequence

import dataclasses

import numpy as np
from scipy import ndimage

from phishgan.errors import ShapeError

SSIM_WINDOW = 7
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pair(a, b, where: str) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(where, a.shape, b.shape)
    return a, b


def mse(a, b) -> float:
    """Mean of the squared entrywise differences."""
    a, b = _pair(a, b, "mse")
    return float(np.mean((a - b) ** 2))


def nrmse(a, b) -> float:
    """Euclidean norm of `a - b` divided by the norm of the reference `a`.

    For one-hot references every row has norm 1, so
    nrmse == sqrt(number of columns * mse).

    Raises:
        ValueError: If the reference is all zeros.
    """
    a, b = _pair(a, b, "nrmse")
    norm = np.linalg.norm(a)
    if norm == 0:
        msg = "nrmse needs a reference that is not all zeros"
        raise ValueError(msg)
    return float(np.linalg.norm(a - b) / norm)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalized 2-D Gaussian window of `size` x `size`."""
    half = (size - 1) / 2
    y, x = np.ogrid[-half : half + 1, -half : half + 1]
    window = np.exp(-(x * x + y * y) / (2 * sigma * sigma))
    return window / window.sum()


def ssim(a, b, data_range: float = 1.0) -> float:
    """Mean structural similarity over all full Gaussian windows.

    Raises:
        ValueError: If the matrices are smaller than the window.
    """
    a, b = _pair(a, b, "ssim")
    if a.ndim != 2 or min(a.shape) < SSIM_WINDOW:
        msg = f"ssim needs 2-D inputs of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape}"
        raise ValueError(msg)
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    window = gaussian_window()
    pad = SSIM_WINDOW // 2
    valid = (slice(pad, -pad), slice(pad, -pad))

    def local(image: np.ndarray) -> np.ndarray:
        return ndimage.correlate(image, window, mode="constant")[valid]

    mu_a = local(a)
    mu_b = local(b)
    var_a = local(a * a) - mu_a**2
    var_b = local(b * b) - mu_b**2
    cov = local(a * b) - mu_a * mu_b
    ssim_map = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    )
    return float(ssim_map.mean())


@dataclasses.dataclass(frozen=True)
class SimilarityReport:
    """Per-pair metrics averaged over `count` pairs."""

    mse: float
    ssim: float
    nrmse: float
    count: int


def similarity_report(
    references: Sequence[np.ndarray], generated: Sequence[np.ndarray]
) -> SimilarityReport:
    """Average MSE, SSIM and NRMSE over matching reference/generated pairs.

    Raises:
        ValueError: If there are no pairs or the sequences differ in length.
    """
    if len(references) != len(generated):
        msg = f"{len(references)} references but {len(generated)} generated matrices"
        raise ValueError(msg)
    if not len(references):
        msg = "similarity report needs at least one pair"
        raise ValueError(msg)
    pairs = list(zip(references, generated, strict=True))
    return SimilarityReport(
        mse=float(np.mean([mse(a, b) for a, b in pairs])),
        ssim=float(np.mean([ssim(a, b) for a, b in pairs])),
        nrmse=float(np.mean([nrmse(a, b) for a, b in pairs])),
        count=len(pairs),
    )
