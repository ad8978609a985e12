"""Memory-time image perturbation: Gaussian pixel noise and Gaussian blur.

Both operations work in the 8-bit pixel domain and return a new
:class:`~vismem.image.ImageBuffer` of the same shape, so perturbed images
stay valid inputs for any encoder. Everything here is a pure function of
(image bytes, parameters): noise is drawn from a Philox stream keyed by
the PerturbationSpec seed, blur has no randomness at all.

Conventions, fixed so results are reproducible bit for bit:

* noise sigma is in pixel-value units on the [0, 255] scale, drawn
  independently per pixel per channel, then rounded (half-to-even) and
  clamped back to [0, 255];
* the blur kernel is truncated at radius ``ceil(3 * sigma)`` and
  renormalized to sum to 1; borders are handled by edge replication;
  rounding/clamping happens once, after both separable passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .image import ImageBuffer
from .rng import derive_seed, make_generator


class PerturbationKind(str, Enum):
    NONE = "none"
    GAUSSIAN_NOISE = "noise"
    GAUSSIAN_BLUR = "blur"


@dataclass(frozen=True)
class PerturbationSpec:
    """What to do to an image before it is memorized.

    ``sigma`` is in pixel-value units for noise and in pixel-distance
    units for blur. ``seed`` fully determines the noise realization.
    """

    kind: PerturbationKind = PerturbationKind.NONE
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")

    def for_item(self, item_id: str) -> "PerturbationSpec":
        """Spec with a per-item child seed, so draw order never matters."""
        return replace(self, seed=derive_seed(self.seed, item_id))


def add_gaussian_noise(img: ImageBuffer, sigma_n: float, seed: int) -> ImageBuffer:
    """Add zero-mean Gaussian noise of std ``sigma_n`` to every pixel."""
    if sigma_n < 0:
        raise ValueError(f"sigma_n must be >= 0, got {sigma_n}")
    if sigma_n == 0:
        return img.copy()
    rng = make_generator(seed)
    noise = rng.normal(0.0, sigma_n, size=img.pixels.shape)
    noisy = img.pixels.astype(np.float64) + noise
    return ImageBuffer(np.clip(np.rint(noisy), 0, 255).astype(np.uint8))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian kernel truncated at radius ceil(3*sigma)."""
    radius = math.ceil(3 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets**2) / (2 * sigma**2))
    return weights / weights.sum()


def _convolve_axis(data: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0)] * data.ndim
    pad[axis] = (radius, radius)
    padded = np.pad(data, pad, mode="edge")
    out = np.zeros_like(data)
    n = data.shape[axis]
    for k, w in enumerate(kernel):
        sl = [slice(None)] * data.ndim
        sl[axis] = slice(k, k + n)
        out += w * padded[tuple(sl)]
    return out


def gaussian_blur(img: ImageBuffer, sigma_b: float) -> ImageBuffer:
    """Separable Gaussian blur: horizontal pass then vertical pass."""
    if sigma_b < 0:
        raise ValueError(f"sigma_b must be >= 0, got {sigma_b}")
    if sigma_b == 0:
        return img.copy()
    kernel = gaussian_kernel(sigma_b)
    blurred = img.pixels.astype(np.float64)
    blurred = _convolve_axis(blurred, kernel, axis=1)
    blurred = _convolve_axis(blurred, kernel, axis=0)
    return ImageBuffer(np.clip(np.rint(blurred), 0, 255).astype(np.uint8))


def perturb(img: ImageBuffer, spec: PerturbationSpec) -> ImageBuffer:
    """Apply the perturbation described by ``spec``."""
    if spec.kind is PerturbationKind.NONE:
        return img.copy()
    if spec.kind is PerturbationKind.GAUSSIAN_NOISE:
        return add_gaussian_noise(img, spec.sigma, spec.seed)
    if spec.kind is PerturbationKind.GAUSSIAN_BLUR:
        return gaussian_blur(img, spec.sigma)
    raise ValueError(f"unknown perturbation kind: {spec.kind!r}")
