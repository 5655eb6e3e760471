"""Patch ingestion: deterministic sampling of image windows into columns."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError, ValidationError
from .rng import CounterRng, derive_seed


@dataclass(frozen=True)
class PatchSamplerConfig:
    patch_side: int
    count: int
    seed: int
    standardize: bool = True

    def __post_init__(self):
        if self.patch_side < 2:
            raise ConfigError(f"patch_side must be at least 2, got {self.patch_side}")
        if self.count < 1:
            raise ConfigError(f"count must be positive, got {self.count}")


@dataclass(frozen=True)
class StimulusBatch:
    """A d x n matrix whose columns are vectorized patches, d = patch_side**2."""

    patches: np.ndarray
    patch_side: int
    source_id: str = ""

    def __post_init__(self):
        if self.patches.ndim != 2 or self.patches.shape[0] != self.patch_side ** 2:
            raise ContractError(
                f"patches must be {self.patch_side ** 2} x n for "
                f"patch_side {self.patch_side}, got {self.patches.shape}")
        if not np.all(np.isfinite(self.patches)):
            raise ValidationError("stimulus batch contains non-finite values")

    @property
    def count(self):
        return self.patches.shape[1]


def sample_patches(images, cfg):
    """Draw cfg.count patches at uniform random top-left corners.

    Args:
        images: H x W array or H x W x C stack of grayscale frames.
        cfg: PatchSamplerConfig.

    The corners come from the counter generator in three blocks (frame
    index, row, column), so a seed pins the whole draw. Each patch is
    flattened row by row into a column. With standardization on, every
    non-constant patch is shifted to zero mean and scaled to unit norm;
    constant patches become zero vectors instead of blowing up.
    """
    stack = np.asarray(images, dtype=np.float64)
    if stack.ndim == 2:
        stack = stack[:, :, None]
    if stack.ndim != 3:
        raise ContractError(f"images must be H x W or H x W x C, got shape {stack.shape}")
    height, width, frames = stack.shape
    side = cfg.patch_side
    if side > min(height, width):
        raise ConfigError(f"patch_side {side} exceeds image extent {height}x{width}")

    rng = CounterRng(derive_seed(cfg.seed, "patches"))
    frame_idx = rng.integers(cfg.count, frames)
    rows = rng.integers(cfg.count, height - side + 1)
    cols = rng.integers(cfg.count, width - side + 1)

    d = side * side
    out = np.empty((d, cfg.count))
    for s in range(cfg.count):
        patch = stack[rows[s]:rows[s] + side, cols[s]:cols[s] + side, frame_idx[s]]
        col = patch.reshape(d).astype(np.float64, copy=True)
        if cfg.standardize:
            if np.all(col == col[0]):
                col = np.zeros(d)
            else:
                col -= col.mean()
                col /= np.linalg.norm(col)
        out[:, s] = col
    return StimulusBatch(out, side,
                         source_id=f"sampled(seed={cfg.seed}, count={cfg.count})")
