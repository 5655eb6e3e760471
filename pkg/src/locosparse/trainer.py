"""Dictionary learning: alternate unrolled encoding with atom updates.

The outer loop samples a fresh patch batch per epoch, encodes it with
the unrolled network, and takes one gradient step on the atoms followed
by column renormalization. Atoms that lose their norm or receive no
activation in a batch are redrawn from the seeded generator.
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .encoder import EncoderConfig, encode
from .errors import (ConfigError, ContractError, DivergenceError, FormatError,
                     StorageError, ValidationError)
from .graphs import knn_adjacency, laplacian_from_adjacency
from .patches import PatchSamplerConfig, sample_patches
from .penalties import PenaltyConfig, wl_atom_gradient
from .rng import CounterRng, derive_seed
from .tensor import load_tensor, save_tensor

_DEAD_NORM = 1e-12


@dataclass(frozen=True)
class Dictionary:
    """d x m basis matrix with unit-norm columns, d = patch_side**2."""

    atoms: np.ndarray
    patch_side: int

    def __post_init__(self):
        if self.atoms.ndim != 2 or self.atoms.shape[0] != self.patch_side ** 2:
            raise ContractError(
                f"atoms must be {self.patch_side ** 2} x m for "
                f"patch_side {self.patch_side}, got {self.atoms.shape}")
        if not np.all(np.isfinite(self.atoms)):
            raise ValidationError("dictionary contains non-finite entries")

    @property
    def num_atoms(self):
        return self.atoms.shape[1]


@dataclass(frozen=True)
class TrainConfig:
    num_atoms: int
    patch_side: int
    penalty: PenaltyConfig
    encoder: EncoderConfig = EncoderConfig()
    epochs: int = 200
    batch_size: int = 100
    dict_learning_rate: float = 1.0
    knn_k: int = 4
    seed: int = 0
    standardize: bool = False

    def __post_init__(self):
        for name in ("num_atoms", "patch_side", "batch_size", "knn_k"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.epochs < 0:
            raise ConfigError("epochs must be non-negative")
        if self.dict_learning_rate <= 0:
            raise ConfigError("dict_learning_rate must be positive")


@dataclass(frozen=True)
class TrainedModel:
    dictionary: Dictionary
    config: TrainConfig
    loss_history: np.ndarray
    reinit_events: list = field(default_factory=list)

    def __post_init__(self):
        if not np.all(np.isfinite(self.loss_history)):
            raise ValidationError("loss history contains non-finite values")


def init_dictionary(d, m, seed):
    """Standard-normal entries, then unit-norm columns."""
    if d < 1 or m < 1:
        raise ConfigError("dictionary dimensions must be positive")
    atoms = CounterRng(seed).normals(d * m).reshape(d, m)
    norms = np.sqrt((atoms * atoms).sum(axis=0))
    norms[norms == 0.0] = 1.0
    return atoms / norms


def decode(A, X):
    """Linear readout AX."""
    atoms = A.atoms if isinstance(A, Dictionary) else np.asarray(A, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if atoms.ndim != 2 or X.ndim != 2 or atoms.shape[1] != X.shape[0]:
        raise ContractError(f"shape mismatch: A {atoms.shape} vs X {X.shape}")
    return atoms @ X


def dictionary_step(A, Y, X, penalty, lr, rng=None):
    """One gradient step on the atoms, renormalized column-wise.

    The data term is (AX - Y) X^T; the wl penalty adds its locality
    pull (other penalties do not touch A). Columns whose norm collapses
    are redrawn as fresh unit vectors from `rng`. Returns the updated
    atoms together with the redrawn column indices.
    """
    A = np.asarray(A, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if (A.ndim != 2 or Y.ndim != 2 or X.ndim != 2 or A.shape[0] != Y.shape[0]
            or X.shape[0] != A.shape[1] or X.shape[1] != Y.shape[1]):
        raise ContractError(f"shape mismatch: A {A.shape}, Y {Y.shape}, X {X.shape}")
    b = Y.shape[1]
    if penalty.kind == "wl":
        grad = wl_atom_gradient(Y, A, X, penalty.lam)
    else:
        grad = (A @ X - Y) @ X.T
    if not np.all(np.isfinite(grad)):
        raise DivergenceError("non-finite dictionary gradient")
    out = A - (lr / b) * grad
    norms = np.sqrt((out * out).sum(axis=0))
    dead = np.flatnonzero(norms < _DEAD_NORM)
    alive = norms >= _DEAD_NORM
    out[:, alive] /= norms[alive]
    if dead.size:
        if rng is None:
            rng = CounterRng(derive_seed(0, "dict-reinit"))
        for j in dead:
            col = rng.normals(out.shape[0])
            out[:, j] = col / np.linalg.norm(col)
    return out, [int(j) for j in dead]


def train(images, cfg):
    """Learn a dictionary from image patches.

    Every epoch draws one batch. For the lap penalty the batch graph
    (binary kNN with k = cfg.knn_k) is rebuilt from the raw batch each
    time. The recorded loss is the composite batch objective at the
    final codes divided by the batch size. Fully deterministic for a
    given cfg.seed.
    """
    d = cfg.patch_side ** 2
    atoms = init_dictionary(d, cfg.num_atoms, derive_seed(cfg.seed, "dict-init"))
    reinit_rng = CounterRng(derive_seed(cfg.seed, "dict-reinit"))
    losses = np.empty(cfg.epochs)
    reinit_events = []
    for batch_idx in range(cfg.epochs):
        sampler = PatchSamplerConfig(cfg.patch_side, cfg.batch_size,
                                     derive_seed(cfg.seed, "batch", batch_idx),
                                     standardize=cfg.standardize)
        batch = sample_patches(images, sampler)
        Y = batch.patches
        pen = cfg.penalty
        if pen.kind == "lap":
            graph = laplacian_from_adjacency(knn_adjacency(Y, cfg.knn_k))
            pen = dataclasses.replace(pen, laplacian=graph.matrix)
        X, trace = encode(Y, atoms, dataclasses.replace(cfg.encoder, penalty=pen))
        losses[batch_idx] = trace.objective_per_step[-1] / cfg.batch_size
        atoms, redrawn = dictionary_step(atoms, Y, X, pen,
                                         cfg.dict_learning_rate, reinit_rng)
        inactive = [int(j) for j in np.flatnonzero(np.abs(X).sum(axis=1) == 0.0)
                    if int(j) not in redrawn]
        for j in inactive:
            col = reinit_rng.normals(d)
            atoms[:, j] = col / np.linalg.norm(col)
        flagged = sorted(set(redrawn) | set(inactive))
        if flagged:
            reinit_events.append((batch_idx, tuple(flagged)))
    return TrainedModel(Dictionary(atoms, cfg.patch_side), cfg, losses, reinit_events)


_META_KEYS = ("penalty", "lambda", "patch_side", "steps", "momentum_mode",
              "seed", "epochs", "batch_size", "knn_k")
_META_INT_KEYS = ("patch_side", "steps", "seed", "epochs", "batch_size", "knn_k")


def save_model(model, prefix):
    """Write <prefix>.sct (the atoms) and <prefix>.meta (key=value lines)."""
    save_tensor(model.dictionary.atoms, f"{prefix}.sct")
    cfg = model.config
    values = {
        "penalty": cfg.penalty.kind,
        "lambda": repr(float(cfg.penalty.lam)),
        "patch_side": str(cfg.patch_side),
        "steps": str(cfg.encoder.steps),
        "momentum_mode": cfg.encoder.momentum_mode,
        "seed": str(cfg.seed),
        "epochs": str(cfg.epochs),
        "batch_size": str(cfg.batch_size),
        "knn_k": str(cfg.knn_k),
    }
    try:
        with open(f"{prefix}.meta", "w", encoding="utf-8") as fh:
            for key in _META_KEYS:
                fh.write(f"{key}={values[key]}\n")
    except OSError as exc:
        raise StorageError(f"cannot write metadata to {prefix}.meta: {exc}") from exc


def load_model(prefix):
    """Read back (Dictionary, meta dict) as written by save_model."""
    atoms = load_tensor(f"{prefix}.sct")
    path = f"{prefix}.meta"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise StorageError(f"cannot read metadata from {path}: {exc}") from exc
    meta = {}
    for line in lines:
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"{path}: malformed line {line!r}")
        meta[key] = value
    missing = [key for key in _META_KEYS if key not in meta]
    if missing:
        raise FormatError(f"{path}: missing keys {missing}")
    try:
        meta["lambda"] = float(meta["lambda"])
        for key in _META_INT_KEYS:
            meta[key] = int(meta[key])
    except ValueError as exc:
        raise FormatError(f"{path}: malformed numeric value: {exc}") from exc
    if atoms.ndim != 2 or atoms.shape[0] != meta["patch_side"] ** 2:
        raise FormatError(
            f"{prefix}.sct holds {atoms.shape}, inconsistent with "
            f"patch_side {meta['patch_side']}")
    return Dictionary(atoms, meta["patch_side"]), meta
