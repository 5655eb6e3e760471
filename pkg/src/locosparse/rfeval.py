"""Receptive-field estimation and spatial-phase statistics."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError, EmptyHistogramError
from .gabor import fold_phase
from .rng import CounterRng, derive_seed

_DEAD_RESPONSE = 1e-9


@dataclass(frozen=True)
class ReceptiveField:
    """Response-weighted stimulus average for one neuron.

    total_response is the normalizer that was used; zero marks a dead
    neuron whose image is all zeros.
    """

    image: np.ndarray
    neuron_id: int
    total_response: float

    @property
    def dead(self):
        return self.total_response == 0.0


def sta_receptive_fields(respond, patch_side, num_samples, seed, chunk_size=1024):
    """Spike-triggered averages under Gaussian white noise.

    Args:
        respond: callable mapping a d x c stimulus block to an m x c
            code block, d = patch_side**2.
        patch_side: pixel edge of the stimulus patches.
        num_samples: white-noise stimuli to draw.
        seed: stream seed; the same seed reproduces the fields exactly.
        chunk_size: stimuli per block handed to `respond`.

    Neuron j gets RF_j = sum_s x_j(y_s) y_s / sum_s x_j(y_s). Noise is
    drawn per sample (all d values of a stimulus are consecutive in the
    stream), so the draw does not depend on how many samples remain in
    the final chunk. Neurons whose total response stays below 1e-9 are
    flagged dead rather than divided by nearly nothing.
    """
    if num_samples < 1:
        raise ConfigError("num_samples must be positive")
    d = patch_side * patch_side
    rng = CounterRng(derive_seed(seed, "sta"))
    weighted = None
    totals = None
    done = 0
    while done < num_samples:
        c = min(chunk_size, num_samples - done)
        Y = rng.normals(d * c).reshape(c, d).T
        X = np.asarray(respond(Y), dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != c:
            raise ContractError(f"response block must be m x {c}, got {X.shape}")
        if weighted is None:
            weighted = np.zeros((d, X.shape[0]))
            totals = np.zeros(X.shape[0])
        weighted += Y @ X.T
        totals += X.sum(axis=1)
        done += c
    fields = []
    for j in range(totals.size):
        if totals[j] < _DEAD_RESPONSE:
            fields.append(ReceptiveField(np.zeros((patch_side, patch_side)), j, 0.0))
        else:
            image = (weighted[:, j] / totals[j]).reshape(patch_side, patch_side)
            fields.append(ReceptiveField(image, j, float(totals[j])))
    return fields


@dataclass(frozen=True)
class PhaseHistogram:
    bin_edges: np.ndarray  # degrees, length num_bins + 1
    counts: np.ndarray     # one count per bin
    excluded: int = 0      # non-converged fits that were skipped


def phase_histogram(params, num_bins):
    """Histogram the folded phases of converged fits over [0, 90] degrees.

    Interior bins are right-open; the last bin includes 90. Fits that
    did not converge are excluded and reported in the excluded field.
    """
    if num_bins < 2:
        raise ConfigError(f"need at least 2 bins, got {num_bins}")
    converged = [p for p in params if p.converged]
    excluded = len(params) - len(converged)
    if not converged:
        raise EmptyHistogramError("no converged fits to bin")
    edges = np.linspace(0.0, 90.0, num_bins + 1)
    width = 90.0 / num_bins
    counts = np.zeros(num_bins, dtype=np.int64)
    for p in converged:
        idx = min(int(fold_phase(p.phase) // width), num_bins - 1)
        counts[idx] += 1
    return PhaseHistogram(edges, counts, excluded)


def symmetry_score(hist):
    """Balance min(L, R) / max(L, R) of the mass below and above 45 degrees.

    1 means the two halves carry equal mass; values near 0 mean the
    distribution is piled up on one side.
    """
    n = int(hist.counts.size)
    if n == 0 or n % 2 != 0:
        raise ContractError("symmetry score needs an even number of bins")
    left = int(hist.counts[: n // 2].sum())
    right = int(hist.counts[n // 2:].sum())
    if max(left, right) == 0:
        raise EmptyHistogramError("histogram carries no mass")
    return min(left, right) / max(left, right)
