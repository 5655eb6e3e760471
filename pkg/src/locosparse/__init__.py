"""Locality-regularized sparse coding with an unrolled simplex encoder."""

from .encoder import (EncodeTrace, EncoderConfig, MomentumSchedule, encode,
                      momentum_schedule, spectral_norm_sq_inv)
from .errors import (ConfigError, ContractError, DegenerateInputError,
                     DivergenceError, EmptyHistogramError, FormatError,
                     LocosparseError, NumericalError, StorageError,
                     ValidationError)
from .gabor import GaborParams, canonical_vector, fold_phase, gabor_fit, render_gabor, shape_metrics
from .graphs import GraphLaplacian, bipartite_laplacian, knn_adjacency, laplacian_from_adjacency
from .patches import PatchSamplerConfig, StimulusBatch, sample_patches
from .penalties import (PenaltyConfig, l1_penalty, lap_code_gradient, lap_penalty,
                        wl_atom_gradient, wl_code_gradient, wl_penalty)
from .rfeval import (PhaseHistogram, ReceptiveField, phase_histogram,
                     sta_receptive_fields, symmetry_score)
from .rng import CounterRng, derive_seed, mix64
from .simplex import (atom_distances, pairwise_sq_distances, project_columns,
                      project_simplex, quadratic_neuron)
from .spectral import ClusterAssignment, spectral_cluster, symmetric_eigendecomposition
from .tensor import as_tensor, load_tensor, read_pgm, save_tensor
from .trainer import (Dictionary, TrainConfig, TrainedModel, decode,
                      dictionary_step, init_dictionary, load_model, save_model,
                      train)

__version__ = "0.1.0"
