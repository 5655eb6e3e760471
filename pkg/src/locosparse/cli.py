"""Command-line surface: train, eval, cluster, render.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import dataclasses
import shlex
import sys
import time

import numpy as np

from .encoder import MOMENTUM_MODES, EncoderConfig, encode
from .errors import LocosparseError
from .gabor import GaborParams, fold_phase, gabor_fit
from .graphs import bipartite_laplacian, knn_adjacency, laplacian_from_adjacency
from .manifest import write_manifest
from .penalties import KINDS, PenaltyConfig
from .render import render_grid_svg
from .rfeval import ReceptiveField, phase_histogram, sta_receptive_fields, symmetry_score
from .spectral import spectral_cluster
from .tensor import load_image_stack, load_tensor
from .trainer import TrainConfig, load_model, save_model, train


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _non_negative_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _bin_count(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 bins, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="locosparse",
        description="Locality-regularized sparse coding of image patches.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="learn a dictionary from image patches")
    p.add_argument("--data", required=True, help="SCT or PGM image file")
    p.add_argument("--penalty", required=True, choices=KINDS)
    p.add_argument("--lambda", dest="lam", type=_non_negative_float, default=0.5)
    p.add_argument("--patch-size", type=_positive_int, default=8)
    p.add_argument("--num-atoms", type=_positive_int, default=64)
    p.add_argument("--steps", type=_positive_int, default=15)
    p.add_argument("--momentum", choices=MOMENTUM_MODES, default="aswritten")
    p.add_argument("--epochs", type=_non_negative_int, default=200)
    p.add_argument("--batch-size", type=_positive_int, default=100)
    p.add_argument("--knn-k", type=_positive_int, default=4)
    p.add_argument("--lr", type=_positive_float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--standardize", action="store_true",
                   help="zero-mean and unit-norm each sampled patch")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="fit Gabors to receptive-field estimates")
    p.add_argument("--model", required=True, help="model prefix from train")
    p.add_argument("--samples", type=_positive_int, default=20000)
    p.add_argument("--source", choices=("sta", "atoms"), default="sta")
    p.add_argument("--bins", type=_bin_count, default=9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("cluster", help="spectral clustering of codes or stimuli")
    p.add_argument("--codes", required=True, help="SCT tensor of codes or stimuli")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--mode", choices=("bipartite", "stimuli"), required=True)
    p.add_argument("--knn-k", type=_positive_int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("render", help="render a 2-D tensor as a filter grid")
    p.add_argument("--tensor", required=True, help="SCT tensor, columns are filters")
    p.add_argument("--cols", type=_positive_int, default=8)
    p.add_argument("--cell", type=_positive_float, default=32.0)
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=_cmd_render)
    return parser


def entrypoint(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    command = shlex.join(["locosparse"] + argv)
    try:
        return args.func(args, command)
    except LocosparseError as exc:
        print(f"locosparse: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"locosparse: error: {exc}", file=sys.stderr)
        return 1


def _usage_failure(message):
    print(f"locosparse: error: {message}", file=sys.stderr)
    return 2


def _fmt_float(x):
    return repr(float(x))


def _cmd_train(args, command):
    start = time.time()
    images = load_image_stack(args.data)
    cfg = TrainConfig(
        num_atoms=args.num_atoms,
        patch_side=args.patch_size,
        penalty=PenaltyConfig(args.penalty, args.lam),
        encoder=EncoderConfig(None, args.steps, args.momentum),
        epochs=args.epochs,
        batch_size=args.batch_size,
        dict_learning_rate=args.lr,
        knn_k=args.knn_k,
        seed=args.seed,
        standardize=args.standardize,
    )
    model = train(images, cfg)
    save_model(model, args.out)
    loss_path = f"{args.out}.loss.csv"
    with open(loss_path, "w", encoding="utf-8") as fh:
        fh.write("batch,loss\n")
        for i, value in enumerate(model.loss_history):
            fh.write(f"{i},{_fmt_float(value)}\n")
    outputs = [f"{args.out}.sct", f"{args.out}.meta", loss_path,
               f"{args.out}.manifest.txt"]
    config = {
        "penalty": args.penalty, "lambda": _fmt_float(args.lam),
        "patch_size": args.patch_size, "num_atoms": args.num_atoms,
        "steps": args.steps, "momentum": args.momentum,
        "epochs": args.epochs, "batch_size": args.batch_size,
        "knn_k": args.knn_k, "lr": _fmt_float(args.lr), "seed": args.seed,
        "standardize": args.standardize,
    }
    write_manifest(outputs[-1], command, config, [args.data], outputs,
                   time.time() - start)
    print(f"trained {args.penalty} dictionary with {args.num_atoms} atoms: {outputs[0]}")
    return 0


def _cmd_eval(args, command):
    start = time.time()
    dictionary, meta = load_model(args.model)
    atoms = dictionary.atoms
    side = dictionary.patch_side

    if args.source == "atoms":
        fields = [ReceptiveField(atoms[:, j].reshape(side, side), j, 1.0)
                  for j in range(atoms.shape[1])]
    else:
        base_cfg = EncoderConfig(PenaltyConfig(meta["penalty"], meta["lambda"]),
                                 meta["steps"], meta["momentum_mode"])
        knn_k = meta["knn_k"]

        def respond(Y):
            cfg = base_cfg
            if cfg.penalty.kind == "lap":
                graph = laplacian_from_adjacency(knn_adjacency(Y, knn_k))
                cfg = dataclasses.replace(
                    cfg, penalty=dataclasses.replace(cfg.penalty, laplacian=graph.matrix))
            return encode(Y, atoms, cfg)[0]

        fields = sta_receptive_fields(respond, side, args.samples, args.seed)

    center = (side - 1) / 2.0
    params = []
    for rf in fields:
        if rf.total_response == 0.0 or not rf.image.any():
            params.append(GaborParams(0.0, center, center, 0.0, side / 4.0,
                                      side / 4.0, 0.05, 0.0,
                                      residual=1.0, converged=False))
        else:
            params.append(gabor_fit(rf))

    gabor_path = f"{args.out}.gabor.csv"
    with open(gabor_path, "w", encoding="utf-8") as fh:
        fh.write("neuron_id,K,u0,v0,theta_rad,sigma_x,sigma_y,freq,phase_rad,"
                 "phase_folded_deg,n_x,n_y,residual,converged\n")
        for j, p in enumerate(params):
            if p.converged:
                n_x, n_y = p.sigma_x * p.freq, p.sigma_y * p.freq
            else:
                n_x, n_y = float("nan"), float("nan")
            row = [str(j), _fmt_float(p.amplitude), _fmt_float(p.u0),
                   _fmt_float(p.v0), _fmt_float(p.theta), _fmt_float(p.sigma_x),
                   _fmt_float(p.sigma_y), _fmt_float(p.freq), _fmt_float(p.phase),
                   _fmt_float(fold_phase(p.phase)), _fmt_float(n_x), _fmt_float(n_y),
                   _fmt_float(p.residual), "true" if p.converged else "false"]
            fh.write(",".join(row) + "\n")

    hist = phase_histogram(params, args.bins)
    phases_path = f"{args.out}.phases.csv"
    with open(phases_path, "w", encoding="utf-8") as fh:
        fh.write("bin_lo_deg,bin_hi_deg,count\n")
        for i in range(hist.counts.size):
            fh.write(f"{_fmt_float(hist.bin_edges[i])},"
                     f"{_fmt_float(hist.bin_edges[i + 1])},{int(hist.counts[i])}\n")

    # the balance score needs an even split at 45 degrees, so compute it
    # from a two-bin histogram of the same fits
    balance = symmetry_score(phase_histogram(params, 2))
    converged_count = sum(1 for p in params if p.converged)
    summary_path = f"{args.out}.summary.txt"
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write(f"neurons={len(params)}\n")
        fh.write(f"converged={converged_count}\n")
        fh.write(f"non_converged={len(params) - converged_count}\n")
        fh.write(f"symmetry_score={_fmt_float(balance)}\n")
        fh.write(f"source={args.source}\n")
        fh.write(f"bins={args.bins}\n")

    outputs = [gabor_path, phases_path, summary_path, f"{args.out}.manifest.txt"]
    config = {"model": args.model, "samples": args.samples, "source": args.source,
              "bins": args.bins, "seed": args.seed}
    inputs = [f"{args.model}.sct", f"{args.model}.meta"]
    write_manifest(outputs[-1], command, config, inputs, outputs,
                   time.time() - start)
    print(f"fitted {converged_count}/{len(params)} neurons: {gabor_path}")
    return 0


def _cmd_cluster(args, command):
    X = load_tensor(args.codes)
    if X.ndim != 2:
        return _usage_failure("codes tensor must be 2-D")
    if args.mode == "bipartite":
        graph = bipartite_laplacian(X)
        sides = ["atom"] * X.shape[0] + ["stimulus"] * X.shape[1]
    else:
        if args.knn_k >= X.shape[1]:
            return _usage_failure(
                f"knn-k {args.knn_k} needs more than {X.shape[1]} stimuli")
        graph = laplacian_from_adjacency(knn_adjacency(X, args.knn_k))
        sides = ["stimulus"] * X.shape[1]
    if args.k > graph.num_vertices:
        return _usage_failure(
            f"k={args.k} exceeds the vertex count {graph.num_vertices}")
    assignment = spectral_cluster(graph, args.k, seed=args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("vertex_id,side,label\n")
        for vid, (side_name, label) in enumerate(zip(sides, assignment.labels)):
            fh.write(f"{vid},{side_name},{int(label)}\n")
    return 0


def _cmd_render(args, command):
    M = load_tensor(args.tensor)
    if M.ndim != 2:
        return _usage_failure("render expects a 2-D tensor")
    svg = render_grid_svg(M, args.cols, args.cell)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return 0
