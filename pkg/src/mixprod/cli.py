"""Command-line interface: ``mixprod <subcommand> ...``.

Every run prints its resolved configuration as a ``# config {...}`` line on
stdout.  Files are JSON (models, moments, results, adversarial pairs), plain
text (samples) or CSV (``eval``).  Exit status is 0 only when the output was
written and every internal certificate held.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from itertools import combinations

import numpy as np

from . import __version__
from .adversarial import CertificateFailed, default_eps, lower_bound_instance
from .errors import (
    ComplexSpectrum,
    DegeneratePi,
    EigenvalueCollision,
    MixprodError,
    NearSingular,
    NoViableCandidate,
    NormalizationUnstable,
    PreconditionFailed,
    RankDeficient,
)
from .hadamard import hadamard_extension, kruskal_rank, sigma_k_cst_lower_bound, sigma_k_lower_bound
from .identify import IdentifyOptions, default_partition, extend_to_all_observables, identify, identify_search
from .linalg import sigma_k
from .model import load_model, model_distance, random_model, save_model, stat_distance
from .moments import (
    SubsetPartition,
    assemble_pair_matrices,
    empirical_moments,
    exact_moments,
    load_moments,
    save_moments,
)
from .sampler import draw_samples, read_samples, write_samples

log = logging.getLogger("mixprod")

CSV_HEADER = ["N", "seed", "d_stat", "d_model", "fit_residual", "runtime_ms"]
MAX_DIAG_SUBSETS = 256

_CAUSES = [
    (EigenvalueCollision, "eigenvalue collision: anchor observable not sufficiently separated (cf. zeta-separation assumption)"),
    (RankDeficient, "rank deficient: sigma_k(C_ST) is too small; the blocks S, T cannot resolve k components"),
    (ComplexSpectrum, "complex spectrum: moment noise is too large for the diagonalization step"),
    (NormalizationUnstable, "unstable normalization: a recovered component has a vanishing empty-set entry"),
    (DegeneratePi, "degenerate mixing weights: a recovered weight is too close to zero"),
    (NearSingular, "near-singular linear system in the recovery step"),
    (NoViableCandidate, "no candidate partition could be decomposed"),
    (PreconditionFailed, "precondition failed"),
    (CertificateFailed, "certificate failed"),
]


class CliError(Exception):
    pass


def _describe(exc: Exception) -> str:
    for cls, cause in _CAUSES:
        if isinstance(exc, cls):
            return f"{cause} ({exc})"
    return str(exc)


def _echo_config(args) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print("# config " + json.dumps(config, sort_keys=True, default=str))


def _write_json(obj, path) -> None:
    text = json.dumps(obj) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _options(args) -> IdentifyOptions:
    opts = IdentifyOptions(project_simplex=args.project_simplex, max_candidates=args.max_candidates)
    if args.rank_rtol is not None:
        opts.rank_rtol = args.rank_rtol
    if args.sep_rtol is not None:
        opts.sep_rtol = args.sep_rtol
    if args.min_subset_size is not None:
        opts.min_subset_size = args.min_subset_size
    return opts


def cmd_generate(args) -> int:
    model = random_model(args.k, args.n, args.zeta, args.pi_min, args.seed)
    if args.out in (None, "-"):
        _write_json(model.to_dict(), None)
    else:
        save_model(model, args.out)
    return 0


def cmd_sample(args) -> int:
    if args.N < 0:
        raise CliError("--N must be non-negative")
    model = load_model(args.model)
    batch = draw_samples(model, args.N, args.seed)
    if args.out in (None, "-"):
        buf = io.StringIO()
        buf.write(f"# n={batch.n} N={batch.N} seed={batch.seed}\n")
        for row in batch.data:
            buf.write(" ".join(map(str, row)) + "\n")
        sys.stdout.write(buf.getvalue())
    else:
        write_samples(batch, args.out)
    return 0


def cmd_moments(args) -> int:
    if args.exact:
        mu = exact_moments(load_model(args.exact))
    else:
        mu = empirical_moments(read_samples(args.samples))
    if args.out in (None, "-"):
        _write_json(mu.to_dict(), None)
    else:
        save_moments(mu, args.out)
    return 0


def cmd_identify(args) -> int:
    mu = load_moments(args.moments)
    opts = _options(args)
    if args.search:
        result = identify_search(mu, args.k, opts)
    else:
        try:
            partition = SubsetPartition.parse(args.subset) if args.subset else default_partition(args.k, mu.n)
        except ValueError as exc:
            raise CliError(f"malformed --subset: {exc}") from exc
        result = identify(mu, partition, args.k, opts)
    m_full = extend_to_all_observables(result, mu, opts) if args.extend else None
    payload = result.to_dict(m_full)
    if args.extend:
        payload["diagnostics"]["observables"] = list(range(mu.n))
    _write_json(payload, args.out)
    log.info("fit residual %.3g, sigma_k(C) %.3g", result.diagnostics.fit_residual, result.diagnostics.sigma_k_Ctilde)
    return 0


def cmd_compare(args) -> int:
    a = load_model(args.model_a, check=False)
    b = load_model(args.model_b, check=False)
    print(repr(model_distance(a, b)))
    return 0


def cmd_statdist(args) -> int:
    print(repr(stat_distance(load_moments(args.mu_a), load_moments(args.mu_b))))
    return 0


def cmd_adversarial(args) -> int:
    eps = args.eps if args.eps is not None else default_eps(args.k)
    pair = lower_bound_instance(args.k, eps)
    _write_json(pair.to_dict(), args.out)
    print(
        f"# certificates: d_model={pair.certified_model_gap!r} > eps={pair.eps!r}; "
        f"d_stat={pair.certified_stat_gap!r} <= 4*k*sigma*eps={pair.stat_gap_bound!r}; "
        f"sigma={pair.sigma!r} <= {pair.sigma_upper_bound!r} < 1/2"
    )
    return 0


def diagnose(model) -> dict:
    """Measured singular values and Kruskal ranks next to their theoretical lower bounds."""
    k, n = model.k, model.n
    if k > 1:
        gaps = np.abs(model.m[:, :, None] - model.m[:, None, :])
        gaps[:, np.arange(k), np.arange(k)] = np.inf
        zeta = float(gaps.min())
    else:
        zeta = 1.0
    pi_min = float(model.pi.min())
    sbar = sigma_k_lower_bound(k, zeta)
    cst_bound = sigma_k_cst_lower_bound(k, zeta, pi_min)
    subsets = []
    for S in combinations(range(n), min(k - 1, n)):
        if len(subsets) >= MAX_DIAG_SUBSETS:
            break
        H = hadamard_extension(model.m[list(S)]).data
        subsets.append({"S": list(S), "sigma_k_H": sigma_k(H, k) if H.shape[0] >= k else 0.0})
    out = {
        "k": k,
        "n": n,
        "zeta": zeta,
        "pi_min": pi_min,
        "sigma_bar": sbar,
        "pi_min_sigma_bar_sq": cst_bound,
        "subsets": subsets,
    }
    checks = [s["sigma_k_H"] >= sbar for s in subsets]
    if n >= 2 * k - 1:
        p = default_partition(k)
        C = assemble_pair_matrices(exact_moments(model), p).C
        out["partition"] = p.to_dict()
        out["sigma_k_C"] = sigma_k(C, k)
        checks.append(out["sigma_k_C"] >= cst_bound)
        anchor_factor = np.vstack([model.pi, model.pi * model.m[p.anchor]])
        out["kruskal"] = {
            "H_S": kruskal_rank(hadamard_extension(model.m[list(p.S)]).data),
            "H_T": kruskal_rank(hadamard_extension(model.m[list(p.T)]).data),
            "anchor": kruskal_rank(anchor_factor),
        }
    else:
        out["kruskal"] = {"H": kruskal_rank(hadamard_extension(model.m).data)}
    out["all_above_bounds"] = bool(all(checks))
    return out


def cmd_diag(args) -> int:
    report = diagnose(load_model(args.model))
    _write_json(report, args.out)
    return 0 if report["all_above_bounds"] else 1


def _parse_sizes(text: str) -> list:
    sizes = []
    for tok in text.replace(" ", "").split(","):
        if tok:
            value = float(tok)
            if value < 1 or value != int(value):
                raise CliError(f"sample size {tok!r} is not a positive integer")
            sizes.append(int(value))
    if not sizes:
        raise CliError("--N needs at least one sample size")
    return sizes


def sample_seed(seed: int, N: int) -> int:
    return int(np.random.SeedSequence([seed, N]).generate_state(1, np.uint64)[0])


def run_eval(k, zeta, pi_min, sizes, seeds, model_seed):
    """Rows ``(N, seed, d_stat, d_model, fit_residual, runtime_ms)``; failed identifications report ``nan``."""
    model = random_model(k, 2 * k - 1, zeta, pi_min, model_seed)
    mu = exact_moments(model)
    partition = default_partition(k)
    rows = []
    for N in sizes:
        for seed in range(seeds):
            batch = draw_samples(model, N, sample_seed(seed, N))
            mu_hat = empirical_moments(batch.data)
            t0 = time.perf_counter()
            try:
                res = identify(mu_hat, partition, k)
                d_model, fit = model_distance(res.model(), model), res.diagnostics.fit_residual
            except (MixprodError, np.linalg.LinAlgError):
                d_model = fit = math.nan
            runtime = (time.perf_counter() - t0) * 1e3
            rows.append([N, seed, stat_distance(mu_hat, mu), d_model, fit, runtime])
    return rows


def cmd_eval(args) -> int:
    sizes = _parse_sizes(args.N)
    if args.seeds < 1:
        raise CliError("--seeds must be at least 1")
    rows = run_eval(args.k, args.zeta, args.pi_min, sizes, args.seeds, args.seed)
    fh = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([row[0], row[1]] + [repr(float(x)) for x in row[2:5]] + [f"{row[5]:.3f}"])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _add_identify_opts(p):
    p.add_argument("--project-simplex", action="store_true", help="clamp and renormalize the recovered weights")
    p.add_argument("--rank-rtol", type=float, default=None)
    p.add_argument("--sep-rtol", type=float, default=None)
    p.add_argument("--min-subset-size", type=int, default=None)
    p.add_argument("--max-candidates", type=int, default=10**6)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="mixprod", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="draw a random separated model")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--zeta", type=float, required=True)
    p.add_argument("--pi-min", type=float, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", parents=[common], help="draw iid binary samples from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("moments", parents=[common], help="exact or empirical moment vector")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--exact", metavar="MODEL")
    src.add_argument("--samples", metavar="SAMPLES")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("identify", parents=[common], help="recover (pi, m) from moments")
    p.add_argument("--moments", required=True)
    p.add_argument("--k", type=int, required=True)
    how = p.add_mutually_exclusive_group()
    how.add_argument("--subset", help="'S;T;anchor', comma-separated 0-based indices, e.g. '1,2;3,4;0'")
    how.add_argument("--search", action="store_true", help="try every partition, keep the best fit")
    p.add_argument("--extend", action="store_true", help="also recover rows of observables outside the partition")
    _add_identify_opts(p)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("compare", parents=[common], help="print d_model between two model/result files")
    p.add_argument("model_a")
    p.add_argument("model_b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("statdist", parents=[common], help="print d_stat between two moment files")
    p.add_argument("mu_a")
    p.add_argument("mu_b")
    p.set_defaults(func=cmd_statdist)

    p = sub.add_parser("adversarial", parents=[common], help="certified confusable model pair")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, default=None)
    p.set_defaults(func=cmd_adversarial)

    p = sub.add_parser("diag", parents=[common], help="condition-number report for a model")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("eval", parents=[common], help="error-vs-sample-size experiment (CSV)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--zeta", type=float, required=True)
    p.add_argument("--pi-min", type=float, required=True)
    p.add_argument("--N", required=True, help="comma-separated sample sizes, e.g. 1e4,4e4,1.6e5")
    p.add_argument("--seeds", type=int, default=20, help="number of sample seeds per size")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    _echo_config(args)
    try:
        return args.func(args)
    except CliError as exc:
        parser.error(str(exc))
    except (MixprodError, OSError, KeyError, ValueError) as exc:
        print(f"error: {_describe(exc)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
