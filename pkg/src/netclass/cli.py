"""Command-line front end tying parsing, features, learning and reports together.

Exit codes: 0 success, 1 validation error (bad flags, config, or input
files), 2 partial data failure (some graphs failed but output was written
for the rest), 3 internal error.  All file outputs are written atomically
(temp file + rename) and are byte-identical for a given seed regardless of
--workers.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .data import Dataset, apply_standardize, feature_log_flags, fit_standardize
from .evaluate import (
    cluster_category_overlap,
    confusion_to_csv,
    confusion_to_text,
    cross_validate,
    misclass_to_csv,
    overlap_to_text,
)
from .features import extract_features, read_features_csv, write_features_csv
from .forest import (
    ForestParams,
    ModelFormatError,
    forest_from_json,
    forest_predict,
    forest_to_json,
    forest_train,
)
from .graph import GraphParseError, parse_edge_list, parse_matrix_market, write_edge_list
from .kmeans import kmeans
from .synth import default_corpus_specs, generate_entry, parse_generator_spec
from .tsne import tsne

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARTIAL = 2
EXIT_INTERNAL = 3

SEED_ENV_VAR = "NETCLASS_SEED"


class ValidationFailure(Exception):
    """User-correctable problem; maps to exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    """Effective settings after merging defaults, env, config file and flags.

    Precedence, lowest to highest: built-in defaults, NETCLASS_SEED (seed
    only), --config file, command-line flags.
    """

    seed: int = 42
    workers: int = 1
    trees: int = 100
    features_per_split: "int | None" = None
    min_split: int = 2
    folds: int = 10
    kmeans_k: int = 8
    kmeans_restarts: int = 10
    kmeans_max_iter: int = 300
    tsne_perplexity: float = 30.0
    tsne_iterations: int = 1000
    tsne_learning_rate: float = 200.0
    overlap_threshold: float = 0.6


_INT_KEYS = {
    "seed", "workers", "trees", "features_per_split", "min_split", "folds",
    "kmeans_k", "kmeans_restarts", "kmeans_max_iter", "tsne_iterations",
}
_FLOAT_KEYS = {"tsne_perplexity", "tsne_learning_rate", "overlap_threshold"}


def parse_config_text(text: str) -> dict:
    """Parse a flat key=value config file (# comments, blank lines allowed)."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationFailure(f"config line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _INT_KEYS and key not in _FLOAT_KEYS:
            raise ValidationFailure(f"config line {lineno}: unknown key {key!r}")
        try:
            if key == "features_per_split" and value.lower() == "none":
                values[key] = None
            elif key in _INT_KEYS:
                values[key] = int(value)
            else:
                values[key] = float(value)
        except ValueError:
            raise ValidationFailure(
                f"config line {lineno}: bad value {value!r} for {key}"
            ) from None
    return values


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise ValidationFailure(f"cannot read {path}: {exc.strerror or exc}") from None


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {f.name: f.default for f in fields(RunConfig)}
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            values["seed"] = int(env_seed)
        except ValueError:
            raise ValidationFailure(
                f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}"
            ) from None
    config_path = getattr(args, "config", None)
    if config_path:
        values.update(parse_config_text(_read_text(config_path)))
    for key in values:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg = RunConfig(**values)
    positive = {
        "workers": cfg.workers, "trees": cfg.trees,
        "kmeans_k": cfg.kmeans_k, "kmeans_restarts": cfg.kmeans_restarts,
        "kmeans_max_iter": cfg.kmeans_max_iter,
        "tsne_iterations": cfg.tsne_iterations,
    }
    for name, value in positive.items():
        if value < 1:
            raise ValidationFailure(f"{name} must be at least 1, got {value}")
    if cfg.min_split < 2:
        raise ValidationFailure(f"min_split must be at least 2, got {cfg.min_split}")
    if cfg.folds < 2:
        raise ValidationFailure(f"folds must be at least 2, got {cfg.folds}")
    if cfg.features_per_split is not None and cfg.features_per_split < 1:
        raise ValidationFailure("features_per_split must be at least 1")
    if not cfg.tsne_perplexity >= 1.0:
        raise ValidationFailure("tsne_perplexity must be at least 1")
    if not cfg.tsne_learning_rate > 0.0:
        raise ValidationFailure("tsne_learning_rate must be positive")
    if not 0.0 <= cfg.overlap_threshold <= 1.0:
        raise ValidationFailure("overlap_threshold must be within [0, 1]")
    return cfg


def atomic_write(path: str, text: str) -> None:
    """Write text then rename into place so readers never see partial files."""
    target = os.path.abspath(path)
    directory = os.path.dirname(target)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp.netclass.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def load_graph(path: str):
    """Parse a graph file; .mtx means Matrix Market, anything else edge list."""
    text = _read_text(path)
    if path.lower().endswith(".mtx"):
        return parse_matrix_market(text)
    return parse_edge_list(text)


def read_manifest(path: str) -> list[tuple[str, str, str]]:
    """Read (path, name, category) rows; graph paths resolve against the manifest."""
    text = _read_text(path)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationFailure(f"{path}: empty manifest") from None
    if header[:3] != ["path", "name", "category"]:
        raise ValidationFailure(
            f"{path}: manifest header must start with path,name,category"
        )
    base = os.path.dirname(os.path.abspath(path))
    rows = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) < 3:
            raise ValidationFailure(f"{path} line {lineno}: expected 3+ columns")
        graph_path, name, category = row[0], row[1], row[2]
        if not name:
            raise ValidationFailure(f"{path} line {lineno}: empty graph name")
        if name in seen:
            raise ValidationFailure(f"{path} line {lineno}: duplicate name {name!r}")
        seen.add(name)
        if not os.path.isabs(graph_path):
            graph_path = os.path.join(base, graph_path)
        rows.append((graph_path, name, category))
    if not rows:
        raise ValidationFailure(f"{path}: manifest lists no graphs")
    return rows


def _pool_map(workers: int, fn, items):
    """Order-preserving map over a thread pool (pool size never affects output)."""
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _load_dataset(features_path: str) -> Dataset:
    try:
        names, categories, matrix = read_features_csv(io.StringIO(_read_text(features_path)))
        if not names:
            raise ValueError("feature CSV has no data rows")
        return Dataset.from_feature_table(names, categories, matrix)
    except ValueError as exc:
        raise ValidationFailure(f"{features_path}: {exc}") from None


def _forest_params(cfg: RunConfig) -> ForestParams:
    return ForestParams(
        trees=cfg.trees,
        features_per_split=cfg.features_per_split,
        min_split=cfg.min_split,
        log_flags=feature_log_flags(),
    )


def cmd_features(args: argparse.Namespace, cfg: RunConfig) -> int:
    rows = read_manifest(args.manifest)

    def work(row):
        graph_path, name, category = row
        try:
            graph, _ = load_graph(graph_path)
            return name, category, extract_features(graph), None
        except (ValidationFailure, GraphParseError, ValueError) as exc:
            return name, category, None, f"{name}: {graph_path}: {exc}"

    results = _pool_map(cfg.workers, work, rows)
    out = io.StringIO()
    write_features_csv(
        out, [(n, c, fv) for n, c, fv, err in results if err is None]
    )
    atomic_write(args.out, out.getvalue())
    failures = [err for _, _, _, err in results if err is not None]
    for err in failures:
        print(f"error: {err}", file=sys.stderr)
    ok = len(results) - len(failures)
    print(f"extracted features for {ok}/{len(results)} graphs -> {args.out}")
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_generate(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.specfile:
        try:
            specs = parse_generator_spec(_read_text(args.specfile), cfg.seed)
        except ValueError as exc:
            raise ValidationFailure(f"{args.specfile}: {exc}") from None
    else:
        specs = default_corpus_specs(cfg.seed)
    try:
        for spec in specs:
            spec.validate()
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
    tasks = []
    index = 0
    for spec in specs:
        for i in range(spec.count):
            tasks.append((spec, i, index))
            index += 1
    if not tasks:
        raise ValidationFailure("generator spec produces no graphs")
    entries = _pool_map(cfg.workers, lambda t: generate_entry(*t), tasks)
    os.makedirs(args.out_dir, exist_ok=True)
    manifest = io.StringIO()
    writer = csv.writer(manifest, lineterminator="\n")
    writer.writerow(["path", "name", "category", "nodes", "edges", "params", "seed"])
    for entry in entries:
        filename = f"{entry.name}.edges"
        atomic_write(os.path.join(args.out_dir, filename), write_edge_list(entry.graph))
        writer.writerow([
            filename, entry.name, entry.category,
            str(entry.graph.node_count), str(entry.graph.edge_count),
            entry.params, str(entry.seed),
        ])
    atomic_write(os.path.join(args.out_dir, "manifest.csv"), manifest.getvalue())
    print(f"generated {len(entries)} graphs -> {args.out_dir}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace, cfg: RunConfig) -> int:
    dataset = _load_dataset(args.features)
    params = _forest_params(cfg)
    try:
        params.validate(dataset.matrix.shape[1])
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
    forest = forest_train(dataset, params, cfg.seed)
    hits = sum(
        forest_predict(forest, dataset.matrix[i])[0] == dataset.labels[i]
        for i in range(dataset.n_rows)
    )
    atomic_write(args.model_out, forest_to_json(forest) + "\n")
    print(
        f"trained {cfg.trees} trees on {dataset.n_rows} rows; "
        f"training accuracy {hits / dataset.n_rows:.6f} -> {args.model_out}"
    )
    return EXIT_OK


def cmd_predict(args: argparse.Namespace, cfg: RunConfig) -> int:
    try:
        forest = forest_from_json(_read_text(args.model))
    except ModelFormatError as exc:
        raise ValidationFailure(f"{args.model}: {exc}") from None

    def work(path):
        try:
            graph, _ = load_graph(path)
            label, votes = forest_predict(forest, extract_features(graph).as_array())
            return path, label, votes, None
        except (ValidationFailure, GraphParseError, ValueError) as exc:
            return path, None, None, f"{path}: {exc}"

    results = _pool_map(cfg.workers, work, args.graphs)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["path", "predicted"] + [f"votes_{s}" for s in forest.label_names]
    )
    for path, label, votes, err in results:
        if err is None:
            writer.writerow(
                [path, forest.label_names[label]] + [str(int(v)) for v in votes]
            )
    if args.out:
        atomic_write(args.out, out.getvalue())
    else:
        sys.stdout.write(out.getvalue())
    failures = [err for _, _, _, err in results if err is not None]
    for err in failures:
        print(f"error: {err}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_evaluate(args: argparse.Namespace, cfg: RunConfig) -> int:
    dataset = _load_dataset(args.features)
    params = _forest_params(cfg)
    try:
        params.validate(dataset.matrix.shape[1])
        result = cross_validate(dataset, params, cfg.folds, cfg.seed)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
    os.makedirs(args.out_dir, exist_ok=True)
    atomic_write(
        os.path.join(args.out_dir, "confusion.csv"), confusion_to_csv(result.confusion)
    )
    atomic_write(
        os.path.join(args.out_dir, "confusion.txt"), confusion_to_text(result.confusion)
    )
    atomic_write(
        os.path.join(args.out_dir, "misclassified.csv"),
        misclass_to_csv(result.misclassified, dataset.label_names),
    )
    print(
        f"{cfg.folds}-fold cv accuracy {result.accuracy:.6f} "
        f"({len(result.misclassified)} misclassified) -> {args.out_dir}"
    )
    return EXIT_OK


def _standardized_matrix(features_path: str):
    try:
        names, categories, matrix = read_features_csv(
            io.StringIO(_read_text(features_path))
        )
        if not names:
            raise ValueError("feature CSV has no data rows")
        params = fit_standardize(matrix, feature_log_flags())
        return names, categories, apply_standardize(params, matrix)
    except ValueError as exc:
        raise ValidationFailure(f"{features_path}: {exc}") from None


def cmd_embed(args: argparse.Namespace, cfg: RunConfig) -> int:
    names, categories, matrix = _standardized_matrix(args.features)
    try:
        embedding = tsne(
            matrix,
            perplexity=cfg.tsne_perplexity,
            iterations=cfg.tsne_iterations,
            learning_rate=cfg.tsne_learning_rate,
            seed=cfg.seed,
        )
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["name", "category", "x", "y"])
    for i, name in enumerate(names):
        writer.writerow([
            name, categories[i],
            format(embedding.points[i, 0], ".17g"),
            format(embedding.points[i, 1], ".17g"),
        ])
    atomic_write(args.out, out.getvalue())
    print(f"embedded {len(names)} rows (final kl {embedding.kl:.6f}) -> {args.out}")
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace, cfg: RunConfig) -> int:
    names, categories, matrix = _standardized_matrix(args.features)
    try:
        result = kmeans(
            matrix,
            cfg.kmeans_k,
            max_iter=cfg.kmeans_max_iter,
            restarts=cfg.kmeans_restarts,
            seed=cfg.seed,
        )
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["name", "category", "cluster"])
    for i, name in enumerate(names):
        writer.writerow([name, categories[i], str(int(result.assignments[i]))])
    atomic_write(args.out, out.getvalue())
    print(f"clustered {len(names)} rows into {cfg.kmeans_k} groups "
          f"(inertia {result.inertia:.6f}) -> {args.out}")
    if args.overlap_out:
        labeled = [i for i, c in enumerate(categories) if c]
        if not labeled:
            raise ValidationFailure("no labeled rows; cannot write overlap report")
        label_names = tuple(sorted({categories[i] for i in labeled}))
        lookup = {c: j for j, c in enumerate(label_names)}
        report = cluster_category_overlap(
            result.assignments[labeled],
            np.array([lookup[categories[i]] for i in labeled]),
            label_names,
            n_clusters=cfg.kmeans_k,
            threshold=cfg.overlap_threshold,
        )
        atomic_write(args.overlap_out, overlap_to_text(report))
        print(f"wrote cluster/category overlap -> {args.overlap_out}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; remap onto the validation code.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value settings file")
    common.add_argument("--seed", type=int, help="master seed (default 42)")
    common.add_argument("--workers", type=int, help="worker pool size (default 1)")

    parser = _Parser(
        prog="netclass",
        description="Deterministic structural classification of networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", parents=[common],
                       help="extract feature vectors for a manifest of graphs")
    p.add_argument("manifest", help="CSV of path,name,category rows")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("generate", parents=[common],
                       help="generate a synthetic ER/BA corpus")
    p.add_argument("specfile", nargs="?", default=None,
                   help="corpus spec file (default: stock 50 BA + 75 ER corpus)")
    p.add_argument("--out-dir", required=True, help="directory for graphs + manifest")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", parents=[common],
                       help="train a random forest on a feature CSV")
    p.add_argument("features", help="labeled feature CSV")
    p.add_argument("--model-out", required=True, help="output model JSON path")
    p.add_argument("--trees", type=int, help="forest size (default 100)")
    p.add_argument("--features-per-split", type=int, dest="features_per_split",
                   help="candidate features per node (default round(sqrt(D)))")
    p.add_argument("--min-split", type=int, dest="min_split",
                   help="minimum samples to split (default 2)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common],
                       help="classify graph files with a trained model")
    p.add_argument("model", help="model JSON from `netclass train`")
    p.add_argument("graphs", nargs="+", help="graph files (.mtx or edge list)")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common],
                       help="stratified k-fold cross-validation report")
    p.add_argument("features", help="labeled feature CSV")
    p.add_argument("--out-dir", default=".", help="report directory (default .)")
    p.add_argument("--folds", type=int, help="fold count (default 10)")
    p.add_argument("--trees", type=int, help="forest size (default 100)")
    p.add_argument("--features-per-split", type=int, dest="features_per_split")
    p.add_argument("--min-split", type=int, dest="min_split")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("embed", parents=[common],
                       help="project feature vectors to 2-D")
    p.add_argument("features", help="feature CSV (categories may be blank)")
    p.add_argument("--out", required=True, help="output embedding CSV")
    p.add_argument("--perplexity", type=float, dest="tsne_perplexity")
    p.add_argument("--iterations", type=int, dest="tsne_iterations")
    p.add_argument("--learning-rate", type=float, dest="tsne_learning_rate")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("cluster", parents=[common],
                       help="k-means clustering of feature vectors")
    p.add_argument("features", help="feature CSV (categories may be blank)")
    p.add_argument("--out", required=True, help="output assignment CSV")
    p.add_argument("--k", type=int, dest="kmeans_k", help="cluster count (default 8)")
    p.add_argument("--restarts", type=int, dest="kmeans_restarts")
    p.add_argument("--max-iter", type=int, dest="kmeans_max_iter")
    p.add_argument("--overlap-threshold", type=float, dest="overlap_threshold")
    p.add_argument("--overlap-out", help="write cluster/category overlap report here")
    p.set_defaults(func=cmd_cluster)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GraphParseError, ModelFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
