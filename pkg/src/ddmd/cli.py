"""Command-line pipeline: synth, extract, train, evaluate, predict, serve.

Feature extraction fans out over a process pool but keeps output rows in
input order, so the persisted CSV is byte-identical for any worker count.
Exit codes: 0 success, 1 user/input error, 2 unexpected internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import load_audio
from .config import ACCEPTED_EXTENSIONS, DEFAULT_CONFIG, FEATURE_SCHEMA_VERSION, N_FEATURES, PipelineConfig
from .errors import BatchError, CorpusLayoutError, DecodeError, InvalidInput, PipelineError, SchemaError
from .evalkit import evaluate, split_train_test
from .features import extract_feature_vector
from .forest import DEFAULT_LABEL_NAMES, Hyperparams, TrainingSet, fit, load_model, predict, predict_proba, save_model
from .synth import render_corpus

LABEL_IDS = {"NDD": 0, "DD": 1}

CSV_HEADER = ("path", "label") + tuple(f"f{i}" for i in range(N_FEATURES))


@dataclass(frozen=True)
class CorpusEntry:
    """One corpus file with its directory-derived label."""

    path: Path
    label: str
    status: str = "ok"  # "ok" | "failed"
    reason: str = ""


@dataclass(frozen=True)
class FeatureStore:
    """Extracted rows (path, label, 34 floats) plus per-file failure records."""

    rows: tuple
    failures: tuple = ()
    schema_version: int = FEATURE_SCHEMA_VERSION


def scan_corpus(root: str | Path) -> list[CorpusEntry]:
    """List corpus files under root/DD and root/NDD in lexicographic path order.

    Files with unrecognized extensions become failed entries instead of
    aborting the scan.

    Raises:
        CorpusLayoutError: DD/ or NDD/ subdirectory is missing.
    """
    root = Path(root)
    for sub in ("DD", "NDD"):
        if not (root / sub).is_dir():
            raise CorpusLayoutError(f"missing {sub}/ subdirectory under {root}")
    entries = []
    for sub in ("DD", "NDD"):
        for child in sorted((root / sub).iterdir()):
            if not child.is_file():
                continue
            ext = child.suffix.lower().lstrip(".")
            if ext not in ACCEPTED_EXTENSIONS:
                entries.append(CorpusEntry(child, sub, status="failed",
                                           reason=f"unrecognized extension {child.suffix!r}"))
            else:
                entries.append(CorpusEntry(child, sub))
    entries.sort(key=lambda e: str(e.path))
    return entries


def _extract_one(task):
    """Worker: returns (path_str, label, values_or_None, reason)."""
    path_str, label, config = task
    try:
        clip = load_audio(path_str, config=config.audio)
        vector = extract_feature_vector(clip, config)
        return path_str, label, [float(v) for v in vector.values], ""
    except Exception as exc:  # per-file isolation: one bad decode must not kill the batch
        return path_str, label, None, f"{type(exc).__name__}: {exc}"


def extract_batch(entries, workers: int = 1, config: PipelineConfig = DEFAULT_CONFIG) -> FeatureStore:
    """Extract feature vectors for all ok entries, preserving entry order.

    Raises:
        BatchError: no entry produced a feature vector.
    """
    if workers < 1:
        raise InvalidInput(f"workers must be >= 1, got {workers}")
    pre_failed = [(str(e.path), e.reason) for e in entries if e.status != "ok"]
    tasks = [(str(e.path), e.label, config) for e in entries if e.status == "ok"]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_extract_one, tasks))
    else:
        results = [_extract_one(task) for task in tasks]
    rows = []
    failures = list(pre_failed)
    for path_str, label, values, reason in results:
        if values is None:
            failures.append((path_str, reason))
        else:
            rows.append((path_str, label, values))
    if not rows:
        raise BatchError(f"no usable audio among {len(entries)} entries")
    return FeatureStore(rows=tuple(rows), failures=tuple(failures))


def write_feature_csv(store: FeatureStore, path: str | Path) -> None:
    """Persist rows as CSV. Float cells use repr, so bytes are deterministic."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for path_str, label, values in store.rows:
            writer.writerow([path_str, label] + [repr(v) for v in values])


def read_feature_csv(path: str | Path) -> FeatureStore:
    """Load a feature CSV written by write_feature_csv.

    Raises:
        SchemaError: header does not match the frozen column layout.
        DecodeError: malformed row.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaError(f"{path}: empty feature store") from None
        if header != CSV_HEADER:
            raise SchemaError(f"{path}: unexpected header {header[:3]}...")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise DecodeError(f"{path}:{lineno}: expected {len(CSV_HEADER)} cells, got {len(row)}")
            path_str, label = row[0], row[1]
            if label not in LABEL_IDS:
                raise DecodeError(f"{path}:{lineno}: unknown label {label!r}")
            try:
                values = [float(cell) for cell in row[2:]]
            except ValueError as exc:
                raise DecodeError(f"{path}:{lineno}: {exc}") from exc
            rows.append((path_str, label, values))
    return FeatureStore(rows=tuple(rows))


def training_set_from_store(store: FeatureStore) -> TrainingSet:
    if not store.rows:
        raise InvalidInput("feature store has no rows")
    vectors = np.array([values for _, _, values in store.rows], dtype=np.float64)
    labels = np.array([LABEL_IDS[label] for _, label, _ in store.rows], dtype=np.int64)
    return TrainingSet(vectors=vectors, labels=labels, label_names=dict(DEFAULT_LABEL_NAMES))


def cmd_synth(out_dir, n_per_class: int, seed: int, sample_rate: int = 22050) -> int:
    written = render_corpus(out_dir, n_per_class, seed, sample_rate)
    print(f"wrote {len(written)} files under {out_dir}")
    return 0


def cmd_extract(corpus_root, csv_path, workers: int = 1) -> int:
    entries = scan_corpus(corpus_root)
    store = extract_batch(entries, workers=workers)
    write_feature_csv(store, csv_path)
    for failed_path, reason in store.failures:
        print(f"failed: {failed_path}: {reason}", file=sys.stderr)
    print(f"wrote {len(store.rows)} rows ({len(store.failures)} failures) to {csv_path}")
    return 0


def cmd_train(features_csv, model_path, trees: int = 100, seed: int = 0,
              test_fraction: float = 0.2, workers: int = 1) -> int:
    """Split, fit, evaluate, persist. Report JSON lands next to the model."""
    store = read_feature_csv(features_csv)
    data = training_set_from_store(store)
    result = split_train_test(len(store.rows), test_fraction, seed)
    train = TrainingSet(data.vectors[result.train_indices], data.labels[result.train_indices],
                        data.label_names)
    test = TrainingSet(data.vectors[result.test_indices], data.labels[result.test_indices],
                       data.label_names)
    model = fit(train, Hyperparams(n_trees=trees, seed=seed), n_jobs=workers)
    report = evaluate(model, test)
    model_path = Path(model_path)
    save_model(model, model_path)
    report_path = model_path.with_suffix(".report.json")
    report_path.write_text(json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n")
    print(f"model: {model_path}  train={len(result.train_indices)} test={len(result.test_indices)}")
    print(report.to_text())
    return 0


def cmd_evaluate(model_path, features_csv, report_json=None) -> int:
    """Evaluate a saved model against every row of a feature CSV."""
    model = load_model(model_path)
    data = training_set_from_store(read_feature_csv(features_csv))
    report = evaluate(model, data)
    if report_json is not None:
        Path(report_json).write_text(json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n")
    print(report.to_text())
    return 0


def cmd_predict(model_path, audio_path) -> int:
    """Print the verdict label and its confidence for one audio file."""
    model = load_model(model_path)
    clip = load_audio(audio_path, config=DEFAULT_CONFIG.audio)
    vector = extract_feature_vector(clip)
    label_id = predict(model, vector.values)
    p1 = predict_proba(model, vector.values)
    confidence = p1 if label_id == 1 else 1.0 - p1
    label = model.label_names.get(label_id, str(label_id))
    print(f"{label} {confidence:.4f}")
    return 0


def cmd_serve(model_path, host: str, port: int, max_upload_bytes: int | None,
              fetch_timeout_s: float, static_dir=None) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(model_path=model_path, max_upload_bytes=max_upload_bytes,
                     fetch_timeout_s=fetch_timeout_s, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddmd", description="Digital-drug audio detection pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a labeled synthetic corpus")
    p.add_argument("--out", required=True, help="output corpus root (DD/ and NDD/ created inside)")
    p.add_argument("--n-per-class", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-rate", type=int, default=22050)

    p = sub.add_parser("extract", help="extract feature vectors for a corpus into a CSV store")
    p.add_argument("--in", dest="corpus", required=True, help="corpus root with DD/ and NDD/")
    p.add_argument("--out", required=True, help="feature CSV path")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("train", help="train and evaluate a forest from a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True, help="output model JSON path")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("evaluate", help="evaluate a saved model on a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", default=None, help="optional report JSON path")

    p = sub.add_parser("predict", help="classify one audio file")
    p.add_argument("--model", required=True)
    p.add_argument("audio", help="path to an audio file")

    p = sub.add_parser("serve", help="run the HTTP classification service")
    p.add_argument("--model", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--max-upload-bytes", type=int, default=None)
    p.add_argument("--fetch-timeout-s", type=float, default=30.0)
    p.add_argument("--static-dir", default=None, help="directory of webui assets to serve at /")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            return cmd_synth(args.out, args.n_per_class, args.seed, args.sample_rate)
        if args.command == "extract":
            return cmd_extract(args.corpus, args.out, args.workers)
        if args.command == "train":
            return cmd_train(args.features, args.model, args.trees, args.seed,
                             args.test_fraction, args.workers)
        if args.command == "evaluate":
            return cmd_evaluate(args.model, args.features, args.out)
        if args.command == "predict":
            return cmd_predict(args.model, args.audio)
        if args.command == "serve":
            return cmd_serve(args.model, args.host, args.port, args.max_upload_bytes,
                             args.fetch_timeout_s, args.static_dir)
        raise AssertionError(f"unhandled command {args.command}")
    except (PipelineError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 — last-resort boundary for exit-code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
