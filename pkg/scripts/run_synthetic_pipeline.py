#!/usr/bin/env python3
"""End-to-end benchmark on a synthetic corpus.

Renders n DD + n NDD files, extracts feature vectors, trains a forest on an
80/20 split and prints the held-out classification report with stage timings.
The defaults mirror the accuracy benchmark the test suite enforces
(200 per class, seed 42, 100 trees, accuracy >= 0.95).
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import time
from pathlib import Path

from ddmd import Hyperparams, TrainingSet, evaluate, fit, save_model, split_train_test
from ddmd.cli import extract_batch, scan_corpus, training_set_from_store, write_feature_csv
from ddmd.synth import render_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-per-class", type=int, default=200)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--test-fraction", type=float, default=0.2)
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument(
        "--workdir",
        type=Path,
        default=None,
        help="keep corpus/CSV/model here instead of a throwaway temp dir",
    )
    args = parser.parse_args()

    workdir = args.workdir
    tmp = None
    if workdir is None:
        tmp = tempfile.TemporaryDirectory(prefix="ddmd_pipeline_")
        workdir = Path(tmp.name)
    workdir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    corpus_dir = workdir / "corpus"
    render_corpus(corpus_dir, n_per_class=args.n_per_class, seed=args.seed)
    t_render = time.perf_counter()
    print(f"rendered {2 * args.n_per_class} files in {t_render - t0:.1f} s -> {corpus_dir}")

    entries = scan_corpus(corpus_dir)
    store = extract_batch(entries, workers=args.workers)
    write_feature_csv(store, workdir / "features.csv")
    t_extract = time.perf_counter()
    print(f"extracted {len(store.rows)} vectors in {t_extract - t_render:.1f} s "
          f"({args.workers} workers, {len(store.failures)} failures)")

    data = training_set_from_store(store)
    split = split_train_test(len(data.labels), args.test_fraction, seed=args.seed)
    train = TrainingSet(
        vectors=data.vectors[split.train_indices],
        labels=data.labels[split.train_indices],
        label_names=data.label_names,
    )
    test = TrainingSet(
        vectors=data.vectors[split.test_indices],
        labels=data.labels[split.test_indices],
        label_names=data.label_names,
    )
    model = fit(train, Hyperparams(n_trees=args.trees, seed=args.seed), n_jobs=args.workers)
    t_fit = time.perf_counter()
    print(f"trained {args.trees} trees on {len(train.labels)} vectors in {t_fit - t_extract:.1f} s")

    report = evaluate(model, test)
    print()
    print(report.to_text())
    print(f"total {time.perf_counter() - t0:.1f} s")

    if tmp is None:
        save_model(model, workdir / "model.json")
        (workdir / "report.txt").write_text(report.to_text() + "\n")
        print(f"artifacts kept in {workdir}")
    else:
        tmp.cleanup()
    return 0


if __name__ == "__main__":
    sys.exit(main())
