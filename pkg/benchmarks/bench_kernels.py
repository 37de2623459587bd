#!/usr/bin/env python3
"""Benchmark the compiled matching kernel against the pure-Python fallback.

Runs the same synthetic labeling workload and the raw kernel loops under
both implementations and reports wall times.  Usage::

    python benchmarks/bench_kernels.py [--reports 5000]
"""

import argparse
import random
import time

from radlabel import kernels
from radlabel.aggregation import label_study
from radlabel.ingest import make_document
from radlabel.rules import demo_rules_root, load_ruleset

FRAGMENTS = [
    "no evidence of pulmonary edema, pleural effusions or pneumothorax",
    "cannot exclude pneumothorax",
    "moderate bilateral effusions and bibasilar opacities",
    "heart size is stable",
    "possible pneumonia in the right lower lobe",
    "clear lungs without consolidation",
    "unchanged position of the endotracheal tube",
    "findings may represent atelectasis versus consolidation",
    "small left pleural effusion has resolved",
    "stable widened mediastinum and sternotomy wires",
]


def implementations():
    from radlabel.kernels import _pure

    impls = {"pure": _pure}
    try:
        from radlabel.kernels import _speedups

        impls["compiled"] = _speedups
    except ImportError:
        print("compiled kernel unavailable; benchmarking the pure kernel only")
    return impls


def activate(impl):
    kernels.phrase_scan = impl.phrase_scan
    kernels.pattern_match = impl.pattern_match


def synthetic_documents(n_reports, seed=13):
    rng = random.Random(seed)
    docs = []
    for i in range(n_reports):
        text = ". ".join(rng.choices(FRAGMENTS, k=rng.randint(1, 3))) + "."
        docs.append(make_document(f"r{i}", text))
    return docs


def bench_pipeline(impl, docs, ruleset):
    activate(impl)
    started = time.perf_counter()
    for doc in docs:
        label_study(doc, ruleset)
    return time.perf_counter() - started


def bench_phrase_scan(impl, ruleset, docs, repeats=3):
    encoded = []
    for doc in docs:
        for sentence in doc.sentences:
            ids = ruleset.encode_sentence(sentence.lowers)
            for _, phrase_ids in ruleset.phrase_groups.values():
                encoded.append((ids, phrase_ids))
    started = time.perf_counter()
    for _ in range(repeats):
        for ids, phrases in encoded:
            impl.phrase_scan(ids, phrases)
    return time.perf_counter() - started


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reports", type=int, default=5000)
    args = parser.parse_args()

    root = demo_rules_root()
    ruleset = load_ruleset(root / "phrases", root / "rules")
    docs = synthetic_documents(args.reports)
    impls = implementations()

    print(f"workload: {args.reports} reports, demo rule set "
          f"({len(ruleset.phrases)} phrases, {len(ruleset.rules)} rules)\n")
    results = {}
    for name, impl in impls.items():
        pipeline = bench_pipeline(impl, docs, ruleset)
        scan = bench_phrase_scan(impl, ruleset, docs[: min(1000, len(docs))])
        results[name] = (pipeline, scan)
        print(f"{name:>9}: label pipeline {pipeline:7.3f}s   phrase_scan loop {scan:7.3f}s")

    if len(results) == 2:
        speedup = results["pure"][0] / results["compiled"][0]
        scan_speedup = results["pure"][1] / results["compiled"][1]
        print(f"\ncompiled speedup: {speedup:.2f}x end-to-end, {scan_speedup:.2f}x on the scan loop")


if __name__ == "__main__":
    main()
