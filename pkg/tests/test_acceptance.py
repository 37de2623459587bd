"""Acceptance suite: one test per release criterion, at fixed tolerances.

Each test prints a single PASS line when its criterion holds (run with
``pytest -s`` to see them); a failing criterion fails the test outright.
"""

import math
import random
import time

import numpy as np
import pytest

from radlabel.aggregation import Label, aggregate, label_study
from radlabel.classification import Certainty, MentionClass, match_dependency
from radlabel.cli import EXIT_OK, main
from radlabel.evaluation import GoldAnnotation, Task, auroc, f1_report
from radlabel.extraction import Mention, extract_mentions
from radlabel.ingest import make_document
from radlabel.observations import BY_SLUG, OBSERVATIONS
from radlabel.policies import (
    BLANK,
    LabelMatrix,
    apply_policy,
    apply_selftrain,
    masked_bce,
    multiclass_positive_probability,
)
from radlabel.rules import MENTION_TOKEN, Phase, PhrasePattern, SurfaceRule, compile_ruleset

from conftest import build_ruleset


def ok(name):
    print(f"ACCEPTANCE {name}: PASS")


# --- 1. golden-sentence suite ---------------------------------------------------

GOLDEN_SENTENCES = [
    (
        "no evidence of pulmonary edema, pleural effusions or pneumothorax",
        {"edema": Label.NEGATIVE, "pleural_effusion": Label.NEGATIVE,
         "pneumothorax": Label.NEGATIVE, "no_finding": Label.POSITIVE},
    ),
    (
        "diffuse reticular pattern may represent mild interstitial pulmonary edema",
        {"edema": Label.UNCERTAIN},
    ),
    (
        "moderate bilateral effusions and bibasilar opacities",
        {"pleural_effusion": Label.POSITIVE, "lung_opacity": Label.POSITIVE},
    ),
    ("heart size is stable", {"cardiomegaly": Label.UNCERTAIN}),
    ("cannot exclude pneumothorax", {"pneumothorax": Label.UNCERTAIN}),
    (
        "findings may represent atelectasis versus consolidation",
        {"atelectasis": Label.UNCERTAIN, "consolidation": Label.UNCERTAIN},
    ),
]


def test_golden_sentence_suite(demo_ruleset):
    started = time.perf_counter()
    for text, expected in GOLDEN_SENTENCES:
        vector = label_study(make_document("golden", text), demo_ruleset)
        for observation in OBSERVATIONS:
            want = expected.get(observation.slug, Label.BLANK)
            assert vector.labels[observation] is want, (
                f"{text!r}: {observation.name} = {vector.labels[observation]}, wanted {want}"
            )
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"golden suite took {elapsed:.3f}s"
    ok("golden-sentence suite")


def test_golden_pre_negation_precedence(demo_ruleset):
    # the negation-phase `exclude dobj:d` rule exists and the label is still u
    dep_rules = [
        r for r in demo_ruleset.rules_for(Phase.NEGATION)
        if getattr(r, "trigger_lemma", None) == "exclude"
    ]
    assert dep_rules, "demo rule set must carry the exclude dobj:d negation rule"
    vector = label_study(make_document("g", "cannot exclude pneumothorax"), demo_ruleset)
    assert vector.labels[BY_SLUG["pneumothorax"]] is Label.UNCERTAIN
    ok("pre-negation precedence over exclude")


# --- 2. aggregation oracle ------------------------------------------------------


def oracle_precedence(certainties):
    if Certainty.POSITIVE in certainties:
        return Label.POSITIVE
    if Certainty.UNCERTAIN in certainties:
        return Label.UNCERTAIN
    if Certainty.NEGATIVE in certainties:
        return Label.NEGATIVE
    return Label.BLANK


def _mention(certainty):
    observation = BY_SLUG["edema"]
    rule = (
        None
        if certainty is Certainty.POSITIVE
        else SurfaceRule(Phase.NEGATION, ("x", MENTION_TOKEN))
    )
    return Mention(
        observation=observation,
        sentence_index=0,
        start=0,
        end=1,
        matched_phrase=PhrasePattern(observation, ("x",)),
        classification=MentionClass(certainty, rule),
    )


def test_aggregation_oracle():
    rng = random.Random(20260810)
    classes = list(Certainty)
    for _ in range(1000):
        certainties = [rng.choice(classes) for _ in range(rng.randint(0, 7))]
        got = aggregate([_mention(c) for c in certainties])[BY_SLUG["edema"]]
        assert got is oracle_precedence(certainties)
    ok("aggregation oracle (1000 random multisets)")


# --- 3. extraction oracle -------------------------------------------------------


def oracle_leftmost_longest(lowers, phrase_tuples):
    candidates = []
    for phrase in phrase_tuples:
        for start in range(len(lowers) - len(phrase) + 1):
            if tuple(lowers[start:start + len(phrase)]) == phrase:
                candidates.append((start, start + len(phrase)))
    chosen = []
    for start, end in sorted(candidates, key=lambda c: (c[0], -(c[1] - c[0]))):
        if all(end <= s or start >= e for s, e in chosen):
            chosen.append((start, end))
    return sorted(chosen)


def test_extraction_oracle():
    rng = random.Random(31337)
    words = ["effusion", "pleural", "edema", "small", "no", "left", "lung"]
    for _ in range(200):
        phrases = [
            " ".join(rng.choices(words, k=rng.randint(1, 3)))
            for _ in range(rng.randint(1, 5))
        ]
        ruleset = build_ruleset({"edema": phrases})
        doc = make_document("r", " ".join(rng.choices(words, k=rng.randint(1, 12))))
        got = [
            (m.start, m.end)
            for m in extract_mentions(doc, ruleset)
            if m.observation == BY_SLUG["edema"]
        ]
        expected = oracle_leftmost_longest(
            doc.sentences[0].lowers, {p.tokens for p in ruleset.phrases}
        )
        assert got == expected
    ok("extraction oracle (200 random sentences)")


# --- 4. F1 harness ----------------------------------------------------------------


def _labels(**slugs):
    labels = {o: Label.BLANK for o in OBSERVATIONS}
    for slug, label in slugs.items():
        labels[BY_SLUG[slug]] = label
    return labels


def test_f1_harness():
    from radlabel.aggregation import LabelVector

    U, P, N = Label.UNCERTAIN, Label.POSITIVE, Label.NEGATIVE
    pred = [
        LabelVector("r1", _labels(edema=P, pneumonia=U, fracture=N)),
        LabelVector("r2", _labels(fracture=N)),
        LabelVector("r3", _labels(edema=N, pneumonia=P, fracture=P)),
    ]
    gold = [
        GoldAnnotation("r1", _labels(edema=P, pneumonia=N)),
        GoldAnnotation("r2", _labels(edema=U, fracture=N)),
        GoldAnnotation("r3", _labels(pneumonia=P, fracture=U)),
    ]
    tol = 1e-12

    mention = f1_report(pred, gold, Task.MENTION)
    per = {o.slug: f1 for o, f1 in mention.per_observation.items()}
    # hand counts: Edema tp1 fp1 fn1; Pneumonia tp2; Fracture tp2 fp1
    assert abs(per["edema"] - 0.5) < tol
    assert abs(per["pneumonia"] - 1.0) < tol
    assert abs(per["fracture"] - 0.8) < tol
    assert sum(1 for f1 in per.values() if f1 is None) == 11
    assert abs(mention.macro_average - 2.3 / 3) < tol
    assert abs(mention.micro_average - 10 / 13) < tol  # pooled tp5 fp2 fn1

    negation = f1_report(pred, gold, Task.NEGATION)
    per = {o.slug: f1 for o, f1 in negation.per_observation.items()}
    # hand counts: Edema fp1; Pneumonia fn1; Fracture tp1 fp1
    assert abs(per["edema"] - 0.0) < tol
    assert abs(per["pneumonia"] - 0.0) < tol
    assert abs(per["fracture"] - 2 / 3) < tol
    assert abs(negation.macro_average - 2 / 9) < tol
    assert abs(negation.micro_average - 0.4) < tol  # pooled tp1 fp2 fn1

    uncertainty = f1_report(pred, gold, Task.UNCERTAINTY)
    per = {o.slug: f1 for o, f1 in uncertainty.per_observation.items()}
    # hand counts: Edema fn1; Pneumonia fp1; Fracture fn1
    assert per["edema"] == 0.0 and per["pneumonia"] == 0.0 and per["fracture"] == 0.0
    assert abs(uncertainty.macro_average - 0.0) < tol
    assert abs(uncertainty.micro_average - 0.0) < tol

    ok("F1 harness hand counts")


def test_f1_self_evaluation(demo_ruleset):
    texts = [text for text, _ in GOLDEN_SENTENCES]
    pred = [
        label_study(make_document(f"r{i}", text), demo_ruleset)
        for i, text in enumerate(texts)
    ]
    gold = [GoldAnnotation(v.report_id, v.labels) for v in pred]
    for task in Task:
        report = f1_report(pred, gold, task)
        defined = [f1 for f1 in report.per_observation.values() if f1 is not None]
        assert defined, f"no defined cells on {task.value}"
        assert all(f1 == 1.0 for f1 in defined)
        assert report.macro_average == 1.0
        assert report.micro_average == 1.0
    ok("F1 self-evaluation is 1.0 on all defined cells")


# --- 5. loss identities ----------------------------------------------------------


def test_loss_identities():
    rng = np.random.default_rng(424242)
    for _ in range(500):
        shape = (int(rng.integers(1, 5)), int(rng.integers(1, 8)))
        targets = rng.integers(0, 2, size=shape).astype(float)
        preds = rng.uniform(0.001, 0.999, size=shape)
        plain = float(-(targets * np.log(preds) + (1 - targets) * np.log(1 - preds)).sum())
        got = masked_bce(targets, np.ones(shape, dtype=bool), preds)
        assert abs(got - plain) < 1e-9

    # U-Ignore loss is bitwise invariant to predictions at u cells
    rng_py = random.Random(7)
    n = len(OBSERVATIONS)
    for _ in range(100):
        row = [rng_py.choice([1.0, 0.0, -1.0, BLANK]) for _ in range(n)]
        labels = LabelMatrix(("r0",), np.array([row]))
        out = apply_policy(labels, "ignore")
        preds = np.full((1, n), 0.5)
        baseline = masked_bce(out.targets, out.mask, preds)
        perturbed = preds.copy()
        perturbed[0, ~out.mask[0]] = rng_py.random()
        assert masked_bce(out.targets, out.mask, perturbed) == baseline

    # worked value
    targets = np.array([[1.0, np.nan, 0.0]])
    mask = np.array([[True, False, True]])
    preds = np.array([[0.9, 0.5, 0.2]])
    assert abs(masked_bce(targets, mask, preds) - (-(math.log(0.9) + math.log(0.8)))) < 1e-9
    ok("loss identities")


# --- 6. policy semantics -----------------------------------------------------------


def test_policy_semantics():
    rng = np.random.default_rng(606)
    n = len(OBSERVATIONS)
    values = rng.choice([1.0, 0.0, -1.0, np.nan], size=(50, n))
    labels = LabelMatrix(tuple(f"r{i}" for i in range(50)), values)
    u_cells = values == -1.0
    known = ~np.isnan(values)
    untouched = known & ~u_cells

    for policy, target in (("zeros", 0.0), ("ones", 1.0)):
        out = apply_policy(labels, policy)
        assert (out.targets[u_cells] == target).all()
        assert np.array_equal(out.targets[untouched], values[untouched])
        assert np.array_equal(out.mask, known)

    preds = rng.uniform(0, 1, size=(50, n))
    selftrain = apply_selftrain(labels, preds)
    assert np.array_equal(selftrain.targets[untouched], values[untouched])
    assert np.array_equal(selftrain.targets[u_cells], preds[u_cells])

    rng_py = random.Random(909)
    for _ in range(500):
        p0, p1 = rng_py.uniform(0.001, 0.5), rng_py.uniform(0.001, 0.5)
        pu = 1.0 - p0 - p1
        assert abs(multiclass_positive_probability(p0, p1, pu) - p1 / (p0 + p1)) < 1e-12
        scale = rng_py.uniform(0.05, 0.99 / (p0 + p1))
        q0, q1 = p0 * scale, p1 * scale
        rescaled = multiclass_positive_probability(q0, q1, 1.0 - q0 - q1)
        assert abs(rescaled - p1 / (p0 + p1)) < 1e-12
    ok("policy semantics")


# --- 7. AUROC -----------------------------------------------------------------------


def oracle_auroc(scores, truths):
    pos = [s for s, t in zip(scores, truths) if t]
    neg = [s for s, t in zip(scores, truths) if not t]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def test_auroc_criteria():
    rng = random.Random(112358)
    done = 0
    while done < 100:
        scores = [rng.choice([round(rng.random(), 2), 0.25, 0.5]) for _ in range(30)]
        truths = [rng.random() < 0.5 for _ in range(30)]
        if not (any(truths) and not all(truths)):
            continue
        done += 1
        assert abs(auroc(scores, truths) - oracle_auroc(scores, truths)) < 1e-12

    ranked = [i / 10 for i in range(10)]
    truths = [i >= 5 for i in range(10)]
    assert auroc(ranked, truths) == 1.0
    assert auroc(ranked, [not t for t in truths]) == 0.0

    scores = [rng.random() for _ in range(30)]
    truths = [rng.random() < 0.4 for _ in range(30)]
    transformed = [math.tanh(2 * s) + s ** 3 for s in scores]  # strictly increasing
    assert auroc(scores, truths) == auroc(transformed, truths)
    ok("AUROC oracle, boundary and invariance checks")


# --- 8. CLI determinism at corpus scale ----------------------------------------------

FRAGMENTS = [
    "no evidence of pulmonary edema, pleural effusions or pneumothorax",
    "cannot exclude pneumothorax",
    "moderate bilateral effusions and bibasilar opacities",
    "heart size is stable",
    "possible pneumonia in the right lower lobe",
    "clear lungs without consolidation",
    "unchanged position of the endotracheal tube",
    "findings may represent atelectasis versus consolidation",
    "no acute cardiopulmonary process",
    "small left pleural effusion has resolved",
    "stable widened mediastinum",
    "new rib fractures on the left",
]


def synthetic_corpus(path, n_reports):
    rng = random.Random(13)
    with open(path, "w", encoding="utf-8") as out:
        out.write("report_id,text\n")
        for i in range(n_reports):
            body = ". ".join(rng.choices(FRAGMENTS, k=rng.randint(1, 3))) + "."
            text = f"FINDINGS: as below.\nIMPRESSION: {body}"
            quoted = text.replace('"', '""')
            out.write(f'r{i:05d},"{quoted}"\n')


def test_cli_determinism_at_scale(tmp_path, demo_ruleset):
    from radlabel.rules import demo_rules_root

    reports = tmp_path / "reports.csv"
    synthetic_corpus(reports, 10_000)
    root = demo_rules_root()
    outputs = []
    for run in range(2):
        out = tmp_path / f"run{run}.csv"
        started = time.perf_counter()
        code = main([
            "label",
            "--reports", str(reports),
            "--phrases", str(root / "phrases"),
            "--rules", str(root / "rules"),
            "--surface-only",
            "--output", str(out),
        ])
        elapsed = time.perf_counter() - started
        assert code == EXIT_OK
        assert elapsed < 60.0, f"labeling 10k reports took {elapsed:.1f}s"
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    ok("CLI determinism over 10,000 synthetic reports")
