"""Evaluation harness: intent confusion matrix and confidence distributions.

Test queries are copies of a stratified random sample of documents — verbatim,
or run through a light perturbation (drop one token or shuffle) standing in
for how real users rephrase past queries. The index keeps every document, so
verbatim evaluation measures the self-retrieval ceiling and perturbed
evaluation measures robustness to rephrasing.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import asdict, dataclass, field

from kccbot.corpus import QaDocument
from kccbot.dialogue import DialoguePolicy
from kccbot.errors import EmptyTestSet, InsufficientData
from kccbot.retrieval.index import TfIdfIndex, retrieve_top_k

N_BINS = 10


@dataclass
class EvalPair:
    query_tokens: list[str]
    true_query_type: str
    true_doc_id: int


@dataclass
class EvalSplit:
    train_docs: list[QaDocument]
    test_pairs: list[EvalPair]
    seed: int
    test_fraction: float
    perturbed: bool = False


def paraphrase_perturb(tokens: list[str], seed: int) -> list[str]:
    """One seeded perturbation: drop a random token or shuffle the order.

    Never returns an empty list; single-token input comes back unchanged.
    """
    if len(tokens) < 2:
        return list(tokens)
    rng = random.Random(seed)
    out = list(tokens)
    if rng.random() < 0.5:
        out.pop(rng.randrange(len(out)))
    else:
        rng.shuffle(out)
    return out


def make_split(
    docs: list[QaDocument],
    test_fraction: float,
    seed: int,
    *,
    perturb: bool = False,
) -> EvalSplit:
    """Stratified-by-intent sample of test queries, reproducible from seed.

    Each intent class contributes floor(n * fraction) pairs (at least one for
    classes with two or more documents), capped so at least one document per
    sampled class is never used as a test source. Single-document classes
    contribute nothing.
    """
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError(f"test_fraction {test_fraction} outside [0, 1)")
    by_type: dict[str, list[QaDocument]] = {}
    for doc in docs:
        by_type.setdefault(doc.query_type, []).append(doc)

    rng = random.Random(seed)
    test_pairs: list[EvalPair] = []
    for query_type in sorted(by_type):
        members = sorted(by_type[query_type], key=lambda d: d.doc_id)
        if len(members) < 2 or test_fraction == 0.0:
            continue
        n_test = min(len(members) - 1, max(1, math.floor(len(members) * test_fraction)))
        for doc in rng.sample(members, n_test):
            tokens = list(doc.query_tokens)
            if perturb:
                tokens = paraphrase_perturb(tokens, seed=rng.randrange(2**32))
            test_pairs.append(EvalPair(tokens, doc.query_type, doc.doc_id))

    if not test_pairs:
        small = sorted(t for t, members in by_type.items() if len(members) < 2)
        raise InsufficientData(
            f"no test pairs (fraction={test_fraction}, "
            f"classes with <2 docs: {small or 'none'})"
        )
    return EvalSplit(
        train_docs=list(docs),
        test_pairs=test_pairs,
        seed=seed,
        test_fraction=test_fraction,
        perturbed=perturb,
    )


@dataclass
class EvalReport:
    labels: list[str]
    confusion: list[list[int]]  # rows = true intent, cols = predicted
    accuracy: float
    answer_rate: float
    confidence_hist_correct: list[int]
    confidence_hist_wrong: list[int]
    response_hist_correct: list[int]
    response_hist_wrong: list[int]
    n_test: int
    threshold_used: float
    bin_edges: list[float] = field(
        default_factory=lambda: [round(i / N_BINS, 1) for i in range(N_BINS + 1)]
    )


def _bin_of(confidence: float) -> int:
    """Bin index over [0, 0.1, ..., 1.0]; the last bin is closed at 1.0."""
    return min(int(confidence * N_BINS), N_BINS - 1)


def evaluate(split: EvalSplit, index: TfIdfIndex, policy: DialoguePolicy) -> EvalReport:
    """Score every test pair and aggregate the three report artifacts.

    Intent correctness compares the top match's query_type with the pair's
    true intent; response correctness compares the top doc id with the pair's
    source document. Conservation (matrix and histograms each summing to
    n_test) is checked on every run.
    """
    if not split.test_pairs:
        raise EmptyTestSet("evaluation requested over zero test pairs")

    outcomes = []
    for pair in split.test_pairs:
        matches = retrieve_top_k(pair.query_tokens, index, 1)
        if matches:
            predicted, confidence, top_doc = (
                matches[0].query_type,
                matches[0].score,
                matches[0].doc_id,
            )
        else:
            predicted, confidence, top_doc = "UNKNOWN", 0.0, None
        outcomes.append((pair, predicted, confidence, top_doc))

    labels = sorted(
        {pair.true_query_type for pair in split.test_pairs}
        | {predicted for _, predicted, _, _ in outcomes}
    )
    label_pos = {label: i for i, label in enumerate(labels)}
    confusion = [[0] * len(labels) for _ in labels]
    hist_ok = [0] * N_BINS
    hist_bad = [0] * N_BINS
    resp_ok = [0] * N_BINS
    resp_bad = [0] * N_BINS
    correct = 0
    answered = 0
    for pair, predicted, confidence, top_doc in outcomes:
        confusion[label_pos[pair.true_query_type]][label_pos[predicted]] += 1
        intent_ok = predicted == pair.true_query_type
        correct += intent_ok
        answered += confidence >= policy.confidence_threshold
        (hist_ok if intent_ok else hist_bad)[_bin_of(confidence)] += 1
        (resp_ok if top_doc == pair.true_doc_id else resp_bad)[_bin_of(confidence)] += 1

    n_test = len(split.test_pairs)
    report = EvalReport(
        labels=labels,
        confusion=confusion,
        accuracy=correct / n_test,
        answer_rate=answered / n_test,
        confidence_hist_correct=hist_ok,
        confidence_hist_wrong=hist_bad,
        response_hist_correct=resp_ok,
        response_hist_wrong=resp_bad,
        n_test=n_test,
        threshold_used=policy.confidence_threshold,
    )
    _check_conservation(report)
    return report


def _check_conservation(report: EvalReport) -> None:
    matrix_sum = sum(sum(row) for row in report.confusion)
    intent_sum = sum(report.confidence_hist_correct) + sum(report.confidence_hist_wrong)
    response_sum = sum(report.response_hist_correct) + sum(report.response_hist_wrong)
    if not matrix_sum == intent_sum == response_sum == report.n_test:
        raise ValueError(
            f"conservation violated: matrix={matrix_sum} intent={intent_sum} "
            f"response={response_sum} n_test={report.n_test}"
        )
    trace = sum(report.confusion[i][i] for i in range(len(report.labels)))
    if abs(report.accuracy - trace / report.n_test) > 1e-12:
        raise ValueError("accuracy does not equal trace/n_test")


def report_to_json(report: EvalReport) -> str:
    return json.dumps(asdict(report), indent=2, ensure_ascii=False)


def report_from_json(text: str) -> EvalReport:
    return EvalReport(**json.loads(text))


def _write_hist_csv(path, edges, correct, wrong) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "correct", "wrong"])
        for i in range(N_BINS):
            writer.writerow([edges[i], edges[i + 1], correct[i], wrong[i]])
        writer.writerow(["total", "", sum(correct), sum(wrong)])


def render_report(report: EvalReport, out_dir, *, svg: bool = False) -> list[str]:
    """Write confusion.csv, the two histogram CSVs, report.json and optionally
    report.svg into out_dir; returns the paths written."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    written = []

    path = os.path.join(out_dir, "confusion.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true\\predicted", *report.labels])
        for label, row in zip(report.labels, report.confusion):
            writer.writerow([label, *row])
        writer.writerow(["total", sum(sum(r) for r in report.confusion)])
    written.append(path)

    path = os.path.join(out_dir, "intent_confidence.csv")
    _write_hist_csv(
        path, report.bin_edges, report.confidence_hist_correct, report.confidence_hist_wrong
    )
    written.append(path)

    path = os.path.join(out_dir, "response_confidence.csv")
    _write_hist_csv(
        path, report.bin_edges, report.response_hist_correct, report.response_hist_wrong
    )
    written.append(path)

    path = os.path.join(out_dir, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report))
    written.append(path)

    if svg:
        path = os.path.join(out_dir, "report.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_svg(report))
        written.append(path)
    return written


def render_svg(report: EvalReport) -> str:
    """Small self-contained SVG: confusion heatmap plus the two histograms."""
    cell = 42
    n = len(report.labels)
    peak = max((max(row) for row in report.confusion), default=1) or 1
    margin_left, margin_top = 150, 60
    heat_w = margin_left + n * cell + 40
    heat_h = margin_top + n * cell + 40
    hist_h = 160
    width = max(heat_w, 640)
    height = heat_h + 2 * (hist_h + 60)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<text x="{margin_left}" y="20" font-size="14">Intent confusion matrix '
        f"(n={report.n_test}, accuracy={report.accuracy:.3f})</text>",
    ]
    for i, label in enumerate(report.labels):
        parts.append(
            f'<text x="{margin_left - 6}" y="{margin_top + i * cell + cell / 2 + 4}" '
            f'text-anchor="end">{_esc(label)}</text>'
        )
        parts.append(
            f'<text x="{margin_left + i * cell + cell / 2}" y="{margin_top - 8}" '
            f'text-anchor="middle" transform="rotate(-35 {margin_left + i * cell + cell / 2} '
            f'{margin_top - 8})">{_esc(label)}</text>'
        )
        for j in range(n):
            value = report.confusion[i][j]
            shade = 255 - int(200 * value / peak)
            x, y = margin_left + j * cell, margin_top + i * cell
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="rgb({shade},{shade},255)" stroke="#999"/>'
            )
            parts.append(
                f'<text x="{x + cell / 2}" y="{y + cell / 2 + 4}" '
                f'text-anchor="middle">{value}</text>'
            )

    def bars(title, correct, wrong, y0):
        peak_bar = max(max(correct), max(wrong), 1)
        bar_w = 20
        parts.append(f'<text x="40" y="{y0 - 10}" font-size="13">{title}</text>')
        for i in range(N_BINS):
            x = 60 + i * (2 * bar_w + 14)
            for offset, counts, color in ((0, correct, "#4a7"), (bar_w, wrong, "#c55")):
                h = int((hist_h - 40) * counts[i] / peak_bar)
                parts.append(
                    f'<rect x="{x + offset}" y="{y0 + hist_h - 40 - h}" width="{bar_w - 2}" '
                    f'height="{h}" fill="{color}"/>'
                )
                if counts[i]:
                    parts.append(
                        f'<text x="{x + offset + bar_w / 2}" y="{y0 + hist_h - 44 - h}" '
                        f'text-anchor="middle" font-size="9">{counts[i]}</text>'
                    )
            parts.append(
                f'<text x="{x + bar_w}" y="{y0 + hist_h - 24}" text-anchor="middle" '
                f'font-size="9">{report.bin_edges[i]}-{report.bin_edges[i + 1]}</text>'
            )

    bars(
        "Intent prediction confidence (green=correct, red=wrong)",
        report.confidence_hist_correct,
        report.confidence_hist_wrong,
        heat_h + 40,
    )
    bars(
        "Response selection confidence (green=correct, red=wrong)",
        report.response_hist_correct,
        report.response_hist_wrong,
        heat_h + hist_h + 100,
    )
    parts.append("</svg>")
    return "\n".join(parts)


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
