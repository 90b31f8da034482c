"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

from __future__ import annotations

import json
import re
import time
from contextlib import contextmanager
from datetime import date
from itertools import combinations

import numpy as np
import pytest

from tgclust.cli import main
from tgclust.cluster import jaccard_distance
from tgclust.combinat import k_heaviest_paths, stock_cover
from tgclust.stats import (
    correlation_critical_point,
    delta_threshold,
    ljung_box,
)
from tgclust.synth import planted_groups
from tgclust.tgc import build_tgc, strip_isolated
from tgclust.cluster import Clustering

from test_combinat import brute_force_paths, random_graph

CRITICAL_POINTS = {
    0.05: {5: 0.8783, 10: 0.6319, 20: 0.4438, 40: 0.3120, 60: 0.2542, 240: 0.1267},
    0.01: {5: 0.9587, 10: 0.7646, 20: 0.5614, 40: 0.4026, 60: 0.3301, 240: 0.1660},
}

PLANTED_SEED = 42
PLANTED_GROUPS = [4, 4, 4]


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {number} ({name}): FAIL")
        raise
    print(f"ACCEPTANCE {number} ({name}): PASS")


def test_criterion_1_critical_point_table():
    with criterion(1, "critical point table reproduction"):
        begin = time.perf_counter()
        for alpha, row in CRITICAL_POINTS.items():
            for n, expected in row.items():
                got = correlation_critical_point(n, alpha)
                assert abs(got - expected) <= 5e-4, (alpha, n, got)
        elapsed = time.perf_counter() - begin
        assert elapsed < 1.0, f"took {elapsed:.3f}s"


def test_criterion_2_delta_consistency():
    with criterion(2, "forty-day threshold midpoint"):
        assert abs(delta_threshold(40, 0.05, "positive") - 0.656) <= 5e-4


def test_criterion_3_jaccard_metric_suite():
    with criterion(3, "Jaccard metric axioms on 10^4 random triples"):
        rng = np.random.default_rng(31337)
        universe = np.arange(20)
        violations = 0
        for _ in range(10_000):
            triple = []
            for _ in range(3):
                mask = rng.random(20) < rng.uniform(0.05, 0.95)
                triple.append(set(universe[mask].tolist()))
            a, b, c = triple
            dab = jaccard_distance(a, b)
            dbc = jaccard_distance(b, c)
            dac = jaccard_distance(a, c)
            if not (0.0 <= dab <= 1.0):
                violations += 1
            if jaccard_distance(b, a) != dab:
                violations += 1
            if jaccard_distance(a, a) != 0.0:
                violations += 1
            if dac > dab + dbc + 1e-12:
                violations += 1
        assert violations == 0


def test_criterion_4_heaviest_path_oracle_equivalence():
    with criterion(4, "top-k paths match brute force on 200 random graphs"):
        rng = np.random.default_rng(271828)
        begin = time.perf_counter()
        for _ in range(200):
            g = random_graph(rng, max_segments=5, max_clusters=4)
            for k in (1, 2, 3):
                expected = brute_force_paths(g, k)
                got = k_heaviest_paths(g, k)
                assert [(p.weight, p.vertices) for p in got] == expected
        elapsed = time.perf_counter() - begin
        assert elapsed < 10.0, f"took {elapsed:.3f}s"


def test_criterion_5_cover_correctness():
    with criterion(5, "greedy cover hits every cluster; bound monitor"):
        rng = np.random.default_rng(161803)
        universe = [f"T{i:02d}" for i in range(14)]
        for _ in range(500):
            clusterings = []
            m = int(rng.integers(1, 5))
            for i in range(1, m + 1):
                perm = list(universe)
                rng.shuffle(perm)
                clusters, cursor = [], 0
                for _ in range(int(rng.integers(1, 5))):
                    size = int(rng.integers(2, 5))
                    if cursor + size > len(perm):
                        break
                    clusters.append(tuple(sorted(perm[cursor : cursor + size])))
                    cursor += size
                clusterings.append(
                    Clustering(i, tuple(clusters), tuple(sorted(perm[cursor:])))
                )
            g = build_tgc(clusterings)
            result = stock_cover(g, universe)
            cluster_vertices = strip_isolated(g).cluster_vertices()
            chosen = set(result.cover)
            for v in cluster_vertices:
                assert chosen & set(v.members), str(v.id)
            assert len(result.cover) <= len(cluster_vertices)

        # fixture: three pairwise-overlapping clusters across three segments
        g = build_tgc(
            [
                Clustering(1, (("A", "B"),), ("C",)),
                Clustering(2, (("B", "C"),), ("A",)),
                Clustering(3, (("A", "C"),), ("B",)),
            ]
        )
        result = stock_cover(g, ["A", "B", "C"])
        assert result.cover == ("A", "B")
        assert result.ratio == pytest.approx(2 / 3)
        assert result.bound_violated  # documented deviation from the 1/2 claim


def rand_index(labels_a: dict[str, int], labels_b: dict[str, int]) -> float:
    tickers = sorted(labels_a)
    agree = total = 0
    for x, y in combinations(tickers, 2):
        total += 1
        if (labels_a[x] == labels_a[y]) == (labels_b[x] == labels_b[y]):
            agree += 1
    return agree / total


def cluster_labels(doc: dict) -> dict[str, int]:
    labels = {}
    for j, cluster in enumerate(doc["clusters"], start=1):
        for t in cluster:
            labels[t] = j
    for i, t in enumerate(doc["outliers"]):
        labels[t] = 1000 + i  # each outlier is its own singleton
    return labels


@pytest.fixture(scope="module")
def planted_data(tmp_path_factory):
    data = tmp_path_factory.mktemp("planted")
    assert main(
        ["synth", "--out", str(data), "--seed", str(PLANTED_SEED),
         "--groups", "3", "--group-size", "4", "--days", "281",
         "--rho", "0.8", "--start", "2008-06-02"]
    ) == 0
    return data


def run_pipeline(data, out) -> None:
    base = ["--data", str(data), "--segment", "days:40", "--out", str(out)]
    assert main(["cluster", *base]) == 0
    assert main(["graph", *base]) == 0
    assert main(["paths", *base, "--k", "3"]) == 0
    assert main(["trace", *base, "--stock", "G1A"]) == 0
    assert main(["cover", *base]) == 0


def test_criterion_6_planted_recovery(planted_data, tmp_path):
    with criterion(6, "planted partition recovered (Rand >= 0.9 in >= 6/7)"):
        out = tmp_path / "out"
        begin = time.perf_counter()
        assert main(
            ["cluster", "--data", str(planted_data), "--segment", "days:40",
             "--out", str(out)]
        ) == 0
        elapsed = time.perf_counter() - begin
        truth = planted_groups(PLANTED_GROUPS)
        files = sorted(out.glob("clustering_seg*.json"))
        assert len(files) == 7
        scores = []
        for path in files:
            doc = json.loads(path.read_text())
            labels = cluster_labels(doc)
            assert set(labels) == set(truth)
            scores.append(rand_index(labels, truth))
        good = sum(1 for s in scores if s >= 0.9)
        assert good >= 6, f"Rand scores {scores}"
        assert elapsed < 30.0, f"took {elapsed:.3f}s"


def test_criterion_7_ljung_box_calibration():
    with criterion(7, "Ljung-Box p-value calibration"):
        kstest = pytest.importorskip("scipy.stats").kstest
        rng = np.random.default_rng(602214)
        pvals = [
            ljung_box(rng.standard_normal(256), 6).p_value for _ in range(1000)
        ]
        ks = kstest(pvals, "uniform")
        assert ks.pvalue > 0.01, f"KS p-value {ks.pvalue}"

        rejected = 0
        for _ in range(1000):
            e = rng.standard_normal(256)
            x = np.empty(256)
            x[0] = e[0]
            for i in range(1, 256):
                x[i] = 0.5 * x[i - 1] + e[i]
            if ljung_box(x, 6).p_value < 0.01:
                rejected += 1
        assert rejected >= 990, f"only {rejected}/1000 rejected"


PATH_LINE = re.compile(
    r"^\d+\.\d+( --\d+--> \d+\.\d+)*  \(total=\d+\)$"
)


def test_criterion_8_user_supplied_files_and_report_formats(tmp_path):
    with criterion(8, "end-to-end on externally supplied OHLC files"):
        # provider-style files: unsorted rows, extra Adj Close column
        data = tmp_path / "userdata"
        data.mkdir()
        rng = np.random.default_rng(20080601)
        days = [d.isoformat() for d in
                __import__("tgclust.synth", fromlist=["trading_days"]).trading_days(
                    date(2008, 6, 2), 81
                )]
        common = rng.standard_normal(80)
        for ticker, wobble in (("BKA", 0.2), ("BKB", 0.2), ("UTL", None), ("MIN", None)):
            if wobble is None:
                returns = 0.02 * rng.standard_normal(80)
            else:
                returns = 0.02 * (common + wobble * rng.standard_normal(80))
            closes = 100 * np.cumprod(np.concatenate([[1.0], 1 + returns]))
            rows = [
                f"{d},{c:.4f},{c:.4f},{c:.4f},{c:.4f},{c:.4f},12345"
                for d, c in zip(days, closes)
            ]
            rng.shuffle(rows)  # provider files are not guaranteed sorted
            (data / f"{ticker}.csv").write_text(
                "Date,Open,High,Low,Close,Adj Close,Volume\n" + "\n".join(rows) + "\n"
            )
        out = tmp_path / "userout"
        base = ["--data", str(data), "--segment", "days:40", "--out", str(out)]
        assert main(["graph", *base]) == 0
        assert main(["paths", *base, "--k", "3"]) == 0
        assert main(["cover", *base, "--include-outliers"]) == 0

        path_lines = [
            line for line in (out / "paths.txt").read_text().splitlines()
            if not line.startswith("#")
        ]
        assert path_lines and all(PATH_LINE.match(line) for line in path_lines)
        cover_lines = (out / "cover.txt").read_text().splitlines()
        assert any(line.startswith("cover: ") for line in cover_lines)
        doc = json.loads((out / "tgc.json").read_text())
        assert {"m", "vertices", "edges"} <= set(doc)


def test_criterion_9_byte_identical_reruns(planted_data, tmp_path):
    with criterion(9, "byte-identical JSON outputs across reruns"):
        first, second = tmp_path / "first", tmp_path / "second"
        run_pipeline(planted_data, first)
        run_pipeline(planted_data, second)
        names = sorted(p.name for p in first.glob("*.json"))
        assert names, "pipeline produced no JSON outputs"
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name
