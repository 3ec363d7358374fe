import os

import pytest

from intprop import bench
from intprop.model import read_model
from intprop.rewrite import rewrite_tree


def _read_tree(root):
    out = {}
    for name in sorted(os.listdir(root)):
        with open(os.path.join(root, name), "rb") as f:
            out[name] = f.read()
    return out


def test_generate_is_deterministic(tmp_path):
    spec = bench.CorpusSpec(files=4, conditions_per_file=9, seed=42)
    a, model_a = bench.generate_corpus(spec, tmp_path / "a")
    b, model_b = bench.generate_corpus(spec, tmp_path / "b")
    assert _read_tree(a) == _read_tree(b)
    assert read_model(model_a) == read_model(model_b) == bench.corpus_model(spec)
    c, _ = bench.generate_corpus(bench.CorpusSpec(files=4, conditions_per_file=9, seed=43),
                                 tmp_path / "c")
    assert _read_tree(a) != _read_tree(c)


def test_generated_counts_and_rule_coverage(tmp_path):
    spec = bench.CorpusSpec(files=10, conditions_per_file=100, seed=0)
    src, _ = bench.generate_corpus(spec, tmp_path / "g")
    assert len(os.listdir(src)) == 10
    total = 0
    for name, data in _read_tree(src).items():
        text = data.decode()
        total += text.count("\n#if ")
        for rule in bench.RULE_TEMPLATES:
            assert f"/* {rule} */" in text, (name, rule)
    assert total == 1000 == spec.total_conditions


def test_generated_corpus_converts_without_fallback(tmp_path):
    spec = bench.CorpusSpec(files=3, conditions_per_file=20, range_size=5)
    src, model = bench.generate_corpus(spec, tmp_path / "g")
    report = rewrite_tree(src, tmp_path / "out", read_model(model))
    assert report.converted == 60 and report.fallbacks == 0 and report.skips == 0
    assert report.max_combinations == 25


def test_minimal_corpus(tmp_path):
    spec = bench.CorpusSpec(files=1, conditions_per_file=1, variables=1, range_size=1)
    src, model = bench.generate_corpus(spec, tmp_path / "g")
    report = rewrite_tree(src, tmp_path / "out", read_model(model))
    assert report.found == 3 and report.skips == 0


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        bench.CorpusSpec(files=0)
    (tmp_path / "busy").mkdir()
    (tmp_path / "busy" / "f").write_text("")
    with pytest.raises(FileExistsError):
        bench.generate_corpus(bench.CorpusSpec(files=1), tmp_path / "busy")


def test_small_series_and_outputs(tmp_path):
    rows = bench.run_series_conditions(5, 15, 5, files=3, repeats=1)
    assert [r.param for r in rows] == [5, 10, 15]
    assert [r.total_conditions for r in rows] == [15, 30, 45]
    assert all(r.ms > 0 for r in rows)
    rows += bench.run_series_ranges(2, 4, 1, files=2, conditions=6, repeats=1)
    assert [r.max_tuples for r in rows[3:]] == [4, 9, 16]
    path = tmp_path / "bench.csv"
    bench.write_bench_csv(rows, path)
    back = bench.read_bench_csv(path)
    assert [(r.series, r.param, r.fallbacks, r.max_tuples) for r in back] == [
        (r.series, r.param, r.fallbacks, r.max_tuples) for r in rows]
    assert path.read_text().splitlines()[0] == ",".join(bench.BENCH_COLUMNS)
    dats = bench.write_gnuplot(rows, tmp_path)
    assert sorted(os.path.basename(p) for p in dats) == ["conditions.dat", "ranges.dat"]
    lines = (tmp_path / "ranges.dat").read_text().splitlines()
    assert lines[0].startswith("#") and lines[1].split()[0] == "2"


def test_linear_fit_exact_line():
    slope, icpt, r2 = bench.linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
    assert slope == pytest.approx(2) and icpt == pytest.approx(1) and r2 == pytest.approx(1)
