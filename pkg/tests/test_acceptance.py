"""Acceptance criteria; the terminal summary lists one PASS/FAIL line each."""

import hashlib
import os
import random

import pytest

from intprop import bench
from intprop.model import ValueRange, VariabilityModel, load_model, read_model
from intprop.oracle import Verdict, check_equisat, format_config
from intprop.parser import parse_condition, serialize
from intprop.rewrite import Outcome, rewrite_text, rewrite_tree
from intprop.transform import (
    And,
    Lit,
    Or,
    TransformConfig,
    TupleSet,
    ValueTuple,
    Var,
    convert_condition,
    eval_int,
    format_formula,
    resolve_comparison,
)

from helpers import expr_depth, random_condition, random_model

criterion = pytest.mark.criterion


def norm(text):
    return " ".join(text.split())


@criterion(1, "golden transformation")
def test_golden_transformation(record_property):
    model = load_model("VAR_A = {1, 2, 3}\nVAR_B = {5, 6}\nVAR_C = {0, 1}\nCONST_A = {2}\n")
    new, report = rewrite_text("#if (VAR_A * CONST_A > VAR_B) || defined(VAR_C)\n", model)
    got = new.removeprefix("#if ").rstrip("\n")
    record_property("detail", got)
    assert norm(got) == norm("(defined(VAR_A_eq_3) && defined(VAR_B_eq_5)) || defined(VAR_C)")
    assert report.converted == 1


@criterion(2, "golden fallback")
def test_golden_fallback(record_property):
    model = load_model("VAR_A = *\n")
    new, report = rewrite_text("#if VAR_A * 2 > 5\n", model)
    got = new.removeprefix("#if ").rstrip("\n")
    record_property("detail", got)
    assert norm(got) == "defined(VAR_A)"
    assert report.fallbacks == 1


@criterion(3, "oracle equisatisfiability on 500 random conditions")
def test_oracle_equisatisfiability(record_property):
    rng = random.Random(20240611)
    config = TransformConfig(max_combinations=10**6)
    equivalent = fallback = 0
    failures = []
    for _ in range(500):
        model = random_model(rng, n_vars=rng.randint(1, 3), max_range=6)
        expr = random_condition(rng, sorted(model.entries), depth=5)
        assert expr_depth(expr) <= 5
        res = check_equisat(expr, model, config)
        if res.verdict is Verdict.NOT_APPLICABLE:
            fallback += 1
        elif res.verdict is Verdict.EQUIVALENT:
            equivalent += 1
        else:
            failures.append(f"{serialize(expr)} under {model.dumps()!r}: "
                            f"{format_config(res.counterexample)}")
    record_property("detail", f"{equivalent} equivalent, {fallback} fallback, "
                              f"{len(failures)} counterexamples")
    for line in failures:
        print("COUNTEREXAMPLE", line)
    assert not failures
    assert equivalent > 0


@criterion(4, "rule-table micro-examples")
def test_rule_table():
    m = VariabilityModel({"VAR_A": ValueRange((1, 2, 3)), "VAR_B": ValueRange((1, 2))})

    assert eval_int(parse_condition("2 * 4"), m) == Lit(8)

    plus = eval_int(parse_condition("VAR_A + 2"), m)
    assert [(t.current, t.originals) for t in plus.tuples] == [
        (3, (("VAR_A", 1),)), (4, (("VAR_A", 2),)), (5, (("VAR_A", 3),))]

    shifted = eval_int(parse_condition("VAR_A + 3"), m)
    assert resolve_comparison(">", shifted, Lit(4), m) == Or((Var("VAR_A_eq_2"), Var("VAR_A_eq_3")))

    a = TupleSet([ValueTuple(c, (("VAR_A", o),)) for c, o in [(3, 1), (4, 2), (5, 3)]],
                 frozenset({"VAR_A"}))
    b = TupleSet([ValueTuple(c, (("VAR_B", o),)) for c, o in [(4, 1), (5, 2)]],
                 frozenset({"VAR_B"}))
    assert resolve_comparison("==", a, b, m) == Or((
        And((Var("VAR_A_eq_2"), Var("VAR_B_eq_1"))),
        And((Var("VAR_A_eq_3"), Var("VAR_B_eq_2"))),
    ))

    m2 = VariabilityModel({"VAR_A": ValueRange((1, 2)), "VAR_B": ValueRange((1, 2))})
    merged = eval_int(parse_condition("(VAR_A + 2) + (VAR_B + 3)"), m2)
    assert merged.tuples[0] == ValueTuple(7, (("VAR_A", 1), ("VAR_B", 1)))
    assert format_formula(resolve_comparison("==", merged, Lit(7), m2)) == \
        "defined(VAR_A_eq_1) && defined(VAR_B_eq_1)"


@criterion(5, "combination count r^2 for X + Y")
def test_combination_count_law(record_property):
    counts = {}
    for r in range(2, 19):
        values = tuple(range(r))
        m = VariabilityModel({"X": ValueRange(values), "Y": ValueRange(values)})
        counts[r] = len(eval_int(parse_condition("X + Y"), m, TransformConfig(10**6)))
    record_property("detail", f"r=18 -> {counts[18]}")
    assert counts == {r: r * r for r in range(2, 19)}


@pytest.mark.slow
@criterion(6, "linear scaling over the conditions series")
def test_linear_scaling(record_property, tmp_path):
    rows = bench.run_series_conditions(50, 1000, 50, files=100, repeats=3, workdir=tmp_path)
    bench.write_bench_csv(rows, tmp_path / "bench.csv")
    xs = [r.total_conditions for r in rows]
    ys = [r.ms for r in rows]
    _, _, r2 = bench.linear_fit(xs, ys)
    by = {r.param: r.ms for r in rows}
    ratio = by[1000] / by[100]
    record_property("detail", f"R^2={r2:.4f}, ms(1000)/ms(100)={ratio:.2f}, "
                              f"ms(1000)={by[1000]:.0f}")
    assert len(rows) == 20
    assert r2 >= 0.9
    assert 5 <= ratio <= 20


@criterion(7, "combination limit mitigation over the ranges series")
def test_limit_mitigation(record_property, tmp_path):
    default = bench.run_series_ranges(2, 18, 1, limit=1000, workdir=tmp_path)
    assert [r.param for r in default] == list(range(2, 19))
    for row in default:
        assert (row.fallbacks > 0) == (row.max_tuples > 1000), row
    # a lower limit makes the "iff" non-vacuous at this range size
    tight = bench.run_series_ranges(2, 18, 1, limit=100, repeats=1, workdir=tmp_path)
    for row in tight:
        assert (row.fallbacks > 0) == (row.max_tuples > 100), row
    assert any(r.fallbacks for r in tight) and not all(r.fallbacks for r in tight)
    unlimited = bench.run_series_ranges(2, 18, 1, limit=10**6, workdir=tmp_path)
    assert [r.max_tuples for r in unlimited] == [r * r for r in range(2, 19)]
    assert all(r.fallbacks == 0 for r in unlimited)
    record_property("detail", "limit 1000: %d fallback points; limit 100: fallback from r=%d"
                    % (sum(r.fallbacks > 0 for r in default),
                       min(r.param for r in tight if r.fallbacks)))


@criterion(8, "skip behavior")
def test_skip_behavior(tmp_path):
    model = load_model("VAR_A = {1, 2, 3}\nVAR_B = {5, 6}\n")
    skipped = [
        "#if VAR_A ## VAR_B\n",
        "#if MAX(VAR_A, VAR_B) > 5\n",
        '#if VAR_A == "three"\n',
    ]
    text = (
        "int a;\n" + skipped[0] + "#endif\n"
        + "#if VAR_A > 2\n#endif\n"
        + skipped[1] + "#endif\n"
        + skipped[2] + "#endif\n"
    )
    src = tmp_path / "src"
    src.mkdir()
    (src / "skips.c").write_text(text)
    report = rewrite_tree(src, tmp_path / "out", model)
    out = (tmp_path / "out" / "skips.c").read_text()
    assert report.skips == 3
    assert [s.outcome for s in report.sites if s.kind == "if"] == [
        Outcome.SKIPPED, Outcome.CONVERTED, Outcome.SKIPPED, Outcome.SKIPPED]
    for line in skipped:
        assert line in out
    assert out == text.replace("#if VAR_A > 2\n", "#if defined(VAR_A_eq_3)\n")


def _residue(text, sites, which):
    lines = text.splitlines(keepends=True)
    drop = set()
    for s in sites:
        if s.outcome in (Outcome.CONVERTED, Outcome.FALLBACK):
            if which == "in":
                drop.update(range(s.line - 1, s.line - 1 + s.span))
            else:
                drop.add(s.out_line - 1)
    return b"".join(
        line.encode("utf-8", "surrogateescape") for i, line in enumerate(lines) if i not in drop)


def _messy_file(rng, names):
    parts = []
    for k in range(rng.randint(3, 12)):
        cond = serialize(random_condition(rng, names, 3))
        style = rng.random()
        if style < 0.2:
            cut = cond.find(" ")
            if cut > 0:
                cond = cond[:cut] + " \\\n    " + cond[cut + 1:]
        elif style < 0.3:
            cond += " /* why */"
        elif style < 0.4:
            cond = "MACRO(" + cond + ")"
        nl = "\r\n" if rng.random() < 0.2 else "\n"
        directive = rng.choice(["#if", "# if", "  #elif", "#ifdef", "#ifndef"])
        if directive.endswith("def"):
            cond = rng.choice(names)
        parts.append(f"/* block {k} \xe9 */{nl}{directive} {cond}{nl}  int v{k};{nl}#endif{nl}")
    parts.append("tail \udcff// no newline")
    return "".join(parts)


@criterion(9, "byte preservation outside rewritten sites")
def test_byte_preservation(tmp_path, record_property):
    rng = random.Random(9)
    checked = 0
    # the benchmark corpus
    spec = bench.CorpusSpec(files=5, conditions_per_file=30, seed=1)
    corpus_src, model_path = bench.generate_corpus(spec, tmp_path / "corpus")
    corpora = [(corpus_src, read_model(model_path))]
    # hand-rolled trees with continuations, comments, CRLF, skips and raw bytes
    for t in range(3):
        model = random_model(rng, n_vars=3, max_range=5)
        root = tmp_path / f"messy{t}"
        (root / "inc").mkdir(parents=True)
        for i in range(4):
            sub = root / "inc" if i % 2 else root
            (sub / f"m{i}.{'h' if i % 2 else 'c'}").write_bytes(
                _messy_file(rng, sorted(model.entries)).encode("utf-8", "surrogateescape"))
        (root / "README").write_bytes(os.urandom(64))
        corpora.append((str(root), model))

    for n, (src, model) in enumerate(corpora):
        out = tmp_path / f"out{n}"
        report = rewrite_tree(src, out, model)
        by_file = {}
        for s in report.sites:
            by_file.setdefault(s.file, []).append(s)
        h_in, h_out = hashlib.sha256(), hashlib.sha256()
        for dirpath, dirnames, files in os.walk(src):
            dirnames.sort()
            for name in sorted(files):
                rel = os.path.relpath(os.path.join(dirpath, name), src).replace(os.sep, "/")
                with open(os.path.join(src, rel), "rb") as f:
                    raw_in = f.read()
                with open(os.path.join(out, rel), "rb") as f:
                    raw_out = f.read()
                sites = by_file.get(rel, [])
                if sites:
                    raw_in = _residue(raw_in.decode("utf-8", "surrogateescape"), sites, "in")
                    raw_out = _residue(raw_out.decode("utf-8", "surrogateescape"), sites, "out")
                h_in.update(rel.encode() + b"\0" + raw_in)
                h_out.update(rel.encode() + b"\0" + raw_out)
                checked += 1
        assert h_in.hexdigest() == h_out.hexdigest(), src
    record_property("detail", f"{checked} files in {len(corpora)} trees")
