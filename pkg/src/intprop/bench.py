"""Synthetic corpora and scaling measurements for the preparation step."""

import csv
import os
import random
import shutil
import statistics
import sys
import tempfile
from dataclasses import dataclass

from intprop.model import ValueRange, VariabilityModel
from intprop.rewrite import rewrite_tree
from intprop.transform import TransformConfig

BENCH_COLUMNS = ("series", "param", "total_conditions", "ms", "fallbacks", "max_tuples")
UNLIMITED = sys.maxsize


@dataclass(frozen=True)
class CorpusSpec:
    files: int = 100
    conditions_per_file: int = 10
    variables: int = 5
    range_size: int = 4
    seed: int = 0
    rule_coverage: bool = True

    def __post_init__(self):
        for name in ("files", "conditions_per_file", "variables", "range_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def total_conditions(self):
        return self.files * self.conditions_per_file


@dataclass
class BenchRow:
    series: str
    param: int
    total_conditions: int
    ms: float
    fallbacks: int
    max_tuples: int


# One template per transformation rule. Each condition combines at most two
# distinct variables, so the largest join in a corpus is range_size ** 2.
def _lit_arith(rng, a, b, r):
    return f"{a} > {rng.randint(1, 2)} * {rng.randint(1, max(1, r // 2))}"


def _lit_cmp(rng, a, b, r):
    return f"({rng.randint(0, 3)} < {rng.randint(0, 3)}) || defined({a})"


def _lit_var_arith(rng, a, b, r):
    return f"{a} * {rng.randint(2, 3)} <= {rng.randint(1, 2 * r)}"


def _var_lit_cmp(rng, a, b, r):
    return f"{a} {rng.choice(['>', '>=', '==', '!=', '<', '<='])} {rng.randint(1, r)}"


def _var_var_cmp(rng, a, b, r):
    return f"{a} {rng.choice(['>', '==', '!=', '<'])} {b}"


def _var_var_arith(rng, a, b, r):
    return f"{a} + {b} > {rng.randint(2, 2 * r)}"


RULE_TEMPLATES = {
    "literal-arithmetic": _lit_arith,
    "literal-comparison": _lit_cmp,
    "literal-variable-arithmetic": _lit_var_arith,
    "variable-literal-comparison": _var_lit_cmp,
    "variable-variable-comparison": _var_var_cmp,
    "variable-variable-arithmetic": _var_var_arith,
}


def variable_names(count):
    return [f"VAR_{i}" for i in range(count)]


def corpus_model(spec):
    values = tuple(range(1, spec.range_size + 1))
    return VariabilityModel({n: ValueRange(values) for n in variable_names(spec.variables)})


def _file_conditions(rng, spec, names):
    rules = list(RULE_TEMPLATES)
    picks = []
    if spec.rule_coverage:
        picks = rng.sample(rules, len(rules))[: spec.conditions_per_file]
    while len(picks) < spec.conditions_per_file:
        picks.append(rng.choice(rules))
    rng.shuffle(picks)
    out = []
    for rule in picks:
        a = rng.choice(names)
        others = [n for n in names if n != a] or [a]
        b = rng.choice(others)
        out.append((rule, RULE_TEMPLATES[rule](rng, a, b, spec.range_size)))
    return out


def render_file(index, conditions):
    lines = [f"/* generated corpus file {index} */", "#include <stddef.h>", ""]
    for k, (rule, cond) in enumerate(conditions):
        lines += [
            f"/* {rule} */",
            f"int f{index}_{k}(int x)",
            "{",
            f"#if {cond}",
            "    return x + 1;",
            "#else",
            "    return x - 1;",
            "#endif",
            "}",
            "",
        ]
    return "\n".join(lines)


def generate_corpus(spec, out):
    """Write C files and a matching model file below ``out``.

    Returns ``(source_dir, model_path)``. Identical specs give
    byte-identical trees.
    """
    if os.path.isdir(out) and os.listdir(out):
        raise FileExistsError(f"output directory is not empty: {out}")
    src = os.path.join(out, "src")
    os.makedirs(src, exist_ok=True)
    rng = random.Random(spec.seed)
    names = variable_names(spec.variables)
    width = len(str(spec.files - 1))
    for i in range(spec.files):
        text = render_file(i, _file_conditions(rng, spec, names))
        with open(os.path.join(src, f"file_{i:0{width}d}.c"), "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    model_path = os.path.join(out, "model.txt")
    with open(model_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(corpus_model(spec).dumps())
    return src, model_path


def measure(spec, config, repeats=3, jobs=1, workdir=None):
    """Median wall-clock (ms) of preparing a freshly generated corpus."""
    tmp = tempfile.mkdtemp(prefix="intprop-bench-", dir=workdir)
    try:
        src, _ = generate_corpus(spec, os.path.join(tmp, "corpus"))
        model = corpus_model(spec)
        times = []
        report = None
        for k in range(repeats):
            out = os.path.join(tmp, f"out{k}")
            report = rewrite_tree(src, out, model, config, jobs=jobs)
            times.append(report.duration * 1000)
            shutil.rmtree(out)
        return statistics.median(times), report
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def run_series_conditions(start=50, stop=1000, step=50, files=100, repeats=3,
                          seed=0, limit=1000, jobs=1, workdir=None, progress=None):
    rows = []
    config = TransformConfig(max_combinations=limit)
    for n in range(start, stop + 1, step):
        spec = CorpusSpec(files=files, conditions_per_file=n, seed=seed)
        ms, report = measure(spec, config, repeats, jobs, workdir)
        rows.append(BenchRow("conditions", n, spec.total_conditions, ms,
                             report.fallbacks, report.max_combinations))
        if progress:
            progress(rows[-1])
    return rows


def run_series_ranges(start=2, stop=18, step=1, limit=None, files=100, conditions=10,
                      repeats=3, seed=0, jobs=1, workdir=None, progress=None):
    """Vary the per-variable range size; ``limit=None`` removes the combination cap."""
    rows = []
    config = TransformConfig(max_combinations=UNLIMITED if limit is None else limit)
    for r in range(start, stop + 1, step):
        spec = CorpusSpec(files=files, conditions_per_file=conditions, range_size=r, seed=seed)
        ms, report = measure(spec, config, repeats, jobs, workdir)
        rows.append(BenchRow("ranges", r, spec.total_conditions, ms,
                             report.fallbacks, report.max_combinations))
        if progress:
            progress(rows[-1])
    return rows


def write_bench_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(BENCH_COLUMNS)
        for r in rows:
            w.writerow([r.series, r.param, r.total_conditions, f"{r.ms:.3f}", r.fallbacks, r.max_tuples])


def read_bench_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return [
            BenchRow(d["series"], int(d["param"]), int(d["total_conditions"]), float(d["ms"]),
                     int(d["fallbacks"]), int(d["max_tuples"]))
            for d in csv.DictReader(f)
        ]


def write_gnuplot(rows, out_dir):
    """One two-column ``<series>.dat`` per series; returns the paths written."""
    paths = []
    for series in sorted({r.series for r in rows}):
        path = os.path.join(out_dir, f"{series}.dat")
        with open(path, "w", encoding="utf-8") as f:
            xlabel = "total_conditions" if series == "conditions" else "range_size"
            f.write(f"# {xlabel} ms\n")
            for r in rows:
                if r.series == series:
                    x = r.total_conditions if series == "conditions" else r.param
                    f.write(f"{x} {r.ms:.3f}\n")
        paths.append(path)
    return paths


def linear_fit(xs, ys):
    """Least-squares line; returns ``(slope, intercept, r_squared)``."""
    fit = statistics.linear_regression(xs, ys)
    mean = statistics.fmean(ys)
    ss_tot = sum((y - mean) ** 2 for y in ys)
    ss_res = sum((y - (fit.slope * x + fit.intercept)) ** 2 for x, y in zip(xs, ys))
    r2 = 1.0 - ss_res / ss_tot if ss_tot else 1.0
    return fit.slope, fit.intercept, r2
