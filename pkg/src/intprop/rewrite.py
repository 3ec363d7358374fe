"""Copy a source tree, replacing ``#if``/``#elif`` conditions on the way."""

import csv
import enum
import os
import re
import shutil
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

from intprop.parser import SkipCondition, SkipReason
from intprop.transform import SigmaNamer, TransformConfig, convert_condition

DEFAULT_EXTENSIONS = (".c", ".h")
ENCODING = "utf-8"
ERRORS = "surrogateescape"

_DIRECTIVE_RE = re.compile(r"[ \t]*#[ \t]*([A-Za-z_][A-Za-z0-9_]*)")
_CONDITIONALS = {"if": "if", "elif": "elif", "ifdef": "none", "ifndef": "none",
                 "else": "none", "endif": "none"}


class Outcome(enum.Enum):
    CONVERTED = "converted"
    FALLBACK = "fallback"
    SKIPPED = "skipped"
    UNTOUCHED = "untouched"


@dataclass
class DirectiveSite:
    line: int  # 1-based
    span: int  # physical lines, including continuations
    kind: str  # "if", "elif" or "none"
    directive: str
    condition: str
    prefix: str  # "#if", "  # elif", ... as written
    start: int  # offset of the first character of the first line
    end: int  # offset just past the last line, before its line break
    error: Optional[SkipReason] = None

    @property
    def rewritable(self):
        return self.kind in ("if", "elif")


def strip_comments(text, in_block=False):
    """Replace comments by a single space.

    Returns ``(stripped, in_block)`` where ``in_block`` tells whether the
    text ends inside an open ``/*`` comment. Quoted literals are copied
    verbatim so ``"/*"`` does not open a comment.
    """
    if not in_block and "/" not in text:
        return text, False
    out = []
    i = 0
    n = len(text)
    while i < n:
        if in_block:
            close = text.find("*/", i)
            if close < 0:
                return "".join(out), True
            i = close + 2
            in_block = False
            out.append(" ")
            continue
        c = text[i]
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            in_block = True
            i += 2
        elif c == "/" and i + 1 < n and text[i + 1] == "/":
            nl = text.find("\n", i)
            out.append(" ")
            if nl < 0:
                break
            i = nl
        elif c in "\"'":
            j = i + 1
            while j < n and text[j] != c and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            out.append(text[i:j + 1])
            i = j + 1
        else:
            out.append(c)
            i += 1
    return "".join(out), in_block


# Things in ordinary code that matter: comments, quoted literals (which may
# contain comment markers) and lines starting with '#'.
_CODE_RE = re.compile(r"""/\*|//|"|'|^[ \t]*\#""", re.M)


def _line_end(text, pos):
    """``(content_end, next_line_start)`` of the physical line holding ``pos``."""
    nl = text.find("\n", pos)
    if nl < 0:
        return len(text), len(text)
    end = nl - 1 if nl > pos and text[nl - 1] == "\r" else nl
    if end < pos:
        end = pos
    return end, nl + 1


def _continued_before(text, pos):
    """True if the line starting at ``pos`` continues the previous one."""
    if pos >= 2 and text[pos - 2:pos] == "\\\n":
        return True
    return pos >= 3 and text[pos - 3:pos] == "\\\r\n"


def _skip_literal(text, pos):
    quote = text[pos]
    i = pos + 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == quote or c == "\n":
            return i + 1
        i += 2 if c == "\\" else 1
    return n


def _logical_line(text, start):
    """Join one directive's physical lines.

    Returns ``(stripped, content_end, next_start, span, unterminated)``.
    Backslash-newline becomes a single space; a block comment left open
    at the end of a line pulls in the following lines.
    """
    parts = []
    pos = start
    span = 0
    n = len(text)
    while True:
        end, nxt = _line_end(text, pos)
        piece = text[pos:end]
        span += 1
        if piece.endswith("\\") and nxt < n:
            parts.append(piece[:-1])
            parts.append(" ")
            pos = nxt
            continue
        parts.append(piece)
        stripped, open_block = strip_comments("".join(parts))
        if open_block:
            if nxt < n:
                parts.append("\n")
                pos = nxt
                continue
            return stripped, end, nxt, span, True
        return stripped, end, nxt, span, False


def scan_file(contents):
    """Find the conditional directives of one file."""
    sites = []
    text = contents
    pos = 0
    line = 1
    counted = 0  # offset up to which newlines are counted into ``line``
    while True:
        m = _CODE_RE.search(text, pos)
        if m is None:
            break
        tok = m.group()
        if tok == "/*":
            close = text.find("*/", m.end())
            if close < 0:
                break
            pos = close + 2
        elif tok == "//":
            end, nxt = _line_end(text, m.end())
            while text[m.start():end].endswith("\\") and nxt < len(text):
                end, nxt = _line_end(text, nxt)
            pos = end
        elif tok in "\"'":
            pos = _skip_literal(text, m.start())
        else:
            start = m.start()
            pos = m.end()
            if _continued_before(text, start):
                continue
            dm = _DIRECTIVE_RE.match(text, start)
            stripped, end, nxt, span, unterminated = _logical_line(text, start)
            line += text.count("\n", counted, start)
            counted = start
            if dm is not None and dm.group(1) in _CONDITIONALS:
                prefix_len = dm.end() - start
                sites.append(DirectiveSite(
                    line=line,
                    span=span,
                    kind=_CONDITIONALS[dm.group(1)],
                    directive=dm.group(1),
                    condition=stripped[prefix_len:].strip(),
                    prefix=text[start:dm.end()],
                    start=start,
                    end=end,
                    error=SkipReason.UNTERMINATED_COMMENT if unterminated else None,
                ))
            pos = max(nxt, pos)
    return sites


# --- report ---------------------------------------------------------------


@dataclass
class SiteResult:
    file: str
    line: int
    kind: str
    outcome: Outcome
    reason: str = ""
    ms: float = 0.0
    span: int = 1
    out_line: int = 0
    replacement: str = ""


@dataclass
class RewriteReport:
    sites: List[SiteResult] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    files: int = 0
    rewritten_files: int = 0
    duration: float = 0.0  # seconds
    max_combinations: int = 0
    limit_hits: int = 0
    tilde_uses: int = 0
    div_zero_drops: int = 0

    def count(self, outcome):
        return sum(1 for s in self.sites if s.outcome is outcome)

    @property
    def found(self):
        return len(self.sites)

    @property
    def converted(self):
        return self.count(Outcome.CONVERTED)

    @property
    def fallbacks(self):
        return self.count(Outcome.FALLBACK)

    @property
    def skips(self):
        return self.count(Outcome.SKIPPED)

    @property
    def untouched(self):
        return self.count(Outcome.UNTOUCHED)

    @property
    def lines_removed(self):
        return sum(s.span - 1 for s in self.sites if s.outcome in (Outcome.CONVERTED, Outcome.FALLBACK))

    def merge(self, other):
        self.sites.extend(other.sites)
        self.warnings.extend(other.warnings)
        self.files += other.files
        self.rewritten_files += other.rewritten_files
        self.max_combinations = max(self.max_combinations, other.max_combinations)
        self.limit_hits += other.limit_hits
        self.tilde_uses += other.tilde_uses
        self.div_zero_drops += other.div_zero_drops
        return self

    def summary(self):
        return (
            f"{self.files} files, {self.found} directives: {self.converted} converted, "
            f"{self.fallbacks} with fallback, {self.skips} skipped, {self.untouched} untouched "
            f"({self.duration * 1000:.1f} ms)"
        )


REPORT_COLUMNS = ("file", "line", "kind", "outcome", "reason", "ms")


def write_report_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(REPORT_COLUMNS)
        for s in report.sites:
            w.writerow([s.file, s.line, s.kind, s.outcome.value, s.reason, f"{s.ms:.3f}"])


# --- rewriting ---------------------------------------------------------------


def rewrite_text(contents, model, config=None, namer=None, filename="<text>"):
    """Rewrite the conditions of one file; returns ``(new_text, report)``."""
    config = config or TransformConfig()
    namer = namer or SigmaNamer(model)
    report = RewriteReport(files=1)
    out = []
    pos = 0
    removed = 0
    for site in scan_file(contents):
        res = SiteResult(filename, site.line, site.kind, Outcome.UNTOUCHED, span=site.span)
        res.out_line = site.line - removed
        report.sites.append(res)
        if not site.rewritable:
            continue
        t0 = time.perf_counter()
        try:
            if site.error is not None:
                raise SkipCondition(site.error)
            conv = convert_condition(site.condition, model, config, namer)
        except SkipCondition as exc:
            res.outcome = Outcome.SKIPPED
            res.reason = exc.reason.value
            report.warnings.append(f"{filename}:{site.line}: skipped: {exc}")
            res.ms = (time.perf_counter() - t0) * 1000
            continue
        result = conv.result
        res.ms = (time.perf_counter() - t0) * 1000
        res.outcome = Outcome.FALLBACK if result.fallback else Outcome.CONVERTED
        res.replacement = conv.text
        for w in result.warnings:
            report.warnings.append(f"{filename}:{site.line}: {w}")
        report.max_combinations = max(report.max_combinations, result.max_combinations)
        report.limit_hits += result.limit_hits
        report.tilde_uses += result.tilde_uses
        report.div_zero_drops += result.div_zero_drops
        out.append(contents[pos:site.start])
        out.append(f"{site.prefix} {conv.text}")
        pos = site.end
        removed += site.span - 1
    if pos == 0:
        return contents, report
    out.append(contents[pos:])
    report.rewritten_files = 1
    return "".join(out), report


def _rewrite_file(src, dst, rel, model, config, namer):
    with open(src, "rb") as f:
        text = f.read().decode(ENCODING, ERRORS)
    new_text, report = rewrite_text(text, model, config, namer, rel)
    with open(dst, "wb") as f:
        f.write(new_text.encode(ENCODING, ERRORS))
    return report


def _worker(args):
    src, dst, rel, model, config = args
    namer = SigmaNamer(model)
    report = _rewrite_file(src, dst, rel, model, config, namer)
    return report, namer.produced


def iter_tree(src_root):
    """Relative paths of all files below ``src_root`` in sorted order."""
    for dirpath, dirnames, filenames in os.walk(src_root):
        dirnames.sort()
        for name in sorted(filenames):
            full = os.path.join(dirpath, name)
            yield os.path.relpath(full, src_root)


def rewrite_tree(src_root, out_root, model, config=None, extensions=DEFAULT_EXTENSIONS,
                 jobs=1, namer=None):
    """Copy ``src_root`` to ``out_root`` with every convertible condition replaced.

    Files whose extension is not in ``extensions`` are copied byte for byte.
    Raises :class:`intprop.transform.NameCollision` when a generated name
    clashes; ``OSError`` on I/O failures.
    """
    config = config or TransformConfig()
    namer = namer or SigmaNamer(model)
    extensions = tuple(extensions)
    if os.path.isdir(out_root) and os.listdir(out_root):
        raise FileExistsError(f"output directory is not empty: {out_root}")
    if not os.path.isdir(src_root):
        raise FileNotFoundError(f"source directory not found: {src_root}")

    t0 = time.perf_counter()
    report = RewriteReport()
    tasks = []
    for rel in iter_tree(src_root):
        src = os.path.join(src_root, rel)
        dst = os.path.join(out_root, rel)
        os.makedirs(os.path.dirname(dst), exist_ok=True)
        if rel.endswith(extensions):
            tasks.append((src, dst, rel.replace(os.sep, "/"), model, config))
        else:
            shutil.copyfile(src, dst)
            report.files += 1
    os.makedirs(out_root, exist_ok=True)

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part, produced in pool.map(_worker, tasks):
                namer.merge(produced)
                report.merge(part)
    else:
        for src, dst, rel, model, config in tasks:
            report.merge(_rewrite_file(src, dst, rel, model, config, namer))
    report.duration = time.perf_counter() - t0
    return report
