"""Candidate detection: eligibility thresholds, window enumeration over
sibling runs, ranking, 1-10 severity grading and the per-line overlay."""

from __future__ import annotations

import hashlib
import logging
import time
from bisect import bisect_right
from dataclasses import dataclass, field, replace

from .extraction import Fragment, legal, synthesize_signature, default_name
from .frontend import ParseDiagnostics, parse_source
from .metrics import MetricsReport, lcom4, method_metrics
from .model import ClassModel, MethodModel, SourceUnit, sibling_lists

log = logging.getLogger("liveref")

# Severity palette, index 1..10, light green to dark red.
PALETTE = {
    1: "#ACE97C",
    2: "#91D96A",
    3: "#B8D45A",
    4: "#D8CC4E",
    5: "#E8B944",
    6: "#EF9D3A",
    7: "#EF7D31",
    8: "#E65527",
    9: "#D32F20",
    10: "#8B0000",
}

_MODES = ("all", "top1")


@dataclass(frozen=True)
class Config:
    min_method_loc: int = 50
    min_cyclomatic: int = 15
    min_cognitive: int = 15
    min_halstead_effort: float = 50.0
    min_candidate_statements: int = 4  # "more than three"
    max_candidate_fraction: float = 0.80
    edit_trigger_chars: int = 10
    mode: str = "all"

    def __post_init__(self):
        if not (0 < self.max_candidate_fraction < 1):
            raise ValueError("max_candidate_fraction must be in (0, 1)")
        if self.min_candidate_statements < 1:
            raise ValueError("min_candidate_statements must be >= 1")
        for name in ("min_method_loc", "min_cyclomatic", "min_cognitive",
                     "min_halstead_effort", "edit_trigger_chars"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f for f in cls.__dataclass_fields__}
        unknown = [k for k in data if k not in known]
        for k in unknown:
            log.warning("config: ignoring unknown key %r", k)
        return cls(**{k: v for k, v in data.items() if k in known})

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}

    def with_mode(self, mode: str) -> "Config":
        return replace(self, mode=mode)


@dataclass
class Candidate:
    id: str
    class_name: str
    method_name: str
    parent_block: str
    range: tuple[int, int]  # inclusive sibling index range
    stmt_count: int
    frag_cc: int
    frag_cog: int
    class_lcom4: int
    signature: object  # MethodSignature
    span: tuple[int, int]
    line_range: tuple[int, int]
    rank: int = 0
    severity: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "class_name": self.class_name,
            "method_name": self.method_name,
            "parent_block": self.parent_block,
            "range": list(self.range),
            "stmt_count": self.stmt_count,
            "frag_cc": self.frag_cc,
            "frag_cog": self.frag_cog,
            "class_lcom4": self.class_lcom4,
            "signature": self.signature.to_dict(),
            "line_range": list(self.line_range),
            "rank": self.rank,
            "severity": self.severity,
        }


@dataclass
class OverlayEntry:
    severity: int
    color: str
    candidate_ids: list[str]  # covering candidates, severity desc then rank asc

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "color": self.color,
            "candidate_ids": list(self.candidate_ids),
        }


@dataclass
class AnalysisResult:
    file: str
    timestamp: float
    candidates: list[Candidate]
    line_overlay: dict[int, OverlayEntry]
    eligible_methods: list[str]
    method_reports: list[MetricsReport] = field(default_factory=list)
    diagnostics: ParseDiagnostics = field(default_factory=ParseDiagnostics)
    text_sha: str = ""


def text_fingerprint(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def candidate_id(text_sha: str, class_name: str, method_name: str,
                 block_id: str, rng: tuple[int, int]) -> str:
    """Stable id; embedding the content hash makes staleness detectable."""
    raw = f"{text_sha}|{class_name}|{method_name}|{block_id}|{rng[0]}-{rng[1]}"
    return hashlib.sha1(raw.encode("utf-8")).hexdigest()[:16]


def is_eligible(report: MetricsReport, cfg: Config) -> bool:
    """Strict thresholds: long methods only, all comparisons are 'more than'."""
    return (
        report.loc > cfg.min_method_loc
        and report.cc > cfg.min_cyclomatic
        and report.cog > cfg.min_cognitive
        and report.halstead.effort > cfg.min_halstead_effort
    )


def eligible_methods(unit: SourceUnit, cfg: Config) -> list[MethodModel]:
    out = []
    for cls in unit.classes:
        class_l4 = lcom4(cls)
        for method in cls.methods:
            if is_eligible(method_metrics(method, cls, class_l4), cfg):
                out.append(method)
    return out


class _LineIndex:
    def __init__(self, text: str):
        self.starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.starts.append(i + 1)

    def line_of(self, pos: int) -> int:
        return bisect_right(self.starts, pos)


def enumerate_candidates(
    unit: SourceUnit,
    cls: ClassModel,
    method: MethodModel,
    cfg: Config,
    class_l4: int,
    lines: _LineIndex | None = None,
    text_sha: str | None = None,
) -> list[Candidate]:
    """Every legal contiguous sibling run within the statement-count filters."""
    lines = lines or _LineIndex(unit.text)
    text_sha = text_sha or text_fingerprint(unit.text)
    total = method.body.stmt_total
    max_allowed = cfg.max_candidate_fraction * total
    out: list[Candidate] = []
    placeholder = default_name(cls)

    for block_id, container, children in sibling_lists(method):
        k = len(children)
        prefix_stmts = [0] * (k + 1)
        prefix_dec = [0] * (k + 1)
        prefix_cog = [0] * (k + 1)
        for i, ch in enumerate(children):
            prefix_stmts[i + 1] = prefix_stmts[i] + ch.stmt_total
            prefix_dec[i + 1] = prefix_dec[i] + ch.decisions_total
            prefix_cog[i + 1] = prefix_cog[i] + ch.cog_base
        for a in range(k):
            for b in range(a, k):
                count = prefix_stmts[b + 1] - prefix_stmts[a]
                if count > max_allowed:
                    break
                if count < cfg.min_candidate_statements:
                    continue
                fragment = Fragment(cls, method, container, children[a : b + 1], (a, b))
                if not legal(fragment):
                    continue
                span = fragment.span
                out.append(
                    Candidate(
                        id=candidate_id(text_sha, cls.name, method.name, block_id, (a, b)),
                        class_name=cls.name,
                        method_name=method.name,
                        parent_block=block_id,
                        range=(a, b),
                        stmt_count=count,
                        frag_cc=1 + (prefix_dec[b + 1] - prefix_dec[a]),
                        frag_cog=prefix_cog[b + 1] - prefix_cog[a],
                        class_lcom4=class_l4,
                        signature=synthesize_signature(fragment, placeholder),
                        span=span,
                        line_range=(lines.line_of(span[0]), lines.line_of(span[1] - 1)),
                    )
                )
    return out


def rank_candidates(cands: list[Candidate]) -> list[Candidate]:
    """Total deterministic order: more statements first, then higher combined
    fragment complexity, then higher class incohesion, then source position."""
    ranked = sorted(
        cands,
        key=lambda c: (
            -c.stmt_count,
            -(c.frag_cc + c.frag_cog),
            -c.class_lcom4,
            c.span[0],
            c.span[1],
        ),
    )
    for i, c in enumerate(ranked, start=1):
        c.rank = i
    return ranked


def assign_severity(ranked: list[Candidate]) -> list[Candidate]:
    """Rank position normalized onto the 1..10 scale; rank 1 is always 10."""
    n = len(ranked)
    for i, c in enumerate(ranked, start=1):
        if n == 1:
            c.severity = 10
        else:
            value = 10.0 - 9.0 * (i - 1) / (n - 1)
            c.severity = int(value + 0.5)  # deterministic half-up
    return ranked


def build_overlay(ranked: list[Candidate], mode: str = "all") -> dict[int, OverlayEntry]:
    shown = ranked[:1] if mode == "top1" else ranked
    per_line: dict[int, list[Candidate]] = {}
    for c in shown:
        for line in range(c.line_range[0], c.line_range[1] + 1):
            per_line.setdefault(line, []).append(c)
    overlay: dict[int, OverlayEntry] = {}
    for line, covering in per_line.items():
        covering.sort(key=lambda c: (-c.severity, c.rank))
        sev = covering[0].severity
        overlay[line] = OverlayEntry(sev, PALETTE[sev], [c.id for c in covering])
    return overlay


def analyze_unit(unit: SourceUnit, cfg: Config, diagnostics: ParseDiagnostics | None = None) -> AnalysisResult:
    """Full candidate pipeline over a parsed unit."""
    text_sha = text_fingerprint(unit.text)
    result = AnalysisResult(
        file=unit.path,
        timestamp=time.time(),
        candidates=[],
        line_overlay={},
        eligible_methods=[],
        diagnostics=diagnostics or ParseDiagnostics(),
        text_sha=text_sha,
    )
    if not unit.parse_ok:
        return result

    lines = _LineIndex(unit.text)
    all_cands: list[Candidate] = []
    for cls in unit.classes:
        class_l4 = lcom4(cls)
        for method in cls.methods:
            report = method_metrics(method, cls, class_l4)
            result.method_reports.append(report)
            if not is_eligible(report, cfg):
                continue
            result.eligible_methods.append(method.name)
            all_cands.extend(
                enumerate_candidates(unit, cls, method, cfg, class_l4, lines, text_sha)
            )

    ranked = assign_severity(rank_candidates(all_cands))
    if cfg.mode == "top1":
        ranked = ranked[:1]
    result.candidates = ranked
    result.line_overlay = build_overlay(ranked, cfg.mode)
    return result


def analyze_source(text: str, path: str, cfg: Config) -> tuple[SourceUnit, AnalysisResult]:
    unit, diags = parse_source(text, path)
    return unit, analyze_unit(unit, cfg, diags)
