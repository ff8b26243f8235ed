"""Code-quality metrics over the program model.

Everything here is a pure function of the model; identical model, identical
numbers. Cyclomatic is the extended variant (boolean operators and ternaries
count); cognitive follows the published Cognitive Complexity rules; LCOM4 is
the connected-component count of the field-sharing/call graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .frontend import classify_tokens
from .model import ClassModel, MethodModel, TokenBag


@dataclass(frozen=True)
class HalsteadMetrics:
    n1: int
    n2: int
    N1: int
    N2: int

    @property
    def vocabulary(self) -> int:
        return self.n1 + self.n2

    @property
    def length(self) -> int:
        return self.N1 + self.N2

    @property
    def volume(self) -> float:
        n = self.vocabulary
        if n < 1:
            return 0.0
        return self.length * math.log2(n)

    @property
    def difficulty(self) -> float:
        return (self.n1 / 2.0) * (self.N2 / max(self.n2, 1))

    @property
    def effort(self) -> float:
        return self.difficulty * self.volume

    @classmethod
    def from_bag(cls, bag: TokenBag) -> "HalsteadMetrics":
        return cls(n1=bag.n1, n2=bag.n2, N1=bag.N1, N2=bag.N2)

    def to_dict(self) -> dict:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "N1": self.N1,
            "N2": self.N2,
            "vocabulary": self.vocabulary,
            "length": self.length,
            "volume": self.volume,
            "difficulty": self.difficulty,
            "effort": self.effort,
        }


@dataclass(frozen=True)
class MetricsReport:
    method_name: str
    loc: int
    cc: int
    cog: int
    halstead: HalsteadMetrics
    mi: float
    class_lcom4: int

    def to_dict(self) -> dict:
        return {
            "method_name": self.method_name,
            "loc": self.loc,
            "cc": self.cc,
            "cog": self.cog,
            "halstead": self.halstead.to_dict(),
            "mi": self.mi,
            "class_lcom4": self.class_lcom4,
        }


def loc(method: MethodModel) -> int:
    """Source lines in the method carrying at least one non-comment token."""
    lines: set[int] = set()
    for tok in method.all_tokens:
        first = tok.line
        for k in range(first, first + tok.text.count("\n") + 1):
            lines.add(k)
    return len(lines)


def cyclomatic(method: MethodModel) -> int:
    return 1 + method.body.decisions_total


def cognitive(method: MethodModel) -> int:
    return method.body.cog_base


def halstead(method: MethodModel) -> HalsteadMetrics:
    return HalsteadMetrics.from_bag(classify_tokens(method))


def lcom4(cls: ClassModel) -> int:
    """Connected components of the method graph: edges join methods sharing an
    accessed field or related by an in-class call."""
    methods = cls.methods
    k = len(methods)
    if k == 0:
        return 0
    parent = list(range(k))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    names = {m.name: i for i, m in enumerate(methods)}
    for i, m in enumerate(methods):
        for called in m.called_methods:
            j = names.get(called)
            if j is not None and j != i:
                union(i, j)
        for j in range(i + 1, k):
            if m.accessed_fields & methods[j].accessed_fields:
                union(i, j)
    return len({find(i) for i in range(k)})


def maintainability_index(volume: float, cc: int, loc_value: int) -> float:
    """Normalized 0-100 maintainability index, clamped."""
    raw = 171.0 - 5.2 * math.log(max(volume, 1.0)) - 0.23 * cc - 16.2 * math.log(max(loc_value, 1))
    return min(100.0, max(0.0, raw * 100.0 / 171.0))


def method_metrics(method: MethodModel, cls: ClassModel, class_lcom4: int | None = None) -> MetricsReport:
    h = halstead(method)
    loc_value = loc(method)
    cc = cyclomatic(method)
    return MetricsReport(
        method_name=method.name,
        loc=loc_value,
        cc=cc,
        cog=cognitive(method),
        halstead=h,
        mi=maintainability_index(h.volume, cc, loc_value),
        class_lcom4=class_lcom4 if class_lcom4 is not None else lcom4(cls),
    )
