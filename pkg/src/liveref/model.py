"""Normalized class/method/statement model that analysis computes over.

Values are immutable after the frontend finishes building them; every engine
below (metrics, candidates, extraction) is a pure function of this model.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

Span = tuple[int, int]  # [start, end) character offsets into the source text

# Container kinds hold statements but are not statements themselves.
CONTAINER_KINDS = frozenset({"block", "else-branch"})

# Kinds whose direct children form a sibling list that extraction windows
# range over.
SIBLING_LIST_KINDS = frozenset({"block", "else-branch", "case"})


@dataclass
class TokenBag:
    """Operator/operand multisets of one node's own (non-child) extent."""

    operators: Counter = field(default_factory=Counter)
    operands: Counter = field(default_factory=Counter)

    @property
    def n1(self) -> int:
        return len(self.operators)

    @property
    def n2(self) -> int:
        return len(self.operands)

    @property
    def N1(self) -> int:
        return sum(self.operators.values())

    @property
    def N2(self) -> int:
        return sum(self.operands.values())

    def merged(self, other: "TokenBag") -> "TokenBag":
        return TokenBag(self.operators + other.operators, self.operands + other.operands)


@dataclass
class VarOccurrence:
    """One resolved read or write of a local variable or parameter."""

    decl_id: str  # unique id of the declaration this name resolved to
    name: str
    pos: int  # character offset of the occurrence
    write_pos: int  # offset at which the store takes effect (stmt end for assignments)
    is_read: bool
    is_write: bool


@dataclass
class StatementNode:
    kind: str  # simple|if|else-branch|loop|switch|case|try|catch|finally|block|return|break|continue|throw|local-decl|expr
    span: Span
    children: list["StatementNode"] = field(default_factory=list)
    tokens: TokenBag = field(default_factory=TokenBag)
    decl_vars: set[str] = field(default_factory=set)
    used_vars: set[str] = field(default_factory=set)
    written_vars: set[str] = field(default_factory=set)
    loop_kind: str | None = None  # for | while | do, when kind == "loop"
    is_default_case: bool = False
    label: str | None = None
    # Analysis annotations, filled by the frontend in one bottom-up pass:
    stmt_total: int = 0  # statement_count of this subtree
    decisions_total: int = 0  # cyclomatic decision points in this subtree
    cog_base: int = 0  # cognitive cost of subtree rooted at nesting depth 0
    cog_slope: int = 0  # extra cognitive cost per unit of extra nesting depth
    contains_return: bool = False
    returns_all_paths: bool = False
    recursion_calls: int = 0  # self-calls in this node's own extent
    own_tokens: list = field(default_factory=list, repr=False)
    own_decls: list = field(default_factory=list, repr=False)

    def countable(self) -> bool:
        return self.kind not in CONTAINER_KINDS

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class JumpRecord:
    """A break/continue and the span of the construct it exits."""

    kind: str  # break | continue
    pos: int
    target_span: Span | None  # None when the label/loop could not be resolved


@dataclass
class MethodModel:
    name: str
    params: list[tuple[str, str]]  # (name, declared-type text)
    body: StatementNode  # kind == "block", the method body
    span: Span
    line_range: tuple[int, int]
    return_type: str = "void"
    modifiers: list[str] = field(default_factory=list)
    throws: str | None = None  # verbatim "throws A, B" clause text
    signature_span: Span = (0, 0)  # up to but excluding the body block
    # Dataflow indexes over locals and params (built by the frontend):
    reads: dict[str, list[int]] = field(default_factory=dict)  # decl_id -> read positions
    writes: dict[str, list[tuple[int, int]]] = field(default_factory=dict)  # decl_id -> (pos, effective pos)
    decls: dict[str, "DeclInfo"] = field(default_factory=dict)  # decl_id -> info
    jumps: list[JumpRecord] = field(default_factory=list)
    loop_spans: list[Span] = field(default_factory=list)  # spans of every loop statement
    accessed_fields: set[str] = field(default_factory=set)
    called_methods: set[str] = field(default_factory=set)
    all_tokens: list = field(default_factory=list, repr=False)  # code tokens in span
    signature_tokens: TokenBag = field(default_factory=TokenBag, repr=False)

    @property
    def is_static(self) -> bool:
        return "static" in self.modifiers


@dataclass
class DeclInfo:
    decl_id: str
    name: str
    type_text: str
    pos: int  # declaration offset; -1 for parameters
    is_param: bool
    has_initializer: bool


@dataclass
class ClassModel:
    name: str
    fields: list[str]
    methods: list[MethodModel]
    span: Span
    field_types: dict[str, str] = field(default_factory=dict)


@dataclass
class SourceUnit:
    path: str
    text: str
    classes: list[ClassModel]
    parse_ok: bool


def statement_count(node_or_run) -> int:
    """Number of statements in a node's subtree or a run of sibling nodes.

    Pure containers (blocks, else-branches) hold statements but are not
    counted themselves.
    """
    if isinstance(node_or_run, MethodModel):
        return node_or_run.body.stmt_total
    if isinstance(node_or_run, StatementNode):
        return node_or_run.stmt_total
    return sum(n.stmt_total for n in node_or_run)


def sibling_lists(method: MethodModel) -> list[tuple[str, StatementNode, list[StatementNode]]]:
    """All (container id, container, children) lists extraction windows range over."""
    out = []
    for node in method.body.walk():
        if node.kind in SIBLING_LIST_KINDS and node.children:
            out.append((container_id(node), node, node.children))
    return out


def container_id(node: StatementNode) -> str:
    return f"{node.kind}@{node.span[0]}"


def sibling_runs(method: MethodModel) -> list[tuple[str, tuple[int, int]]]:
    """Every contiguous run of sibling statements at every nesting depth.

    Ranges are inclusive 0-based (start, end) index pairs into the container's
    child list; a list of k siblings yields k*(k+1)/2 runs.
    """
    runs = []
    for block_id, _node, children in sibling_lists(method):
        k = len(children)
        for a in range(k):
            for b in range(a, k):
                runs.append((block_id, (a, b)))
    return runs
