"""Extract Method mechanics: legality via local dataflow, signature synthesis,
splice-based rewriting, and the inline-back oracle used to check rewrites.

Dataflow tracks locals and parameters only; fields stay reachable from the
extracted method (it lives in the same class), so they never become
parameters or return values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lexer import KEYWORDS
from .metrics import MetricsReport, lcom4, method_metrics
from .model import ClassModel, MethodModel, SourceUnit, StatementNode, Span


class RefactoringError(Exception):
    """Base for refusals to rewrite."""


class StaleCandidateError(RefactoringError):
    """The source text changed since the candidate was computed."""


class NameCollisionError(RefactoringError):
    """Requested method name is invalid or already taken."""


class IllegalFragmentError(RefactoringError):
    """The fragment cannot be extracted behavior-preservingly."""


class RewriteError(RefactoringError):
    """Internal consistency failure: the rewritten text did not reparse."""


_IDENT_RE = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")


@dataclass(frozen=True)
class MethodSignature:
    name: str
    params: tuple[tuple[str, str], ...]  # ordered (name, declared-type text)
    return_var: tuple[str, str] | None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": [{"name": n, "type": t} for n, t in self.params],
            "return_var": None
            if self.return_var is None
            else {"name": self.return_var[0], "type": self.return_var[1]},
        }


@dataclass
class RewriteResult:
    new_text: str
    extracted_method_span: Span
    call_site_span: Span
    before: MetricsReport
    after: tuple[MetricsReport, MetricsReport]  # (shrunken host, new method)
    # inline-back bookkeeping
    body_span: Span  # fragment statements inside the new method, in new_text
    removed_span: Span  # inserted chunk including its leading separator
    original_text: str = ""


@dataclass
class Fragment:
    """A contiguous sibling run resolved against a concrete model."""

    cls: ClassModel
    method: MethodModel
    container: StatementNode
    stmts: list[StatementNode]
    range: tuple[int, int]

    @property
    def span(self) -> Span:
        return (self.stmts[0].span[0], self.stmts[-1].span[1])


@dataclass
class _Flow:
    live_in: list  # DeclInfo, ordered by first read in fragment
    defined_in: list  # DeclInfo declared inside the fragment
    live_out: list  # DeclInfo
    all_returns: bool
    has_return: bool


def dataflow(fragment: Fragment) -> tuple[set[str], set[str], set[str]]:
    """(live_in, defined_in, live_out) variable-name sets for a fragment."""
    flow = _flow(fragment)
    return (
        {d.name for d in flow.live_in},
        {d.name for d in flow.defined_in},
        {d.name for d in flow.live_out},
    )


def _flow(fragment: Fragment) -> _Flow:
    method = fragment.method
    lo, hi = fragment.span
    live_in: list[tuple[int, object]] = []
    defined_in = []
    live_out = []

    enclosing_loops = [s for s in method.loop_spans if s[0] < lo and hi <= s[1]]

    for decl_id, info in method.decls.items():
        reads = method.reads.get(decl_id, ())
        writes = method.writes.get(decl_id, ())
        reads_in = [p for p in reads if lo <= p < hi]
        writes_in = [(p, e) for (p, e) in writes if lo <= p < hi]
        declared_in = (not info.is_param) and lo <= info.pos < hi
        defined_before = info.is_param or (not declared_in and info.pos < lo)

        if declared_in:
            defined_in.append(info)

        if reads_in and defined_before:
            first_read = min(reads_in)
            first_write_eff = min((e for (_p, e) in writes_in), default=None)
            if first_write_eff is None or first_read <= first_write_eff:
                live_in.append((first_read, info))

        if writes_in:
            read_after = any(p >= hi for p in reads)
            if not read_after and enclosing_loops:
                for ls, le in enclosing_loops:
                    if any(ls <= p < lo for p in reads):
                        read_after = True
                        break
            if read_after:
                live_out.append(info)

    live_in.sort(key=lambda pair: pair[0])
    all_ret = any(s.returns_all_paths for s in fragment.stmts)
    has_ret = any(s.contains_return for s in fragment.stmts)
    return _Flow([i for _, i in live_in], defined_in, live_out, all_ret, has_ret)


def legal(fragment: Fragment) -> bool:
    return legality_reason(fragment) is None


def legality_reason(fragment: Fragment) -> str | None:
    """None when the fragment is extractable, else a short reason."""
    flow = _flow(fragment)
    if len(flow.live_out) > 1:
        return "multiple live-out variables"

    lo, hi = fragment.span
    for jump in fragment.method.jumps:
        if lo <= jump.pos < hi:
            t = jump.target_span
            if t is None or not (lo <= t[0] and t[1] <= hi):
                return f"{jump.kind} exits the fragment"

    if flow.has_return and not flow.all_returns:
        return "returns on some but not all paths"

    live_in_ids = {d.decl_id for d in flow.live_in}
    defined_ids = {d.decl_id for d in flow.defined_in}
    for info in flow.live_out:
        if info.decl_id in defined_ids:
            if not info.has_initializer and not _definitely_assigned(fragment, info.name):
                return f"'{info.name}' may be unassigned on return"
        elif info.decl_id not in live_in_ids:
            if not _definitely_assigned(fragment, info.name):
                return f"'{info.name}' may be unassigned on return"

    # declarations the code after the fragment still needs must be the
    # (single) returned variable
    out_ids = {d.decl_id for d in flow.live_out}
    for info in flow.defined_in:
        if info.decl_id in out_ids:
            continue
        later = any(p >= hi for p in fragment.method.reads.get(info.decl_id, ()))
        later = later or any(p >= hi for (p, _e) in fragment.method.writes.get(info.decl_id, ()))
        if later:
            return f"declaration of '{info.name}' is still referenced after the fragment"
    return None


def _definitely_assigned(fragment: Fragment, name: str) -> bool:
    """A top-level `name = ...;` statement definitely assigns on every path."""
    for stmt in fragment.stmts:
        if stmt.kind != "expr":
            continue
        own = stmt.own_tokens
        if len(own) >= 2 and own[0].text == name and own[1].text == "=":
            return True
    return False


def resolve_fragment(unit: SourceUnit, block_id: str, rng: tuple[int, int]) -> Fragment | None:
    from .model import container_id  # local import to avoid cycle noise

    for cls in unit.classes:
        for method in cls.methods:
            for node in method.body.walk():
                if container_id(node) == block_id:
                    a, b = rng
                    if 0 <= a <= b < len(node.children):
                        return Fragment(cls, method, node, node.children[a : b + 1], (a, b))
                    return None
    return None


def default_name(cls: ClassModel, base: str = "extracted") -> str:
    taken = {m.name for m in cls.methods}
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def synthesize_signature(fragment: Fragment, name: str) -> MethodSignature:
    flow = _flow(fragment)
    params = tuple((d.name, d.type_text) for d in flow.live_in)
    ret = None
    if flow.live_out:
        d = flow.live_out[0]
        ret = (d.name, d.type_text)
    return MethodSignature(name=name, params=params, return_var=ret)


def _line_indent(text: str, pos: int) -> str:
    line_start = text.rfind("\n", 0, pos) + 1
    k = line_start
    while k < len(text) and text[k] in " \t":
        k += 1
    return text[line_start:k]


def _reindent(body: str, old_indent: str, new_indent: str) -> str:
    """Shift every line after the first by the indent delta; leaves text-block
    interiors alone by bailing out when a text block is present."""
    if '"""' in body:
        return body
    lines = body.split("\n")
    if len(lines) == 1:
        return body
    out = [lines[0]]
    for line in lines[1:]:
        stripped = line.lstrip(" \t")
        if not stripped:
            out.append("")
            continue
        prefix = line[: len(line) - len(stripped)]
        if prefix.startswith(old_indent):
            prefix = new_indent + prefix[len(old_indent):]
        else:
            prefix = new_indent
        out.append(prefix + stripped)
    return "\n".join(out)


def apply_extract_method(
    unit: SourceUnit,
    fragment: Fragment,
    name: str | None = None,
    expected_id: str | None = None,
    current_id: str | None = None,
) -> RewriteResult:
    """Rewrite the unit's text, extracting the fragment into a new method.

    `expected_id`/`current_id` let callers assert candidate freshness; a
    mismatch raises StaleCandidateError before any text is touched.
    """
    from .frontend import parse_source

    if expected_id is not None and expected_id != current_id:
        raise StaleCandidateError("candidate does not match current file content")

    cls = fragment.cls
    host = fragment.method
    if name is None:
        name = default_name(cls)
    else:
        if not _IDENT_RE.match(name) or name in KEYWORDS:
            raise NameCollisionError(f"'{name}' is not a usable method name")
        if any(m.name == name for m in cls.methods):
            raise NameCollisionError(f"method '{name}' already exists in {cls.name}")

    reason = legality_reason(fragment)
    if reason is not None:
        raise IllegalFragmentError(reason)

    flow = _flow(fragment)
    sig = synthesize_signature(fragment, name)
    text = unit.text
    lo, hi = fragment.span

    args = ", ".join(n for n, _t in sig.params)
    call_core = f"{name}({args})"
    frag_indent = _line_indent(text, lo)

    ret_decl = flow.live_out[0] if flow.live_out else None
    declared_ids = {d.decl_id for d in flow.defined_in}
    needs_prologue = (
        ret_decl is not None
        and ret_decl.decl_id not in declared_ids
        and ret_decl.decl_id not in {d.decl_id for d in flow.live_in}
    )

    if flow.all_returns:
        if host.return_type and host.return_type != "void":
            call_text = f"return {call_core};"
        else:
            call_text = f"{call_core};\n{frag_indent}return;"
        return_type = host.return_type or "void"
        synth_return = None
    elif ret_decl is not None:
        if ret_decl.decl_id in declared_ids:
            call_text = f"{ret_decl.type_text} {ret_decl.name} = {call_core};"
        else:
            call_text = f"{ret_decl.name} = {call_core};"
        return_type = ret_decl.type_text
        synth_return = f"return {ret_decl.name};"
    else:
        call_text = f"{call_core};"
        return_type = "void"
        synth_return = None

    method_indent = _line_indent(text, host.span[0])
    body_indent = method_indent + "    "
    fragment_text = _reindent(text[lo:hi], frag_indent, body_indent)

    mods = "private static" if host.is_static else "private"
    params_text = ", ".join(f"{t} {n}" for n, t in sig.params)
    throws_text = f" {host.throws}" if host.throws else ""
    header = f"{mods} {return_type} {name}({params_text}){throws_text} {{"

    pieces = [header]
    if needs_prologue and ret_decl is not None:
        pieces.append(f"{body_indent}{ret_decl.type_text} {ret_decl.name};")
    body_rel_start = sum(len(p) + 1 for p in pieces) + len(body_indent)
    pieces.append(f"{body_indent}{fragment_text}")
    body_rel_end = sum(len(p) + 1 for p in pieces) - 1
    if synth_return is not None:
        pieces.append(f"{body_indent}{synth_return}")
    pieces.append(f"{method_indent}}}")
    method_text = "\n".join(pieces)

    separator = "\n\n" + method_indent
    insert_at = host.span[1]

    text_a = text[:lo] + call_text + text[hi:]
    delta = len(call_text) - (hi - lo)
    insert_at += delta
    new_text = text_a[:insert_at] + separator + method_text + text_a[insert_at:]

    method_start = insert_at + len(separator)
    extracted_span = (method_start, method_start + len(method_text))
    call_site_span = (lo, lo + len(call_text))
    removed_span = (insert_at, insert_at + len(separator) + len(method_text))
    body_span = (method_start + body_rel_start, method_start + body_rel_end)

    new_unit, diags = parse_source(new_text, unit.path)
    if not new_unit.parse_ok:
        raise RewriteError(f"rewritten source failed to parse: {diags.errors[:3]}")

    new_cls = next((c for c in new_unit.classes if c.name == cls.name), None)
    if new_cls is None:
        raise RewriteError("class vanished after rewrite")
    new_host = next((m for m in new_cls.methods if m.name == host.name), None)
    new_method = next((m for m in new_cls.methods if m.name == name), None)
    if new_host is None or new_method is None:
        raise RewriteError("rewritten methods not found")

    new_lcom = lcom4(new_cls)
    before = method_metrics(host, cls)
    after_host = method_metrics(new_host, new_cls, new_lcom)
    after_new = method_metrics(new_method, new_cls, new_lcom)

    return RewriteResult(
        new_text=new_text,
        extracted_method_span=extracted_span,
        call_site_span=call_site_span,
        before=before,
        after=(after_host, after_new),
        body_span=body_span,
        removed_span=removed_span,
        original_text=text,
    )


def inline_back(result: RewriteResult) -> str:
    """Invert an extraction: substitute the body at the call site and delete
    the inserted method. Token-normalized, the result equals the original."""
    text = result.new_text
    body = text[result.body_span[0] : result.body_span[1]]
    lo, hi = result.call_site_span
    text_a = text[:lo] + body + text[hi:]
    delta = len(body) - (hi - lo)
    rs, re_ = result.removed_span
    rs += delta
    re_ += delta
    return text_a[:rs] + text_a[re_:]
