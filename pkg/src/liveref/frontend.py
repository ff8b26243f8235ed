"""Java frontend: parse source text into the program model.

Statement-level recursive descent over the token stream. Expressions are
consumed, not parsed: the model needs statement structure, spans, token
classification and local-variable occurrences, nothing deeper. Nested type
declarations, lambdas and anonymous classes are consumed as opaque extents.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .lexer import (
    ASSIGN_OPS,
    PRIMITIVE_TYPES,
    LexError,
    Token,
    code_tokens,
    tokenize,
)
from .model import (
    ClassModel,
    DeclInfo,
    JumpRecord,
    MethodModel,
    SourceUnit,
    StatementNode,
    TokenBag,
)

MODIFIERS = frozenset(
    """public private protected static final abstract synchronized native
    strictfp transient volatile default""".split()
)

# '?' tokens followed by one of these are generic wildcards, not ternaries.
_WILDCARD_FOLLOWERS = frozenset({">", ">>", ">>>", "extends", "super", ",", "&", ")"})

_LOGICAL_OPS = frozenset({"&&", "||"})


@dataclass
class ParseDiagnostics:
    errors: list[tuple[int, str]] = field(default_factory=list)
    recovered: bool = False


@dataclass
class _PendingDecl:
    name: str
    type_text: str
    name_pos: int
    has_initializer: bool


def classify_token(tok: Token) -> tuple[str, str] | None:
    """Classify one lexical token as ('operator'|'operand', symbol) or None to skip.

    Identifiers and literals are operands. Braces are block structure, not
    operators; each () pair counts as a single '()' operator. Everything else
    lexical (operators, keywords, remaining punctuation) is an operator.
    """
    kind = tok.kind
    if kind == "comment":
        return None
    if kind in ("ident", "number", "string", "char"):
        return ("operand", tok.text)
    text = tok.text
    if text in ("{", "}", ")"):
        return None
    if text == "(":
        return ("operator", "()")
    return ("operator", text)


def bag_of(tokens) -> TokenBag:
    bag = TokenBag()
    for t in tokens:
        c = classify_token(t)
        if c is None:
            continue
        side, sym = c
        if side == "operand":
            bag.operands[sym] += 1
        else:
            bag.operators[sym] += 1
    return bag


def classify_tokens(node) -> TokenBag:
    """Aggregate operator/operand multisets of a method or statement subtree."""
    if isinstance(node, MethodModel):
        agg = TokenBag(Counter(node.signature_tokens.operators), Counter(node.signature_tokens.operands))
        body = node.body
    else:
        agg = TokenBag()
        body = node
    for n in body.walk():
        agg.operators.update(n.tokens.operators)
        agg.operands.update(n.tokens.operands)
    return agg


def parse_source(text: str, path: str = "<memory>") -> tuple[SourceUnit, ParseDiagnostics]:
    """Parse Java source into a SourceUnit; never raises on malformed input."""
    diags = ParseDiagnostics()
    try:
        toks = code_tokens(tokenize(text))
    except LexError as e:
        diags.errors.append((e.line, str(e)))
        return SourceUnit(path, text, [], parse_ok=False), diags

    parser = _Parser(text, toks)
    classes = parser.parse_unit()
    diags.errors = parser.errors
    ok = not parser.errors
    if not ok:
        diags.recovered = bool(classes)
    return SourceUnit(path, text, classes, parse_ok=ok), diags


class _Parser:
    def __init__(self, text: str, toks: list[Token]):
        self.text = text
        self.toks = toks
        self.n = len(toks)
        self.i = 0
        self.errors: list[tuple[int, str]] = []

    # --- token helpers -------------------------------------------------

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < self.n else None

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.text == text

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek() or (self.toks[-1] if self.toks else None)
        line = tok.line if tok else 1
        self.errors.append((line, msg))

    def expect(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        self.error(f"expected '{text}'")
        return None

    def skip_balanced(self, open_text: str, close_text: str) -> int:
        """Consume a balanced group starting at an open token; returns end offset."""
        if not self.at(open_text):
            self.error(f"expected '{open_text}'")
            return self.peek().start if self.peek() else len(self.text)
        depth = 0
        end = len(self.text)
        while self.i < self.n:
            t = self.advance()
            if t.text == open_text:
                depth += 1
            elif t.text == close_text:
                depth -= 1
                if depth == 0:
                    return t.end
        self.error(f"unbalanced '{open_text}'", None)
        return end

    def consume_to_semicolon(self) -> int:
        """Consume through the next ';' at group depth 0; returns end offset."""
        depth = 0
        last_end = self.peek().start if self.peek() else len(self.text)
        while self.i < self.n:
            t = self.peek()
            if t.text in ("(", "{", "["):
                depth += 1
            elif t.text in (")", "]"):
                depth -= 1
            elif t.text == "}":
                if depth == 0:
                    self.error("missing ';'", t)
                    return last_end
                depth -= 1
            self.advance()
            last_end = t.end
            if t.text == ";" and depth == 0:
                return t.end
        self.error("missing ';'")
        return last_end

    # --- compilation unit ----------------------------------------------

    def parse_unit(self) -> list[ClassModel]:
        classes: list[ClassModel] = []
        while self.i < self.n:
            before = self.i
            t = self.peek()
            if t.text in ("package", "import"):
                self.consume_to_semicolon()
            elif t.text == "@":
                self.skip_annotation()
            elif t.text in MODIFIERS:
                self.advance()
            elif t.text in ("class", "enum", "interface") or (
                t.text == "record" and self.peek(1) is not None and self.peek(1).kind == "ident"
            ):
                cls = self.parse_type_decl()
                if cls is not None:
                    classes.append(cls)
            elif t.text == ";":
                self.advance()
            else:
                self.error(f"unexpected token '{t.text}' at top level", t)
                self.advance()
            if self.i == before:
                self.advance()
        return classes

    def skip_annotation(self):
        self.expect("@")
        if self.peek() and self.peek().kind in ("ident", "keyword"):
            self.advance()
            while self.at(".") and self.peek(1) is not None:
                self.advance()
                self.advance()
        if self.at("("):
            self.skip_balanced("(", ")")

    def parse_type_decl(self, model: bool = True) -> ClassModel | None:
        kw = self.advance()  # class | enum | interface | record
        is_enum = kw.text == "enum"
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != "ident":
            self.error("missing type name", kw)
            return None
        self.advance()
        start = kw.start
        # header: type params, record components, extends/implements
        while self.i < self.n and not self.at("{"):
            if self.at("<"):
                self.skip_generics()
            elif self.at("("):
                self.skip_balanced("(", ")")
            elif self.at(";"):  # degenerate decl
                self.advance()
                return None
            else:
                self.advance()
        if not self.at("{"):
            self.error("missing class body", name_tok)
            return None

        fields: list[str] = []
        field_types: dict[str, str] = {}
        methods: list[MethodModel] = []
        self.advance()  # '{'
        if is_enum:
            self.consume_enum_constants(fields, field_types)
        end = len(self.text)
        while self.i < self.n:
            if self.at("}"):
                end = self.advance().end
                break
            before = self.i
            self.parse_member(name_tok.text, fields, field_types, methods)
            if self.i == before:
                self.error("cannot parse class member")
                self.advance()
        else:
            self.error("missing '}' of class body", name_tok)

        if not model:
            return None
        cls = ClassModel(name_tok.text, fields, methods, (start, end), field_types)
        analyzer = _MethodAnalyzer(self.text, self.toks, cls)
        for m in methods:
            analyzer.analyze(m)
        return cls

    def consume_enum_constants(self, fields: list[str], field_types: dict[str, str]):
        while self.i < self.n:
            t = self.peek()
            if t.kind == "ident":
                fields.append(t.text)
                field_types[t.text] = "enum"
                self.advance()
                if self.at("("):
                    self.skip_balanced("(", ")")
                if self.at("{"):
                    self.skip_balanced("{", "}")
                if self.at(","):
                    self.advance()
                    continue
            if self.at(";"):
                self.advance()
            return

    def skip_generics(self) -> bool:
        """Consume a <...> group; returns False (restoring position) on ambiguity."""
        save = self.i
        depth = 0
        while self.i < self.n:
            t = self.peek()
            text = t.text
            if text == "<":
                depth += 1
            elif text == ">":
                depth -= 1
            elif text == ">>":
                depth -= 2
            elif text == ">>>":
                depth -= 3
            elif text in (";", "{", "}", ")", "&&", "||", "==") or text in ASSIGN_OPS:
                self.i = save
                return False
            elif t.kind not in ("ident", "keyword", "number") and text not in (",", ".", "?", "[", "]", "@"):
                self.i = save
                return False
            self.advance()
            if depth <= 0:
                if depth < 0:
                    self.i = save
                    return False
                return True
        self.i = save
        return False

    # --- class members --------------------------------------------------

    def parse_member(self, class_name: str, fields, field_types, methods):
        mods: list[str] = []
        mod_start: int | None = None
        while self.i < self.n:
            t = self.peek()
            if t.text == "@":
                mod_start = mod_start if mod_start is not None else t.start
                self.skip_annotation()
            elif t.text in MODIFIERS:
                mod_start = mod_start if mod_start is not None else t.start
                mods.append(self.advance().text)
            else:
                break
        t = self.peek()
        if t is None:
            return
        if t.text in ("class", "enum", "interface") or (
            t.text == "record" and self.peek(1) is not None and self.peek(1).kind == "ident"
        ):
            # nested types are consumed, not modeled
            self.parse_type_decl(model=False)
            return
        if t.text == "{":  # initializer block
            self.skip_balanced("{", "}")
            return
        if t.text == ";":
            self.advance()
            return
        if t.text == "<":  # method type parameters
            mod_start = mod_start if mod_start is not None else t.start
            if not self.skip_generics():
                self.error("unparseable type parameters", t)
                self.advance()
                return

        start = mod_start if mod_start is not None else (self.peek().start if self.peek() else 0)

        # constructor?
        t = self.peek()
        if t is not None and t.kind == "ident" and t.text == class_name and self.at("(", 1):
            self.parse_method(start, mods, "", self.advance(), methods)
            return

        type_info = self.try_parse_type()
        if type_info is None:
            self.error(f"cannot parse member starting at '{t.text}'", t)
            self.advance()
            return
        type_text = type_info
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != "ident":
            self.error("missing member name", t)
            return
        self.advance()
        if self.at("("):
            self.parse_method(start, mods, type_text, name_tok, methods)
        else:
            fields.append(name_tok.text)
            field_types[name_tok.text] = type_text
            # remaining declarators in `int a, b = 2;`
            depth = 0
            while self.i < self.n:
                t2 = self.peek()
                if t2.text in ("(", "{", "["):
                    depth += 1
                elif t2.text in (")", "}", "]"):
                    depth -= 1
                elif depth == 0 and t2.text == ";":
                    self.advance()
                    return
                elif depth == 0 and t2.text == "," and self.peek(1) is not None and self.peek(1).kind == "ident":
                    self.advance()
                    nt = self.advance()
                    fields.append(nt.text)
                    field_types[nt.text] = type_text
                    continue
                self.advance()
            self.error("missing ';' after field")

    def try_parse_type(self) -> str | None:
        """Attempt to consume a type; returns its text or None (position restored)."""
        save = self.i
        t = self.peek()
        if t is None:
            return None
        start = t.start
        if t.text in PRIMITIVE_TYPES:
            self.advance()
        elif t.kind == "ident":
            self.advance()
            while self.at(".") and self.peek(1) is not None and self.peek(1).kind == "ident":
                self.advance()
                self.advance()
        else:
            return None
        if self.at("<"):
            if not self.skip_generics():
                # not a generic group: the bare path may still be a type
                pass
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
        if self.at("..."):
            self.advance()
        end_tok = self.toks[self.i - 1]
        if self.i == save:
            return None
        return self.text[start:end_tok.end]

    def parse_method(self, start: int, mods, return_type: str, name_tok: Token, methods):
        params: list[tuple[str, str]] = []
        self.expect("(")
        while self.i < self.n and not self.at(")"):
            while self.at("@"):
                self.skip_annotation()
            if self.at("final"):
                self.advance()
            ptype = self.try_parse_type()
            if ptype is None:
                self.error("cannot parse parameter", self.peek())
                # resync to ',' or ')'
                depth = 0
                while self.i < self.n:
                    t = self.peek()
                    if t.text in ("(", "<", "["):
                        depth += 1
                    elif t.text in (")", ">", "]"):
                        if depth == 0 and t.text == ")":
                            break
                        depth -= 1
                    elif t.text == "," and depth == 0:
                        break
                    self.advance()
            else:
                pn = self.peek()
                if pn is not None and pn.kind == "ident":
                    self.advance()
                    while self.at("[") and self.at("]", 1):
                        self.advance()
                        self.advance()
                    params.append((pn.text, ptype))
                elif pn is not None and pn.text in (",", ")"):
                    # receiver-less/unnamed parameter; tolerate
                    pass
            if self.at(","):
                self.advance()
        self.expect(")")

        throws_text = None
        while self.at("[") and self.at("]", 1):  # archaic `int m()[]`
            self.advance()
            self.advance()
        if self.at("throws"):
            th_start = self.advance().start
            th_end = th_start
            while self.i < self.n and not self.at("{") and not self.at(";"):
                th_end = self.advance().end
            throws_text = self.text[th_start:th_end]

        if self.at(";"):  # abstract/native: no body to analyze
            self.advance()
            return
        if not self.at("{"):
            self.error("missing method body", name_tok)
            return
        sig_end = self.peek().start
        body = self.parse_block()
        method = MethodModel(
            name=name_tok.text,
            params=params,
            body=body,
            span=(start, body.span[1]),
            line_range=(0, 0),
            return_type=return_type or "void",
            modifiers=mods,
            throws=throws_text,
            signature_span=(start, sig_end),
        )
        methods.append(method)

    # --- statements -----------------------------------------------------

    def parse_block(self) -> StatementNode:
        open_tok = self.expect("{")
        start = open_tok.start if open_tok else (self.peek().start if self.peek() else 0)
        children: list[StatementNode] = []
        end = len(self.text)
        while self.i < self.n:
            if self.at("}"):
                end = self.advance().end
                break
            before = self.i
            stmt = self.parse_statement()
            if stmt is not None:
                children.append(stmt)
            if self.i == before:
                self.error("cannot parse statement")
                self.advance()
        else:
            self.error("missing '}'")
        return StatementNode("block", (start, end), children)

    def as_block(self, stmt: StatementNode) -> StatementNode:
        """Normalize a branch/body to a block container."""
        if stmt.kind == "block":
            return stmt
        return StatementNode("block", stmt.span, [stmt])

    def parse_statement(self) -> StatementNode | None:
        t = self.peek()
        if t is None:
            return None
        text = t.text

        if text == "{":
            return self.parse_block()
        if text == ";":
            self.advance()
            return StatementNode("simple", (t.start, t.end))
        if text == "if":
            return self.parse_if()
        if text == "while":
            self.advance()
            self.skip_balanced("(", ")")
            body = self.parse_statement()
            body = self.as_block(body) if body else StatementNode("block", (t.end, t.end))
            return StatementNode("loop", (t.start, body.span[1]), [body], loop_kind="while")
        if text == "do":
            self.advance()
            body = self.parse_statement()
            body = self.as_block(body) if body else StatementNode("block", (t.end, t.end))
            end = body.span[1]
            if self.at("while"):
                self.advance()
                end = self.skip_balanced("(", ")")
                if self.at(";"):
                    end = self.advance().end
            else:
                self.error("missing 'while' of do-loop", t)
            return StatementNode("loop", (t.start, end), [body], loop_kind="do")
        if text == "for":
            return self.parse_for(t)
        if text == "switch":
            return self.parse_switch(t)
        if text == "try":
            return self.parse_try(t)
        if text == "return":
            self.advance()
            if self.at(";"):
                end = self.advance().end
            else:
                end = self.consume_to_semicolon()
            return StatementNode("return", (t.start, end))
        if text in ("break", "continue"):
            self.advance()
            label = None
            end = t.end
            if self.peek() is not None and self.peek().kind == "ident":
                lt = self.advance()
                label = lt.text
                end = lt.end
            if self.at(";"):
                end = self.advance().end
            node = StatementNode(text, (t.start, end))
            node.label = label
            return node
        if text == "throw":
            self.advance()
            end = self.consume_to_semicolon()
            return StatementNode("throw", (t.start, end))
        if text == "synchronized":
            self.advance()
            if self.at("("):
                self.skip_balanced("(", ")")
            body = self.parse_block() if self.at("{") else None
            end = body.span[1] if body else t.end
            return StatementNode("simple", (t.start, end), [body] if body else [])
        if text == "assert":
            self.advance()
            end = self.consume_to_semicolon()
            return StatementNode("simple", (t.start, end))
        if text in ("class", "interface", "enum"):
            self.parse_type_decl(model=False)
            end = self.toks[self.i - 1].end if self.i > 0 else t.end
            return StatementNode("simple", (t.start, end))

        # label?
        if t.kind == "ident" and self.at(":", 1) and not self.at("::", 1):
            self.advance()
            self.advance()
            stmt = self.parse_statement()
            if stmt is None:
                return None
            stmt.label = t.text
            stmt.span = (t.start, stmt.span[1])
            return stmt

        # local variable declaration?
        decl = self.try_parse_local_decl()
        if decl is not None:
            return decl

        # expression statement
        end = self.consume_to_semicolon()
        return StatementNode("expr", (t.start, end))

    def try_parse_local_decl(self) -> StatementNode | None:
        save = self.i
        start_tok = self.peek()
        while self.at("final") or self.at("@"):
            if self.at("final"):
                self.advance()
            else:
                self.skip_annotation()
        type_text = self.try_parse_type()
        if type_text is None:
            self.i = save
            return None
        name_tok = self.peek()
        nxt = self.peek(1)
        if name_tok is None or name_tok.kind != "ident" or nxt is None or nxt.text not in ("=", ",", ";", "["):
            self.i = save
            return None

        decls: list[_PendingDecl] = []
        self.advance()
        current = _PendingDecl(name_tok.text, type_text, name_tok.start, False)
        decls.append(current)
        depth = 0
        end = name_tok.end
        while self.i < self.n:
            t = self.peek()
            if t.text in ("(", "{", "["):
                depth += 1
            elif t.text in (")", "]"):
                depth -= 1
            elif t.text == "}":
                if depth == 0:
                    self.error("missing ';' in declaration", t)
                    break
                depth -= 1
            elif depth == 0:
                if t.text == "=":
                    current.has_initializer = True
                elif t.text == "," and self.peek(1) is not None and self.peek(1).kind == "ident":
                    self.advance()
                    nt = self.advance()
                    current = _PendingDecl(nt.text, type_text, nt.start, False)
                    decls.append(current)
                    end = nt.end
                    continue
                elif t.text == ";":
                    end = self.advance().end
                    break
            self.advance()
            end = t.end
        node = StatementNode("local-decl", (start_tok.start, end))
        node.decl_vars = {d.name for d in decls}
        node.own_decls = decls
        return node

    def parse_if(self) -> StatementNode:
        t = self.advance()  # 'if'
        self.skip_balanced("(", ")")
        then_stmt = self.parse_statement()
        then_block = self.as_block(then_stmt) if then_stmt else StatementNode("block", (t.end, t.end))
        children = [then_block]
        end = then_block.span[1]
        if self.at("else"):
            else_tok = self.advance()
            else_stmt = self.parse_statement()
            if else_stmt is not None:
                if else_stmt.kind == "if":
                    eb_children = [else_stmt]
                elif else_stmt.kind == "block":
                    eb_children = else_stmt.children
                else:
                    eb_children = [else_stmt]
                eb = StatementNode("else-branch", (else_tok.start, else_stmt.span[1]), eb_children)
                children.append(eb)
                end = eb.span[1]
        return StatementNode("if", (t.start, end), children)

    def parse_for(self, t: Token) -> StatementNode:
        self.advance()  # 'for'
        decls: list[_PendingDecl] = []
        if self.at("("):
            close = self.scan_for_header(decls)
        else:
            self.error("missing for header", t)
            close = t.end
        body = self.parse_statement()
        body = self.as_block(body) if body else StatementNode("block", (close, close))
        node = StatementNode("loop", (t.start, body.span[1]), [body], loop_kind="for")
        node.decl_vars = {d.name for d in decls}
        node.own_decls = decls
        return node

    def scan_for_header(self, decls: list[_PendingDecl]) -> int:
        """Consume '(...)' of a for header, collecting declared loop variables."""
        open_tok = self.advance()  # '('
        depth = 1
        # attempt declaration at the head: [final] Type name (= | :)
        save = self.i
        if self.at("final"):
            self.advance()
        type_text = self.try_parse_type()
        matched = False
        if type_text is not None:
            name_tok = self.peek()
            nxt = self.peek(1)
            if name_tok is not None and name_tok.kind == "ident" and nxt is not None and nxt.text in ("=", ":", ","):
                self.advance()
                decls.append(_PendingDecl(name_tok.text, type_text, name_tok.start, True))
                matched = True
                # classic multi-declarator: int i = 0, j = n
                if nxt.text != ":":
                    d = 0
                    while self.i < self.n:
                        tt = self.peek()
                        if tt.text in ("(", "[", "{"):
                            d += 1
                        elif tt.text in (")", "]", "}"):
                            if d == 0:
                                break
                            d -= 1
                        elif d == 0 and tt.text == ";":
                            break
                        elif d == 0 and tt.text == "," and self.peek(1) is not None and self.peek(1).kind == "ident":
                            self.advance()
                            nt = self.advance()
                            decls.append(_PendingDecl(nt.text, type_text, nt.start, True))
                            continue
                        self.advance()
        if not matched:
            self.i = save
        while self.i < self.n:
            tt = self.advance()
            if tt.text == "(":
                depth += 1
            elif tt.text == ")":
                depth -= 1
                if depth == 0:
                    return tt.end
        self.error("unbalanced for header", open_tok)
        return open_tok.end

    def parse_switch(self, t: Token) -> StatementNode:
        self.advance()  # 'switch'
        self.skip_balanced("(", ")")
        self.expect("{")
        cases: list[StatementNode] = []
        end = len(self.text)
        while self.i < self.n:
            if self.at("}"):
                end = self.advance().end
                break
            ct = self.peek()
            if ct.text in ("case", "default"):
                cases.append(self.parse_case(ct))
            else:
                self.error(f"expected case label, got '{ct.text}'", ct)
                self.advance()
        else:
            self.error("missing '}' of switch", t)
        return StatementNode("switch", (t.start, end), cases)

    def parse_case(self, ct: Token) -> StatementNode:
        self.advance()  # case | default
        is_default = ct.text == "default"
        arrow = False
        label_end = ct.end
        depth = 0
        while self.i < self.n:
            tt = self.peek()
            if tt.text in ("(", "["):
                depth += 1
            elif tt.text in (")", "]"):
                depth -= 1
            elif depth == 0 and tt.text == ":":
                label_end = self.advance().end
                break
            elif depth == 0 and tt.text == "->":
                label_end = self.advance().end
                arrow = True
                break
            elif depth == 0 and tt.text in ("{", "}"):
                self.error("malformed case label", tt)
                break
            self.advance()
            label_end = tt.end
        children: list[StatementNode] = []
        end = label_end
        if arrow:
            stmt = self.parse_statement()
            if stmt is not None:
                children.append(stmt)
                end = stmt.span[1]
        else:
            while self.i < self.n and not self.at("case") and not self.at("default") and not self.at("}"):
                before = self.i
                stmt = self.parse_statement()
                if stmt is not None:
                    children.append(stmt)
                    end = stmt.span[1]
                if self.i == before:
                    break
        node = StatementNode("case", (ct.start, end), children)
        node.is_default_case = is_default
        return node

    def parse_try(self, t: Token) -> StatementNode:
        self.advance()  # 'try'
        decls: list[_PendingDecl] = []
        if self.at("("):
            self.scan_resources(decls)
        children: list[StatementNode] = []
        if self.at("{"):
            children.append(self.parse_block())
        else:
            self.error("missing try block", t)
        end = children[-1].span[1] if children else t.end
        while self.at("catch"):
            c = self.advance()
            cdecls: list[_PendingDecl] = []
            if self.at("("):
                self.scan_catch_param(cdecls)
            body = self.parse_block() if self.at("{") else StatementNode("block", (c.end, c.end))
            cnode = StatementNode("catch", (c.start, body.span[1]), [body])
            cnode.decl_vars = {d.name for d in cdecls}
            cnode.own_decls = cdecls
            children.append(cnode)
            end = cnode.span[1]
        if self.at("finally"):
            f = self.advance()
            body = self.parse_block() if self.at("{") else StatementNode("block", (f.end, f.end))
            fnode = StatementNode("finally", (f.start, body.span[1]), [body])
            children.append(fnode)
            end = fnode.span[1]
        node = StatementNode("try", (t.start, end), children)
        node.decl_vars = {d.name for d in decls}
        node.own_decls = decls
        return node

    def scan_resources(self, decls: list[_PendingDecl]):
        self.advance()  # '('
        depth = 1
        expect_decl = True
        while self.i < self.n:
            if expect_decl:
                save = self.i
                if self.at("final"):
                    self.advance()
                type_text = self.try_parse_type()
                if type_text is not None and self.peek() is not None and self.peek().kind == "ident" and self.at("=", 1):
                    name_tok = self.advance()
                    decls.append(_PendingDecl(name_tok.text, type_text, name_tok.start, True))
                else:
                    self.i = save
                expect_decl = False
            t = self.advance()
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
                if depth == 0:
                    return
            elif t.text == ";" and depth == 1:
                expect_decl = True

    def scan_catch_param(self, decls: list[_PendingDecl]):
        self.advance()  # '('
        depth = 1
        last_ident: Token | None = None
        type_end: int | None = None
        while self.i < self.n:
            t = self.advance()
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
                if depth == 0:
                    break
            elif t.kind == "ident":
                last_ident = t
                if type_end is None:
                    type_end = t.start
        if last_ident is not None:
            decls.append(_PendingDecl(last_ident.text, "Throwable", last_ident.start, True))


class _MethodAnalyzer:
    """Single source-order pass attaching tokens, variables and metrics notes."""

    def __init__(self, text: str, all_tokens: list[Token], cls: ClassModel):
        self.text = text
        self.all_tokens = all_tokens
        self.cls = cls
        self.field_names = set(cls.fields)

    def analyze(self, method: MethodModel):
        lo, hi = method.span
        toks = [t for t in self.all_tokens if lo <= t.start and t.end <= hi]
        method.all_tokens = toks
        method.line_range = (toks[0].line, self._end_line(toks[-1])) if toks else (0, 0)

        sig_tokens = [t for t in toks if t.start < method.signature_span[1]]
        method.signature_tokens = bag_of(sig_tokens)

        body_tokens = [t for t in toks if t.start >= method.body.span[0]]
        self._assign_own_tokens(method.body, body_tokens)

        _VarPass(self.text, method, self.field_names, toks).run()

        _annotate(method.body)
        method.jumps = _collect_jumps(method.body)
        method.loop_spans = [n.span for n in method.body.walk() if n.kind == "loop"]

    @staticmethod
    def _end_line(tok: Token) -> int:
        return tok.line + tok.text.count("\n")

    def _assign_own_tokens(self, node: StatementNode, toks: list[Token]):
        own: list[Token] = []
        idx = 0
        hi = len(toks)
        for child in node.children:
            while idx < hi and toks[idx].start < child.span[0]:
                own.append(toks[idx])
                idx += 1
            cstart = idx
            while idx < hi and toks[idx].start < child.span[1]:
                idx += 1
            self._assign_own_tokens(child, toks[cstart:idx])
        own.extend(toks[idx:hi])
        node.own_tokens = own
        node.tokens = bag_of(own)


class _VarPass:
    """Scope-aware resolution of identifier occurrences to declarations."""

    SCOPING_KINDS = frozenset({"block", "loop", "catch", "try", "switch", "else-branch"})

    def __init__(self, text: str, method: MethodModel, field_names: set[str], all_tokens: list[Token]):
        self.text = text
        self.method = method
        self.field_names = field_names
        self.all_tokens = all_tokens
        self.by_pos = {t.start: k for k, t in enumerate(all_tokens)}
        self.scopes: list[dict[str, str]] = []

    def run(self):
        m = self.method
        top: dict[str, str] = {}
        for name, type_text in m.params:
            decl_id = f"param:{name}"
            top[name] = decl_id
            m.decls[decl_id] = DeclInfo(decl_id, name, type_text, -1, True, True)
        self.scopes.append(top)
        self._visit(m.body)

    def _visit(self, node: StatementNode):
        scoped = node.kind in self.SCOPING_KINDS or node.kind == "simple" and bool(node.children)
        if scoped:
            self.scopes.append({})
        pending = {d.name_pos: d for d in getattr(node, "own_decls", ())}
        decl_name_positions = set(pending)

        events: list[tuple[int, object]] = [(t.start, t) for t in getattr(node, "own_tokens", [])]
        events.extend((c.span[0], c) for c in node.children)
        events.sort(key=lambda e: e[0])

        for pos, ev in events:
            if isinstance(ev, StatementNode):
                self._visit(ev)
                continue
            tok: Token = ev
            if tok.kind != "ident":
                continue
            if tok.start in decl_name_positions:
                d = pending[tok.start]
                self._register_decl(node, d)
                continue
            self._occurrence(node, tok)

        if scoped:
            self.scopes.pop()

    def _register_decl(self, node: StatementNode, d: _PendingDecl):
        decl_id = f"local:{d.name_pos}:{d.name}"
        # local-decl registers in the enclosing scope; header decls (for/catch/
        # try resources) land in the construct's own scope
        self.scopes[-1][d.name] = decl_id
        self.method.decls[decl_id] = DeclInfo(decl_id, d.name, d.type_text, d.name_pos, False, d.has_initializer)
        if d.has_initializer:
            self._record_write(decl_id, node, d.name_pos)
            node.written_vars.add(d.name)

    def _occurrence(self, node: StatementNode, tok: Token):
        k = self.by_pos.get(tok.start)
        prev = self.all_tokens[k - 1] if k is not None and k > 0 else None
        nxt = self.all_tokens[k + 1] if k is not None and k + 1 < len(self.all_tokens) else None
        prev2 = self.all_tokens[k - 2] if k is not None and k > 1 else None

        after_dot = prev is not None and prev.text == "."
        via_this = after_dot and prev2 is not None and prev2.text == "this"
        if after_dot and not via_this:
            return
        if prev is not None and prev.text == "new":
            return
        is_call = nxt is not None and nxt.text == "("

        decl_id = None
        if not via_this:
            for scope in reversed(self.scopes):
                if tok.text in scope:
                    decl_id = scope[tok.text]
                    break

        if is_call:
            self.method.called_methods.add(tok.text)
            if tok.text == self.method.name:
                node.recursion_calls += 1
            return

        if decl_id is None:
            if tok.text in self.field_names:
                self.method.accessed_fields.add(tok.text)
            return

        reads = writes = False
        if nxt is not None and nxt.text in ASSIGN_OPS:
            writes = True
            reads = nxt.text != "="
        elif (nxt is not None and nxt.text in ("++", "--")) or (prev is not None and prev.text in ("++", "--")):
            reads = True
            writes = True
        else:
            reads = True

        name = tok.text
        if reads:
            self.method.reads.setdefault(decl_id, []).append(tok.start)
            node.used_vars.add(name)
        if writes:
            self._record_write(decl_id, node, tok.start)
            node.written_vars.add(name)

    def _record_write(self, decl_id: str, node: StatementNode, pos: int):
        # the store takes effect once the owning statement completes
        self.method.writes.setdefault(decl_id, []).append((pos, node.span[1]))


def _annotate(node: StatementNode):
    """Bottom-up statement counts, decision counts, cognitive affine costs."""
    for child in node.children:
        _annotate(child)

    own = node.own_tokens
    ternaries = _count_ternaries(own)
    logical_total = sum(1 for t in own if t.text in _LOGICAL_OPS)

    node.stmt_total = (1 if node.countable() else 0) + sum(c.stmt_total for c in node.children)

    kind_decision = 0
    if node.kind in ("if", "loop", "catch"):
        kind_decision = 1
    elif node.kind == "case" and not node.is_default_case:
        kind_decision = 1
    node.decisions_total = (
        kind_decision + ternaries + logical_total + sum(c.decisions_total for c in node.children)
    )

    node.contains_return = node.kind == "return" or any(c.contains_return for c in node.children)
    node.returns_all_paths = _returns_all(node)

    if node.kind == "if":
        a, b = _if_affine(node, as_chain=False)
    else:
        a, b = _own_cog(node)
        if node.kind in ("loop", "switch", "catch"):
            a += 1
            b += 1
            for c in node.children:
                a += c.cog_base + c.cog_slope
                b += c.cog_slope
        else:
            if node.kind in ("break", "continue") and node.label is not None:
                a += 1
            for c in node.children:
                a += c.cog_base
                b += c.cog_slope
    node.cog_base = a
    node.cog_slope = b


def _own_cog(node: StatementNode) -> tuple[int, int]:
    """Cognitive cost of a node's own extent: ternaries are nesting-sensitive,
    runs of alike logical operators and recursive calls are flat increments."""
    own = node.own_tokens
    ternaries = _count_ternaries(own)
    ops = [t.text for t in own if t.text in _LOGICAL_OPS]
    runs = sum(1 for i, op in enumerate(ops) if i == 0 or ops[i - 1] != op)
    return ternaries + runs + node.recursion_calls, ternaries


def _if_affine(node: StatementNode, as_chain: bool) -> tuple[int, int]:
    """Cognitive (base, slope) of an if statement; else-if chains increment
    flat while their contents still nest one level deeper."""
    a, b = _own_cog(node)
    a += 1
    if not as_chain:
        b += 1
    then_block = node.children[0] if node.children else None
    if then_block is not None:
        a += then_block.cog_base + then_block.cog_slope
        b += then_block.cog_slope
    if len(node.children) > 1:
        eb = node.children[1]
        ea, es = _own_cog(eb)
        a += ea
        b += es
        ec = eb.children
        if len(ec) == 1 and ec[0].kind == "if":
            ca, cb = _if_affine(ec[0], as_chain=True)
            a += ca
            b += cb
        else:
            a += 1  # the else itself
            for c in ec:
                a += c.cog_base + c.cog_slope
                b += c.cog_slope
    return a, b


def _count_ternaries(tokens: list[Token]) -> int:
    count = 0
    for idx, t in enumerate(tokens):
        if t.text != "?":
            continue
        nxt = tokens[idx + 1] if idx + 1 < len(tokens) else None
        if nxt is not None and nxt.text in _WILDCARD_FOLLOWERS:
            continue
        count += 1
    return count


def _returns_all(node: StatementNode) -> bool:
    kind = node.kind
    if kind in ("return", "throw"):
        return True
    if kind in ("block", "else-branch", "case", "finally"):
        return any(c.returns_all_paths for c in node.children)
    if kind == "if":
        if len(node.children) < 2:
            return False
        return all(c.returns_all_paths for c in node.children)
    if kind == "try":
        body = [c for c in node.children if c.kind == "block"]
        catches = [c for c in node.children if c.kind == "catch"]
        finallies = [c for c in node.children if c.kind == "finally"]
        if finallies and any(f.returns_all_paths for f in finallies):
            return True
        return bool(body) and all(b.returns_all_paths for b in body) and all(
            c.returns_all_paths for c in catches
        )
    return False


def _collect_jumps(body: StatementNode) -> list[JumpRecord]:
    records: list[JumpRecord] = []

    def visit(node: StatementNode, stack: list[StatementNode]):
        if node.kind in ("break", "continue"):
            target = None
            if node.label is not None:
                for enc in reversed(stack):
                    if enc.label == node.label:
                        target = enc.span
                        break
            else:
                for enc in reversed(stack):
                    if enc.kind == "loop" or (node.kind == "break" and enc.kind == "switch"):
                        target = enc.span
                        break
            records.append(JumpRecord(node.kind, node.span[0], target))
        stack.append(node)
        for c in node.children:
            visit(c, stack)
        stack.pop()

    visit(body, [])
    return records
