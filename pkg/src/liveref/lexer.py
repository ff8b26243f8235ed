"""Java lexer producing position-annotated tokens.

Hand-rolled scanner rather than a regex table: exact spans and exact
comment/string boundaries are load-bearing for every downstream number
(operator/operand counts, line accounting, splice-based rewriting).
"""

from __future__ import annotations

from dataclasses import dataclass

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

PRIMITIVE_TYPES = frozenset(
    "boolean byte char double float int long short void".split()
)

# Longest-match-first operator table.
OPERATORS = (
    ">>>=",
    "<<=", ">>=", ">>>", "...",
    "->", "::", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "=", "+", "-", "*", "/", "%", "<", ">", "!", "~", "&", "|", "^", "?",
    ":", ".", "@",
)

PUNCTUATION = frozenset("(){}[];,")

ASSIGN_OPS = frozenset(
    ("=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=")
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | keyword | number | string | char | operator | punct | comment
    text: str
    start: int
    end: int  # exclusive
    line: int  # 1-based line of start

    @property
    def is_code(self) -> bool:
        return self.kind != "comment"


class LexError(Exception):
    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line


def _ident_start(c: str) -> bool:
    return c.isalpha() or c in "_$"


def _ident_part(c: str) -> bool:
    return c.isalnum() or c in "_$"


def tokenize(text: str) -> list[Token]:
    """Tokenize Java source. Comments are kept (callers filter); whitespace is dropped.

    Raises LexError on unterminated strings/comments; everything else lexes.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    line = 1

    def newlines(chunk: str) -> int:
        return chunk.count("\n")

    while i < n:
        c = text[i]

        if c in " \t\r\f":
            i += 1
            continue
        if c == "\n":
            line += 1
            i += 1
            continue

        start = i
        start_line = line

        # comments
        if c == "/" and i + 1 < n:
            if text[i + 1] == "/":
                j = text.find("\n", i)
                j = n if j == -1 else j
                tokens.append(Token("comment", text[start:j], start, j, start_line))
                i = j
                continue
            if text[i + 1] == "*":
                j = text.find("*/", i + 2)
                if j == -1:
                    raise LexError("unterminated block comment", start_line)
                j += 2
                chunk = text[start:j]
                tokens.append(Token("comment", chunk, start, j, start_line))
                line += newlines(chunk)
                i = j
                continue

        # text block / string literal
        if c == '"':
            if text.startswith('"""', i):
                j = text.find('"""', i + 3)
                if j == -1:
                    raise LexError("unterminated text block", start_line)
                j += 3
                chunk = text[start:j]
                tokens.append(Token("string", chunk, start, j, start_line))
                line += newlines(chunk)
                i = j
                continue
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == '"':
                    j += 1
                    break
                if text[j] == "\n":
                    raise LexError("unterminated string literal", start_line)
                j += 1
            else:
                raise LexError("unterminated string literal", start_line)
            tokens.append(Token("string", text[start:j], start, j, start_line))
            i = j
            continue

        # char literal
        if c == "'":
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == "'":
                    j += 1
                    break
                if text[j] == "\n":
                    raise LexError("unterminated char literal", start_line)
                j += 1
            else:
                raise LexError("unterminated char literal", start_line)
            tokens.append(Token("char", text[start:j], start, j, start_line))
            i = j
            continue

        # number literal (also covers .5 style floats)
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            if text.startswith(("0x", "0X", "0b", "0B"), i):
                j = i + 2
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
            else:
                seen_exp = False
                while j < n:
                    ch = text[j]
                    if ch.isdigit() or ch == "_" or ch == ".":
                        j += 1
                    elif ch in "eE" and not seen_exp:
                        seen_exp = True
                        j += 1
                        if j < n and text[j] in "+-":
                            j += 1
                    elif ch in "fFdDlL":
                        j += 1
                        break
                    else:
                        break
            tokens.append(Token("number", text[start:j], start, j, start_line))
            i = j
            continue

        # identifier / keyword
        if _ident_start(c):
            j = i + 1
            while j < n and _ident_part(text[j]):
                j += 1
            word = text[start:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, start, j, start_line))
            i = j
            continue

        if c in PUNCTUATION:
            tokens.append(Token("punct", c, start, i + 1, start_line))
            i += 1
            continue

        for op in OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("operator", op, start, i + len(op), start_line))
                i += len(op)
                break
        else:
            # Unknown character: emit as an operator token so analysis never
            # silently drops source text; the parser will diagnose.
            tokens.append(Token("operator", c, start, i + 1, start_line))
            i += 1

    return tokens


def code_tokens(tokens: list[Token]) -> list[Token]:
    """Tokens with comments stripped."""
    return [t for t in tokens if t.kind != "comment"]


def normalize_tokens(text: str) -> list[str]:
    """Lexeme sequence with comments and whitespace removed.

    The equality oracle for behavior-preserving rewrites: two sources are
    considered token-equal when these sequences match.
    """
    return [t.text for t in tokenize(text) if t.kind != "comment"]
