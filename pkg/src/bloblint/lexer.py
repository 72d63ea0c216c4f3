"""Tokenizer for the Java subset.

Comments and whitespace are skipped entirely, so an `if` inside a string
literal or comment never reaches the parser. Lexing is total: malformed
input produces tokens plus diagnostics, never an exception.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import Diagnostic, SourcePosition, Span

KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue
default do double else enum extends final finally float for goto if
implements import instanceof int interface long native new package private
protected public return short static strictfp super switch synchronized
this throw throws transient try void volatile while var
""".split())

PRIMITIVES = frozenset(
    {"boolean", "byte", "char", "double", "float", "int", "long", "short", "void", "var"})

# Longest-match operator table.
_OPERATORS = [
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||",
    "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|",
    "^", "?", ":", ";", ",", ".", "(", ")", "{", "}", "[", "]", "@",
]

IDENT = "ident"
KEYWORD = "keyword"
NUMBER = "number"
STRING = "string"
CHAR = "char"
OP = "op"
EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    offset: int
    end_line: int
    end_column: int

    @property
    def length(self) -> int:
        return len(self.text)


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c in "_$"


def _is_ident_part(c: str) -> bool:
    return c.isalnum() or c in "_$"


class Lexer:
    def __init__(self, file: str, text: str):
        self.file = file
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.diagnostics: list[Diagnostic] = []

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos >= len(self.text):
                return
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, k: int = 0) -> str:
        i = self.pos + k
        return self.text[i] if i < len(self.text) else ""

    def _diag(self, line: int, col: int, message: str) -> None:
        pos = SourcePosition(self.file, line, col)
        self.diagnostics.append(Diagnostic(Span(pos, pos), message))

    def _skip_trivia(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n\f":
                self._advance()
            elif c == "/" and self._peek(1) == "/":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            elif c == "/" and self._peek(1) == "*":
                start_line, start_col = self.line, self.col
                self._advance(2)
                closed = False
                while self.pos < len(self.text):
                    if self.text[self.pos] == "*" and self._peek(1) == "/":
                        self._advance(2)
                        closed = True
                        break
                    self._advance()
                if not closed:
                    self._diag(start_line, start_col, "unterminated block comment")
            else:
                return

    def _lex_quoted(self, quote: str, kind: str) -> Token:
        start = (self.line, self.col, self.pos)
        self._advance()  # opening quote
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == "\\" and self.pos + 1 < len(self.text):
                self._advance(2)
                continue
            if c == quote:
                self._advance()
                return self._token(kind, start)
            if c == "\n":
                self._diag(start[0], start[1], f"unterminated {kind} literal")
                return self._token(kind, start)
            self._advance()
        self._diag(start[0], start[1], f"unterminated {kind} literal")
        return self._token(kind, start)

    def _lex_number(self) -> Token:
        start = (self.line, self.col, self.pos)
        if self._peek() == "0" and self._peek(1) in "xXbB":
            self._advance(2)
            while _is_ident_part(self._peek()):
                self._advance()
            return self._token(NUMBER, start)
        while self._peek().isdigit() or self._peek() == "_":
            self._advance()
        if self._peek() == "." and self._peek(1).isdigit():
            self._advance()
            while self._peek().isdigit() or self._peek() == "_":
                self._advance()
        if self._peek() in "eE" and (self._peek(1).isdigit() or
                                     (self._peek(1) in "+-" and self._peek(2).isdigit())):
            self._advance(2)
            while self._peek().isdigit():
                self._advance()
        if self._peek() in "fFdDlL":
            self._advance()
        return self._token(NUMBER, start)

    def _token(self, kind: str, start: tuple[int, int, int]) -> Token:
        line, col, off = start
        text = self.text[off:self.pos]
        # End position is the last character of the token (inclusive).
        end_line, end_col = line, col
        for ch in text[:-1] if text else "":
            if ch == "\n":
                end_line += 1
                end_col = 1
            else:
                end_col += 1
        if not text:
            end_line, end_col = line, col
        return Token(kind, text, line, col, off, end_line, end_col)

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            self._skip_trivia()
            if self.pos >= len(self.text):
                break
            c = self.text[self.pos]
            start = (self.line, self.col, self.pos)
            if _is_ident_start(c):
                while _is_ident_part(self._peek()):
                    self._advance()
                tok = self._token(IDENT, start)
                if tok.text in KEYWORDS:
                    tok = Token(KEYWORD, tok.text, tok.line, tok.column, tok.offset,
                                tok.end_line, tok.end_column)
                out.append(tok)
            elif c.isdigit() or (c == "." and self._peek(1).isdigit()):
                if c == ".":
                    self._advance()
                    while self._peek().isdigit():
                        self._advance()
                    if self._peek() in "fFdD":
                        self._advance()
                    out.append(self._token(NUMBER, start))
                else:
                    out.append(self._lex_number())
            elif c == '"':
                out.append(self._lex_quoted('"', STRING))
            elif c == "'":
                out.append(self._lex_quoted("'", CHAR))
            else:
                for op in _OPERATORS:
                    if self.text.startswith(op, self.pos):
                        self._advance(len(op))
                        out.append(self._token(OP, start))
                        break
                else:
                    # Unknown character: emit it as a stray operator token so
                    # the parser can degrade around it.
                    self._advance()
                    out.append(self._token(OP, start))
                    self._diag(start[0], start[1], f"unexpected character {c!r}")
        eof_pos = SourcePosition(self.file, self.line, self.col)
        out.append(Token(EOF, "", eof_pos.line, eof_pos.column, self.pos,
                         eof_pos.line, eof_pos.column))
        return out


def tokenize(file: str, text: str) -> tuple[list[Token], list[Diagnostic]]:
    lexer = Lexer(file, text)
    toks = lexer.tokens()
    return toks, lexer.diagnostics
