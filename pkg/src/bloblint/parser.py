"""Recursive-descent parser for the Java subset the analyses consume.

Parsing is total: malformed or unsupported constructs degrade to opaque
nodes with diagnostics instead of raising. Conditionals are never dropped;
an `if`/`switch` anywhere in parsed code always becomes an If/Switch node.

When a toolkit catalog is supplied, a lambda passed to a known listener
registration method (e.g. `addActionListener`) is materialized as an
anonymous class implementing that listener interface, so the rest of the
pipeline sees lambda listeners and anonymous-class listeners uniformly.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

from . import lexer as lx
from .lexer import Token
from .nodes import (
    Assignment, BinaryOp, Block, Cast, CatchClause, CompilationUnit,
    Conditional, Diagnostic, Expression, ExpressionStatement, FieldAccess,
    FieldDeclaration, Identifier, If, ImportDeclaration, InstanceOf, Lambda,
    Literal, LocalVarDecl, Loop, MethodCall, MethodDeclaration,
    ObjectCreation, OpaqueExpression, OpaqueStatement, Return, SourcePosition,
    Span, Statement, Switch, SwitchCase, Try, TypeDeclaration, UnaryOp,
)

if TYPE_CHECKING:
    from .catalog import ToolkitCatalog

_MODIFIERS = frozenset("""
public private protected static final abstract native synchronized
transient volatile strictfp default
""".split())

_ASSIGN_OPS = frozenset(
    {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="})

_BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",), ("&&",), ("|",), ("^",), ("&",), ("==", "!="),
    ("<", ">", "<=", ">="), ("<<", ">>", ">>>"), ("+", "-"), ("*", "/", "%"),
)
_RELATIONAL_LEVEL = 6

_TYPE_ARG_TOKENS = frozenset({",", ".", "?", "&", "[", "]"})


def parse_unit(file: str, text: str | bytes,
               catalog: "ToolkitCatalog | None" = None) -> CompilationUnit:
    """Parse Java source text into a compilation unit with source spans.

    Never raises on malformed Java; unparseable regions become opaque nodes
    with diagnostics. Raises UnicodeDecodeError only when `text` is bytes
    that do not decode as UTF-8.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    tokens, lex_diags = lx.tokenize(file, text)
    parser = _Parser(file, text, tokens, catalog)
    unit = parser.parse()
    diags = tuple(sorted(lex_diags + parser.diagnostics,
                         key=lambda d: (d.span.start.key(), d.message)))
    return CompilationUnit(file=file, package_name=unit.package_name,
                           imports=unit.imports, types=unit.types,
                           parse_diagnostics=diags, source=text)


def parse_file(path: str | Path,
               catalog: "ToolkitCatalog | None" = None) -> CompilationUnit:
    """Read and parse a .java file. Raises OSError when the file is
    unreadable and UnicodeDecodeError when it is not valid UTF-8."""
    data = Path(path).read_bytes()
    return parse_unit(str(path), data.decode("utf-8"), catalog)


def _merge_empty_cases(cases: list[SwitchCase]) -> list[SwitchCase]:
    """Fold classic stacked labels (`case A: case B: stmts`) into one case
    so each label group forms a single branch."""
    merged: list[SwitchCase] = []
    pending_labels: tuple = ()
    pending_default = False
    pending_start = None
    for case in cases:
        if not case.statements and case is not cases[-1]:
            pending_labels += case.labels
            pending_default = pending_default or case.is_default
            if pending_start is None:
                pending_start = case.span.start
            continue
        span = case.span if pending_start is None else Span(pending_start, case.span.end)
        merged.append(SwitchCase(pending_labels + case.labels,
                                 pending_default or case.is_default,
                                 case.statements, span))
        pending_labels, pending_default, pending_start = (), False, None
    return merged


class _Parser:
    def __init__(self, file: str, text: str, tokens: list[Token],
                 catalog: "ToolkitCatalog | None"):
        self.file = file
        self.text = text
        self.toks = tokens
        self.i = 0
        self.diagnostics: list[Diagnostic] = []
        self.catalog = catalog
        # (top-level simple name, top-level qualified name, counter) used to
        # name anonymous classes Outer$1, Outer$2, ... in document order.
        self._anon: list[object] = ["Anon", "Anon", 0]
        self._package: str | None = None
        self._line_offsets = [0]
        for line in text.splitlines(keepends=True):
            self._line_offsets.append(self._line_offsets[-1] + len(line))

    # -- token helpers ------------------------------------------------------

    def _cur(self) -> Token:
        return self.toks[self.i]

    def _la(self, k: int = 1) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def _at_eof(self) -> bool:
        return self._cur().kind == lx.EOF

    def _eat(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != lx.EOF:
            self.i += 1
        return tok

    def _prev(self) -> Token:
        return self.toks[max(self.i - 1, 0)]

    def _at_op(self, *texts: str) -> bool:
        tok = self._cur()
        return tok.kind == lx.OP and tok.text in texts

    def _at_kw(self, *words: str) -> bool:
        tok = self._cur()
        return tok.kind == lx.KEYWORD and tok.text in words

    def _accept_op(self, text: str) -> Token | None:
        if self._at_op(text):
            return self._eat()
        return None

    def _accept_kw(self, word: str) -> Token | None:
        if self._at_kw(word):
            return self._eat()
        return None

    def _expect_op(self, text: str, what: str) -> Token | None:
        tok = self._accept_op(text)
        if tok is None:
            self._diag_here(f"expected '{text}' {what}")
        return tok

    def _pos(self, tok: Token) -> SourcePosition:
        return SourcePosition(self.file, tok.line, tok.column)

    def _end(self, tok: Token) -> SourcePosition:
        return SourcePosition(self.file, tok.end_line, tok.end_column)

    def _span(self, start: Token, end: Token) -> Span:
        if (end.line, end.column) < (start.line, start.column):
            end = start
        return Span(self._pos(start), self._end(end))

    def _span_here(self) -> Span:
        tok = self._cur()
        return Span(self._pos(tok), self._pos(tok))

    def _raw(self, start: Token, end: Token) -> str:
        return self.text[start.offset:end.offset + end.length]

    def _diag(self, span: Span, message: str) -> None:
        self.diagnostics.append(Diagnostic(span, message))

    def _diag_here(self, message: str) -> None:
        self._diag(self._span_here(), message)

    # -- unit ---------------------------------------------------------------

    def parse(self) -> CompilationUnit:
        package = None
        imports: list[ImportDeclaration] = []
        self._skip_modifiers()
        if self._at_kw("package"):
            self._eat()
            package = self._dotted_name()
            self._accept_op(";") or self._diag_here("expected ';' after package")
        self._package = package
        while self._at_kw("import"):
            self._eat()
            is_static = self._accept_kw("static") is not None
            name = self._dotted_name()
            wildcard = False
            if name.endswith(".*"):
                name, wildcard = name[:-2], True
            self._accept_op(";") or self._diag_here("expected ';' after import")
            if name:
                imports.append(ImportDeclaration(name, wildcard, is_static))
        types: list[TypeDeclaration] = []
        while not self._at_eof():
            before = self.i
            start_tok = self._cur()
            self._skip_modifiers()
            if self._at_type_keyword():
                decl = self._parse_type_decl(enclosing_qual=None,
                                             start_tok=start_tok)
                if decl is not None:
                    types.append(decl)
            elif self._at_eof():
                break
            else:
                tok = self._eat()
                self._diag(self._span(tok, tok),
                           f"skipped unexpected top-level token {tok.text!r}")
            if self.i == before:
                self._eat()
        return CompilationUnit(file=self.file, package_name=package,
                               imports=tuple(imports), types=tuple(types),
                               parse_diagnostics=())

    def _dotted_name(self) -> str:
        parts: list[str] = []
        while self._cur().kind == lx.IDENT or self._at_op("*"):
            parts.append(self._eat().text)
            if not self._accept_op("."):
                break
            parts.append(".")
        return "".join(parts)

    def _at_type_keyword(self) -> bool:
        if self._at_kw("class", "interface", "enum"):
            return True
        return self._at_op("@") and self._la(1).kind == lx.KEYWORD \
            and self._la(1).text == "interface"

    def _skip_modifiers(self) -> list[str]:
        seen: list[str] = []
        while True:
            if self._cur().kind == lx.KEYWORD and self._cur().text in _MODIFIERS:
                seen.append(self._eat().text)
            elif self._at_op("@") and self._la(1).kind == lx.IDENT:
                self._eat()
                self._dotted_name()
                if self._at_op("("):
                    self._skip_balanced("(", ")")
            else:
                return seen

    # -- types --------------------------------------------------------------

    def _parse_type_decl(self, enclosing_qual: str | None,
                         start_tok: Token | None = None) -> TypeDeclaration | None:
        start = start_tok if start_tok is not None else self._cur()
        if self._at_op("@"):  # @interface
            self._eat()
        kind_tok = self._eat()  # class | interface | enum
        kind = kind_tok.text if kind_tok.text in ("class", "interface", "enum") \
            else "interface"
        name_tok = self._cur() if self._cur().kind == lx.IDENT else None
        if name_tok is not None:
            self._eat()
            name = name_tok.text
        else:
            name = "<unnamed>"
            self._diag_here(f"missing name after '{kind_tok.text}'")
        if enclosing_qual is None:
            qualified = f"{self._package}.{name}" if self._package else name
            saved_anon = self._anon
            self._anon = [name, qualified, 0]
        else:
            qualified = f"{enclosing_qual}.{name}"
            saved_anon = None
        try:
            if self._at_op("<"):
                self._try_skip_type_args()
            extends: list[str] = []
            implements: list[str] = []
            if self._accept_kw("extends"):
                extends.append(self._type_ref() or "<error>")
                while self._accept_op(","):
                    extends.append(self._type_ref() or "<error>")
            if self._accept_kw("implements"):
                implements.append(self._type_ref() or "<error>")
                while self._accept_op(","):
                    implements.append(self._type_ref() or "<error>")
            if not self._at_op("{"):
                self._diag_here(f"expected '{{' to open body of {name}")
                return TypeDeclaration(name, qualified, kind, tuple(extends),
                                       tuple(implements), (), (), (),
                                       self._span(start, self._prev()))
            fields, methods, nested, close = self._parse_type_body(
                name, qualified, is_enum=(kind == "enum"))
            return TypeDeclaration(name, qualified, kind, tuple(extends),
                                   tuple(implements), tuple(fields),
                                   tuple(methods), tuple(nested),
                                   self._span(start, close))
        finally:
            if saved_anon is not None:
                self._anon = saved_anon

    def _parse_type_body(self, simple: str, qualified: str, *, is_enum: bool):
        open_tok = self._eat()  # '{'
        fields: list[FieldDeclaration] = []
        methods: list[MethodDeclaration] = []
        nested: list[TypeDeclaration] = []
        if is_enum:
            self._parse_enum_constants(simple, nested)
        while not self._at_op("}") and not self._at_eof():
            before = self.i
            if self._accept_op(";"):
                continue
            member_start = self._cur()
            self._skip_modifiers()
            if self._at_type_keyword():
                decl = self._parse_type_decl(enclosing_qual=qualified,
                                             start_tok=member_start)
                if decl is not None:
                    nested.append(decl)
            elif self._at_op("{"):
                # instance/static initializer: keep its statements analyzable
                block = self._parse_block(nested)
                methods.append(MethodDeclaration(
                    "<initializer>", (), "void", block, False,
                    self._span(member_start, self._prev())))
            else:
                self._parse_member(simple, fields, methods, nested, member_start)
            if self.i == before:
                tok = self._eat()
                self._diag(self._span(tok, tok),
                           f"skipped unexpected token {tok.text!r} in type body")
        close = self._accept_op("}") or self._prev()
        return fields, methods, nested, close

    def _parse_enum_constants(self, enum_name: str,
                              nested: list[TypeDeclaration]) -> None:
        while self._cur().kind == lx.IDENT:
            self._eat()
            if self._at_op("("):
                self._skip_balanced("(", ")")
            if self._at_op("{"):
                anon = self._parse_anonymous_body(enum_name, self._cur())
                nested.append(anon)
            if not self._accept_op(","):
                break
        self._accept_op(";")

    def _parse_member(self, owner_simple: str,
                      fields: list[FieldDeclaration],
                      methods: list[MethodDeclaration],
                      nested: list[TypeDeclaration],
                      start: Token) -> None:
        if self._at_op("<"):
            self._try_skip_type_args() or self._eat()
        # constructor
        if self._cur().kind == lx.IDENT and self._cur().text == owner_simple \
                and self._la(1).kind == lx.OP and self._la(1).text == "(":
            name = self._eat().text
            params = self._parse_params()
            self._skip_throws()
            body = self._parse_block(nested) if self._at_op("{") else None
            if body is None:
                self._accept_op(";")
            methods.append(MethodDeclaration(
                name, params, "", body, False,
                self._span(start, self._prev())))
            return
        declared = self._try_type_ref()
        if declared is not None and self._cur().kind == lx.IDENT:
            name_tok = self._eat()
            if self._at_op("("):
                params = self._parse_params()
                while self._at_op("[") and self._la(1).text == "]":
                    self._eat(), self._eat()
                self._skip_throws()
                body = self._parse_block(nested) if self._at_op("{") else None
                if body is None:
                    self._accept_op(";") or self._diag_here(
                        f"expected method body or ';' for {name_tok.text}")
                methods.append(MethodDeclaration(
                    name_tok.text, params, declared, body, False,
                    self._span(start, self._prev())))
                return
            # field declarator list
            while True:
                dims = ""
                while self._at_op("[") and self._la(1).text == "]":
                    self._eat(), self._eat()
                    dims += "[]"
                init = None
                if self._accept_op("="):
                    init = self._parse_initializer()
                fields.append(FieldDeclaration(
                    name_tok.text, declared + dims, init,
                    self._span(start, self._prev())))
                if not self._accept_op(","):
                    break
                if self._cur().kind != lx.IDENT:
                    self._diag_here("expected field name after ','")
                    break
                name_tok = self._eat()
            self._accept_op(";") or self._diag_here("expected ';' after field")
            return
        # not a recognized member: skip to next boundary
        raw_start = self._cur()
        self._skip_statement_like()
        self._diag(self._span(raw_start, self._prev()),
                   "skipped unsupported type member")

    def _parse_params(self) -> tuple[tuple[str, str], ...]:
        self._eat()  # '('
        params: list[tuple[str, str]] = []
        while not self._at_op(")") and not self._at_eof():
            before = self.i
            self._skip_modifiers()
            ptype = self._try_type_ref() or "<error>"
            if self._accept_op("..."):
                ptype += "[]"
            if self._cur().kind == lx.IDENT:
                pname = self._eat().text
                while self._at_op("[") and self._la(1).text == "]":
                    self._eat(), self._eat()
                    ptype += "[]"
                params.append((pname, ptype))
            self._accept_op(",")
            if self.i == before:
                self._eat()
        self._accept_op(")") or self._diag_here("expected ')' after parameters")
        return tuple(params)

    def _skip_throws(self) -> None:
        if self._accept_kw("throws"):
            self._type_ref()
            while self._accept_op(","):
                self._type_ref()

    # -- type references ----------------------------------------------------

    def _type_ref(self) -> str | None:
        ref = self._try_type_ref()
        if ref is None:
            self._diag_here("expected a type name")
        return ref

    def _try_type_ref(self) -> str | None:
        snap = self._snapshot()
        tok = self._cur()
        if tok.kind == lx.KEYWORD and tok.text in lx.PRIMITIVES:
            name = self._eat().text
        elif tok.kind == lx.IDENT:
            name = self._eat().text
            while self._at_op(".") and self._la(1).kind == lx.IDENT:
                self._eat()
                name += "." + self._eat().text
                if self._at_op("<"):
                    self._try_skip_type_args()
        else:
            return None
        if self._at_op("<"):
            self._try_skip_type_args()
        dims = ""
        while self._at_op("[") and self._la(1).text == "]":
            self._eat(), self._eat()
            dims += "[]"
        del snap
        return name + dims

    def _try_skip_type_args(self) -> bool:
        """Attempt to consume a balanced `<...>` type-argument list; restore
        and return False when the angle bracket is really a comparison."""
        snap = self._snapshot()
        depth = 0
        steps = 0
        while not self._at_eof() and steps < 500:
            steps += 1
            tok = self._cur()
            if tok.kind == lx.OP and tok.text == "<":
                depth += 1
            elif tok.kind == lx.OP and tok.text in (">", ">>", ">>>"):
                depth -= len(tok.text)
                if depth <= 0:
                    self._eat()
                    return True
            elif tok.kind == lx.IDENT:
                pass
            elif tok.kind == lx.KEYWORD and tok.text in lx.PRIMITIVES | {"extends", "super"}:
                pass
            elif tok.kind == lx.OP and tok.text in _TYPE_ARG_TOKENS:
                pass
            else:
                break
            self._eat()
        self._restore(snap)
        return False

    # -- statements ---------------------------------------------------------

    def _parse_block(self, nested_sink: list[TypeDeclaration] | None = None) -> Block:
        open_tok = self._eat()  # '{'
        stmts: list[Statement] = []
        while not self._at_op("}") and not self._at_eof():
            before = self.i
            stmts.extend(self._parse_statement(nested_sink))
            if self.i == before:
                tok = self._eat()
                self._diag(self._span(tok, tok),
                           f"skipped unexpected token {tok.text!r} in block")
        close = self._accept_op("}")
        if close is None:
            self._diag(self._span(open_tok, open_tok), "unclosed '{'")
            close = self._prev()
        return Block(tuple(stmts), self._span(open_tok, close))

    def _parse_single_statement(self, nested_sink) -> Statement:
        start = self._cur()
        stmts = self._parse_statement(nested_sink)
        if len(stmts) == 1:
            return stmts[0]
        end = self._prev() if self.i > 0 else start
        return Block(tuple(stmts), self._span(start, end))

    def _parse_statement(self, nested_sink) -> list[Statement]:
        tok = self._cur()
        if tok.kind == lx.OP:
            if tok.text == "{":
                return [self._parse_block(nested_sink)]
            if tok.text == ";":
                semi = self._eat()
                return [Block((), self._span(semi, semi))]
        if tok.kind == lx.KEYWORD:
            word = tok.text
            if word == "if":
                return [self._parse_if(nested_sink)]
            if word == "switch":
                return [self._parse_switch(nested_sink)]
            if word == "while":
                self._eat()
                cond = self._parenthesized()
                body = self._parse_single_statement(nested_sink)
                return [Loop("while", cond, body, self._span(tok, self._prev()))]
            if word == "do":
                self._eat()
                body = self._parse_single_statement(nested_sink)
                self._accept_kw("while") or self._diag_here("expected 'while' after do body")
                cond = self._parenthesized()
                self._accept_op(";")
                return [Loop("do", cond, body, self._span(tok, self._prev()))]
            if word == "for":
                return [self._parse_for(nested_sink)]
            if word == "return":
                self._eat()
                value = None if self._at_op(";") else self._parse_expression()
                self._accept_op(";") or self._diag_here("expected ';' after return")
                return [Return(value, self._span(tok, self._prev()))]
            if word == "try":
                return [self._parse_try(nested_sink)]
            if word == "synchronized":
                self._eat()
                if self._at_op("("):
                    self._skip_balanced("(", ")")
                if self._at_op("{"):
                    block = self._parse_block(nested_sink)
                    self._diag(self._span(tok, tok),
                               "synchronized: lock ignored, body analyzed")
                    return [Block(block.statements, self._span(tok, self._prev()))]
                return [self._opaque_statement(tok, "synchronized")]
            if word in ("throw", "break", "continue", "assert"):
                return [self._opaque_statement(tok, word)]
            if word in ("class", "interface", "enum"):
                decl = self._parse_type_decl(
                    enclosing_qual=str(self._anon[1]))
                if decl is not None and nested_sink is not None:
                    nested_sink.append(decl)
                return []
            if word in ("final",) or word in lx.PRIMITIVES or word in _MODIFIERS:
                decls = self._try_local_var_decl()
                if decls is not None:
                    return decls
                return [self._opaque_statement(tok, word)]
        # labeled statement: IDENT ':' <stmt>  (label dropped)
        if tok.kind == lx.IDENT and self._la(1).kind == lx.OP \
                and self._la(1).text == ":" :
            self._eat(), self._eat()
            return self._parse_statement(nested_sink)
        decls = self._try_local_var_decl()
        if decls is not None:
            return decls
        expr = self._parse_expression()
        semi = self._accept_op(";")
        if semi is None:
            self._diag_here("expected ';' after expression")
            end = self._prev()
        else:
            end = semi
        return [ExpressionStatement(expr, self._span(tok, end))]

    def _opaque_statement(self, start: Token, what: str) -> OpaqueStatement:
        self._skip_statement_like()
        end = self._prev()
        span = self._span(start, end)
        self._diag(span, f"unsupported statement '{what}' kept as opaque")
        return OpaqueStatement(self._raw(start, end), span)

    def _skip_statement_like(self) -> None:
        """Consume tokens up to and including ';' at depth 0, or up to (not
        including) a '}' at depth 0."""
        depth = 0
        while not self._at_eof():
            tok = self._cur()
            if tok.kind == lx.OP:
                if tok.text in ("(", "[", "{"):
                    depth += 1
                elif tok.text in (")", "]"):
                    depth = max(depth - 1, 0)
                elif tok.text == "}":
                    if depth == 0:
                        return
                    depth -= 1
                elif tok.text == ";" and depth == 0:
                    self._eat()
                    return
            self._eat()

    def _parenthesized(self) -> Expression:
        if self._accept_op("(") is None:
            self._diag_here("expected '('")
            return self._parse_expression()
        expr = self._parse_expression()
        self._accept_op(")") or self._diag_here("expected ')'")
        return expr

    def _parse_if(self, nested_sink) -> If:
        if_tok = self._eat()
        cond = self._parenthesized()
        then_branch = self._parse_single_statement(nested_sink)
        else_branch = None
        if self._accept_kw("else"):
            else_branch = self._parse_single_statement(nested_sink)
        return If(cond, then_branch, else_branch, self._span(if_tok, self._prev()))

    def _parse_switch(self, nested_sink) -> Switch:
        sw_tok = self._eat()
        selector = self._parenthesized()
        self._expect_op("{", "to open switch body")
        cases: list[SwitchCase] = []
        while not self._at_op("}") and not self._at_eof():
            before = self.i
            if self._at_kw("case", "default"):
                cases.append(self._parse_switch_case(nested_sink))
            else:
                tok = self._eat()
                self._diag(self._span(tok, tok),
                           f"skipped token {tok.text!r} in switch body")
            if self.i == before:
                self._eat()
        self._accept_op("}")
        return Switch(selector, tuple(_merge_empty_cases(cases)),
                      self._span(sw_tok, self._prev()))

    def _parse_switch_case(self, nested_sink) -> SwitchCase:
        start = self._cur()
        labels: list[Expression] = []
        is_default = False
        if self._accept_kw("default"):
            is_default = True
        else:
            self._eat()  # 'case'
            labels.append(self._parse_expression())
            while self._accept_op(","):
                labels.append(self._parse_expression())
        arrow = self._accept_op("->")
        if arrow is None:
            self._accept_op(":") or self._diag_here("expected ':' after case label")
        stmts: list[Statement] = []
        if arrow is not None:
            stmts.extend(self._parse_statement(nested_sink))
        else:
            while not self._at_kw("case", "default") and not self._at_op("}") \
                    and not self._at_eof():
                before = self.i
                stmts.extend(self._parse_statement(nested_sink))
                if self.i == before:
                    self._eat()
        return SwitchCase(tuple(labels), is_default, tuple(stmts),
                          self._span(start, self._prev()))

    def _parse_for(self, nested_sink) -> Loop:
        for_tok = self._eat()
        self._expect_op("(", "after 'for'")
        # enhanced for: `for (Type name : iterable)`
        snap = self._snapshot()
        self._skip_modifiers()
        ref = self._try_type_ref()
        if ref is not None and self._cur().kind == lx.IDENT \
                and self._la(1).kind == lx.OP and self._la(1).text == ":":
            name_tok = self._eat()
            self._eat()  # ':'
            self._parse_expression()
            self._accept_op(")") or self._diag_here("expected ')' in for-each")
            body = self._parse_single_statement(nested_sink)
            var = LocalVarDecl(name_tok.text, ref, None,
                               self._span(name_tok, name_tok))
            return Loop("foreach", None, body,
                        self._span(for_tok, self._prev()), init=(var,))
        self._restore(snap)
        init: list[Statement] = []
        if not self._accept_op(";"):
            decls = self._try_local_var_decl()
            if decls is not None:
                init.extend(decls)
            else:
                first = self._cur()
                expr = self._parse_expression()
                init.append(ExpressionStatement(expr, self._span(first, self._prev())))
                while self._accept_op(","):
                    first = self._cur()
                    expr = self._parse_expression()
                    init.append(ExpressionStatement(expr, self._span(first, self._prev())))
                self._accept_op(";") or self._diag_here("expected ';' in for header")
        cond = None
        if not self._at_op(";"):
            cond = self._parse_expression()
        self._accept_op(";") or self._diag_here("expected second ';' in for header")
        while not self._at_op(")") and not self._at_eof():
            before = self.i
            self._parse_expression()
            self._accept_op(",")
            if self.i == before:
                self._eat()
        self._accept_op(")")
        body = self._parse_single_statement(nested_sink)
        return Loop("for", cond, body, self._span(for_tok, self._prev()),
                    init=tuple(init))

    def _parse_try(self, nested_sink) -> Try:
        try_tok = self._eat()
        resources: list[LocalVarDecl] = []
        if self._at_op("("):
            self._eat()
            while not self._at_op(")") and not self._at_eof():
                before = self.i
                self._skip_modifiers()
                ref = self._try_type_ref()
                if ref is not None and self._cur().kind == lx.IDENT:
                    name_tok = self._eat()
                    init = None
                    if self._accept_op("="):
                        init = self._parse_expression()
                    resources.append(LocalVarDecl(
                        name_tok.text, ref, init,
                        self._span(name_tok, self._prev())))
                self._accept_op(";")
                if self.i == before:
                    self._eat()
            self._accept_op(")")
        body = self._parse_block(nested_sink) if self._at_op("{") else \
            Block((), self._span_here())
        catches: list[CatchClause] = []
        while self._at_kw("catch"):
            c_tok = self._eat()
            self._expect_op("(", "after 'catch'")
            types = [self._type_ref() or "<error>"]
            while self._accept_op("|"):
                types.append(self._type_ref() or "<error>")
            pname = self._eat().text if self._cur().kind == lx.IDENT else "<error>"
            self._accept_op(")") or self._diag_here("expected ')' after catch parameter")
            cbody = self._parse_block(nested_sink) if self._at_op("{") else \
                Block((), self._span_here())
            catches.append(CatchClause(pname, tuple(types), cbody,
                                       self._span(c_tok, self._prev())))
        finally_block = None
        if self._accept_kw("finally"):
            finally_block = self._parse_block(nested_sink) if self._at_op("{") else None
        return Try(body, tuple(catches), finally_block,
                   self._span(try_tok, self._prev()), resources=tuple(resources))

    def _try_local_var_decl(self) -> list[LocalVarDecl] | None:
        snap = self._snapshot()
        start = self._cur()
        self._skip_modifiers()
        declared = self._try_type_ref()
        if declared is None or self._cur().kind != lx.IDENT:
            self._restore(snap)
            return None
        name_tok = self._eat()
        if not (self._at_op("=") or self._at_op(";") or self._at_op(",")):
            self._restore(snap)
            return None
        decls: list[LocalVarDecl] = []
        while True:
            dims = ""
            while self._at_op("[") and self._la(1).text == "]":
                self._eat(), self._eat()
                dims += "[]"
            init = None
            if self._accept_op("="):
                init = self._parse_initializer()
            decls.append(LocalVarDecl(name_tok.text, declared + dims, init,
                                      self._span(start, self._prev())))
            if not self._accept_op(","):
                break
            if self._cur().kind != lx.IDENT:
                self._diag_here("expected variable name after ','")
                break
            name_tok = self._eat()
        self._accept_op(";") or self._diag_here("expected ';' after declaration")
        return decls

    def _parse_initializer(self) -> Expression:
        if self._at_op("{"):  # array initializer, not analyzed
            start = self._cur()
            self._skip_balanced("{", "}")
            end = self._prev()
            return OpaqueExpression(self._raw(start, end), self._span(start, end))
        return self._parse_expression()

    # -- expressions --------------------------------------------------------

    def _parse_expression(self) -> Expression:
        return self._parse_assignment()

    def _parse_assignment(self) -> Expression:
        lam = self._try_lambda()
        if lam is not None:
            return lam
        lhs = self._parse_ternary()
        if self._cur().kind == lx.OP and self._cur().text in _ASSIGN_OPS:
            op = self._eat().text
            rhs = self._parse_assignment()
            return Assignment(lhs, rhs, self._cover(lhs.span, rhs.span), op)
        return lhs

    def _try_lambda(self) -> Expression | None:
        tok = self._cur()
        if tok.kind == lx.IDENT and self._la(1).kind == lx.OP \
                and self._la(1).text == "->":
            start = self._eat()
            self._eat()  # ->
            return self._finish_lambda((start.text,), start)
        if tok.kind == lx.OP and tok.text == "(":
            # lambda iff the matching ')' is immediately followed by '->'
            depth = 0
            j = self.i
            while j < len(self.toks) - 1:
                t = self.toks[j]
                if t.kind == lx.OP and t.text == "(":
                    depth += 1
                elif t.kind == lx.OP and t.text == ")":
                    depth -= 1
                    if depth == 0:
                        break
                elif t.kind == lx.OP and t.text in (";", "{"):
                    return None
                j += 1
            else:
                return None
            after = self.toks[min(j + 1, len(self.toks) - 1)]
            if not (after.kind == lx.OP and after.text == "->"):
                return None
            start = self._eat()  # '('
            names: list[str] = []
            while not self._at_op(")") and not self._at_eof():
                before = self.i
                self._skip_modifiers()
                snap = self._snapshot()
                ref = self._try_type_ref()
                if ref is not None and self._cur().kind == lx.IDENT:
                    names.append(self._eat().text)
                else:
                    self._restore(snap)
                    if self._cur().kind == lx.IDENT:
                        names.append(self._eat().text)
                self._accept_op(",")
                if self.i == before:
                    self._eat()
            self._accept_op(")")
            self._accept_op("->")
            return self._finish_lambda(tuple(names), start)
        return None

    def _finish_lambda(self, params: tuple[str, ...], start: Token) -> Lambda:
        if self._at_op("{"):
            body: Statement | Expression = self._parse_block(None)
        else:
            body = self._parse_assignment()
        return Lambda(params, body, self._span(start, self._prev()))

    def _parse_ternary(self) -> Expression:
        cond = self._parse_binary(0)
        if self._at_op("?"):
            self._eat()
            then_value = self._parse_assignment()
            self._accept_op(":") or self._diag_here("expected ':' in conditional")
            else_value = self._parse_ternary()
            return Conditional(cond, then_value, else_value,
                               self._cover(cond.span, else_value.span))
        return cond

    def _parse_binary(self, level: int) -> Expression:
        if level >= len(_BINARY_LEVELS):
            return self._parse_unary()
        ops = _BINARY_LEVELS[level]
        lhs = self._parse_binary(level + 1)
        while True:
            if level == _RELATIONAL_LEVEL and self._at_kw("instanceof"):
                self._eat()
                tname = self._try_type_ref()
                if tname is None:
                    self._diag_here("expected type after 'instanceof'")
                    tname = "<error>"
                end = self._prev()
                if self._cur().kind == lx.IDENT:  # pattern binding, ignored
                    end = self._eat()
                lhs = InstanceOf(lhs, tname,
                                 Span(lhs.span.start, self._end(end)))
                continue
            if self._cur().kind == lx.OP and self._cur().text in ops:
                op = self._eat().text
                rhs = self._parse_binary(level + 1)
                lhs = BinaryOp(op, lhs, rhs, self._cover(lhs.span, rhs.span))
                continue
            return lhs

    def _parse_unary(self) -> Expression:
        tok = self._cur()
        if tok.kind == lx.OP and tok.text in ("!", "~", "+", "-", "++", "--"):
            self._eat()
            operand = self._parse_unary()
            return UnaryOp(tok.text, operand,
                           Span(self._pos(tok), operand.span.end))
        if tok.kind == lx.OP and tok.text == "(":
            cast = self._try_cast(tok)
            if cast is not None:
                return cast
        return self._parse_postfix()

    def _try_cast(self, open_tok: Token) -> Expression | None:
        snap = self._snapshot()
        self._eat()  # '('
        ref = self._try_type_ref()
        if ref is None or not self._at_op(")"):
            self._restore(snap)
            return None
        self._eat()  # ')'
        nxt = self._cur()
        is_primitive = ref.rstrip("[]") in lx.PRIMITIVES
        starts_operand = (
            nxt.kind in (lx.IDENT, lx.NUMBER, lx.STRING, lx.CHAR)
            or (nxt.kind == lx.KEYWORD and nxt.text in ("new", "this", "super"))
            or (nxt.kind == lx.OP and nxt.text in ("(", "!", "~"))
        )
        if is_primitive or starts_operand:
            operand = self._parse_unary()
            return Cast(ref, operand, Span(self._pos(open_tok), operand.span.end))
        self._restore(snap)
        return None

    def _parse_postfix(self) -> Expression:
        expr = self._parse_primary()
        while True:
            if self._at_op("."):
                dot = self._eat()
                if self._at_op("<"):
                    self._try_skip_type_args()
                tok = self._cur()
                if tok.kind == lx.IDENT:
                    self._eat()
                    if self._at_op("("):
                        args = self._parse_args(tok.text)
                        expr = MethodCall(expr, tok.text, args,
                                          Span(expr.span.start, self._end(self._prev())))
                    else:
                        expr = FieldAccess(expr, tok.text,
                                           Span(expr.span.start, self._end(tok)))
                elif tok.kind == lx.KEYWORD and tok.text in ("class", "this", "super"):
                    self._eat()
                    expr = FieldAccess(expr, tok.text,
                                       Span(expr.span.start, self._end(tok)))
                elif tok.kind == lx.KEYWORD and tok.text == "new":
                    self._eat()
                    ref = self._try_type_ref() or "<error>"
                    args = self._parse_args(None) if self._at_op("(") else ()
                    expr = ObjectCreation(ref, args, None,
                                          Span(expr.span.start, self._end(self._prev())))
                else:
                    self._diag(self._span(dot, dot), "dangling '.'")
                continue
            if self._at_op("::"):
                # method reference, outside the analyzed subset
                start_tok = self._eat()
                if self._cur().kind in (lx.IDENT, lx.KEYWORD):
                    self._eat()
                span = Span(expr.span.start, self._end(self._prev()))
                expr = OpaqueExpression(self._raw_span(span), span)
                self._diag(span, "method reference kept as opaque")
                continue
            if self._at_op("["):
                self._eat()
                if not self._at_op("]"):
                    self._parse_expression()
                self._accept_op("]") or self._diag_here("expected ']'")
                span = Span(expr.span.start, self._end(self._prev()))
                expr = OpaqueExpression(self._raw_span(span), span)
                continue
            if self._at_op("++", "--"):
                op = self._eat()
                expr = UnaryOp(op.text, expr,
                               Span(expr.span.start, self._end(op)), prefix=False)
                continue
            return expr

    def _parse_primary(self) -> Expression:
        tok = self._cur()
        if tok.kind == lx.NUMBER:
            self._eat()
            text = tok.text.lower()
            if text.startswith(("0x", "0b")):
                kind = "int"
            elif "." in text or "e" in text or text.endswith(("f", "d")):
                kind = "float"
            else:
                kind = "int"
            return Literal(kind, tok.text, self._span(tok, tok))
        if tok.kind == lx.STRING:
            self._eat()
            return Literal("string", tok.text[1:-1] if len(tok.text) >= 2 else "",
                           self._span(tok, tok))
        if tok.kind == lx.CHAR:
            self._eat()
            return Literal("char", tok.text[1:-1] if len(tok.text) >= 2 else "",
                           self._span(tok, tok))
        if tok.kind == lx.IDENT:
            if tok.text in ("true", "false"):
                self._eat()
                return Literal("boolean", tok.text, self._span(tok, tok))
            if tok.text == "null":
                self._eat()
                return Literal("null", tok.text, self._span(tok, tok))
            self._eat()
            if self._at_op("("):
                args = self._parse_args(tok.text)
                return MethodCall(None, tok.text, args,
                                  Span(self._pos(tok), self._end(self._prev())))
            return Identifier(tok.text, self._span(tok, tok))
        if tok.kind == lx.KEYWORD:
            if tok.text in ("this", "super"):
                self._eat()
                if self._at_op("("):
                    args = self._parse_args(None)
                    return MethodCall(None, tok.text, args,
                                      Span(self._pos(tok), self._end(self._prev())))
                return Identifier(tok.text, self._span(tok, tok))
            if tok.text == "new":
                return self._parse_creation()
            if tok.text in lx.PRIMITIVES:  # e.g. `int.class`
                self._eat()
                return Identifier(tok.text, self._span(tok, tok))
            if tok.text == "switch":
                start = self._eat()
                if self._at_op("("):
                    self._skip_balanced("(", ")")
                if self._at_op("{"):
                    self._skip_balanced("{", "}")
                end = self._prev()
                span = self._span(start, end)
                self._diag(span, "switch expression kept as opaque")
                return OpaqueExpression(self._raw(start, end), span)
        if tok.kind == lx.OP and tok.text == "(":
            self._eat()
            expr = self._parse_expression()
            self._accept_op(")") or self._diag_here("expected ')'")
            return expr
        if tok.kind == lx.EOF:
            self._diag_here("unexpected end of input in expression")
            return OpaqueExpression("", self._span_here())
        self._eat()
        span = self._span(tok, tok)
        self._diag(span, f"unexpected token {tok.text!r} in expression")
        return OpaqueExpression(tok.text, span)

    def _parse_creation(self) -> Expression:
        new_tok = self._eat()
        ref = self._try_type_ref()
        if ref is None:
            self._diag_here("expected type after 'new'")
            return OpaqueExpression("new", self._span(new_tok, new_tok))
        if self._at_op("[") or ref.endswith("[]"):
            # array creation, including `new T[]{...}`
            while self._at_op("["):
                self._skip_balanced("[", "]")
            if self._at_op("{"):
                self._skip_balanced("{", "}")
            end = self._prev()
            return OpaqueExpression(self._raw(new_tok, end),
                                    self._span(new_tok, end))
        args: tuple[Expression, ...] = ()
        if self._at_op("("):
            args = self._parse_args(None)
        body = None
        if self._at_op("{"):
            body = self._parse_anonymous_body(ref, new_tok)
        return ObjectCreation(ref, args, body,
                              self._span(new_tok, self._prev()))

    def _parse_anonymous_body(self, supertype: str, start_tok: Token) -> TypeDeclaration:
        top_simple, top_qual, count = self._anon[0], self._anon[1], self._anon[2]
        n = int(count) + 1  # type: ignore[arg-type]
        self._anon[2] = n
        simple = f"{top_simple}${n}"
        qualified = f"{top_qual}${n}"
        fields, methods, nested, close = self._parse_type_body(
            simple, qualified, is_enum=False)
        return TypeDeclaration(simple, qualified, "anonymous", (),
                               (supertype,), tuple(fields), tuple(methods),
                               tuple(nested), self._span(start_tok, close))

    def _parse_args(self, call_name: str | None) -> tuple[Expression, ...]:
        self._eat()  # '('
        args: list[Expression] = []
        while not self._at_op(")") and not self._at_eof():
            before = self.i
            arg = self._parse_expression()
            if isinstance(arg, Lambda) and call_name is not None:
                arg = self._materialize_lambda(call_name, arg)
            args.append(arg)
            if not self._accept_op(","):
                break
            if self.i == before:
                self._eat()
        self._accept_op(")") or self._diag_here("expected ')' after arguments")
        return tuple(args)

    def _materialize_lambda(self, call_name: str, lam: Lambda) -> Expression:
        """Turn a lambda registered as a listener into an anonymous class so
        it is analyzed like any other listener implementation."""
        if self.catalog is None:
            return lam
        iface = self.catalog.registration_methods.get(call_name)
        if iface is None:
            return lam
        handlers = self.catalog.handler_signatures(iface)
        if len(handlers) != 1:
            return lam
        sig = handlers[0]
        if isinstance(lam.body, Statement):
            body = lam.body if isinstance(lam.body, Block) \
                else Block((lam.body,), lam.body.span)
        else:
            body = Block((ExpressionStatement(lam.body, lam.body.span),),
                         lam.body.span)
        params = tuple((name, sig.event_param_type) for name in lam.parameters)
        method = MethodDeclaration(sig.method_name, params, "void", body,
                                   True, lam.span)
        top_simple, top_qual = self._anon[0], self._anon[1]
        n = int(self._anon[2]) + 1  # type: ignore[arg-type]
        self._anon[2] = n
        anon = TypeDeclaration(f"{top_simple}${n}", f"{top_qual}${n}",
                               "anonymous", (), (iface,), (), (method,), (),
                               lam.span)
        return ObjectCreation(iface, (), anon, lam.span)

    # -- misc ---------------------------------------------------------------

    def _skip_balanced(self, open_text: str, close_text: str) -> None:
        depth = 0
        while not self._at_eof():
            tok = self._eat()
            if tok.kind == lx.OP:
                if tok.text == open_text:
                    depth += 1
                elif tok.text == close_text:
                    depth -= 1
                    if depth <= 0:
                        return

    def _cover(self, a: Span, b: Span) -> Span:
        start = a.start if a.start.key() <= b.start.key() else b.start
        end = a.end if a.end.key() >= b.end.key() else b.end
        return Span(start, end)

    def _raw_span(self, span: Span) -> str:
        def off(pos: SourcePosition) -> int:
            line_idx = min(pos.line - 1, len(self._line_offsets) - 1)
            return self._line_offsets[line_idx] + pos.column - 1
        return self.text[off(span.start):off(span.end) + 1]

    def _snapshot(self) -> tuple[int, int]:
        return (self.i, len(self.diagnostics))

    def _restore(self, snap: tuple[int, int]) -> None:
        self.i, ndiags = snap
        del self.diagnostics[ndiags:]
