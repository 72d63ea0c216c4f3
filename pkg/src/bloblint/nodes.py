"""AST node types for the supported Java subset, plus tree walkers.

Every node carries a source span. Nodes are immutable and compared by
identity (the same construct parsed twice yields distinct nodes).
Constructs outside the supported subset are represented by opaque nodes
holding their raw text, so parsing is total.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourcePosition:
    """1-based line/column position in a source file."""

    file: str
    line: int
    column: int

    def key(self) -> tuple[int, int]:
        return (self.line, self.column)

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Span:
    """Inclusive source region: `end` points at the last character."""

    start: SourcePosition
    end: SourcePosition

    @property
    def file(self) -> str:
        return self.start.file

    def contains(self, other: "Span") -> bool:
        return self.start.key() <= other.start.key() and other.end.key() <= self.end.key()

    def strictly_contains(self, other: "Span") -> bool:
        return self.contains(other) and (self.start, self.end) != (other.start, other.end)

    def line_range(self) -> tuple[int, int]:
        return (self.start.line, self.end.line)

    def line_count(self) -> int:
        return self.end.line - self.start.line + 1

    def __str__(self) -> str:
        return f"{self.file}:{self.start.line}:{self.start.column}-{self.end.line}:{self.end.column}"


@dataclass(frozen=True)
class Diagnostic:
    span: Span
    message: str


# ---------------------------------------------------------------------------
# Expressions


class Expression:
    """Base class; every subclass has a `span` field."""

    span: Span


@dataclass(frozen=True, eq=False)
class Identifier(Expression):
    name: str
    span: Span


@dataclass(frozen=True, eq=False)
class FieldAccess(Expression):
    receiver: Expression
    name: str
    span: Span


@dataclass(frozen=True, eq=False)
class MethodCall(Expression):
    receiver: Expression | None
    name: str
    args: tuple[Expression, ...]
    span: Span


@dataclass(frozen=True, eq=False)
class InstanceOf(Expression):
    operand: Expression
    type_name: str
    span: Span


@dataclass(frozen=True, eq=False)
class BinaryOp(Expression):
    op: str
    lhs: Expression
    rhs: Expression
    span: Span


@dataclass(frozen=True, eq=False)
class UnaryOp(Expression):
    op: str
    operand: Expression
    span: Span
    prefix: bool = True


@dataclass(frozen=True, eq=False)
class Literal(Expression):
    kind: str  # string | char | int | float | boolean | null
    value: str
    span: Span


@dataclass(frozen=True, eq=False)
class Cast(Expression):
    type_name: str
    operand: Expression
    span: Span


@dataclass(frozen=True, eq=False)
class Conditional(Expression):
    condition: Expression
    then_value: Expression
    else_value: Expression
    span: Span


@dataclass(frozen=True, eq=False)
class Assignment(Expression):
    target: Expression
    value: Expression
    span: Span
    op: str = "="


@dataclass(frozen=True, eq=False)
class ObjectCreation(Expression):
    """`new T(args)`, optionally with an anonymous class body."""

    type_name: str
    args: tuple[Expression, ...]
    anonymous_body: "TypeDeclaration | None"
    span: Span


@dataclass(frozen=True, eq=False)
class Lambda(Expression):
    """A lambda that was not materialized as a listener class."""

    parameters: tuple[str, ...]
    body: "Statement | Expression"
    span: Span


@dataclass(frozen=True, eq=False)
class OpaqueExpression(Expression):
    text: str
    span: Span


# ---------------------------------------------------------------------------
# Statements


class Statement:
    """Base class; every subclass has a `span` field."""

    span: Span


@dataclass(frozen=True, eq=False)
class Block(Statement):
    statements: tuple[Statement, ...]
    span: Span


@dataclass(frozen=True, eq=False)
class If(Statement):
    condition: Expression
    then_branch: Statement
    else_branch: Statement | None
    span: Span


@dataclass(frozen=True, eq=False)
class SwitchCase:
    labels: tuple[Expression, ...]  # empty for `default`
    is_default: bool
    statements: tuple[Statement, ...]
    span: Span


@dataclass(frozen=True, eq=False)
class Switch(Statement):
    selector: Expression
    cases: tuple[SwitchCase, ...]
    span: Span


@dataclass(frozen=True, eq=False)
class Loop(Statement):
    kind: str  # while | do | for | foreach
    condition: Expression | None
    body: Statement
    span: Span
    init: tuple[Statement, ...] = ()


@dataclass(frozen=True, eq=False)
class Return(Statement):
    value: Expression | None
    span: Span


@dataclass(frozen=True, eq=False)
class ExpressionStatement(Statement):
    expression: Expression
    span: Span


@dataclass(frozen=True, eq=False)
class LocalVarDecl(Statement):
    name: str
    declared_type: str
    initializer: Expression | None
    span: Span


@dataclass(frozen=True, eq=False)
class CatchClause:
    param_name: str
    param_types: tuple[str, ...]
    body: Block
    span: Span


@dataclass(frozen=True, eq=False)
class Try(Statement):
    body: Block
    catches: tuple[CatchClause, ...]
    finally_block: Block | None
    span: Span
    resources: tuple[LocalVarDecl, ...] = ()


@dataclass(frozen=True, eq=False)
class OpaqueStatement(Statement):
    text: str
    span: Span


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True, eq=False)
class FieldDeclaration:
    name: str
    declared_type: str
    initializer: Expression | None
    span: Span


@dataclass(frozen=True, eq=False)
class MethodDeclaration:
    name: str
    parameters: tuple[tuple[str, str], ...]  # (name, declared type)
    return_type: str
    body: Block | None
    is_lambda: bool
    span: Span


@dataclass(frozen=True, eq=False)
class TypeDeclaration:
    name: str
    qualified_name: str
    kind: str  # class | interface | enum | anonymous
    extends_names: tuple[str, ...]
    implements_names: tuple[str, ...]
    fields: tuple[FieldDeclaration, ...]
    methods: tuple[MethodDeclaration, ...]
    nested_types: tuple["TypeDeclaration", ...]
    span: Span


@dataclass(frozen=True)
class ImportDeclaration:
    name: str
    wildcard: bool
    is_static: bool = False


@dataclass(frozen=True, eq=False)
class CompilationUnit:
    file: str
    package_name: str | None
    imports: tuple[ImportDeclaration, ...]
    types: tuple[TypeDeclaration, ...]
    parse_diagnostics: tuple[Diagnostic, ...]
    source: str = field(repr=False, default="")


# ---------------------------------------------------------------------------
# Walkers


def expression_children(expr: Expression) -> tuple[Expression, ...]:
    """Direct subexpressions (anonymous class and lambda bodies excluded)."""
    if isinstance(expr, FieldAccess):
        return (expr.receiver,)
    if isinstance(expr, MethodCall):
        recv = (expr.receiver,) if expr.receiver is not None else ()
        return recv + expr.args
    if isinstance(expr, InstanceOf):
        return (expr.operand,)
    if isinstance(expr, BinaryOp):
        return (expr.lhs, expr.rhs)
    if isinstance(expr, UnaryOp):
        return (expr.operand,)
    if isinstance(expr, Cast):
        return (expr.operand,)
    if isinstance(expr, Conditional):
        return (expr.condition, expr.then_value, expr.else_value)
    if isinstance(expr, Assignment):
        return (expr.target, expr.value)
    if isinstance(expr, ObjectCreation):
        return expr.args
    return ()


def walk_expression(expr: Expression):
    """Yield `expr` and all nested subexpressions, document order."""
    yield expr
    for child in expression_children(expr):
        yield from walk_expression(child)


def statement_expressions(stmt: Statement) -> tuple[Expression, ...]:
    """Direct expressions of a statement (not of its nested statements)."""
    if isinstance(stmt, If):
        return (stmt.condition,)
    if isinstance(stmt, Switch):
        labels: tuple[Expression, ...] = ()
        for case in stmt.cases:
            labels += case.labels
        return (stmt.selector,) + labels
    if isinstance(stmt, Loop):
        return (stmt.condition,) if stmt.condition is not None else ()
    if isinstance(stmt, Return):
        return (stmt.value,) if stmt.value is not None else ()
    if isinstance(stmt, ExpressionStatement):
        return (stmt.expression,)
    if isinstance(stmt, LocalVarDecl):
        return (stmt.initializer,) if stmt.initializer is not None else ()
    return ()


def statement_children(stmt: Statement) -> tuple[Statement, ...]:
    """Direct child statements, document order."""
    if isinstance(stmt, Block):
        return stmt.statements
    if isinstance(stmt, If):
        out: tuple[Statement, ...] = (stmt.then_branch,)
        if stmt.else_branch is not None:
            out += (stmt.else_branch,)
        return out
    if isinstance(stmt, Switch):
        out = ()
        for case in stmt.cases:
            out += case.statements
        return out
    if isinstance(stmt, Loop):
        return stmt.init + (stmt.body,)
    if isinstance(stmt, Try):
        out = stmt.resources + (stmt.body,)
        for catch in stmt.catches:
            out += (catch.body,)
        if stmt.finally_block is not None:
            out += (stmt.finally_block,)
        return out
    return ()


def walk_statements(statements, *, into_types: bool = False, into_lambdas: bool = False):
    """Yield every statement under `statements`, document order.

    `into_types` also descends into anonymous class bodies found in
    expressions; `into_lambdas` descends into unmaterialized lambda bodies.
    Both are off by default because a nested class or deferred lambda body
    does not belong to the enclosing method's control flow.
    """
    for stmt in statements:
        yield stmt
        yield from walk_statements(statement_children(stmt), into_types=into_types,
                                   into_lambdas=into_lambdas)
        if into_types or into_lambdas:
            for expr in statement_expressions(stmt):
                for sub in walk_expression(expr):
                    if into_types and isinstance(sub, ObjectCreation) and sub.anonymous_body:
                        for method in sub.anonymous_body.methods:
                            if method.body is not None:
                                yield from walk_statements(
                                    (method.body,), into_types=into_types,
                                    into_lambdas=into_lambdas)
                    if into_lambdas and isinstance(sub, Lambda):
                        if isinstance(sub.body, Statement):
                            yield from walk_statements(
                                (sub.body,), into_types=into_types,
                                into_lambdas=into_lambdas)


def method_statements(method: MethodDeclaration):
    """Statements belonging to the method's own body (nested types and
    deferred lambda bodies excluded)."""
    if method.body is None:
        return
    yield from walk_statements(method.body.statements)


def _anonymous_types_in(expr: Expression) -> list[TypeDeclaration]:
    found = []
    for sub in walk_expression(expr):
        if isinstance(sub, ObjectCreation) and sub.anonymous_body is not None:
            found.append(sub.anonymous_body)
        if isinstance(sub, Lambda) and isinstance(sub.body, Statement):
            for stmt in walk_statements((sub.body,)):
                for e in statement_expressions(stmt):
                    found.extend(_anonymous_types_in(e))
    return found


def direct_member_types(decl: TypeDeclaration) -> list[TypeDeclaration]:
    """Types declared directly inside `decl`: named nested types plus
    anonymous classes appearing in its field initializers and method bodies,
    in document order."""
    return _direct_member_types(decl)


def _direct_member_types(decl: TypeDeclaration) -> list[TypeDeclaration]:
    members: list[TypeDeclaration] = list(decl.nested_types)
    for fld in decl.fields:
        if fld.initializer is not None:
            members.extend(_anonymous_types_in(fld.initializer))
    for method in decl.methods:
        if method.body is None:
            continue
        for stmt in walk_statements(method.body.statements):
            for expr in statement_expressions(stmt):
                members.extend(_anonymous_types_in(expr))
    members.sort(key=lambda t: t.span.start.key())
    return members


def iter_listener_capable_types(unit: CompilationUnit):
    """Yield every top-level, nested, and anonymous type exactly once, in
    document order."""
    def visit(decl: TypeDeclaration):
        yield decl
        for member in _direct_member_types(decl):
            yield from visit(member)

    for decl in unit.types:
        yield from visit(decl)


def conditional_statements(statements) -> list[Statement]:
    """All If/Switch statements under `statements`, document order, staying
    within the enclosing method (no descent into nested classes/lambdas)."""
    return [s for s in walk_statements(statements) if isinstance(s, (If, Switch))]


def simple_name(type_name: str) -> str:
    """Last segment of a possibly qualified type name, array suffix kept."""
    return type_name.rsplit(".", 1)[-1]
