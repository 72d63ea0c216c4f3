"""Locate GUI listener methods and keep the ones containing conditionals.

A listener method is a method whose owner type reaches a catalog listener
interface through its declared supertypes and whose signature matches one
of that interface's handler signatures. A conditional listener additionally
contains at least one if/switch anywhere in its body; those are the only
listeners that can dispatch over multiple widgets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import ToolkitCatalog, is_listener_subtype
from .nodes import (CompilationUnit, MethodDeclaration, Span, Statement,
                    TypeDeclaration, conditional_statements,
                    iter_listener_capable_types, simple_name)
from .universe import TypeUniverse


@dataclass(frozen=True, eq=False)
class ListenerMethod:
    owner: TypeDeclaration
    interface: str
    method: MethodDeclaration
    span: Span
    unit: CompilationUnit


@dataclass(frozen=True, eq=False)
class ConditionalListener:
    listener: ListenerMethod
    conditional_statements: tuple[Statement, ...]


def find_listener_methods(units, catalog: ToolkitCatalog,
                          universe: TypeUniverse | None = None) -> list[ListenerMethod]:
    """Every method (including in anonymous and lambda-derived classes)
    matching a handler signature of a listener interface its owner
    implements. Deterministic order: file path, then position, then
    interface name."""
    units = list(units)
    if universe is None:
        universe = TypeUniverse(units)
    found: list[ListenerMethod] = []
    for unit in units:
        for decl in iter_listener_capable_types(unit):
            interfaces = is_listener_subtype(decl, catalog, universe)
            if not interfaces:
                continue
            for iface in sorted(interfaces):
                signatures = catalog.handler_signatures(iface)
                for method in decl.methods:
                    if _matches_any(method, signatures):
                        found.append(ListenerMethod(
                            decl, iface, method, method.span, unit))
    found.sort(key=lambda lm: (lm.unit.file, lm.span.start.key(), lm.interface))
    return found


def _matches_any(method: MethodDeclaration, signatures) -> bool:
    if len(method.parameters) != 1:
        return False
    param_type = simple_name(method.parameters[0][1])
    return any(method.name == sig.method_name and
               param_type == simple_name(sig.event_param_type)
               for sig in signatures)


def find_conditional_listeners(methods) -> list[ConditionalListener]:
    """Listeners whose body contains at least one if/switch at any nesting
    depth; bodiless methods are skipped. Conditionals are listed in
    document order."""
    out: list[ConditionalListener] = []
    for lm in methods:
        if lm.method.body is None:
            continue
        conds = conditional_statements(lm.method.body.statements)
        if conds:
            out.append(ConditionalListener(lm, tuple(conds)))
    return out
