"""Declarative GUI-toolkit model and the queries the analyses run on it.

A catalog says which interfaces are listeners (and their handler methods),
which types are widgets and events, which accessor methods expose event
sources and widget properties, and which methods register listeners. The
bundled `swing` catalog covers Java Swing/AWT; users can point the tool at
their own catalog file to support other toolkits.

File format (one entry per line, `#` comments, see catalogs/swing.catalog):

    [listeners]          Interface.method(EventType)     interface may be qualified
    [widgets]            Type  |  Type < SuperType
    [events]             Type
    [source_accessors]   methodName
    [property_accessors] methodName
    [state_accessors]    methodName
    [registration]       methodName -> Interface
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

from .nodes import simple_name

if TYPE_CHECKING:
    from .nodes import TypeDeclaration
    from .universe import TypeUniverse


class CatalogSyntaxError(Exception):
    """Malformed catalog document; message carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class CatalogConsistencyError(Exception):
    """A structurally valid catalog that violates an invariant."""


@dataclass(frozen=True)
class HandlerSignature:
    method_name: str
    event_param_type: str


_SECTIONS = ("listeners", "widgets", "events", "source_accessors",
             "property_accessors", "registration", "state_accessors")

_LISTENER_RE = re.compile(r"^([A-Za-z_$][\w$.]*)\.([A-Za-z_$][\w$]*)\(([A-Za-z_$][\w$.]*)\)$")
_NAME_RE = re.compile(r"^[A-Za-z_$][\w$.]*$")


class ToolkitCatalog:
    """Immutable after construction; all queries are pure."""

    def __init__(self, name: str,
                 listener_interfaces: dict[str, tuple[HandlerSignature, ...]],
                 widget_supertypes: dict[str, str | None],
                 event_types: frozenset[str],
                 source_accessors: frozenset[str],
                 property_accessors: frozenset[str],
                 registration_methods: dict[str, str],
                 state_accessors: frozenset[str]):
        self.name = name
        self.listener_interfaces = dict(listener_interfaces)
        self.widget_supertypes = dict(widget_supertypes)
        self.event_types = event_types
        self.source_accessors = source_accessors
        self.property_accessors = property_accessors
        self.registration_methods = dict(registration_methods)
        self.state_accessors = state_accessors
        self._iface_by_simple: dict[str, list[str]] = {}
        for written in self.listener_interfaces:
            self._iface_by_simple.setdefault(simple_name(written), []).append(written)
        widget_names = set(self.widget_supertypes)
        widget_names.update(s for s in self.widget_supertypes.values() if s)
        self._widget_simple = frozenset(simple_name(w) for w in widget_names)
        self._event_simple = frozenset(simple_name(e) for e in self.event_types)
        self._validate()

    def _validate(self) -> None:
        if self.source_accessors & self.property_accessors:
            overlap = sorted(self.source_accessors & self.property_accessors)
            raise CatalogConsistencyError(
                f"source_accessors and property_accessors must be disjoint: {overlap}")
        for written, sigs in self.listener_interfaces.items():
            for sig in sigs:
                if simple_name(sig.event_param_type) not in self._event_simple:
                    raise CatalogConsistencyError(
                        f"event type '{sig.event_param_type}' of "
                        f"{written}.{sig.method_name} is not declared in [events]")
        for widget in self.widget_supertypes:
            seen = {widget}
            current = self.widget_supertypes.get(widget)
            while current is not None:
                if current in seen:
                    raise CatalogConsistencyError(
                        f"widget supertype edges must be acyclic; cycle through '{current}'")
                seen.add(current)
                current = self.widget_supertypes.get(current)
        for method, iface in self.registration_methods.items():
            if not self._iface_by_simple.get(simple_name(iface)):
                raise CatalogConsistencyError(
                    f"registration '{method}' targets unknown interface '{iface}'")

    # -- queries ------------------------------------------------------------

    def handler_signatures(self, interface: str) -> tuple[HandlerSignature, ...]:
        """Handler methods of `interface` (simple or qualified name)."""
        if interface in self.listener_interfaces:
            return self.listener_interfaces[interface]
        for written in self._iface_by_simple.get(simple_name(interface), []):
            return self.listener_interfaces[written]
        return ()

    def match_listener_interface(self, name: str, imports=()) -> str | None:
        """Bind a type name as written in source to a catalog listener
        interface; returns the interface's simple name, or None.

        A simple name binds when it is unique in the catalog or when an
        import makes the binding unambiguous.
        """
        name = name.rstrip("[]")
        if "." in name:
            if name in self.listener_interfaces:
                return simple_name(name)
            tail = simple_name(name)
            for written in self._iface_by_simple.get(tail, []):
                if "." not in written:  # unqualified catalog entry
                    return tail
            return None
        candidates = self._iface_by_simple.get(name, [])
        if len(candidates) == 1:
            return name
        if len(candidates) > 1:
            for written in candidates:
                package = written.rsplit(".", 1)[0] if "." in written else None
                if package is None:
                    continue
                for imp in imports:
                    if (imp.wildcard and imp.name == package) or \
                            imp.name == f"{package}.{name}":
                        return name
        return None

    def is_widget_type(self, name: str) -> bool:
        name = name.rstrip("[]")
        if not name:
            return False
        return name in self._widget_simple or simple_name(name) in self._widget_simple

    def is_event_type(self, name: str) -> bool:
        name = name.rstrip("[]")
        if not name:
            return False
        return name in self._event_simple or simple_name(name) in self._event_simple


def is_widget_or_event_type(name: str, catalog: ToolkitCatalog) -> bool:
    """True iff `name` (simple or qualified) denotes a catalog widget type,
    one of their supertypes, or an event type."""
    return catalog.is_widget_type(name) or catalog.is_event_type(name)


def is_listener_subtype(decl: "TypeDeclaration", catalog: ToolkitCatalog,
                        universe: "TypeUniverse") -> set[str]:
    """Catalog listener interfaces reachable from `decl` through its
    declared extends/implements names, following source-declared supertypes
    transitively. Returns simple interface names; empty set when none.
    """
    matched: set[str] = set()
    seen: set[int] = {id(decl)}
    frontier = [decl]
    while frontier:
        current = frontier.pop()
        unit = universe.unit_of(current)
        imports = unit.imports if unit is not None else ()
        for name in current.extends_names + current.implements_names:
            iface = catalog.match_listener_interface(name, imports)
            if iface is not None:
                matched.add(iface)
            supertype = universe.resolve(name, unit)
            if supertype is not None and id(supertype) not in seen:
                seen.add(id(supertype))
                frontier.append(supertype)
    return matched


def unresolved_supertype_names(decl: "TypeDeclaration", catalog: ToolkitCatalog,
                               universe: "TypeUniverse") -> list[str]:
    """Supertype names that bind to neither the catalog nor any source
    declaration; surfaced as analysis notes, never as errors."""
    unit = universe.unit_of(decl)
    imports = unit.imports if unit is not None else ()
    out = []
    for name in decl.extends_names + decl.implements_names:
        if catalog.match_listener_interface(name, imports) is not None:
            continue
        if is_widget_or_event_type(name, catalog):
            continue
        if universe.resolve(name, unit) is not None:
            continue
        out.append(name)
    return out


# -- loading ----------------------------------------------------------------


def load_catalog(document: str, name: str = "custom") -> ToolkitCatalog:
    """Parse a catalog document (see module docstring for the format).

    Raises CatalogSyntaxError on malformed text and CatalogConsistencyError
    when the parsed catalog violates an invariant.
    """
    listeners: dict[str, list[HandlerSignature]] = {}
    widgets: dict[str, str | None] = {}
    events: set[str] = set()
    source_acc: set[str] = set()
    property_acc: set[str] = set()
    state_acc: set[str] = set()
    registration: dict[str, str] = {}
    section: str | None = None
    saw_section = False
    for lineno, raw in enumerate(document.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise CatalogSyntaxError(f"unknown section [{section}]", lineno)
            saw_section = True
            continue
        if section is None:
            raise CatalogSyntaxError("entry before any section header", lineno)
        if section == "listeners":
            m = _LISTENER_RE.match(line)
            if not m:
                raise CatalogSyntaxError(
                    "expected Interface.method(EventType)", lineno)
            iface, method, event = m.groups()
            listeners.setdefault(iface, []).append(HandlerSignature(method, event))
        elif section == "widgets":
            if "<" in line:
                left, _, right = line.partition("<")
                left, right = left.strip(), right.strip()
                if not _NAME_RE.match(left) or not _NAME_RE.match(right):
                    raise CatalogSyntaxError("expected Type < SuperType", lineno)
                widgets[left] = right
                widgets.setdefault(right, None)
            else:
                if not _NAME_RE.match(line):
                    raise CatalogSyntaxError("expected a type name", lineno)
                widgets.setdefault(line, None)
        elif section == "events":
            if not _NAME_RE.match(line):
                raise CatalogSyntaxError("expected a type name", lineno)
            events.add(line)
        elif section == "registration":
            left, sep, right = line.partition("->")
            if not sep:
                raise CatalogSyntaxError("expected methodName -> Interface", lineno)
            method, iface = left.strip(), right.strip()
            if not _NAME_RE.match(method) or not _NAME_RE.match(iface):
                raise CatalogSyntaxError("expected methodName -> Interface", lineno)
            registration[method] = iface
        else:
            if not _NAME_RE.match(line) or "." in line:
                raise CatalogSyntaxError("expected a method name", lineno)
            {"source_accessors": source_acc,
             "property_accessors": property_acc,
             "state_accessors": state_acc}[section].add(line)
    if not saw_section:
        raise CatalogSyntaxError("document contains no sections")
    return ToolkitCatalog(
        name=name,
        listener_interfaces={k: tuple(v) for k, v in listeners.items()},
        widget_supertypes=widgets,
        event_types=frozenset(events),
        source_accessors=frozenset(source_acc),
        property_accessors=frozenset(property_acc),
        registration_methods=registration,
        state_accessors=frozenset(state_acc),
    )


_BUNDLED_DIR = Path(__file__).parent / "catalogs"


def bundled_catalog_names() -> list[str]:
    return sorted(p.stem for p in _BUNDLED_DIR.glob("*.catalog"))


def load_bundled_catalog(name: str) -> ToolkitCatalog:
    path = _BUNDLED_DIR / f"{name}.catalog"
    if not path.is_file():
        raise CatalogSyntaxError(
            f"no bundled catalog named '{name}' (available: {bundled_catalog_names()})")
    return load_catalog(path.read_text(encoding="utf-8"), name=name)


def resolve_catalog(selector: str) -> ToolkitCatalog:
    """`selector` is a bundled catalog name or a path to a catalog file."""
    if (_BUNDLED_DIR / f"{selector}.catalog").is_file():
        return load_bundled_catalog(selector)
    path = Path(selector)
    if path.is_file():
        return load_catalog(path.read_text(encoding="utf-8"), name=path.stem)
    raise CatalogSyntaxError(
        f"catalog '{selector}' is neither a bundled name nor a readable file")
