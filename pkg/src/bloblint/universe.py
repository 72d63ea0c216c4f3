"""Index of every type declared in the analyzed sources.

Subtype and field-type questions are answered against source declarations
only; there is no classpath. Simple names resolve preferentially within the
same unit, then the same package, then uniquely across all units.
"""

from __future__ import annotations

from .nodes import (CompilationUnit, TypeDeclaration, direct_member_types,
                    simple_name)


class TypeUniverse:
    def __init__(self, units):
        self.units: list[CompilationUnit] = list(units)
        self._unit_of: dict[TypeDeclaration, CompilationUnit] = {}
        self._enclosing: dict[TypeDeclaration, TypeDeclaration | None] = {}
        self._by_qualified: dict[str, TypeDeclaration] = {}
        self._by_simple: dict[str, list[TypeDeclaration]] = {}
        for unit in self.units:
            for top in unit.types:
                self._register(top, None, unit)

    def _register(self, decl: TypeDeclaration,
                  parent: TypeDeclaration | None,
                  unit: CompilationUnit) -> None:
        self._unit_of[decl] = unit
        self._enclosing[decl] = parent
        self._by_qualified.setdefault(decl.qualified_name, decl)
        self._by_simple.setdefault(decl.name, []).append(decl)
        for member in direct_member_types(decl):
            self._register(member, decl, unit)

    def all_types(self):
        return iter(self._unit_of)

    def unit_of(self, decl: TypeDeclaration) -> CompilationUnit | None:
        return self._unit_of.get(decl)

    def enclosing_chain(self, decl: TypeDeclaration):
        """Yield `decl` and then its enclosing types, innermost first."""
        current: TypeDeclaration | None = decl
        while current is not None:
            yield current
            current = self._enclosing.get(current)

    def resolve(self, name: str,
                from_unit: CompilationUnit | None = None) -> TypeDeclaration | None:
        name = name.rstrip("[]")
        if not name:
            return None
        if "." in name:
            found = self._by_qualified.get(name)
            if found is not None:
                return found
            name = simple_name(name)
        candidates = self._by_simple.get(name, [])
        if not candidates:
            return None
        if from_unit is not None:
            same_unit = [c for c in candidates if self._unit_of.get(c) is from_unit]
            if len(same_unit) >= 1:
                return same_unit[0]
            package = from_unit.package_name
            same_pkg = [c for c in candidates
                        if (u := self._unit_of.get(c)) is not None
                        and u.package_name == package]
            if len(same_pkg) == 1:
                return same_pkg[0]
        if len(candidates) == 1:
            return candidates[0]
        return None
