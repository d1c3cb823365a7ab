"""Finite measurable spaces and their (non-associative) products.

A space expression is either a named base space with an ordered list of
distinct atom labels, the one-atom unit space, or a binary product of two
space expressions.  Products are kept as explicit binary trees: (A x B) x C
and A x (B x C) are different spaces, related only by an explicit rebracketing
kernel.  Equality is structural and atom order is part of a space's identity.

Atoms are plain Python values: strings for base-space atoms, the string "()"
for the unit atom, and nested pairs (left_atom, right_atom) for product atoms.
Product atoms are enumerated in row-major order, left index varying slowest.
"""

from __future__ import annotations

from .errors import SpaceMismatch

__all__ = [
    "FiniteSpace",
    "SpaceExpr",
    "Base",
    "Product",
    "Unit",
    "UNIT",
    "product_space",
    "format_atom",
]

UNIT_ATOM = "()"


class FiniteSpace:
    """A named finite space: an ordered tuple of pairwise-distinct labels."""

    __slots__ = ("name", "labels")

    def __init__(self, name: str, labels):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise SpaceMismatch(f"space {name!r} has duplicate atom labels")
        self.name = name
        self.labels = labels

    def __eq__(self, other):
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        return self.name == other.name and self.labels == other.labels

    def __hash__(self):
        return hash((self.name, self.labels))

    def __repr__(self):
        return f"FiniteSpace({self.name!r}, {list(self.labels)!r})"


class SpaceExpr:
    """Base class for space expressions.  Instances are immutable."""

    __slots__ = ("atoms", "_index")

    def _finish(self, atoms):
        self.atoms = atoms
        self._index = {atom: i for i, atom in enumerate(atoms)}

    @property
    def size(self) -> int:
        return len(self.atoms)

    def index_of(self, atom) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise SpaceMismatch(
                f"atom {format_atom(atom)} does not belong to space {self}"
            ) from None

    def __contains__(self, atom) -> bool:
        return atom in self._index

    def __hash__(self):
        return hash(self._key())

    def __eq__(self, other):
        if not isinstance(other, SpaceExpr):
            return NotImplemented
        return self._key() == other._key()

    def _key(self):
        raise NotImplementedError

    def leaves(self):
        """Ordered tuple of Base/Unit leaves of the product tree."""
        raise NotImplementedError


class Base(SpaceExpr):
    __slots__ = ("space",)

    def __init__(self, space: FiniteSpace):
        self.space = space
        self._finish(space.labels)

    def _key(self):
        return ("base", self.space.name, self.space.labels)

    def leaves(self):
        return (self,)

    def __str__(self):
        return self.space.name

    def __repr__(self):
        return f"Base({self.space!r})"


class Unit(SpaceExpr):
    __slots__ = ()

    def __init__(self):
        self._finish((UNIT_ATOM,))

    def _key(self):
        return ("unit",)

    def leaves(self):
        return (self,)

    def __str__(self):
        return "unit"

    def __repr__(self):
        return "Unit()"


UNIT = Unit()


class Product(SpaceExpr):
    __slots__ = ("left", "right")

    def __init__(self, left: SpaceExpr, right: SpaceExpr):
        self.left = left
        self.right = right
        self._finish(tuple((a, b) for a in left.atoms for b in right.atoms))

    def _key(self):
        return ("product", self.left._key(), self.right._key())

    def leaves(self):
        return self.left.leaves() + self.right.leaves()

    def __str__(self):
        return f"({self.left} x {self.right})"

    def __repr__(self):
        return f"Product({self.left!r}, {self.right!r})"


def product_space(a: SpaceExpr, b: SpaceExpr) -> Product:
    return Product(a, b)


def format_atom(atom) -> str:
    """Render an atom the way the .kd format writes it."""
    if isinstance(atom, tuple):
        return f"({format_atom(atom[0])},{format_atom(atom[1])})"
    return atom


def flatten_atom(space: SpaceExpr, atom):
    """Yield the leaf atoms of a (possibly nested) product atom, in order."""
    if isinstance(space, Product):
        yield from flatten_atom(space.left, atom[0])
        yield from flatten_atom(space.right, atom[1])
    else:
        yield atom


def build_atom(space: SpaceExpr, leaf_iter):
    """Rebuild a nested atom of `space` from an iterator of leaf atoms."""
    if isinstance(space, Product):
        left = build_atom(space.left, leaf_iter)
        right = build_atom(space.right, leaf_iter)
        return (left, right)
    return next(leaf_iter)
