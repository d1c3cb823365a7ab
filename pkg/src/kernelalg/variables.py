"""Random variables, real-valued observables and partition sigma-algebras."""

from __future__ import annotations

from fractions import Fraction

from .errors import SpaceMismatch
from .spaces import Product, SpaceExpr, format_atom

__all__ = ["RandomVariable", "RealRV", "PartitionSigma", "pair_rv"]


class RandomVariable:
    """A total map from domain atoms to codomain atoms."""

    __slots__ = ("domain", "codomain", "table")

    def __init__(self, domain: SpaceExpr, codomain: SpaceExpr, table):
        table = dict(table)
        for atom in domain.atoms:
            if atom not in table:
                raise SpaceMismatch(
                    f"map undefined on atom {format_atom(atom)} of {domain}"
                )
            if table[atom] not in codomain:
                raise SpaceMismatch(
                    f"image {format_atom(table[atom])} not an atom of {codomain}"
                )
        if len(table) != domain.size:
            extra = [a for a in table if a not in domain]
            raise SpaceMismatch(
                f"map defined on atoms outside {domain}: "
                + ", ".join(format_atom(a) for a in extra)
            )
        self.domain = domain
        self.codomain = codomain
        self.table = table

    @classmethod
    def from_function(cls, domain, codomain, fn) -> "RandomVariable":
        return cls(domain, codomain, {a: fn(a) for a in domain.atoms})

    @classmethod
    def identity(cls, space: SpaceExpr) -> "RandomVariable":
        return cls(space, space, {a: a for a in space.atoms})

    def __call__(self, atom):
        return self.table[atom]

    def preimage(self, atoms) -> list:
        """Domain atoms mapped into the given set of codomain atoms."""
        atoms = set(atoms)
        return [a for a in self.domain.atoms if self.table[a] in atoms]

    def __eq__(self, other):
        if not isinstance(other, RandomVariable):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and self.table == other.table
        )

    def __repr__(self):
        return f"RandomVariable({self.domain} -> {self.codomain})"


def pair_rv(x: RandomVariable, y: RandomVariable) -> RandomVariable:
    """The map omega -> (X(omega), Y(omega)) into the product codomain."""
    if x.domain != y.domain:
        raise SpaceMismatch(f"cannot pair maps on {x.domain} and {y.domain}")
    cod = Product(x.codomain, y.codomain)
    return RandomVariable(
        x.domain, cod, {a: (x.table[a], y.table[a]) for a in x.domain.atoms}
    )


class RealRV:
    """A real-valued observable: one exact signed rational per domain atom."""

    __slots__ = ("domain", "values")

    def __init__(self, domain: SpaceExpr, values):
        values = tuple(Fraction(v) for v in values)
        if len(values) != domain.size:
            raise SpaceMismatch(
                f"space {domain} has {domain.size} atoms, got {len(values)} values"
            )
        self.domain = domain
        self.values = values

    @classmethod
    def from_dict(cls, domain, mapping) -> "RealRV":
        mapping = dict(mapping)
        values = [mapping.pop(a, Fraction(0)) for a in domain.atoms]
        if mapping:
            raise SpaceMismatch(
                "values given for atoms outside "
                + str(domain)
                + ": "
                + ", ".join(format_atom(a) for a in mapping)
            )
        return cls(domain, values)

    def value(self, atom) -> Fraction:
        return self.values[self.domain.index_of(atom)]

    def mean(self, measure) -> Fraction:
        """Exact expectation under a measure on the same space."""
        if measure.space != self.domain:
            raise SpaceMismatch(
                f"observable on {self.domain}, measure on {measure.space}"
            )
        total = Fraction(0)
        for w, v in zip(measure.weights, self.values):
            if not w.is_zero():
                total += w.as_fraction() * v
        return total

    def items(self):
        return zip(self.domain.atoms, self.values)

    def __eq__(self, other):
        if not isinstance(other, RealRV):
            return NotImplemented
        return self.domain == other.domain and self.values == other.values

    def __repr__(self):
        return f"RealRV({self.domain}, {len(self.values)} values)"


class PartitionSigma:
    """A sub-sigma-algebra of a finite space, given by its atom partition."""

    __slots__ = ("space", "blocks", "_block_of")

    def __init__(self, space: SpaceExpr, blocks):
        blocks = tuple(tuple(b) for b in blocks)
        seen = {}
        for bi, block in enumerate(blocks):
            if not block:
                raise SpaceMismatch("partition blocks must be nonempty")
            for atom in block:
                space.index_of(atom)  # membership check
                if atom in seen:
                    raise SpaceMismatch(
                        f"atom {format_atom(atom)} appears in two partition blocks"
                    )
                seen[atom] = bi
        if len(seen) != space.size:
            missing = [a for a in space.atoms if a not in seen]
            raise SpaceMismatch(
                "partition does not cover: "
                + ", ".join(format_atom(a) for a in missing)
            )
        self.space = space
        self.blocks = blocks
        self._block_of = seen

    @classmethod
    def trivial(cls, space: SpaceExpr) -> "PartitionSigma":
        return cls(space, [space.atoms] if space.size else [])

    @classmethod
    def discrete(cls, space: SpaceExpr) -> "PartitionSigma":
        return cls(space, [(a,) for a in space.atoms])

    @classmethod
    def generated_by(cls, rv: RandomVariable) -> "PartitionSigma":
        """Blocks are the nonempty fibers of the map, in codomain atom order."""
        fibers = []
        for value in rv.codomain.atoms:
            fiber = [a for a in rv.domain.atoms if rv.table[a] == value]
            if fiber:
                fibers.append(fiber)
        return cls(rv.domain, fibers)

    def block_index(self, atom) -> int:
        try:
            return self._block_of[atom]
        except KeyError:
            raise SpaceMismatch(
                f"atom {format_atom(atom)} not in partitioned space {self.space}"
            ) from None

    def block_of(self, atom) -> tuple:
        return self.blocks[self.block_index(atom)]

    def __eq__(self, other):
        if not isinstance(other, PartitionSigma):
            return NotImplemented
        return self.space == other.space and set(
            frozenset(b) for b in self.blocks
        ) == set(frozenset(b) for b in other.blocks)

    def __repr__(self):
        return f"PartitionSigma({self.space}, {len(self.blocks)} blocks)"
