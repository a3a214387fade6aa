"""Finitely generated groups as words over finite symmetric generating sets.

Three families are supported: free abelian groups Z^k, free groups F_k and
the solvable group <a, b | ba = a^2 b>, the latter represented faithfully by
affine maps x -> 2^k x + t with t an exact dyadic rational.  Word lengths are
exact Cayley-graph distances, computed by breadth-first search with the
normal form as visited-set key.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, ResourceBudgetError

INVERSE_SUFFIX = "^-1"

DEFAULT_NODE_BUDGET = 500_000


def inverse_symbol(sym: str) -> str:
    """Involution on generator symbols: s <-> s^-1."""
    if sym.endswith(INVERSE_SUFFIX):
        return sym[: -len(INVERSE_SUFFIX)]
    return sym + INVERSE_SUFFIX


class GroupFamily:
    """Abstract multiplication table on family-specific normal forms."""

    name = "abstract"

    def identity(self):
        raise NotImplementedError

    def multiply(self, a, b):
        raise NotImplementedError

    def invert(self, a):
        raise NotImplementedError

    def key(self, nf) -> str:
        """Canonical hashable/sortable encoding of a normal form."""
        raise NotImplementedError


class FreeAbelian(GroupFamily):
    """Z^k; normal forms are exponent vectors."""

    name = "free_abelian"

    def __init__(self, rank: int):
        if rank < 1:
            raise InputError("rank must be >= 1")
        self.rank = rank

    def identity(self):
        return (0,) * self.rank

    def multiply(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def invert(self, a):
        return tuple(-x for x in a)

    def key(self, nf):
        return ",".join(str(x) for x in nf)


class Free(GroupFamily):
    """F_k; normal forms are reduced words of signed letter indices (1-based)."""

    name = "free"

    def __init__(self, rank: int):
        if rank < 1:
            raise InputError("rank must be >= 1")
        self.rank = rank

    def identity(self):
        return ()

    def multiply(self, a, b):
        out = list(a)
        for letter in b:
            if out and out[-1] == -letter:
                out.pop()
            else:
                out.append(letter)
        return tuple(out)

    def invert(self, a):
        return tuple(-x for x in reversed(a))

    def key(self, nf):
        return ",".join(str(x) for x in nf)


class SolvableBS(GroupFamily):
    """The group <a, b | ba = a^2 b> of affine maps x -> 2^k x + t.

    Normal forms are pairs (k, t) with k an integer and t an exact dyadic
    rational; the representation is faithful, so equality of pairs solves
    the word problem in constant time.
    """

    name = "solvable_bs"

    def identity(self):
        return (0, Fraction(0))

    def multiply(self, a, b):
        # composition of affine maps: (g1 g2)(x) = g1(g2(x))
        k1, t1 = a
        k2, t2 = b
        return (k1 + k2, Fraction(2) ** k1 * t2 + t1)

    def invert(self, a):
        k, t = a
        return (-k, -t * Fraction(2) ** -k)

    def key(self, nf):
        k, t = nf
        return f"{k}|{t}"


@dataclass(frozen=True, eq=False)
class GeneratingSet:
    """Finite symmetric generating set: symbols with values in the group.

    ``symbols`` lists every symbol including inverses; ``values`` maps each
    symbol to its normal form.  Symmetry (s^-1 present and consistent) is
    enforced at construction.
    """

    family: GroupFamily
    symbols: tuple
    values: dict

    def __post_init__(self):
        if not self.symbols:
            raise InputError("generating set must be nonempty")
        fam = self.family
        for sym in self.symbols:
            inv = inverse_symbol(sym)
            if inv not in self.values:
                raise InputError(f"generating set not symmetric: missing {inv}")
            expected = fam.invert(self.values[sym])
            if fam.key(expected) != fam.key(self.values[inv]):
                raise InputError(f"value of {inv} is not the inverse of {sym}")

    def value(self, sym):
        try:
            return self.values[sym]
        except KeyError:
            raise InputError(f"unknown generator symbol: {sym!r}") from None


def generating_set(family: GroupFamily, base_values: dict) -> GeneratingSet:
    """Build a symmetric generating set from values of the positive symbols."""
    values = {}
    symbols = []
    for sym, val in base_values.items():
        inv = inverse_symbol(sym)
        values[sym] = val
        values[inv] = family.invert(val)
        symbols.extend([sym, inv])
    return GeneratingSet(family=family, symbols=tuple(symbols), values=values)


def standard_generating_set(family: GroupFamily) -> GeneratingSet:
    if isinstance(family, FreeAbelian):
        base = {}
        for i in range(family.rank):
            vec = tuple(1 if j == i else 0 for j in range(family.rank))
            base[f"e{i + 1}"] = vec
        return generating_set(family, base)
    if isinstance(family, Free):
        return generating_set(
            family, {f"x{i + 1}": (i + 1,) for i in range(family.rank)}
        )
    if isinstance(family, SolvableBS):
        return generating_set(
            family, {"a": (0, Fraction(1)), "b": (1, Fraction(0))}
        )
    raise InputError(f"no standard generating set for {family.name}")


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A reduced word together with its family normal form.

    Equality and hashing go through the normal-form key, so two elements are
    equal exactly when they are equal in the group.
    """

    word: tuple
    normal_form: object
    key: str

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"GroupElement({'.'.join(self.word) or 'e'})"


def _free_reduce(word, genset):
    out = []
    for sym in word:
        if sym not in genset.values:
            raise InputError(f"unknown generator symbol: {sym!r}")
        if out and out[-1] == inverse_symbol(sym):
            out.pop()
        else:
            out.append(sym)
    return tuple(out)


def reduce_word(word, genset: GeneratingSet) -> GroupElement:
    """Canonical element of a generator word (the op the word problem runs on)."""
    fam = genset.family
    reduced = _free_reduce(tuple(word), genset)
    nf = fam.identity()
    for sym in reduced:
        nf = fam.multiply(nf, genset.value(sym))
    return GroupElement(word=reduced, normal_form=nf, key=fam.key(nf))


def identity_element(genset: GeneratingSet) -> GroupElement:
    fam = genset.family
    nf = fam.identity()
    return GroupElement(word=(), normal_form=nf, key=fam.key(nf))


def multiply_elements(genset: GeneratingSet, g: GroupElement, h: GroupElement) -> GroupElement:
    fam = genset.family
    nf = fam.multiply(g.normal_form, h.normal_form)
    return GroupElement(
        word=_free_reduce(g.word + h.word, genset),
        normal_form=nf,
        key=fam.key(nf),
    )


def invert_element(genset: GeneratingSet, g: GroupElement) -> GroupElement:
    fam = genset.family
    nf = fam.invert(g.normal_form)
    word = tuple(inverse_symbol(s) for s in reversed(g.word))
    return GroupElement(word=word, normal_form=nf, key=fam.key(nf))


def element_power(genset: GeneratingSet, sym: str, n: int) -> GroupElement:
    """g = s^n for a generator symbol s."""
    if n >= 0:
        return reduce_word((sym,) * n, genset)
    return reduce_word((inverse_symbol(sym),) * (-n), genset)


def _is_standard_abelian(genset: GeneratingSet) -> bool:
    fam = genset.family
    if not isinstance(fam, FreeAbelian):
        return False
    units = set()
    for sym in genset.symbols:
        vec = genset.values[sym]
        if sum(abs(v) for v in vec) != 1:
            return False
        units.add(vec)
    return len(units) == 2 * fam.rank


def _bfs(genset: GeneratingSet, target_key=None, max_depth=None,
         budget=DEFAULT_NODE_BUDGET, want_parents=False):
    """Breadth-first search from the identity by right multiplication.

    Returns (lengths, parents) keyed by normal-form key; stops when the
    target is found or max_depth is exhausted.
    """
    fam = genset.family
    ident = identity_element(genset)
    lengths = {ident.key: 0}
    nfs = {ident.key: ident.normal_form}
    parents = {}
    frontier = deque([ident.key])
    depth = 0
    while frontier:
        if target_key is not None and target_key in lengths:
            break
        if max_depth is not None and depth >= max_depth:
            break
        depth += 1
        next_frontier = deque()
        for key in frontier:
            nf = nfs[key]
            for sym in genset.symbols:
                new_nf = fam.multiply(nf, genset.value(sym))
                new_key = fam.key(new_nf)
                if new_key in lengths:
                    continue
                lengths[new_key] = depth
                nfs[new_key] = new_nf
                if want_parents:
                    parents[new_key] = (key, sym)
                next_frontier.append(new_key)
                if len(lengths) > budget:
                    raise ResourceBudgetError(
                        f"word-metric search exceeded budget of {budget} nodes"
                    )
        frontier = next_frontier
    return lengths, parents


def word_length(g: GroupElement, genset: GeneratingSet,
                budget=DEFAULT_NODE_BUDGET) -> int:
    """Exact Cayley-graph distance of g from the identity."""
    if _is_standard_abelian(genset):
        return sum(abs(v) for v in g.normal_form)
    lengths, _ = _bfs(genset, target_key=g.key, budget=budget)
    if g.key not in lengths:
        raise ResourceBudgetError(
            f"element not reached within budget of {budget} nodes"
        )
    return lengths[g.key]


def geodesic_word(g: GroupElement, genset: GeneratingSet,
                  budget=DEFAULT_NODE_BUDGET) -> tuple:
    """A geodesic word over genset multiplying to g."""
    lengths, parents = _bfs(genset, target_key=g.key, budget=budget,
                            want_parents=True)
    if g.key not in lengths:
        raise ResourceBudgetError(
            f"element not reached within budget of {budget} nodes"
        )
    word = []
    key = g.key
    while key in parents:
        key, sym = parents[key]
        word.append(sym)
    return tuple(reversed(word))


def rewrite_generator(s: GroupElement, other: GeneratingSet,
                      budget=DEFAULT_NODE_BUDGET) -> tuple:
    """Geodesic spelling of a generator over a different generating set."""
    return geodesic_word(s, other, budget=budget)


@dataclass(frozen=True, eq=False)
class CayleyBall:
    """All elements of word length <= radius, with complete internal adjacency.

    ``edges`` holds every (g, s, sg) with both endpoints in the ball, in a
    deterministic order (elements sorted by length then key, symbols in
    generating-set order).
    """

    genset: GeneratingSet
    radius: int
    elements: tuple          # sorted by (length, key)
    lengths: dict            # key -> word length
    by_key: dict             # key -> GroupElement
    edges: tuple             # (g, sym, sg) triples

    def __len__(self):
        return len(self.elements)

    def length_of(self, g: GroupElement) -> int:
        return self.lengths[g.key]

    def sub_ball(self, radius: int) -> "CayleyBall":
        if radius > self.radius:
            raise InputError("sub-ball radius exceeds ball radius")
        return cayley_ball(self.genset, radius)


def cayley_ball(genset: GeneratingSet, radius: int,
                budget=DEFAULT_NODE_BUDGET) -> CayleyBall:
    """Materialize the ball of the given radius in the Cayley graph."""
    if radius < 0:
        raise InputError("ball radius must be >= 0")
    fam = genset.family
    ident = identity_element(genset)
    info = {ident.key: (0, ident.normal_form, ())}
    frontier = deque([ident.key])
    for depth in range(1, radius + 1):
        next_frontier = deque()
        for key in frontier:
            _, nf, word = info[key]
            for sym in genset.symbols:
                # left multiplication keeps the ball aligned with edges (g, sg)
                new_nf = fam.multiply(genset.value(sym), nf)
                new_key = fam.key(new_nf)
                if new_key in info:
                    continue
                info[new_key] = (depth, new_nf, (sym,) + word)
                next_frontier.append(new_key)
                if len(info) > budget:
                    raise ResourceBudgetError(
                        f"Cayley ball exceeded budget of {budget} nodes"
                    )
        frontier = next_frontier
    elements = [
        GroupElement(word=word, normal_form=nf, key=key)
        for key, (_, nf, word) in info.items()
    ]
    elements.sort(key=lambda g: (info[g.key][0], g.key))
    lengths = {key: entry[0] for key, entry in info.items()}
    by_key = {g.key: g for g in elements}
    edges = []
    for g in elements:
        for sym in genset.symbols:
            new_nf = fam.multiply(genset.value(sym), g.normal_form)
            new_key = fam.key(new_nf)
            if new_key in by_key:
                edges.append((g, sym, by_key[new_key]))
    return CayleyBall(
        genset=genset,
        radius=radius,
        elements=tuple(elements),
        lengths=lengths,
        by_key=by_key,
        edges=tuple(edges),
    )


def generator_elements(genset: GeneratingSet):
    """The generators themselves as GroupElements, in symbol order."""
    fam = genset.family
    out = []
    for sym in genset.symbols:
        nf = genset.value(sym)
        out.append(GroupElement(word=(sym,), normal_form=nf, key=fam.key(nf)))
    return out
