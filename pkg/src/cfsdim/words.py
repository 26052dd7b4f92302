"""Finite words over the symbol set and their block decomposition.

Maps sharing a fixed point commute, so a word acts through its block
structure only: the sequence of maximal same-group runs with per-member
occurrence counts.  Two words compose to the identical similarity whenever
their block signatures agree, which is exactly the exact-overlap relation
of these systems.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

from .ifs import (AffineMap1D, BudgetExceeded, CFSystem, ProbVector, Symbol,
                  map_of)

DEFAULT_ENUM_BUDGET = 10**8


class EmptyWord(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    symbols: Tuple[Symbol, ...]

    def __init__(self, symbols: Sequence[Symbol]):
        object.__setattr__(self, "symbols", tuple(symbols))

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    @classmethod
    def of(cls, *pairs) -> "Word":
        """Word.of((1,1),(2,1)) convenience constructor."""
        return cls([Symbol(i, j) for i, j in pairs])

    def to_json(self) -> list:
        return [[s.group, s.member] for s in self.symbols]


@dataclass(frozen=True)
class Block:
    """A maximal run of one group: per-member occurrence counts.

    ``counts`` is sorted by member index; member order inside the run is
    irrelevant because the maps commute.
    """

    group: int
    counts: Tuple[Tuple[int, int], ...]  # ((member, count), ...), member-sorted

    @property
    def length(self) -> int:
        return sum(c for _, c in self.counts)


@dataclass(frozen=True)
class BlockSignature:
    blocks: Tuple[Block, ...]

    def __len__(self):
        return len(self.blocks)

    @property
    def word_length(self) -> int:
        return sum(b.length for b in self.blocks)

    def to_json(self) -> list:
        return [{"group": b.group, "counts": dict(b.counts)} for b in self.blocks]

    def representative(self) -> Word:
        """One word in the class: members emitted in sorted order per block."""
        syms = []
        for b in self.blocks:
            for member, count in b.counts:
                syms.extend([Symbol(b.group, member)] * count)
        return Word(syms)


def decompose(w: Word) -> BlockSignature:
    """Unique block representation: maximal same-group runs with counts."""
    blocks = []
    for group, run in itertools.groupby(w.symbols, key=lambda s: s.group):
        counts: dict = {}
        for s in run:
            counts[s.member] = counts.get(s.member, 0) + 1
        blocks.append(Block(group, tuple(sorted(counts.items()))))
    return BlockSignature(tuple(blocks))


def same_block_structure(w1: Word, w2: Word) -> bool:
    return decompose(w1) == decompose(w2)


def compose(sys: CFSystem, w: Word) -> AffineMap1D:
    """Left-to-right composition f_{w_1} o f_{w_2} o ... o f_{w_n}."""
    if len(w) == 0:
        raise EmptyWord("cannot compose the empty word")
    result = map_of(sys, w.symbols[0])
    for s in w.symbols[1:]:
        result = result.compose(map_of(sys, s))
    return result


def project(sys: CFSystem, w: Word):
    """Natural projection of a finite word, Pi(w) = f_w(0), via the block
    telescoping formula.  Agrees with compose(sys, w).intercept."""
    if len(w) == 0:
        raise EmptyWord("cannot project the empty word")
    sig = decompose(w)
    one = Fraction(1) if sys.mode == "rational" else 1.0
    blocks = sig.blocks

    def block_ratio(b: Block):
        lam = one
        for member, count in b.counts:
            lam *= sys.ratios[b.group - 1][member - 1] ** count
        return lam

    t_prev = sys.fixed_points[blocks[0].group - 1]
    value = t_prev
    scale = one
    for prev, nxt in zip(blocks, blocks[1:]):
        scale *= block_ratio(prev)
        t_next = sys.fixed_points[nxt.group - 1]
        value += scale * (t_next - t_prev)
        t_prev = t_next
    # f_w(0): telescope ends at 0 rather than at a fixed point
    scale *= block_ratio(blocks[-1])
    value -= scale * t_prev
    return value


def count_vector(w: Word) -> dict:
    """Per-symbol occurrence counts {(group, member): count}."""
    counts: dict = {}
    for s in w.symbols:
        key = (s.group, s.member)
        counts[key] = counts.get(key, 0) + 1
    return counts


def class_weight(sig: BlockSignature, p: ProbVector):
    """Total p-weight of all words sharing this signature.

    Equals p_w times the product over blocks of |b|! / prod (counts!).
    Multinomials go through log-space in float mode; exact in rational mode.
    """
    if p.mode == "rational":
        total = Fraction(1)
        for b in sig.blocks:
            total *= math.factorial(b.length)
            for member, count in b.counts:
                total /= math.factorial(count)
                total *= p.weights[b.group - 1][member - 1] ** count
        return total
    log_total = 0.0
    for b in sig.blocks:
        log_total += math.lgamma(b.length + 1)
        for member, count in b.counts:
            log_total -= math.lgamma(count + 1)
            w = p.weights[b.group - 1][member - 1]
            if w == 0.0:
                return 0.0
            log_total += count * math.log(w)
    return math.exp(log_total)


def enumerate_words(sys: CFSystem, n: int,
                    budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[Word]:
    """All words of length n in lexicographic order."""
    L = sys.n_maps
    if L**n > budget:
        raise BudgetExceeded(f"L^n = {L}^{n} exceeds budget {budget}")
    alphabet = sys.symbols()
    for combo in itertools.product(alphabet, repeat=n):
        yield Word(combo)


def _block_count_vectors(n_members: int, length: int):
    """Compositions of ``length`` into n_members nonnegative parts."""
    if n_members == 1:
        yield (length,)
        return
    for head in range(length + 1):
        for rest in _block_count_vectors(n_members - 1, length - head):
            yield (head,) + rest


def enumerate_signatures(sys: CFSystem, n: int,
                         budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[BlockSignature]:
    """All block signatures realized by words of length n, each once."""
    sizes = sys.group_sizes
    N = len(sizes)
    emitted = 0

    def rec(remaining: int, prev_group: int, acc: list):
        nonlocal emitted
        if remaining == 0:
            emitted += 1
            if emitted > budget:
                raise BudgetExceeded(f"signature budget {budget} exceeded")
            yield BlockSignature(tuple(acc))
            return
        for g in range(1, N + 1):
            if g == prev_group:
                continue
            for length in range(1, remaining + 1):
                for cv in _block_count_vectors(sizes[g - 1], length):
                    counts = tuple((j + 1, c) for j, c in enumerate(cv) if c > 0)
                    if not counts:
                        continue
                    acc.append(Block(g, counts))
                    yield from rec(remaining - length, g, acc)
                    acc.pop()

    if n == 0:
        yield BlockSignature(())
        return
    yield from rec(n, 0, [])
