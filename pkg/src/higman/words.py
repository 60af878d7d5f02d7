"""Free-group word mechanics over the generators a, b, c, d.

Words come in two interchangeable forms:

* flat text, one character per letter: lowercase for a generator,
  uppercase for its inverse ("aBc" means a * b^-1 * c);
* block form, a sequence of (generator, exponent) pairs with nonzero
  arbitrary-precision exponents and distinct adjacent generators.

Block form is the internal workhorse: several constructions here produce
words whose exponents are towers of twos and can never be spelled out
flat.
"""

from __future__ import annotations

import json
import random
from typing import Iterable, Iterator, Optional, Sequence

GENERATORS = "abcd"
ALPHABET = "abcdABCD"

_INVERT = str.maketrans("abcdABCD", "ABCDabcd")
_PSI = str.maketrans("abcdABCD", "bcdaBCDA")


def invert_flat(word: str) -> str:
    """Inverse of a flat word."""
    return word[::-1].translate(_INVERT)


def gen_of(letter: str) -> str:
    return letter.lower()


def sign_of(letter: str) -> int:
    return -1 if letter.isupper() else 1


def letter(gen: str, sign: int) -> str:
    return gen if sign > 0 else gen.upper()


def validate_flat(word: str) -> None:
    for ch in word:
        if ch not in ALPHABET:
            raise ValueError(f"invalid letter {ch!r}; expected one of {ALPHABET}")


class BlockWord:
    """A freely reduced word stored as maximal runs (gen, exponent).

    Adjacent blocks always carry distinct generators and no exponent is
    zero, so the flat expansion is freely reduced by construction.
    """

    __slots__ = ("blocks",)

    def __init__(self, blocks: Iterable[tuple[str, int]] = ()):
        self.blocks: tuple[tuple[str, int], ...] = tuple(_merge_blocks(blocks))

    @classmethod
    def from_flat(cls, word: str) -> "BlockWord":
        validate_flat(word)
        return cls((gen_of(ch), sign_of(ch)) for ch in word)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence]) -> "BlockWord":
        return cls((str(g), int(e)) for g, e in pairs)

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __bool__(self) -> bool:
        return bool(self.blocks)

    def __eq__(self, other) -> bool:
        return isinstance(other, BlockWord) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __mul__(self, other: "BlockWord") -> "BlockWord":
        return BlockWord(self.blocks + other.blocks)

    def inverse(self) -> "BlockWord":
        return BlockWord((g, -e) for g, e in reversed(self.blocks))

    def letter_length(self) -> int:
        return sum(abs(e) for _, e in self.blocks)

    def exponent_sum(self, gen: str) -> int:
        return sum(e for g, e in self.blocks if g == gen)

    def to_flat(self) -> str:
        """Flat expansion; refuse anything astronomically long."""
        if self.letter_length() > 10**6:
            raise OverflowError("word too long to expand; keep it in block form")
        return "".join(letter(g, 1 if e > 0 else -1) * abs(e) for g, e in self.blocks)

    def to_text(self) -> str:
        """Human-readable block syntax, e.g. 'a^3 c^-12'."""
        if not self.blocks:
            return "1"
        parts = []
        for g, e in self.blocks:
            parts.append(g if e == 1 else f"{g}^{e}")
        return " ".join(parts)

    def to_json(self) -> str:
        return json.dumps([[g, e] for g, e in self.blocks])

    def __repr__(self) -> str:
        return f"BlockWord({self.to_text()!r})"


def _merge_blocks(blocks) -> list[tuple[str, int]]:
    # Stack merge: the adjacent-distinct invariant of `out` guarantees a
    # cancelled block never exposes another block of the incoming generator.
    out: list[tuple[str, int]] = []
    for gen, exp in blocks:
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            total = out[-1][1] + exp
            out.pop()
            if total:
                out.append((gen, total))
        else:
            out.append((gen, exp))
    return out


def free_reduce(word) -> BlockWord:
    """Freely reduce a word given flat or in blocks."""
    if isinstance(word, BlockWord):
        return BlockWord(word.blocks)
    if isinstance(word, str):
        return BlockWord.from_flat(word)
    return BlockWord(word)


def cyclic_reduce(word) -> tuple[BlockWord, BlockWord]:
    """Split w = conj * core * conj^-1 with core cyclically reduced."""
    w = free_reduce(word)
    blocks = list(w.blocks)
    prefix: list[tuple[str, int]] = []
    while len(blocks) >= 2 and blocks[0][0] == blocks[-1][0]:
        g, e0 = blocks[0]
        _, e1 = blocks[-1]
        if e0 + e1 == 0:
            prefix.append(blocks.pop(0))
            blocks.pop()
        else:
            # cancel the shorter end into the longer one
            strip = -e1 if abs(e1) < abs(e0) else e0
            if strip == 0:
                break
            prefix.append((g, strip))
            blocks[0] = (g, e0 - strip)
            blocks[-1] = (g, e1 + strip)
            blocks = [b for b in blocks if b[1] != 0]
    return BlockWord(blocks), BlockWord(prefix)


def prefix_blocks(word: BlockWord, i: int) -> BlockWord:
    """First i blocks; the whole word past the end, empty for i <= 0."""
    if i <= 0:
        return BlockWord()
    return BlockWord(word.blocks[:i])


def is_dyck(word, axis: str) -> tuple[bool, list[int]]:
    """Test the one-sided balance condition over {a, c}.

    A word qualifies for the given axis when its axis-exponent sum is
    zero and the running axis-exponent never dips below zero.  Also
    returns the height at which each non-axis block sits.
    """
    if axis not in ("a", "c"):
        raise ValueError("axis must be 'a' or 'c'")
    w = free_reduce(word)
    heights: list[int] = []
    h = 0
    ok = True
    for g, e in w.blocks:
        if g not in ("a", "c"):
            raise ValueError(f"letter {g!r} outside the a/c alphabet")
        if g == axis:
            if min(h, h + e) < 0:
                ok = False
            h += e
        else:
            heights.append(h)
            if h < 0:
                ok = False
    return (ok and h == 0), heights


def apply_psi(word: str, k: int = 1) -> str:
    """Apply the order-4 symmetry a -> b -> c -> d -> a letterwise, k times."""
    validate_flat(word)
    for _ in range(k % 4):
        word = word.translate(_PSI)
    return word


def psi_blocks(word: BlockWord, k: int = 1) -> BlockWord:
    table = "abcd"
    k %= 4
    return BlockWord((table[(table.index(g) + k) % 4], e) for g, e in word.blocks)


class WordSampler:
    """Deterministic seeded sampler over the eight-letter alphabet."""

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def uniform(self, n: int) -> str:
        return "".join(self.rng.choice(ALPHABET) for _ in range(n))

    def reduced(self, n: int) -> str:
        """Uniform over the 8 * 7^(n-1) freely reduced words of length n."""
        if n == 0:
            return ""
        out = [self.rng.choice(ALPHABET)]
        for _ in range(n - 1):
            banned = out[-1].swapcase()
            choices = [ch for ch in ALPHABET if ch != banned]
            out.append(self.rng.choice(choices))
        return "".join(out)

    def cyclically_reduced(self, n: int) -> str:
        # Rejection from reduced words; acceptance is at least 6/7.
        while True:
            w = self.reduced(n)
            if n < 2 or w[0] != w[-1].swapcase():
                return w


def sample_word(n: int, mode: str = "uniform", seed: int = 0) -> str:
    sampler = WordSampler(seed)
    if mode == "uniform":
        return sampler.uniform(n)
    if mode == "reduced":
        return sampler.reduced(n)
    if mode == "cyclically_reduced":
        return sampler.cyclically_reduced(n)
    raise ValueError(f"unknown sampling mode {mode!r}")


def parse_word(text: str) -> BlockWord:
    """Parse CLI word syntax: letters from a..d / A..D, optional ^exponent."""
    text = text.strip()
    if text in ("", "1"):
        return BlockWord()
    blocks: list[tuple[str, int]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch not in ALPHABET:
            raise ValueError(f"parse error at position {i}: unexpected {ch!r}")
        i += 1
        exp = sign_of(ch)
        if i < len(text) and text[i] == "^":
            i += 1
            j = i
            if j < len(text) and text[j] in "+-":
                j += 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i or not text[i:j].lstrip("+-"):
                raise ValueError(f"parse error at position {i}: missing exponent")
            exp *= int(text[i:j])
            i = j
        blocks.append((gen_of(ch), exp))
    return BlockWord(blocks)
