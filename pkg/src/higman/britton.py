"""Britton reduction and normal forms for Higman's group, exact backend.

The group H = <a,b,c,d | b^a=b^2, c^b=c^2, d^c=d^2, a^d=a^2> splits as an
amalgamated product A *_C B with

    A = <a,b,c | b^a = b^2, c^b = c^2>,
    B = <c,d,a | d^c = d^2, a^d = a^2>,
    C = <a,c> free of rank 2.

A is an HNN extension of K = <b,c | c^b = c^2> (isomorphic to
Z[1/2] x| Z) with stable letter a conjugating <b> onto <b^2>.  B is the
image of A under the symmetry a -> c, b -> d, c -> a, so a single engine
written for A serves both factors.

An HnnWord is a word in the infinite alphabet {a^+1, a^-1} + K, stored
with stable letters grouped into blocks.  Reduction removes trivial
cancellations and the two pinch moves

    a^-1 (0,s) a^+1  ->  (0, 2s)        (conjugation doubles b-powers)
    a^+1 (0,2s) a^-1 ->  (0, s)

and a word is Britton-reduced when neither applies.  Britton's lemma
then characterises membership in K (single letter) and triviality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dyadic import Dyadic, KElement, K_IDENTITY, ZERO
from .words import BlockWord

_SWAP_AC = {"a": "c", "c": "a"}


def swap_ac(blocks: BlockWord) -> BlockWord:
    """The a <-> c relabelling that carries C-words between factor views."""
    return BlockWord((_SWAP_AC[g], e) for g, e in blocks)


class HnnWord:
    """Reduced word over {a^+1, a^-1} + K.

    Items alternate between ('a', n) stable-letter blocks (n a nonzero
    integer, possibly huge) and ('k', g) letters with g a KElement.
    Construction reduces eagerly, so equality of the trivial word is
    just emptiness.
    """

    __slots__ = ("items",)

    def __init__(self, items=()):
        stack: list = []
        for kind, val in items:
            if kind == "a":
                _push_a(stack, val)
            else:
                _push_k(stack, val)
        self.items = tuple(stack)

    @classmethod
    def from_blocks(cls, blocks) -> "HnnWord":
        items = []
        for g, e in blocks:
            if g == "a":
                items.append(("a", e))
            elif g == "b":
                items.append(("k", KElement(ZERO, e)))
            elif g == "c":
                items.append(("k", KElement(Dyadic(e), 0)))
            else:
                raise ValueError(f"generator {g!r} is not in the a/b/c alphabet")
        return cls(items)

    @classmethod
    def from_flat(cls, word: str) -> "HnnWord":
        return cls.from_blocks(BlockWord.from_flat(word))

    def __eq__(self, other) -> bool:
        return isinstance(other, HnnWord) and self.items == other.items

    def __hash__(self) -> int:
        return hash(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def is_identity(self) -> bool:
        return not self.items

    def __mul__(self, other: "HnnWord") -> "HnnWord":
        return HnnWord(self.items + other.items)

    def inverse(self) -> "HnnWord":
        inv = []
        for kind, val in reversed(self.items):
            inv.append(("a", -val) if kind == "a" else ("k", val.inverse()))
        return HnnWord(inv)

    def a_letter_count(self) -> int:
        return sum(abs(n) for kind, n in self.items if kind == "a")

    def a_block_count(self) -> int:
        return sum(1 for kind, _ in self.items if kind == "a")

    def as_k(self) -> Optional[KElement]:
        """The K-value if this word lies in the base group K."""
        if not self.items:
            return K_IDENTITY
        if len(self.items) == 1 and self.items[0][0] == "k":
            return self.items[0][1]
        return None

    def to_blocks(self) -> BlockWord:
        """Rewrite over the generators a, b, c (exponents may be huge)."""
        out: list[tuple[str, int]] = []
        for kind, val in self.items:
            if kind == "a":
                out.append(("a", val))
            else:
                out.extend(_k_to_blocks(val))
        return BlockWord(out)

    def __repr__(self) -> str:
        parts = []
        for kind, val in self.items:
            parts.append(f"a^{val}" if kind == "a" else repr(val))
        return " ".join(parts) if parts else "1"


def _k_to_blocks(g: KElement) -> list[tuple[str, int]]:
    # (m 2^E, t) = b^-E c^m b^(t+E): conjugating by b shifts the dyadic part.
    if not g.r:
        return [("b", g.s)]
    e = g.r.e
    return [("b", -e), ("c", g.r.m), ("b", g.s + e)]


def _push_k(stack: list, g: KElement) -> None:
    while True:
        if g.is_identity():
            return
        if stack and stack[-1][0] == "k":
            g = stack.pop()[1] * g
            continue
        stack.append(("k", g))
        return


def _push_a(stack: list, n: int) -> None:
    while n:
        sigma = 1 if n > 0 else -1
        if stack and stack[-1][0] == "a":
            m = stack.pop()[1]
            total = m + n
            if total:
                stack.append(("a", total))
            return
        if len(stack) >= 2 and stack[-1][0] == "k" and stack[-2][0] == "a":
            g = stack[-1][1]
            m = stack[-2][1]
            if not g.r and ((m > 0) != (n > 0)):
                # batched pinches across the block pair
                if sigma == 1:
                    j = min(-m, n)
                    new_s = g.s << j
                else:
                    s = g.s
                    v = (s & -s).bit_length() - 1 if s else None
                    j = min(m, -n) if v is None else min(m, -n, v)
                    new_s = s >> j
                if j:
                    stack.pop()
                    stack.pop()
                    if m + sigma * j:
                        stack.append(("a", m + sigma * j))
                    _push_k(stack, KElement(ZERO, new_s))
                    n -= sigma * j
                    continue
        stack.append(("a", n))
        return


def britton_reduce_A(word) -> HnnWord:
    """Britton reduction in A; accepts HnnWord, BlockWord, or flat text."""
    if isinstance(word, HnnWord):
        return HnnWord(word.items)
    if isinstance(word, str):
        return HnnWord.from_flat(word)
    return HnnWord.from_blocks(word)


def is_in_K(word) -> Optional[KElement]:
    return britton_reduce_A(word).as_k()


def _seam_rotation(w: HnnWord) -> Optional[int]:
    """How many trailing items must rotate to the front so that reduction
    can fire across the seam of w*w; None when w is cyclically reduced."""
    items = w.items
    if len(items) <= 1:
        return None
    fk, fv = items[0]
    lk, lv = items[-1]
    if fk == "k" and lk == "k":
        return 1
    if fk == "a" and lk == "a" and (fv > 0) != (lv > 0):
        return 1
    if fk == "a" and lk == "k" and len(items) >= 2 and items[-2][0] == "a":
        m = items[-2][1]
        if (m > 0) != (fv > 0) and not lv.r and (fv > 0 or lv.s % 2 == 0):
            return 2
    if lk == "a" and fk == "k" and len(items) >= 2 and items[1][0] == "a":
        n = items[1][1]
        if (lv > 0) != (n > 0) and not fv.r and (n > 0 or fv.s % 2 == 0):
            return 1
    return None


def cyclic_britton_reduce_A(word) -> tuple[HnnWord, HnnWord]:
    """Return (core, conj) with core cyclically Britton-reduced and
    word = conj * core * conj^-1 in A."""
    w = britton_reduce_A(word)
    conj = HnnWord()
    while True:
        r = _seam_rotation(w)
        if r is None:
            return w, conj
        tail = HnnWord(w.items[-r:])
        w = HnnWord(w.items[-r:] + w.items[:-r])
        conj = conj * tail.inverse()


@dataclass
class TightFactorization:
    """word = u * core * v with u, v in C and core tight.

    A Britton-reduced word in A (not itself in C) is *tight* when no
    conjugation move over C can drop a stable letter or turn it into an
    odd power of b.  u and v are free words over {a, c}.
    """

    u: BlockWord
    core: HnnWord
    v: BlockWord

    def is_nice(self) -> bool:
        return self.core.a_block_count() > 0


def _tighten_left(w: HnnWord) -> tuple[list, HnnWord]:
    """Pull letters of C out of the left end while a stable letter can be
    freed; returns (u-blocks, remaining word)."""
    u_blocks: list[tuple[str, int]] = []
    while True:
        items = w.items
        if items and items[0][0] == "k":
            g = items[0][1]
            rest = items[1:]
        else:
            g = K_IDENTITY
            rest = items
        if not rest or rest[0][0] != "a":
            return u_blocks, w
        if not g.r.is_integer():
            return u_blocks, w
        n1 = rest[0][1]
        sigma = 1 if n1 > 0 else -1
        s1 = g.s
        if sigma == 1:
            new_s = 2 * s1
        else:
            if s1 % 2:
                return u_blocks, w
            new_s = s1 // 2
        r1 = g.r.as_integer()
        u_blocks.extend((("a", sigma), ("c", r1)))
        new_items = [("k", KElement(ZERO, new_s))]
        if n1 - sigma:
            new_items.append(("a", n1 - sigma))
        new_items.extend(rest[1:])
        w = HnnWord(new_items)


def tighten_A(word) -> TightFactorization:
    """Tight factorization of a Britton-reduced word in A \\ C."""
    w = britton_reduce_A(word)
    u_blocks, w = _tighten_left(w)
    v_blocks_inv, w_inv = _tighten_left(w.inverse())
    w = w_inv.inverse()
    u = BlockWord(u_blocks)
    v = BlockWord(v_blocks_inv).inverse()

    g = w.as_k()
    if g is not None:
        if g.r and g.s != 0:
            # conjugating by a c-power can cancel the dyadic part when
            # r / (1 - 2^-s) is an integer
            rho = Fraction(g.r.m) * Fraction(2) ** (g.r.e + g.s) / (Fraction(2) ** g.s - 1)
            if rho.denominator == 1:
                rho = int(rho)
                u = u * BlockWord([("c", rho)])
                v = BlockWord([("c", -rho)]) * v
                g = KElement(ZERO, g.s)
                w = HnnWord([("k", g)])
        if not g.r and g.s != 0:
            s = g.s
            n = (s & -s).bit_length() - 1
            if n:
                u = u * BlockWord([("a", -n)])
                v = BlockWord([("a", n)]) * v
                w = HnnWord([("k", KElement(ZERO, s >> n))])
        if g.is_identity():
            raise ValueError("cannot tighten an element of C")
    return TightFactorization(u, w, v)


# --- membership in C = <a, c> -------------------------------------------
#
# A itself splits as an amalgam of two Baumslag-Solitar pieces glued
# along <b>:  <a,b | b^a=b^2> *_<b> <b,c | c^b=c^2>.  In the left piece
# b = (1,0) and a = (0,1); the right piece is K itself.  An element lies
# in C exactly when its alternating normal form dissolves letter by
# letter into pure a- and c-powers, pushing <b>-parts to the right.

_AB, _BC = "ab", "bc"


def _edge_exponent(kind: str, g: KElement) -> Optional[int]:
    """b-exponent if g lies in the glued subgroup <b> of its piece."""
    if kind == _AB:
        if g.s == 0 and g.r.is_integer():
            return g.r.as_integer()
    else:
        if not g.r:
            return g.s
    return None


def _b_in(kind: str, e: int) -> KElement:
    return KElement(Dyadic(e), 0) if kind == _AB else KElement(ZERO, e)


def _sub_amalgam_push(seq: list, kind: str, g: KElement) -> None:
    while True:
        if g.is_identity():
            return
        if seq:
            k0, g0 = seq[-1]
            if k0 == kind:
                seq.pop()
                g = g0 * g
                continue
            e0 = _edge_exponent(k0, g0)
            if e0 is not None:
                seq.pop()
                g = _b_in(kind, e0) * g
                continue
            e1 = _edge_exponent(kind, g)
            if e1 is not None:
                seq.pop()
                kind, g = k0, g0 * _b_in(k0, e1)
                continue
        seq.append((kind, g))
        return


def sub_amalgam_form(w: HnnWord) -> list[tuple[str, KElement]]:
    """Alternating normal form of an A-element over the two BS(1,2) pieces."""
    seq: list[tuple[str, KElement]] = []
    for kind, val in w.items:
        if kind == "a":
            _sub_amalgam_push(seq, _AB, KElement(ZERO, val))
        else:
            _sub_amalgam_push(seq, _BC, val)
    return seq


def express_in_C(word) -> Optional[BlockWord]:
    """Rewrite an element of A over {a, c}, or report it is not in C."""
    w = britton_reduce_A(word)
    seq = sub_amalgam_form(w)
    out: list[tuple[str, int]] = []
    pending = 0
    for kind, g in seq:
        g = _b_in(kind, pending) * g
        if kind == _AB:
            t = g.r.shift(g.s)
            if not t.is_integer():
                return None
            out.append(("a", g.s))
            pending = t.as_integer()
        else:
            if not g.r.is_integer():
                return None
            out.append(("c", g.r.as_integer()))
            pending = g.s
    if pending:
        return None
    return BlockWord(out)


# --- the amalgam H = A *_C B ---------------------------------------------

_PSI2 = str.maketrans("abcdABCD", "cdabCDAB")


def psi2_flat(word: str) -> str:
    return word.translate(_PSI2)


@dataclass
class Letter:
    """One letter of a word in A + B.

    B-letters are stored through the symmetry a->c, b->d, c->a, i.e.
    `word` is always an HnnWord over the A alphabet; for tag 'B' it
    represents the preimage of the actual element.
    """

    tag: str  # 'A' or 'B'
    word: HnnWord

    def in_C(self) -> Optional[BlockWord]:
        """The letter's value as a word over {a, c}, if it lies in C."""
        stored = express_in_C(self.word)
        if stored is None:
            return None
        return stored if self.tag == "A" else swap_ac(stored)

    def value_blocks(self) -> BlockWord:
        """The letter as a word in the generators of H."""
        bw = self.word.to_blocks()
        if self.tag == "A":
            return bw
        table = dict(zip("abc", "cda"))
        return BlockWord((table[g], e) for g, e in bw.blocks)

    def inverse(self) -> "Letter":
        return Letter(self.tag, self.word.inverse())


def letter_from_C(tag: str, cword: BlockWord) -> Letter:
    stored = cword if tag == "A" else swap_ac(cword)
    return Letter(tag, HnnWord.from_blocks(stored))


def parse_letters(word) -> list[Letter]:
    """Cut a word over a..d into maximal one-factor runs.

    Runs over {a,b,c} become A-letters and runs over {c,d,a} B-letters;
    stretches using only a and c attach to the preceding run.
    """
    if isinstance(word, str):
        word = BlockWord.from_flat(word)
    letters: list[Letter] = []
    tag: Optional[str] = None
    run: list[tuple[str, int]] = []

    def flush():
        nonlocal run, tag
        if run:
            t = tag or "A"
            stored = BlockWord(run)
            if t == "B":
                table = dict(zip("cda", "abc"))
                stored = BlockWord((table[g], e) for g, e in stored.blocks)
            letters.append(Letter(t, HnnWord.from_blocks(stored)))
        run = []

    for g, e in word.blocks:
        want = "A" if g == "b" else "B" if g == "d" else tag
        if want != tag and tag is not None and want is not None:
            flush()
            tag = want
        elif tag is None:
            tag = want
        run.append((g, e))
    flush()
    return letters


def _push_amalgam(stack: list[Letter], letter: Letter) -> None:
    tag, w = letter.tag, letter.word
    while True:
        if w.is_identity():
            return
        if stack:
            top = stack[-1]
            if top.tag == tag:
                stack.pop()
                w = top.word * w
                continue
            top_c = express_in_C(top.word)
            if top_c is not None:
                stack.pop()
                w = HnnWord.from_blocks(swap_ac(top_c)) * w
                continue
            w_c = express_in_C(w)
            if w_c is not None:
                stack.pop()
                tag, w = top.tag, top.word * HnnWord.from_blocks(swap_ac(w_c))
                continue
        stack.append(Letter(tag, w))
        return


def britton_reduce_H(word) -> list[Letter]:
    """Britton-reduced amalgam form: alternating letters, none in C
    (except possibly a lone letter)."""
    letters = word if isinstance(word, list) else parse_letters(word)
    stack: list[Letter] = []
    for letter in letters:
        _push_amalgam(stack, letter)
    return stack


def is_identity_H(letters: list[Letter]) -> bool:
    return not britton_reduce_H(letters)


def word_problem_exact(x, y="") -> bool:
    """Exact-arithmetic word problem: does x equal y in H?"""
    bx = x if isinstance(x, BlockWord) else BlockWord.from_flat(x)
    by = y if isinstance(y, BlockWord) else BlockWord.from_flat(y)
    return is_identity_H(parse_letters(bx * by.inverse()))


def cyclic_britton_reduce_H(word) -> tuple[list[Letter], list[Letter]]:
    """Return (core, conj): core cyclically Britton-reduced,
    word = conj * core * conj^-1 in H."""
    letters = britton_reduce_H(word)
    conj: list[Letter] = []
    while len(letters) >= 2 and letters[0].tag == letters[-1].tag:
        tail = letters[-1]
        conj.append(tail.inverse())
        letters = britton_reduce_H([tail] + letters[:-1])
    return letters, conj


def word_problem(x, y="", backend: str = "pc") -> bool:
    """Word problem in H.  backend 'pc' uses the compressed power-circuit
    engine (no value caps); 'exact' uses HnnWord arithmetic and may raise
    CapExceeded on tower-of-exponents inputs."""
    if backend == "exact":
        return word_problem_exact(x, y)
    if backend == "pc":
        from .compressed import word_problem_pc

        return word_problem_pc(x, y)
    raise ValueError(f"unknown backend {backend!r}")


def has_nice_factor(letters: list[Letter]) -> Optional[tuple[int, TightFactorization]]:
    """First letter of a cyclically reduced word whose tight core keeps a
    stable letter, together with its tightening data."""
    for i, letter in enumerate(letters):
        if express_in_C(letter.word) is not None:
            continue
        tf = tighten_A(letter.word)
        if tf.is_nice():
            return i, tf
    return None
