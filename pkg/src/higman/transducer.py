"""Deterministic transducers over block-compressed words in {a, c}.

A machine here is a partial deterministic letter-to-word transducer with
an end marker, presented at block granularity: `step(state, (gen, exp))`
consumes one run of a single generator and returns the successor state
with the output emitted so far, or None when the machine rejects;
`end(state)` yields the final output chunk (the end-marker transition),
or None.  States are hashable values.  All machines are insensitive to
how a run is split into chunks, which makes relation composition a
plain product construction even though upstream output arrives in
pieces.

Input streams are assumed freely reduced (consecutive chunks of one
generator carry the same sign); the search front-ends only ever generate
such streams.

The accepted relation L(D) = {(x, D(x))} is the graph of a partial
function.  Composition follows relational order: (D1 * D2)(x) =
D2(D1(x)).
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional

from .words import BlockWord

Block = tuple  # (gen, exp)
Chunks = tuple  # tuple of Blocks, not necessarily maximal runs


class Dolt:
    """Base interface; subclasses define initial, step, end."""

    initial = None

    def step(self, state, block: Block):
        raise NotImplementedError

    def end(self, state) -> Optional[Chunks]:
        raise NotImplementedError


def run(machine: Dolt, word) -> Optional[BlockWord]:
    """Transduce a whole word; None when rejected."""
    if isinstance(word, str):
        word = BlockWord.from_flat(word)
    state = machine.initial
    out: list[Block] = []
    for block in word.blocks:
        r = machine.step(state, block)
        if r is None:
            return None
        state, chunk = r
        out.extend(chunk)
    tail = machine.end(state)
    if tail is None:
        return None
    out.extend(tail)
    return BlockWord(out)


def run_prefix(machine: Dolt, word, i: int) -> Optional[BlockWord]:
    """Output after the first i blocks (no end marker)."""
    if isinstance(word, str):
        word = BlockWord.from_flat(word)
    state = machine.initial
    out: list[Block] = []
    for block in word.blocks[: max(i, 0)]:
        r = machine.step(state, block)
        if r is None:
            return None
        state, chunk = r
        out.extend(chunk)
    return BlockWord(out)


class IdentityDolt(Dolt):
    initial = ()

    def step(self, state, block):
        return state, (block,)

    def end(self, state):
        return ()


class ComposedDolt(Dolt):
    """Relational composition: feed the first machine's output chunks
    through the second."""

    def __init__(self, first: Dolt, second: Dolt):
        self.first, self.second = first, second
        self.initial = (first.initial, second.initial)

    def _feed(self, s2, chunks):
        out: list[Block] = []
        for blk in chunks:
            r = self.second.step(s2, blk)
            if r is None:
                return None
            s2, c = r
            out.extend(c)
        return s2, tuple(out)

    def step(self, state, block):
        s1, s2 = state
        r = self.first.step(s1, block)
        if r is None:
            return None
        s1, chunks = r
        fed = self._feed(s2, chunks)
        if fed is None:
            return None
        s2, out = fed
        return (s1, s2), out

    def end(self, state):
        s1, s2 = state
        chunks = self.first.end(s1)
        if chunks is None:
            return None
        fed = self._feed(s2, chunks)
        if fed is None:
            return None
        s2, out = fed
        tail = self.second.end(s2)
        if tail is None:
            return None
        return out + tuple(tail)


def compose(*machines: Dolt) -> Dolt:
    out = machines[0]
    for m in machines[1:]:
        out = ComposedDolt(out, m)
    return out


class LeftMult(Dolt):
    """w -> reduced(u w);  cancellation only eats a prefix of the input."""

    def __init__(self, u):
        if isinstance(u, str):
            u = BlockWord.from_flat(u)
        self.u = u
        self.initial = ("h", u.blocks)

    def step(self, state, block):
        if state[0] == "d":
            return state, (block,)
        pending = list(state[1])
        g, e = block
        s = 1 if e > 0 else -1
        while pending and e:
            pg, pe = pending[-1]
            if pg != g or (pe > 0) == (e > 0):
                break
            take = min(abs(pe), abs(e))
            pe += take * s
            e -= take * s
            if pe:
                pending[-1] = (pg, pe)
            else:
                pending.pop()
        if e:
            # a letter survived the seam: nothing cancels after this
            return ("d",), tuple(pending) + ((g, e),)
        return ("h", tuple(pending)), ()

    def end(self, state):
        if state[0] == "d":
            return ()
        return tuple(state[1])


class RightMult(Dolt):
    """w -> reduced(w v); buffers the last |v| letters of the input."""

    def __init__(self, v):
        if isinstance(v, str):
            v = BlockWord.from_flat(v)
        self.v = v
        self.keep = v.letter_length()
        self.initial = ()

    def step(self, state, block):
        buf = _append_block(list(state), block)
        out: list[Block] = []
        excess = sum(abs(e) for _, e in buf) - self.keep
        i = 0
        while excess > 0:
            g, e = buf[i]
            take = min(abs(e), excess)
            sign = 1 if e > 0 else -1
            out.append((g, take * sign))
            excess -= take
            if take == abs(e):
                i += 1
            else:
                buf[i] = (g, e - take * sign)
                break
        return tuple(buf[i:]) if i else tuple(buf), tuple(out)

    def end(self, state):
        w = BlockWord(tuple(state) + self.v.blocks)
        return w.blocks


def _append_block(buf: list, block: Block) -> list:
    g, e = block
    if buf and buf[-1][0] == g:
        g0, e0 = buf.pop()
        e += e0
        if e:
            buf.append((g, e))
    else:
        buf.append(block)
    return buf


def free_mult_dolt(u, v) -> Dolt:
    """The relation {(w, reduced(u w v))} on freely reduced words."""
    return compose(LeftMult(u), RightMult(v))


class AffineDolt(Dolt):
    """Block-case solutions of a conjugation equation on single letters.

    For tight non-central letters (r, s), (r', s) the solution pairs are
    powers of one generator related by an affine map; with d = r - r'
    = p/2^q (p odd; q = -inf when d = 0) the relation is empty when
    q > max(s, 0), maps n -> 2^s(d + n) forwards when s >= max(q, 0),
    and m -> 2^s m + ... backwards when s, q <= 0.
    """

    def __init__(self, delta, s: int, gen: str = "c"):
        from .dyadic import Dyadic

        if isinstance(delta, int):
            delta = Dyadic(delta)
        self.delta, self.s, self.gen = delta, s, gen
        if bool(delta) and -delta.e > max(s, 0):
            self.mode = "empty"
        elif s >= max((-delta.e if delta else -(1 << 62)), 0):
            self.mode = "fwd"
        elif s <= 0 and (not delta or delta.e >= 0):
            self.mode = "bwd"
        else:
            self.mode = "empty"
        self.initial = None

    def step(self, state, block):
        if self.mode == "empty" or state is not None or block[0] != self.gen:
            return None
        return block[1], ()

    def end(self, state):
        from .dyadic import Dyadic

        if self.mode == "empty":
            return None
        n = state or 0
        if self.mode == "fwd":
            m = (self.delta + Dyadic(n)).shift(self.s)
            if not m.is_integer():
                return None
        else:
            m = (Dyadic(n) + self.delta).shift(self.s)
            if not m.is_integer():
                return None
        k = m.as_integer()
        return ((self.gen, k),) if k else ()


class DyckDolt(Dolt):
    """The height-graded doubling relation on one-sided balanced words.

    Over the axis generator the machine tracks the running exponent sum
    h (the height); a block of the other generator at height h has its
    exponent multiplied by 2^(s 2^h).  For s < 0 this divides, and a
    remainder counter enforces divisibility across chunk splits.  The
    domain is the words whose height stays in [0, H] (H = None means
    uncapped) and returns to 0 at the end.
    """

    def __init__(self, s: int, axis: str = "a", height_cap: Optional[int] = None):
        if s % 2 == 0:
            raise ValueError("the doubling exponent must be odd")
        self.s = s
        self.axis = axis
        self.other = "c" if axis == "a" else "a"
        self.cap = height_cap
        self.initial = (0, 0)  # (height, pending remainder)

    def step(self, state, block):
        h, rem = state
        g, e = block
        if g == self.axis:
            if rem:
                return None
            h2 = h + e
            if min(h, h2) < 0 or (self.cap is not None and max(h, h2) > self.cap):
                return None
            return (h2, 0), ((g, e),)
        if g != self.other:
            return None
        exp = self.s * (1 << h)
        if self.s > 0:
            return (h, 0), ((g, e << exp),)
        mod = 1 << (-exp)
        total = rem + e
        sign = 1 if total >= 0 else -1
        q, r = sign * (abs(total) // mod), sign * (abs(total) % mod)
        return (h, r), (((g, q),) if q else ())

    def end(self, state):
        h, rem = state
        if h or rem:
            return None
        return ()


class SingletonDolt(Dolt):
    """The one-pair relation {(x0, y0)}."""

    def __init__(self, x0: BlockWord, y0: BlockWord):
        self.x0, self.y0 = x0, y0
        self.initial = (0, 0)  # (block index, letters consumed within it)

    def step(self, state, block):
        i, off = state
        g, e = block
        blocks = self.x0.blocks
        sign = 1 if e > 0 else -1
        need = abs(e)
        while need:
            if i >= len(blocks):
                return None
            bg, be = blocks[i]
            bsign = 1 if be > 0 else -1
            if bg != g or bsign != sign:
                return None
            room = abs(be) - off
            take = min(room, need)
            off += take
            need -= take
            if off == abs(be):
                i, off = i + 1, 0
        return (i, off), ()

    def end(self, state):
        i, off = state
        if (i, off) == (len(self.x0.blocks), 0):
            return self.y0.blocks
        return None


# -- the prefix-sandwich property -------------------------------------------


def is_block_prefix(p: BlockWord, w: BlockWord) -> bool:
    """Prefix order on words, letterwise (the last block may be partial)."""
    pb, wb = p.blocks, w.blocks
    if len(pb) > len(wb):
        return False
    for i, (g, e) in enumerate(pb):
        wg, we = wb[i]
        if g != wg or (e > 0) != (we > 0):
            return False
        if abs(e) > abs(we) or (abs(e) < abs(we) and i != len(pb) - 1):
            return False
    return True


def check_property_P(machine: Dolt, N: int, pairs, B: Optional[int] = None) -> list[str]:
    """Check the sandwich v[[i-N]] <= rho(u[[i]]) <= v[[i+N]] on sample
    pairs (u, v) from the machine's relation, plus the block bound B on
    domain words.  Returns a list of violation descriptions."""
    from .words import prefix_blocks

    bad: list[str] = []
    for u, v in pairs:
        got = run(machine, u)
        if got is None or got != v:
            bad.append(f"pair ({u.to_text()}, {v.to_text()}) not in relation")
            continue
        if B is not None:
            for g, e in u.blocks:
                if abs(e) > B:
                    bad.append(f"domain block {g}^{e} exceeds B={B}")
        for i in range(len(u.blocks) + 1):
            img = run_prefix(machine, u, i)
            if img is None:
                bad.append(f"prefix {i} of {u.to_text()} rejected")
                break
            lo = prefix_blocks(v, i - N)
            hi = prefix_blocks(v, i + N)
            if not is_block_prefix(lo, img) or not is_block_prefix(img, hi):
                bad.append(f"sandwich fails at block {i} of {u.to_text()}")
    return bad


# -- fixed points -------------------------------------------------------------


class Automaton:
    """Lazy partial deterministic acceptor."""

    def __init__(self, initial, transitions, is_accept):
        self.initial = initial
        self.transitions = transitions  # state -> iterable of (letter, state)
        self.is_accept = is_accept

    def accepts(self, word) -> bool:
        if isinstance(word, str):
            word = BlockWord.from_flat(word)
        state = self.initial
        for g, e in word.blocks:
            sign = 1 if e > 0 else -1
            for _ in range(abs(e)):
                nxt = None
                for letter, s2 in self.transitions(state):
                    if letter == (g, sign):
                        nxt = s2
                        break
                if nxt is None:
                    return False
                state = nxt
        return self.is_accept(state)


def _strip_common(u: tuple, v: tuple) -> tuple[tuple, tuple]:
    u, v = list(u), list(v)
    while u and v:
        (g1, e1), (g2, e2) = u[0], v[0]
        if g1 != g2 or (e1 > 0) != (e2 > 0):
            break
        take = min(abs(e1), abs(e2))
        s = 1 if e1 > 0 else -1
        e1 -= take * s
        e2 -= take * s
        if e1:
            u[0] = (g1, e1)
        else:
            u.pop(0)
        if e2:
            v[0] = (g2, e2)
        else:
            v.pop(0)
    return tuple(u), tuple(v)


def _block_len(blocks: tuple) -> int:
    return sum(abs(e) for _, e in blocks)


def fixed_point_automaton(machine: Dolt, N: int, B, alphabet: str = "ac") -> Automaton:
    """Acceptor for {w : machine(w) = w}, states generated on demand.

    A state carries the machine state, the unmatched suffix of input or
    of output (at most one nonempty), and the previous letter (inputs
    must stay freely reduced).  B bounds pending-output blocks: under
    the prefix-sandwich property a fixed point never outruns its image
    by more than (N+1)B letters, so oversized suffixes are dead ends.
    `B` may be an int or a bit-length bound (see `bit_bound`)."""
    if isinstance(B, int):
        limit_letters = (N + 1) * B

        def block_ok(e: int) -> bool:
            return abs(e) <= B

        def suffix_ok(blocks: tuple) -> bool:
            return _block_len(blocks) <= limit_letters

    else:
        bits = B.bits

        def block_ok(e: int) -> bool:
            return abs(e).bit_length() <= bits + 1

        def suffix_ok(blocks: tuple) -> bool:
            return all(abs(e).bit_length() <= bits + 2 for _, e in blocks)

    letters = [(g, s) for g in alphabet for s in (1, -1)]
    init = (machine.initial, (), (), None)

    def transitions(state):
        sigma, u_hat, v_hat, last = state
        out = []
        for g, s in letters:
            if last == (g, -s):
                continue
            r = machine.step(sigma, (g, s))
            if r is None:
                continue
            sigma2, chunk = r
            u2 = _append_tuple(u_hat, (g, s))
            v2 = v_hat
            for blk in chunk:
                v2 = _append_tuple(v2, blk)
            u2, v2 = _strip_common(u2, v2)
            if u2 and v2:
                continue
            if any(not block_ok(e) for _, e in v2):
                continue
            if not suffix_ok(u2) or not suffix_ok(v2):
                continue
            out.append(((g, s), (sigma2, u2, v2, (g, s))))
        return out

    def is_accept(state):
        sigma, u_hat, v_hat, _ = state
        if v_hat:
            return False
        tail = machine.end(sigma)
        if tail is None:
            return False
        final = ()
        for blk in tail:
            final = _append_tuple(final, blk)
        return final == u_hat

    return Automaton(init, transitions, is_accept)


def _append_tuple(blocks: tuple, blk: Block) -> tuple:
    g, e = blk
    if not e:
        return blocks
    if blocks and blocks[-1][0] == g and (blocks[-1][1] > 0) == (e > 0):
        return blocks[:-1] + ((g, blocks[-1][1] + e),)
    if blocks and blocks[-1][0] == g:
        merged = blocks[-1][1] + e
        return blocks[:-1] + ((g, merged),) if merged else blocks[:-1]
    return blocks + (blk,)


class bit_bound:
    """Block bound 2^(2^bits)-ish, too large to materialise; compare by
    bit length only (conservative: never rejects a legal block)."""

    def __init__(self, bits: int):
        self.bits = bits


def find_accepted(automaton: Automaton, max_states: int = 10**6):
    """Shortest accepted word by breadth-first search.

    Returns ("found", word), ("empty", None) when the reachable part is
    exhausted, or ("cap", None) when max_states is hit.
    """
    seen = {automaton.initial: None}
    queue = deque([automaton.initial])
    while queue:
        state = queue.popleft()
        if automaton.is_accept(state):
            path: list = []
            cur = state
            while seen[cur] is not None:
                prev, letter = seen[cur]
                path.append(letter)
                cur = prev
            return "found", BlockWord((g, s) for g, s in reversed(path))
        for letter, nxt in automaton.transitions(state):
            if nxt in seen:
                continue
            if len(seen) >= max_states:
                return "cap", None
            seen[nxt] = (state, letter)
            queue.append(nxt)
    return "empty", None
