"""Britton reduction in Higman's group on power-circuit representations.

Words are held as sequences of typed triple markings on one shared
reduced circuit.  Maximal runs of A-side types (ab, bc) and B-side types
(cd, da) form *intervals*; an interval is one letter of the amalgam
A *_C B.  Reduction merges triples inside an interval, dissolves
intervals that lie in C = <a, c> into pure-power blocks, and passes
those blocks across to the neighbouring intervals, exactly as the exact
engine does with letters, but with all exponents kept compressed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .circuit import (
    Marking,
    ReducedCircuit,
    TripleMarking,
    tm_edge_exponent,
    tm_is_identity,
    tm_multiply,
)
from .words import BlockWord

Interval = list  # [side, list[TripleMarking]]


def shared_power(pc: ReducedCircuit, type_: str, e: Marking) -> TripleMarking:
    """The shared generator (b or d) to the power eps(e), in the given type."""
    if type_ in ("ab", "cd"):
        return TripleMarking(pc, dict(e), {}, {}, type_)
    if pc.sign(e) >= 0:
        return TripleMarking(pc, {}, dict(e), {}, type_)
    return TripleMarking(pc, {}, {}, dict(e), type_)


def triples_from_word(pc: ReducedCircuit, word) -> list[TripleMarking]:
    """Unit triples for a word over a..d, one per block, typed by the
    same maximal-run convention as the exact parser."""
    if isinstance(word, str):
        word = BlockWord.from_flat(word)
    out: list[TripleMarking] = []
    side: Optional[str] = None
    pending: list[tuple[str, int]] = []

    def emit(side_now: str) -> None:
        nonlocal pending
        for g, e in pending:
            m = pc.const(e)
            if side_now == "A":
                if g == "a":
                    t = TripleMarking(pc, {}, m, {}, "ab") if e >= 0 else TripleMarking(pc, {}, {}, m, "ab")
                elif g == "b":
                    t = TripleMarking(pc, m, {}, {}, "ab")
                else:  # c
                    t = TripleMarking(pc, m, {}, {}, "bc")
            else:
                if g == "c":
                    t = TripleMarking(pc, {}, m, {}, "cd") if e >= 0 else TripleMarking(pc, {}, {}, m, "cd")
                elif g == "d":
                    t = TripleMarking(pc, m, {}, {}, "cd")
                else:  # a
                    t = TripleMarking(pc, m, {}, {}, "da")
            out.append(t)
        pending = []

    for g, e in word.blocks:
        if g == "b":
            want = "A"
        elif g == "d":
            want = "B"
        else:
            want = side
        if want != side and side is not None and want is not None:
            emit(side)
            side = want
        elif side is None:
            side = want
        pending.append((g, e))
    emit(side or "A")
    return out


def invert_triples(ts: list[TripleMarking]) -> list[TripleMarking]:
    from .circuit import tm_invert

    return [tm_invert(t) for t in reversed(ts)]


def _interval_push(pc: ReducedCircuit, seq: list[TripleMarking], t: TripleMarking) -> None:
    while True:
        if tm_is_identity(t):
            return
        if seq:
            top = seq[-1]
            if top.type == t.type:
                seq.pop()
                t = tm_multiply(top, t)
                continue
            e = tm_edge_exponent(top)
            if e is not None:
                seq.pop()
                t = tm_multiply(shared_power(pc, t.type, e), t)
                continue
            e = tm_edge_exponent(t)
            if e is not None:
                seq.pop()
                t = tm_multiply(top, shared_power(pc, top.type, e))
                continue
        seq.append(t)
        return


def interval_to_C(pc: ReducedCircuit, seq: list[TripleMarking]) -> Optional[list[tuple[str, Marking]]]:
    """Dissolve an amalgamation-reduced interval into pure a/c powers.

    Walks left to right writing each triple as (outer-or-inner power) *
    (shared-generator power) and pushing the shared part into the next
    triple.  Succeeds exactly when the interval's value lies in C; the
    trailing shared power must vanish.
    """
    pending: Marking = {}
    out: list[tuple[str, Marking]] = []
    for t in seq:
        if pending:
            t = tm_multiply(shared_power(pc, t.type, pending), t)
            pending = {}
        if t.type in ("ab", "cd"):
            # a^(v+w) b^(2^w u)   (c, d for the B side)
            if not pc.divisible_pow2(t.u, pc.neg(t.w)):
                return None
            gen = "a" if t.type == "ab" else "c"
            out.append((gen, pc.add(t.v, t.w)))
            pending = pc.shift(t.u, t.w)
        else:
            # c^(2^-v u) b^(v+w)   (a, d for the B side)
            if not pc.divisible_pow2(t.u, t.v):
                return None
            gen = "c" if t.type == "bc" else "a"
            out.append((gen, pc.shift(t.u, pc.neg(t.v))))
            pending = pc.add(t.v, t.w)
    if pending:
        return None
    merged: list[tuple[str, Marking]] = []
    for g, m in out:
        if not m:
            continue
        if merged and merged[-1][0] == g:
            m2 = pc.add(merged.pop()[1], m)
            if m2:
                merged.append((g, m2))
        else:
            merged.append((g, m))
    return merged


def blocks_to_triples(
    pc: ReducedCircuit, blocks: list[tuple[str, Marking]], side: str
) -> list[TripleMarking]:
    out = []
    for g, m in blocks:
        if not m:
            continue
        if side == "A":
            if g == "a":
                t = (
                    TripleMarking(pc, {}, dict(m), {}, "ab")
                    if pc.sign(m) >= 0
                    else TripleMarking(pc, {}, {}, dict(m), "ab")
                )
            else:
                t = TripleMarking(pc, dict(m), {}, {}, "bc")
        else:
            if g == "c":
                t = (
                    TripleMarking(pc, {}, dict(m), {}, "cd")
                    if pc.sign(m) >= 0
                    else TripleMarking(pc, {}, {}, dict(m), "cd")
                )
            else:
                t = TripleMarking(pc, dict(m), {}, {}, "da")
        out.append(t)
    return out


def _push_h(pc: ReducedCircuit, stack: list[Interval], t: TripleMarking) -> None:
    while True:
        if tm_is_identity(t):
            return
        side = t.side()
        if stack and stack[-1][0] == side:
            _interval_push(pc, stack[-1][1], t)
            if not stack[-1][1]:
                stack.pop()
            return
        if stack:
            blocks = interval_to_C(pc, stack[-1][1])
            if blocks is not None:
                stack.pop()
                for ct in blocks_to_triples(pc, blocks, side):
                    _push_h(pc, stack, ct)
                continue
        stack.append([side, []])
        _interval_push(pc, stack[-1][1], t)
        if not stack[-1][1]:
            stack.pop()
        return


def reduce_h_pc(pc: ReducedCircuit, triples: list[TripleMarking]) -> list[Interval]:
    """Britton reduction over the amalgam, on compressed letters."""
    stack: list[Interval] = []
    for t in triples:
        _push_h(pc, stack, t)
    while len(stack) >= 2:
        blocks = interval_to_C(pc, stack[-1][1])
        if blocks is None:
            break
        stack.pop()
        for ct in blocks_to_triples(pc, blocks, stack[-1][0]):
            _push_h(pc, stack, ct)
    return stack


def intervals_to_triples(stack: list[Interval]) -> list[TripleMarking]:
    out: list[TripleMarking] = []
    for _, seq in stack:
        out.extend(seq)
    return out


def word_problem_pc(x, y="") -> bool:
    pc = ReducedCircuit()
    bx = x if isinstance(x, BlockWord) else BlockWord.from_flat(x)
    by = y if isinstance(y, BlockWord) else BlockWord.from_flat(y)
    ts = triples_from_word(pc, bx) + invert_triples(triples_from_word(pc, by))
    return not reduce_h_pc(pc, ts)


def triples_equal_h(pc: ReducedCircuit, ts1, ts2) -> bool:
    return not reduce_h_pc(pc, list(ts1) + invert_triples(list(ts2)))


def cyclic_reduce_pc(
    pc: ReducedCircuit, triples: list[TripleMarking]
) -> tuple[list[Interval], list[TripleMarking]]:
    """(core intervals, conj triples): word = conj * core * conj^-1."""
    stack = reduce_h_pc(pc, triples)
    conj: list[TripleMarking] = []
    while len(stack) >= 2 and stack[0][0] == stack[-1][0]:
        tail = stack[-1][1]
        conj.extend(invert_triples(tail))
        seq = list(tail) + intervals_to_triples(stack[:-1])
        stack = reduce_h_pc(pc, seq)
    return stack, conj


@dataclass
class IntervalTightening:
    """Interval = alpha * beta * gamma with alpha, gamma pure-power blocks
    over {a, c} and beta the untightenable middle.

    `alpha_tilde` extends alpha by the outer-generator power and the
    halving steps peeled off beta's first triple, so that beta's residual
    leading letter is a power of the side's shared generator (dyadic
    part zero) or starts with the compressed dyadic `r1`.
    """

    side: str
    alpha: list = field(default_factory=list)
    beta: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    alpha_tilde: list = field(default_factory=list)
    r1: Optional[tuple[Marking, Marking]] = None  # value 2^-eps(V) eps(U)

    def in_C(self) -> bool:
        return not self.beta

    def is_nice(self) -> bool:
        return len(self.beta) >= 2


def tighten_interval(pc: ReducedCircuit, seq: list[TripleMarking], side: str) -> IntervalTightening:
    ab = "ab" if side == "A" else "cd"
    outer = "a" if side == "A" else "c"
    inner = "c" if side == "A" else "a"

    alpha: list[tuple[str, Marking]] = []
    beta = list(seq)
    pending: Marking = {}
    while beta:
        t = beta[0]
        if pending:
            t = tm_multiply(shared_power(pc, t.type, pending), t)
            pending = {}
        if t.type == ab:
            if not pc.divisible_pow2(t.u, pc.neg(t.w)):
                beta[0] = t
                break
            alpha.append((outer, pc.add(t.v, t.w)))
            pending = pc.shift(t.u, t.w)
        else:
            if not pc.divisible_pow2(t.u, t.v):
                beta[0] = t
                break
            alpha.append((inner, pc.shift(t.u, pc.neg(t.v))))
            pending = pc.add(t.v, t.w)
        beta.pop(0)
    if not beta:
        if pending:
            # value not in C: a bare shared-generator power remains
            beta = [shared_power(pc, ab, pending)]
        return _finish_tightening(pc, side, alpha, beta, [])

    gamma_rev: list[tuple[str, Marking]] = []
    pending = {}
    while beta:
        t = beta[-1]
        if pending:
            t = tm_multiply(t, shared_power(pc, t.type, pending))
            pending = {}
        if t.type == ab:
            # b^(2^-v u) a^(v+w)
            if not pc.divisible_pow2(t.u, t.v):
                beta[-1] = t
                break
            gamma_rev.append((outer, pc.add(t.v, t.w)))
            pending = pc.shift(t.u, pc.neg(t.v))
        else:
            # b^(v+w) c^(2^w u)
            if not pc.divisible_pow2(t.u, pc.neg(t.w)):
                beta[-1] = t
                break
            gamma_rev.append((inner, pc.shift(t.u, t.w)))
            pending = pc.add(t.v, t.w)
        beta.pop()
    if not beta and pending:
        beta = [shared_power(pc, ab, pending)]
    return _finish_tightening(pc, side, alpha, beta, list(reversed(gamma_rev)))


def _finish_tightening(pc, side, alpha, beta, gamma) -> IntervalTightening:
    data = IntervalTightening(side=side, alpha=alpha, beta=beta, gamma=gamma)
    if not beta:
        return data
    ab = "ab" if side == "A" else "cd"
    outer = "a" if side == "A" else "c"
    t0 = beta[0]
    tilde = list(alpha)
    if t0.type == ab:
        # peel a^v, then halve u while even against |w|: the residual
        # leading base-group letter is a pure shared-generator power
        steps = dict(t0.v)
        if t0.u and t0.w:
            low = min(t0.u, key=pc.pos.__getitem__)
            v2 = dict(pc.lam[low])
            nw = pc.neg(t0.w)
            halve = v2 if pc.cmp(v2, nw) <= 0 else nw
            steps = pc.add(steps, pc.neg(halve))
        if steps:
            tilde.append((outer, steps))
        data.r1 = ({}, {})
    else:
        data.r1 = (dict(t0.u), dict(t0.v))
    data.alpha_tilde = tilde
    return data
