"""Conjugacy decision procedures for Higman's group and its pieces.

Conjugator orientation, used library-wide: a witness z satisfies

    z^-1 * x * z  =  y        (written x^z = y).

Every "conjugate" verdict is verified through the word problem before it
is returned.  The layers:

* conj_K      -- Baumslag-Solitar group K = Z[1/2] x| Z, fully decided.
* conj_A      -- the HNN factor A (and via symmetry B), fully decided.
* conj_H_fast -- the compressed one-candidate route through a nice
                 factor; decides or reports that no nice factor exists.
* conj_H_general -- Collins-style rotation loop with case machines and,
                 for the all-doubling case, a fixed-point automaton
                 search (may return inconclusive at the state cap).
* conj_H      -- strategy dispatcher.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import britton
from .britton import (
    HnnWord,
    Letter,
    britton_reduce_A,
    cyclic_britton_reduce_A,
    cyclic_britton_reduce_H,
    express_in_C,
    swap_ac,
    tighten_A,
)
from .circuit import ReducedCircuit
from .compressed import (
    blocks_to_triples,
    cyclic_reduce_pc,
    invert_triples,
    reduce_h_pc,
    tighten_interval,
    triples_from_word,
)
from .dyadic import CapExceeded, Dyadic, KElement, K_IDENTITY, ZERO
from .transducer import (
    DyckDolt,
    bit_bound,
    compose,
    find_accepted,
    fixed_point_automaton,
    free_mult_dolt,
)
from .words import BlockWord, psi_blocks

DEFAULT_MAX_STATES = 10**6


def _max_states(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("HIGMAN_MAX_STATES")
    return int(env) if env else DEFAULT_MAX_STATES


@dataclass
class ConjugacyResult:
    verdict: str  # "conjugate" | "not_conjugate" | "inconclusive"
    witness: Optional[BlockWord] = None
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def conjugate(self) -> bool:
        return self.verdict == "conjugate"


def _as_blocks(word) -> BlockWord:
    return word if isinstance(word, BlockWord) else BlockWord.from_flat(word)


# --- conjugacy in K ---------------------------------------------------------


def conj_K(x: KElement, y: KElement) -> Optional[KElement]:
    """Witness z in K with z^-1 x z = y, or None.

    The translation part s is a class function.  For s = 0 conjugates of
    (r, 0) are exactly (r * 2^k, 0).  For s != 0 the orbit of r is, up to
    the unit 2^t, a coset of (1 - 2^-s) Z[1/2]; reducing modulo the odd
    number 2^|s| - 1 turns that into a cyclic-group membership test.
    """
    if x.s != y.s:
        return None
    s = x.s
    if s == 0:
        if bool(x.r) != bool(y.r):
            return None
        if not x.r:
            return K_IDENTITY
        if x.r.m != y.r.m:
            return None
        z = KElement(ZERO, y.r.e - x.r.e)
    else:
        M = (1 << abs(s)) - 1
        tau = None
        if M == 1:
            tau = 0
        else:
            rx = _residue(x.r, M, abs(s))
            ry = _residue(y.r, M, abs(s))
            for t in range(abs(s)):  # the order of 2 mod 2^|s|-1 is |s|
                if (rx * pow(2, t, M)) % M == ry:
                    tau = t
                    break
        if tau is None:
            return None
        # y.r = 2^tau (x.r - q (1 - 2^-s)): solve for q
        q = (_frac(x.r) - _frac(y.r) / Fraction(2) ** tau) / (1 - Fraction(2) ** (-s))
        z = KElement(_dyadic_from_fraction(q), tau)
    assert z.inverse() * x * z == y
    return z


def _residue(r: Dyadic, M: int, order: int) -> int:
    if not r:
        return 0
    return (r.m * pow(2, r.e % order, M)) % M


def _frac(r: Dyadic) -> Fraction:
    return Fraction(r.m) * Fraction(2) ** r.e


def _dyadic_from_fraction(f: Fraction) -> Dyadic:
    den = f.denominator
    if den & (den - 1):
        raise ValueError(f"{f} is not dyadic")
    return Dyadic(f.numerator, -(den.bit_length() - 1))


def k_to_word_blocks(g: KElement, one_gen: str = "c", stable_gen: str = "b") -> BlockWord:
    """(m 2^E, t) as stable^-E one^m stable^(t+E) in a BS(1,2) copy."""
    if not g.r:
        return BlockWord([(stable_gen, g.s)])
    e = g.r.e
    return BlockWord([(stable_gen, -e), (one_gen, g.r.m), (stable_gen, g.s + e)])


# --- conjugacy in A ---------------------------------------------------------


def solve_recurrence(eps, gs, hs, seed_index: int, seed_value: int):
    """Propagate  h_i b_i = phi^eps_i(b_{i-1}) g_i  from one seeded value.

    Returns (b_0..b_n, boundary_ok) or None when a halving step hits an
    odd exponent or a dyadic side condition fails.
    """
    n = len(eps)
    bs: list = [None] * (n + 1)
    bs[seed_index] = seed_value
    for i in range(seed_index, n):
        np_ = _phi(bs[i], eps[i])
        if np_ is None or hs[i].r != gs[i].r.shift(-np_):
            return None
        bs[i + 1] = gs[i].s + np_ - hs[i].s
    for i in range(seed_index - 1, -1, -1):
        np_ = hs[i].s + bs[i + 1] - gs[i].s
        if hs[i].r != gs[i].r.shift(-np_):
            return None
        if eps[i] == 1:
            if np_ % 2:
                return None
            bs[i] = np_ // 2
        else:
            bs[i] = 2 * np_
    return bs, bs[0] == bs[n]


def _phi(m: int, eps: int) -> Optional[int]:
    if eps == 1:
        return 2 * m
    if m % 2:
        return None
    return m // 2


def _alternating_form(w: HnnWord) -> tuple[list[int], list[KElement], HnnWord]:
    """Rewrite a cyclically reduced non-central word as
    a^e1 g1 ... a^en gn (unit stable letters); returns (eps, gs, rot)
    with w = rot * (aligned word) * rot^-1."""
    items = list(w.items)
    rot = HnnWord()
    if items and items[0][0] == "k":
        g0 = items[0][1]
        rot = HnnWord([("k", g0)])
        items = items[1:] + [("k", g0)]
        # adjacent trailing K-letters merge
        items = list(HnnWord(items).items)
    eps: list[int] = []
    gs: list[KElement] = []
    i = 0
    while i < len(items):
        kind, val = items[i]
        assert kind == "a"
        sign = 1 if val > 0 else -1
        for _ in range(abs(val)):
            eps.append(sign)
            gs.append(K_IDENTITY)
        if i + 1 < len(items) and items[i + 1][0] == "k":
            gs[-1] = items[i + 1][1]
            i += 2
        else:
            i += 1
    return eps, gs, rot


def _conj_A_in_K(kx: KElement, ky: KElement) -> Optional[HnnWord]:
    z = conj_K(kx, ky)
    if z is not None:
        return HnnWord([("k", z)])
    m, q = kx.s, ky.s
    if not m or not q:
        return None
    f = Fraction(q, m)
    if f <= 0 or (f.numerator & (f.numerator - 1)) or (f.denominator & (f.denominator - 1)):
        return None
    i = f.numerator.bit_length() - f.denominator.bit_length()
    z1 = conj_K(kx, KElement(ZERO, m))
    z2 = conj_K(ky, KElement(ZERO, q))
    if z1 is None or z2 is None:
        return None
    return HnnWord([("k", z1), ("a", i)]) * HnnWord([("k", z2)]).inverse()


def _bs_eval(eps, exps) -> KElement:
    out = K_IDENTITY
    for e, m in zip(eps, exps):
        out = out * KElement(ZERO, e) * KElement(Dyadic(m), 0)
    return out


def _conj_A_hyperbolic(cx: HnnWord, cy: HnnWord) -> Optional[HnnWord]:
    ex, gx, rotx = _alternating_form(cx)
    ey, gy, roty = _alternating_form(cy)
    n = len(ex)
    if n != len(ey):
        return None
    for j in range(n):
        if ey[j:] + ey[:j] != ex:
            continue
        hs = gy[j:] + gy[:j]
        pref_items = []
        for t in range(j):
            pref_items.append(("a", ey[t]))
            pref_items.append(("k", gy[t]))
        pref = HnnWord(pref_items)
        seed = next((i for i in range(n) if hs[i].r or gx[i].r), None)
        inner: Optional[HnnWord] = None
        if seed is None:
            xv = _bs_eval(ex, [g.s for g in gx])
            yv = _bs_eval(ex, [h.s for h in hs])
            zk = conj_K(xv, yv)
            if zk is not None:
                blocks = k_to_word_blocks(zk, one_gen="b", stable_gen="a")
                inner = HnnWord.from_blocks(blocks)
        else:
            b0 = _seed_from_position(ex, gx, hs, seed)
            if b0 is not None:
                sol = solve_recurrence(ex, gx, hs, seed, b0)
                if sol is not None and sol[1]:
                    inner = HnnWord([("k", KElement(ZERO, -sol[0][0]))])
        if inner is not None:
            return rotx * inner * pref.inverse() * roty.inverse()
    return None


def _seed_from_position(eps, gs, hs, i) -> Optional[int]:
    r, rp = hs[i].r, gs[i].r
    if bool(r) != bool(rp):
        return None
    if not r:
        return None  # seed position must pin the shift
    if r.m != rp.m:
        return None
    np_ = rp.e - r.e
    if eps[i] == 1:
        if np_ % 2:
            return None
        return np_ // 2
    return 2 * np_


def conj_A(x, y) -> Optional[BlockWord]:
    """Conjugacy in A = <a,b,c | b^a=b^2, c^b=c^2>; witness over a, b, c."""
    wx, wy = britton_reduce_A(x), britton_reduce_A(y)
    cx, px = cyclic_britton_reduce_A(wx)
    cy, py = cyclic_britton_reduce_A(wy)
    kx, ky = cx.as_k(), cy.as_k()
    if (kx is None) != (ky is None):
        return None
    if kx is not None:
        inner = _conj_A_in_K(kx, ky)
    else:
        inner = _conj_A_hyperbolic(cx, cy)
    if inner is None:
        return None
    z = px * inner * py.inverse()
    assert (z.inverse() * wx * z * wy.inverse()).is_identity()
    return z.to_blocks()


# --- conjugacy in H: shared plumbing ----------------------------------------


_TO_B = dict(zip("abc", "cda"))


def _verify(x, y, witness: BlockWord, backend: str = "pc") -> bool:
    zx = witness.inverse() * _as_blocks(x) * witness
    return britton.word_problem(zx, _as_blocks(y), backend=backend)


def _conjugate(x, y, witness: BlockWord, stats: dict, reason: str = "") -> ConjugacyResult:
    if not _verify(x, y, witness):
        raise AssertionError(
            f"internal error: unverified conjugator {witness.to_text()} for "
            f"{_as_blocks(x).to_text()} ~ {_as_blocks(y).to_text()}"
        )
    return ConjugacyResult("conjugate", witness, reason, stats)


# --- the fast path (compressed backend) --------------------------------------


def conj_H_fast(x, y, max_states: Optional[int] = None) -> Optional[ConjugacyResult]:
    """One-candidate route through a nice factor; None when neither word
    has a nice factor after cyclic reduction (caller falls back)."""
    bx, by = _as_blocks(x), _as_blocks(y)
    pc = ReducedCircuit()
    sx, cjx = cyclic_reduce_pc(pc, triples_from_word(pc, bx))
    sy, cjy = cyclic_reduce_pc(pc, triples_from_word(pc, by))
    stats = {"backend": "pc", "path": "fast", "circuit_nodes": len(pc)}

    for swapped, s1, c1, s2, c2 in ((False, sx, cjx, sy, cjy), (True, sy, cjy, sx, cjx)):
        if len(s1) < 2:
            continue
        tight = [tighten_interval(pc, seq, side) for side, seq in s1]
        nice_at = next((i for i, td in enumerate(tight) if td.is_nice()), None)
        if nice_at is None:
            continue
        if len(s2) != len(s1):
            return ConjugacyResult("not_conjugate", reason="length", stats=stats)
        rot1 = s1[nice_at:] + s1[:nice_at]
        prefix1 = [t for _, seq in s1[:nice_at] for t in seq]
        td1 = tight[nice_at]
        side1 = rot1[0][0]
        for r in range(len(s2)):
            if s2[r][0] != side1:
                continue
            rot2 = s2[r:] + s2[:r]
            prefix2 = [t for _, seq in s2[:r] for t in seq]
            td2 = tighten_interval(pc, rot2[0][1], side1)
            j = _candidate_exponent(pc, td1, td2)
            if j is None:
                continue
            inner = "c" if side1 == "A" else "a"
            zc_blocks = list(td2.alpha_tilde) + ([(inner, j)] if j else [])
            zc_blocks += [(g, pc.neg(m)) for g, m in reversed(td1.alpha_tilde)]
            z_triples = blocks_to_triples(pc, zc_blocks, side1)
            # test z * s1rot * z^-1 = s2rot
            lhs = (
                z_triples
                + [t for _, seq in rot1 for t in seq]
                + invert_triples(z_triples)
                + invert_triples([t for _, seq in rot2 for t in seq])
            )
            if reduce_h_pc(pc, lhs):
                continue
            wit_triples = (
                list(c1)
                + prefix1
                + invert_triples(z_triples)
                + invert_triples(prefix2)
                + invert_triples(list(c2))
            )
            if swapped:
                wit_triples = invert_triples(wit_triples)
            witness = materialize_triples(pc, wit_triples)
            if witness is None:
                return ConjugacyResult(
                    "conjugate", None, "witness exceeds the printing cap", stats
                )
            return _conjugate(bx, by, witness, stats)
        return ConjugacyResult("not_conjugate", reason="candidate exhausted", stats=stats)
    return None


def _candidate_exponent(pc: ReducedCircuit, td1, td2):
    """Marking for r1' - r1 when integral, None otherwise (or when either
    tightening carries no candidate data)."""
    if td1.r1 is None or td2.r1 is None:
        return None
    u1, v1 = td1.r1
    u2, v2 = td2.r1
    num = pc.add(pc.shift(u2, v1), pc.neg(pc.shift(u1, v2)))
    den = pc.add(v1, v2)
    if not pc.divisible_pow2(num, den):
        return None
    return pc.shift(num, pc.neg(den))


_GENS_BY_TYPE = {
    "ab": ("b", "a"),
    "bc": ("c", "b"),
    "cd": ("d", "c"),
    "da": ("a", "d"),
}


def materialize_triples(pc: ReducedCircuit, triples, cap_bits: int = 1 << 16) -> Optional[BlockWord]:
    """Spell a triple sequence as a word over a..d, unless exponents blow
    past the cap."""
    out: list[tuple[str, int]] = []
    try:
        for t in triples:
            one, stable = _GENS_BY_TYPE[t.type]
            v = pc.eval(t.v, cap_bits)
            u = pc.eval(t.u, cap_bits)
            w = pc.eval(t.w, cap_bits)
            out.extend([(stable, v), (one, u), (stable, w)])
    except CapExceeded:
        return None
    return BlockWord(out)


# --- the general path ---------------------------------------------------------


@dataclass
class _TightLetter:
    tag: str
    u: BlockWord       # letter = u * core * v in its factor, true coords
    core: HnnWord      # stored (A) coordinates
    v: BlockWord

    @property
    def kind(self) -> str:
        k = self.core.as_k()
        if k is None:
            return "stable"
        return "shared" if not k.r else "single"


def _tight_letter(letter: Letter) -> _TightLetter:
    tf = tighten_A(letter.word)
    u, v = tf.u, tf.v
    if letter.tag == "B":
        u, v = swap_ac(u), swap_ac(v)
    return _TightLetter(letter.tag, u, tf.core, v)


def _leading_r(core: HnnWord) -> Dyadic:
    if core.items and core.items[0][0] == "k":
        return core.items[0][1].r
    return ZERO


def _case_machine(tx: _TightLetter, ty: _TightLetter):
    """Classify the solution set of  gamma * x-core = y-core * gamma'.

    Returns ("empty",), ("singleton", j) with the candidate inner-generator
    exponent, ("affine", delta, s) or ("dyck", s)."""
    kx, ky = tx.core.as_k(), ty.core.as_k()
    if (kx is None) != (ky is None):
        return ("empty",)
    if kx is None:
        j = _leading_r(ty.core) - _leading_r(tx.core)
        if not j.is_integer():
            return ("empty",)
        return ("singleton", j.as_integer())
    if bool(kx.r) != bool(ky.r):
        return ("empty",)
    if kx.r:
        if kx.s != ky.s:
            return ("empty",)
        return ("affine", kx.r - ky.r, kx.s)
    if kx.s != ky.s:
        return ("empty",)
    return ("dyck", kx.s)


def _express_true(letter_tag: str, w: HnnWord) -> Optional[BlockWord]:
    c = express_in_C(w)
    if c is None:
        return None
    return c if letter_tag == "A" else swap_ac(c)


def _backward_propagate(lx, ly, gamma: BlockWord, upto: int) -> Optional[BlockWord]:
    """Given gamma_{upto}, pull the conjugator chain back to gamma_0.

    gamma_i x_i = y_i gamma_{i+1}, all letters in one factor each, so
    gamma_i = y_i gamma_{i+1} x_i^-1 must land in C at every step.
    """
    for i in range(upto - 1, -1, -1):
        tag = lx[i].tag
        stored = gamma if tag == "A" else swap_ac(gamma)
        w = ly[i].word * HnnWord.from_blocks(stored) * lx[i].word.inverse()
        gamma_true = _express_true(tag, w)
        if gamma_true is None:
            return None
        gamma = gamma_true
    return gamma


def _pipeline_connectors(tights_x, tights_y):
    """Free-multiplication pieces between consecutive case machines:
    after machine i the chain applies w -> reduced(p_i w q_i)."""
    n = len(tights_x)
    ps, qs = [], []
    for i in range(n):
        nxt = (i + 1) % n
        p = tights_y[nxt].u.inverse() * tights_y[i].v.inverse()
        q = tights_x[i].v * tights_x[nxt].u
        ps.append(p)
        qs.append(q)
    return ps, qs


def _axis_for(tag: str) -> str:
    return "a" if tag == "A" else "c"


def _inner_for(tag: str) -> str:
    return "c" if tag == "A" else "a"


def _try_rotation(lx, ly, max_states: int):
    """Decide whether z * x-hat * z^-1 = y-hat for some z in C, where
    x-hat, y-hat are the aligned cyclically reduced letter sequences.
    Returns ("yes", z_blocks), ("no", None) or ("cap", None)."""
    n = len(lx)
    tx = [_tight_letter(l) for l in lx]
    ty = [_tight_letter(l) for l in ly]
    cases = [_case_machine(a, b) for a, b in zip(tx, ty)]
    if any(c[0] == "empty" for c in cases):
        return "no", None

    def finish(candidate: Optional[BlockWord], position: int):
        if candidate is None:
            return None
        gamma = BlockWord(ty[position].u.blocks) * candidate * tx[position].u.inverse()
        z = _backward_propagate(lx, ly, gamma, position)
        if z is None:
            return None
        if _test_chain(lx, ly, z):
            return z
        return None

    for i, c in enumerate(cases):
        if c[0] == "singleton":
            inner = _inner_for(lx[i].tag)
            z = finish(BlockWord([(inner, c[1])]), i)
            return ("yes", z) if z is not None else ("no", None)

    ps, qs = _pipeline_connectors(tx, ty)
    for i in range(n):
        nxt = (i + 1) % n
        if cases[i][0] == "dyck" and cases[nxt][0] == "dyck":
            continue
        # Between two non-doubling case machines the interface value is
        # pinned to finitely many candidates: machine i emits powers of
        # gen_i (or balanced words), the connector w -> p w q can only
        # cancel as many letters as it carries, and machine nxt demands a
        # power of gen_n (or a balanced word).  Note gen_i equals the
        # height axis of machine nxt and vice versa, the sides alternate.
        p, q = ps[i], qs[i]
        gen_i = _inner_for(lx[i].tag)
        gen_n = _inner_for(lx[nxt].tag)
        candidates: list[BlockWord] = []
        if cases[i][0] == "affine" and cases[nxt][0] == "affine":
            lim = p.letter_length() + q.letter_length()
            for m in range(-lim, lim + 1):
                w = p * BlockWord([(gen_i, m)]) * q
                if all(g == gen_n for g, _ in w.blocks):
                    candidates.append(w)
        elif cases[i][0] == "affine":
            # next is a doubling machine: its input must balance in gen_i
            m = -(p.exponent_sum(gen_i) + q.exponent_sum(gen_i))
            candidates.append(p * BlockWord([(gen_i, m)]) * q)
        else:
            # doubling then affine: machine i emits gen_n-balanced words,
            # so the pure gen_n power entering machine nxt is forced
            t = p.exponent_sum(gen_n) + q.exponent_sum(gen_n)
            candidates.append(BlockWord([(gen_n, t)]))
        for w in candidates:
            z = finish(w, nxt)
            if z is not None:
                return "yes", z
        return "no", None

    # every case is a doubling relation: assemble the automaton
    machines = []
    for i in range(n):
        machines.append(DyckDolt(cases[i][1], axis=_axis_for(lx[i].tag), height_cap=None))
    total = sum(p.letter_length() + q.letter_length() for p, q in zip(ps, qs))
    N = 1 + total
    H = 0
    while (1 << (1 << H)) < N + H:
        H += 1
    maxT = 0
    parts = []
    for i in range(n):
        Li = ps[i].letter_length() + qs[i].letter_length()
        maxT = max(maxT, abs(cases[i][1]) * (1 << min(H + Li, 40)))
        parts.append(DyckDolt(cases[i][1], axis=_axis_for(lx[i].tag), height_cap=H))
        parts.append(free_mult_dolt(ps[i], qs[i]))
    pipeline = compose(*parts)
    B = (1 << maxT) if maxT <= 20000 else bit_bound(maxT)
    automaton = fixed_point_automaton(pipeline, N, B)
    status, w = find_accepted(automaton, max_states)
    if status == "cap":
        return "cap", None
    if status == "empty":
        return "no", None
    z = finish(w, 0)
    if z is None:
        raise AssertionError("fixed point failed to yield a conjugator")
    return "yes", z


def _test_chain(lx, ly, z: BlockWord) -> bool:
    xb = BlockWord([b for l in lx for b in l.value_blocks().blocks])
    yb = BlockWord([b for l in ly for b in l.value_blocks().blocks])
    return britton.word_problem(z * xb * z.inverse(), yb, backend="pc")


def _letters_blocks(letters) -> BlockWord:
    return BlockWord([b for l in letters for b in l.value_blocks().blocks])


def conj_H_general(x, y, max_states: Optional[int] = None) -> ConjugacyResult:
    bx, by = _as_blocks(x), _as_blocks(y)
    cap = _max_states(max_states)
    stats = {"backend": "exact+pc", "path": "general"}

    for k in (0, 1):
        xk, yk = psi_blocks(bx, k), psi_blocks(by, k)
        lx, cjx = cyclic_britton_reduce_H(xk)
        ly, cjy = cyclic_britton_reduce_H(yk)
        if max(len(lx), len(ly)) < 2:
            continue
        if len(lx) != len(ly):
            return ConjugacyResult("not_conjugate", reason="length", stats=stats)
        hit_cap = False
        for r in range(len(ly)):
            if ly[r].tag != lx[0].tag:
                continue
            rot = ly[r:] + ly[:r]
            status, zc = _try_rotation(lx, rot, cap)
            if status == "cap":
                hit_cap = True
                continue
            if status == "yes":
                Cx = _letters_blocks(cjx)
                Cy = _letters_blocks(cjy)
                R = _letters_blocks(ly[:r])
                zb = Cx * zc.inverse() * R.inverse() * Cy.inverse()
                zb = psi_blocks(zb, (4 - k) % 4)
                return _conjugate(bx, by, zb, {**stats, "rotation": r, "psi": k})
        if hit_cap:
            return ConjugacyResult(
                "inconclusive", reason="state cap during fixed-point search", stats=stats
            )
        return ConjugacyResult("not_conjugate", stats=stats)

    # base case: both words (and their psi-images) are single letters
    lx, cjx = cyclic_britton_reduce_H(bx)
    ly, cjy = cyclic_britton_reduce_H(by)
    if not lx or not ly:
        if not lx and not ly:
            return _conjugate(bx, by, BlockWord(), stats)
        return ConjugacyResult("not_conjugate", stats=stats)

    for k in (0, 1):
        xk, yk = psi_blocks(bx, k), psi_blocks(by, k)
        lxk, cjxk = cyclic_britton_reduce_H(xk)
        lyk, cjyk = cyclic_britton_reduce_H(yk)
        zb = _single_letter_conj(lxk[0], lyk[0], _letters_blocks(cjxk), _letters_blocks(cjyk))
        if zb is not None:
            return _conjugate(bx, by, psi_blocks(zb, (4 - k) % 4), {**stats, "psi": k})
    return ConjugacyResult("not_conjugate", stats=stats)


def _single_letter_conj(
    letx: Letter, lety: Letter, cx: BlockWord, cy: BlockWord
) -> Optional[BlockWord]:
    """Conjugacy of two one-letter words inside a common factor."""
    for tag in ("A", "B"):
        wx = _letter_in_factor(letx, tag)
        wy = _letter_in_factor(lety, tag)
        if wx is None or wy is None:
            continue
        z = conj_A(wx, wy)
        if z is None:
            continue
        if tag == "B":
            z = BlockWord((_TO_B[g], e) for g, e in z.blocks)
        return cx * z * cy.inverse()
    return None


def _letter_in_factor(letter: Letter, tag: str) -> Optional[HnnWord]:
    """The letter as an element of the requested factor, in stored
    (A-alphabet) coordinates; None when it does not lie there."""
    if letter.tag == tag:
        return letter.word
    c = express_in_C(letter.word)
    if c is None:
        return None
    return HnnWord.from_blocks(swap_ac(c))


# --- dispatcher ----------------------------------------------------------------


def conj_H(x, y, strategy: str = "auto", max_states: Optional[int] = None) -> ConjugacyResult:
    bx, by = _as_blocks(x), _as_blocks(y)
    if strategy not in ("auto", "fast", "general", "oracle"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy in ("auto", "fast", "oracle"):
        fast = conj_H_fast(bx, by, max_states)
        if fast is not None:
            if strategy == "oracle":
                _oracle_check(bx, by, fast)
            return fast
        if strategy == "fast":
            return ConjugacyResult("inconclusive", reason="no nice factor")
    out = conj_H_general(bx, by, max_states)
    if strategy == "oracle":
        _oracle_check(bx, by, out)
    return out


def _oracle_check(x, y, result: ConjugacyResult, max_len: int = 4) -> None:
    found = bounded_conjugator_search(x, y, max_len)
    if found is not None and result.verdict == "not_conjugate":
        raise AssertionError(f"oracle found conjugator {found.to_text()} against a negative verdict")


def bounded_conjugator_search(
    x, y, max_len: int, alphabet: str = "abcdABCD", backend: str = "pc"
) -> Optional[BlockWord]:
    """Exhaustive search for a conjugator among short reduced words."""
    bx, by = _as_blocks(x), _as_blocks(y)
    frontier = [""]
    if britton.word_problem(bx, by, backend=backend):
        return BlockWord()
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for ch in alphabet:
                if w and w[-1] == ch.swapcase():
                    continue
                z = w + ch
                nxt.append(z)
                zb = BlockWord.from_flat(z)
                if britton.word_problem(zb.inverse() * bx * zb, by, backend=backend):
                    return zb
        frontier = nxt
    return None
