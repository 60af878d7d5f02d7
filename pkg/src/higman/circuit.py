"""Power circuits: compressed arithmetic on towers of exponents.

A power circuit is a finite DAG with edge weights in {-1, 0, +1}.  Every
node P evaluates to eps(P) = 2^eps(Lambda_P), where Lambda_P is the
*marking* formed by P's outgoing edges, and a marking M (a map from
nodes to {-1, 0, +1}) evaluates to sum M(P) * eps(P).  Circuits of size
n reach values like 2^2^...^2 (n deep), so values are never
materialised; all decisions reduce to sign tests.

:class:`ReducedCircuit` keeps nodes with pairwise distinct values in
ascending order and annotates consecutive nodes with their exponent gap
clipped at 64.  A marking difference is then compared by folding its
digits top-down: across a known gap the accumulator shifts exactly, and
across a clipped ("huge") gap a nonzero accumulator strictly dominates
everything below because all remaining digits are bounded by 2 and node
values at least double step to step.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .dyadic import CapExceeded, Dyadic, KElement

GAP_CLIP = 64          # exact gaps tracked up to this many doublings
SMALL_BITS = 4096      # node values cached exactly up to this bit length
MAX_CONST = 1 << 60    # magnitude allowed for additive constants in sign tests


class InvalidCircuit(ArithmeticError):
    """A node evaluated to a non-integer (negative exponent)."""


Marking = dict  # node id -> +1/-1, no zeros stored


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


class ReducedCircuit:
    """Power circuit with pairwise distinct node values, kept sorted."""

    def __init__(self):
        self.lam: dict[int, Marking] = {}      # node -> its edge marking
        self.order: list[int] = []             # node ids, ascending value
        self.pos: dict[int, int] = {}          # node -> index in order
        self.gap: list[Optional[int]] = []     # exponent gap i -> i+1, clipped
        self.small: dict[int, Optional[int]] = {}  # exact value if modest
        self._next_id = 0

    # -- diagnostics --------------------------------------------------

    def __len__(self) -> int:
        return len(self.order)

    def node_ids(self) -> list[int]:
        return list(self.order)

    # -- sign machinery -----------------------------------------------

    def _digit_sign(self, digits: dict, const: int = 0) -> int:
        """Sign of  sum digits[P] * eps(P) + const  with |digits| <= 2."""
        if abs(const) > MAX_CONST:
            raise ValueError("constant too large for a safe sign test")
        items = sorted(
            ((self.pos[p], dv) for p, dv in digits.items() if dv), reverse=True
        )
        acc = 0
        cur = -1
        for pi, dv in items:
            if acc == 0:
                acc, cur = dv, pi
                continue
            shift = 0
            huge = False
            for j in range(pi, cur):
                g = self.gap[j]
                if g is None or shift + g > 4 * GAP_CLIP:
                    huge = True
                    break
                shift += g
            if huge:
                return _sgn(acc)
            acc = (acc << shift) + dv
            cur = pi
        if acc == 0:
            return _sgn(const)
        sv = self.small[self.order[cur]]
        if sv is not None:
            return _sgn(acc * sv + const)
        return _sgn(acc)

    def _exp_gap_clipped(self, lo: int, hi: int) -> Optional[int]:
        """eps(Lambda_hi) - eps(Lambda_lo) if <= GAP_CLIP, else None."""
        slo, shi = self.small.get(lo), self.small.get(hi)
        if slo is not None and shi is not None:
            d = shi.bit_length() - slo.bit_length()
            return d if d <= GAP_CLIP else None
        diff = _digit_add(self.lam[hi], _digit_neg(self.lam[lo]))
        a, b = 1, GAP_CLIP + 1
        if self._digit_sign(diff, -b) >= 0:
            return None
        while a < b:
            mid = (a + b) // 2
            s = self._digit_sign(diff, -mid)
            if s == 0:
                return mid
            if s > 0:
                a = mid + 1
            else:
                b = mid
        return a if self._digit_sign(diff, -a) == 0 else None

    # -- node construction ---------------------------------------------

    def make_node(self, marking: Marking) -> int:
        """Node of value 2^eps(marking); reuses an equal-valued node."""
        if marking and self._digit_sign(marking) < 0:
            raise InvalidCircuit("node exponent would be negative")
        lo, hi = 0, len(self.order)
        while lo < hi:
            mid = (lo + hi) // 2
            diff = _digit_add(marking, _digit_neg(self.lam[self.order[mid]]))
            s = self._digit_sign(diff)
            if s == 0:
                return self.order[mid]
            if s < 0:
                hi = mid
            else:
                lo = mid + 1
        node = self._next_id
        self._next_id += 1
        self.lam[node] = dict(marking)
        exp = self._small_exponent(marking)
        self.small[node] = (1 << exp) if exp is not None and exp <= SMALL_BITS else None
        self.order.insert(lo, node)
        for i, p in enumerate(self.order):
            self.pos[p] = i
        self.gap.insert(lo, None)
        if lo + 1 < len(self.order):
            self.gap[lo] = self._exp_gap_clipped(node, self.order[lo + 1])
        if lo > 0:
            self.gap[lo - 1] = self._exp_gap_clipped(self.order[lo - 1], node)
        if self.gap:
            self.gap[len(self.order) - 1] = None
        return node

    def _small_exponent(self, marking: Marking) -> Optional[int]:
        total = 0
        for p, dv in marking.items():
            sv = self.small[p]
            if sv is None:
                return None
            total += dv * sv
            if abs(total) > MAX_CONST:
                return None
        if total < 0:
            raise InvalidCircuit("node exponent would be negative")
        return total

    def leaf(self) -> int:
        """The node of value 1."""
        return self.make_node({})

    def double_node(self, p: int) -> int:
        i = self.pos[p]
        if i + 1 < len(self.order) and self.gap[i] == 1:
            return self.order[i + 1]
        lam = _digit_add(self.lam[p], {self.leaf(): 1})
        return self.make_node(self.normalize(lam))

    def normalize(self, digits: dict) -> Marking:
        """Carry-normalise a digit vector into a proper +-1 marking."""
        digits = {p: d for p, d in digits.items() if d}
        while True:
            bad = None
            for p, d in digits.items():
                if abs(d) >= 2 and (bad is None or self.pos[p] < self.pos[bad]):
                    bad = p
            if bad is None:
                return digits
            d = digits[bad]
            q, r = divmod(d, 2)  # r in {0, 1}
            if r:
                digits[bad] = r
            else:
                del digits[bad]
            nd = self.double_node(bad)
            digits[nd] = digits.get(nd, 0) + q
            if digits.get(nd) == 0:
                del digits[nd]

    # -- marking arithmetic ---------------------------------------------

    def add(self, m1: Marking, m2: Marking) -> Marking:
        return self.normalize(_digit_add(m1, m2))

    @staticmethod
    def neg(m: Marking) -> Marking:
        return {p: -d for p, d in m.items()}

    def sign(self, m: Marking) -> int:
        if not m:
            return 0
        top = max(m, key=self.pos.__getitem__)
        return m[top]

    def cmp(self, m1: Marking, m2: Marking) -> int:
        return self._digit_sign(_digit_add(m1, _digit_neg(m2)))

    def cmp_const(self, m: Marking, k: int) -> int:
        return self._digit_sign(dict(m), -k)

    def shift(self, m: Marking, by: Marking) -> Marking:
        """The marking of value eps(m) * 2^eps(by)."""
        if not m or not by:
            return dict(m)
        out: dict = {}
        for p, d in m.items():
            node = self.make_node(self.normalize(_digit_add(self.lam[p], by)))
            out[node] = out.get(node, 0) + d
        return self.normalize(out)

    def divisible_pow2(self, m: Marking, by: Marking) -> bool:
        """Is eps(m) divisible by 2^eps(by)?  (by >= 0 assumed.)"""
        if not m:
            return True
        low = min(m, key=self.pos.__getitem__)
        diff = _digit_add(self.lam[low], _digit_neg(by))
        return self._digit_sign(diff) >= 0

    def const(self, k: int) -> Marking:
        """Marking with value k, built on a chain of doubling nodes."""
        if k == 0:
            return {}
        sign = _sgn(k)
        node = self.leaf()
        out: dict = {}
        n = abs(k)
        i = 0
        while True:
            if n & (1 << i):
                out[node] = sign
                n ^= 1 << i
            if not n:
                return out
            node = self.double_node(node)
            i += 1

    def eval(self, m: Marking, cap_bits: int = 1 << 20) -> int:
        memo: dict[int, int] = {}

        def node_val(p: int) -> int:
            sv = self.small[p]
            if sv is not None:
                return sv
            if p in memo:
                return memo[p]
            e = mark_val(self.lam[p])
            if e < 0:
                raise InvalidCircuit("negative node exponent")
            if e > cap_bits:
                raise CapExceeded(f"node value needs {e} bits")
            memo[p] = 1 << e
            return memo[p]

        def mark_val(m: Marking) -> int:
            total = 0
            for p, d in m.items():
                total += d * node_val(p)
                if total.bit_length() > cap_bits:
                    raise CapExceeded("marking value exceeds cap")
            return total

        return mark_val(m)

    # -- garbage collection ----------------------------------------------

    def gc(self, live: Iterable[Marking]) -> None:
        keep: set[int] = set()
        stack: list[int] = []
        for m in live:
            stack.extend(m.keys())
        while stack:
            p = stack.pop()
            if p in keep:
                continue
            keep.add(p)
            stack.extend(self.lam[p].keys())
        if len(keep) == len(self.order):
            return
        self.order = [p for p in self.order if p in keep]
        self.lam = {p: self.lam[p] for p in self.order}
        self.small = {p: self.small[p] for p in self.order}
        self.pos = {p: i for i, p in enumerate(self.order)}
        self.gap = [
            self._exp_gap_clipped(self.order[i], self.order[i + 1])
            for i in range(len(self.order) - 1)
        ]
        self.gap.append(None)
        if not self.order:
            self.gap = []


def _digit_add(m1: dict, m2: dict) -> dict:
    out = dict(m1)
    for p, d in m2.items():
        out[p] = out.get(p, 0) + d
        if not out[p]:
            del out[p]
    return out


def _digit_neg(m: dict) -> dict:
    return {p: -d for p, d in m.items()}


# -- plain (unreduced) circuits ---------------------------------------------


class PowerCircuit:
    """Sparse unreduced circuit, the exchange format for dumps and tests."""

    def __init__(self):
        self.delta: dict[int, dict[int, int]] = {}
        self._next = 0

    def add_node(self, edges: Optional[dict[int, int]] = None) -> int:
        p = self._next
        self._next += 1
        self.delta[p] = {}
        if edges:
            for q, s in edges.items():
                self.set_edge(p, q, s)
        return p

    def set_edge(self, p: int, q: int, sign: int) -> None:
        if p == q:
            raise InvalidCircuit("self-loop")
        if q not in self.delta:
            raise InvalidCircuit(f"unknown target node {q}")
        if sign:
            self.delta[p][q] = sign
        else:
            self.delta[p].pop(q, None)
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        seen: dict[int, int] = {}

        def visit(p: int) -> None:
            state = seen.get(p)
            if state == 1:
                raise InvalidCircuit("edge support must be acyclic")
            if state == 2:
                return
            seen[p] = 1
            for q in self.delta[p]:
                visit(q)
            seen[p] = 2

        for p in self.delta:
            visit(p)

    def eval_node(self, p: int, cap_bits: int = 1 << 20) -> int:
        memo: dict[int, int] = {}

        def nv(p: int) -> int:
            if p in memo:
                return memo[p]
            e = sum(s * nv(q) for q, s in self.delta[p].items())
            if e < 0:
                raise InvalidCircuit("non-integer node value")
            if e > cap_bits:
                raise CapExceeded(f"node value needs {e} bits")
            memo[p] = 1 << e
            return memo[p]

        return nv(p)

    def eval_marking(self, m: dict[int, int], cap_bits: int = 1 << 20) -> int:
        return sum(s * self.eval_node(p, cap_bits) for p, s in m.items())

    def to_json_dict(self, markings: Optional[dict[str, dict]] = None) -> dict:
        out = {
            "nodes": sorted(self.delta),
            "edges": [
                [p, q, s] for p in sorted(self.delta) for q, s in sorted(self.delta[p].items())
            ],
        }
        if markings:
            out["markings"] = {name: sorted(m.items()) for name, m in markings.items()}
        return out


def reduce_circuit(
    pc: PowerCircuit, markings: Iterable[dict]
) -> tuple[ReducedCircuit, list[Marking]]:
    """Rebuild a circuit with pairwise distinct sorted node values.

    Every supplied marking is remapped onto the reduced circuit with its
    value unchanged.
    """
    rc = ReducedCircuit()
    mapped: dict[int, int] = {}
    done: set[int] = set()

    def visit(p: int) -> None:
        if p in done:
            return
        done.add(p)
        for q in pc.delta[p]:
            visit(q)
        digits: dict = {}
        for q, s in pc.delta[p].items():
            digits[mapped[q]] = digits.get(mapped[q], 0) + s
        mapped[p] = rc.make_node(rc.normalize(digits))

    for p in pc.delta:
        visit(p)
    out = []
    for m in markings:
        digits: dict = {}
        for p, s in m.items():
            digits[mapped[p]] = digits.get(mapped[p], 0) + s
        out.append(rc.normalize(digits))
    return rc, out


# -- triple markings ---------------------------------------------------------
#
# An element (r, s) of Z[1/2] x| Z is stored as [u, v, w] = (2^-v u, v + w)
# with v >= 0 >= w.  A type tag names which Baumslag-Solitar piece of
# Higman's group the element lives in:
#
#     H = ( G_ab *_<b> G_bc ) *_C ( G_cd *_<d> G_da ),
#
# G_xy = <x, y | y^x = y^2>.  The tag determines the generators: the u
# slot holds a power of the doubled generator (b, c, d, a respectively)
# and v, w hold powers of the conjugating one (a, b, c, d).

TYPES = ("ab", "bc", "cd", "da")
A_TYPES = ("ab", "bc")
B_TYPES = ("cd", "da")

# generator carried by the u slot / by the v, w slots for each type
U_GEN = {"ab": "b", "bc": "c", "cd": "d", "da": "a"}
V_GEN = {"ab": "a", "bc": "b", "cd": "c", "da": "d"}


class TripleMarking:
    __slots__ = ("pc", "u", "v", "w", "type")

    def __init__(self, pc: ReducedCircuit, u: Marking, v: Marking, w: Marking, type: str):
        if type not in TYPES:
            raise ValueError(f"bad triple type {type!r}")
        self.pc, self.u, self.v, self.w, self.type = pc, u, v, w, type
        if pc.sign(v) < 0 or pc.sign(w) > 0:
            raise ValueError("triple requires v >= 0 >= w")

    def side(self) -> str:
        return "A" if self.type in A_TYPES else "B"

    def weight(self) -> int:
        return len(self.u) + len(self.v) + len(self.w)

    def value(self, cap_bits: int = 1 << 20) -> KElement:
        u = self.pc.eval(self.u, cap_bits)
        v = self.pc.eval(self.v, cap_bits)
        w = self.pc.eval(self.w, cap_bits)
        return KElement(Dyadic(u, -v), v + w)

    def __repr__(self) -> str:
        return f"[{_brief(self.u)},{_brief(self.v)},{_brief(self.w)}]_{self.type}"


def _brief(m: Marking) -> str:
    return f"<{len(m)}>"


def tm_from_ints(pc: ReducedCircuit, u: int, v: int, w: int, type: str) -> TripleMarking:
    return TripleMarking(pc, pc.const(u), pc.const(v), pc.const(w), type)


def tm_identity(pc: ReducedCircuit, type: str) -> TripleMarking:
    return tm_from_ints(pc, 0, 0, 0, type)


def tm_is_identity(t: TripleMarking) -> bool:
    if t.u:
        return False
    if not t.v and not t.w:
        return True
    return t.pc.cmp(t.v, t.pc.neg(t.w)) == 0


_MUL_OK = {
    ("ab", "ab"): "ab",
    ("ab", "bc"): "bc",
    ("bc", "bc"): "bc",
    ("bc", "ab"): "ab",
    ("cd", "cd"): "cd",
    ("cd", "da"): "da",
    ("da", "da"): "da",
    ("da", "cd"): "cd",
}


def tm_multiply(t1: TripleMarking, t2: TripleMarking) -> TripleMarking:
    """[u,v,w] * [u',v',w'] = [2^v' u + 2^-w u', v+v', w+w'], renormalised.

    This is the product of Z[1/2] x| Z in triple coordinates.  Merging a
    letter across the two pieces of one side goes through tm_swap first;
    this operation itself is coordinate arithmetic and never reinterprets
    generators.
    """
    if (t1.type, t2.type) not in _MUL_OK:
        raise ValueError(f"cannot multiply {t1.type} by {t2.type}")
    pc = t1.pc
    out_type = _MUL_OK[(t1.type, t2.type)]
    u = pc.add(pc.shift(t1.u, t2.v), pc.shift(t2.u, pc.neg(t1.w)))
    v = pc.add(t1.v, t2.v)
    w = pc.add(t1.w, t2.w)
    # restore v >= 0 >= w
    if pc.sign(w) > 0:
        u = pc.shift(u, w)
        v = pc.add(v, w)
        w = {}
    if pc.sign(v) < 0:
        u = pc.shift(u, pc.neg(v))
        w = pc.add(w, v)
        v = {}
    if not u:
        # pure power of the v/w generator: keep one canonical slot
        s = pc.add(v, w)
        v, w = (s, {}) if pc.sign(s) >= 0 else ({}, s)
    return TripleMarking(pc, u, v, w, out_type)


def tm_invert(t: TripleMarking) -> TripleMarking:
    return TripleMarking(t.pc, t.pc.neg(t.u), t.pc.neg(t.w), t.pc.neg(t.v), t.type)


_SWAP = {"ab": "bc", "bc": "ab", "cd": "da", "da": "cd"}


def tm_swap(t: TripleMarking) -> TripleMarking:
    """Rewrite a power of the shared generator in the partner type."""
    pc = t.pc
    if t.type in ("ab", "cd"):
        # [u,0,0] is a power of the shared generator (b resp. d)
        if t.v or t.w:
            raise ValueError("swap needs a pure [u,0,0] triple")
        if pc.sign(t.u) >= 0:
            return TripleMarking(pc, {}, dict(t.u), {}, _SWAP[t.type])
        return TripleMarking(pc, {}, {}, dict(t.u), _SWAP[t.type])
    # [0,v,w] in bc/da is the shared generator to the v+w
    if t.u:
        raise ValueError("swap needs a pure [0,v,w] triple")
    u = pc.add(t.v, t.w)
    return TripleMarking(pc, u, {}, {}, _SWAP[t.type])


def tm_split(t: TripleMarking, side: str) -> Optional[tuple[TripleMarking, TripleMarking]]:
    """Split off the u-generator power, keeping the v/w power whole.

    side 'left' produces (u-part, vw-part) and needs 2^-v u integral;
    side 'right' produces (vw-part, u-part) and needs 2^w u integral.
    Returns None when the divisibility fails.
    """
    pc = t.pc
    if side == "left":
        if not pc.divisible_pow2(t.u, t.v):
            return None
        head = TripleMarking(pc, pc.shift(t.u, pc.neg(t.v)), {}, {}, t.type)
        tail = TripleMarking(pc, {}, dict(t.v), dict(t.w), t.type)
        return head, tail
    if side == "right":
        if not pc.divisible_pow2(t.u, pc.neg(t.w)):
            return None
        head = TripleMarking(pc, {}, dict(t.v), dict(t.w), t.type)
        tail = TripleMarking(pc, pc.shift(t.u, t.w), {}, {}, t.type)
        return head, tail
    raise ValueError(f"side must be left or right, got {side!r}")


def tm_edge_exponent(t: TripleMarking) -> Optional[Marking]:
    """Marking e with t = (shared generator)^e, if t lies in the shared
    subgroup of its side's sub-amalgam."""
    pc = t.pc
    if t.type in ("ab", "cd"):
        if pc.cmp(t.v, pc.neg(t.w)) != 0:
            return None
        if not pc.divisible_pow2(t.u, t.v):
            return None
        return pc.shift(t.u, pc.neg(t.v))
    if t.u:
        return None
    return pc.add(t.v, t.w)
