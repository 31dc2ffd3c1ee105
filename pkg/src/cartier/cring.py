"""Normal-form arithmetic for the local Cartier ring over O.

Elements are finite sums  sum V^i <a_ij> F^j  stored as a map
(i, j) -> coefficient, with truncation caps on both exponents.  The
relations driving the rewriting are

    <a><b> = <ab>,   F V = p,   <a> V = V <a^p>,   <a^p> F = F <a>,
    <a> + <b> = <a+b> + sum_{n>0} V^n <r_{p^n}(a,b)> F^n,

with the addition polynomials supplied by :mod:`cartier.witt`.  V F is kept
as the monomial V<1>F; only F V collapses, to the central scalar p whose own
normal form has an infinite V^k..F^k tail truncated at the caps.

Every element records whether its caps discarded sum-relation tails;
equality on truncated elements is only meaningful at matching caps.

Products are rewritten left to right: brackets are pushed right across V,
pulled across F, then inner F V pairs collapse innermost-first; this
terminates by the (V-degree, F-degree) lexicographic measure.

Values are immutable; operations are pure.
"""

from __future__ import annotations

from .dvr import DvrElement, RamifiedRing
from .errors import InsufficientDeltaPrecision, RingMismatch
from .series import DeltaVector
from .witt import scalar_witt_coords, witt_add_poly

DEFAULT_CAP = 4


def _accumulate(ring, terms: dict, i: int, j: int, a: DvrElement,
                v_cap: int, f_cap: int) -> bool:
    """Fold coefficient ``a`` into slot (i, j) with sum-relation cascades.

    Returns True when a (possibly) nonzero tail was discarded at the caps.
    """
    trunc = False
    queue = [(i, j, a)]
    while queue:
        i, j, a = queue.pop()
        if a.is_zero():
            continue
        if i > v_cap or j > f_cap:
            trunc = True
            continue
        if (i, j) not in terms:
            terms[(i, j)] = a
            continue
        b = terms.pop((i, j))
        s = a + b
        if not s.is_zero():
            terms[(i, j)] = s
        # corrections r_{p^n}(a, b) land at (i+n, j+n); every monomial is
        # divisible by a*b, so they die once the joint valuation exceeds
        # the working precision
        vab = a._capped_val() + b._capped_val()
        prec = min(a.precision + b._capped_val(), b.precision + a._capped_val())
        if vab >= prec:
            continue
        n = 1
        while True:
            ii, jj = i + n, j + n
            if ii > v_cap or jj > f_cap:
                trunc = True  # the tail is generically infinite
                break
            r = witt_add_poly(ring.p, n).eval(a, b)
            if not (isinstance(r, int) or r.is_zero()):
                queue.append((ii, jj, r))
            n += 1
    return trunc


class CartierElement:
    __slots__ = ("ring", "terms", "v_cap", "f_cap", "truncated")

    def __init__(self, ring: RamifiedRing, terms=None, v_cap=DEFAULT_CAP,
                 f_cap=DEFAULT_CAP, truncated=False):
        self.ring = ring
        self.v_cap = v_cap
        self.f_cap = f_cap
        clean = {}
        trunc = truncated
        for (i, j), a in (terms or {}).items():
            if a.is_zero():
                continue
            if i > v_cap or j > f_cap:
                trunc = True
                continue
            clean[(i, j)] = a
        self.terms = clean
        self.truncated = trunc

    # -- constructors --

    @classmethod
    def zero(cls, ring, **kw):
        return cls(ring, {}, **kw)

    @classmethod
    def one(cls, ring, **kw):
        return cls(ring, {(0, 0): ring.one()}, **kw)

    @classmethod
    def v_gen(cls, ring, **kw):
        return cls(ring, {(1, 0): ring.one()}, **kw)

    @classmethod
    def f_gen(cls, ring, **kw):
        return cls(ring, {(0, 1): ring.one()}, **kw)

    @classmethod
    def bracket(cls, a: DvrElement, **kw):
        return cls(a.ring, {(0, 0): a}, **kw)

    @classmethod
    def monomial(cls, ring, i, j, a, **kw):
        return cls(ring, {(i, j): a}, **kw)

    @classmethod
    def scalar_int(cls, ring, n: int, v_cap=DEFAULT_CAP, f_cap=DEFAULT_CAP):
        """The central scalar n = sum_k V^k <w_k(n)> F^k, truncated at caps.

        Only 0, 1 and (for odd p) -1 have finite coordinate tails; anything
        else is flagged truncated.
        """
        levels = max(0, min(v_cap, f_cap))
        ws = scalar_witt_coords(n, ring.p, levels)
        terms = {(k, k): ring.from_int(w) for k, w in enumerate(ws)}
        exact = n in (0, 1) or (n == -1 and ring.p != 2)
        return cls(ring, terms, v_cap=v_cap, f_cap=f_cap,
                   truncated=not exact)

    # -- arithmetic --

    def _common(self, other):
        if self.ring != other.ring:
            raise RingMismatch("Cartier elements over different rings")
        return (min(self.v_cap, other.v_cap), min(self.f_cap, other.f_cap),
                self.truncated or other.truncated)

    def __add__(self, other):
        v_cap, f_cap, trunc = self._common(other)
        terms = dict(self.terms)
        for (i, j), a in other.terms.items():
            trunc |= _accumulate(self.ring, terms, i, j, a, v_cap, f_cap)
        return CartierElement(self.ring, terms, v_cap, f_cap, trunc)

    def __neg__(self):
        """Forward-solve y with self + y = 0, slot by slot.

        Cancelling slot (i, j) leaves residues r_{p^n}(a, -a) at deeper
        diagonal slots, which are folded into the remaining work before
        those slots are negated in turn.
        """
        ring = self.ring
        work = dict(self.terms)
        out = {}
        trunc = self.truncated
        while True:
            pending = [k for k, v in work.items()
                       if k not in out and not v.is_zero()]
            if not pending:
                break
            i, j = min(pending, key=lambda k: (min(k), k))
            a = work[(i, j)]
            out[(i, j)] = -a
            n = 1
            while True:
                ii, jj = i + n, j + n
                if ii > self.v_cap or jj > self.f_cap:
                    if 2 * a._capped_val() < a.precision + a._capped_val():
                        trunc = True
                    break
                r = witt_add_poly(ring.p, n).eval(a, -a)
                if not (isinstance(r, int) or r.is_zero()):
                    trunc |= _accumulate(ring, work, ii, jj, r,
                                         self.v_cap, self.f_cap)
                n += 1
        return CartierElement(ring, out, self.v_cap, self.f_cap, trunc)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = CartierElement.scalar_int(self.ring, other,
                                              self.v_cap, self.f_cap)
        v_cap, f_cap, trunc = self._common(other)
        ring = self.ring
        p = ring.p
        terms = {}
        for (i1, j1), a1 in self.terms.items():
            for (i2, j2), a2 in other.terms.items():
                t = min(j1, i2)
                j_, i_ = j1 - t, i2 - t
                if j_ == 0:
                    i, j = i1 + i_, j2
                    coeff = (a1 ** (p ** i_)) * a2 if i_ else a1 * a2
                else:  # i_ == 0
                    i, j = i1, j_ + j2
                    coeff = a1 * (a2 ** (p ** j_))
                if t == 0:
                    trunc |= _accumulate(ring, terms, i, j, coeff,
                                         v_cap, f_cap)
                    continue
                # p^t V^i <c> F^j = sum_k V^{i+k} <w_k(p^t) c^{p^k}> F^{j+k}
                room = min(v_cap - i, f_cap - j)
                if room < 0:
                    trunc = True
                    continue
                ws = scalar_witt_coords(p ** t, p, room)
                for k, w in enumerate(ws):
                    ck = coeff ** (p ** k) if k else coeff
                    trunc |= _accumulate(ring, terms, i + k, j + k,
                                         ck.mul_int(w), v_cap, f_cap)
                trunc = True  # the scalar tail continues past the caps
        return CartierElement(ring, terms, v_cap, f_cap, trunc)

    __rmul__ = __mul__

    # -- the action on curve coordinates --

    def act(self, f: DeltaVector) -> DeltaVector:
        if f.ring != self.ring:
            raise RingMismatch("vector over a different ring")
        cap = f.delta_cap
        out = None
        out_cap = None
        for (i, j), a in self.terms.items():
            if j > cap:
                raise InsufficientDeltaPrecision(
                    f"need {j} levels, vector carries {cap}")
            g = f
            for _ in range(j):
                g = g.f_op()
            g = g.bracket(a)
            for _ in range(i):
                g = g.shift()
            term_cap = cap - j + i
            if out is None:
                out, out_cap = g, term_cap
            else:
                out_cap = min(out_cap, term_cap)
                out = out.truncate(out_cap) + g.truncate(out_cap)
        if out is None:
            return DeltaVector.zero(self.ring, f.m, cap)
        return out.truncate(out_cap)

    # -- comparisons / io --

    def sorted_terms(self):
        return sorted(self.terms.items())

    def eq_terms(self, other) -> bool:
        """Slot-wise equality at common precision (compare at matching caps
        when either side is truncated)."""
        for k in set(self.terms) | set(other.terms):
            a = self.terms.get(k, self.ring.zero())
            b = other.terms.get(k, other.ring.zero())
            if not (a - b).is_zero():
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, CartierElement):
            return NotImplemented
        return (self.ring == other.ring
                and (self.v_cap, self.f_cap) == (other.v_cap, other.f_cap)
                and self.eq_terms(other))

    __hash__ = None

    def __repr__(self):
        bits = []
        for (i, j), a in self.sorted_terms()[:6]:
            mono = []
            if i:
                mono.append(f"V^{i}" if i > 1 else "V")
            mono.append(f"<{list(a.digits[:4])}..>")
            if j:
                mono.append(f"F^{j}" if j > 1 else "F")
            bits.append("".join(mono))
        more = " + ..." if len(self.terms) > 6 else ""
        flag = " (truncated)" if self.truncated else ""
        return f"<cartier {' + '.join(bits) or '0'}{more}{flag}>"
