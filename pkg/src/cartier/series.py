"""Truncated multivariate power series over O and its fraction field.

Series are sparse maps from exponent multi-indices to ``Frac`` coefficients;
``degree_cap`` is an exclusive bound on total degree.  All results carry the
minimum of the operand caps so that no coefficient that truncation could
have corrupted is ever emitted.

``DeltaVector`` holds an m-tuple of truncated series in the curve parameter;
``delta_to_curve`` substitutes the l-th coefficient onto x^{p^l} (the l = 0
term included, so constants map to the tautological curve x).

Values are immutable; operations are pure.
"""

from __future__ import annotations

from .dvr import Frac, RamifiedRing
from .errors import (ArityMismatch, InsufficientDeltaPrecision,
                     NonzeroConstantTerm, RingMismatch, SingularLinearPart)


def _as_frac(ring, c):
    if isinstance(c, Frac):
        return c
    if isinstance(c, int):
        return Frac.from_int(ring, c)
    return Frac(c)  # a DvrElement


class MultiSeries:
    __slots__ = ("ring", "num_vars", "degree_cap", "terms")

    def __init__(self, ring: RamifiedRing, num_vars: int, degree_cap: int,
                 terms=None):
        self.ring = ring
        self.num_vars = num_vars
        self.degree_cap = degree_cap
        clean = {}
        for exps, c in (terms or {}).items():
            if sum(exps) >= degree_cap:
                continue
            c = _as_frac(ring, c)
            if c.p_exp == 0 and c.num.is_zero():
                continue  # known zero to precision
            clean[tuple(exps)] = c
        self.terms = clean

    # -- constructors --

    @classmethod
    def zero(cls, ring, num_vars, cap):
        return cls(ring, num_vars, cap, {})

    @classmethod
    def constant(cls, ring, num_vars, cap, c):
        return cls(ring, num_vars, cap, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, ring, num_vars, cap, index):
        exps = [0] * num_vars
        exps[index] = 1
        return cls(ring, num_vars, cap, {tuple(exps): Frac.one(ring)})

    @classmethod
    def monomial(cls, ring, num_vars, cap, exps, c):
        return cls(ring, num_vars, cap, {tuple(exps): c})

    # -- ring operations --

    def _check(self, other):
        if self.ring != other.ring:
            raise RingMismatch("series over different rings")
        if self.num_vars != other.num_vars:
            raise ArityMismatch("series in different variable sets")

    def __add__(self, other):
        self._check(other)
        cap = min(self.degree_cap, other.degree_cap)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return MultiSeries(self.ring, self.num_vars, cap, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MultiSeries(self.ring, self.num_vars, self.degree_cap,
                           {k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Frac)):
            return self.scale(other)
        self._check(other)
        cap = min(self.degree_cap, other.degree_cap)
        out = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) >= cap:
                    continue
                k = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                out[k] = out[k] + c if k in out else c
        return MultiSeries(self.ring, self.num_vars, cap, out)

    def scale(self, c):
        c = _as_frac(self.ring, c)
        return MultiSeries(self.ring, self.num_vars, self.degree_cap,
                           {k: v * c for k, v in self.terms.items()})

    def __pow__(self, n: int):
        out = MultiSeries.constant(self.ring, self.num_vars, self.degree_cap, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- structure --

    def constant_term(self) -> Frac:
        return self.terms.get((0,) * self.num_vars, Frac.zero(self.ring))

    def coefficient(self, exps) -> Frac:
        return self.terms.get(tuple(exps), Frac.zero(self.ring))

    def truncate(self, cap):
        return MultiSeries(self.ring, self.num_vars, min(cap, self.degree_cap),
                           self.terms)

    def map_coefficients(self, fn):
        return MultiSeries(self.ring, self.num_vars, self.degree_cap,
                           {k: fn(k, v) for k, v in self.terms.items()})

    def remap_vars(self, positions, new_num_vars):
        """Re-embed into a larger variable set; positions[i] is the new slot
        of old variable i."""
        out = {}
        for exps, c in self.terms.items():
            new = [0] * new_num_vars
            for i, e in enumerate(exps):
                new[positions[i]] += e
            out[tuple(new)] = c
        return MultiSeries(self.ring, new_num_vars, self.degree_cap, out)

    def substitute_zero(self, kill):
        """Set the variables in ``kill`` to zero (dropping their terms)."""
        keep = [i for i in range(self.num_vars) if i not in kill]
        out = {}
        for exps, c in self.terms.items():
            if any(exps[i] for i in kill):
                continue
            out[tuple(exps[i] for i in keep)] = c
        return MultiSeries(self.ring, len(keep), self.degree_cap, out)

    def grlex_items(self):
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        if self.num_vars != other.num_vars:
            return False
        for k in set(self.terms) | set(other.terms):
            if sum(k) >= min(self.degree_cap, other.degree_cap):
                continue
            a = self.terms.get(k, Frac.zero(self.ring))
            b = other.terms.get(k, Frac.zero(other.ring))
            if not (a - b).is_zero():
                return False
        return True

    __hash__ = None

    def __repr__(self):
        items = self.grlex_items()[:6]
        body = " + ".join(f"{c!r}*x^{list(e)}" for e, c in items)
        more = " + ..." if len(self.terms) > 6 else ""
        return f"<series {body or '0'}{more} | deg<{self.degree_cap}>"


class SeriesTuple:
    """An m-tuple of series in a common variable set."""

    __slots__ = ("components",)

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ValueError("empty tuple")
        self.components = components

    @property
    def ring(self):
        return self.components[0].ring

    @property
    def m(self):
        return len(self.components)

    @property
    def num_vars(self):
        return self.components[0].num_vars

    @property
    def degree_cap(self):
        return min(c.degree_cap for c in self.components)

    @classmethod
    def identity(cls, ring, m, cap):
        return cls([MultiSeries.variable(ring, m, cap, i) for i in range(m)])

    def __add__(self, other):
        return SeriesTuple([a + b for a, b in zip(self.components,
                                                  other.components)])

    def __sub__(self, other):
        return SeriesTuple([a - b for a, b in zip(self.components,
                                                  other.components)])

    def __neg__(self):
        return SeriesTuple([-a for a in self.components])

    def scale(self, c):
        return SeriesTuple([a.scale(c) for a in self.components])

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def has_zero_constant_terms(self):
        return all(c.constant_term().is_zero() and c.constant_term().p_exp == 0
                   for c in self.components)

    def linear_matrix(self):
        """m x num_vars matrix of degree-1 coefficients."""
        rows = []
        for comp in self.components:
            row = []
            for j in range(self.num_vars):
                exps = [0] * self.num_vars
                exps[j] = 1
                row.append(comp.coefficient(exps))
            rows.append(row)
        return rows

    def truncate(self, cap):
        return SeriesTuple([c.truncate(cap) for c in self.components])

    def __eq__(self, other):
        return (isinstance(other, SeriesTuple)
                and len(self.components) == len(other.components)
                and all(a == b for a, b in zip(self.components,
                                               other.components)))

    __hash__ = None


def compose(f: SeriesTuple, g: SeriesTuple) -> SeriesTuple:
    """f o g, truncated to the minimum of the two caps."""
    if f.num_vars != g.m:
        raise ArityMismatch(
            f"f takes {f.num_vars} arguments, g supplies {g.m}")
    if not g.has_zero_constant_terms():
        raise NonzeroConstantTerm("inner tuple must vanish at the origin")
    if f.ring != g.ring:
        raise RingMismatch("tuples over different rings")
    cap = min(f.degree_cap, g.degree_cap)
    ring = f.ring
    nv = g.num_vars
    # cached powers of each inner component
    pows = [{0: MultiSeries.constant(ring, nv, cap, 1)} for _ in range(g.m)]

    def power(i, k):
        cache = pows[i]
        if k not in cache:
            half = power(i, k // 2)
            full = half * half
            if k % 2:
                full = full * g.components[i]
            cache[k] = full
        return cache[k]

    out = []
    for comp in f.components:
        acc = MultiSeries.zero(ring, nv, cap)
        for exps, c in comp.terms.items():
            if sum(exps) >= cap:
                continue
            term = MultiSeries.constant(ring, nv, cap, c)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            acc = acc + term
        out.append(acc)
    return SeriesTuple(out)


def _invert_frac_matrix(rows):
    """Inverse of a small matrix over L by Gauss-Jordan."""
    m = len(rows)
    ring = rows[0][0].ring
    a = [list(r) for r in rows]
    inv = [[Frac.one(ring) if i == j else Frac.zero(ring) for j in range(m)]
           for i in range(m)]
    for col in range(m):
        piv = None
        best = None
        for r in range(col, m):
            v = a[r][col].valuation()
            if v != float("inf") and (best is None or v < best):
                best, piv = v, r
        if piv is None:
            raise SingularLinearPart("linear part is not invertible")
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        scale = a[col][col].invert()
        a[col] = [x * scale for x in a[col]]
        inv[col] = [x * scale for x in inv[col]]
        for r in range(m):
            if r == col:
                continue
            f = a[r][col]
            if f.is_zero():
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def _matrix_apply(mat, tup: SeriesTuple) -> SeriesTuple:
    out = []
    for row in mat:
        acc = MultiSeries.zero(tup.ring, tup.num_vars, tup.degree_cap)
        for c, comp in zip(row, tup.components):
            if isinstance(c, Frac) and c.is_zero() and c.p_exp == 0:
                continue
            acc = acc + comp.scale(c)
        out.append(acc)
    return SeriesTuple(out)


def reversion(f: SeriesTuple) -> SeriesTuple:
    """Compositional inverse of a square tuple with invertible linear part.

    Solved order by order: iterate g <- A^{-1} (X - f_high(g)), which gains
    at least one correct degree per pass.
    """
    if f.num_vars != f.m:
        raise ArityMismatch("reversion needs as many components as variables")
    if not f.has_zero_constant_terms():
        raise NonzeroConstantTerm("tuple must vanish at the origin")
    cap = f.degree_cap
    ring = f.ring
    m = f.m
    a_inv = _invert_frac_matrix(f.linear_matrix())
    ident = SeriesTuple.identity(ring, m, cap)
    lin = _matrix_apply(f.linear_matrix(), ident)
    f_high = f - lin
    g = _matrix_apply(a_inv, ident)
    if all(not comp.terms for comp in f_high.components):
        return g
    for _ in range(max(1, cap - 1)):
        g_new = _matrix_apply(a_inv, ident - compose(f_high, g))
        if g_new == g:
            g = g_new
            break
        g = g_new
    return g


class DeltaVector:
    """m-tuple of truncated series in the shift parameter, over L.

    ``coeffs[i][l]`` is the level-l coefficient of component i; ``delta_cap``
    levels are carried.
    """

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(tuple(_as_frac(ring, c) for c in comp)
                            for comp in coeffs)

    @property
    def m(self):
        return len(self.coeffs)

    @property
    def delta_cap(self):
        return min((len(c) for c in self.coeffs), default=0)

    @classmethod
    def zero(cls, ring, m, cap):
        return cls(ring, [[Frac.zero(ring)] * cap for _ in range(m)])

    @classmethod
    def basis(cls, ring, m, cap, index):
        rows = [[Frac.zero(ring)] * cap for _ in range(m)]
        rows[index][0] = Frac.one(ring)
        return cls(ring, rows)

    def __add__(self, other):
        cap = min(self.delta_cap, other.delta_cap)
        return DeltaVector(self.ring, [
            [a + b for a, b in zip(sc[:cap], oc[:cap])]
            for sc, oc in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return DeltaVector(self.ring, [[-c for c in comp]
                                       for comp in self.coeffs])

    def scale(self, c):
        c = _as_frac(self.ring, c)
        return DeltaVector(self.ring, [[x * c for x in comp]
                                       for comp in self.coeffs])

    def shift(self):
        """Multiplication by the shift parameter (the V action)."""
        return DeltaVector(self.ring, [
            [Frac.zero(self.ring)] + list(comp) for comp in self.coeffs])

    def f_op(self):
        """The F action: level l of the output is p * (level l+1) of the input."""
        if self.delta_cap < 1:
            raise InsufficientDeltaPrecision("no levels left for F")
        p = self.ring.p
        return DeltaVector(self.ring, [
            [c * p for c in comp[1:]] for comp in self.coeffs])

    def bracket(self, a):
        """The <a> action: level l gets multiplied by a^(p^l)."""
        p = self.ring.p
        out = []
        for comp in self.coeffs:
            row = []
            for l, c in enumerate(comp):
                row.append(c * (a ** (p ** l)))
            out.append(row)
        return DeltaVector(self.ring, out)

    def truncate(self, cap):
        return DeltaVector(self.ring, [comp[:cap] for comp in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, DeltaVector):
            return NotImplemented
        cap = min(self.delta_cap, other.delta_cap)
        for sc, oc in zip(self.coeffs, other.coeffs):
            for a, b in zip(sc[:cap], oc[:cap]):
                if not (a - b).is_zero():
                    return False
        return True

    __hash__ = None

    def __repr__(self):
        return f"<delta vector m={self.m} cap={self.delta_cap}>"


def delta_to_curve(h: DeltaVector) -> SeriesTuple:
    """Component i becomes sum_l c_{il} x^{p^l} in a single variable.

    The level-0 term contributes the linear monomial x, so the constant
    vector 1 maps to the tautological curve.
    """
    ring = h.ring
    p = ring.p
    cap = p ** h.delta_cap
    out = []
    for comp in h.coeffs:
        terms = {}
        for l, c in enumerate(comp):
            terms[(p ** l,)] = c
        out.append(MultiSeries(ring, 1, cap, terms))
    return SeriesTuple(out)
