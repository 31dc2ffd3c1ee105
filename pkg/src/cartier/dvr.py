"""Exact arithmetic in O = Z_p[pi]/(E(pi)) for a monic Eisenstein polynomial E.

The residue field is fixed to F_p, so an element has a canonical pi-adic
digit expansion sum(d_i * pi^i) with digits d_i in {0, ..., p-1}.  A
``DvrElement`` stores exactly its known digits; ``precision`` is the number
of known digits, i.e. the element is determined modulo pi^precision.
Arithmetic never silently increases precision beyond what valuation shifts
justify.

Fraction-field values (elements of L = Frac(O)) are pairs (integral element,
p-power-denominator exponent), normalized so the numerator is not divisible
by p unless the exponent is zero.  Only p-power denominators ever occur in
the constructions downstream.

Zero at exhausted precision is only ever reported as "zero up to the stated
precision"; no exact-zero claims are made.

All values are immutable after construction and all operations are pure, so
values may be freely shared between threads.
"""

from __future__ import annotations

import math

from .errors import NotEisenstein, NotPrime, NotUnit, PrecisionExhausted

INF = math.inf


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def int_valuation(n: int, p: int):
    """p-adic valuation of an integer; INF for 0."""
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class RamifiedRing:
    """Handle for O = Z_p[pi]/(E(pi)); immutable and shared by its elements.

    ``eisenstein`` lists the coefficients of E constant-first, including the
    leading 1.  The absolute ramification index e is deg(E).
    """

    def __init__(self, p: int, eisenstein, default_precision: int = 24):
        if not isinstance(p, int) or not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        eis = tuple(int(c) for c in eisenstein)
        if len(eis) < 2 or eis[-1] != 1:
            raise NotEisenstein("polynomial must be monic of degree >= 1")
        for c in eis[1:-1]:
            if int_valuation(c, p) < 1:
                raise NotEisenstein(
                    f"coefficient {c} must be divisible by {p}")
        if int_valuation(eis[0], p) != 1:
            raise NotEisenstein(
                f"constant term {eis[0]} must have {p}-valuation exactly 1")
        if default_precision < 1:
            raise ValueError("default_precision must be positive")

        self.p = p
        self.eisenstein = eis
        self.e = len(eis) - 1
        self.default_precision = int(default_precision)
        # headroom so valuation shifts can raise precision a little
        self.digit_cap = self.default_precision + 8
        self._work = self.digit_cap + 4
        self._mod = p ** self._work
        # x^e = -(c_0 + c_1 x + ... + c_{e-1} x^{e-1})
        self._xe = tuple((-c) % self._mod for c in eis[:-1])
        # p * pi^{-1} as a vector over the power basis; from E(pi) = 0,
        # pi^{-1} = -(c_1 + c_2 pi + ... + pi^{e-1}) / c_0 and c_0 = p*gamma.
        gamma = eis[0] // p
        gamma_inv = pow(gamma % self._mod, -1, self._mod)
        tail = list(eis[1:-1]) + [1]
        self._p_over_pi = tuple((-gamma_inv * c) % self._mod for c in tail)
        # power-basis vectors of pi^k for k up to the digit cap
        pows = [self._unit_vector(0)]
        for _ in range(self.digit_cap + self.e + 1):
            pows.append(self._shift_vec(pows[-1]))
        self._pi_pows = pows

    # -- power-basis vector helpers (length-e integer tuples mod p^work) --

    def _unit_vector(self, k):
        v = [0] * self.e
        if k < self.e:
            v[k] = 1
        return tuple(v)

    def _shift_vec(self, vec):
        """Multiply a power-basis vector by pi, reducing by E."""
        top = vec[-1]
        out = [0] + list(vec[:-1])
        if top:
            for j in range(self.e):
                out[j] = (out[j] + top * self._xe[j]) % self._mod
        return tuple(c % self._mod for c in out)

    def _vec_mul(self, a, b):
        e = self.e
        prod = [0] * (2 * e - 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k] % self._mod
            if c:
                base = k - e
                for j in range(e):
                    prod[base + j] += c * self._xe[j]
            prod[k] = 0
        return tuple(c % self._mod for c in prod[:e])

    def _vec_to_digits(self, vec, count):
        vec = [c % self._mod for c in vec]
        p = self.p
        digits = []
        for _ in range(count):
            d = vec[0] % p
            digits.append(d)
            t = (vec[0] - d) // p
            nxt = list(vec[1:]) + [0]
            if t:
                for j in range(self.e):
                    nxt[j] = (nxt[j] + t * self._p_over_pi[j]) % self._mod
            vec = [c % self._mod for c in nxt]
        return tuple(digits)

    # -- element constructors --

    def from_vector(self, vec, precision) -> "DvrElement":
        precision = max(0, min(int(precision), self.digit_cap))
        return DvrElement(self, self._vec_to_digits(vec, precision))

    def from_digits(self, digits, precision=None) -> "DvrElement":
        digits = [int(d) for d in digits]
        if precision is None:
            precision = len(digits)
        precision = min(int(precision), self.digit_cap)
        if len(digits) < precision:
            digits = digits + [0] * (precision - len(digits))
        if all(0 <= d < self.p for d in digits[:precision]):
            return DvrElement(self, tuple(digits[:precision]))
        vec = [0] * self.e
        for i, d in enumerate(digits[:precision]):
            if d:
                pw = self._pi_pows[i]
                vec = [(x + d * y) % self._mod for x, y in zip(vec, pw)]
        return self.from_vector(vec, precision)

    def from_int(self, n: int, precision=None) -> "DvrElement":
        if precision is None:
            precision = self.digit_cap
        vec = [n % self._mod] + [0] * (self.e - 1)
        return self.from_vector(vec, precision)

    def zero(self, precision=None) -> "DvrElement":
        if precision is None:
            precision = self.digit_cap
        precision = max(0, min(int(precision), self.digit_cap))
        return DvrElement(self, (0,) * precision)

    def one(self, precision=None) -> "DvrElement":
        return self.from_int(1, precision)

    def pi(self, k: int = 1, precision=None) -> "DvrElement":
        """pi^k as an element."""
        if precision is None:
            precision = self.digit_cap
        return self.from_vector(self._pi_pows[k], precision)

    def random_element(self, rng, precision=None, min_val=0) -> "DvrElement":
        if precision is None:
            precision = self.default_precision
        digits = [0] * min_val + [rng.randrange(self.p)
                                  for _ in range(precision - min_val)]
        return DvrElement(self, tuple(digits))

    def __eq__(self, other):
        return (isinstance(other, RamifiedRing)
                and self.p == other.p
                and self.eisenstein == other.eisenstein
                and self.default_precision == other.default_precision)

    def __hash__(self):
        return hash((self.p, self.eisenstein, self.default_precision))

    def __repr__(self):
        return (f"RamifiedRing(p={self.p}, e={self.e}, "
                f"eisenstein={list(self.eisenstein)}, "
                f"precision={self.default_precision})")


def make_ring(p: int, eisenstein, default_precision: int = 24) -> RamifiedRing:
    return RamifiedRing(p, eisenstein, default_precision)


class DvrElement:
    """An element of O known modulo pi^precision, in canonical digit form."""

    __slots__ = ("ring", "digits")

    def __init__(self, ring: RamifiedRing, digits: tuple):
        self.ring = ring
        self.digits = digits

    @property
    def precision(self) -> int:
        return len(self.digits)

    def to_vector(self):
        ring = self.ring
        vec = [0] * ring.e
        for i, d in enumerate(self.digits):
            if d:
                pw = ring._pi_pows[i]
                vec = [(x + d * y) % ring._mod for x, y in zip(vec, pw)]
        return tuple(vec)

    def valuation(self):
        """Index of the lowest nonzero digit; INF when none is known.

        INF means "zero up to the stated precision", never an exact zero.
        """
        for i, d in enumerate(self.digits):
            if d:
                return i
        return INF

    def valuation_report(self):
        """(valuation, precision_limited) with the limitation made explicit."""
        v = self.valuation()
        return v, (v is INF)

    def is_zero(self) -> bool:
        """Zero up to the stated precision."""
        return self.valuation() is INF

    def _capped_val(self):
        v = self.valuation()
        return self.precision if v is INF else v

    # -- arithmetic --

    def _check(self, other):
        if self.ring != other.ring:
            from .errors import RingMismatch
            raise RingMismatch("operands over different rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        self._check(other)
        prec = min(self.precision, other.precision)
        vec = [(a + b) for a, b in zip(self.to_vector(), other.to_vector())]
        return self.ring.from_vector(vec, prec)

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        return self + (-other)

    def __neg__(self):
        vec = [-a for a in self.to_vector()]
        return self.ring.from_vector(vec, self.precision)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.mul_int(other)
        self._check(other)
        prec = min(self.precision + other._capped_val(),
                   other.precision + self._capped_val(),
                   self.ring.digit_cap)
        vec = self.ring._vec_mul(self.to_vector(), other.to_vector())
        return self.ring.from_vector(vec, prec)

    __rmul__ = __mul__

    def mul_int(self, n: int):
        ring = self.ring
        if n == 0:
            return ring.zero(ring.digit_cap)
        shift = ring.e * int_valuation(n, ring.p)
        prec = min(self.precision + shift, ring.digit_cap)
        vec = [a * n for a in self.to_vector()]
        return ring.from_vector(vec, prec)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers live in the fraction field")
        if k == 0:
            return self.ring.one(self.ring.digit_cap)
        out = None
        base = self
        while k:
            if k & 1:
                out = base if out is None else out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def invert(self):
        """Inverse of a unit, to the same precision (Newton lifting)."""
        if self.precision == 0:
            raise PrecisionExhausted("no determined digits")
        if self.digits[0] == 0:
            raise NotUnit("element has positive valuation (or is zero at precision)")
        ring = self.ring
        prec = self.precision
        a = self.to_vector()
        x = [pow(self.digits[0], -1, ring.p)] + [0] * (ring.e - 1)
        # each Newton step doubles the number of correct pi-digits
        steps = max(1, math.ceil(math.log2(prec)) + 1)
        two = ring.from_int(2, ring.digit_cap).to_vector()
        for _ in range(steps):
            ax = ring._vec_mul(a, x)
            t = [(u - v) % ring._mod for u, v in zip(two, ax)]
            x = list(ring._vec_mul(x, t))
        return ring.from_vector(x, prec)

    # -- structural helpers --

    def shift_pi(self, k: int):
        """Multiply by pi^k (k >= 0); digits shift up, precision grows."""
        if k == 0:
            return self
        prec = min(self.precision + k, self.ring.digit_cap)
        digits = (0,) * k + self.digits
        return DvrElement(self.ring, digits[:prec])

    def divide_pi(self, k: int):
        """Exact division by pi^k; requires the low digits to be known zero."""
        if k == 0:
            return self
        if len(self.digits) < k or any(self.digits[:k]):
            raise ValueError("element not divisible by pi^k at this precision")
        return DvrElement(self.ring, self.digits[k:])

    def divisible_by_int_power(self, r: int) -> bool:
        """Certainly divisible by p^r at the known digits."""
        k = r * self.ring.e
        return self.precision >= k and not any(self.digits[:k])

    def div_p_exact(self, r: int):
        """Exact division by p^r (requires divisibility, checked)."""
        if r == 0:
            return self
        ring = self.ring
        vec = self.to_vector()
        q = ring.p ** r
        out = []
        for c in vec:
            c = c % (ring._mod)
            if c % q:
                # the representative is only known mod p^work; divisibility
                # must already be visible on the digits
                raise ValueError("element not divisible by p^r")
            out.append(c // q)
        return ring.from_vector(out, self.precision - r * ring.e)

    def truncate(self, k: int):
        """Canonical representative modulo pi^k."""
        if k >= self.precision:
            return self
        return DvrElement(self.ring, self.digits[:max(0, k)])

    def residue(self) -> int:
        if self.precision < 1:
            raise PrecisionExhausted("no determined digits")
        return self.digits[0]

    def unit_part_inverse(self):
        """For x = pi^v * u with v finite, the inverse of u."""
        v = self.valuation()
        if v is INF:
            raise NotUnit("zero at precision has no unit part")
        return self.divide_pi(v).invert()

    def exact_divide(self, other):
        """self / other when v(self) >= v(other) (both known)."""
        vo = other.valuation()
        if vo is INF:
            raise NotUnit("division by zero-at-precision")
        if vo == 0:
            return self * other.invert()
        return self.divide_pi(vo) * other.unit_part_inverse()

    # -- comparisons --

    def eq_at(self, other, k=None) -> bool:
        """Indistinguishable modulo pi^k (default: common precision)."""
        if k is None:
            k = min(self.precision, other.precision)
        return self.digits[:k] == other.digits[:k]

    def __eq__(self, other):
        if not isinstance(other, DvrElement):
            return NotImplemented
        return self.ring == other.ring and self.eq_at(other)

    __hash__ = None

    def __repr__(self):
        shown = list(self.digits[:10])
        tail = "..." if self.precision > 10 else ""
        return f"Dvr({shown}{tail} ; O(pi^{self.precision}))"


class Frac:
    """An element of L = Frac(O) as numerator / p^p_exp.

    Normalized so that the numerator is not (known) divisible by p unless
    p_exp = 0.  Integrality testing is then a pure data inspection.
    """

    __slots__ = ("num", "p_exp")

    def __init__(self, num: DvrElement, p_exp: int = 0, normalize: bool = True):
        if normalize:
            e = num.ring.e
            while p_exp > 0 and num.precision >= e \
                    and not any(num.digits[:e]) and any(num.digits[e:]):
                num = num.div_p_exact(1)
                p_exp -= 1
            if p_exp > 0 and num.is_zero():
                # O(pi^N)/p^k is the integral zero O(pi^{N-ke}) when the
                # margin is positive; otherwise it stays undetermined
                margin = num.precision - p_exp * e
                if margin >= 1:
                    num = num.ring.zero(margin)
                    p_exp = 0
        self.num = num
        self.p_exp = p_exp

    @property
    def ring(self):
        return self.num.ring

    @classmethod
    def from_int(cls, ring, n, p_exp=0):
        return cls(ring.from_int(n), p_exp)

    @classmethod
    def zero(cls, ring):
        return cls(ring.zero(), 0)

    @classmethod
    def one(cls, ring):
        return cls(ring.one(), 0)

    def _align(self, other):
        k = max(self.p_exp, other.p_exp)
        a = self.num.mul_int(self.ring.p ** (k - self.p_exp))
        b = other.num.mul_int(other.ring.p ** (k - other.p_exp))
        return a, b, k

    def __add__(self, other):
        if isinstance(other, int):
            other = Frac.from_int(self.ring, other)
        a, b, k = self._align(other)
        return Frac(a + b, k)

    def __sub__(self, other):
        if isinstance(other, int):
            other = Frac.from_int(self.ring, other)
        return self + (-other)

    def __neg__(self):
        return Frac(-self.num, self.p_exp, normalize=False)

    def __mul__(self, other):
        if isinstance(other, int):
            return Frac(self.num.mul_int(other), self.p_exp)
        if isinstance(other, DvrElement):
            other = Frac(other)
        return Frac(self.num * other.num, self.p_exp + other.p_exp)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        out = Frac.one(self.ring)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def invert(self):
        """Inverse in L; the pi-part folds into a p-power denominator.

        With num = pi^v * u and l = ceil(v/e):
        1/num = (p^l / pi^{le}) * pi^{le-v} * u^{-1} / p^l, and p^l/pi^{le}
        is a unit computed exactly (p^l has pi-valuation le).
        """
        v = self.num.valuation()
        if v is INF:
            raise NotUnit("inverting zero-at-precision")
        e, p = self.ring.e, self.ring.p
        lift = -(-v // e)  # ceil(v/e)
        u_inv = self.num.divide_pi(v).invert()
        out = u_inv.shift_pi(lift * e - v)
        if lift:
            t = self.ring.from_int(p ** lift).divide_pi(lift * e)
            out = out * t
        inv = Frac(out, lift)
        if self.p_exp:
            inv = inv * (p ** self.p_exp)
        return inv

    def valuation(self):
        """pi-adic valuation in L (may be negative); INF if zero at precision."""
        v = self.num.valuation()
        if v is INF:
            return INF
        return v - self.p_exp * self.ring.e

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_integral_exact(self) -> bool:
        return self.p_exp == 0

    def integrality(self):
        """('pass'|'fail'|'undetermined', margin in pi-digits)."""
        if self.p_exp == 0:
            return "pass", self.num.precision
        ke = self.p_exp * self.ring.e
        v = self.num.valuation()
        if v is INF:
            margin = self.num.precision - ke
            if margin >= 1:
                return "pass", margin
            return "undetermined", margin
        if v < ke:
            return "fail", self.num.precision - ke
        # normalization should have stripped this, but handle defensively
        return "pass", self.num.precision - ke

    def to_element(self):
        """The underlying integral element (requires p_exp == 0)."""
        if self.p_exp:
            raise ValueError("not integral as represented")
        return self.num

    def scale_pi(self, k: int):
        return Frac(self.num.shift_pi(k), self.p_exp)

    def eq_at_precision(self, other) -> bool:
        return (self - other).is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = Frac.from_int(self.ring, other)
        if not isinstance(other, Frac):
            return NotImplemented
        return self.eq_at_precision(other)

    __hash__ = None

    def __repr__(self):
        if self.p_exp:
            return f"({self.num!r})/p^{self.p_exp}"
        return repr(self.num)


class RamConstants:
    """The ramification constants controlling the finite reduction criteria."""

    def __init__(self, p, e, e0):
        self.p = p
        self.e = e
        self.e0 = e0
        self.s = floor_log_ratio(p, p * e, p - 1)
        self.t = int_valuation(e, p) + 1
        v0 = int_valuation(e0, p)
        self.l_prime = self.s + v0 + 1
        self.l = 2 * self.s + v0 + 1

    def as_dict(self):
        return {"p": self.p, "e": self.e, "e0": self.e0, "s": self.s,
                "t": self.t, "l_prime": self.l_prime, "l": self.l}

    def __repr__(self):
        return (f"RamConstants(p={self.p}, e={self.e}, e0={self.e0}: "
                f"s={self.s}, t={self.t}, l'={self.l_prime}, l={self.l})")


def floor_log_ratio(p: int, num: int, den: int) -> int:
    """floor(log_p(num/den)) for positive integers, by exact comparison.

    Repeated multiplication keeps boundary cases (num/den an exact power of
    p) exact; no floating point is involved.
    """
    if num <= 0 or den <= 0:
        raise ValueError("ratio must be positive")
    s = 0
    power = p
    # p^s <= num/den  <=>  p^s * den <= num
    while power * den <= num:
        s += 1
        power *= p
    return s


def ram_constants(p: int, e: int, e0: int) -> RamConstants:
    if not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if e < 1 or e0 < 1:
        raise ValueError("e and e0 must be positive")
    # e0 | e is not enforced: any positive e0 is accepted and documented
    return RamConstants(p, e, e0)
