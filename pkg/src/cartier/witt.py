"""Addition polynomials for p-typical symbols.

The bracket symbols obey  <a> + <b> = <a+b> + sum_{n>0} V^n <r_{p^n}(a,b)> F^n,
where the integer polynomials r_{p^n}(X, Y) are pinned down by the ghost
recursion

    p^n r_{p^n} = X^{p^n} + Y^{p^n} - sum_{i<n} p^i r_{p^i}^{p^{n-i}},

with r_1 = X + Y.  Equivalently, (X+Y, r_p, r_{p^2}, ...) are the p-typical
coordinates of the sum of the two tautological Teichmueller points.  All
coefficients are exact arbitrary-precision integers; the division by p^n is
checked to be exact (a failure would signal an implementation bug).

Polynomials are cached per (p, n); the cache is filled once per key and read
lock-free afterwards (CPython dict semantics).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded, ExactDivisionFailed

# degree-p^n bivariate polynomial arithmetic is only feasible for small n
MAX_LEVEL = 5

# sparse bivariate integer polynomial: {(i, j): coeff}
Poly2 = dict


def poly_add(a: Poly2, b: Poly2) -> Poly2:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + v
        if s:
            out[k] = s
        elif k in out:
            del out[k]
    return out


def poly_scale(a: Poly2, c: int) -> Poly2:
    if c == 0:
        return {}
    return {k: c * v for k, v in a.items()}


def poly_mul(a: Poly2, b: Poly2) -> Poly2:
    out = {}
    for (i1, j1), v1 in a.items():
        for (i2, j2), v2 in b.items():
            k = (i1 + i2, j1 + j2)
            s = out.get(k, 0) + v1 * v2
            if s:
                out[k] = s
            elif k in out:
                del out[k]
    return out


def poly_pow(a: Poly2, n: int) -> Poly2:
    out = {(0, 0): 1}
    base = a
    while n:
        if n & 1:
            out = poly_mul(out, base)
        n >>= 1
        if n:
            base = poly_mul(base, base)
    return out


def poly_exact_div(a: Poly2, c: int) -> Poly2:
    out = {}
    for k, v in a.items():
        q, r = divmod(v, c)
        if r:
            raise ExactDivisionFailed(f"coefficient {v} not divisible by {c}")
        out[k] = q
    return out


@dataclass(frozen=True)
class SymAddPoly:
    p: int
    n: int
    poly: dict

    def eval(self, x, y):
        """Evaluate at two ring elements (anything with +, *, ** and int scaling)."""
        return eval_poly2(self.poly, x, y)


def eval_poly2(poly: Poly2, x, y):
    if not poly:
        return 0
    max_i = max(i for (i, _) in poly)
    max_j = max(j for (_, j) in poly)
    xp = [None, x]
    for _ in range(1, max_i):
        xp.append(xp[-1] * x)
    yp = [None, y]
    for _ in range(1, max_j):
        yp.append(yp[-1] * y)
    out = None
    for (i, j), c in sorted(poly.items()):
        if i and j:
            t = xp[i] * yp[j]
        elif i:
            t = xp[i]
        elif j:
            t = yp[j]
        else:  # constant terms never occur in addition polynomials
            t = x ** 0
        term = t * c
        out = term if out is None else out + term
    return 0 if out is None else out


_POLY_CACHE: dict = {}


def witt_add_poly(p: int, n: int) -> SymAddPoly:
    """The level-n addition polynomial r_{p^n}(X, Y)."""
    if n > MAX_LEVEL:
        raise CapExceeded(f"addition polynomial level {n} exceeds maximum {MAX_LEVEL}")
    key = (p, n)
    got = _POLY_CACHE.get(key)
    if got is None:
        got = _compute_add_poly(p, n)
        _POLY_CACHE[key] = got
    return SymAddPoly(p, n, got)


def _compute_add_poly(p: int, n: int) -> Poly2:
    if n == 0:
        return {(1, 0): 1, (0, 1): 1}
    q = p ** n
    acc = {(q, 0): 1, (0, q): 1}
    for i in range(n):
        ri = witt_add_poly(p, i).poly
        acc = poly_add(acc, poly_scale(poly_pow(ri, p ** (n - i)), -(p ** i)))
    return poly_exact_div(acc, q)


_SCALAR_CACHE: dict = {}


def scalar_witt_coords(value: int, p: int, levels: int) -> tuple:
    """Coordinates (w_0, ..., w_{levels}) of the integer scalar ``value``.

    They satisfy the constant ghost equations
    sum_{i<=k} p^i w_i^{p^{k-i}} = value for every k, so that in the Cartier
    ring  value * 1 = sum_k V^k <w_k> F^k  (an infinite tail in general).
    """
    key = (value, p, levels)
    got = _SCALAR_CACHE.get(key)
    if got is not None:
        return got
    ws = [value]
    for k in range(1, levels + 1):
        acc = value
        for i in range(k):
            acc -= (p ** i) * (ws[i] ** (p ** (k - i)))
        q, r = divmod(acc, p ** k)
        if r:
            raise ExactDivisionFailed(
                f"scalar coordinate level {k} for {value} not p-integral")
        ws.append(q)
    got = tuple(ws)
    _SCALAR_CACHE[key] = got
    return got
