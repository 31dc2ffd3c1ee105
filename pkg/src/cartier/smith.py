"""Linear algebra over the local ring O and over Z/p^k.

Smith normal form over O uses exact pi-adic pivoting: the entry of minimal
valuation clears its row and column, so the elementary divisors come out as
pi-powers directly.  Entries that are zero at the working precision cannot
be used as pivots; if they are all that remains, the corresponding divisors
are reported as undetermined rather than guessed.

The Z/p^k routines (solve, nullspace) back the graded membership tests on
finite Cartier modules, where coefficient vectors live in (Z/p^k)^n.
"""

from __future__ import annotations

import math

from .errors import UndeterminedAtPrecision

INF = math.inf


def smith_valuations(rows, expected_rank=None):
    """Elementary divisor valuations of a matrix over O.

    ``rows`` is a списка of lists of DvrElement (same ring).  Returns a list
    of length nrows: pi-valuations of the diagonal divisors, INF for
    directions with no relation, or None when precision ran out before the
    pivot could be certified.
    """
    if not rows:
        return []
    work = [list(r) for r in rows]
    nrows = len(work)
    ncols = len(work[0]) if work else 0
    divisors = []
    top = 0
    while top < min(nrows, ncols):
        # locate the minimal-valuation usable pivot
        best = None
        best_pos = None
        undecided = False
        for r in range(top, nrows):
            for c in range(top, ncols):
                x = work[r][c]
                v = x.valuation()
                if v is INF:
                    if x.precision < x.ring.digit_cap:
                        undecided = True
                    continue
                if best is None or v < best:
                    best, best_pos = v, (r, c)
        if best_pos is None:
            # nothing nonzero remains at precision
            filler = None if undecided else INF
            divisors.extend([filler] * (min(nrows, ncols) - top))
            break
        r0, c0 = best_pos
        work[top], work[r0] = work[r0], work[top]
        for row in work:
            row[top], row[c0] = row[c0], row[top]
        pivot = work[top][top]
        for r in range(top, nrows):
            if r == top:
                continue
            x = work[r][top]
            if x.valuation() is INF:
                continue
            q = x.exact_divide(pivot)
            work[r] = [a - q * b for a, b in zip(work[r], work[top])]
        for c in range(top + 1, ncols):
            x = work[top][c]
            if x.valuation() is INF:
                continue
            q = x.exact_divide(pivot)
            for r in range(top, nrows):
                work[r][c] = work[r][c] - q * work[r][top]
        divisors.append(best)
        top += 1
    while len(divisors) < nrows:
        divisors.append(INF)
    return divisors


# -- exact linear algebra modulo p^k ----------------------------------------


def _vp(n: int, p: int, k: int) -> int:
    n %= p ** k
    if n == 0:
        return k
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _echelon_mod_pk(cols, p, k):
    """Row echelon of the matrix with columns ``cols``, by global pivoting.

    Pivots are chosen with globally minimal valuation among cells in unused
    rows and columns, which makes pivot valuations non-decreasing and keeps
    every entry of a used row at valuation >= that row's pivot.  Returns
    (U, A', pivots) with A' = U A, U unimodular, and pivots a list of
    (row, col, valuation) in selection order.
    """
    ncols = len(cols)
    nrows = len(cols[0]) if cols else 0
    mod = p ** k
    a = [[cols[c][r] % mod for c in range(ncols)] for r in range(nrows)]
    u = [[1 if i == j else 0 for j in range(nrows)] for i in range(nrows)]
    pivots = []
    used_rows = set()
    used_cols = set()
    while True:
        best = None
        best_pos = None
        for r in range(nrows):
            if r in used_rows:
                continue
            for c in range(ncols):
                if c in used_cols:
                    continue
                v = _vp(a[r][c], p, k)
                if v < k and (best is None or v < best):
                    best, best_pos = v, (r, c)
        if best_pos is None:
            break
        r0, c0 = best_pos
        piv = a[r0][c0]
        unit_inv = pow(piv // (p ** best), -1, mod)
        for r in range(nrows):
            if r == r0 or r in used_rows:
                continue
            x = a[r][c0]
            if x % mod == 0:
                continue
            factor = (x // (p ** best)) * unit_inv % mod
            for cc in range(ncols):
                a[r][cc] = (a[r][cc] - factor * a[r0][cc]) % mod
            for cc in range(nrows):
                u[r][cc] = (u[r][cc] - factor * u[r0][cc]) % mod
        used_rows.add(r0)
        used_cols.add(c0)
        pivots.append((r0, c0, best))
    return u, a, pivots


def solve_mod_pk(cols, target, p, k):
    """Find integer coefficients x with sum x_c * cols[c] = target mod p^k.

    Returns a list of ints or None when the system is inconsistent.  Any
    solvable system is solvable with the non-pivot coordinates set to zero,
    since every entry of a pivot row has valuation at least that pivot's.
    """
    mod = p ** k
    if not cols:
        return [] if all(t % mod == 0 for t in target) else None
    u, a, pivots = _echelon_mod_pk(cols, p, k)
    nrows = len(cols[0])
    b = [sum(u[r][i] * target[i] for i in range(nrows)) % mod
         for r in range(nrows)]
    x = [0] * len(cols)
    for (r, c, v) in reversed(pivots):
        val = b[r] % mod
        if val == 0:
            continue
        if _vp(val, p, k) < v:
            return None
        piv = a[r][c]
        unit_inv = pow(piv // (p ** v), -1, mod)
        coef = (val // (p ** v)) * unit_inv % mod
        x[c] = coef
        for rr in range(nrows):
            b[rr] = (b[rr] - coef * a[rr][c]) % mod
    if any(v % mod for v in b):
        return None
    return x


def nullspace_mod_pk(cols, p, k):
    """Generators of combinations sum x_c cols[c] = 0 mod p^k.

    For each column, the smallest p-power multiple of it that falls in the
    span of the remaining columns yields a generator; columns that are zero
    mod p^k contribute unit vectors.  Zero vectors are never emitted.
    """
    mod = p ** k
    out = []
    for idx in range(len(cols)):
        col = cols[idx]
        if all(x % mod == 0 for x in col):
            vec = [0] * len(cols)
            vec[idx] = 1
            out.append(vec)
            continue
        others = cols[:idx] + cols[idx + 1:]
        for t in range(k):
            scale = p ** t
            if scale % mod == 0:
                break
            target = [(-scale * x) % mod for x in col]
            sol = solve_mod_pk(others, target, p, k)
            if sol is not None:
                vec = sol[:idx] + [scale] + sol[idx:]
                if any(x % mod for x in vec):
                    out.append(vec)
                break
    return out
