"""Independent brute-force reference implementations.

Everything here favors obviousness over speed and shares no code with
the package: plain float scans with tolerance guards, sympy for exact
eigenvalues.  Tests compare package output against these.
"""

import math

PHI = (1 + math.sqrt(5)) / 2


def brute_force_points(basis, window, xi, box, kmax, tol=1e-9):
    """Accepted projections by a float scan over all |k| <= kmax.

    basis is ((i1, i2), (p1, p2)) as floats (internal row first),
    window and box are (lo, hi) pairs, xi is (internal, physical).
    Window membership is open, box membership closed.  Any candidate
    landing within tol of the window boundary aborts: the caller must
    pick parameters where floats cannot lie.
    """
    (i1, i2), (p1, p2) = basis
    wlo, whi = window
    blo, bhi = box
    out = []
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            w = i1 * k1 + i2 * k2 + xi[0]
            x = p1 * k1 + p2 * k2 + xi[1]
            if not (blo - tol <= x <= bhi + tol):
                continue
            if min(abs(w - wlo), abs(w - whi)) < tol:
                raise AssertionError(
                    "float oracle undecidable at the window edge"
                )
            if wlo < w < whi:
                out.append(x)
    out.sort()
    return out


def brute_force_min_gap(xs, r, zero_tol=1e-8):
    """Minimum spacing of the pairwise-difference set inside [-r, r]."""
    diffs = set()
    for a in xs:
        for b in xs:
            d = a - b
            if abs(d) <= r:
                diffs.add(round(d, 9))
    ds = sorted(diffs)
    best = None
    for a, b in zip(ds, ds[1:]):
        g = b - a
        if g > zero_tol and (best is None or g < best):
            best = g
    return best


def sympy_eigenvals(matrix):
    """Exact eigenvalue -> multiplicity via sympy."""
    import sympy

    return {
        sympy.simplify(ev): int(mult)
        for ev, mult in sympy.Matrix(matrix).eigenvals().items()
    }


def brute_force_word(rules, seed, n):
    word = [seed]
    for _ in range(n):
        word = [s for letter in word for s in rules[letter]]
    return word


def brute_force_realization(rules, lengths, seed, n, marked):
    """Float left endpoints of marked tiles in the expanded word."""
    xs = []
    pos = 0.0
    for letter in brute_force_word(rules, seed, n):
        if letter in marked:
            xs.append(pos)
        pos += lengths[letter]
    return xs


def letter_counts(word, alphabet):
    return [sum(1 for c in word if c == a) for a in alphabet]


def patch_signature(xs, i, r, ndigits=9):
    """Rounded displacement tuple of the r-ball at index i (sorted xs)."""
    x = xs[i]
    return tuple(
        round(y - x, ndigits) for y in xs if abs(y - x) <= r + 10 ** -ndigits
    )


def pe_violations(xs, values, r, tol=1e-9):
    """Pairs with equal r-patches but different values (float check).

    xs must be sorted; values aligned with xs; only indices whose ball
    fits inside [xs[0] + r, xs[-1] - r] participate.
    """
    groups = {}
    for i in range(len(xs)):
        if xs[i] - r < xs[0] - tol or xs[i] + r > xs[-1] + tol:
            continue
        groups.setdefault(patch_signature(xs, i, r), []).append(i)
    bad = []
    for members in groups.values():
        v0 = values[members[0]]
        for j in members[1:]:
            if abs(values[j] - v0) > tol:
                bad.append((members[0], j))
    return bad
