"""Independent reference computations used by the tests.

Nothing here calls into the package's own algorithms; each oracle is a
brute-force or closed-form route to the same number.
"""
import itertools
import math
from fractions import Fraction

import numpy as np


def hausdorff_bruteforce(A, B):
    """O(nm) Hausdorff distance between interval lists.

    sup_{a in A} dist(a, B) is attained at an endpoint of A or at the point of
    A closest to the midpoint of a gap of B.
    """
    def dist(x, ivs):
        return min(0.0 if lo <= x <= hi else min(abs(x - lo), abs(x - hi)) for lo, hi in ivs)

    def one(A, B):
        cands = [p for iv in A for p in iv]
        Bs = sorted(B)
        for (_, h0), (l1, _) in zip(Bs, Bs[1:]):
            m = 0.5 * (h0 + l1)
            for lo, hi in A:
                cands.append(min(max(m, lo), hi))
        return max(dist(c, B) for c in cands)

    return max(one(A, B), one(B, A))


def mechanical_bits(alpha: Fraction, theta: Fraction, n0, n1):
    return "".join(str(math.floor((n + 1) * alpha + theta) - math.floor(n * alpha + theta))
                   for n in range(n0, n1 + 1))


def continued_fraction_mp(x, count, dps=60):
    import mpmath
    mpmath.mp.dps = dps
    x = mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x
    terms = []
    for _ in range(count):
        a = int(mpmath.floor(x))
        terms.append(a)
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return terms


def convergents_plain(terms):
    h0, h1, k0, k1 = 0, 1, 1, 0
    out = []
    for a in terms:
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append(Fraction(h1, k1))
    return out


def path_laplacian_eigs(N):
    return np.sort(2 * np.cos(np.arange(1, N + 1) * np.pi / (N + 1)))


def ring_laplacian_eigs(N):
    return np.sort(2 * np.cos(2 * np.pi * np.arange(N) / N))


def dense_band_union(fn, ks):
    """Min/max of each sorted eigenvalue branch over a dense k list."""
    E = np.array([np.linalg.eigvalsh(fn(k)) for k in ks])
    return [(E[:, j].min(), E[:, j].max()) for j in range(E.shape[1])]


def window_point_distance(u: str, v: str, W: int):
    """2^-min|k| over centred windows of radius W; None if they agree."""
    ks = [abs(i - W) for i in range(2 * W + 1) if u[i] != v[i]]
    return Fraction(1, 2 ** min(ks)) if ks else None


def necklaces_bruteforce(alphabet, max_len):
    """One representative (the minimal rotation) per primitive necklace."""
    seen = set()
    for n in range(1, max_len + 1):
        for t in itertools.product(alphabet, repeat=n):
            w = "".join(t)
            rots = {w[i:] + w[:i] for i in range(n)}
            if len(rots) == n:
                seen.add(min(rots))
    return sorted(seen)
