"""Independent orbit census used by the acceptance suite.

Everything here works on raw integer form triples (A, B, C) with its own
group action and its own stabilizer search, so agreement with
quadforms.enumerate_orbits is a genuine cross-check, not a reflection.
"""

import math
from math import isqrt


def apply_form(g, form):
    """Gram-conjugation action g . Q . g^T written out on (A, B, C)."""
    (a, b), (c, d) = g
    A, B, C = form
    A2 = A * a * a + B * a * b + C * b * b
    C2 = A * c * c + B * c * d + C * d * d
    B2 = 2 * A * a * c + B * (a * d + b * c) + 2 * C * b * d
    return (A2, B2, C2)


def gens_gamma0(N):
    return [((1, 1), (0, 1)), ((1, -1), (0, 1)),
            ((1, 0), (N, 1)), ((1, 0), (-N, 1))]


def _level_forms(N, d, K):
    """All level-N points (v1, v2, v3) with N v2^2 - v1 v3 = d and
    |v1|, |N v3| <= K, as integral forms (v1, 2 N v2, N v3)."""
    out = set()
    for v1 in range(-K, K + 1):
        for v3 in range(-(K // N), K // N + 1):
            m = d + v1 * v3
            if m < 0 or m % N:
                continue
            s = m // N
            r = isqrt(s)
            if r * r != s:
                continue
            for v2 in {r, -r}:
                out.add((v1, 2 * N * v2, N * v3))
    return out


def _half_forms(D, K):
    out = set()
    for A in range(-K, K + 1):
        for C in range(-K, K + 1):
            m = D + 4 * A * C
            if m < 0:
                continue
            r = isqrt(m)
            if r * r != m:
                continue
            for B in {r, -r}:
                if B * B - 4 * A * C == D:
                    out.add((A, B, C))
    return out


def _in_small_box(form, K, N, lattice):
    A, B, C = form
    return abs(A) <= K and abs(C) <= K


class _UnionFind(dict):
    def find(self, x):
        while self[x] != x:
            self[x] = self[self[x]]
            x = self[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self[max(rx, ry)] = min(rx, ry)


def _components(forms, N):
    uf = _UnionFind({f: f for f in forms})
    gens = gens_gamma0(N)
    for f in forms:
        for g in gens:
            h = apply_form(g, f)
            if h in uf:
                uf.union(f, h)
    comps = {}
    for f in forms:
        comps.setdefault(uf.find(f), set()).add(f)
    return comps


def census(N, target, lattice, K=30, grow=2, max_grow=4):
    """Orbit components of the invariant-`target` forms under Gamma_0(N).

    Enumerates inside |A|, |C| <= K*grow^j and keeps only components
    meeting the base box; the count must be stable under one further
    enlargement or we keep growing (connectivity can pass through larger
    intermediate forms).  Returns a list of frozensets of forms.
    """
    if lattice == "V" and target % 4 in (2, 3):
        return []
    prev = None
    for j in range(1, max_grow + 1):
        K2 = K * grow ** j
        forms = (_level_forms(N, target, K2) if lattice == "L"
                 else _half_forms(target, K2))
        comps = _components(forms, N)
        kept = [frozenset(v) for v in comps.values()
                if any(_in_small_box(f, K, N, lattice) for f in v)]
        if prev is not None and len(kept) == prev:
            return kept
        prev = len(kept)
    raise RuntimeError(
        f"census did not stabilize for N={N} target={target} {lattice}")


# ---------------------------------------------------------------------------
# stabilizers from the (t, u) parametrization
# ---------------------------------------------------------------------------
#
# A multiple of a form has the same symmetries as its primitive part, so
# all (t, u) work runs on the primitive coefficients.  In the action
# convention above (Gram -> g Gram g^T) the stabilizing matrix built from
# (t, u) has lower-left entry -C0 u, so the Gamma_0(N) condition reads on
# C0 u, not A0 u.


def primitive_part(form):
    A, B, C = form
    g = math.gcd(math.gcd(abs(A), abs(B)), abs(C))
    return (A // g, B // g, C // g)


def definite_epsilon(form, N):
    """Order of the level-N stabilizer of a definite form."""
    A0, B0, C0 = primitive_part(form)
    D = B0 * B0 - 4 * A0 * C0
    assert D < 0
    count = 0
    ubound = isqrt(4 // (-D)) if -D <= 4 else 0
    for u in range(-ubound, ubound + 1):
        m = 4 + D * u * u
        if m < 0:
            continue
        t = isqrt(m)
        if t * t != m:
            continue
        for tt in ({t, -t} if t else {0}):
            if (tt - B0 * u) % 2:
                continue
            if (C0 * u) % N == 0:
                count += 1
    return count


def fundamental_tu(D, ucap=10**7):
    """Smallest u > 0 with t^2 - D u^2 = 4; D positive nonsquare."""
    assert D > 0 and isqrt(D) ** 2 != D
    for u in range(1, ucap):
        m = 4 + D * u * u
        t = isqrt(m)
        if t * t == m:
            return t, u
    raise RuntimeError(f"no Pell solution below {ucap} for D={D}")


def level_automorph_tu(form, N, kcap=200):
    """Minimal power of the fundamental automorph landing in Gamma_0(N)."""
    A0, B0, C0 = primitive_part(form)
    D = B0 * B0 - 4 * A0 * C0
    t1, u1 = fundamental_tu(D)
    t, u = t1, u1
    for _ in range(kcap):
        if (C0 * u) % N == 0:
            return t, u
        t, u = (t1 * t + D * u1 * u) // 2, (t1 * u + u1 * t) // 2
    raise RuntimeError(f"no Gamma_0({N}) automorph within {kcap} powers")
