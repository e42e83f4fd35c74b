"""Integral binary quadratic forms, the two symmetric-matrix lattices built
from them, and their orbits under the congruence group of a given level.

Two lattices appear, both encoded as coefficient triples of binary quadratic
forms (A, B, C) <-> A x^2 + B x y + C y^2 <-> Gram matrix [[A, B/2], [B/2, C]]:

  * level lattice, points (v1, v2, v3) with Gram [[v1, N v2], [N v2, N v3]],
    i.e. forms (A, B, C) = (v1, 2 N v2, N v3); invariant d = N v2^2 - v1 v3,
    form discriminant D = B^2 - 4AC = 4 N d;
  * half-integral lattice, points (w1, w2, w3) with Gram
    [[w1, w2/2], [w2/2, w3]]: every integral form; invariant is the form
    discriminant D = w2^2 - 4 w1 w3 itself.

The group acts by gamma . v = gamma v gamma^T on Gram matrices; on form
triples that is

  act(gamma, (A,B,C)) = (Q(a,b), 2acA + (ad+bc)B + 2bdC, Q(c,d)),
  Q(x,y) = A x^2 + B x y + C y^2,  gamma = [[a, b], [c, d]].

Orbit machinery: classes of all integral forms of a fixed discriminant under
the full modular group are listed by classical reduction theory (Gauss
reduction for definite ones, the reduced-cycle walk for indefinite nonsquare
ones, null-vector normal forms (a, m, 0) for square discriminant m^2); the
finer level-N orbits inside one such class biject with orbits of the class
representative's stabilizer acting on the projective line P^1(Z/N) of coset
labels. Stabilizers come from the Pell-type equation t^2 - D u^2 = 4: the
matrix ((t - B u)/2, A u; -C u, (t + B u)/2) fixes (A, B, C), and every
stabilizing matrix is of this shape. Each constructed automorph is verified
against its defining property before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import mpmath
import numpy as np

LATTICE_LEVEL = "L"  # (v1, v2, v3), Gram [[v1, N v2],[N v2, N v3]]
LATTICE_HALF = "V"  # (w1, w2, w3), Gram [[w1, w2/2],[w2/2, w3]]

S_MAT = ((0, -1), (1, 0))
T_MAT = ((1, 1), (0, 1))
NEG_I = ((-1, 0), (0, -1))


@dataclass(frozen=True)
class LatticePoint:
    v1: int
    v2: int
    v3: int
    N: int

    def form(self):
        return (self.v1, 2 * self.N * self.v2, self.N * self.v3)

    def invariant(self) -> int:
        """d = N v2^2 - v1 v3, positive on indefinite points."""
        return self.N * self.v2 * self.v2 - self.v1 * self.v3

    def gram(self):
        return np.array(
            [[self.v1, self.N * self.v2], [self.N * self.v2, self.N * self.v3]], dtype=float
        )

    @staticmethod
    def from_form(form, N: int) -> "LatticePoint":
        A, B, C = form
        if B % (2 * N) != 0 or C % N != 0:
            raise ValueError(f"form {form} is not a level-{N} lattice point")
        return LatticePoint(A, B // (2 * N), C // N, N)


@dataclass(frozen=True)
class HalfIntegralPoint:
    w1: int
    w2: int
    w3: int

    def form(self):
        return (self.w1, self.w2, self.w3)

    def invariant(self) -> int:
        """The form discriminant w2^2 - 4 w1 w3."""
        return self.w2 * self.w2 - 4 * self.w1 * self.w3

    def gram(self):
        return np.array([[self.w1, self.w2 / 2.0], [self.w2 / 2.0, self.w3]], dtype=float)

    @staticmethod
    def from_form(form, N: int = 0) -> "HalfIntegralPoint":
        return HalfIntegralPoint(*form)


def orbit_invariant(point) -> int:
    return point.invariant()


# ---------------------------------------------------------------------------
# group action on forms
# ---------------------------------------------------------------------------


def mat_mul(g, h):
    return (
        (g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
        (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]),
    )


def mat_inv(g):
    a, b = g[0]
    c, d = g[1]
    det = a * d - b * c
    if det != 1:
        raise ValueError("only determinant-one matrices are invertible here")
    return ((d, -b), (-c, a))


def act(gamma, form):
    """gamma . form for gamma in SL2(Z), matching gamma Gram gamma^T."""
    a, b = gamma[0]
    c, d = gamma[1]
    A, B, C = form
    A2 = A * a * a + B * a * b + C * b * b
    C2 = A * c * c + B * c * d + C * d * d
    B2 = 2 * a * c * A + (a * d + b * c) * B + 2 * b * d * C
    return (A2, B2, C2)


def act_point(gamma, point):
    if isinstance(point, LatticePoint):
        return LatticePoint.from_form(act(gamma, point.form()), point.N)
    return HalfIntegralPoint(*act(gamma, point.form()))


def form_disc(form) -> int:
    A, B, C = form
    return B * B - 4 * A * C


def signature_of(form) -> str:
    D = form_disc(form)
    if D > 0:
        return "indefinite"
    if D == 0:
        raise ValueError("degenerate form")
    return "positive-definite" if form[0] > 0 else "negative-definite"


# ---------------------------------------------------------------------------
# Pell machinery: fundamental solution of t^2 - D u^2 = 4
# ---------------------------------------------------------------------------


def pell_unit(d: int):
    """Fundamental solution of x^2 - d y^2 = 1, d > 1 nonsquare, via the
    continued fraction of sqrt(d). Exact integer arithmetic throughout."""
    a0 = isqrt(d)
    if a0 * a0 == d:
        raise ValueError("d must be nonsquare")
    m, q, a = 0, 1, a0
    p_prev, p_cur = 1, a0
    q_prev, q_cur = 0, 1
    for _ in range(10**7):
        if p_cur * p_cur - d * q_cur * q_cur == 1:
            return p_cur, q_cur
        m = a * q - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    raise RuntimeError("Pell iteration failed to terminate")


def _try_cube_root(D: int, x: int, y: int):
    """If x + y sqrt(D) is the cube of (t + u sqrt(D))/2 with integer t, u,
    return (t, u); otherwise None. Needed because the norm-4 unit group can be
    three times larger than the classic Pell group when D is odd."""
    digits = max(30, int(len(str(x)) * 1.2) + 30)
    with mpmath.workdps(digits):
        val = mpmath.mpf(x) + mpmath.mpf(y) * mpmath.sqrt(D)
        croot = mpmath.cbrt(val)
        t = int(mpmath.nint(croot + 1 / croot))
        u = int(mpmath.nint((croot - 1 / croot) / mpmath.sqrt(D)))
    if t <= 0 or u <= 0:
        return None
    if t * t - D * u * u != 4:
        return None
    # confirm the cube identity exactly
    if (t * t * t + 3 * t * u * u * D) != 8 * x or (3 * t * t * u + u * u * u * D) != 8 * y:
        return None
    return t, u


@lru_cache(maxsize=None)
def pell4(D: int):
    """Fundamental (t, u), t, u > 0, of t^2 - D u^2 = 4 for D > 0 nonsquare."""
    if D <= 0 or isqrt(D) ** 2 == D:
        raise ValueError("pell4 needs positive nonsquare D")
    if D % 4 == 0:
        x, y = pell_unit(D // 4)
        return 2 * x, y
    x, y = pell_unit(D)
    half = _try_cube_root(D, x, y)
    if half is not None:
        return half
    return 2 * x, 2 * y


def primitive_part(form):
    """(form / content, content). Stabilizers only see the primitive part."""
    g = gcd(gcd(form[0], form[1]), form[2])
    return (form[0] // g, form[1] // g, form[2] // g), g


def automorph(form, t: int, u: int):
    """The stabilizing matrix attached to a solution of t^2 - D0 u^2 = 4,
    where D0 is the discriminant of the primitive part of the form."""
    (A, B, C), _ = primitive_part(form)
    if (t - B * u) % 2 != 0:
        raise ValueError("parity violation in automorph parameters")
    g = (((t - B * u) // 2, A * u), (-C * u, (t + B * u) // 2))
    if act(g, form) != tuple(form):
        raise AssertionError(f"automorph failed to stabilize {form}: {g}")
    return g


def fundamental_automorph_matrix(form):
    """Generator (mod sign) of the full-group stabilizer of an indefinite
    nonsquare form."""
    (_, _, _), g0 = primitive_part(form)
    D0 = form_disc(form) // (g0 * g0)
    t, u = pell4(D0)
    return automorph(form, t, u)


def stabilizer_elements(form, N: int = 1):
    """All level-N stabilizing matrices of a definite form (a finite list)."""
    D = form_disc(form)
    if D >= 0:
        raise ValueError("finite stabilizers belong to definite forms")
    (A0, B0, C0), g0 = primitive_part(form)
    D0 = D // (g0 * g0)
    out = []
    for u in range(0, isqrt((4 // -D0) if -D0 <= 4 else 0) + 1):
        tt = 4 + D0 * u * u
        if tt < 0:
            break
        t = isqrt(tt)
        if t * t != tt:
            continue
        cands = {(t, u), (-t, u), (t, -u), (-t, -u)}
        for tc, uc in cands:
            if tc == 0 and uc == 0:
                continue
            if (tc - B0 * uc) % 2 != 0:
                continue
            if (C0 * uc) % N != 0:
                continue
            g = automorph(form, tc, uc)
            if g not in out:
                out.append(g)
    return sorted(out)


def automorph_in_level_group(form, N: int):
    """Smallest positive power of the fundamental automorph landing in the
    level-N group, returned as (matrix, k, (t_k, u_k), D0) with the primitive
    discriminant D0 attached so eigenvalues read (t + u sqrt(D0)) / 2."""
    (_, _, C0), g0 = primitive_part(form)
    D0 = form_disc(form) // (g0 * g0)
    t1, u1 = pell4(D0)
    t, u = t1, u1
    for k in range(1, 10**6):
        if (C0 * u) % N == 0:
            return automorph(form, t, u), k, (t, u), D0
        tt, uu = t1 * t + D0 * u1 * u, t1 * u + u1 * t
        assert tt % 2 == 0 and uu % 2 == 0
        t, u = tt // 2, uu // 2
    raise RuntimeError("no stabilizer power landed in the level group")


# ---------------------------------------------------------------------------
# full-group class representatives per discriminant
# ---------------------------------------------------------------------------


def _classes_definite(D: int):
    """Gauss-reduced positive forms of disc D < 0, plus their negatives."""
    reps = []
    for A in range(1, isqrt(-D // 3) + 1):
        for B in range(-A + 1, A + 1):
            if (B * B - D) % (4 * A) != 0:
                continue
            C = (B * B - D) // (4 * A)
            if C < A:
                continue
            if B < 0 and (abs(B) == A or A == C):
                continue
            reps.append((A, B, C))
    out = []
    for f in sorted(reps):
        out.append(f)
        out.append((-f[0], -f[1], -f[2]))
    return out


def _is_reduced_indef(form, D: int) -> bool:
    """0 < B < sqrt(D) and |sqrt(D) - 2|A|| < B, checked in exact integers."""
    A, B, C = form
    if B <= 0 or B * B >= D:
        return False
    t = 2 * abs(A)
    if D >= (t + B) * (t + B):
        return False
    return t <= B or (t - B) * (t - B) < D


def _rho_step(form, D: int):
    """One classical reduction step (swap outer slots, normalize the middle
    one), with its matrix witness."""
    sq = isqrt(D)
    g = S_MAT
    f = act(g, form)  # (C, -B, A)
    A1, B1, _ = f
    if A1 == 0:
        return f, g
    m = 2 * abs(A1)
    if abs(A1) > sq:
        # normalize into (-|A1|, |A1|]
        Bp = ((B1 + abs(A1) - 1) % m) - abs(A1) + 1
    else:
        # normalize into (sq - m, sq], the integer window below sqrt(D)
        Bp = sq - ((sq - B1) % m)
    k = (Bp - B1) // (2 * A1)
    assert B1 + 2 * k * A1 == Bp
    h = ((1, 0), (k, 1))
    return act(h, f), mat_mul(h, g)


def _reduce_indef(form, D: int):
    """Reduce an indefinite nonsquare form; returns (reduced, gamma) with
    act(gamma, form) == reduced."""
    f = tuple(form)
    g = ((1, 0), (0, 1))
    for _ in range(10000):
        if _is_reduced_indef(f, D):
            return f, g
        f, step = _rho_step(f, D)
        g = mat_mul(step, g)
    raise RuntimeError(f"indefinite reduction did not terminate for {form}")


def _cycle_of(form, D: int):
    """The reduction cycle through a reduced indefinite form (forms only)."""
    cyc = [tuple(form)]
    f = tuple(form)
    for _ in range(20000):
        f, _ = _rho_step(f, D)
        if not _is_reduced_indef(f, D):
            raise AssertionError("cycle walk left the reduced set")
        if f == cyc[0]:
            return cyc
        cyc.append(f)
    raise RuntimeError("reduction cycle did not close")


def _reduced_indef_all(D: int):
    sq = isqrt(D)
    out = []
    b0 = 1 if D % 2 == 1 else 2
    for B in range(b0, sq + 1, 2):
        M4 = D - B * B
        if M4 <= 0 or M4 % 4 != 0:
            continue
        M = M4 // 4  # = -A C > 0
        a = 1
        while a * a <= M:
            if M % a == 0:
                for A in (a, M // a) if a != M // a else (a,):
                    for sgnA in (A, -A):
                        f = (sgnA, B, -M // sgnA)
                        if _is_reduced_indef(f, D):
                            out.append(f)
            a += 1
    return sorted(set(out))


def _classes_indef_nonsquare(D: int):
    forms = _reduced_indef_all(D)
    seen = set()
    reps = []
    for f in forms:
        if f in seen:
            continue
        cyc = _cycle_of(f, D)
        for g in cyc:
            seen.add(g)
        reps.append(min(cyc))
    return sorted(reps)


def _classes_square(D: int):
    m = isqrt(D)
    assert m * m == D and m > 0
    return [(a, m, 0) for a in range(m)]


@lru_cache(maxsize=None)
def sl2_class_reps(D: int):
    """Deterministic full-group class representatives, all contents included."""
    if D == 0:
        raise ValueError("degenerate discriminant")
    if D % 4 in (2, 3):
        return tuple()
    if D < 0:
        return tuple(_classes_definite(D))
    if isqrt(D) ** 2 == D:
        return tuple(_classes_square(D))
    return tuple(_classes_indef_nonsquare(D))


def _null_vector_normal_form(form, D: int):
    """For square D = m^2 > 0, the witness pair (normal form (a, m, 0), gamma)
    with act(gamma, form) == normal form."""
    A, B, C = form
    m = isqrt(D)
    # roots of A x^2 + B x y + C y^2 = 0: lines x/y = (-B +- m)/(2A) (A != 0)
    # or y = 0 plus x/y = -C/B (A == 0)
    lines = []
    if A != 0:
        for sgn in (1, -1):
            p, q = -B + sgn * m, 2 * A
            g = gcd(p, q)
            lines.append((p // g, q // g))
    else:
        lines.append((1, 0))
        if B != 0:
            p, q = -C, B
            g = gcd(p, q)
            lines.append((p // g, q // g))
    for (x0, y0) in lines:
        # bottom row (c, d) = null vector, so the transformed C-slot vanishes
        c, d = x0, y0
        gg, s, t = _xgcd(c, d)
        assert gg in (1, -1)
        if gg == -1:
            s, t = -s, -t
        # a d - b c = 1 with (a, b) = (t, -s)
        gamma = ((t, -s), (c, d))
        f2 = act(gamma, form)
        assert f2[2] == 0 and abs(f2[1]) == m
        if f2[1] == m:
            a0 = f2[0] % m if m > 0 else f2[0]
            j = (a0 - f2[0]) // m
            # upper translation (1, j; 0, 1) sends (A', m, 0) to (A' + j m, m, 0)
            h = ((1, j), (0, 1))
            f3 = act(h, f2)
            assert f3 == (a0, m, 0)
            return f3, mat_mul(h, gamma)
    raise AssertionError(f"no null line produced the positive middle slot for {form}")


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    return old_r, old_s, old_t


def _reduce_definite(form):
    """Gauss reduction with witness; handles both signs."""
    sign = 1 if form[0] > 0 else -1
    f = tuple(form)
    g = ((1, 0), (0, 1))
    for _ in range(10000):
        A, B, C = (sign * x for x in f)
        if abs(B) <= A <= C and not (B < 0 and (abs(B) == A or A == C)):
            return f, g
        if C < A or (C == A and B < 0):
            f = act(S_MAT, f)
            g = mat_mul(S_MAT, g)
            continue
        k = round(Fraction(-B, 2 * A))
        if k == 0:
            k = -1 if B > 0 else 1
        h = ((1, 0), (k, 1))
        f = act(h, f)
        g = mat_mul(h, g)
    raise RuntimeError(f"definite reduction did not terminate for {form}")


def sl2_reduce(form):
    """(canonical full-group class representative, gamma) with
    act(gamma, form) == representative. The representative matches the one
    produced by sl2_class_reps for the same discriminant."""
    D = form_disc(form)
    if D == 0:
        raise ValueError("degenerate form")
    if D < 0:
        return _reduce_definite(form)
    if isqrt(D) ** 2 == D:
        return _null_vector_normal_form(form, D)
    f, g = _reduce_indef(form, D)
    # walk the cycle to its minimum, composing witnesses
    best_f, best_g = f, g
    cur_f, cur_g = f, g
    for _ in range(20000):
        cur_f, step = _rho_step(cur_f, D)
        cur_g = mat_mul(step, cur_g)
        if cur_f == f:
            break
        if cur_f < best_f:
            best_f, best_g = cur_f, cur_g
    else:
        raise RuntimeError("cycle minimum search did not close")
    return best_f, best_g


# ---------------------------------------------------------------------------
# projective line over Z/N and coset transversal
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _units_mod(N: int):
    return tuple(u for u in range(1, N + 1) if gcd(u, N) == 1) if N > 1 else (0,)


def proj_normalize(N: int, c: int, d: int):
    """Canonical representative of the unit-scaling class of (c, d) mod N."""
    if N == 1:
        return (0, 0)
    c %= N
    d %= N
    best = None
    for u in _units_mod(N):
        cand = ((u * c) % N, (u * d) % N)
        if best is None or cand < best:
            best = cand
    return best


@lru_cache(maxsize=None)
def proj_line(N: int):
    """Canonical labels of P^1(Z/N)."""
    if N == 1:
        return ((0, 0),)
    labels = set()
    for c in range(N):
        for d in range(N):
            if gcd(gcd(c, d), N) != 1:
                continue
            labels.add(proj_normalize(N, c, d))
    return tuple(sorted(labels))


@lru_cache(maxsize=None)
def coset_rep(N: int, label):
    """An integer matrix in the full group whose bottom row reduces to label."""
    if N == 1:
        return ((1, 0), (0, 1))
    c, d = label
    cc = c if c != 0 else N
    for k in range(0, 10 * cc + 10):
        for dd in ((d + k * N, d - k * N) if k else (d,)):
            if gcd(cc, dd) == 1:
                g, s, t = _xgcd(cc, dd)
                if g == -1:
                    s, t = -s, -t
                gamma = ((t, -s), (cc, dd))
                assert gamma[0][0] * gamma[1][1] - gamma[0][1] * gamma[1][0] == 1
                assert coset_label(N, gamma) == label
                return gamma
    raise RuntimeError(f"could not lift label {label} at level {N}")


def coset_label(N: int, gamma):
    return proj_normalize(N, gamma[1][0] % N, gamma[1][1] % N)


@lru_cache(maxsize=None)
def gamma0_generators(N: int):
    """Schreier generators of the level-N group from the coset action of the
    two standard generators of the full modular group."""
    labels = proj_line(N)
    idx = {lab: coset_rep(N, lab) for lab in labels}
    gens = []
    seen = set()
    for lab in labels:
        tl = idx[lab]
        for g in (S_MAT, T_MAT):
            prod = mat_mul(tl, g)
            lab2 = coset_label(N, prod)
            t2 = idx[lab2]
            sch = mat_mul(prod, mat_inv(t2))
            assert sch[1][0] % N == 0
            if sch not in seen and sch != ((1, 0), (0, 1)):
                seen.add(sch)
                gens.append(sch)
    if NEG_I not in seen:
        gens.append(NEG_I)
    return tuple(gens)


# ---------------------------------------------------------------------------
# orbit enumeration at level N
# ---------------------------------------------------------------------------


@dataclass
class OrbitRep:
    """One level-N orbit on a lattice of fixed invariant.

    point          representative lattice point (canonical, deterministic)
    signature      'indefinite' / 'positive-definite' / 'negative-definite'
    stabilizer     int order for definite points, the string
                   'infinite-cyclic' for indefinite nonsquare ones, 'trivial'
                   for square discriminant
    epsilon        the finite stabilizer order (definite points only)
    heegner        the upper fixed point z of the form (definite only)
    geodesic       (low endpoint, high endpoint) of the root geodesic
                   (indefinite only)
    automorph      generator of the level-N stabilizer mod sign (indefinite
                   nonsquare only), with its (t, u) and eigenvalue
    g              real matrix with point = +- t_scale * g J g^T (J the
                   relevant base point), mapping the model geodesic or i to
                   the orbit data
    t_scale        sqrt(|D|)/2 where D is the form discriminant
    """

    point: object
    lattice: str
    N: int
    target: int
    signature: str
    stabilizer: object
    epsilon: int | None
    heegner: complex | None
    geodesic: tuple | None
    automorph: tuple | None
    automorph_tu: tuple | None
    unit_eigenvalue: float | None
    g: np.ndarray
    t_scale: float
    class_form: tuple
    coset: tuple

    def key(self):
        return (self.lattice, self.N, self.target, self.point.form())


def _membership(lattice: str, N: int, form) -> bool:
    if lattice == LATTICE_HALF:
        return True
    A, B, C = form
    return B % (2 * N) == 0 and C % N == 0


def _point_of(lattice: str, N: int, form):
    if lattice == LATTICE_HALF:
        return HalfIntegralPoint(*form)
    return LatticePoint.from_form(form, N)


def _frame_definite(form):
    A, B, C = form
    D = form_disc(form)
    sq = math.sqrt(-D)
    z = complex((B + 1j * math.copysign(sq, C)) / (2 * C))
    y = z.imag
    g = np.array([[math.sqrt(y), z.real / math.sqrt(y)], [0.0, 1.0 / math.sqrt(y)]])
    return z, g


def _frame_indefinite(form):
    A, B, C = form
    D = form_disc(form)
    sq = math.sqrt(D)
    if C != 0:
        r1 = (B - sq) / (2 * C)
        r2 = (B + sq) / (2 * C)
        lo, hi = min(r1, r2), max(r1, r2)
        g = np.array([[hi, lo], [1.0, 1.0]]) / math.sqrt(hi - lo)
    else:
        # one endpoint at infinity: vertical geodesic over A/B
        lo, hi = A / B, math.inf
        g = np.array([[1.0, A / B], [0.0, 1.0]])
    # fix the sign so that Gram = + t_scale * g J g^T
    J = np.array([[0.0, 1.0], [1.0, 0.0]])
    gram = np.array([[A, B / 2.0], [B / 2.0, C]])
    t_scale = sq / 2.0
    recon = t_scale * g @ J @ g.T
    if not np.allclose(recon, gram, rtol=1e-9, atol=1e-9 * max(1.0, abs(A), abs(C))):
        flip = np.array([[0.0, -1.0], [1.0, 0.0]])
        g = g @ flip
        recon = t_scale * g @ J @ g.T
        if not np.allclose(recon, gram, rtol=1e-9, atol=1e-9 * max(1.0, abs(A), abs(C))):
            raise AssertionError(f"frame reconstruction failed for {form}")
    return (lo, hi), g


def _orbit_stabilizer_data(lattice, N, form):
    D = form_disc(form)
    sig = signature_of(form)
    if D < 0:
        elems = stabilizer_elements(form, N)
        z, g = _frame_definite(form)
        return {
            "signature": sig,
            "stabilizer": len(elems),
            "epsilon": len(elems),
            "heegner": z,
            "geodesic": None,
            "automorph": None,
            "automorph_tu": None,
            "unit_eigenvalue": None,
            "g": g,
            "t_scale": math.sqrt(-D) / 2.0,
        }
    endpoints, g = _frame_indefinite(form)
    if isqrt(D) ** 2 == D:
        return {
            "signature": sig,
            "stabilizer": "trivial",
            "epsilon": None,
            "heegner": None,
            "geodesic": endpoints,
            "automorph": None,
            "automorph_tu": None,
            "unit_eigenvalue": None,
            "g": g,
            "t_scale": math.sqrt(D) / 2.0,
        }
    mat, k, (t, u), D0 = automorph_in_level_group(form, N)
    eps0 = (t + u * math.sqrt(D0)) / 2.0
    return {
        "signature": sig,
        "stabilizer": "infinite-cyclic",
        "epsilon": None,
        "heegner": None,
        "geodesic": endpoints,
        "automorph": mat,
        "automorph_tu": (t, u),
        "unit_eigenvalue": eps0,
        "g": g,
        "t_scale": math.sqrt(D) / 2.0,
    }


def _stabilizer_gens_for_merge(form):
    D = form_disc(form)
    if D < 0:
        return stabilizer_elements(form, 1)
    if isqrt(D) ** 2 == D:
        return [NEG_I]
    g0 = fundamental_automorph_matrix(form)
    return [NEG_I, g0, mat_inv(g0)]


def enumerate_orbits(N: int, target: int, lattice: str):
    """Level-N orbit representatives on the chosen lattice at one invariant.

    For the level lattice the invariant is d (form discriminant 4 N d); for
    the half-integral lattice it is the form discriminant itself, and targets
    not congruent to a square mod 4 yield the empty list.
    """
    if target == 0:
        raise ValueError("invariant 0 is degenerate")
    if lattice not in (LATTICE_LEVEL, LATTICE_HALF):
        raise ValueError(f"unknown lattice {lattice!r}")
    D = 4 * N * target if lattice == LATTICE_LEVEL else target
    if lattice == LATTICE_HALF and D % 4 in (2, 3):
        return []
    labels = proj_line(N)
    label_index = {lab: i for i, lab in enumerate(labels)}
    reps_out = []
    for f0 in sl2_class_reps(D):
        stab_gens = _stabilizer_gens_for_merge(f0)
        # right action of the stabilizer on coset labels
        parent = list(range(len(labels)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i, j):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

        mats = [coset_rep(N, lab) for lab in labels]
        for i, m in enumerate(mats):
            for s in stab_gens:
                prod = mat_mul(m, s)
                j = label_index[coset_label(N, prod)]
                union(i, j)
        groups: dict[int, list[int]] = {}
        for i in range(len(labels)):
            groups.setdefault(find(i), []).append(i)
        for root, members in sorted(groups.items()):
            i0 = min(members)
            form_i0 = act(mats[i0], f0)
            if not _membership(lattice, N, form_i0):
                continue
            point = _point_of(lattice, N, form_i0)
            data = _orbit_stabilizer_data(lattice, N, form_i0)
            reps_out.append(
                OrbitRep(
                    point=point,
                    lattice=lattice,
                    N=N,
                    target=target,
                    class_form=f0,
                    coset=labels[i0],
                    **data,
                )
            )
    for rep in reps_out:
        assert rep.point.invariant() == target
    reps_out.sort(key=lambda r: (r.class_form, r.coset))
    return reps_out


def reduce_point(point, N: int | None = None):
    """Canonical representative of the level-N orbit through the point.

    Two points reduce to the identical representative exactly when they lie in
    the same orbit. For level-lattice points N is taken from the point.
    """
    canonical, _ = reduce_point_with_witness(point, N)
    return canonical


def orbit_rep_for_point(point, N: int | None = None) -> "OrbitRep":
    """OrbitRep whose frames sit at the given point itself.

    Unlike enumerate_orbits this does not move the point to the canonical
    orbit representative; the class_form/coset fields still identify the
    orbit, so two points yield equal keys exactly when they are equivalent.
    Useful for choice-independence checks of period integrals.
    """
    if isinstance(point, LatticePoint):
        lattice = LATTICE_LEVEL
        N = point.N
    else:
        lattice = LATTICE_HALF
        if N is None:
            raise ValueError("half-integral points need the level N")
    form = point.form()
    f_star, gamma = sl2_reduce(form)
    # the orbit's label is the minimum of the start label's closure under the
    # right action of the full stabilizer, matching enumerate_orbits
    labels = proj_line(N)
    label_index = {lab: i for i, lab in enumerate(labels)}
    mats = [coset_rep(N, lab) for lab in labels]
    seen = {label_index[coset_label(N, mat_inv(gamma))]}
    frontier = list(seen)
    gens = _stabilizer_gens_for_merge(f_star)
    while frontier:
        nxt = []
        for i in frontier:
            for s in gens:
                j = label_index[coset_label(N, mat_mul(mats[i], s))]
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    coset = labels[min(seen)]
    data = _orbit_stabilizer_data(lattice, N, form)
    return OrbitRep(
        point=point,
        lattice=lattice,
        N=N,
        target=point.invariant(),
        class_form=f_star,
        coset=coset,
        **data,
    )


def reduce_point_with_witness(point, N: int | None = None):
    """(canonical representative, eta) with act(eta, canonical) == point and
    eta in the level-N group."""
    if isinstance(point, LatticePoint):
        lattice = LATTICE_LEVEL
        N = point.N
    else:
        lattice = LATTICE_HALF
        if N is None:
            raise ValueError("half-integral reduction needs the level N")
    form = point.form()
    f_star, gamma = sl2_reduce(form)  # act(gamma, form) == f_star
    gamma_inv = mat_inv(gamma)  # point = act(gamma_inv, f_star)
    labels = proj_line(N)
    label_index = {lab: i for i, lab in enumerate(labels)}
    start = label_index[coset_label(N, gamma_inv)]
    stab_gens = _stabilizer_gens_for_merge(f_star)
    mats = [coset_rep(N, lab) for lab in labels]
    # BFS over the stabilizer's right action, tracking the stabilizer word
    best = start
    words = {start: ((1, 0), (0, 1))}
    frontier = [start]
    while frontier:
        new_frontier = []
        for i in frontier:
            for s in stab_gens:
                prod = mat_mul(mats[i], s)
                j = label_index[coset_label(N, prod)]
                if j not in words:
                    words[j] = mat_mul(words[i], s)
                    new_frontier.append(j)
                    if j < best:
                        best = j
        frontier = new_frontier
    canonical_form = act(mats[best], f_star)
    if not _membership(lattice, N, canonical_form):
        raise AssertionError("orbit canonicalization left the lattice")
    canonical = _point_of(lattice, N, canonical_form)
    # witness: point = act(gamma_inv, f_star); canonical = act(m_best, f_star)
    # with m_best ~ gamma_inv * sigma in the coset sense.
    sigma = words[best]
    eta = mat_mul(mat_mul(gamma_inv, sigma), mat_inv(mats[best]))
    assert eta[1][0] % N == 0
    assert act(eta, canonical_form) == form
    return canonical, eta


# ---------------------------------------------------------------------------
# hyperbolic helpers
# ---------------------------------------------------------------------------


def mobius(gamma, z: complex) -> complex:
    a, b = gamma[0]
    c, d = gamma[1]
    return (a * z + b) / (c * z + d)


def pullback_to_fundamental(N: int, z: complex, max_steps: int = 400):
    """(z', gamma) with gamma in the level-N group, z' = gamma z, and Im z'
    (locally) maximal; at N = 1 this is standard fundamental-domain reduction."""
    gamma = ((1, 0), (0, 1))
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("pullback needs an upper half-plane point")
    for _ in range(max_steps):
        k = round(z.real)
        if k != 0:
            t = ((1, -k), (0, 1))
            z = z - k
            gamma = mat_mul(t, gamma)
        best = None
        jmax = int(1.0 / (N * z.imag)) + 2
        for j in range(-jmax, jmax + 1):
            c = N * j
            if c == 0:
                continue
            d0 = math.floor(-c * z.real)
            # wide scan so a coprime d is never missed (Jacobsthal gaps)
            for d in range(d0 - 6, d0 + 8):
                if gcd(c, d) != 1:
                    continue
                norm = abs(c * z + d) ** 2
                if norm < 1.0 - 1e-14 and (best is None or norm < best[0]):
                    best = (norm, c, d)
        if best is None:
            return z, gamma
        _, c, d = best
        g, s, t = _xgcd(c, d)
        if g == -1:
            s, t = -s, -t
        mat = ((t, -s), (c, d))
        z = mobius(mat, z)
        gamma = mat_mul(mat, gamma)
    raise RuntimeError("pullback did not stabilize")


# ---------------------------------------------------------------------------
# CSV io for orbit tables
# ---------------------------------------------------------------------------


def orbit_rows(reps):
    rows = []
    for r in reps:
        p = r.point.form() if r.lattice == LATTICE_HALF else (
            r.point.v1,
            r.point.v2,
            r.point.v3,
        )
        rows.append(
            {
                "N": r.N,
                "lattice": r.lattice,
                "target": r.target,
                "v1": p[0],
                "v2": p[1],
                "v3": p[2],
                "signature": r.signature,
                "stabilizer": str(r.stabilizer),
                "epsilon": "" if r.epsilon is None else r.epsilon,
            }
        )
    return rows
