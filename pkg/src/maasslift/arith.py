"""Dirichlet characters, Kronecker symbols, Gauss sums, and small arithmetic
constants (eps_d, C_{l,r}, the star involution on characters, the lifted
character chi_N).

Character values are stored as exact root-of-unity exponents: a character mod q
keeps one integer exponent e(a) per residue a with chi(a) = exp(2*pi*i*e(a)/L),
where L is the exponent of the unit group (Z/q)^*. All character identities
used downstream (Gauss sum twists, the finite Fourier transform) can therefore
be checked with integer arithmetic and a single rounding at the very end.

Indexing convention (deterministic, documented): the unit group is decomposed
into cyclic components, one per prime power in q, primes in increasing order.
For p odd the component is generated by the fixed primitive root returned by
``sympy.primitive_root`` (lifted to p^k); for 2^k with k >= 3 the two
components are generated by -1 (order 2) and 5 (order 2^(k-2)), in that order;
2^2 contributes the single generator 3. A character is the tuple of exponents
(c_1, ..., c_t), one per generator of orders (m_1, ..., m_t), and its index is
the mixed-radix integer c_1 * (m_2 * ... * m_t) + c_2 * (m_3 * ... * m_t) +
... + c_t. Index 0 is the principal character. Characters are addressed as
"q.index" in CLI output.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm

import sympy

_MAX_MODULUS = 10**6


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), full extension to all integers."""
    a = int(a)
    n = int(n)
    if n == 0:
        return 1 if a in (1, -1) else 0
    t = 1
    if n < 0:
        n = -n
        if a < 0:
            t = -1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            t = -t
    # n odd positive: Jacobi loop with quadratic reciprocity
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def _unit_group_generators(q: int):
    """Cyclic decomposition of (Z/q)^*.

    Returns a list of (generator mod q, order), primes ascending, the 2-part
    first when present, as documented in the module docstring.
    """
    comps = []
    for p, k in sorted(sympy.factorint(q).items()):
        pk = p**k
        rest = q // pk
        # CRT lift: g mod pk, 1 mod rest
        def crt_lift(g):
            if rest == 1:
                return g % q
            inv = pow(pk, -1, rest)
            return (g + pk * ((1 - g) * inv % rest)) % q

        if p == 2:
            if k == 1:
                continue
            if k == 2:
                comps.append((crt_lift(3), 2))
            else:
                comps.append((crt_lift(pk - 1), 2))
                comps.append((crt_lift(5), 2 ** (k - 2)))
        else:
            g = sympy.primitive_root(p)
            if pow(g, p - 1, p * p) == 1:
                g += p
            comps.append((crt_lift(g % pk), pk - p ** (k - 1)))
    return comps


@lru_cache(maxsize=None)
def _group_data(q: int):
    """Precomputed discrete-log table for (Z/q)^*.

    Returns (gens, orders, L, dlog) where dlog[a] is the exponent tuple of the
    residue a (as a flat list indexed by a, None for non-units).
    """
    if q > _MAX_MODULUS:
        raise ValueError(f"modulus {q} too large for table construction")
    comps = _unit_group_generators(q)
    gens = tuple(g for g, _ in comps)
    orders = tuple(m for _, m in comps)
    L = 1
    for m in orders:
        L = lcm(L, m)
    # enumerate the group by multiplying out generator powers
    dlog = [None] * q
    units = [(1 % q, tuple([0] * len(gens)))]
    for i, (g, m) in enumerate(comps):
        new = []
        for a, e in units:
            x = a
            for j in range(m):
                ee = list(e)
                ee[i] = j
                new.append((x, tuple(ee)))
                x = (x * g) % q
        units = new
    for a, e in units:
        dlog[a] = e
    if q == 1:
        dlog[0] = tuple()
    return gens, orders, L, dlog


def euler_phi(q: int) -> int:
    gens, orders, _, _ = _group_data(q)
    n = 1
    for m in orders:
        n *= m
    return n


class DirichletCharacter:
    """Dirichlet character mod q, addressed by (modulus, index).

    Values are exact roots of unity exp(2*pi*i*e/L); ``exponent(n)`` exposes
    the integer e (or None off the units). ``parity`` is chi(-1) in {1, -1}.
    """

    __slots__ = ("modulus", "index", "_exps", "_orders", "_L", "_valexp", "_roots")

    def __init__(self, modulus: int, index: int = 0):
        modulus = int(modulus)
        index = int(index)
        if modulus < 1:
            raise ValueError("modulus must be a positive integer")
        gens, orders, L, dlog = _group_data(modulus)
        phi = 1
        for m in orders:
            phi *= m
        if not 0 <= index < phi:
            raise ValueError(f"character index {index} out of range for modulus {modulus}")
        # mixed-radix decode, c_1 most significant
        exps = []
        rem = index
        for i, m in enumerate(orders):
            radix = 1
            for mm in orders[i + 1:]:
                radix *= mm
            exps.append(rem // radix)
            rem %= radix
        self.modulus = modulus
        self.index = index
        self._exps = tuple(exps)
        self._orders = orders
        self._L = L
        # value exponent per residue, -1 marking non-units
        valexp = [-1] * modulus
        for a in range(modulus):
            e = dlog[a]
            if e is None:
                continue
            tot = 0
            for c, m, t in zip(exps, orders, e):
                tot += c * (L // m) * t
            valexp[a] = tot % L
        if modulus == 1:
            valexp[0] = 0
        self._valexp = valexp
        self._roots = [cmath.exp(2j * math.pi * k / L) for k in range(L)]

    # -- exact layer ----------------------------------------------------

    def exponent(self, n: int):
        """Exponent e with chi(n) = e(e/L), or None when gcd(n, q) > 1."""
        e = self._valexp[n % self.modulus]
        return None if e < 0 else e

    @property
    def order_lcm(self) -> int:
        """L, the denominator all value exponents refer to."""
        return self._L

    # -- numeric layer ---------------------------------------------------

    def __call__(self, n: int) -> complex:
        e = self._valexp[n % self.modulus]
        if e < 0:
            return 0j
        return self._roots[e]

    @property
    def parity(self) -> int:
        e = self._valexp[(-1) % self.modulus]
        return 1 if e == 0 else -1

    @property
    def is_even(self) -> bool:
        return self.parity == 1

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    @property
    def order(self) -> int:
        n = 1
        for c, m in zip(self._exps, self._orders):
            n = lcm(n, m // gcd(m, c))
        return n

    @property
    def conductor(self) -> int:
        q = self.modulus
        for f in sorted(sympy.divisors(q)):
            ok = True
            for a in range(1, q + 1):
                if a % f == 1 % f and gcd(a, q) == 1 and self._valexp[a % q] != 0:
                    ok = False
                    break
            if ok:
                return f
        return q

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def conjugate(self) -> "DirichletCharacter":
        exps = tuple((-c) % m for c, m in zip(self._exps, self._orders))
        return DirichletCharacter(self.modulus, _index_of(exps, self._orders))

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if self.modulus != other.modulus:
            raise ValueError("characters must share a modulus")
        exps = tuple((c + d) % m for c, d, m in zip(self._exps, other._exps, self._orders))
        return DirichletCharacter(self.modulus, _index_of(exps, self._orders))

    def __pow__(self, k: int) -> "DirichletCharacter":
        exps = tuple((c * k) % m for c, m in zip(self._exps, self._orders))
        return DirichletCharacter(self.modulus, _index_of(exps, self._orders))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and self.index == other.index
        )

    def __hash__(self):
        return hash((self.modulus, self.index))

    @property
    def label(self) -> str:
        return f"{self.modulus}.{self.index}"

    def __repr__(self):
        return f"DirichletCharacter({self.modulus}, {self.index})"


def _index_of(exps, orders) -> int:
    idx = 0
    for c, m in zip(exps, orders):
        idx = idx * m + c
    return idx


def character_from_label(label: str) -> DirichletCharacter:
    q, idx = label.split(".")
    return DirichletCharacter(int(q), int(idx))


def enumerate_characters(modulus: int):
    """All phi(modulus) characters mod modulus, in index order."""
    return [DirichletCharacter(modulus, i) for i in range(euler_phi(modulus))]


def legendre_character(r: int) -> DirichletCharacter:
    """The quadratic residue character mod an odd prime r."""
    if r < 3 or not sympy.isprime(r):
        raise ValueError("r must be an odd prime")
    gens, orders, L, _ = _group_data(r)
    assert len(orders) == 1
    return DirichletCharacter(r, _index_of(((r - 1) // 2,), orders))


def gauss_sum(chi: DirichletCharacter, n: int = 1) -> complex:
    """tau_chi(n) = sum over units m mod q of chi(m) e[m n / q].

    Accumulated exactly: every term is a root of unity of order lcm(L, q);
    integer exponent counts are summed before the single float evaluation.
    """
    q = chi.modulus
    L = chi.order_lcm
    Q = lcm(L, q)
    counts = [0] * Q
    for m in range(q):
        e = chi.exponent(m)
        if e is None:
            continue
        tot = (e * (Q // L) + (m * n % q) * (Q // q)) % Q
        counts[tot] += 1
    val = 0j
    for k, c in enumerate(counts):
        if c:
            val += c * cmath.exp(2j * math.pi * k / Q)
    return val


def eps_d(d: int) -> complex:
    """1 or i according to the residue of the odd integer d mod 4."""
    if d % 2 == 0:
        raise ValueError("eps_d is defined for odd d only")
    return 1 + 0j if d % 4 == 1 else 1j


def eps_and_c(d: int, ell: int, r: int):
    """(eps_d, C_{ell,r}); C is 1 for even ell and eps_r^ell for odd ell."""
    e = eps_d(d)
    if ell % 2 == 0:
        c = 1 + 0j
    else:
        c = eps_d(r) ** (ell % 4)
    return e, c


def psi_star(psi: DirichletCharacter, ell: int = 1) -> DirichletCharacter:
    """conj(psi) twisted by the quadratic character mod r when ell is odd."""
    r = psi.modulus
    out = psi.conjugate()
    if ell % 2 == 1:
        out = out * legendre_character(r)
    return out


class LiftedCharacter:
    """chi_N: d -> chi(d) * (N/d), the multiplier character of the lift.

    ``ell`` generalizes to d -> conj(chi)(d) * (N/d)^ell used for the partner
    form; ell=0 with conjugate=False gives back plain chi.
    """

    def __init__(self, chi: DirichletCharacter, N: int, ell: int = 1, conjugate: bool = False):
        self.chi = chi.conjugate() if conjugate else chi
        self.N = int(N)
        self.ell = int(ell)
        self.conjugated = conjugate

    def __call__(self, d: int) -> complex:
        v = self.chi(d)
        if self.ell % 2 == 1:
            v *= kronecker(self.N, d)
        return v

    @property
    def label(self) -> str:
        tag = "bar" if self.conjugated else ""
        return f"{self.chi.label}{tag}*kron({self.N})^{self.ell % 2}"


def lift_character(chi: DirichletCharacter, N: int) -> LiftedCharacter:
    """The character chi_N(d) = chi(d) (N/d) carried by the lifted form."""
    return LiftedCharacter(chi, N, ell=1, conjugate=False)


def dual_character(chi: DirichletCharacter, N: int, ell: int = 1) -> LiftedCharacter:
    """d -> conj(chi)(d) * (N/d)^ell, the partner-side character."""
    return LiftedCharacter(chi, N, ell=ell, conjugate=True)


@dataclass(frozen=True)
class TwistPrime:
    """An odd prime r coprime to the level, the twisting modulus."""

    r: int
    N: int

    def __post_init__(self):
        if self.r % 2 == 0 or not sympy.isprime(self.r):
            raise ValueError("twist modulus must be an odd prime")
        if gcd(self.r, self.N) != 1:
            raise ValueError("twist prime must not divide the level")


def twist_primes(N: int, count: int | None = None):
    """Increasing stream of odd primes not dividing 2N."""
    emitted = 0
    r = 3
    while count is None or emitted < count:
        if sympy.isprime(r) and (2 * N) % r != 0:
            yield TwistPrime(r, N)
            emitted += 1
        r += 2


def character_table_rows(modulus: int):
    """CSV-ready rows (modulus, index, order, parity, primitive, n, re, im)."""
    rows = []
    for chi in enumerate_characters(modulus):
        for n in range(modulus):
            v = chi(n)
            rows.append(
                {
                    "modulus": modulus,
                    "index": chi.index,
                    "order": chi.order,
                    "parity": chi.parity,
                    "primitive": int(chi.is_primitive),
                    "n": n,
                    "value_re": v.real,
                    "value_im": v.imag,
                }
            )
    return rows
