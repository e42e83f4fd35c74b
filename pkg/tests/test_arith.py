import cmath
import math
import random

import pytest

from maasslift import arith


def test_kronecker_small_table():
    # hand-checked values
    assert arith.kronecker(2, 5) == -1
    assert arith.kronecker(4, 3) == 1
    assert arith.kronecker(-1, 5) == 1
    assert arith.kronecker(-1, 3) == -1
    assert arith.kronecker(2, 7) == 1
    assert arith.kronecker(3, 1) == 1
    assert arith.kronecker(0, 1) == 1
    assert arith.kronecker(0, 4) == 0
    assert arith.kronecker(1, 0) == 1
    assert arith.kronecker(2, 0) == 0


def test_kronecker_vs_gmpy2_exhaustive():
    gmpy2 = pytest.importorskip("gmpy2")
    for a in range(-60, 61):
        for n in range(-60, 61):
            assert arith.kronecker(a, n) == gmpy2.kronecker(a, n), (a, n)


def test_kronecker_multiplicativity():
    rng = random.Random(11)
    for _ in range(300):
        a = rng.randrange(-200, 200)
        b = rng.randrange(-200, 200)
        n = rng.randrange(1, 200)
        assert arith.kronecker(a * b, n) == arith.kronecker(a, n) * arith.kronecker(b, n)


def test_character_group_structure():
    for q in (1, 2, 3, 4, 5, 8, 12, 15, 16, 24, 35):
        chars = list(arith.enumerate_characters(q))
        assert len(chars) == arith.euler_phi(q)
        # homomorphism property on units
        rng = random.Random(q)
        for chi in chars:
            for _ in range(20):
                a = rng.randrange(1, max(q, 2))
                b = rng.randrange(1, max(q, 2))
                if math.gcd(a, q) != 1 or math.gcd(b, q) != 1:
                    assert chi(a * b) == 0 or chi(a) == 0 or chi(b) == 0
                    continue
                assert abs(chi(a * b) - chi(a) * chi(b)) < 1e-12


def test_character_orthogonality():
    q = 12
    for chi in arith.enumerate_characters(q):
        s = sum(chi(a) for a in range(q))
        if chi.is_principal:
            assert abs(s - arith.euler_phi(q)) < 1e-10
        else:
            assert abs(s) < 1e-10


def test_principal_and_conjugate():
    chi = arith.legendre_character(7)
    assert not chi.is_principal
    assert chi.conjugate() == chi  # real character
    psi = arith.character_from_label("5.1")
    prod = psi * psi.conjugate()
    assert prod.is_principal


def test_parity_and_values_at_minus_one():
    chi5 = arith.legendre_character(5)
    assert chi5.is_even
    chi3 = arith.legendre_character(3)
    assert not chi3.is_even
    assert abs(chi3(-1) + 1) < 1e-14


def test_conductor_primitive():
    # principal character mod 12 has conductor 1
    chi0 = arith.character_from_label("12.0")
    assert chi0.conductor == 1
    assert not chi0.is_primitive
    for p in (3, 5, 7, 11, 13):
        assert arith.legendre_character(p).conductor == p
        assert arith.legendre_character(p).is_primitive


def test_gauss_sum_frozen_values():
    # modulus 1: empty product convention
    one = arith.character_from_label("1.0")
    assert abs(arith.gauss_sum(one) - 1.0) < 1e-14
    # Legendre mod 5 (even): sum = sqrt(5)
    g5 = arith.gauss_sum(arith.legendre_character(5))
    assert abs(g5 - math.sqrt(5)) < 1e-12
    # Legendre mod 3 (odd): sum = i sqrt(3)
    g3 = arith.gauss_sum(arith.legendre_character(3))
    assert abs(g3 - 1j * math.sqrt(3)) < 1e-12
    # principal character mod 4: ramified, sum vanishes
    g4 = arith.gauss_sum(arith.character_from_label("4.0"))
    assert abs(g4) < 1e-12


def test_gauss_sum_primitive_identities():
    rng = random.Random(23)
    for q in (3, 4, 5, 7, 8, 11, 12, 13, 15):
        for chi in arith.enumerate_characters(q):
            if not chi.is_primitive:
                continue
            g1 = arith.gauss_sum(chi)
            assert abs(abs(g1) - math.sqrt(q)) < 1e-11, (q, chi.label)
            for _ in range(5):
                n = rng.randrange(1, 4 * q)
                gn = arith.gauss_sum(chi, n)
                expect = chi.conjugate()(n) * g1
                assert abs(gn - expect) < 1e-10, (q, chi.label, n)


def test_gauss_sum_twisted_scaling_any_character():
    # tau(chi, k n) = conj(chi)(k) tau(chi, n) for gcd(k, q) = 1, chi arbitrary
    rng = random.Random(5)
    for q in (6, 9, 12, 18):
        for chi in arith.enumerate_characters(q):
            for _ in range(6):
                k = rng.randrange(1, q)
                if math.gcd(k, q) != 1:
                    continue
                n = rng.randrange(1, 3 * q)
                lhs = arith.gauss_sum(chi, k * n)
                rhs = chi.conjugate()(k) * arith.gauss_sum(chi, n)
                assert abs(lhs - rhs) < 1e-10


def test_eps_d_and_c_constant():
    assert arith.eps_d(1) == 1
    assert arith.eps_d(5) == 1
    assert arith.eps_d(3) == 1j
    assert arith.eps_d(7) == 1j
    with pytest.raises(ValueError):
        arith.eps_d(2)
    # even ell: second slot constant 1 regardless of r
    assert arith.eps_and_c(3, 2, 5) == (1j, 1)
    # odd ell: eps_r^{ell mod 4}
    assert arith.eps_and_c(3, 1, 3) == (1j, 1j)
    assert arith.eps_and_c(5, 3, 3) == (1, 1j ** 3)


def test_psi_star_is_conjugate_times_quadratic():
    psi = arith.character_from_label("7.1")
    star = arith.psi_star(psi, 1)
    for n in range(1, 14):
        expect = psi.conjugate()(n) * arith.kronecker(n, 7)
        got = star(n)
        assert abs(got - expect) < 1e-12
    even = arith.psi_star(psi, 2)
    for n in range(1, 14):
        assert abs(even(n) - psi.conjugate()(n)) < 1e-12


def test_legendre_character_matches_kronecker():
    for r in (3, 5, 7, 11, 13, 17):
        chi = arith.legendre_character(r)
        for a in range(1, r):
            assert abs(chi(a) - arith.kronecker(a, r)) < 1e-14


def test_lifted_character_quadratic_twist():
    # lift of chi mod N to modulus 4N multiplies by the level's Kronecker tag
    N = 3
    chi = arith.legendre_character(3)
    lifted = arith.lift_character(chi, N)
    for d in range(1, 12 * N):
        if math.gcd(d, 4 * N) != 1:
            continue
        expect = chi(d) * arith.kronecker(N, d)
        assert abs(lifted(d) - expect) < 1e-12


def test_dual_character_conjugates():
    N = 5
    chi = arith.legendre_character(5)
    mu_side = arith.lift_character(chi, N)
    dual = arith.dual_character(chi, N, 1)
    for d in range(1, 20 * N):
        if math.gcd(d, 4 * N) != 1:
            continue
        assert abs(dual(d) - mu_side(d).conjugate()) < 1e-12


def test_twist_primes_skip_level():
    got = [p.r for p in arith.twist_primes(6, 4)]
    assert got == [5, 7, 11, 13]
    with pytest.raises(ValueError):
        arith.TwistPrime(9, 2)
    with pytest.raises(ValueError):
        arith.TwistPrime(3, 6)


def test_character_determinism_and_labels():
    labels = [chi.label for chi in arith.enumerate_characters(8)]
    assert labels == ["8.0", "8.1", "8.2", "8.3"]
    again = [chi.label for chi in arith.enumerate_characters(8)]
    assert labels == again
    chi = arith.character_from_label("8.3")
    assert chi.label == "8.3"


def test_character_pow_and_order():
    chi = arith.character_from_label("5.1")  # a generator of the mod-5 group
    assert chi.order == 4
    assert (chi ** 4).is_principal
    sq = chi ** 2
    assert sq == arith.legendre_character(5)


def test_gauss_sum_rejects_huge_modulus():
    with pytest.raises(ValueError):
        arith.DirichletCharacter(10 ** 7, 0)
