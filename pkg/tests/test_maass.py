import math
import os

import numpy as np
import pytest

from maasslift import maass
from maasslift.specfun import PrecisionError

SYNTH = """format=maass-v1
level=1
R=3.0
parity=even
char=1.0
nmax=6
1 1.0 0.0
2 0.25 0.0
3 -0.125 0.0
4 0.0625 0.0
5 0.5 0.0
6 -0.75 0.0
"""


@pytest.fixture(scope="module")
def form():
    return maass.load_fixture(maass.packaged_fixture_path())


@pytest.fixture()
def synth():
    return maass.parse_fixture(SYNTH)


def test_parse_serialize_roundtrip(synth):
    text = maass.serialize_fixture(synth)
    again = maass.parse_fixture(text)
    assert again.level == synth.level
    assert again.R == synth.R
    assert again.parity == synth.parity
    assert again.nmax == synth.nmax
    for n in range(1, 7):
        assert again.coefficient(n) == synth.coefficient(n)
    assert maass.serialize_fixture(again) == text


def test_missing_header_field():
    bad = SYNTH.replace("parity=even\n", "")
    with pytest.raises(maass.FixtureError, match="parity"):
        maass.parse_fixture(bad)


def test_coefficient_gap():
    bad = SYNTH.replace("5 0.5 0.0\n", "")
    with pytest.raises(maass.FixtureError, match="gap"):
        maass.parse_fixture(bad)


def test_unsupported_format_tag():
    bad = SYNTH.replace("maass-v1", "maass-v9")
    with pytest.raises(maass.FixtureError, match="format"):
        maass.parse_fixture(bad)


def test_growth_bound_enforced():
    bad = SYNTH.replace("2 0.25 0.0", "2 99.0 0.0")
    with pytest.raises(maass.FixtureError, match="growth"):
        maass.parse_fixture(bad)


def test_parity_violation_detected():
    bad = SYNTH + "-1 0.5 0.0\n"
    with pytest.raises(maass.FixtureError, match="parity"):
        maass.parse_fixture(bad)


def test_negative_coefficients_generated(synth):
    assert synth.coefficient(-3) == synth.coefficient(3)
    odd = maass.parse_fixture(SYNTH.replace("parity=even", "parity=odd"))
    assert odd.coefficient(-3) == -odd.coefficient(3)


def test_spectral_accessors(synth):
    assert synth.spectral_parameter == 0.5 + 3j
    assert synth.laplace_eigenvalue == 0.25 + 9.0


def test_packaged_fixture_contents(form):
    assert form.level == 1
    assert form.parity == "even"
    assert form.nmax >= 100
    assert abs(form.R - 13.7797513519) < 2e-9
    assert abs(form.coefficient(1) - 1.0) == 0.0
    assert abs(form.coefficient(2) - 1.5493044776) < 1e-8
    assert form.source_checksum
    # Hecke multiplicativity, honest quality gate for the shipped table
    a = form.coefficient
    assert abs(a(2) * a(3) - a(6)) < 2e-8
    assert abs(a(2) ** 2 - a(4) - 1) < 2e-8
    assert abs(a(3) ** 2 - a(9) - 1) < 2e-8
    assert abs(a(5) * a(7) - a(35)) < 2e-8


def test_eval_parity_symmetry(form):
    z = 0.23 + 1.1j
    a = maass.eval_phi(form, z)
    b = maass.eval_phi(form, complex(-z.real, z.imag))
    assert abs(a - b) <= 1e-10 * max(abs(a), 1e-300)


def test_eval_periodicity(form):
    z = 0.37 + 0.95j
    a = maass.eval_phi(form, z)
    b = maass.eval_phi(form, z + 1)
    assert abs(a - b) <= 1e-12 * abs(a)


def test_modular_invariance_residual(form):
    S = ((0, -1), (1, 0))
    r = maass.modularity_residual(form, 0.2 + 0.9j, S)
    assert r <= 1e-6
    T = ((1, 1), (0, 1))
    assert maass.modularity_residual(form, 0.2 + 0.9j, T) <= 1e-12


def test_truncation_errors(form):
    with pytest.raises(ValueError):
        maass.eval_phi(form, 0.2 + 0.9j, M=form.nmax + 1)
    with pytest.raises(ValueError):
        maass.eval_phi(form, 0.2 - 0.9j)
    with pytest.raises(PrecisionError):
        maass.eval_phi(form, 0.2 + 0.004j, tol=1e-10)


def test_truncation_monotonicity(form):
    z = 0.11 + 0.8j
    full = maass.eval_phi(form, z)
    # the analytic tail bound plus summation rounding noise
    noise = 1e-14 * maass.phi_scale(form, z.imag)
    for M in (20, 30, 40):
        part = maass.eval_phi(form, z, M=M)
        assert abs(full - part) <= maass.truncation_tail_bound(form.R, z.imag, M) + noise
    tight = maass.eval_phi(form, 0.11 + 0.05j, M=100)
    loose = maass.eval_phi(form, 0.11 + 0.05j, M=60)
    bound = maass.truncation_tail_bound(form.R, 0.05, 60)
    assert abs(tight - loose) <= bound + noise
    assert abs(tight - loose) > 1e-3 * bound  # bound is meaningfully tight here


def test_eval_linearity(synth):
    other_text = SYNTH.replace("1 1.0 0.0", "1 0.5 0.0").replace(
        "5 0.5 0.0", "5 -0.25 0.0")
    other = maass.parse_fixture(other_text)
    combo = {}
    for n in range(1, 7):
        combo[n] = synth.coefficient(n) + other.coefficient(n)
    summed = maass.MaassCuspForm(
        level=1, R=3.0, parity="even", character=synth.character,
        nmax=6, coefficients=combo)
    z = 0.4 + 0.7j
    lhs = maass.eval_phi(summed, z)
    rhs = maass.eval_phi(synth, z) + maass.eval_phi(other, z)
    assert abs(lhs - rhs) <= 1e-13 * max(abs(lhs), 1e-300)


def test_eigen_residual_fixture(form):
    r = maass.eigen_residual(form, 0.1 + 1.3j, h=2e-4)
    assert r <= 1e-4
    # order-2 convergence: doubling h roughly quadruples the residual
    r1 = maass.eigen_residual(form, 0.1 + 1.3j, h=1e-3)
    r2 = maass.eigen_residual(form, 0.1 + 1.3j, h=2e-3)
    assert r2 / r1 == pytest.approx(4.0, rel=0.5)


def test_eigen_residual_single_term():
    text = "format=maass-v1\nlevel=1\nR=3.0\nparity=even\nchar=1.0\nnmax=1\n1 1.0 0.0\n"
    f1 = maass.parse_fixture(text)
    assert maass.eigen_residual(f1, 0.3 + 0.8j, h=1e-4) <= 1e-6


def test_eigen_residual_ill_conditioned():
    text = "format=maass-v1\nlevel=1\nR=3.0\nparity=even\nchar=1.0\nnmax=1\n1 1.0 0.0\n"
    f1 = maass.parse_fixture(text)
    # cos(2 pi x) vanishes at x = 1/4, so the single-term form has a nodal line
    with pytest.raises(maass.IllConditionedError):
        maass.eigen_residual(f1, 0.25 + 0.8j, h=1e-4)


def test_eval_phi_pullback_invariance(form):
    z = 0.31 + 0.02j
    w = 3.31 + 0.02j  # T^3-translate, same orbit
    a = maass.eval_phi_pullback(form, z)
    b = maass.eval_phi_pullback(form, w)
    assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300)
    # at a point already inside the fundamental domain it matches eval_phi
    # to within the requested truncation budget (absolute)
    hi = 0.1 + 1.4j
    assert abs(maass.eval_phi_pullback(form, hi, tol=1e-16) -
               maass.eval_phi(form, hi)) <= 1e-16


def test_eval_phi_grid(form):
    zs = [0.1 + 1.0j, 0.2 + 1.1j]
    vals = maass.eval_phi_grid(form, zs)
    assert vals.shape == (2,)
    assert vals[0] == maass.eval_phi(form, zs[0])


def test_fetch_file_url_cache(tmp_path):
    src = tmp_path / "upstream"
    src.mkdir()
    (src / "form.txt").write_text(SYNTH)
    cache = tmp_path / "cache"
    desc = maass.FetchDescriptor(
        base_url=f"file://{src}", label="form.txt", cache_dir=str(cache))
    local = maass.fetch_fixture(desc)
    assert os.path.exists(local)
    form = maass.ingest_coefficients(desc)
    assert form.R == 3.0
    # second fetch reuses the cache and verifies bytes
    again = maass.fetch_fixture(desc)
    assert again == local
    # a tampered cache is reported, never overwritten
    with open(local, "a") as fh:
        fh.write("# tampered\n")
    tampered = open(local).read()
    with pytest.raises(maass.ChecksumMismatch):
        maass.fetch_fixture(desc)
    assert open(local).read() == tampered


def test_fetch_rejects_malformed_upstream(tmp_path):
    src = tmp_path / "upstream"
    src.mkdir()
    (src / "bad.txt").write_text("format=maass-v1\nlevel=1\n")
    cache = tmp_path / "cache"
    desc = maass.FetchDescriptor(
        base_url=f"file://{src}", label="bad.txt", cache_dir=str(cache))
    with pytest.raises(maass.FixtureError):
        maass.fetch_fixture(desc)
    assert not os.path.exists(cache / "bad.txt")


def test_fetch_connection_error(tmp_path):
    desc = maass.FetchDescriptor(
        base_url="file:///nonexistent-dir-xyz", label="nope.txt",
        cache_dir=str(tmp_path), retries=2, timeout=0.5)
    with pytest.raises(ConnectionError):
        maass.fetch_fixture(desc)


def test_ingest_text_and_path(tmp_path, synth):
    assert maass.ingest_coefficients(SYNTH).R == 3.0
    p = tmp_path / "f.txt"
    p.write_text(SYNTH)
    assert maass.ingest_coefficients(str(p)).R == 3.0
    with pytest.raises(TypeError):
        maass.ingest_coefficients(123)
