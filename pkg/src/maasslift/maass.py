"""Weight-0 Maass cusp forms: fixture ingestion, evaluation, eigen checks.

A form is carried around as a frozen coefficient table (a "fixture") plus the
spectral data needed to evaluate the Fourier expansion

    Phi(x + iy) = sum_{n != 0} a(n) sqrt(y) K_{iR}(2 pi |n| y) e(n x).

Nothing here computes new forms; tables come from local files or a fetch
descriptor pointing at a mirror of published data.
"""

from __future__ import annotations

import hashlib
import math
import os
import tempfile
import time
import urllib.request
from dataclasses import dataclass, field

import numpy as np

from .arith import DirichletCharacter, character_from_label
from .quadforms import pullback_to_fundamental
from .specfun import PrecisionError, kbessel_imag

FIXTURE_FORMAT = "maass-v1"

GROWTH_CONSTANT = 10.0  # loose Ramanujan-flavored cap |a(n)| <= 10 sqrt(n)


class FixtureError(ValueError):
    """Malformed or inconsistent coefficient table."""


class ChecksumMismatch(FixtureError):
    """A cached fixture disagrees with the upstream bytes."""


class IllConditionedError(ArithmeticError):
    """The evaluation point gives |Phi| too small to normalize against."""


@dataclass(frozen=True)
class MaassCuspForm:
    level: int
    R: float
    parity: str  # "even" or "odd"
    character: DirichletCharacter
    nmax: int
    coefficients: dict = field(repr=False)
    normalization: str = "a1"
    source_checksum: str = ""

    def __post_init__(self):
        if self.level < 1:
            raise FixtureError("level must be positive")
        if self.parity not in ("even", "odd"):
            raise FixtureError(f"parity must be even or odd, got {self.parity!r}")
        if self.nmax < 1:
            raise FixtureError("nmax must be >= 1")
        coeffs = dict(self.coefficients)
        sgn = 1.0 if self.parity == "even" else -1.0
        for n in range(1, self.nmax + 1):
            if n not in coeffs:
                raise FixtureError(f"coefficient gap: a({n}) missing below nmax={self.nmax}")
            if -n in coeffs:
                if abs(coeffs[-n] - sgn * coeffs[n]) > 1e-9 * max(1.0, abs(coeffs[n])):
                    raise FixtureError(f"parity violation at n={n}")
            else:
                coeffs[-n] = sgn * coeffs[n]
            if abs(coeffs[n]) > GROWTH_CONSTANT * math.sqrt(n):
                raise FixtureError(f"coefficient growth bound violated at n={n}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def spectral_parameter(self) -> complex:
        """lambda = 1/2 + iR."""
        return 0.5 + 1j * self.R

    @property
    def laplace_eigenvalue(self) -> float:
        """lambda(1 - lambda) = 1/4 + R^2."""
        return 0.25 + self.R * self.R

    def coefficient(self, n: int) -> complex:
        if n == 0 or abs(n) > self.nmax:
            raise KeyError(n)
        return self.coefficients[n]

    def coefficient_array(self, m: int) -> np.ndarray:
        """a(1..m) as a complex vector."""
        if m > self.nmax:
            raise ValueError(f"m={m} exceeds nmax={self.nmax}")
        return np.array([self.coefficients[n] for n in range(1, m + 1)], dtype=complex)


# ---------------------------------------------------------------------------
# fixture text format
# ---------------------------------------------------------------------------


def parse_fixture(text: str) -> MaassCuspForm:
    header = {}
    coeffs = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line and not line[0].isdigit() and not line[0] == "-":
            key, _, val = line.partition("=")
            header[key.strip()] = val.strip()
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FixtureError(f"bad coefficient line: {raw!r}")
        n = int(parts[0])
        coeffs[n] = complex(float(parts[1]), float(parts[2]))
    for key in ("format", "level", "R", "parity", "char", "nmax"):
        if key not in header:
            raise FixtureError(f"missing header field {key!r}")
    if header["format"] != FIXTURE_FORMAT:
        raise FixtureError(f"unsupported format {header['format']!r}")
    checksum = hashlib.sha256(text.encode()).hexdigest()
    return MaassCuspForm(
        level=int(header["level"]),
        R=float(header["R"]),
        parity=header["parity"],
        character=character_from_label(header["char"]),
        nmax=int(header["nmax"]),
        coefficients=coeffs,
        normalization=header.get("normalization", "a1"),
        source_checksum=checksum,
    )


def serialize_fixture(form: MaassCuspForm) -> str:
    lines = [
        f"format={FIXTURE_FORMAT}",
        f"level={form.level}",
        f"R={form.R!r}",
        f"parity={form.parity}",
        f"char={form.character.label}",
        f"nmax={form.nmax}",
        f"normalization={form.normalization}",
    ]
    for n in range(1, form.nmax + 1):
        a = form.coefficients[n]
        lines.append(f"{n} {a.real!r} {a.imag!r}")
    return "\n".join(lines) + "\n"


def load_fixture(path: str) -> MaassCuspForm:
    with open(path, "r") as fh:
        return parse_fixture(fh.read())


def packaged_fixture_path(name: str = "maass_level1_R13.7797513519.txt") -> str:
    from importlib.resources import files

    return str(files("maasslift.data").joinpath(name))


# ---------------------------------------------------------------------------
# remote fetch with local cache
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FetchDescriptor:
    base_url: str
    label: str
    cache_dir: str
    timeout: float = 10.0
    retries: int = 3

    @property
    def url(self) -> str:
        return self.base_url.rstrip("/") + "/" + self.label


def _fetch_bytes(desc: FetchDescriptor) -> bytes:
    delay = 0.2
    last = None
    for _ in range(max(1, desc.retries)):
        try:
            with urllib.request.urlopen(desc.url, timeout=desc.timeout) as resp:
                return resp.read()
        except Exception as exc:  # noqa: BLE001 - urllib raises a zoo of types
            last = exc
            time.sleep(delay)
            delay *= 2
    raise ConnectionError(f"could not fetch {desc.url}: {last}")


def fetch_fixture(desc: FetchDescriptor) -> str:
    """Download (or reuse) a fixture, returning the local path.

    Existing cache files are never rewritten; a divergent upstream raises
    ChecksumMismatch so a human can sort out which copy is right.
    """
    os.makedirs(desc.cache_dir, exist_ok=True)
    local = os.path.join(desc.cache_dir, desc.label)
    data = _fetch_bytes(desc)
    if os.path.exists(local):
        with open(local, "rb") as fh:
            have = fh.read()
        if hashlib.sha256(have).hexdigest() != hashlib.sha256(data).hexdigest():
            raise ChecksumMismatch(f"cached {local} differs from upstream {desc.url}")
        return local
    parse_fixture(data.decode())  # validate before committing to the cache
    fd, tmp = tempfile.mkstemp(dir=desc.cache_dir, suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, local)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return local


def ingest_coefficients(source) -> MaassCuspForm:
    """Accepts a path, fixture text, or FetchDescriptor."""
    if isinstance(source, FetchDescriptor):
        return load_fixture(fetch_fixture(source))
    if isinstance(source, str) and "\n" in source:
        return parse_fixture(source)
    if isinstance(source, str):
        return load_fixture(source)
    raise TypeError(f"cannot ingest {type(source).__name__}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def truncation_tail_bound(R: float, y: float, M: int) -> float:
    """Upper estimate for the absolute tail of the expansion past |n| = M.

    Uses |a(n)| <= 10 sqrt(n) and the turning-point-aware envelope
    |K_{iR}(x)| <= 2.5 e^{-pi R/2} sqrt(2 pi / max(R,1)) e^{-eta(x)} with
    eta = sqrt(x^2-R^2) - R arccos(R/x) past x = R (zero before), summed
    term by term.  Infinite when the first tail term is still oscillatory,
    which is the desired "raise M or move up" signal.
    """
    two_pi_y = 2 * math.pi * y
    if two_pi_y * (M + 1) <= R:
        return math.inf
    amp = 25.0 * math.sqrt(2 * math.pi / max(R, 1.0)) * math.sqrt(y) * math.exp(
        -math.pi * R / 2)
    total = 0.0
    for k in range(1, 200001):
        n = M + k
        x = two_pi_y * n
        eta = math.sqrt(x * x - R * R) - R * math.acos(R / x) if x > R else 0.0
        term = math.sqrt(n) * (math.exp(-eta) if eta < 745 else 0.0)
        total += term
        if eta > 40 and term <= 1e-18 * total:
            return amp * total
    return math.inf


def eval_phi(form: MaassCuspForm, z: complex, M: int | None = None,
             tol: float | None = None) -> complex:
    """Truncated Fourier expansion at a single point. Vectorized over n."""
    if M is None:
        M = form.nmax
    if M > form.nmax:
        raise ValueError(f"truncation M={M} exceeds table nmax={form.nmax}")
    x, y = z.real, z.imag
    if y <= 0:
        raise ValueError("point must be in the upper half-plane")
    if tol is not None and truncation_tail_bound(form.R, y, M) > tol:
        raise PrecisionError(
            f"truncation tail at y={y:.4g}, M={M} exceeds requested {tol:g}")
    ns = np.arange(1, M + 1)
    kt = kbessel_imag(form.R, 2 * math.pi * ns * y, scaled=True)
    damp = math.exp(-math.pi * form.R / 2)
    pos = np.array([form.coefficients[n] for n in ns], dtype=complex)
    neg = np.array([form.coefficients[-n] for n in ns], dtype=complex)
    phase = np.exp(2j * math.pi * ns * x)
    total = np.sum(kt * (pos * phase + neg / phase))
    return complex(math.sqrt(y) * damp * total)


_min_m_cache: dict = {}


def auto_truncation(form: MaassCuspForm, y: float, tol: float) -> int:
    """Smallest usable M with tail bound below tol at height y (bucketed)."""
    # bucket y downward so the cached answer is always safe to reuse
    yb = max(1, math.floor(y * 16)) / 16.0 if y >= 1 / 16 else y
    key = (round(form.R, 9), yb, tol)
    got = _min_m_cache.get(key)
    if got is not None:
        return got
    lo, hi = 1, form.nmax
    if truncation_tail_bound(form.R, yb, hi) > tol:
        raise PrecisionError(
            f"table nmax={form.nmax} cannot reach {tol:g} at height {y:.4g}")
    while lo < hi:
        mid = (lo + hi) // 2
        if truncation_tail_bound(form.R, yb, mid) <= tol:
            hi = mid
        else:
            lo = mid + 1
    _min_m_cache[key] = lo
    return lo


def eval_phi_pullback(form: MaassCuspForm, z: complex, tol: float = 1e-12) -> complex:
    """Evaluate anywhere by first moving z into the level-N fundamental domain.

    Unwinds the automorphy factor: Phi(gamma z) = chi(d_gamma) Phi(z), so the
    pulled-back value is multiplied by the conjugate character value.
    """
    w, gamma = pullback_to_fundamental(form.level, z)
    d = gamma[1][1]
    twist = complex(form.character(d)).conjugate()
    m = auto_truncation(form, w.imag, tol)
    return twist * eval_phi(form, w, m)


def eval_phi_grid(form: MaassCuspForm, zs, M: int | None = None) -> np.ndarray:
    return np.array([eval_phi(form, complex(z), M) for z in np.asarray(zs).ravel()])


def phi_scale(form: MaassCuspForm, y: float) -> float:
    """Magnitude of a typical single term of the expansion at height y.

    K_{iR} carries e^{-pi R/2}, so raw values of an a(1)-normalized form are
    exponentially small in R; conditioning thresholds must be measured
    against this scale rather than against 1.
    """
    head = max(abs(form.coefficients[n]) for n in range(1, min(8, form.nmax) + 1))
    return (math.sqrt(y) * math.exp(-math.pi * form.R / 2)
            * math.sqrt(2 * math.pi / max(form.R, 1.0)) * max(head, 1e-30))


def eigen_residual(form: MaassCuspForm, z: complex, h: float = 1e-3) -> float:
    """Relative residual of the Laplace eigen-equation via a 5-point cross.

    Delta_0 = -y^2 (d_xx + d_yy); the discretization error is O(h^2).
    """
    x, y = z.real, z.imag
    if y - h <= 0:
        raise ValueError("step too large for the evaluation height")
    c = eval_phi(form, z)
    if abs(c) < 1e-8 * phi_scale(form, y):
        raise IllConditionedError(f"|Phi({z})| = {abs(c):.3e} too small")
    fxp = eval_phi(form, complex(x + h, y))
    fxm = eval_phi(form, complex(x - h, y))
    fyp = eval_phi(form, complex(x, y + h))
    fym = eval_phi(form, complex(x, y - h))
    lap = (fxp + fxm + fyp + fym - 4 * c) / (h * h)
    delta0 = -(y * y) * lap
    return abs(delta0 - form.laplace_eigenvalue * c) / abs(c)


def modularity_residual(form: MaassCuspForm, z: complex, gamma) -> float:
    """|Phi(gamma z) - chi(d) Phi(z)| relative to the form's scale at height y.

    Both sides go through the raw truncated series, so the residual actually
    measures the quality of the coefficient table (a pullback on both sides
    would compare the series against itself).
    """
    from .quadforms import mobius

    w = mobius(gamma, z)
    lhs = eval_phi(form, w)
    rhs = complex(form.character(gamma[1][1])) * eval_phi(form, z)
    return abs(lhs - rhs) / max(abs(rhs), phi_scale(form, z.imag))
