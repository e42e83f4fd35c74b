"""Special functions: modified Bessel K with complex order, Whittaker W, the
complex Gamma wrapper, and the composed Whittaker profiles used by the
half-integral weight expansions.

Supported boxes (calls outside raise UnsupportedDomainError):

  kbessel(nu, y):     y > 0, and either Im(nu) == 0 (any real order, scipy),
                      or |Im nu| <= 100. Relative accuracy ~1e-12 for
                      y >= 1e-3; purely imaginary order is evaluated by a
                      dedicated hybrid (see below) whose error is relative to
                      the envelope sqrt(2 pi / R) e^(-pi R / 2) in the
                      oscillatory range y < R.
  whittaker_w(k,n,x): x > 0, |kappa| <= 2, |Im nu| <= 100 (mpmath backed,
                      ~1e-10 relative).

Purely imaginary order K_{iR} is the workhorse (every cusp form evaluation
hits it), so it gets a per-R compiled model: an ascending series for
x <= 4 sqrt(R), trapezoidal cosh-integral anchors for large x, and an inward
Taylor march of the defining ODE bridging the gap. The march direction is
chosen inward because the contaminating solution (the exponentially growing
I-type one) decays in that direction, so the recurrence is self-correcting.
A direct cosh-integral quadrature would lose a factor e^(pi R / 2) to
cancellation in the oscillatory range, which float64 cannot absorb at
R ~ 14; the scaled formulation dodges that entirely.

All scaled internals work with Kt(x) = e^(pi R / 2) K_{iR}(x), which is
order-one near x ~ R and avoids harmless-but-annoying underflow.
"""

from __future__ import annotations

import math
import threading

import mpmath
import numpy as np
import scipy.special as sps


class UnsupportedDomainError(ValueError):
    """Argument outside the documented support box of a special function."""


class PrecisionError(RuntimeError):
    """The requested accuracy cannot be certified at these arguments."""


_EULER_E = math.e

# ---------------------------------------------------------------------------
# K_{iR}: scaled hybrid
# ---------------------------------------------------------------------------


def _series_zone_edge(R: float) -> float:
    # terms of the ascending series peak near exp(x^2/(4R)); cap the loss at
    # about e^4 ~ 1.5 digits
    return max(2.0, 4.0 * math.sqrt(max(R, 1e-9)))


def _anchor_edge(R: float) -> float:
    # trapezoid cancellation costs e^(R^2/(2x)); keep it below ~e^7
    return max(R * R / 13.0, R + 6.0, 8.0)


def _kt_series(R: float, xs: np.ndarray, kmax: int = 120) -> np.ndarray:
    """Scaled K via the ascending series, valid for xs <= ~4 sqrt(R)."""
    xs = np.asarray(xs, dtype=float)
    theta = R * np.log(xs / 2.0) - sps.loggamma(1.0 + 1j * R).imag
    amp = math.sqrt(2.0 * math.pi / (R * (1.0 - math.exp(-2.0 * math.pi * R))))
    q = (xs / 2.0) ** 2
    term = np.ones(len(xs), dtype=complex)
    acc = np.ones(len(xs), dtype=complex)
    for k in range(1, kmax + 1):
        term = term * q / (k * (k + 1j * R))
        acc += term
        if np.max(np.abs(term)) < 1e-19 * np.max(np.abs(acc)):
            break
    else:
        raise PrecisionError("ascending series for K_{iR} did not settle")
    return -amp * np.imag(np.exp(1j * theta) * acc)


def _kt_anchor(R: float, x: float) -> tuple[float, float]:
    """(Kt(x), Kt'(x)) from the cosh-integral, valid for x >= anchor edge.

    Integrand e^{-x(cosh t - 1)} cos(R t); the value picks up a factor
    e^{pi R/2 - x} which stays in float range for every x the model visits.
    """
    T = math.acosh(1.0 + 46.0 / x)
    h = 2.0 * math.pi / (math.sqrt(R * R + 90.0 * x) + 6.0)
    prev_v = prev_d = None
    for _ in range(14):
        n = int(math.ceil(T / h))
        t = np.linspace(0.0, n * h, n + 1)
        w = np.exp(-x * (np.cosh(t) - 1.0)) * np.cos(R * t)
        v = h * (np.sum(w) - 0.5 * (w[0] + w[-1]))
        wd = np.exp(-x * (np.cosh(t) - 1.0)) * np.cosh(t) * np.cos(R * t)
        d = h * (np.sum(wd) - 0.5 * (wd[0] + wd[-1]))
        if prev_v is not None:
            noise = 32.0 * np.finfo(float).eps * h * float(np.sum(np.abs(w)))
            if abs(v - prev_v) <= max(1e-15 * abs(v), noise) and abs(
                d - prev_d
            ) <= max(1e-15 * abs(d), 2.0 * noise):
                scale = math.exp(math.pi * R / 2.0 - x)
                return scale * v, -scale * d
        prev_v, prev_d = v, d
        h *= 0.5
    raise PrecisionError(f"cosh-integral anchor failed to converge at x={x}, R={R}")


def _taylor_step(R: float, x0: float, u0: float, du0: float, h: float, order: int):
    """Taylor coefficients of the K ODE solution about x0 and values at x0+h.

    x^2 u'' + x u' + (R^2 - x^2) u = 0, coefficients via the 4-term recurrence
    obtained by expanding about x0.
    """
    a = np.zeros(order + 1)
    a[0] = u0
    a[1] = du0
    x2 = x0 * x0
    for j in range(order - 1):
        s = x0 * (j + 1) * (2 * j + 1) * a[j + 1] + (j * j + R * R - x2) * a[j]
        if j >= 1:
            s -= 2.0 * x0 * a[j - 1]
        if j >= 2:
            s -= a[j - 2]
        a[j + 2] = -s / (x2 * (j + 2) * (j + 1))
    u = 0.0
    du = 0.0
    for c in a[::-1]:
        u = u * h + c
    for j in range(order, 0, -1):
        du = du * h + j * a[j]
    return a, u, du


class _ImagOrderModel:
    """Per-R evaluator for Kt(x) = e^(pi R/2) K_{iR}(x), R > 6."""

    ORDER = 26

    def __init__(self, R: float, x_hi_req: float = 60.0):
        self.R = R
        self.x_lo = _series_zone_edge(R)
        self.x_hi = max(_anchor_edge(R), x_hi_req, self.x_lo + 1.0)
        self._build()

    def _build(self):
        R = self.R
        x = self.x_hi
        u, du = _kt_anchor(R, x)
        panels = []  # (x0, h (<0), coeffs)
        while x > self.x_lo:
            h = -min(0.35 * x * min(1.0, self.ORDER / (_EULER_E * R)), x - self.x_lo, 6.0)
            for _ in range(8):
                a, u1, du1 = _taylor_step(R, x, u, du, h, self.ORDER)
                tail = (abs(a[-1] * h ** self.ORDER) + abs(a[-2] * h ** (self.ORDER - 1)))
                if tail <= 1e-17 * max(abs(u), abs(u1)) + 1e-300:
                    break
                h *= 0.5
            else:
                raise PrecisionError(f"Taylor march step would not settle at x={x}")
            panels.append((x, h, a))
            x = x + h
            u, du = u1, du1
        self.panels = panels
        self.panel_lo = np.array([x0 + h for x0, h, _ in panels])
        # handoff consistency: the march must meet the series
        series_val = float(_kt_series(self.R, np.array([x]))[0])
        envelope = math.sqrt(2.0 * math.pi / self.R)
        if abs(series_val - u) > 5e-12 * max(envelope, abs(u)):
            raise PrecisionError(
                f"series/march handoff mismatch at R={self.R}: {series_val} vs {u}"
            )

    def eval(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.empty(len(xs))
        lo = xs <= self.x_lo
        hi = xs > self.x_hi
        mid = ~(lo | hi)
        if lo.any():
            out[lo] = _kt_series(self.R, xs[lo])
        if hi.any():
            out[hi] = [_kt_anchor(self.R, float(x))[0] for x in xs[hi]]
        if mid.any():
            xm = xs[mid]
            vals = np.empty(len(xm))
            for i, x in enumerate(xm):
                j = int(np.searchsorted(-self.panel_lo, -x))
                j = min(j, len(self.panels) - 1)
                x0, h, a = self.panels[j]
                dx = x - x0
                v = 0.0
                for c in a[::-1]:
                    v = v * dx + c
                vals[i] = v
            out[mid] = vals
        return out


_model_lock = threading.Lock()
_models: dict[tuple[float, float], _ImagOrderModel] = {}


def _imag_model(R: float, x_hi: float) -> _ImagOrderModel:
    # the march anchor must stay clear of e^{pi R/2 - x} underflow; points
    # beyond the cap are handled one by one in eval()
    cap = math.pi * R / 2.0 + 620.0
    want = min(max(x_hi, 60.0), cap)
    bucket = min(float(np.ceil(want / 100.0) * 100.0), cap)
    key = (round(R, 12), bucket)
    with _model_lock:
        m = _models.get(key)
        if m is None:
            m = _ImagOrderModel(R, bucket)
            _models[key] = m
        return m


def _quad_imag_vec(R: float, xs: np.ndarray) -> np.ndarray:
    """Unscaled K_{iR}(x) by direct trapezoid, trustworthy for R <= 6."""
    xs = np.asarray(xs, dtype=float)
    xmin = float(xs.min())
    T = math.acosh(1.0 + 46.0 / xmin) if xmin < 46.0 else 3.0
    h = min(2.0 * math.pi / (2.0 * R + 48.0), 0.2)
    # natural size of K_{iR}; zero crossings make a pure relative test hang
    env = math.exp(-math.pi * R / 2.0) * math.sqrt(2.0 * math.pi / max(R, 1.0))
    prev = None
    for _ in range(10):
        n = int(math.ceil(T / h))
        t = np.linspace(0.0, n * h, n + 1)
        w = np.exp(-np.outer(xs, np.cosh(t))) * np.cos(R * t)
        v = h * (np.sum(w, axis=1) - 0.5 * (w[:, 0] + w[:, -1]))
        if prev is not None:
            # summation noise floor: halving h cannot push the result below it
            noise = 32.0 * np.finfo(float).eps * h * np.sum(np.abs(w), axis=1)
            tol = np.maximum(1e-14 * np.maximum(np.abs(v), env), noise)
            if np.all(np.abs(v - prev) <= tol):
                return v
        prev = v
        h *= 0.5
    raise PrecisionError("trapezoid for K_{iR} did not converge")


def kbessel_imag(R: float, xs, scaled: bool = False) -> np.ndarray:
    """Vectorized K_{iR}(x) (real output) for arrays of positive x.

    With scaled=True returns e^(pi R / 2) K_{iR}(x).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs <= 0):
        raise ValueError("arguments must be positive")
    R = abs(float(R))
    if R == 0.0:
        vals = sps.kv(0.0, xs)
        return vals if not scaled else vals
    if R <= 4.0:
        vals = _quad_imag_vec(R, xs)
        return vals * math.exp(math.pi * R / 2.0) if scaled else vals
    model = _imag_model(R, float(xs.max()) + 1.0)
    vals = model.eval(xs)
    if not scaled:
        vals = vals * math.exp(-math.pi * R / 2.0)
    return vals


def _kbessel_quad_complex(nu: complex, y: float) -> complex:
    """General-order cosh integral, adequate for |Im nu| <= 6, |Re nu| <= 3."""
    T = 1.0
    while y * math.cosh(T) - abs(nu.real) * T < y + 46.0:
        T += 0.5
        if T > 60.0:
            raise PrecisionError("integration range for kbessel blew up")
    h = min(2.0 * math.pi / (2.0 * abs(nu.imag) + 48.0), 0.2)
    prev = None
    for _ in range(12):
        n = int(math.ceil(T / h))
        t = np.linspace(0.0, n * h, n + 1)
        w = np.exp(-y * np.cosh(t)) * np.cosh(nu * t)
        v = h * (np.sum(w) - 0.5 * (w[0] + w[-1]))
        if prev is not None and abs(v - prev) <= 1e-14 * abs(v) + 1e-280:
            return complex(v)
        prev = v
        h *= 0.5
    raise PrecisionError("trapezoid for complex-order kbessel did not converge")


_kbessel_memo: dict[tuple, complex] = {}


def kbessel(nu: complex, y: float) -> complex:
    """Modified Bessel K_nu(y) for real y > 0; see module docstring for the box."""
    if y <= 0:
        raise ValueError("kbessel requires y > 0")
    nu = complex(nu)
    key = (round(nu.real, 14), round(nu.imag, 14), round(float(y), 14))
    hit = _kbessel_memo.get(key)
    if hit is not None:
        return hit
    if abs(nu.imag) > 100.0:
        raise UnsupportedDomainError("kbessel supports |Im nu| <= 100")
    if nu.imag == 0.0:
        val = complex(sps.kv(nu.real, y))
    elif y < 1e-3 or (nu.real != 0.0 and abs(nu.imag) > 6.0) or abs(nu.real) > 3.0:
        with mpmath.workdps(35):
            val = complex(mpmath.besselk(mpmath.mpc(nu), mpmath.mpf(y)))
    elif nu.real == 0.0:
        val = complex(float(kbessel_imag(nu.imag, np.array([y]))[0]))
    else:
        val = _kbessel_quad_complex(nu, y)
    if len(_kbessel_memo) > 200000:
        _kbessel_memo.clear()
    _kbessel_memo[key] = val
    return val


# ---------------------------------------------------------------------------
# Gamma and Whittaker W
# ---------------------------------------------------------------------------


def complex_gamma(s: complex) -> complex:
    """Gamma(s) on C minus the poles; raises near nonpositive integers."""
    s = complex(s)
    if abs(s.imag) < 1e-12 and s.real <= 0.5 and abs(s.real - round(s.real)) < 1e-12:
        raise ValueError(f"Gamma pole at s={s}")
    return complex(sps.gamma(s))


_whittaker_memo: dict[tuple, complex] = {}


def whittaker_w(kappa: float, nu: complex, x: float) -> complex:
    """Whittaker W_{kappa, nu}(x), mpmath backed, for the documented box."""
    if x <= 0:
        raise ValueError("whittaker_w requires x > 0")
    kappa = float(kappa)
    nu = complex(nu)
    if abs(kappa) > 2.0 or abs(nu.imag) > 100.0:
        raise UnsupportedDomainError("whittaker_w supports |kappa| <= 2, |Im nu| <= 100")
    key = (round(kappa, 14), round(nu.real, 14), round(nu.imag, 14), round(float(x), 14))
    hit = _whittaker_memo.get(key)
    if hit is not None:
        return hit
    with mpmath.workdps(30):
        val = complex(mpmath.whitw(mpmath.mpf(kappa), mpmath.mpc(nu), mpmath.mpf(x)))
    if len(_whittaker_memo) > 200000:
        _whittaker_memo.clear()
    _whittaker_memo[key] = val
    return val


def _w_anchor(kappa: float, nut: float, x: float) -> tuple[float, float]:
    """(W, W') for W_{kappa, i nut}(x) at large x, where W is monotone.

    Uses the Laplace representation integrated by parts once so the t -> 0
    tail falls like t^{3/2 - kappa} instead of t^{1/2 - kappa}:
        I = int e^{-t} t^{s-1} g dt = (1/s) int e^{-t} t^s (g - g') dt,
        g = (1 + t/x)^c, s = 1/2 - kappa + i nut, c = i nut + kappa - 1/2.
    Trapezoid in u = log t. Only trustworthy past the turning point, so
    callers keep x >= 2 nut + 8.
    """
    nu = 1j * nut
    s = 0.5 - kappa + nu
    c = nu + kappa - 0.5
    u0 = -(46.0 + math.pi * nut / 2.0) / (1.0 + s.real)
    u1 = math.log(52.0 + math.pi * nut / 2.0 + 2.0 * abs(c))
    h = 2.0 * math.pi / (nut + 52.0)
    prev = None
    for _ in range(8):
        n = int(math.ceil((u1 - u0) / h))
        u = np.linspace(u0, u0 + n * h, n + 1)
        t = np.exp(u)
        lp = np.log1p(t / x)
        base = np.exp(-t + (s + 1.0) * u)
        w_j = base * (np.exp(c * lp) - (c / x) * np.exp((c - 1.0) * lp))
        j_val = h * (np.sum(w_j) - 0.5 * (w_j[0] + w_j[-1]))
        w_j2 = base * np.exp((c - 1.0) * lp)
        j2_val = h * (np.sum(w_j2) - 0.5 * (w_j2[0] + w_j2[-1]))
        if prev is not None:
            noise = 32.0 * np.finfo(float).eps * h * float(np.sum(np.abs(w_j)))
            noise2 = 32.0 * np.finfo(float).eps * h * float(np.sum(np.abs(w_j2)))
            if abs(j_val - prev[0]) <= max(1e-13 * abs(j_val), noise) and abs(
                j2_val - prev[1]
            ) <= max(1e-13 * abs(j2_val), noise2):
                break
        prev = (j_val, j2_val)
        h *= 0.5
    else:
        raise PrecisionError(f"Whittaker anchor failed at kappa={kappa}, nut={nut}, x={x}")
    pref = math.exp(-x / 2.0 + kappa * math.log(x))
    w_val = pref * j_val / complex_gamma(s + 1.0)
    wp_val = w_val * (kappa / x - 0.5) - pref * (c / (x * x)) * j2_val / complex_gamma(s)
    if abs(w_val.imag) > 1e-8 * (abs(w_val) + 1e-280):
        raise PrecisionError("Whittaker anchor lost realness")
    return w_val.real, wp_val.real


class _WhittakerLineModel:
    """Piecewise Taylor model of x -> W_{kappa, i nut}(x) on [0.45, x_hi].

    Anchored by _w_anchor at x_hi and marched inward on the Whittaker ODE
        x^2 W'' = (x^2/4 - kappa x + nu^2 - 1/4) W,   nu^2 = -nut^2,
    which is stable in that direction (W decays outward). Real coefficients
    throughout. A second anchor one panel in cross-checks the march.
    """

    ORDER = 26

    def __init__(self, kappa: float, nut: float, x_hi: float):
        self.kappa = float(kappa)
        self.nut = float(nut)
        self.x_lo = 0.45
        self.x_hi = float(x_hi)
        self.panels: list[tuple[float, float, np.ndarray]] = []
        self._build()
        self._lo_edges = np.array([p[0] + p[1] for p in self.panels])  # ascending? no
        # panels are stored outward-to-inward; sort for searchsorted
        order = np.argsort(self._lo_edges)
        self._panels_sorted = [self.panels[i] for i in order]
        self._lo_sorted = self._lo_edges[order]

    def _step_coeffs(self, x0: float, u0: float, du0: float, h: float):
        kap, nut = self.kappa, self.nut
        q0 = x0 * x0 / 4.0 - kap * x0 - nut * nut - 0.25
        q1 = x0 / 2.0 - kap
        m = self.ORDER
        a = np.zeros(m + 1)
        a[0] = u0
        a[1] = du0
        for j in range(0, m - 1):
            rhs = q0 * a[j] + (q1 * a[j - 1] if j >= 1 else 0.0) + (0.25 * a[j - 2] if j >= 2 else 0.0)
            rhs -= 2.0 * x0 * (j + 1) * j * a[j + 1]
            rhs -= j * (j - 1) * a[j]
            a[j + 2] = rhs / (x0 * x0 * (j + 2) * (j + 1))
        return a

    def _build(self):
        kap, nut = self.kappa, self.nut
        x = self.x_hi
        u, du = _w_anchor(kap, nut, x)
        scale = max(abs(u), abs(du), 1e-280)
        checked_second_anchor = False
        while x > self.x_lo + 1e-12:
            h_mag = 0.35 * x * min(1.0, self.ORDER / (math.e * max(nut, 1.0)))
            h_mag = min(h_mag, x - self.x_lo, 6.0)
            if not checked_second_anchor and x - h_mag < 2.0 * nut + 8.0:
                # keep the first landing inside the anchor's comfort zone
                h_mag = min(h_mag, max(x - (2.0 * nut + 8.0), 0.5))
            for _ in range(9):
                a = self._step_coeffs(x, u, du, -h_mag)
                tail = abs(a[-1]) * h_mag ** self.ORDER + abs(a[-2]) * h_mag ** (self.ORDER - 1)
                if tail <= 1e-17 * scale:
                    break
                h_mag *= 0.5
            else:
                raise PrecisionError("Whittaker march step would not settle")
            self.panels.append((x, -h_mag, a))
            powers = (-h_mag) ** np.arange(self.ORDER + 1)
            u_new = float(np.dot(a, powers))
            du_new = float(np.dot(a[1:] * np.arange(1, self.ORDER + 1), powers[:-1]))
            x = x - h_mag
            u, du = u_new, du_new
            scale = max(scale, abs(u), abs(du))
            if not checked_second_anchor and x >= 2.0 * nut + 8.0:
                w_chk, _ = _w_anchor(kap, nut, x)
                if abs(w_chk - u) > 5e-11 * max(abs(u), abs(w_chk), 1e-280):
                    raise PrecisionError(
                        f"Whittaker march disagrees with anchor at x={x}: {u} vs {w_chk}"
                    )
                checked_second_anchor = True

    def eval(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if np.any(xs < self.x_lo - 1e-12) or np.any(xs > self.x_hi + 1e-12):
            raise ValueError("query outside Whittaker model range")
        idx = np.searchsorted(self._lo_sorted, xs, side="right") - 1
        idx = np.clip(idx, 0, len(self._panels_sorted) - 1)
        out = np.empty(len(xs))
        for i in np.unique(idx):
            x0, _, a = self._panels_sorted[i]
            xi = xs[idx == i] - x0
            acc = np.full(xi.shape, a[-1])
            for j in range(self.ORDER - 1, -1, -1):
                acc = acc * xi + a[j]
            out[idx == i] = acc
        return out


_whitt_models: dict[tuple, _WhittakerLineModel] = {}


def _whitt_model(kappa: float, nut: float, x_hi: float) -> _WhittakerLineModel:
    build_hi = max(2.0 * nut + 10.0, 14.0, x_hi)
    key = (round(kappa, 12), round(nut, 12), float(np.ceil(build_hi / 20.0) * 20.0))
    with _model_lock:
        m = _whitt_models.get(key)
        if m is None or m.x_hi < x_hi:
            m = _WhittakerLineModel(kappa, nut, key[2])
            _whitt_models[key] = m
        return m


def whittaker_w_fast(kappa: float, nu: complex, xs) -> np.ndarray:
    """Vectorized W_{kappa, nu}(x) over x >= 0.5 for imaginary nu.

    Backed by a cached piecewise-Taylor model per (kappa, nu): an integral
    anchor past the turning point plus an inward ODE march, the same scheme
    the K-Bessel hybrid uses. Direct trapezoid quadrature is useless here:
    below the turning point the Laplace integral cancels to e^{-pi |nu|} of
    its mass, which doubles the exponent the working precision has to absorb.
    The anchor itself still pays e^{pi |nu| / 2}, which caps the box at
    |Im nu| <= 8 (we need 0 and +-1/4 at |Im nu| ~ 6.9); kappa in
    [-0.45, 0.45]. Output is real (so are the functions); callers combine
    with phases.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < 0.5):
        raise UnsupportedDomainError("fast Whittaker path requires x >= 0.5")
    nu = complex(nu)
    if abs(nu.imag) > 8.0 or nu.real != 0.0 or not -0.45 <= kappa <= 0.45:
        raise UnsupportedDomainError(
            "fast Whittaker path: kappa in [-0.45, 0.45], nu imaginary, |Im nu| <= 8"
        )
    model = _whitt_model(float(kappa), abs(nu.imag), float(xs.max()))
    return model.eval(xs)


def whittaker_profile(ell: int, mu: complex, n: int, y: float) -> complex:
    """y^(-ell/4) W_{sgn(n) ell/4, mu - 1/2}(4 pi |n| y), one Fourier term."""
    if n == 0:
        raise ValueError("profile needs n != 0")
    kappa = (ell / 4.0) * (1 if n > 0 else -1)
    return y ** (-ell / 4.0) * whittaker_w(kappa, mu - 0.5, 4.0 * math.pi * abs(n) * y)


def whittaker_profile_fast(ell: int, mu: complex, ns, y: float) -> np.ndarray:
    """Vectorized profile over an integer array ns (no zeros)."""
    ns = np.asarray(ns, dtype=int)
    if np.any(ns == 0):
        raise ValueError("profile needs n != 0")
    out = np.empty(len(ns), dtype=complex)
    nu = complex(mu) - 0.5
    for sign in (1, -1):
        mask = (np.sign(ns) == sign)
        if not mask.any():
            continue
        xs = 4.0 * math.pi * np.abs(ns[mask]) * y
        kappa = sign * ell / 4.0
        try:
            vals = whittaker_w_fast(kappa, nu, xs)
        except UnsupportedDomainError:
            vals = np.array([whittaker_w(kappa, nu, float(x)) for x in xs])
        out[mask] = vals
    return out * y ** (-ell / 4.0)


def whittaker_profile_normalized(ell: int, mu: complex, n: int, y: float) -> complex:
    """|n|^(mu-1) / Gamma(mu + sgn(n) ell/4) times the plain profile."""
    sgn = 1 if n > 0 else -1
    scale = abs(n) ** complex(mu - 1) / complex_gamma(mu + sgn * ell / 4.0)
    return scale * whittaker_profile(ell, mu, n, y)


def specfun_table(kind: str, grid, **params):
    """Small evaluation tables for the CLI (kind in {'kbessel', 'whittaker'})."""
    rows = []
    if kind == "kbessel":
        nu = complex(params.get("nu", 0.0))
        for y in grid:
            v = kbessel(nu, float(y))
            rows.append({"y": float(y), "re": v.real, "im": v.imag})
    elif kind == "whittaker":
        kappa = float(params.get("kappa", 0.25))
        nu = complex(params.get("nu", 0.0))
        for x in grid:
            v = whittaker_w(kappa, nu, float(x))
            rows.append({"x": float(x), "re": v.real, "im": v.imag})
    else:
        raise ValueError(f"unknown table kind {kind!r}")
    return rows
