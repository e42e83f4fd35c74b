"""Period functionals over orbit representatives.

Definite classes evaluate in closed form at the associated special point;
indefinite classes integrate the form along the closed (or split-infinite)
geodesic attached to the representative.  All geodesic integrals run in
log-coordinates over one fundamental period of the stabilizer.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .maass import MaassCuspForm, eval_phi_pullback
from .quadforms import OrbitRep
from .specfun import PrecisionError

# Net constant for geodesic periods: the invariant measure contributes
# dy/(4y), the second orientation component doubles it, and -I (present in
# every level group) halves the stabilizer count, leaving (1/4) dy/y on the
# y > 0 parametrization.  A wrong constant here is caught by the end-to-end
# modularity of the lifted form, not by any local identity.
GEODESIC_MEASURE = 0.25

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class PeriodResult:
    value: complex
    method: str  # "closed-form" or "quadrature"
    error_estimate: float
    rep: OrbitRep

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be nonnegative")


def _frame_point(rep: OrbitRep, y: float) -> complex:
    """g_v . (iy) as a point of the upper half-plane."""
    g = rep.g
    num = g[0, 0] * 1j * y + g[0, 1]
    den = g[1, 0] * 1j * y + g[1, 1]
    return complex(num / den)


def period_definite(form: MaassCuspForm, rep: OrbitRep,
                    tol: float = 1e-12) -> PeriodResult:
    if rep.signature not in ("positive-definite", "negative-definite"):
        raise ValueError(f"rep with signature {rep.signature} is not definite")
    if not isinstance(rep.epsilon, int):
        raise ValueError("definite rep carries no finite stabilizer order")
    value = (math.pi / rep.epsilon) * eval_phi_pullback(form, rep.heegner, tol)
    return PeriodResult(value=value, method="closed-form",
                        error_estimate=0.0, rep=rep)


def period_definite_quadrature(form: MaassCuspForm, rep: OrbitRep,
                               nodes: int = 32) -> PeriodResult:
    """Rotation-group quadrature oracle for the definite period.

    Integrates phi(k_theta g^{-1}) d(theta)/2 over a full turn and divides by
    the stabilizer order; the integrand is constant (k_theta fixes i), so
    this checks frame and constant bookkeeping rather than numerics.
    """
    if rep.signature not in ("positive-definite", "negative-definite"):
        raise ValueError("quadrature oracle needs a definite rep")
    ginv = np.linalg.inv(rep.g)
    thetas = 2 * math.pi * (np.arange(nodes) + 0.5) / nodes
    total = 0.0j
    for th in thetas:
        k = np.array([[math.cos(th), math.sin(th)], [-math.sin(th), math.cos(th)]])
        m = np.linalg.inv(k @ ginv)  # phi(h) = Phi(h^{-1} . i)
        z = complex(m[0, 0] * 1j + m[0, 1]) / complex(m[1, 0] * 1j + m[1, 1])
        total += eval_phi_pullback(form, z)
    value = (total / nodes) * math.pi / rep.epsilon
    spread = abs(value - period_definite(form, rep).value)
    return PeriodResult(value=complex(value), method="quadrature",
                        error_estimate=max(spread, 1e-16), rep=rep)


def _gl_panel(f, a: float, b: float) -> complex:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return complex(half * sum(w * f(mid + half * t)
                              for t, w in zip(_GL_NODES, _GL_WEIGHTS)))


def _adaptive_log_integral(f, t0: float, t1: float, tol: float,
                           max_depth: int = 24):
    """integral of f(t) dt on [t0, t1] by bisected 16-node panels.

    Returns (value, a-posteriori estimate = sum of |whole - split| defects).
    """
    value = 0.0j
    err = 0.0
    stack = [(t0, t1, _gl_panel(f, t0, t1), 0)]
    budget = tol / max(t1 - t0, 1e-12)
    while stack:
        a, b, whole, depth = stack.pop()
        mid = 0.5 * (a + b)
        left = _gl_panel(f, a, mid)
        right = _gl_panel(f, mid, b)
        defect = abs(whole - (left + right))
        if defect <= budget * (b - a) or depth >= max_depth:
            if depth >= max_depth and defect > budget * (b - a):
                raise PrecisionError(
                    f"geodesic quadrature stalled on [{a:.4g},{b:.4g}], "
                    f"defect {defect:.3e}")
            value += left + right
            err += defect
        else:
            stack.append((a, mid, left, depth + 1))
            stack.append((mid, b, right, depth + 1))
    return value, err


def period_indefinite(form: MaassCuspForm, rep: OrbitRep, tol: float = 1e-10,
                      eval_tol: float | None = None) -> PeriodResult:
    if rep.signature != "indefinite":
        raise ValueError(f"rep with signature {rep.signature} is not indefinite")
    eval_tol = eval_tol if eval_tol is not None else tol * 1e-2

    def integrand(t: float) -> complex:
        # t = log y; measure dy/y becomes dt
        return eval_phi_pullback(form, _frame_point(rep, math.exp(t)), eval_tol)

    if rep.stabilizer == "infinite-cyclic":
        upper = 2.0 * math.log(rep.unit_eigenvalue)
        raw, err = _adaptive_log_integral(integrand, 0.0, upper, tol)
    elif rep.stabilizer == "trivial":
        raw, err = _split_geodesic_integral(form, rep, integrand, tol)
    else:
        raise ValueError(f"unexpected stabilizer {rep.stabilizer!r}")
    return PeriodResult(value=GEODESIC_MEASURE * raw, method="quadrature",
                        error_estimate=GEODESIC_MEASURE * err + tol * 0.1, rep=rep)


def _split_geodesic_integral(form: MaassCuspForm, rep: OrbitRep, integrand,
                             tol: float):
    """Full-line integral for square-discriminant classes.

    The geodesic runs into cusps at both ends where the form decays like
    e^{-2 pi y_cusp}; panels extend outward until two consecutive octaves
    contribute below tolerance.
    """
    value, err = _adaptive_log_integral(integrand, -1.0, 1.0, tol)
    for direction in (+1, -1):
        t0 = direction * 1.0
        quiet = 0
        for _ in range(120):
            t1 = t0 + direction * 1.0
            seg, serr = _adaptive_log_integral(integrand, min(t0, t1),
                                               max(t0, t1), tol)
            value += seg
            err += serr
            quiet = quiet + 1 if abs(seg) < tol / 8 else 0
            if quiet >= 2:
                break
            t0 = t1
        else:
            raise PrecisionError("split geodesic tail did not decay")
    return value, err


def period(form: MaassCuspForm, rep: OrbitRep, tol: float = 1e-10) -> PeriodResult:
    if rep.signature == "indefinite":
        return period_indefinite(form, rep, tol)
    return period_definite(form, rep, tol * 1e-2)


def arclength_period_oracle(form: MaassCuspForm, rep: OrbitRep,
                            tol: float = 1e-8) -> complex:
    """Independent parametrization of the same closed-geodesic integral.

    Walks the semicircle with endpoints (lo, hi) by the polar angle, with
    hyperbolic arclength element d(theta)/sin(theta); the segment covered is
    the image of y in [1, eps0^2] under the frame, located by matching the
    frame's endpoint angles.  Only meaningful for nonsquare (closed) classes.
    """
    if rep.stabilizer != "infinite-cyclic":
        raise ValueError("oracle covers closed geodesics only")
    lo, hi = rep.geodesic
    c = 0.5 * (lo + hi)
    r = 0.5 * (hi - lo)

    def angle_of(z: complex) -> float:
        w = (z - c) / r
        return math.atan2(w.imag, w.real)

    th0 = angle_of(_frame_point(rep, 1.0))
    th1 = angle_of(_frame_point(rep, rep.unit_eigenvalue ** 2))

    def f(th: float) -> complex:
        z = complex(c + r * math.cos(th), r * math.sin(th))
        return eval_phi_pullback(form, z, tol * 1e-2) / math.sin(th)

    a, b = min(th0, th1), max(th0, th1)
    value, _ = _adaptive_log_integral(f, a, b, tol)
    return GEODESIC_MEASURE * value


# ---------------------------------------------------------------------------
# batch computation with CSV cache
# ---------------------------------------------------------------------------


def _cache_key(checksum: str, rep: OrbitRep) -> tuple:
    return (checksum, rep.lattice, rep.N, rep.target, repr(rep.point))


def load_period_cache(path: str) -> dict:
    out = {}
    if not os.path.exists(path):
        return out
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["checksum"], row["lattice"], int(row["N"]),
                   int(row["target"]), row["point"])
            out[key] = (complex(float(row["re"]), float(row["im"])),
                        float(row["error"]))
    return out


def save_period_cache(path: str, entries: dict) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".part"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["checksum", "lattice", "N", "target", "point",
                    "re", "im", "error"])
        for (checksum, lattice, N, target, point), (val, err) in sorted(
                entries.items(), key=lambda kv: kv[0]):
            w.writerow([checksum, lattice, N, target, point,
                        repr(float(val.real)), repr(float(val.imag)),
                        repr(float(err))])
    os.replace(tmp, path)


def compute_periods(form: MaassCuspForm, reps, tol: float = 1e-10,
                    cache_path: str | None = None, threads: int = 1):
    """PeriodResult list in the order of reps, with optional resumable cache."""
    cache = load_period_cache(cache_path) if cache_path else {}
    checksum = form.source_checksum
    results: list[PeriodResult | None] = [None] * len(reps)
    todo = []
    for i, rep in enumerate(reps):
        key = _cache_key(checksum, rep)
        if key in cache:
            val, err = cache[key]
            results[i] = PeriodResult(value=val, method="cache",
                                      error_estimate=err, rep=rep)
        else:
            todo.append(i)

    def work(i: int) -> PeriodResult:
        return period(form, reps[i], tol)

    if threads > 1 and len(todo) > 1:
        from joblib import Parallel, delayed

        done = Parallel(n_jobs=threads, backend="threading")(
            delayed(work)(i) for i in todo)
        for i, res in zip(todo, done):
            results[i] = res
    else:
        for i in todo:
            results[i] = work(i)

    if cache_path:
        for i in todo:
            res = results[i]
            cache[_cache_key(checksum, reps[i])] = (res.value, res.error_estimate)
        save_period_cache(cache_path, cache)
    return results
