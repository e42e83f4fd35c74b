"""Numerical lifts of Maass cusp forms to weight 1/2.

The package is organised around the pipeline

    Dirichlet characters / Gauss sums        (arith)
    integral binary quadratic forms, orbits  (quadforms)
    K-Bessel and Whittaker evaluation        (specfun)
    Maass cusp form data and evaluation      (maass)
    closed geodesic / CM point periods       (periods)
    zeta kernels and the matrix identity     (zeta)
    the weight 1/2 lift itself               (lift)
    command line front end                   (cli)

Everything downstream of `maass` consumes a coefficient fixture shipped in
``maasslift/data``; ``tools/generate_fixture.py`` documents how it was made.
"""

__version__ = "0.1.0"

from . import arith, quadforms, specfun  # noqa: F401
