"""Compiled integrands for QUADPACK.

Each function has the ``double f(int n, double *xx)`` signature accepted by
:class:`scipy.LowLevelCallable`.  The integration variable is the distance
``v = 1/2 - u`` from the zero of ``cos(pi u)``, so that
``cos(pi u) = sin(pi v)`` keeps full relative precision near ``u = 1/2``
where small-|x| densities concentrate.  The Beta factor ``u**(a-1)`` becomes
``(1/2 - v)**(a-1)`` and is supplied by QUADPACK's algebraic weight at the
``v = 1/2`` endpoint; only the smooth ``(1-u)**(b-1) = (1/2 + v)**(b-1)``
part appears here.  Pieces of the range away from ``v = 1/2`` pass the Beta
exponent explicitly as the last argument (zero on the weighted piece).
"""

import ctypes
import math

from numba import carray, cfunc, types
from numba.extending import get_cython_function_address
from scipy import LowLevelCallable

_sig = types.double(types.intc, types.CPointer(types.double))

_gammaincc = ctypes.CFUNCTYPE(ctypes.c_double, ctypes.c_double, ctypes.c_double)(
    get_cython_function_address("scipy.special.cython_special", "gammaincc")
)


@cfunc(_sig, cache=True)
def _pdf_integrand(n, xx):
    # xx = [v, k, x^2, b - 1, log prefactor, a - 1 or 0]
    d = carray(xx, n)
    v = d[0]
    c = math.sin(math.pi * v)
    if c <= 0.0:
        return 0.0
    e = d[4] - d[1] * math.log(c) - d[2] / (2.0 * c * c) + d[3] * math.log(0.5 + v)
    if d[5] != 0.0:
        e += d[5] * math.log(0.5 - v)
    return math.exp(e)


@cfunc(_sig)
def _sf_integrand(n, xx):
    # xx = [v, k/2, x^2, b - 1, log prefactor, a - 1 or 0]; regularized upper gamma at x^2 / (2 c^2)
    d = carray(xx, n)
    v = d[0]
    c = math.sin(math.pi * v)
    if c <= 0.0:
        return 0.0
    q = _gammaincc(d[1], d[2] / (2.0 * c * c))
    if q <= 0.0:
        return 0.0
    e = d[4] + d[3] * math.log(0.5 + v)
    if d[5] != 0.0:
        e += d[5] * math.log(0.5 - v)
    return q * math.exp(e)


pdf_integrand = LowLevelCallable(_pdf_integrand.ctypes)
sf_integrand = LowLevelCallable(_sf_integrand.ctypes)
