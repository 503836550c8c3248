"""Volumes and extremal representations of homogeneous polynomials.

Polynomials and Gram forms go in as dicts (or JSON strings) in the same
schema the command-line tool reads; results come back as dicts.
"""

import json

from . import _core
from ._core import (
    DEFAULT_SEED,
    DivergenceError,
    InfeasibleError,
    ParseError,
    PreconditionError,
    ball_moment,
    ball_volume,
)

__all__ = [
    "DEFAULT_SEED",
    "DivergenceError",
    "InfeasibleError",
    "ParseError",
    "PreconditionError",
    "ball_moment",
    "ball_volume",
    "certify",
    "ld_polynomial",
    "moments",
    "solve",
    "sphere_minimum",
    "volume",
]


def _doc(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def ld_polynomial(n, d=4, q=1):
    """sum_i |x_i|^d as a polynomial document; d may be an int or "num/den"."""
    num, _, den = str(d).partition("/")
    num, den = int(num), int(den or 1)
    dq = num * q // den
    terms = []
    for i in range(n):
        alpha = [0] * n
        alpha[i] = dq
        terms.append({"alpha_times_q": alpha, "coeff": 1.0})
    return {"n": n, "d": [num, den], "q": q, "convention": "monomial", "terms": terms}


def sphere_minimum(poly):
    return _core.sphere_minimum(_doc(poly))


def volume(poly, backend="spherical", budget=0, seed=DEFAULT_SEED):
    return json.loads(_core.volume(_doc(poly), backend, budget, seed))


def moments(poly, max_order, backend="spherical", budget=0, seed=DEFAULT_SEED):
    out = json.loads(_core.moments(_doc(poly), str(max_order), backend, budget, seed))
    out["entries"] = {tuple(e["alpha_times_q"]): (e["value"], e["std_error"]) for e in out["entries"]}
    return out


def solve(problem, n, d, q=1, target_volume=None, backend="spherical", budget=0, seed=DEFAULT_SEED):
    return json.loads(_core.solve(problem, n, str(d), q, target_volume, backend, budget, seed))


def certify(candidate, problem="", tol=1e-6, backend="spherical", budget=0, seed=DEFAULT_SEED):
    return json.loads(_core.certify(_doc(candidate), problem, tol, backend, budget, seed))
