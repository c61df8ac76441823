"""Shared randomized-input generators.

Every suite draws from random.Random streams keyed by LEVITYPE_SEED (default
0) plus a per-suite tag, so runs are reproducible and suites stay independent
of execution order.
"""

import os
import random
from functools import lru_cache
from itertools import product as iproduct

from levitype import (
    ACStructure,
    Hypersurface,
    Q,
    TruncatedSeries,
    VectorField,
    perturbed_structure,
    project_to_complex_tangent,
)

SEED = int(os.environ.get("LEVITYPE_SEED", "0"))


def make_rng(tag: str) -> random.Random:
    return random.Random(f"{SEED}:{tag}")


@lru_cache(maxsize=None)
def monomials(num_vars: int, lo: int, hi: int):
    out = []
    for exps in iproduct(range(hi + 1), repeat=num_vars):
        if lo <= sum(exps) <= hi:
            out.append(exps)
    return tuple(out)


def random_rational(rng, span=4):
    return Q(rng.randint(-span, span), rng.choice((1, 2, 3)))


def random_phi(rng, n: int, cap: int, max_degree: int = 4) -> Hypersurface:
    """Graph-form surface: 2*x_n plus random terms of degree 2..max_degree."""
    nv = 2 * n
    terms = {}
    pool = monomials(nv, 2, max_degree)
    for exps in rng.sample(pool, min(rng.randint(3, 8), len(pool))):
        c = random_rational(rng)
        if c != 0:
            terms[exps] = c
    terms[tuple(1 if i == 2 * (n - 1) else 0 for i in range(nv))] = Q(2)
    return Hypersurface(n, TruncatedSeries(nv, cap, terms))


def random_structure(rng, n: int, cap: int) -> ACStructure:
    return perturbed_structure(n, cap, rng.randrange(1_000_000))


def random_vector(rng, nv: int, span=3):
    return tuple(random_rational(rng, span) for _ in range(nv))


def random_field(rng, n: int, cap: int, degree: int = 2) -> VectorField:
    """Random polynomial vector field, not tangent to anything."""
    nv = 2 * n
    comps = []
    pool = monomials(nv, 0, degree)
    for _ in range(nv):
        terms = {}
        for exps in rng.sample(pool, min(3, len(pool))):
            c = random_rational(rng, 2)
            if c != 0:
                terms[exps] = c
        comps.append(TruncatedSeries(nv, cap, terms))
    return VectorField(n, comps)


def random_tangent_field(rng, m: Hypersurface, j: ACStructure, cap: int,
                         degree: int = 2, nonzero_at_0: bool = True):
    """Random polynomial field projected into the complex tangent bundle."""
    for _ in range(32):
        x = project_to_complex_tangent(m, j, random_field(rng, m.n, cap,
                                                          degree))
        if not nonzero_at_0 or any(v != 0 for v in x.at_zero()):
            return x
    raise AssertionError("could not draw a tangent field with X(0) != 0")


def random_positive_unit(rng, nv: int, cap: int, degree: int = 2):
    """Series f with f(0) > 0, random higher terms: a positive multiplier."""
    terms = {tuple(0 for _ in range(nv)): Q(rng.randint(1, 3))}
    for exps in rng.sample(monomials(nv, 1, degree),
                           min(3, len(monomials(nv, 1, degree)))):
        c = random_rational(rng, 2)
        if c != 0:
            terms[exps] = c
    return TruncatedSeries(nv, cap, terms)
