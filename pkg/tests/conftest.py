"""Shared fixtures and brute-force oracles.

The oracles here are deliberately naive (python sets and double loops) so
they cannot share a bug with the vectorized implementations under test.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

# reference designs used across the suite
S_ELEMS = (0, 1, 2, 4, 7, 10, 13, 16, 18, 19, 20)
G_ELEMS = (0, 1, 3, 5, 11, 13, 17, 18, 19, 20)


def oracle_differences(elems):
    return {a - b for a in elems for b in elems}


def oracle_weight_map(elems):
    w = {}
    for a in elems:
        for b in elems:
            d = a - b
            w[d] = w.get(d, 0) + 1
    return w


def oracle_hole_free(elems):
    span = max(elems) - min(elems)
    return oracle_differences(elems) == set(range(-span, span + 1))


def oracle_central_halfwidth(elems):
    d = oracle_differences(elems)
    m = 0
    while (m + 1) in d and -(m + 1) in d:
        m += 1
    return m


def oracle_essential(elems):
    """Essentialness straight from the definition: drop the sensor, recompute."""
    full = oracle_differences(elems)
    flags = []
    for g in elems:
        rest = [e for e in elems if e != g]
        flags.append(not rest or oracle_differences(rest) != full)
    return flags


def oracle_fragility(elems):
    flags = oracle_essential(elems)
    return Fraction(sum(flags), len(flags))


def oracle_leakage(elems, q, c1_mag):
    """Coupling leakage by an explicit dense double sum over sensor pairs."""
    off = 0.0
    total = 0.0
    for i, gi in enumerate(elems):
        for j, gj in enumerate(elems):
            sep = abs(gi - gj)
            if i == j:
                c = 1.0
            elif 1 <= sep <= q:
                c = c1_mag / sep
            else:
                c = 0.0
            total += c * c
            if i != j:
                off += c * c
    return math.sqrt(off / total)


def oracle_expand(gen_elems, half_u, r):
    """Fractal expansion via the unrolled digit sum with base 2*half_u + 1."""
    base = 2 * half_u + 1
    points = set()
    for digits in itertools.product(gen_elems, repeat=r):
        points.add(sum(n * base ** i for i, n in enumerate(digits)))
    return tuple(sorted(points))


def oracle_collision_free(elems, r):
    """True when the order-r expansion keeps all len(elems)**r translates distinct."""
    m = oracle_central_halfwidth(elems)
    return len(oracle_expand(elems, m, r)) == len(elems) ** r


def arrays_with_aperture_upto(limit):
    """Every normalized integer array with aperture <= limit (contains 0, max)."""
    pool = [(0,)]
    for span in range(1, limit + 1):
        inner = range(1, span)
        for k in range(span):
            for middle in itertools.combinations(inner, k):
                pool.append((0,) + middle + (span,))
    return pool


def random_elements(rng, max_aperture, min_aperture=1):
    """One random normalized array: endpoints fixed, interior sensors coin-flipped."""
    span = int(rng.integers(min_aperture, max_aperture + 1))
    if span == 0:
        return (0,)
    middle = [i for i in range(1, span) if rng.random() < 0.5]
    return (0, *middle, span)


@pytest.fixture(scope="session")
def small_pool():
    return arrays_with_aperture_upto(6)


@pytest.fixture(scope="session")
def hole_free_pool():
    return [t for t in arrays_with_aperture_upto(8) if oracle_hole_free(t)]
