"""Seeded random corpora: function sets, instances, and gadgets.

Shared by the library selftest and the test suite so that identical seeds
reproduce identical runs byte for byte.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .algebra import ConstraintFunction, Scalar
from .holant import EQ, Gadget
from .instances import CFSet, LabeledInstance

DEFAULT_ENTRY_POOL: Tuple[Scalar, ...] = (0, 1, 2)


def random_function(
    rng: random.Random,
    q: int,
    arity: int,
    entry_pool: Sequence[Scalar] = DEFAULT_ENTRY_POOL,
) -> ConstraintFunction:
    entries = tuple(rng.choice(entry_pool) for _ in range(q ** arity))
    return ConstraintFunction(q, arity, entries)


def random_rational(rng: random.Random, *, nonzero: bool = False) -> Fraction:
    while True:
        value = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
        if not nonzero or value != 0:
            return value


def random_cfset(
    rng: random.Random,
    q: int,
    t: int,
    max_arity: int = 2,
    entry_pool: Sequence[Scalar] = DEFAULT_ENTRY_POOL,
    weighted: bool = False,
    positive_weights: bool = False,
) -> CFSet:
    functions = tuple(
        random_function(rng, q, rng.randint(1, max_arity), entry_pool) for _ in range(t)
    )
    weights = None
    if weighted:
        if positive_weights:
            weights = tuple(Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(q))
        else:
            weights = tuple(random_rational(rng, nonzero=True) for _ in range(q))
    return CFSet(functions, weights)


def random_instance(
    rng: random.Random,
    fset: CFSet,
    n_vars: int,
    k: int = 0,
    n_constraints: Optional[int] = None,
) -> LabeledInstance:
    if k > n_vars:
        raise ValueError("more labels than variables")
    variables = tuple(f"x{i}" for i in range(1, n_vars + 1))
    labels = tuple(rng.sample(variables, k))
    count = rng.randint(1, 2 * n_vars) if n_constraints is None else n_constraints
    constraints = []
    for _ in range(count):
        j = rng.randrange(fset.t)
        arity = fset.functions[j].arity
        constraints.append((j, tuple(rng.choice(variables) for _ in range(arity))))
    return LabeledInstance(variables, tuple(constraints), labels)


def random_gadget(
    rng: random.Random,
    q: int,
    n_outputs: int,
    n_inputs: int,
    max_internal_edges: int = 3,
    entry_pool: Sequence[Scalar] = DEFAULT_ENTRY_POOL,
    max_vertices: int = 4,
) -> Gadget:
    """A small random gadget with mixed equality / random-function vertices.

    Vertices first receive their dangling and internal ports; each function
    vertex then gets a signature of matching arity.  Degree-0 vertices are
    pruned unless they are equality vertices (legal scalar factor q).
    """
    n_vertices = rng.randint(1, max_vertices)
    n_edges = rng.randint(0, max_internal_edges)
    stubs: List[List[int]] = [[] for _ in range(n_vertices)]  # per-vertex port count

    def new_port(v: int) -> Tuple[int, int]:
        stubs[v].append(len(stubs[v]))
        return (v, stubs[v][-1])

    edges = []
    for _ in range(n_edges):
        u = rng.randrange(n_vertices)
        v = rng.randrange(n_vertices)
        edges.append((new_port(u), new_port(v)))
    outputs = tuple(new_port(rng.randrange(n_vertices)) for _ in range(n_outputs))
    inputs = tuple(new_port(rng.randrange(n_vertices)) for _ in range(n_inputs))

    signatures = []
    for v in range(n_vertices):
        degree = len(stubs[v])
        if degree == 0 or rng.random() < 0.4:
            signatures.append(EQ)
        else:
            signatures.append(random_function(rng, q, degree, entry_pool))
    return Gadget(q, tuple(signatures), tuple(edges), outputs, inputs)


def random_bipartite_gadget(
    rng: random.Random,
    fset: CFSet,
    n_eq: int,
    n_constraints: int,
    n_outputs: int,
    n_inputs: int,
) -> Gadget:
    """A gadget in the bipartite class over the set: constraint vertices wire
    every argument to some equality vertex; dangling ports live on equality
    vertices."""
    q = fset.q
    ports: List[int] = [0] * n_eq

    def eq_port(v: int) -> Tuple[int, int]:
        ports[v] += 1
        return (v, ports[v] - 1)

    signatures: List = [EQ] * n_eq
    edges = []
    for _ in range(n_constraints):
        j = rng.randrange(fset.t)
        fn = fset.functions[j]
        c_vertex = len(signatures)
        signatures.append(fn)
        for pos in range(fn.arity):
            edges.append((eq_port(rng.randrange(n_eq)), (c_vertex, pos)))
    outputs = tuple(eq_port(rng.randrange(n_eq)) for _ in range(n_outputs))
    inputs = tuple(eq_port(rng.randrange(n_eq)) for _ in range(n_inputs))
    return Gadget(q, tuple(signatures), tuple(edges), outputs, inputs)
