#!/usr/bin/env python3
"""Exact partition functions of counting-CSP instances.

A constraint function set plus an instance (variables and constraints)
determines a partition function: the sum over all variable assignments of
the product of constraint evaluations.  Everything below is exact rational
arithmetic; the binary case recovers weighted graph homomorphism counting.
"""

from fractions import Fraction

from cspiso import (
    CFSet,
    LabeledInstance,
    binary_from_rows,
    partition_function,
    pinned_partition,
    product,
)

# Counting homomorphisms into the two-vertex complete graph: the constraint
# function is its adjacency matrix.
k2 = CFSet((binary_from_rows([[0, 1], [1, 0]]),))

triangle = LabeledInstance(
    variables=("a", "b", "c"),
    constraints=((0, ("a", "b")), (0, ("b", "c")), (0, ("c", "a"))),
)
square = LabeledInstance(
    variables=("a", "b", "c", "d"),
    constraints=((0, ("a", "b")), (0, ("b", "c")), (0, ("c", "d")), (0, ("d", "a"))),
)

print("homomorphisms triangle -> K2:", partition_function(k2, triangle))
print("homomorphisms square   -> K2:", partition_function(k2, square))

# Domain weights scale each assignment by a per-value factor.
weighted = CFSet(k2.functions, weights=(Fraction(1, 2), 3))
print("weighted square count:", partition_function(weighted, square))

# Pinning: labeled variables are frozen to chosen domain values and the sum
# runs over extensions only.  Pinned values multiply: gluing two labeled
# instances along their labels multiplies their pinned partition values.
path = LabeledInstance(("x", "m", "y"), ((0, ("x", "m")), (0, ("m", "y"))), ("x", "y"))
for pin in ((0, 0), (0, 1)):
    lhs = pinned_partition(k2, product(path, path), pin)
    rhs = pinned_partition(k2, path, pin) ** 2
    print(f"pin {pin}: glued value {lhs} == squared value {rhs}")
