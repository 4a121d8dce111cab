#!/usr/bin/env python3
"""Function-set isomorphism: brute force against constructive witnesses.

Two compatible constraint function sets are isomorphic exactly when every
instance has the same partition value under both.  The distinguisher makes
that effective: it either constructs the domain permutation or produces a
concrete instance whose exact values differ.
"""

from cspiso import (
    CFSet,
    binary_from_rows,
    distinguish,
    equality_function,
    find_isomorphisms,
    partition_function,
    unary_function,
)
from cspiso.instances import replace_functions
from cspiso.structure import contract_twins, twin_classes

eq2 = CFSet((equality_function(2, 2),))
diag12 = CFSet((binary_from_rows([[1, 0], [0, 2]]),))
diag21 = CFSet((binary_from_rows([[2, 0], [0, 1]]),))

print("brute force diag(1,2) ~ diag(2,1):", find_isomorphisms(diag12, diag21))
result = distinguish(diag12, diag21)
print("distinguisher finds the same relabeling:", result.sigma)

result = distinguish(eq2, diag12)
print("\nequality vs diag(1,2) is not isomorphic; witness instance:")
print("  constraints:", result.witness.constraints)
print("  Z under equality:", result.z_f)
print("  Z under diag(1,2):", result.z_g)
assert partition_function(eq2, result.witness) == result.z_f
assert partition_function(diag12, result.witness) == result.z_g

# Twins (domain elements no constraint evaluation can tell apart) contract
# away, summing their weights, without changing any partition value.
twinful = CFSet((binary_from_rows([[1, 1, 0], [1, 1, 0], [0, 0, 2]]),))
print("\ntwin classes of a 3-element domain:", twin_classes(twinful))
contraction = contract_twins(twinful)
print("contracted domain size:", contraction.contracted.q,
      "weights:", contraction.contracted.weights)
probe = result.witness
print("value preserved:",
      partition_function(twinful, probe),
      "==",
      partition_function(contraction.contracted,
                         replace_functions(probe, twinful, contraction.contracted)))

# All-unary sets are the one place witnesses need repeated constraints: the
# sets below agree on every simple instance yet are not isomorphic.
u1 = CFSet((unary_function((0, 2)),))
u2 = CFSet((unary_function((1, 1)),))
result = distinguish(u1, u2)
print("\nunary (0,2) vs (1,1): witness repeats a constraint:",
      result.witness.constraints, "->", result.z_f, "vs", result.z_g)
