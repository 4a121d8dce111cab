#!/usr/bin/env python3
"""Holant gadgets: signature matrices, the compose/tensor/adjoint calculus,
and the decomposition of any bipartite gadget into fundamental generators.
"""

import random

from cspiso import (
    CFSet,
    LabeledInstance,
    csp_to_grid,
    decompose,
    equality_gadget,
    evaluate_expression,
    binary_from_rows,
    compose,
    crossing_gadget,
    holant_value,
    pinned_partition,
    signature_matrix,
    tensor,
)
from cspiso.corpus import random_bipartite_gadget, random_cfset

rng = random.Random(0)

# The split/merge equality gadgets compose to a plain wire.
split = equality_gadget(2, 1, 2)   # one output, two inputs
merge = equality_gadget(2, 2, 1)
wire = compose(split, merge)
print("split o merge wire matrix:", signature_matrix(wire).data)

# Composition is matrix product, tensoring is the Kronecker product.
fset = random_cfset(rng, 2, 2)
g1 = random_bipartite_gadget(rng, fset, n_eq=2, n_constraints=2, n_outputs=1, n_inputs=1)
g2 = random_bipartite_gadget(rng, fset, n_eq=2, n_constraints=1, n_outputs=1, n_inputs=1)
t1, t2 = signature_matrix(g1), signature_matrix(g2)
assert signature_matrix(compose(g1, g2)) == t1.mul(t2)
assert signature_matrix(tensor(g1, g2)) == t1.kron(t2)
print("functoriality checked on random gadgets")

# A crossing rewires strands: its matrix swaps the two index digits.
print("crossing matrix:", signature_matrix(crossing_gadget(2, (1, 0))).data)

# Instances become bipartite grids; boundary pinnings of the grid tabulate
# the pinned partition values.
eq_set = CFSet((binary_from_rows([[1, 2], [0, 1]]),))
inst = LabeledInstance(("a", "b", "c"),
                       ((0, ("a", "b")), (0, ("b", "c"))),
                       ("a", "c"))
grid = csp_to_grid(inst, eq_set, 1)   # first label out, second label in
matrix = signature_matrix(grid)
for x in range(2):
    for y in range(2):
        assert matrix.data[x][y] == pinned_partition(eq_set, inst, (x, y))
print("grid boundary values match pinned partition values")

# Every bipartite gadget decomposes into the fundamental generators; the
# expression evaluates to the same signature matrix, exactly.
gadget = random_bipartite_gadget(rng, fset, n_eq=3, n_constraints=2, n_outputs=2, n_inputs=1)
expression = decompose(gadget, fset)
assert evaluate_expression(expression, 2, fset.functions) == signature_matrix(gadget)
print("generator decomposition reproduces the signature matrix:")
print(" ", expression)
