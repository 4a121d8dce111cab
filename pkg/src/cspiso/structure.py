"""Twins and contraction, domain-weighted isomorphism search, direct sums,
connectivity, and the universal-element augmentation.

``find_isomorphisms`` is deliberately plain brute force over the symmetric
group (with a cheap per-element invariant prune); it is the ground-truth
oracle the constructive machinery is checked against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (
    AlgebraError,
    ConstraintFunction,
    Scalar,
    all_tuples,
    permute_domain,
    scalar_sort_key,
    tuple_to_index,
)
from .instances import (
    CFSet,
    CompatibilityError,
    InstanceError,
    LabeledInstance,
    require_compatible,
)

Permutation = Tuple[int, ...]


class ContractionError(ValueError):
    """Raised when twin contraction produces a vanishing summed weight."""


# ---------------------------------------------------------------------------
# Configuration index J(F) and twins
# ---------------------------------------------------------------------------

def configuration_index(fset: CFSet):
    """All ``(j, x, r)`` with ``x`` filling every argument slot but one.

    For unary functions ``x`` is the empty tuple and ``r = 1`` (0-based 0).
    """
    out = []
    for j, fn in enumerate(fset.functions):
        for x in all_tuples(fset.q, fn.arity - 1):
            for r in range(fn.arity):
                out.append((j, x, r))
    return tuple(out)


def _slot_value(fn: ConstraintFunction, x: Tuple[int, ...], r: int, i: int) -> Scalar:
    args = x[:r] + (i,) + x[r:]
    return fn.entries[tuple_to_index(args, fn.q)]


@lru_cache(maxsize=None)
def element_fingerprints(fset: CFSet) -> Tuple[Tuple[Scalar, ...], ...]:
    """For each domain element, the tuple of all one-slot evaluations."""
    jc = configuration_index(fset)
    return tuple(
        tuple(_slot_value(fset.functions[j], x, r, i) for (j, x, r) in jc)
        for i in range(fset.q)
    )


def twin_classes(fset: CFSet) -> Tuple[Tuple[int, ...], ...]:
    """Partition of the domain into classes indistinguishable in every slot."""
    fingerprints = element_fingerprints(fset)
    groups: Dict[Tuple[Scalar, ...], List[int]] = {}
    for i, fp in enumerate(fingerprints):
        groups.setdefault(fp, []).append(i)
    classes = sorted(groups.values(), key=lambda cls: cls[0])
    return tuple(tuple(cls) for cls in classes)


@dataclass(frozen=True)
class TwinContraction:
    contracted: CFSet
    classes: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        mapping = [0] * sum(len(c) for c in self.classes)
        for label, cls in enumerate(self.classes):
            for i in cls:
                mapping[i] = label
        object.__setattr__(self, "class_of", tuple(mapping))


@lru_cache(maxsize=None)
def contract_twins(fset: CFSet) -> TwinContraction:
    """Merge twin classes; weights add up.  Raises :class:`ContractionError`
    if a merged weight vanishes (the contraction then carries no valid
    domain weight and callers must not proceed silently)."""
    classes = twin_classes(fset)
    s = len(classes)
    reps = [cls[0] for cls in classes]
    class_of = {}
    for label, cls in enumerate(classes):
        for i in cls:
            class_of[i] = label

    new_functions = []
    for fn in fset.functions:
        entries = []
        for ys in all_tuples(s, fn.arity):
            args = tuple(reps[y] for y in ys)
            entries.append(fn.entries[tuple_to_index(args, fn.q)])
        new_functions.append(ConstraintFunction(s, fn.arity, tuple(entries)))

    new_weights: Optional[Tuple[Scalar, ...]]
    if fset.weights is None and s == fset.q:
        new_weights = None
    else:
        sums = []
        for cls in classes:
            total: Scalar = 0
            for i in cls:
                total = total + fset.weight(i)
            if total == 0:
                raise ContractionError(
                    f"twin class {cls} has vanishing summed weight"
                )
            sums.append(total)
        new_weights = tuple(sums)

    return TwinContraction(CFSet(tuple(new_functions), new_weights), classes)


# ---------------------------------------------------------------------------
# Domain-weighted isomorphism
# ---------------------------------------------------------------------------

def is_isomorphism(sigma: Permutation, fset: CFSet, gset: CFSet) -> bool:
    """``F_j(x) == G_j(sigma(x))`` for all j, x, and matching weights."""
    require_compatible(fset, gset)
    if fset.q != gset.q:
        raise CompatibilityError("isomorphism needs a common domain size")
    q = fset.q
    if sorted(sigma) != list(range(q)):
        raise AlgebraError(f"{sigma} is not a permutation of range({q})")
    for i in range(q):
        if fset.weight(i) != gset.weight(sigma[i]):
            return False
    for fn, gn in zip(fset.functions, gset.functions):
        if fn != permute_domain(gn, tuple(sigma)):
            return False
    return True


@lru_cache(maxsize=None)
def _value_invariant(fset: CFSet, i: int):
    """Permutation-invariant data of element i: weight + per-(j, slot) value
    multisets.  Used only to prune the brute-force search."""
    inv = [scalar_sort_key(fset.weight(i))]
    for j, fn in enumerate(fset.functions):
        for r in range(fn.arity):
            values = sorted(
                scalar_sort_key(_slot_value(fn, x, r, i))
                for x in all_tuples(fset.q, fn.arity - 1)
            )
            inv.append(tuple(values))
    return tuple(inv)


_INVARIANT_IDS: Dict = {}


@lru_cache(maxsize=None)
def _invariant_profile(fset: CFSet):
    """Per-element invariants interned to small ints (comparison-heavy
    callers only ever need equality)."""
    per_element = []
    for i in range(fset.q):
        inv = _value_invariant(fset, i)
        per_element.append(_INVARIANT_IDS.setdefault(inv, len(_INVARIANT_IDS)))
    per_element = tuple(per_element)
    return per_element, tuple(sorted(per_element))


def find_isomorphisms(fset: CFSet, gset: CFSet) -> Tuple[Permutation, ...]:
    """All domain-weighted isomorphisms, in lexicographic order."""
    require_compatible(fset, gset)
    if fset.q != gset.q:
        raise CompatibilityError("isomorphism needs a common domain size")
    q = fset.q
    f_inv, f_sorted = _invariant_profile(fset)
    g_inv, g_sorted = _invariant_profile(gset)
    if f_sorted != g_sorted:
        return ()
    candidates = [
        tuple(ig for ig in range(q) if g_inv[ig] == f_inv[i]) for i in range(q)
    ]
    found = []
    f_functions = fset.functions
    g_functions = gset.functions
    for sigma in itertools.permutations(range(q)):
        if not all(sigma[i] in candidates[i] for i in range(q)):
            continue
        if all(
            fn == permute_domain(gn, sigma)
            for fn, gn in zip(f_functions, g_functions)
        ):
            found.append(sigma)
    return tuple(found)


def automorphisms(fset: CFSet) -> Tuple[Permutation, ...]:
    return find_isomorphisms(fset, fset)


# ---------------------------------------------------------------------------
# Direct sum and connectivity
# ---------------------------------------------------------------------------

def direct_sum(fn: ConstraintFunction, gn: ConstraintFunction) -> ConstraintFunction:
    """Block function on the disjoint union of the two domains; zero on
    mixed tuples.  Only defined for arity > 1."""
    if fn.arity != gn.arity:
        raise AlgebraError("direct sum needs equal arities")
    if fn.arity <= 1:
        raise AlgebraError("direct sum is undefined for unary functions")
    qf, qg = fn.q, gn.q
    q = qf + qg
    n = fn.arity
    entries = []
    for xs in all_tuples(q, n):
        if all(x < qf for x in xs):
            entries.append(fn.entries[tuple_to_index(xs, qf)])
        elif all(x >= qf for x in xs):
            entries.append(gn.entries[tuple_to_index(tuple(x - qf for x in xs), qg)])
        else:
            entries.append(0)
    return ConstraintFunction(q, n, tuple(entries))


def direct_sum_sets(fset: CFSet, gset: CFSet) -> CFSet:
    require_compatible(fset, gset)
    if fset.weights is not None or gset.weights is not None:
        raise InstanceError("direct sums are defined for unweighted sets")
    return CFSet(tuple(
        direct_sum(fn, gn) for fn, gn in zip(fset.functions, gset.functions)
    ))


def connected_components(fn: ConstraintFunction) -> Tuple[Tuple[int, ...], ...]:
    """Classes of the transitive closure of "appear together in a nonzero
    tuple".  Zero rows of the union-find stay singletons."""
    if fn.arity <= 1:
        raise AlgebraError("connectivity is defined for arity > 1")
    parent = list(range(fn.q))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for xs in all_tuples(fn.q, fn.arity):
        if fn.entries[tuple_to_index(xs, fn.q)] != 0:
            first = xs[0]
            for x in xs[1:]:
                union(first, x)
    groups: Dict[int, List[int]] = {}
    for i in range(fn.q):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(groups[r]) for r in sorted(groups))


def is_connected(fn: ConstraintFunction) -> bool:
    return len(connected_components(fn)) == 1


# ---------------------------------------------------------------------------
# Universal-element augmentation and instance restriction
# ---------------------------------------------------------------------------

def augment_universal(fset: CFSet) -> CFSet:
    """Append a universal element (index ``q``) to the domain.

    Functions of arity >= 2 take value 1 whenever any argument is the new
    element.  Unary functions are promoted to binary delta-style functions
    so the result stays direct-summable; every output function is connected.
    """
    if fset.weights is not None:
        raise InstanceError("universal augmentation applies to unweighted sets")
    q = fset.q
    new_q = q + 1
    out = []
    for fn in fset.functions:
        if fn.arity >= 2:
            entries = []
            for xs in all_tuples(new_q, fn.arity):
                if all(x < q for x in xs):
                    entries.append(fn.entries[tuple_to_index(xs, q)])
                else:
                    entries.append(1)
            out.append(ConstraintFunction(new_q, fn.arity, tuple(entries)))
        else:
            entries = []
            for (x, y) in all_tuples(new_q, 2):
                if x == q or y == q:
                    entries.append(1)
                elif x == y:
                    entries.append(fn.entries[x])
                else:
                    entries.append(0)
            out.append(ConstraintFunction(new_q, 2, tuple(entries)))
    return CFSet(tuple(out))


def restrict_instance(
    inst: LabeledInstance,
    removed: Sequence,
    target: CFSet,
) -> LabeledInstance:
    """Drop ``removed`` variables and every constraint touching them, then
    undo the universal augmentation: constraints whose target function is
    unary but whose tuple is binary merge their two variables.

    The result is an unlabeled instance over ``target``.
    """
    removed_set = set(removed)
    kept = [v for v in inst.variables if v not in removed_set]
    surviving = [
        (j, vs)
        for j, vs in inst.constraints
        if not any(v in removed_set for v in vs)
    ]

    parent = {v: v for v in kept}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    merged_constraints = []
    for j, vs in surviving:
        n_target = target.functions[j].arity
        if len(vs) == n_target:
            merged_constraints.append((j, vs))
        elif len(vs) == 2 and n_target == 1:
            ra, rb = find(vs[0]), find(vs[1])
            if ra != rb:
                parent[max(ra, rb, key=str)] = min(ra, rb, key=str)
            merged_constraints.append((j, (vs[0],)))
        else:
            raise InstanceError(
                f"constraint arity {len(vs)} does not match target arity {n_target}"
            )

    variables = tuple(sorted({find(v) for v in kept}, key=str))
    constraints = tuple((j, tuple(find(v) for v in vs)) for j, vs in merged_constraints)
    return LabeledInstance(variables, constraints, ())


def instance_connected(inst: LabeledInstance) -> bool:
    """Connectivity of the variable-constraint incidence graph."""
    if not inst.variables:
        return True
    parent = {v: v for v in inst.variables}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for _, vs in inst.constraints:
        for v in vs[1:]:
            ra, rb = find(vs[0]), find(v)
            if ra != rb:
                parent[ra] = rb
    roots = {find(v) for v in inst.variables}
    return len(roots) == 1
