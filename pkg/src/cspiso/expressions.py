"""Gadget expressions over the fundamental generators and the decomposition
of an arbitrary bipartite gadget into them.

An expression is a tree over the leaves ``E10`` (one-output equality),
``E12`` (one-to-two equality), ``S`` (elementary crossing), ``F(j)``
(the j-th constraint function, all outputs) and the empty gadget ``UNIT``,
combined by composition, tensoring and adjoints.  Evaluation computes flat
matrices bottom-up; no grid is ever materialized.

``decompose`` proves constructively that every bipartite gadget with its
dangling edges on equality vertices is generated: tensor the equality
blocks, then wire in one constraint vertex per stage through an explicit
permutation layer, then fix the outer port orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (
    ConstraintFunction,
    Matrix,
    equality_function,
    flatten,
)
from .holant import Gadget, GadgetError, _EqualitySignature
from .instances import CFSet


class Expr:
    """Marker base class for gadget expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class Leaf(Expr):
    kind: str          # "E10" | "E12" | "S" | "F" | "UNIT"
    index: int = -1    # function index for kind == "F"

    def __repr__(self):
        return f"F[{self.index}]" if self.kind == "F" else self.kind


@dataclass(frozen=True)
class ComposeExpr(Expr):
    left: Expr
    right: Expr

    def __repr__(self):
        return f"({self.left!r} o {self.right!r})"


@dataclass(frozen=True)
class TensorExpr(Expr):
    left: Expr
    right: Expr

    def __repr__(self):
        return f"({self.left!r} (x) {self.right!r})"


@dataclass(frozen=True)
class AdjointExpr(Expr):
    child: Expr

    def __repr__(self):
        return f"{self.child!r}*"


E10 = Leaf("E10")
E12 = Leaf("E12")
S = Leaf("S")
UNIT = Leaf("UNIT")
E21 = AdjointExpr(E12)
E01 = AdjointExpr(E10)
IDENTITY = ComposeExpr(E12, E21)


def f_leaf(j: int) -> Leaf:
    return Leaf("F", j)


def shape(expr: Expr, functions: Sequence[ConstraintFunction]) -> Tuple[int, int]:
    """(outputs, inputs) of the expression; raises on arity clashes."""
    if isinstance(expr, Leaf):
        if expr.kind == "E10":
            return (1, 0)
        if expr.kind == "E12":
            return (1, 2)
        if expr.kind == "S":
            return (2, 2)
        if expr.kind == "UNIT":
            return (0, 0)
        if expr.kind == "F":
            return (functions[expr.index].arity, 0)
        raise GadgetError(f"unknown leaf {expr.kind}")
    if isinstance(expr, AdjointExpr):
        k, l = shape(expr.child, functions)
        return (l, k)
    if isinstance(expr, TensorExpr):
        k1, l1 = shape(expr.left, functions)
        k2, l2 = shape(expr.right, functions)
        return (k1 + k2, l1 + l2)
    if isinstance(expr, ComposeExpr):
        k1, l1 = shape(expr.left, functions)
        k2, l2 = shape(expr.right, functions)
        if l1 != k2:
            raise GadgetError(f"compose mismatch: {l1} inputs against {k2} outputs")
        return (k1, l2)
    raise GadgetError(f"not an expression: {expr!r}")


def _swap_matrix(q: int) -> Matrix:
    data = [[0] * (q * q) for _ in range(q * q)]
    for x1 in range(q):
        for x2 in range(q):
            data[x1 * q + x2][x2 * q + x1] = 1
    return Matrix(tuple(tuple(r) for r in data))


def evaluate_expression(
    expr: Expr,
    q: int,
    functions: Sequence[ConstraintFunction],
    _cache: Optional[Dict] = None,
) -> Matrix:
    """Bottom-up flat-matrix value of the expression."""
    cache = {} if _cache is None else _cache
    key = expr
    if key in cache:
        return cache[key]
    if isinstance(expr, Leaf):
        if expr.kind == "E10":
            value = flatten(equality_function(q, 1), 1, 0)
        elif expr.kind == "E12":
            value = flatten(equality_function(q, 3), 1, 2)
        elif expr.kind == "S":
            value = _swap_matrix(q)
        elif expr.kind == "UNIT":
            value = Matrix(((1,),))
        elif expr.kind == "F":
            fn = functions[expr.index]
            value = flatten(fn, fn.arity, 0)
        else:
            raise GadgetError(f"unknown leaf {expr.kind}")
    elif isinstance(expr, AdjointExpr):
        value = evaluate_expression(expr.child, q, functions, cache).conjugate_transpose()
    elif isinstance(expr, TensorExpr):
        value = evaluate_expression(expr.left, q, functions, cache).kron(
            evaluate_expression(expr.right, q, functions, cache)
        )
    elif isinstance(expr, ComposeExpr):
        value = evaluate_expression(expr.left, q, functions, cache).mul(
            evaluate_expression(expr.right, q, functions, cache)
        )
    else:
        raise GadgetError(f"not an expression: {expr!r}")
    cache[key] = value
    return value


def compose_chain(parts: Sequence[Expr]) -> Expr:
    if not parts:
        raise GadgetError("empty composition")
    out = parts[0]
    for part in parts[1:]:
        out = ComposeExpr(out, part)
    return out


def tensor_chain(parts: Sequence[Expr]) -> Expr:
    out = UNIT
    for part in parts:
        if part is UNIT:
            continue
        out = part if out is UNIT else TensorExpr(out, part)
    return out


def identity_stack(n: int) -> Expr:
    return tensor_chain([IDENTITY] * n)


# ---------------------------------------------------------------------------
# Equality family and permutations from the generators
# ---------------------------------------------------------------------------

def _fanout(m: int) -> Expr:
    """(m, 1) equality from E21 layers; m >= 1."""
    if m == 1:
        return IDENTITY
    expr = E21
    for i in range(1, m - 1):
        expr = ComposeExpr(TensorExpr(E21, identity_stack(i)), expr)
    return expr


def _fanin(d: int) -> Expr:
    """(1, d) equality from E12 layers; d >= 1."""
    if d == 1:
        return IDENTITY
    expr = E12
    for i in range(1, d - 1):
        expr = ComposeExpr(expr, TensorExpr(E12, identity_stack(i)))
    return expr


def equality_expression(m: int, d: int) -> Expr:
    """An expression over {E10, E12} (and adjoints) evaluating to E^{m,d}."""
    if m < 0 or d < 0:
        raise GadgetError("negative equality shape")
    if m == 0 and d == 0:
        return ComposeExpr(E01, E10)
    if m == 0:
        return ComposeExpr(E01, _fanin(d))
    if d == 0:
        return ComposeExpr(_fanout(m), E10)
    return ComposeExpr(_fanout(m), _fanin(d))


def _adjacent_swaps(sigma: Sequence[int]) -> List[int]:
    """Bubble-sort swap positions; composing the elementary layers in this
    order reproduces the permutation."""
    arr = list(sigma)
    swaps = []
    changed = True
    while changed:
        changed = False
        for j in range(len(arr) - 1):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                swaps.append(j)
                changed = True
    return swaps


def permutation_expression(sigma: Sequence[int]) -> Expr:
    """Expression over {IDENTITY, S} whose value sends input tuple ``y`` to
    output tuple ``x`` with ``x_i = y_{sigma(i)}`` (strand rewiring)."""
    k = len(sigma)
    if sorted(sigma) != list(range(k)):
        raise GadgetError(f"{sigma} is not a permutation")
    if k == 0:
        return UNIT
    swaps = _adjacent_swaps(sigma)
    if not swaps:
        return identity_stack(k)
    layers = [
        tensor_chain([identity_stack(a), S, identity_stack(k - a - 2)])
        for a in swaps
    ]
    return compose_chain(layers)


# ---------------------------------------------------------------------------
# Generator decomposition of bipartite gadgets
# ---------------------------------------------------------------------------

def decompose(g: Gadget, fset: CFSet) -> Expr:
    """Express a gadget (bipartite over ``fset``, dangling edges on equality
    vertices) through the fundamental generators; the expression's value
    equals the gadget's signature matrix exactly.

    Staging mirrors the constructive proof: a tensor of per-equality-vertex
    blocks exposes one stub per internal edge; each constraint vertex is
    then absorbed by a permutation layer routing its stubs onto a function
    leaf; two outer permutation layers restore the original port orders.
    """
    if not g.is_bipartite_over(fset):
        raise GadgetError("gadget is not a bipartite grid over the function set")

    eq_vertices = [v for v, s in enumerate(g.signatures) if isinstance(s, _EqualitySignature)]
    fn_vertices = [v for v, s in enumerate(g.signatures) if not isinstance(s, _EqualitySignature)]
    fn_index = {}
    for v in fn_vertices:
        fn_index[v] = fset.functions.index(g.signatures[v])

    # Stubs: for each internal edge, the (constraint vertex, argument slot)
    # it feeds, keyed by its equality endpoint.
    out_ports = {port: i for i, port in enumerate(g.outputs)}
    in_ports = {port: i for i, port in enumerate(g.inputs)}
    stubs_at: Dict[int, List[Tuple[int, int]]] = {v: [] for v in eq_vertices}
    for (a, b) in g.edges:
        eq_end, fn_end = (a, b) if isinstance(g.signatures[a[0]], _EqualitySignature) else (b, a)
        stubs_at[eq_end[0]].append((fn_end[0], fn_end[1]))
    for v in stubs_at:
        stubs_at[v].sort()

    # Stage 0: tensor one equality block per equality vertex.
    blocks = []
    out_slots: List[int] = []      # original output index carried by each stage-0 output
    in_slots: List[Tuple] = []     # tag of each stage-0 stored input slot
    for v in eq_vertices:
        v_outputs = sorted(
            (out_ports[p] for p in out_ports if p[0] == v)
        )
        v_inputs = sorted(
            (in_ports[p] for p in in_ports if p[0] == v)
        )
        stubs = stubs_at[v]
        blocks.append(equality_expression(len(v_outputs), len(stubs) + len(v_inputs)))
        out_slots.extend(v_outputs)
        in_slots.extend(("stub", c, pos) for (c, pos) in stubs)
        in_slots.extend(("orig", i) for i in v_inputs)
    expr = tensor_chain(blocks) if blocks else UNIT

    # Stages 1..s: absorb each constraint vertex.
    for c in fn_vertices:
        arity = fset.functions[fn_index[c]].arity
        m = len(in_slots)
        pi = [0] * m
        rest_rank = 0
        new_slots = []
        for slot_idx, tag in enumerate(in_slots):
            if tag[0] == "stub" and tag[1] == c:
                pi[slot_idx] = tag[2]
            else:
                pi[slot_idx] = arity + rest_rank
                rest_rank += 1
                new_slots.append(tag)
        layer = ComposeExpr(
            permutation_expression(tuple(pi)),
            tensor_chain([f_leaf(fn_index[c]), identity_stack(m - arity)]),
        )
        expr = ComposeExpr(expr, layer)
        in_slots = new_slots

    # Outer permutations: restore the gadget's own port orders.
    k = len(out_slots)
    tau = [0] * k
    for pos, orig in enumerate(out_slots):
        tau[orig] = pos
    assert all(tag[0] == "orig" for tag in in_slots)
    upsilon = [tag[1] for tag in in_slots]
    expr = ComposeExpr(permutation_expression(tuple(tau)), expr)
    expr = ComposeExpr(expr, permutation_expression(tuple(upsilon)))
    return expr
