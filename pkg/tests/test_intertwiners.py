import random

import pytest

from cspiso.algebra import (
    Matrix,
    all_tuples,
    binary_from_rows,
    constant_function,
    equality_function,
    flatten,
    gaussian,
    swap_function,
    unary_function,
)
from cspiso.instances import CFSet
from cspiso.partition import pinned_partition
from cspiso.structure import automorphisms
from cspiso.intertwiners import (
    IntertwinerError,
    PermutationGroup,
    WitnessSearchExhausted,
    all_subgroups,
    gadget_span,
    intertwiner_basis,
    is_intertwiner,
    orbits_of_tuples,
    same_orbit,
    same_orbit_via_intertwiners,
    witness_sigma,
)

S2 = PermutationGroup.symmetric(2)
S3 = PermutationGroup.symmetric(3)


def test_group_materialization():
    assert len(S3.elements()) == 6
    assert len(PermutationGroup.trivial(3).elements()) == 1


def test_all_subgroups_of_s3():
    groups = all_subgroups(3)
    assert sorted(len(g.elements()) for g in groups) == [1, 2, 2, 2, 3, 6]


def test_orbit_basis_dimensions():
    space = intertwiner_basis(S2, 2, 0)
    assert space.dimension == 2
    assert space.orbits == (((0, 0), (1, 1)), ((0, 1), (1, 0)))
    trivial = intertwiner_basis(PermutationGroup.trivial(2), 1, 1)
    assert trivial.dimension == 4


def test_orbit_basis_elements_are_intertwiners():
    for group in all_subgroups(3):
        for k in range(3):
            for l in range(3 - k):
                space = intertwiner_basis(group, k, l)
                assert all(is_intertwiner(m, group, k, l) for m in space.basis)
                assert space.dimension == len(orbits_of_tuples(group, k + l))


def test_closure_memberships():
    for group in all_subgroups(3):
        q = 3
        assert is_intertwiner(Matrix.identity(q), group, 1, 1)
        assert is_intertwiner(flatten(equality_function(q, 2), 2, 0), group, 2, 0)
        assert is_intertwiner(flatten(swap_function(q), 2, 2), group, 2, 2)
        all_ones = Matrix(tuple((1,) * q for _ in range(q)))
        assert is_intertwiner(all_ones, group, 1, 1)


def test_non_intertwiner_detected():
    probe = Matrix(((1, 0), (0, 2)))
    assert not is_intertwiner(probe, S2, 1, 1)
    assert is_intertwiner(probe, PermutationGroup.trivial(2), 1, 1)


def test_is_intertwiner_matches_matrix_definition():
    # spot-check the index characterization against explicit permutation
    # matrices
    rng = random.Random(71)
    q = 3
    for _ in range(10):
        data = tuple(tuple(rng.randint(-2, 2) for _ in range(q)) for _ in range(q * q))
        mat = Matrix(data)
        for sigma in S3.generators:
            p = Matrix(tuple(
                tuple(1 if row == sigma[col] else 0 for col in range(q))
                for row in range(q)
            ))
            lhs = p.kron(p).mul(mat)
            rhs = mat.mul(p)
            assert (lhs == rhs) == is_intertwiner_one(mat, sigma, q)


def is_intertwiner_one(mat, sigma, q):
    for xs in all_tuples(q, 2):
        for (y,) in all_tuples(q, 1):
            r1 = xs[0] * q + xs[1]
            r2 = sigma[xs[0]] * q + sigma[xs[1]]
            if mat.data[r1][y] != mat.data[r2][sigma[y]]:
                return False
    return True


def test_same_orbit_agreement_over_all_subgroups():
    for group in all_subgroups(3):
        for k in (1, 2, 3):
            space = intertwiner_basis(group, k, 0)
            for xs in all_tuples(3, k):
                for ys in all_tuples(3, k):
                    assert same_orbit(xs, ys, group) == same_orbit_via_intertwiners(
                        xs, ys, space
                    )


def test_distinct_subgroups_have_distinct_orbit_families():
    # the duality sanity check: a subgroup is pinned down by its orbit
    # partitions on small tuple powers
    families = []
    for group in all_subgroups(3):
        families.append(tuple(orbits_of_tuples(group, k) for k in (1, 2, 3)))
    assert len(set(families)) == len(families)


def test_gadget_span_contained_in_intertwiner_space():
    rng = random.Random(72)
    from cspiso.corpus import random_cfset

    for _ in range(8):
        fset = random_cfset(rng, 2, rng.randint(1, 2), max_arity=2)
        group = PermutationGroup.from_elements(2, automorphisms(fset))
        for (k, l) in ((1, 0), (1, 1)):
            result = gadget_span(fset, k, l, size_bound=4, aut_group=group)
            assert all(is_intertwiner(m, group, k, l) for m in result.basis)
            assert result.dimension <= result.orbit_dimension
            # dimensions never decrease with the bound
            dims = result.dimension_by_size
            assert all(a <= b for a, b in zip(dims, dims[1:]))


def test_gadget_span_saturates_for_swap_symmetric_function():
    fset = CFSet((binary_from_rows([[0, 1], [1, 0]]),))
    group = PermutationGroup.from_elements(2, automorphisms(fset))
    assert len(group.elements()) == 2
    for (k, l) in ((1, 0), (1, 1), (2, 0)):
        result = gadget_span(fset, k, l, size_bound=6, aut_group=group)
        assert result.certified_equal, (k, l, result.dimension_by_size)
        assert result.saturated_by == "orbit-dimension"


def test_gadget_span_requires_conjugate_closure():
    complex_fn = unary_function((gaussian(0, 1), 1))
    with pytest.raises(IntertwinerError):
        gadget_span(CFSet((complex_fn,)), 1, 0, size_bound=2)
    closed = CFSet((unary_function((gaussian(0, 1), 1)), unary_function((gaussian(0, -1), 1))))
    gadget_span(closed, 1, 0, size_bound=2)  # no error


def test_witness_sigma_identity_and_swap():
    fset = CFSet((binary_from_rows([[0, 1], [1, 0]]),))
    result = witness_sigma(fset, (0,), (0,))
    assert result.sigma == (0, 1)
    result = witness_sigma(fset, (0,), (1,))
    assert result.sigma == (1, 0)


def test_witness_sigma_produces_distinguishing_instance():
    fset = CFSet((binary_from_rows([[1, 0], [0, 2]]),))
    result = witness_sigma(fset, (0,), (1,))
    assert result.sigma is None
    assert result.z_phi != result.z_psi
    assert pinned_partition(fset, result.witness, (0,)) == result.z_phi
    assert pinned_partition(fset, result.witness, (1,)) == result.z_psi


def test_witness_sigma_agrees_with_group_search():
    rng = random.Random(73)
    from cspiso.corpus import random_cfset

    for _ in range(10):
        fset = random_cfset(rng, 2, rng.randint(1, 2))
        auts = automorphisms(fset)
        for k in (1, 2):
            for phi in all_tuples(2, k):
                for psi in all_tuples(2, k):
                    expected = any(
                        tuple(s[x] for x in phi) == psi for s in auts
                    )
                    try:
                        result = witness_sigma(fset, phi, psi)
                    except WitnessSearchExhausted:
                        # twins can make pin maps orbit-distinct yet
                        # indistinguishable by single-labeled instances
                        assert not expected
                        continue
                    assert (result.sigma is not None) == expected


def test_witness_sigma_exhaustion_on_all_twins():
    # every element is a twin: the orbit test fails but no single-labeling
    # witness can exist, and the bounded search reports that honestly
    allones = CFSet((constant_function(2, 2),))
    with pytest.raises(WitnessSearchExhausted):
        witness_sigma(allones, (0, 0), (0, 1), instance_bound=120)
