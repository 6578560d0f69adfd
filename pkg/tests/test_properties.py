import math

import numpy as np
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from entdist.correlations import LOWER, UPPER, BoundReport, OptimizerOpts, discord
from entdist.infotheory import conditional_entropy, mutual_information, relative_entropy, von_neumann_entropy
from entdist.protocol import Bracket, make_record
from entdist.qstate import CutSpec, DensityMatrix, partial_trace, partial_transpose, permute_subsystems
from entdist.sampling import random_mixed, random_pure, random_separable
from entdist.separability import ppt_check, schmidt

SETTINGS = settings(derandomize=True, deadline=None, max_examples=40)
seeds = st.integers(0, 2 ** 32 - 1)
CUTS = [CutSpec({"A"}, {"B", "C"}), CutSpec({"B"}, {"A", "C"}), CutSpec({"A", "B"}, {"C"})]


def mixed(seed, rank=None):
    return random_mixed(np.random.default_rng(seed), rank=rank)


@SETTINGS
@given(seeds, st.integers(1, 8))
def test_entropy_range(seed, rank):
    s = von_neumann_entropy(mixed(seed, rank))
    assert -1e-12 <= s <= math.log2(rank) + 1e-9


@SETTINGS
@given(seeds)
def test_strong_subadditivity(seed):
    rho = mixed(seed)
    # I(A : BC) >= I(A : B)
    i_abc = mutual_information(rho, CutSpec({"A"}, {"B", "C"}))
    i_ab = mutual_information(partial_trace(rho, {"A", "B"}), CutSpec({"A"}, {"B"}))
    assert i_abc >= i_ab - 1e-9


@SETTINGS
@given(seeds, st.sampled_from(CUTS))
def test_partial_transpose_preserves_trace_and_hermiticity(seed, cut):
    rho = mixed(seed)
    pt = partial_transpose(rho, cut.left)
    assert_allclose(np.trace(pt), 1.0, atol=1e-12)
    assert_allclose(pt, pt.conj().T, atol=1e-12)


@SETTINGS
@given(seeds)
def test_separable_states_are_ppt(seed):
    ens = random_separable(np.random.default_rng(seed), (2,), (2, 2), ("A",), ("B", "C"))
    rho = ens.assemble(("A", "B", "C"))
    for cut in CUTS:
        assert ppt_check(rho, cut).min_eigenvalue >= -1e-10


@SETTINGS
@given(seeds, st.sampled_from(CUTS))
def test_pure_state_marginal_entropies_agree(seed, cut):
    psi = random_pure(np.random.default_rng(seed))
    rho = psi.projector()
    s_l = von_neumann_entropy(partial_trace(rho, cut.left))
    s_r = von_neumann_entropy(partial_trace(rho, cut.right))
    assert_allclose(s_l, s_r, atol=1e-9)
    c = schmidt(psi, cut).coefficients
    assert_allclose(np.sum(c ** 2), 1.0, atol=1e-12)
    p = c[c > 1e-12] ** 2
    assert_allclose(-np.sum(p * np.log2(p)), s_l, atol=1e-9)


@SETTINGS
@given(seeds, seeds)
def test_relative_entropy_nonnegative_and_monotone(s1, s2):
    a, b = mixed(s1), mixed(s2)
    d = relative_entropy(a, b)
    d_ab = relative_entropy(partial_trace(a, {"A", "B"}), partial_trace(b, {"A", "B"}))
    assert d >= -1e-12
    assert d_ab <= d + 1e-9


@SETTINGS
@given(seeds, st.permutations(["A", "B", "C"]))
def test_mutual_information_permutation_invariant(seed, order):
    rho = mixed(seed)
    cut = CutSpec({"A"}, {"B", "C"})
    assert_allclose(mutual_information(permute_subsystems(rho, order), cut),
                    mutual_information(rho, cut), atol=1e-10)


@settings(derandomize=True, deadline=None, max_examples=10)
@given(seeds)
def test_discord_between_zero_and_mutual_information(seed):
    rho = random_mixed(np.random.default_rng(seed), (2, 2), ("A", "B"))
    d = discord(rho, "B", OptimizerOpts(grid=8)).value
    assert -1e-12 <= d <= mutual_information(rho, CutSpec({"A"}, {"B"})) + 1e-9
    # bounded by the conditional entropy gap S(A|B) + log2 d_B
    assert d <= conditional_entropy(rho, {"A"}, {"B"}) + 1.0 + 1e-9


values = st.floats(-10, 10, allow_nan=False)


@SETTINGS
@given(values, values, values, values)
def test_bracket_difference_contains_true_value(u1, w1, u2, w2):
    lo1, hi1 = sorted((u1, w1))
    lo2, hi2 = sorted((u2, w2))
    a = Bracket(BoundReport(hi1, UPPER), BoundReport(lo1, LOWER))
    b = Bracket(BoundReport(hi2, UPPER), BoundReport(lo2, LOWER))
    for x in (lo1, hi1, 0.5 * (lo1 + hi1)):
        for y in (lo2, hi2):
            d = a - b
            assert d.lower.value - 1e-12 <= x - y <= d.upper.value + 1e-12
            ab = d.absolute()
            assert ab.lower.value - 1e-12 <= abs(x - y) <= ab.upper.value + 1e-12


@SETTINGS
@given(values, values, st.sampled_from(["le", "gt"]))
def test_certified_records_are_true_for_all_consistent_values(x, y, rel):
    # a certified claim on bounds must hold for the exact values inside them
    lhs = Bracket(BoundReport(x + 1, UPPER), BoundReport(x - 1, LOWER))
    rhs = Bracket(BoundReport(y + 1, UPPER), BoundReport(y - 1, LOWER))
    rec = make_record("p", lhs, rhs, rel, tol=0.0)
    if rec.status == "certified":
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                assert (x + dx <= y + dy) if rel == "le" else (x + dx > y + dy)


@SETTINGS
@given(seeds)
def test_json_round_trip(seed):
    rho = mixed(seed)
    back = DensityMatrix.from_json(rho.to_json())
    assert_allclose(back.data, rho.data, atol=1e-15)
    assert back.labels == rho.labels
