import numpy as np
import pytest

from failsafekit import Preorder, ValidationError, classify, holds


# ---------------------------------------------------------------- oracle
def brute_holds(kind, a, b):
    """Direct re-evaluation of the prefix-inequality definitions."""
    sa, sb = sorted(a), sorted(b)
    n = len(sa)
    if kind == "majorize":
        for i in range(1, n):
            if sum(sa[:i]) > sum(sb[:i]) + 1e-12:
                return False
        return abs(sum(sa) - sum(sb)) <= 1e-12
    if kind == "weak_super":
        return all(sum(sa[:i]) <= sum(sb[:i]) + 1e-12 for i in range(1, n + 1))
    if kind == "weak_sub":
        return all(sum(sa[:i]) >= sum(sb[:i]) - 1e-12 for i in range(1, n + 1))
    if kind == "p_larger":
        prod = lambda xs: float(np.prod(xs))
        return all(prod(sa[:i]) <= prod(sb[:i]) + 1e-12 for i in range(1, n + 1))
    if kind == "reciprocal_majorize":
        rec = lambda xs: sum(1.0 / x for x in xs)
        return all(rec(sa[:i]) >= rec(sb[:i]) - 1e-12 for i in range(1, n + 1))
    raise AssertionError(kind)


# ------------------------------------------------------------- examples
def test_p_larger_first_demo_vectors():
    a = (0.12, 0.28, 0.51, 0.62, 0.73)
    b = (0.21, 0.42, 0.73, 0.89, 0.92)
    assert holds(Preorder.P_LARGER, a, b)
    assert not holds(Preorder.P_LARGER, b, a)


def test_p_larger_second_demo_vectors():
    a = (0.13, 0.31, 0.49, 0.61, 0.72)
    b = (0.22, 0.41, 0.71, 0.88, 0.92)
    rep = classify(a, b)
    assert rep.forward[Preorder.P_LARGER] is True


@pytest.mark.parametrize("kind", list(Preorder))
def test_reflexive(kind):
    v = (0.5, 1.5, 2.5)
    assert holds(kind, v, v)


def test_majorize_simple():
    assert holds(Preorder.MAJORIZE, (1.0, 3.0), (2.0, 2.0))
    assert not holds(Preorder.MAJORIZE, (2.0, 2.0), (1.0, 3.0))
    # unequal totals fail majorization but not weak super-majorization
    assert not holds(Preorder.MAJORIZE, (1.0, 2.0), (2.0, 2.0))
    assert holds(Preorder.WEAK_SUPER, (1.0, 2.0), (2.0, 2.0))


def test_reciprocal_majorize_simple():
    assert holds(Preorder.RECIPROCAL_MAJORIZE, (1.0, 4.0), (2.0, 2.0))
    assert not holds(Preorder.RECIPROCAL_MAJORIZE, (2.0, 2.0), (1.0, 4.0))


def test_permutation_invariance():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = rng.integers(2, 7)
        a = rng.uniform(0.1, 5.0, n)
        b = rng.uniform(0.1, 5.0, n)
        for kind in Preorder:
            expected = holds(kind, a, b)
            assert holds(kind, rng.permutation(a), rng.permutation(b)) == expected


def test_classify_matches_brute_force():
    rng = np.random.default_rng(5150)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        a = rng.uniform(0.05, 4.0, n)
        b = rng.uniform(0.05, 4.0, n)
        rep = classify(a, b)
        for kind in Preorder:
            assert rep.forward[kind] == brute_holds(kind.value, a, b), (kind, a, b)
            assert rep.reverse[kind] == brute_holds(kind.value, b, a), (kind, a, b)


def test_classify_equal_vectors_all_true():
    v = (0.4, 1.1, 2.2)
    rep = classify(v, v)
    for kind in Preorder:
        assert rep.forward[kind] is True
        assert rep.reverse[kind] is True
    assert rep.skipped == ()


def test_classify_skips_positive_only_relations():
    rep = classify((-1.0, 2.0), (0.5, 0.5))
    assert rep.forward[Preorder.P_LARGER] is None
    assert rep.forward[Preorder.RECIPROCAL_MAJORIZE] is None
    assert set(rep.skipped) == {"p_larger", "reciprocal_majorize"}
    assert rep.forward[Preorder.MAJORIZE] is not None


# ------------------------------------------------- implication chain
def majorizing_pair(rng, n):
    """b is an average of permutations of a, so a majorizes b."""
    a = rng.uniform(0.1, 5.0, n)
    weights = rng.dirichlet(np.ones(4))
    b = np.zeros(n)
    for w in weights:
        b += w * rng.permutation(a)
    return a, b


def test_chain_on_constructed_pairs():
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(2000):
        n = int(rng.integers(2, 7))
        a, b = majorizing_pair(rng, n)
        assert holds(Preorder.MAJORIZE, a, b)
        assert holds(Preorder.WEAK_SUPER, a, b)
        assert holds(Preorder.P_LARGER, a, b)
        assert holds(Preorder.RECIPROCAL_MAJORIZE, a, b)
        # shrinking entries of a preserves weak super-majorization
        a2 = a * rng.uniform(0.5, 1.0, n)
        assert holds(Preorder.WEAK_SUPER, a2, b)
        assert holds(Preorder.P_LARGER, a2, b)
        assert holds(Preorder.RECIPROCAL_MAJORIZE, a2, b)
        checked += 1
    assert checked == 2000


def test_chain_on_random_pairs():
    # conditional form: wherever a premise happens to hold, the rest follow
    rng = np.random.default_rng(4242)
    premises = 0
    for _ in range(3000):
        n = int(rng.integers(2, 6))
        a = rng.uniform(0.1, 3.0, n)
        b = rng.uniform(0.1, 3.0, n)
        if holds(Preorder.WEAK_SUPER, a, b):
            premises += 1
            assert holds(Preorder.P_LARGER, a, b)
            assert holds(Preorder.RECIPROCAL_MAJORIZE, a, b)
        if holds(Preorder.P_LARGER, a, b):
            assert holds(Preorder.RECIPROCAL_MAJORIZE, a, b)
    assert premises > 100  # the conditional test is not vacuous


def test_p_larger_equals_weak_super_of_logs():
    rng = np.random.default_rng(77)
    for _ in range(2000):
        n = int(rng.integers(2, 7))
        a = rng.uniform(0.1, 5.0, n)
        b = rng.uniform(0.1, 5.0, n)
        assert holds(Preorder.P_LARGER, a, b) == holds(
            Preorder.WEAK_SUPER, np.log(a), np.log(b)
        )


def mix(rng, v):
    weights = rng.dirichlet(np.ones(3))
    out = np.zeros_like(v)
    for w in weights:
        out += w * rng.permutation(v)
    return out


def chain_triple(kind, rng, n):
    """(a, b, c) with kind(a, b) and kind(b, c) true by construction."""
    a = rng.uniform(0.2, 3.0, n)
    if kind is Preorder.MAJORIZE:
        b = mix(rng, a)
        c = mix(rng, b)
    elif kind in (Preorder.WEAK_SUPER, Preorder.WEAK_SUB):
        b = mix(rng, a) * rng.uniform(1.0, 1.3)
        c = mix(rng, b) * rng.uniform(1.0, 1.3)
        if kind is Preorder.WEAK_SUB:
            a, c = c, a  # weak_sub(x, y) == weak_super(y, x)
    else:  # p-larger and reciprocal majorization via weak-super of logs
        b = np.exp(mix(rng, np.log(a)) + rng.uniform(0.0, 0.3))
        c = np.exp(mix(rng, np.log(b)) + rng.uniform(0.0, 0.3))
    return a, b, c


def test_transitivity_on_constructed_triples():
    rng = np.random.default_rng(314)
    for kind in Preorder:
        for _ in range(500):
            n = int(rng.integers(2, 6))
            a, b, c = chain_triple(kind, rng, n)
            assert holds(kind, a, b, tol=1e-9), (kind, a, b)
            assert holds(kind, b, c, tol=1e-9), (kind, b, c)
            assert holds(kind, a, c, tol=1e-8), (kind, a, b, c)


# ---------------------------------------------------------------- errors
def test_length_mismatch_rejected():
    with pytest.raises(ValidationError):
        holds(Preorder.MAJORIZE, (1.0, 2.0), (1.0, 2.0, 3.0))


def test_nan_rejected():
    with pytest.raises(ValidationError):
        holds(Preorder.WEAK_SUB, (1.0, np.nan), (1.0, 2.0))


@pytest.mark.parametrize("kind", [Preorder.P_LARGER, Preorder.RECIPROCAL_MAJORIZE])
def test_nonpositive_rejected_for_positive_relations(kind):
    with pytest.raises(ValidationError):
        holds(kind, (0.0, 1.0), (1.0, 1.0))


def test_negative_tol_rejected():
    with pytest.raises(ValidationError):
        holds(Preorder.MAJORIZE, (1.0,), (1.0,), tol=-1e-3)


def test_report_json_shape():
    rep = classify((1.0, 3.0), (2.0, 2.0))
    blob = rep.to_json()
    assert set(blob["relations"]) == {k.value for k in Preorder}
    assert blob["relations"]["majorize"]["a_over_b"] is True
    assert blob["ascending_a"] == [1.0, 3.0]
