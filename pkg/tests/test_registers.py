"""Register updates: products, abstractions, and the transducer runners."""
import functools
import random

import pytest

from listfn.registers import (
    Lit,
    Reg,
    UpdateError,
    abstraction,
    abstraction_name,
    apply_update,
    apply_update_sequence,
    empty_valuation,
    enumerate_abstractions,
    fot_pipeline_eval,
    homogeneous_product,
    identity_update,
    is_monotone,
    is_nonduplicating,
    normalise,
    output_first,
    parse_update,
    product_list_updates,
    random_abstraction,
    random_update,
    random_update_like,
    render_update,
    run_sst_naive,
    run_sst_structured,
    t_k_monoid,
    update_product,
)
from listfn.samples import SAMPLE_SSTS, SAMPLE_UPDATE_RATIONALS


def random_valuation(k, rng, letters="ab"):
    return tuple(
        tuple(rng.choice(letters) for _ in range(rng.randrange(0, 6)))
        for _ in range(k))


def fold_product(etas):
    return normalise(functools.reduce(update_product, etas))


def test_identity_update_is_neutral():
    rng = random.Random(1)
    for k in (1, 2, 3):
        for _ in range(50):
            e = random_update(k, rng)
            assert update_product(identity_update(k), e) == normalise(e)
            assert update_product(e, identity_update(k)) == normalise(e)


def test_action_compatibility():
    rng = random.Random(2)
    for _ in range(400):
        k = rng.randrange(1, 5)
        e1, e2 = random_update(k, rng), random_update(k, rng)
        v = random_valuation(k, rng)
        assert apply_update(apply_update(v, e1), e2) == \
            apply_update(v, update_product(e1, e2))


def test_abstraction_is_a_homomorphism():
    rng = random.Random(3)
    for _ in range(400):
        k = rng.randrange(1, 5)
        e1, e2 = random_update(k, rng), random_update(k, rng)
        lhs = abstraction(update_product(e1, e2))
        rhs = normalise(update_product(abstraction(e1), abstraction(e2)))
        assert lhs == abstraction(rhs)


def test_abstractions_are_nonduplicating_and_named():
    rng = random.Random(4)
    for _ in range(100):
        k = rng.randrange(1, 5)
        tau = random_abstraction(k, rng)
        assert is_nonduplicating(tau)
        assert isinstance(abstraction_name(tau), str)
    assert is_monotone(((Reg(1),), (Reg(2),)))
    assert not is_monotone(((Reg(2),), (Reg(1),)))
    assert not is_nonduplicating(((Reg(1), Reg(1)), ()))


def test_update_monoid_sizes():
    for k, size in ((1, 2), (2, 8), (3, 38)):
        monoid, reps = t_k_monoid(k)
        assert len(monoid.elements) == size
        assert len(reps) == size
        assert len(list(enumerate_abstractions(k))) == size


def test_t_k_multiplication_agrees_with_update_product():
    monoid, reps = t_k_monoid(2)
    for x in monoid.elements:
        for y in monoid.elements:
            composed = normalise(update_product(reps[x], reps[y]))
            assert reps[monoid.mult(x, y)] == abstraction(composed)


def test_homogeneous_product_matches_fold():
    rng = random.Random(5)
    for _ in range(150):
        k = rng.randrange(1, 4)
        tau = random_abstraction(k, rng)
        etas = [random_update_like(tau, rng)
                for _ in range(rng.randrange(1, 40))]
        assert homogeneous_product(etas, tau=tau) == fold_product(etas)


def test_product_list_updates_matches_fold():
    rng = random.Random(6)
    for _ in range(150):
        k = rng.randrange(1, 4)
        etas = [random_update(k, rng) for _ in range(rng.randrange(1, 40))]
        assert product_list_updates(etas, k=k) == fold_product(etas)


def test_update_text_round_trip():
    rng = random.Random(7)
    for _ in range(100):
        k = rng.randrange(1, 4)
        e = random_update(k, rng)
        assert parse_update(render_update(e)) == e
    e = parse_update('1 := ["ab", $2]; 2 := []')
    assert e == ((Lit(("a", "b")), Reg(2)), ())
    with pytest.raises(UpdateError):
        parse_update('1 := [$3]')  # register index beyond the update arity
    with pytest.raises(UpdateError):
        parse_update('1 := []; 1 := []')


def test_apply_update_reads_before_writing():
    swap = parse_update('1 := [$2, "a"]; 2 := [$1]')
    v = (("x",), ("y",))
    assert apply_update(v, swap) == (("y", "a"), ("x",))
    # the forest-structured sequence product needs monotone updates
    e = parse_update('1 := ["b", $1]; 2 := [$2, "a"]')
    assert apply_update_sequence([e, e], 2) == \
        apply_update(apply_update(empty_valuation(2), e), e)
    assert output_first([e, e], 2) == apply_update_sequence([e, e], 2)[0]


@pytest.mark.parametrize("name", sorted(SAMPLE_SSTS))
def test_sst_structured_matches_naive(name):
    sst = SAMPLE_SSTS[name]
    rng = random.Random(8)
    for _ in range(200):
        n = rng.randrange(0, 60)
        w = "".join(rng.choice(sst.input_letters) for _ in range(n))
        assert run_sst_structured(sst, w) == run_sst_naive(sst, w)


def test_sst_point_values():
    assert run_sst_naive(SAMPLE_SSTS["reverse"], "abb") == ("b", "b", "a")
    assert run_sst_naive(SAMPLE_SSTS["identity"], "ab") == ("a", "b")
    assert run_sst_naive(SAMPLE_SSTS["drop-last"], "ab") == ("a",)
    assert run_sst_naive(SAMPLE_SSTS["drop-last"], "") == ()


def test_sst_rejects_missing_transition():
    sst = SAMPLE_SSTS["identity"]
    with pytest.raises(UpdateError):
        run_sst_naive(sst, "az")


@pytest.mark.parametrize("name", sorted(SAMPLE_UPDATE_RATIONALS))
def test_update_pipeline_runs_registers_through_context_triples(name):
    g, k = SAMPLE_UPDATE_RATIONALS[name]
    rng = random.Random(9)
    oracle = {
        "update-identity": lambda w: tuple(w),
        "update-reverse": lambda w: tuple(reversed(w)),
        "update-noop": lambda w: (),
        "update-drop-last": lambda w: tuple(w[:-1]),
    }[name]
    for _ in range(100):
        n = rng.randrange(0, 40)
        w = "".join(rng.choice("ab") for _ in range(n))
        assert fot_pipeline_eval(g, k, w) == oracle(w)
