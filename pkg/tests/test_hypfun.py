from fractions import Fraction

import pytest

from hypmoments import curves, ffield, hypfun
from oracles import brute_hp, inv_mod, legendre_curve_count

D_FAMILY = {2: "legendre", 3: "d3", 4: "d4", 6: "d6"}


def _sweep_pair(d, p):
    fam = curves.builtin_family(D_FAMILY[d])
    ctx = ffield.build_field(p)
    plus = curves.trace_sweep(fam, ctx)
    return ctx, plus, curves.negated_sweep(fam, plus)


def test_datum_modulus_examples():
    assert hypfun.datum_modulus(hypfun.length4_datum(2)) == 4
    assert hypfun.datum_modulus(hypfun.length2_datum(2)) == 2
    assert hypfun.datum_modulus(hypfun.length4_datum(3)) == 6
    assert hypfun.datum_modulus(hypfun.length4_datum(4)) == 8
    assert hypfun.datum_modulus(hypfun.length4_datum(6)) == 12
    assert hypfun.datum_modulus(hypfun.clausen_datum()) == 2


def test_length4_datum_parameters():
    d3 = hypfun.length4_datum(3)
    assert d3.alpha == (Fraction(1, 6), Fraction(5, 6), Fraction(2, 3), Fraction(1, 3))
    assert d3.beta == (Fraction(1), Fraction(1, 2), Fraction(1), Fraction(1, 2))


def test_datum_validation():
    with pytest.raises(ValueError):
        hypfun.hyp_datum((Fraction(1, 2),), (Fraction(1, 2),))  # beta[0] != 1
    with pytest.raises(ValueError):
        hypfun.hyp_datum((Fraction(1, 2),), (1, 1))  # length mismatch


def test_hp_direct_at_zero_is_one():
    ctx = ffield.build_field(13)
    for datum in (hypfun.length2_datum(2), hypfun.length4_datum(2), hypfun.clausen_datum()):
        assert hypfun.hp_direct(ctx, datum, 0) == 1


def test_hp_direct_vanishes_at_nonresidue():
    # squares mod 13 are {1,3,4,9,10,12}; 2 is not one of them
    ctx = ffield.build_field(13)
    assert ffield.legendre_symbol(2, 13) == -1
    assert hypfun.hp_direct(ctx, hypfun.length4_datum(3), 2) == 0


def test_hp_direct_length2_matches_curve_count():
    ctx = ffield.build_field(13)
    val = hypfun.hp_direct(ctx, hypfun.length2_datum(2), 4)
    assert val == 13 + 1 - legendre_curve_count(13, 4)
    assert val == -2


def test_hp_direct_modulus_mismatch():
    ctx = ffield.build_field(7)  # 7 != 1 mod 4
    with pytest.raises(hypfun.ModulusMismatchError):
        hypfun.hp_direct(ctx, hypfun.length4_datum(2), 3)


@pytest.mark.parametrize("p", [13, 17])
def test_hp_direct_matches_independent_reimplementation(p):
    ctx = ffield.build_field(p)
    data = [hypfun.length2_datum(2), hypfun.clausen_datum()]
    if (p - 1) % 4 == 0:
        data.append(hypfun.length4_datum(2))
    for datum in data:
        for lam in range(p):
            ref = brute_hp(p, datum.alpha, datum.beta, lam)
            assert abs(ref.imag) < 1e-6
            assert hypfun.hp_direct(ctx, datum, lam) == round(ref.real)


@pytest.mark.parametrize(
    "p,d", [(13, 2), (13, 3), (13, 6), (37, 2), (37, 3), (37, 6), (61, 2), (61, 3), (61, 6), (41, 4)]
)
def test_cross_path_equality(p, d):
    datum = hypfun.length4_datum(d)
    assert (p - 1) % datum.modulus == 0
    ctx, plus, minus = _sweep_pair(d, p)
    for mu in range(2, p):
        assert hypfun.hp_direct(ctx, datum, mu) == hypfun.hp_via_traces(d, plus, minus, mu)


@pytest.mark.parametrize("p", [7, 13, 19, 31])
def test_length2_identity_against_naive_counts(p):
    from test_curves import _long_form_count

    for d in (2, 3, 4, 6):
        datum = hypfun.length2_datum(d)
        if (p - 1) % datum.modulus:
            continue
        ctx = ffield.build_field(p)
        fam = curves.builtin_family(D_FAMILY[d])
        sweep = curves.trace_sweep(fam, ctx)
        for lam in range(2, p):
            if sweep.bad_mask[lam]:
                continue
            assert hypfun.hp_direct(ctx, datum, lam) == p + 1 - _long_form_count(fam, p, lam)


@pytest.mark.parametrize("p", [13, 17, 29])
def test_clausen_identity(p):
    ctx = ffield.build_field(p)
    sweep = curves.trace_sweep(curves.builtin_family("clausen"), ctx)
    datum = hypfun.clausen_datum()
    for lam in range(1, p - 1):
        mu = lam * inv_mod(lam + 1, p) % p
        direct = hypfun.hp_direct(ctx, datum, mu)
        rhs = int(ctx.quadchar[(lam + 1) % p]) * (int(sweep.traces[lam]) ** 2 - p)
        assert direct == rhs


def test_hp_via_traces_examples():
    ctx, plus, minus = _sweep_pair(2, 13)
    # mu = 9 has roots 3 and 10; a(3) = a(10) = -2
    assert hypfun.hp_via_traces(2, plus, minus, 9) == -4
    assert int(plus.traces[3]) + int(plus.traces[10]) == -4
    # nonresidues give 0
    for mu in (2, 5, 6, 7, 8, 11):
        assert hypfun.hp_via_traces(2, plus, minus, mu) == 0


def test_hp_via_traces_boundary_and_mismatch():
    ctx, plus, minus = _sweep_pair(2, 13)
    for mu in (0, 1):
        with pytest.raises(hypfun.BoundaryLambdaError):
            hypfun.hp_via_traces(2, plus, minus, mu)
    _, other, _ = _sweep_pair(2, 17)
    with pytest.raises(curves.SweepMismatchError):
        hypfun.hp_via_traces(2, plus, other, 9)
    with pytest.raises(ValueError):
        hypfun.hp_via_traces(5, plus, minus, 9)


def test_hp_direct_refuses_oversized_primes():
    ctx = ffield.build_field(1_000_003)
    with pytest.raises(ValueError, match="10\\^6"):
        hypfun.hp_direct(ctx, hypfun.length2_datum(2), 5)


def test_hp_direct_precision_guard_trips_on_nonintegral_data():
    # data outside the shipped identities carry no integrality guarantee; the
    # rounding guard must refuse rather than round
    ctx = ffield.build_field(11)
    datum = hypfun.hyp_datum((Fraction(1, 5), Fraction(2, 5)), (1, Fraction(3, 5)))
    with pytest.raises(hypfun.PrecisionLossError):
        hypfun.hp_direct(ctx, datum, 3)


def test_hp_values_are_symmetric_in_the_root_choice():
    ctx, plus, minus = _sweep_pair(2, 37)
    for mu in range(2, 37):
        if ffield.legendre_symbol(mu, 37) != 1:
            continue
        lam = ffield.sqrt_mod(mu, 37)
        other = 37 - lam
        v1 = int(plus.traces[lam]) + int(minus.traces[lam])
        v2 = int(plus.traces[other]) + int(minus.traces[other])
        assert v1 == v2 == hypfun.hp_via_traces(2, plus, minus, mu)
