import random

import pytest

from hesuite import (
    Ciphertext,
    Domain,
    decode_signed,
    decrypt,
    encode_signed,
    encrypt,
    hom_add,
    hom_negate,
    hom_scalar_mul,
    keygen,
    maximal_order_check,
    params_from_primes,
    pdec1,
    pdec2,
    setup,
)
from hesuite.errors import DomainError, MalformedCiphertext, RangeError

from .conftest import TOY_N, TOY_NSQ, TOY_ORDER
from .oracles import brute_order, slow_pow


class TestSetup:
    def test_toy_group_structure(self, toy):
        pp, mk = toy
        assert (pp.n, pp.n_sq) == (TOY_N, TOY_NSQ)
        assert pp.kappa == 7
        assert mk.group_order == TOY_ORDER
        assert brute_order(pp.g, TOY_NSQ) == TOY_ORDER

    def test_toy_generator_is_square(self, toy):
        pp, _ = toy
        assert any(x * x % TOY_NSQ == pp.g for x in range(1, TOY_NSQ))

    def test_real_setup_modulus_bits(self, rng):
        pp, mk = setup(32, rng)
        assert pp.n.bit_length() == 32
        assert mk.p != mk.q
        assert mk.p * mk.q == pp.n
        m = rng.randrange(0, pp.n)
        kp = keygen(pp, 32, rng)
        assert decrypt(pp, kp.sk, encrypt(pp, kp.pk, m, rng)) == m

    def test_setup_rejects_bad_kappa(self, rng):
        with pytest.raises(RangeError):
            setup(15, rng)
        with pytest.raises(RangeError):
            setup(33, rng)

    def test_params_from_primes_rejects_unsafe(self, rng):
        with pytest.raises(RangeError):
            params_from_primes(13, 11, rng)  # (13-1)/2 = 6 is not prime
        with pytest.raises(RangeError):
            params_from_primes(7, 7, rng)


class TestMaximalOrderCheck:
    def test_agrees_with_brute_force_for_all_squares(self, toy):
        # every distinct square mod N^2 that is a unit; 1155 of them
        pp, mk = toy
        squares = {x * x % TOY_NSQ for x in range(1, TOY_NSQ) if x % 7 and x % 11}
        maximal = 0
        for g in squares:
            candidate = type(pp)(kappa=pp.kappa, n=pp.n, n_sq=pp.n_sq, g=g)
            expected = brute_order(g, TOY_NSQ) == TOY_ORDER
            assert maximal_order_check(mk, candidate) == expected
            maximal += expected
        assert len(squares) == 1155
        assert maximal == 480  # frozen from the brute-force census

    def test_mismatched_master_key_rejected(self, toy, rng):
        pp, _ = toy
        _, other_mk = params_from_primes(5, 7, rng)
        with pytest.raises(RangeError):
            maximal_order_check(other_mk, pp)


class TestKeygen:
    def test_pk_matches_iterated_multiplication(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 16, rng)
        assert 1 <= kp.sk <= 1 << 16
        assert kp.pk == slow_pow(pp.g, kp.sk, TOY_NSQ)

    def test_keybits_bound(self, toy, rng):
        pp, _ = toy
        assert all(keygen(pp, 16, rng).sk <= 1 << 16 for _ in range(50))
        with pytest.raises(RangeError):
            keygen(pp, 8, rng)


class TestEncryptDecrypt:
    def test_exhaustive_roundtrip(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 32, rng)
        for m in range(TOY_N):
            assert decrypt(pp, kp.sk, encrypt(pp, kp.pk, m, rng)) == m

    def test_ciphertext_formula_with_pinned_r(self, toy, rng):
        # (A, B) = (g^r, (1+mN) pk^r) checked by schoolbook exponentiation
        pp, _ = toy
        kp = keygen(pp, 16, rng)
        for m, r in [(0, 1), (3, 5), (76, 1154), (40, 7)]:
            ct = encrypt(pp, kp.pk, m, r=r)
            assert ct.a == slow_pow(pp.g, r, TOY_NSQ)
            assert ct.b == (1 + m * TOY_N) * slow_pow(kp.pk, r, TOY_NSQ) % TOY_NSQ

    def test_degenerate_randomness(self, toy):
        pp, _ = toy
        ct = encrypt(pp, pp.g, 0, r=0)
        assert (ct.a, ct.b) == (1, 1)

    def test_range_errors(self, toy, rng):
        pp, _ = toy
        with pytest.raises(RangeError):
            encrypt(pp, pp.g, TOY_N, rng)
        with pytest.raises(RangeError):
            encrypt(pp, pp.g, -1, rng)

    def test_wrong_key_raises_overwhelmingly(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 32, rng)
        ct = encrypt(pp, kp.pk, 5, rng)
        failures = 0
        for _ in range(100):
            wrong = rng.randrange(1, TOY_ORDER)
            if wrong % TOY_ORDER == kp.sk % TOY_ORDER:
                continue
            try:
                decrypt(pp, wrong, ct)
            except MalformedCiphertext:
                failures += 1
        assert failures >= 90

    def test_probabilistic_encryption_toy(self, toy, rng):
        # A = g^r lives in the order-1155 subgroup, so 1000 draws can hit at
        # most 1155 values; the observed distinct count must sit near the
        # uniform-sampling expectation of ~669, far above reuse and far
        # below injectivity.
        pp, _ = toy
        kp = keygen(pp, 32, rng)
        seen = {encrypt(pp, kp.pk, 5, rng).a for _ in range(1000)}
        assert 600 <= len(seen) <= 740

    def test_probabilistic_encryption_512(self, rng):
        pp, _ = setup(512, rng)
        kp = keygen(pp, 64, rng)
        seen = {encrypt(pp, kp.pk, 5, rng).a for _ in range(1000)}
        assert len(seen) >= 990


class TestTwoPhaseDecryption:
    def test_hundred_random_splits(self, toy, rng):
        pp, _ = toy
        for _ in range(100):
            sk1 = rng.randrange(0, 4 * TOY_ORDER)
            sk2 = rng.randrange(0, 4 * TOY_ORDER)
            pk = slow_pow(pp.g, (sk1 + sk2) % TOY_ORDER, TOY_NSQ)
            m = rng.randrange(0, TOY_N)
            ct = encrypt(pp, pk, m, rng, domain=Domain.JOINT)
            assert pdec2(pp, sk2, pdec1(pp, sk1, ct)) == m
            assert decrypt(pp, sk1 + sk2, ct) == m

    def test_sk1_zero_leaves_ciphertext(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 16, rng)
        ct = encrypt(pp, kp.pk, 9, rng, domain=Domain.JOINT)
        part = pdec1(pp, 0, ct)
        assert (part.a, part.b) == (ct.a, ct.b)
        assert part.domain is Domain.ACS
        assert pdec2(pp, kp.sk, part) == 9

    def test_domain_tags_enforced(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 16, rng)
        single = encrypt(pp, kp.pk, 1, rng)
        with pytest.raises(DomainError):
            pdec1(pp, kp.sk, single)
        joint = encrypt(pp, kp.pk, 1, rng, domain=Domain.JOINT)
        with pytest.raises(DomainError):
            pdec2(pp, kp.sk, joint)


class TestHomomorphicOps:
    def test_add_exhaustive_pairs(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 32, rng)
        cts = [encrypt(pp, kp.pk, m, rng) for m in range(TOY_N)]
        for m1 in range(0, TOY_N, 5):
            for m2 in range(TOY_N):
                total = decrypt(pp, kp.sk, hom_add(pp, cts[m1], cts[m2]))
                assert total == (m1 + m2) % TOY_N

    def test_add_wraparound(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 32, rng)
        c = hom_add(pp, encrypt(pp, kp.pk, 70, rng), encrypt(pp, kp.pk, 10, rng))
        assert decrypt(pp, kp.sk, c) == 3

    def test_add_domain_mismatch(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 16, rng)
        a = encrypt(pp, kp.pk, 1, rng, domain=Domain.JOINT)
        b = encrypt(pp, kp.pk, 1, rng, domain=Domain.DR)
        with pytest.raises(DomainError):
            hom_add(pp, a, b)

    def test_scalar_mul_grid(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 32, rng)
        for m in range(0, TOY_N, 7):
            ct = encrypt(pp, kp.pk, m, rng)
            for k in (0, 1, 2, 76, 77, 150):
                assert decrypt(pp, kp.sk, hom_scalar_mul(pp, ct, k)) == k * m % TOY_N

    def test_scalar_mul_rejects_negative(self, toy, rng):
        pp, _ = toy
        ct = encrypt(pp, pp.g, 1, rng)
        with pytest.raises(RangeError):
            hom_scalar_mul(pp, ct, -1)

    def test_negate_exhaustive(self, toy, rng):
        pp, _ = toy
        kp = keygen(pp, 32, rng)
        for m in range(TOY_N):
            ct = encrypt(pp, kp.pk, m, rng)
            assert decrypt(pp, kp.sk, hom_negate(pp, ct)) == (TOY_N - m) % TOY_N
            assert decrypt(pp, kp.sk, hom_add(pp, ct, hom_negate(pp, ct))) == 0

    def test_negate_agrees_with_scalar_n_minus_1(self, toy, rng):
        # two realizations of the inverse property must decrypt identically
        pp, _ = toy
        kp = keygen(pp, 32, rng)
        for m in range(TOY_N):
            ct = encrypt(pp, kp.pk, m, rng)
            via_inverse = decrypt(pp, kp.sk, hom_negate(pp, ct))
            via_power = decrypt(pp, kp.sk, hom_scalar_mul(pp, ct, TOY_N - 1))
            assert via_inverse == via_power


class TestSignedCodec:
    def test_endpoints(self, toy):
        pp, _ = toy
        assert encode_signed(pp, 0) == 0 and decode_signed(pp, 0) == 0
        assert encode_signed(pp, -1) == 76 and decode_signed(pp, 76) == -1

    def test_exhaustive_roundtrip(self, toy):
        pp, _ = toy
        for v in range(-38, 39):
            assert decode_signed(pp, encode_signed(pp, v)) == v

    def test_range_errors(self, toy):
        pp, _ = toy
        with pytest.raises(RangeError):
            encode_signed(pp, -39)
        with pytest.raises(RangeError):
            encode_signed(pp, 39)
        with pytest.raises(RangeError):
            decode_signed(pp, 77)


def test_ciphertext_tamper_detection(toy, rng):
    pp, _ = toy
    kp = keygen(pp, 32, rng)
    ct = encrypt(pp, kp.pk, 21, rng)
    tampered = Ciphertext(a=ct.a, b=ct.b * pp.g % TOY_NSQ, domain=ct.domain)
    try:
        value = decrypt(pp, kp.sk, tampered)
    except MalformedCiphertext:
        return
    assert value != 21  # integrity is not guaranteed, only confidentiality
