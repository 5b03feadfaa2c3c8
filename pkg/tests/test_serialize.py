import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hesuite import (
    AcsKeyMaterial,
    AddPackage,
    AuthorizedRequest,
    Ciphertext,
    ComputeRequest,
    Domain,
    JointPublicKey,
    KeyRecord,
    MultPackage,
    Op,
    ReEncKey,
    ResultMsg,
    UploadMsg,
    decode_entity,
    decrypt,
    encode_entity,
    encrypt,
    keygen,
)
from hesuite.errors import MalformedCiphertext, RequestError, SerializationError
from hesuite.serialize import hex_to_int, int_to_hex

nonneg = st.integers(min_value=0, max_value=1 << 256)
positive = st.integers(min_value=1, max_value=1 << 256)
domains = st.sampled_from(list(Domain))
ops = st.sampled_from(list(Op))
idents = st.text(alphabet="abcdef0123456789", min_size=1, max_size=32)

ciphertexts = st.builds(Ciphertext, a=positive, b=positive, domain=domains)
id_lists = st.lists(idents, min_size=2, max_size=6, unique=True).map(tuple)

entities = st.one_of(
    ciphertexts,
    st.builds(KeyRecord, n=positive, sk=positive, pk=positive),
    st.builds(AcsKeyMaterial, b=positive, b_inv=nonneg, pk=positive),
    st.builds(JointPublicKey, pk_joint=positive, pk_csp=positive, pk_acs=positive),
    st.builds(ReEncKey, rk=positive, target_pk=positive),
    st.builds(UploadMsg, ciphertexts=st.lists(ciphertexts, max_size=4).map(tuple)),
    st.builds(ComputeRequest, op=ops, ids=id_lists, requester_pk=positive),
    st.builds(AuthorizedRequest, op=ops, ids=id_lists, rk=positive, request_id=idents),
    st.builds(AddPackage, blinded=ciphertexts, noise_ct=ciphertexts, request_id=idents),
    st.builds(MultPackage, blinded_list=st.lists(ciphertexts, min_size=2, max_size=4).map(tuple),
              unblinder_ct=ciphertexts, request_id=idents),
    st.builds(ResultMsg, result=ciphertexts, request_id=idents),
)


class TestHexCodec:
    def test_forced_forms(self):
        assert int_to_hex(0) == "0"
        assert int_to_hex(255) == "ff"
        assert hex_to_int("0", "x") == 0
        assert hex_to_int("ff", "x") == 255

    @pytest.mark.parametrize("bad", ["", "00", "0f", "FF", "0x1", " 1", "1 ", "-1", "g"])
    def test_rejects_non_canonical(self, bad):
        with pytest.raises(SerializationError):
            hex_to_int(bad, "x")

    @given(st.integers(min_value=0, max_value=1 << 4096))
    def test_roundtrip(self, v):
        assert hex_to_int(int_to_hex(v), "x") == v

    def test_negative_rejected(self):
        with pytest.raises(SerializationError):
            int_to_hex(-1)


class TestRoundtrip:
    @given(entities)
    @settings(max_examples=300)
    def test_decode_encode_identity(self, entity):
        data = encode_entity(entity)
        again = decode_entity(data)
        assert again == entity
        assert encode_entity(again) == data

    def test_params_and_master_roundtrip(self, toy):
        pp, mk = toy
        assert decode_entity(encode_entity(pp)) == pp
        assert decode_entity(encode_entity(mk)) == mk

    def test_canonical_bytes(self, toy):
        pp, _ = toy
        data = encode_entity(pp)
        assert b" " not in data and b"\n" not in data
        keys = list(json.loads(data))
        assert keys == sorted(keys)


class TestDecodeErrors:
    def test_invalid_utf8_reports_offset(self):
        with pytest.raises(SerializationError) as exc:
            decode_entity(b'{"kind"\xff}')
        assert exc.value.offset == 7

    def test_bad_json_reports_offset(self):
        with pytest.raises(SerializationError) as exc:
            decode_entity(b'{"kind": }')
        assert exc.value.offset == 9

    def test_non_object(self):
        with pytest.raises(SerializationError):
            decode_entity(b"[1,2]")

    def test_unknown_kind(self):
        with pytest.raises(SerializationError):
            decode_entity(b'{"kind":"wat"}')

    def test_unknown_field_rejected(self, toy):
        pp, _ = toy
        doc = json.loads(encode_entity(pp))
        doc["extra"] = 1
        with pytest.raises(SerializationError) as exc:
            decode_entity(json.dumps(doc).encode())
        assert "extra" in str(exc.value)

    def test_missing_field_rejected(self, toy):
        pp, _ = toy
        doc = json.loads(encode_entity(pp))
        del doc["g"]
        with pytest.raises(SerializationError):
            decode_entity(json.dumps(doc).encode())

    def test_bad_domain_and_op(self):
        ct = b'{"a":"1","b":"1","domain":"nowhere","kind":"ciphertext"}'
        with pytest.raises(SerializationError):
            decode_entity(ct)
        req = b'{"ids":["a","b"],"kind":"compute-request","op":"div","requester_pk":"1"}'
        with pytest.raises(SerializationError):
            decode_entity(req)

    def test_structural_invariants_surface(self):
        req = b'{"ids":["a","a"],"kind":"compute-request","op":"add","requester_pk":"1"}'
        with pytest.raises(RequestError):
            decode_entity(req)

    def test_unit_check_with_params(self, toy, rng):
        pp, _ = toy
        bad = Ciphertext(a=7, b=1, domain=Domain.SINGLE)  # gcd(7, 77) > 1
        with pytest.raises(SerializationError):
            decode_entity(encode_entity(bad), pp)
        big = Ciphertext(a=pp.n_sq + 1, b=1, domain=Domain.SINGLE)
        with pytest.raises(SerializationError):
            decode_entity(encode_entity(big), pp)
        good = encrypt(pp, pp.g, 5, rng)
        assert decode_entity(encode_entity(good), pp) == good


def test_corrupted_hex_digit_still_decodes_then_fails_decrypt(toy, rng):
    # flip one hex digit of B: the record stays well-formed, decryption
    # must reject it since B/A^sk is no longer 1 mod N
    pp, _ = toy
    kp = keygen(pp, 24, rng)
    rejected = 0
    trials = 0
    for _ in range(60):
        ct = encrypt(pp, kp.pk, 5, rng)
        doc = json.loads(encode_entity(ct))
        b_hex = doc["b"]
        pos = rng.randrange(len(b_hex))
        repl = rng.choice([c for c in "123456789abcdef" if c != b_hex[pos]])
        if pos == 0 and repl == "0":
            repl = "1" if b_hex[pos] != "1" else "2"
        doc["b"] = b_hex[:pos] + repl + b_hex[pos + 1:]
        try:
            mutated = decode_entity(json.dumps(doc).encode())
        except SerializationError:
            continue  # can only happen if the mutation left the range
        trials += 1
        try:
            if decrypt(pp, kp.sk, mutated) != 5:
                rejected += 1
        except MalformedCiphertext:
            rejected += 1
    assert trials >= 50
    assert rejected >= trials * 0.9
