"""Canonical JSON encoding for every entity that crosses a file or wire.

One JSON object per entity, discriminated by a "kind" field.  Group and key
material integers are rendered as lowercase big-endian hex with no leading
zeros ("0" for zero); bit counts stay JSON numbers.  Objects are emitted
with sorted keys and no whitespace, so encoding is canonical: equal
entities produce identical bytes.  Decoding rejects unknown kinds and
unknown or missing fields.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any

from .access import AcsKeyMaterial, JointPublicKey, ReEncKey
from .bcp import Ciphertext, Domain, MasterKey, PublicParams
from .errors import SerializationError
from .messages import (
    AddPackage,
    AuthorizedRequest,
    ComputeRequest,
    MultPackage,
    Op,
    ResultMsg,
    UploadMsg,
)
from .numtheory import gcd

_HEX_RE = re.compile(r"\A(0|[1-9a-f][0-9a-f]*)\Z")


@dataclass(frozen=True)
class KeyRecord:
    """File form of a simple keypair; carries the modulus so key files are
    self-contained (a public key is meaningless without N)."""

    n: int
    sk: int
    pk: int


def int_to_hex(v: int) -> str:
    if v < 0:
        raise SerializationError(f"negative integer {v} cannot be encoded")
    return format(v, "x")


def hex_to_int(s: Any, field: str) -> int:
    if not isinstance(s, str) or not _HEX_RE.match(s):
        raise SerializationError(f"field {field!r} is not canonical hex: {s!r}")
    return int(s, 16)


def _require_str(doc: dict, field: str) -> str:
    v = doc[field]
    if not isinstance(v, str) or not v:
        raise SerializationError(f"field {field!r} must be a non-empty string")
    return v


def _ct_doc(ct: Ciphertext) -> dict:
    return {
        "kind": "ciphertext",
        "a": int_to_hex(ct.a),
        "b": int_to_hex(ct.b),
        "domain": ct.domain.value,
    }


def _to_doc(entity) -> dict:
    if isinstance(entity, PublicParams):
        return {
            "kind": "params",
            "kappa": entity.kappa,
            "n": int_to_hex(entity.n),
            "g": int_to_hex(entity.g),
        }
    if isinstance(entity, MasterKey):
        return {"kind": "master-key", "p": int_to_hex(entity.p), "q": int_to_hex(entity.q)}
    if isinstance(entity, KeyRecord):
        return {
            "kind": "keypair",
            "n": int_to_hex(entity.n),
            "sk": int_to_hex(entity.sk),
            "pk": int_to_hex(entity.pk),
        }
    if isinstance(entity, AcsKeyMaterial):
        return {
            "kind": "acs-key",
            "b": int_to_hex(entity.b),
            "b_inv": int_to_hex(entity.b_inv),
            "pk": int_to_hex(entity.pk),
        }
    if isinstance(entity, JointPublicKey):
        return {
            "kind": "joint-pk",
            "pk_joint": int_to_hex(entity.pk_joint),
            "pk_csp": int_to_hex(entity.pk_csp),
            "pk_acs": int_to_hex(entity.pk_acs),
        }
    if isinstance(entity, ReEncKey):
        return {
            "kind": "re-enc-key",
            "rk": int_to_hex(entity.rk),
            "target_pk": int_to_hex(entity.target_pk),
        }
    if isinstance(entity, Ciphertext):
        return _ct_doc(entity)
    if isinstance(entity, UploadMsg):
        return {"kind": "upload", "ciphertexts": [_ct_doc(c) for c in entity.ciphertexts]}
    if isinstance(entity, ComputeRequest):
        return {
            "kind": "compute-request",
            "op": entity.op.value,
            "ids": list(entity.ids),
            "requester_pk": int_to_hex(entity.requester_pk),
        }
    if isinstance(entity, AuthorizedRequest):
        return {
            "kind": "authorized-request",
            "op": entity.op.value,
            "ids": list(entity.ids),
            "rk": int_to_hex(entity.rk),
            "request_id": entity.request_id,
        }
    if isinstance(entity, AddPackage):
        return {
            "kind": "add-package",
            "blinded": _ct_doc(entity.blinded),
            "noise_ct": _ct_doc(entity.noise_ct),
            "request_id": entity.request_id,
        }
    if isinstance(entity, MultPackage):
        return {
            "kind": "mult-package",
            "blinded_list": [_ct_doc(c) for c in entity.blinded_list],
            "unblinder_ct": _ct_doc(entity.unblinder_ct),
            "request_id": entity.request_id,
        }
    if isinstance(entity, ResultMsg):
        return {
            "kind": "result",
            "result": _ct_doc(entity.result),
            "request_id": entity.request_id,
        }
    raise SerializationError(f"cannot encode object of type {type(entity).__name__}")


def encode_entity(entity) -> bytes:
    """Serialize an entity to its canonical byte form."""
    doc = _to_doc(entity)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("ascii")


def _check_fields(doc: dict, kind: str, fields: set[str]) -> None:
    got = set(doc)
    if got != fields | {"kind"}:
        unknown = got - fields - {"kind"}
        missing = (fields | {"kind"}) - got
        parts = []
        if unknown:
            parts.append(f"unknown fields {sorted(unknown)}")
        if missing:
            parts.append(f"missing fields {sorted(missing)}")
        raise SerializationError(f"{kind}: " + ", ".join(parts))


def _decode_domain(doc: dict) -> Domain:
    raw = doc["domain"]
    for d in Domain:
        if d.value == raw:
            return d
    raise SerializationError(f"unknown ciphertext domain {raw!r}")


def _decode_op(doc: dict) -> Op:
    raw = doc["op"]
    for op in Op:
        if op.value == raw:
            return op
    raise SerializationError(f"unknown operation {raw!r}")


def _decode_ct(doc: Any, params: PublicParams | None) -> Ciphertext:
    if not isinstance(doc, dict) or doc.get("kind") != "ciphertext":
        raise SerializationError("expected a nested ciphertext object")
    _check_fields(doc, "ciphertext", {"a", "b", "domain"})
    ct = Ciphertext(
        a=hex_to_int(doc["a"], "a"), b=hex_to_int(doc["b"], "b"), domain=_decode_domain(doc)
    )
    if params is not None:
        for name, comp in (("a", ct.a), ("b", ct.b)):
            if not 0 <= comp < params.n_sq:
                raise SerializationError(f"ciphertext component {name} out of range mod N^2")
            if gcd(comp, params.n) != 1:
                raise SerializationError(f"ciphertext component {name} is not a unit mod N")
    return ct


def _decode_ids(doc: dict) -> tuple[str, ...]:
    ids = doc["ids"]
    if not isinstance(ids, list) or not ids or not all(isinstance(i, str) and i for i in ids):
        raise SerializationError("ids must be a non-empty list of non-empty strings")
    return tuple(ids)


def decode_entity(data: bytes, params: PublicParams | None = None):
    """Parse canonical bytes back into an entity.

    When ``params`` is supplied, ciphertext components are additionally
    checked to be units mod N.  Raises SerializationError on malformed
    input (with the byte offset for parse errors); structural invariants of
    the decoded types (e.g. a compute request with one id) surface as the
    types' own errors.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SerializationError(f"invalid encoding: {e.reason}", offset=e.start) from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"parse error: {e.msg}", offset=e.pos) from e
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SerializationError("entity must be a JSON object with a 'kind' field")
    kind = doc["kind"]

    if kind == "params":
        _check_fields(doc, kind, {"kappa", "n", "g"})
        kappa = doc["kappa"]
        if not isinstance(kappa, int) or kappa < 3:
            raise SerializationError("kappa must be an integer bit length")
        n = hex_to_int(doc["n"], "n")
        g = hex_to_int(doc["g"], "g")
        if n % 2 == 0 or n.bit_length() != kappa:
            raise SerializationError("modulus is even or does not match kappa")
        if not 1 <= g < n * n or gcd(g, n) != 1:
            raise SerializationError("generator is not a unit mod N^2")
        return PublicParams(kappa=kappa, n=n, n_sq=n * n, g=g)
    if kind == "master-key":
        _check_fields(doc, kind, {"p", "q"})
        p = hex_to_int(doc["p"], "p")
        q = hex_to_int(doc["q"], "q")
        if p < 5 or q < 5 or p == q:
            raise SerializationError("master key primes out of range")
        p_prime, q_prime = (p - 1) // 2, (q - 1) // 2
        return MasterKey(p=p, q=q, p_prime=p_prime, q_prime=q_prime,
                         group_order=p * p_prime * q * q_prime)
    if kind == "keypair":
        _check_fields(doc, kind, {"n", "sk", "pk"})
        return KeyRecord(
            n=hex_to_int(doc["n"], "n"),
            sk=hex_to_int(doc["sk"], "sk"),
            pk=hex_to_int(doc["pk"], "pk"),
        )
    if kind == "acs-key":
        _check_fields(doc, kind, {"b", "b_inv", "pk"})
        return AcsKeyMaterial(
            b=hex_to_int(doc["b"], "b"),
            b_inv=hex_to_int(doc["b_inv"], "b_inv"),
            pk=hex_to_int(doc["pk"], "pk"),
        )
    if kind == "joint-pk":
        _check_fields(doc, kind, {"pk_joint", "pk_csp", "pk_acs"})
        return JointPublicKey(
            pk_joint=hex_to_int(doc["pk_joint"], "pk_joint"),
            pk_csp=hex_to_int(doc["pk_csp"], "pk_csp"),
            pk_acs=hex_to_int(doc["pk_acs"], "pk_acs"),
        )
    if kind == "re-enc-key":
        _check_fields(doc, kind, {"rk", "target_pk"})
        return ReEncKey(
            rk=hex_to_int(doc["rk"], "rk"),
            target_pk=hex_to_int(doc["target_pk"], "target_pk"),
        )
    if kind == "ciphertext":
        return _decode_ct(doc, params)
    if kind == "upload":
        _check_fields(doc, kind, {"ciphertexts"})
        cts = doc["ciphertexts"]
        if not isinstance(cts, list):
            raise SerializationError("ciphertexts must be a list")
        return UploadMsg(ciphertexts=tuple(_decode_ct(c, params) for c in cts))
    if kind == "compute-request":
        _check_fields(doc, kind, {"op", "ids", "requester_pk"})
        return ComputeRequest(
            op=_decode_op(doc),
            ids=_decode_ids(doc),
            requester_pk=hex_to_int(doc["requester_pk"], "requester_pk"),
        )
    if kind == "authorized-request":
        _check_fields(doc, kind, {"op", "ids", "rk", "request_id"})
        return AuthorizedRequest(
            op=_decode_op(doc),
            ids=_decode_ids(doc),
            rk=hex_to_int(doc["rk"], "rk"),
            request_id=_require_str(doc, "request_id"),
        )
    if kind == "add-package":
        _check_fields(doc, kind, {"blinded", "noise_ct", "request_id"})
        return AddPackage(
            blinded=_decode_ct(doc["blinded"], params),
            noise_ct=_decode_ct(doc["noise_ct"], params),
            request_id=_require_str(doc, "request_id"),
        )
    if kind == "mult-package":
        _check_fields(doc, kind, {"blinded_list", "unblinder_ct", "request_id"})
        blinded = doc["blinded_list"]
        if not isinstance(blinded, list):
            raise SerializationError("blinded_list must be a list")
        return MultPackage(
            blinded_list=tuple(_decode_ct(c, params) for c in blinded),
            unblinder_ct=_decode_ct(doc["unblinder_ct"], params),
            request_id=_require_str(doc, "request_id"),
        )
    if kind == "result":
        _check_fields(doc, kind, {"result", "request_id"})
        return ResultMsg(
            result=_decode_ct(doc["result"], params),
            request_id=_require_str(doc, "request_id"),
        )
    raise SerializationError(f"unknown entity kind {kind!r}")
