"""Key ceremonies beyond single keypairs.

The CSP and ACS public values multiply into a joint key g^(a+b); data
encrypted under it needs both servers to decrypt.  For ciphertext transfer
to a data requester, the ACS holds key material (b, b^-1 mod ord(G)) issued
by the dealer at registration time, from which it derives per-requester
re-encryption keys rk = g^(c/b) and converts rk-ciphertexts into ones the
requester's key c can open.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bcp import Ciphertext, Domain, MasterKey, PublicParams
from .errors import DomainError, ParameterError, RangeError
from .numtheory import default_rng, gcd, invert, powmod


@dataclass(frozen=True)
class JointPublicKey:
    """Product of the CSP and ACS public values: g^(a+b) mod N^2."""

    pk_joint: int
    pk_csp: int
    pk_acs: int


@dataclass(frozen=True)
class AcsKeyMaterial:
    """ACS secret exponent b, its inverse mod the group order, and g^b.

    b_inv is computable only with the factorization of N, so the dealer
    issues this material during registration and then discards the master
    key; no running party ever holds (p, q).
    """

    b: int
    b_inv: int
    pk: int


@dataclass(frozen=True)
class ReEncKey:
    """Re-encryption key rk = g^(c/b) toward the holder of target_pk = g^c."""

    rk: int
    target_pk: int


def joint_public_key(pp: PublicParams, pk_csp: int, pk_acs: int) -> JointPublicKey:
    """Combine the two server public values into the joint encryption key."""
    for pk in (pk_csp, pk_acs):
        if gcd(pk, pp.n) != 1:
            raise RangeError("public value is not a unit mod N^2")
    return JointPublicKey(
        pk_joint=pk_csp * pk_acs % pp.n_sq, pk_csp=pk_csp, pk_acs=pk_acs
    )


def dealer_register_acs(
    mk: MasterKey,
    pp: PublicParams,
    keybits: int,
    rng: random.Random | None = None,
    *,
    max_attempts: int = 4096,
) -> AcsKeyMaterial:
    """Issue ACS key material: b coprime to ord(G), b^-1 mod ord(G), g^b.

    Run by the dealer during system initialization, the only moment the
    master key is in scope.
    """
    if mk.p * mk.q != pp.n:
        raise RangeError("master key does not match the public parameters")
    if keybits < 16:
        raise RangeError(f"keybits must be >= 16, got {keybits}")
    rng = rng or default_rng()
    order = mk.group_order
    for _ in range(max_attempts):
        b = rng.randrange(1, (1 << keybits) + 1)
        if gcd(b, order) != 1:
            continue
        return AcsKeyMaterial(
            b=b, b_inv=invert(b % order, order), pk=powmod(pp.g, b, pp.n_sq)
        )
    raise ParameterError(
        f"no exponent coprime to the group order found in {max_attempts} samples"
    )


def rekeygen(acs: AcsKeyMaterial, pk_dr: int, pp: PublicParams) -> ReEncKey:
    """Derive rk = pk_dr^(1/b) = g^(c/b) for a requester with pk_dr = g^c.

    Deterministic in (acs, pk_dr); the ACS never learns c itself.
    """
    if gcd(pk_dr, pp.n) != 1:
        raise RangeError("requester public value is not a unit mod N^2")
    return ReEncKey(rk=powmod(pk_dr, acs.b_inv, pp.n_sq), target_pk=pk_dr)


def reencrypt(acs: AcsKeyMaterial, c: Ciphertext, pp: PublicParams) -> Ciphertext:
    """Switch an rk-domain ciphertext to one the requester can decrypt.

    For c = (g^s, (1+mN) rk^s) this returns (g^(s/b), B), which is a valid
    encryption of m under g^c since rk^s = g^(c s / b).
    """
    if c.domain is not Domain.RK:
        raise DomainError(f"reencrypt expects an RK ciphertext, got {c.domain.name}")
    return Ciphertext(a=powmod(c.a, acs.b_inv, pp.n_sq), b=c.b, domain=Domain.DR)
