"""BCP (Bresson-Catalano-Pointcheval) additively homomorphic cryptosystem.

Works in the group of quadratic residues modulo N^2 for an RSA modulus
N = pq built from safe primes, so the group is cyclic of order p*p'*q*q'
(p = 2p'+1, q = 2q'+1).  A ciphertext for m under public value h = g^x is

    (A, B) = (g^r mod N^2, (1 + mN) * h^r mod N^2)

and decryption computes L(B / A^x mod N^2) with L(u) = (u - 1) / N.
Splitting x as x1 + x2 gives a two-phase decryption: pdec1 strips x1 and
pdec2 strips x2.  Only the user-key decryption path is implemented; the
master-key trapdoor is used solely for parameter and ACS key generation.

Ciphertexts carry a key-domain tag so that routing mistakes in the wider
protocol (e.g. re-encrypting a joint-key ciphertext) raise DomainError
instead of silently producing garbage.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .errors import DomainError, MalformedCiphertext, ParameterError, RangeError
from .numtheory import default_rng, gcd, invert, is_probable_prime, powmod, safe_prime

DEFAULT_KEYBITS = 500


class Domain(enum.Enum):
    """Which key a ciphertext is currently bound to."""

    JOINT = "joint"
    ACS = "acs"
    RK = "rk"
    DR = "dr"
    SINGLE = "single"


@dataclass(frozen=True)
class PublicParams:
    """Public system parameters (N, g) plus cached N^2."""

    kappa: int
    n: int
    n_sq: int
    g: int


@dataclass(frozen=True)
class MasterKey:
    """The factorization trapdoor, held only by the dealer during setup."""

    p: int
    q: int
    p_prime: int
    q_prime: int
    group_order: int


@dataclass(frozen=True)
class KeyPair:
    sk: int
    pk: int


@dataclass(frozen=True)
class Ciphertext:
    a: int
    b: int
    domain: Domain


def setup(
    kappa: int,
    rng: random.Random | None = None,
    *,
    max_attempts: int = 2_000_000,
) -> tuple[PublicParams, MasterKey]:
    """Generate public parameters and the master key.

    N = pq for safe primes p, q of kappa/2 bits; g is sampled as a random
    square mod N^2 and resampled until it has maximal order in the QR group.
    """
    if kappa < 16 or kappa % 2 != 0:
        raise RangeError(f"kappa must be even and >= 16, got {kappa}")
    rng = rng or default_rng()
    half = kappa // 2
    p = safe_prime(half, rng, max_attempts=max_attempts)
    q = p
    while q == p:
        q = safe_prime(half, rng, max_attempts=max_attempts)
    return params_from_primes(p, q, rng)


def params_from_primes(
    p: int, q: int, rng: random.Random | None = None
) -> tuple[PublicParams, MasterKey]:
    """Build (PublicParams, MasterKey) from given safe primes.

    Used by setup() and by the toy-parameter escape hatch; validates that
    both primes are safe and distinct before sampling a generator.
    """
    if p == q:
        raise RangeError("p and q must be distinct")
    for prime in (p, q):
        if prime < 5 or not is_probable_prime(prime) or not is_probable_prime((prime - 1) // 2):
            raise RangeError(f"{prime} is not a safe prime")
    rng = rng or default_rng()
    p_prime = (p - 1) // 2
    q_prime = (q - 1) // 2
    n = p * q
    mk = MasterKey(p=p, q=q, p_prime=p_prime, q_prime=q_prime,
                   group_order=p * p_prime * q * q_prime)
    n_sq = n * n
    for _ in range(256):
        alpha = rng.randrange(1, n_sq)
        if gcd(alpha, n) != 1:
            continue
        g = powmod(alpha, 2, n_sq)
        pp = PublicParams(kappa=n.bit_length(), n=n, n_sq=n_sq, g=g)
        if maximal_order_check(mk, pp):
            return pp, mk
    raise ParameterError("no maximal-order generator found in 256 samples")


def maximal_order_check(mk: MasterKey, pp: PublicParams) -> bool:
    """True iff pp.g has order p*p'*q*q' in Z*_{N^2}.

    Checks g^(ord/l) != 1 mod N^2 for every prime l dividing the group
    order; requires the master key since the order's factorization is the
    trapdoor.
    """
    if mk.p * mk.q != pp.n:
        raise RangeError("master key does not match the public parameters")
    order = mk.group_order
    if powmod(pp.g, order, pp.n_sq) != 1:
        return False
    for ell in {mk.p, mk.q, mk.p_prime, mk.q_prime}:
        if powmod(pp.g, order // ell, pp.n_sq) == 1:
            return False
    return True


def keygen(
    pp: PublicParams, keybits: int = DEFAULT_KEYBITS, rng: random.Random | None = None
) -> KeyPair:
    """Sample a secret exponent in [1, 2^keybits] and derive h = g^sk."""
    if keybits < 16:
        raise RangeError(f"keybits must be >= 16, got {keybits}")
    rng = rng or default_rng()
    sk = rng.randrange(1, (1 << keybits) + 1)
    return KeyPair(sk=sk, pk=powmod(pp.g, sk, pp.n_sq))


def encrypt(
    pp: PublicParams,
    pk: int,
    m: int,
    rng: random.Random | None = None,
    *,
    domain: Domain = Domain.SINGLE,
    r: int | None = None,
) -> Ciphertext:
    """Encrypt m in [0, N) under the public value pk.

    The randomness r defaults to uniform in [1, N^2); passing r explicitly
    is a test/benchmark hook (r = 0 yields the degenerate ciphertext (1, 1+mN)).
    """
    if not 0 <= m < pp.n:
        raise RangeError(f"plaintext {m} outside [0, {pp.n})")
    if r is None:
        rng = rng or default_rng()
        r = rng.randrange(1, pp.n_sq)
    a = powmod(pp.g, r, pp.n_sq)
    b = (1 + m * pp.n) * powmod(pk, r, pp.n_sq) % pp.n_sq
    return Ciphertext(a=a, b=b, domain=domain)


def _l_function(u: int, n: int) -> int:
    if u % n != 1:
        raise MalformedCiphertext("decryption produced a value not congruent to 1 mod N")
    return (u - 1) // n


def decrypt(pp: PublicParams, sk: int, c: Ciphertext) -> int:
    """Recover m = L(B / A^sk mod N^2); raises MalformedCiphertext if the
    argument of L is not congruent to 1 mod N (wrong key or tampered data)."""
    u = c.b * invert(powmod(c.a, sk, pp.n_sq), pp.n_sq) % pp.n_sq
    return _l_function(u, pp.n)


def pdec1(pp: PublicParams, sk1: int, c: Ciphertext) -> Ciphertext:
    """First decryption phase: strip sk1 from a joint-key ciphertext.

    The result can be finished with the other key share via pdec2.
    """
    if c.domain is not Domain.JOINT:
        raise DomainError(f"pdec1 expects a JOINT ciphertext, got {c.domain.name}")
    b = c.b * invert(powmod(c.a, sk1, pp.n_sq), pp.n_sq) % pp.n_sq
    return Ciphertext(a=c.a, b=b, domain=Domain.ACS)


def pdec2(pp: PublicParams, sk2: int, c: Ciphertext) -> int:
    """Second decryption phase: finish a pdec1 output with sk2."""
    if c.domain is not Domain.ACS:
        raise DomainError(f"pdec2 expects an ACS ciphertext, got {c.domain.name}")
    u = c.b * invert(powmod(c.a, sk2, pp.n_sq), pp.n_sq) % pp.n_sq
    return _l_function(u, pp.n)


def hom_add(pp: PublicParams, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    """Componentwise product; decrypts to m1 + m2 mod N."""
    if c1.domain is not c2.domain:
        raise DomainError(
            f"cannot add ciphertexts from domains {c1.domain.name} and {c2.domain.name}"
        )
    return Ciphertext(
        a=c1.a * c2.a % pp.n_sq, b=c1.b * c2.b % pp.n_sq, domain=c1.domain
    )


def hom_scalar_mul(pp: PublicParams, c: Ciphertext, k: int) -> Ciphertext:
    """Componentwise k-th power; decrypts to k*m mod N."""
    if k < 0:
        raise RangeError(f"scalar must be nonnegative, got {k}")
    k %= pp.n
    return Ciphertext(
        a=powmod(c.a, k, pp.n_sq), b=powmod(c.b, k, pp.n_sq), domain=c.domain
    )


def hom_negate(pp: PublicParams, c: Ciphertext) -> Ciphertext:
    """Componentwise modular inverse; decrypts to N - m mod N."""
    return Ciphertext(
        a=invert(c.a, pp.n_sq), b=invert(c.b, pp.n_sq), domain=c.domain
    )


def encode_signed(pp: PublicParams, v: int) -> int:
    """Map a signed integer in [-floor(N/2), ceil(N/2)) to Z_N."""
    if not -(pp.n // 2) <= v < (pp.n + 1) // 2:
        raise RangeError(f"{v} outside the signed range for N={pp.n}")
    return v % pp.n


def decode_signed(pp: PublicParams, m: int) -> int:
    """Inverse of encode_signed: residues above N/2 map to negatives."""
    if not 0 <= m < pp.n:
        raise RangeError(f"residue {m} outside [0, {pp.n})")
    return m if 2 * m < pp.n else m - pp.n
