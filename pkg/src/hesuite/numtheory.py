"""Big-integer helpers: primality, safe-prime search, modular arithmetic.

Primality testing and modular inversion are delegated to gmpy2; everything
here returns plain Python ints so the rest of the package stays free of mpz
types.
"""

from __future__ import annotations

import os
import random

import gmpy2

from .errors import ParameterError

# Trial-division table used to discard safe-prime candidates cheaply before
# running a full primality test.
_SIEVE_LIMIT = 8192


def _small_primes(limit: int) -> tuple[int, ...]:
    out = []
    p = gmpy2.mpz(2)
    while p < limit:
        out.append(int(p))
        p = gmpy2.next_prime(p)
    return tuple(out)


SMALL_PRIMES = _small_primes(_SIEVE_LIMIT)


def default_rng() -> random.Random:
    """Process-default randomness source.

    Returns a seeded generator when the ``HESUITE_SEED`` environment variable
    is set (reproducible test runs), otherwise an OS-entropy generator.
    """
    seed = os.environ.get("HESUITE_SEED")
    if seed is not None:
        return random.Random(int(seed))
    return random.SystemRandom()


def is_probable_prime(n: int) -> bool:
    """Baillie-PSW plus Miller-Rabin rounds, suitable for key generation."""
    return bool(gmpy2.is_prime(n, 25))


def powmod(base: int, exp: int, mod: int) -> int:
    """base**exp mod ``mod`` for nonnegative exp."""
    return int(gmpy2.powmod(base, exp, mod))


def invert(a: int, mod: int) -> int:
    """Modular inverse of ``a`` mod ``mod``; raises ZeroDivisionError if none."""
    return int(gmpy2.invert(a, mod))


def gcd(a: int, b: int) -> int:
    return int(gmpy2.gcd(a, b))


def safe_prime(bits: int, rng: random.Random, max_attempts: int = 2_000_000) -> int:
    """Random safe prime p = 2p' + 1 with exactly ``bits`` bits.

    The two top bits of p' are forced so that p > sqrt(2) * 2^(bits-1);
    a product of two such primes then has exactly double the bit length.
    Raises ParameterError when the candidate budget is exhausted.
    """
    if bits < 4:
        raise ParameterError(f"safe prime bit length too small: {bits}")
    for _ in range(max_attempts):
        half = rng.getrandbits(bits - 1) | (0b11 << (bits - 3)) | 1
        p = 2 * half + 1
        composite = False
        for sp in SMALL_PRIMES:
            if half % sp == 0 and half != sp:
                composite = True
                break
            if p % sp == 0 and p != sp:
                composite = True
                break
        if composite:
            continue
        if is_probable_prime(half) and is_probable_prime(p):
            return p
    raise ParameterError(
        f"no {bits}-bit safe prime found within {max_attempts} candidates"
    )
