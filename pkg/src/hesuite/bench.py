"""Microbenchmark harness for the cryptosystem and the protocol steps.

Subjects fall in two groups.  Algorithm subjects (setup, keygen, enc, dec,
pdec1, pdec2) time the primitives in isolation; enc/dec use an encryption
exponent of ``randbits`` bits, matching the common experimental practice
of shortened exponents, while the library default draws the exponent from
[1, N^2).  Protocol subjects (add.*, mult.*) time each party's share of a
two-operand computation session using the library defaults, so they
reflect what a deployment would pay per request.

Results are written as CSV with the fixed header
``subject,n_bits,mean_micros,stddev_micros,iterations``.
"""

from __future__ import annotations

import csv
import random
import statistics
import time
from dataclasses import dataclass

from .access import dealer_register_acs, joint_public_key
from .bcp import DEFAULT_KEYBITS, Domain, decrypt, encrypt, keygen, pdec1, pdec2, setup
from .engine import (
    CiphertextStore,
    acs_authorize,
    acs_finalize_add,
    acs_finalize_mult,
    csp_execute_add,
    csp_execute_mult,
    csp_ingest,
    dp_upload,
    dr_decrypt,
    dr_request,
)
from .errors import ParameterError, SerializationError
from .messages import Op
from .numtheory import default_rng

SUBJECTS = (
    "setup",
    "keygen",
    "enc",
    "dec",
    "pdec1",
    "pdec2",
    "add.csp",
    "add.acs",
    "add.dr",
    "mult.csp",
    "mult.acs",
    "mult.dr",
)

_CSV_FIELDS = ("subject", "n_bits", "mean_micros", "stddev_micros", "iterations")


@dataclass(frozen=True)
class BenchConfig:
    n_bits_list: tuple[int, ...]
    iterations: int = 500
    keybits: int = DEFAULT_KEYBITS
    databits: int = 200
    randbits: int = 500
    seed: int | None = None
    subjects: tuple[str, ...] = SUBJECTS


@dataclass(frozen=True)
class BenchRecord:
    subject: str
    n_bits: int
    mean_micros: float
    stddev_micros: float
    iterations: int


def _validate(config: BenchConfig) -> None:
    if config.iterations < 1:
        raise ParameterError("iterations must be >= 1")
    if min((config.keybits, config.databits, config.randbits)) < 1:
        raise ParameterError("keybits, databits and randbits must be >= 1")
    if not config.n_bits_list:
        raise ParameterError("at least one modulus size is required")
    if list(config.n_bits_list) != sorted(set(config.n_bits_list)):
        raise ParameterError("modulus sizes must be strictly ascending")
    unknown = set(config.subjects) - set(SUBJECTS)
    if unknown:
        raise ParameterError(f"unknown subjects: {sorted(unknown)}")
    if not config.subjects:
        raise ParameterError("at least one subject is required")


def _record(subject: str, bits: int, seconds: list[float], iterations: int) -> BenchRecord:
    micros = [s * 1e6 for s in seconds]
    return BenchRecord(
        subject=subject,
        n_bits=bits,
        mean_micros=statistics.fmean(micros),
        stddev_micros=statistics.pstdev(micros),
        iterations=iterations,
    )


def _bench_modulus(bits: int, config: BenchConfig, rng) -> list[BenchRecord]:
    wanted = [s for s in SUBJECTS if s in config.subjects]
    iters = config.iterations
    times: dict[str, list[float]] = {s: [] for s in wanted}
    clock = time.perf_counter

    if "setup" in times:
        for _ in range(iters):
            t0 = clock()
            pp, mk = setup(bits, rng)
            times["setup"].append(clock() - t0)
    else:
        pp, mk = setup(bits, rng)

    def rand_exp() -> int:
        return rng.getrandbits(config.randbits) or 1

    def rand_m() -> int:
        return rng.getrandbits(config.databits) % pp.n

    if "keygen" in times:
        for _ in range(iters):
            t0 = clock()
            keygen(pp, config.keybits, rng)
            times["keygen"].append(clock() - t0)

    single = keygen(pp, config.keybits, rng)
    if "enc" in times:
        for _ in range(iters):
            m, r = rand_m(), rand_exp()
            t0 = clock()
            encrypt(pp, single.pk, m, domain=Domain.SINGLE, r=r)
            times["enc"].append(clock() - t0)
    if "dec" in times:
        cts = [encrypt(pp, single.pk, rand_m(), r=rand_exp()) for _ in range(iters)]
        for ct in cts:
            t0 = clock()
            decrypt(pp, single.sk, ct)
            times["dec"].append(clock() - t0)

    if "pdec1" in times or "pdec2" in times:
        share1 = keygen(pp, config.keybits, rng)
        share2 = keygen(pp, config.keybits, rng)
        pk_split = share1.pk * share2.pk % pp.n_sq
        cts = [encrypt(pp, pk_split, rand_m(), domain=Domain.JOINT, r=rand_exp())
               for _ in range(iters)]
        partials = []
        for ct in cts:
            t0 = clock()
            part = pdec1(pp, share1.sk, ct)
            if "pdec1" in times:
                times["pdec1"].append(clock() - t0)
            partials.append(part)
        if "pdec2" in times:
            for part in partials:
                t0 = clock()
                pdec2(pp, share2.sk, part)
                times["pdec2"].append(clock() - t0)

    proto = [s for s in wanted if "." in s]
    if proto:
        csp = keygen(pp, config.keybits, rng)
        acs = dealer_register_acs(mk, pp, config.keybits, rng)
        joint = joint_public_key(pp, csp.pk, acs.pk)
        dr = keygen(pp, config.keybits, rng)
        store = CiphertextStore()
        ids = csp_ingest(store, dp_upload(pp, joint, [rand_m(), rand_m()], rng))
        allow = {dr.pk}
        for op, prefix in ((Op.ADD, "add"), (Op.MULT, "mult")):
            if not any(s.startswith(prefix + ".") for s in proto):
                continue
            for _ in range(iters):
                auth = acs_authorize(acs, dr_request(op, ids, dr.pk), pp, allow)
                t0 = clock()
                if op is Op.ADD:
                    pkg = csp_execute_add(store, auth, csp.sk, pp, rng)
                else:
                    pkg = csp_execute_mult(store, auth, csp.sk, pp, rng)
                t1 = clock()
                if op is Op.ADD:
                    result = acs_finalize_add(acs, pkg, dr.pk, pp, rng)
                else:
                    result = acs_finalize_mult(acs, pkg, pp)
                t2 = clock()
                dr_decrypt(dr.sk, result, pp)
                t3 = clock()
                for suffix, dt in (("csp", t1 - t0), ("acs", t2 - t1), ("dr", t3 - t2)):
                    key = f"{prefix}.{suffix}"
                    if key in times:
                        times[key].append(dt)

    return [_record(s, bits, times[s], iters) for s in wanted]


def bench_run(config: BenchConfig, rng=None) -> list[BenchRecord]:
    """Run every configured subject at every modulus size.

    Fresh parameters are generated per modulus size; when the setup
    subject is enabled its last run provides them.  An explicit rng wins
    over config.seed.
    """
    _validate(config)
    if rng is None:
        rng = random.Random(config.seed) if config.seed is not None else default_rng()
    records: list[BenchRecord] = []
    for bits in config.n_bits_list:
        records.extend(_bench_modulus(bits, config, rng))
    return records


def write_csv(records, stream) -> None:
    """Write records as CSV; floats carry six significant digits."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    for r in records:
        w.writerow([r.subject, r.n_bits, format(r.mean_micros, ".6g"),
                    format(r.stddev_micros, ".6g"), r.iterations])


def read_csv(stream) -> list[BenchRecord]:
    rows = csv.reader(stream)
    try:
        header = next(rows)
    except StopIteration:
        raise SerializationError("empty benchmark file") from None
    if tuple(header) != _CSV_FIELDS:
        raise SerializationError(f"unexpected CSV header {header}")
    out = []
    for row in rows:
        if len(row) != len(_CSV_FIELDS):
            raise SerializationError(f"malformed CSV row {row}")
        out.append(BenchRecord(
            subject=row[0],
            n_bits=int(row[1]),
            mean_micros=float(row[2]),
            stddev_micros=float(row[3]),
            iterations=int(row[4]),
        ))
    return out
