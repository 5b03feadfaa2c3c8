"""Command-line front end.

Subcommands cover the full lifecycle: parameter setup, per-role key
generation, joint-key derivation, encrypted upload into a store directory,
running a computation session, and benchmarking.  All artifacts are the
canonical JSON records of the serialize module, one entity per file.

The ``request`` subcommand expects a keys directory laid out as written by
the earlier steps: params.json, csp.json, acs.json and dr.json.  Exit
status is 0 on success, 1 on protocol or crypto failures (with a one-line
diagnostic on stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .access import AcsKeyMaterial, JointPublicKey, dealer_register_acs
from .bcp import (
    DEFAULT_KEYBITS,
    Ciphertext,
    KeyPair,
    MasterKey,
    PublicParams,
    keygen,
    params_from_primes,
    setup,
)
from .bench import SUBJECTS, BenchConfig, bench_run, write_csv
from .engine import (
    AccessControlServer,
    CiphertextStore,
    CloudServiceProvider,
    DataRequester,
    Roles,
    csp_ingest,
    dp_upload,
    run_session,
)
from .errors import HesuiteError, ParameterError
from .messages import Op
from .numtheory import default_rng, gcd
from .serialize import KeyRecord, decode_entity, encode_entity
from .transport import DirectTransport

KEYS_LAYOUT = ("params.json", "csp.json", "acs.json", "dr.json")


def _int_tuple(text: str) -> tuple[int, ...]:
    items = tuple(int(t) for t in text.split(","))
    if not items:
        raise ValueError("empty list")
    return items


def _str_tuple(text: str) -> tuple[str, ...]:
    items = tuple(t for t in text.split(",") if t)
    if not items:
        raise ValueError("empty list")
    return items


def _prime_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError("expected P,Q")
    return int(parts[0]), int(parts[1])


def _write_entity(path: str | Path, entity) -> None:
    Path(path).write_bytes(encode_entity(entity) + b"\n")


def _read_entity(path: str | Path, expect: type | tuple, what: str, params=None):
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise ParameterError(f"cannot read {what} file {path}: {e.strerror}") from e
    entity = decode_entity(data.strip(), params)
    if not isinstance(entity, expect):
        raise ParameterError(f"{path} does not contain {what}")
    return entity


def _cmd_setup(args) -> int:
    rng = default_rng()
    if args.toy is not None:
        pp, mk = params_from_primes(args.toy[0], args.toy[1], rng)
    else:
        if args.bits is None:
            print("hesuite: setup needs --bits (or --toy P,Q)", file=sys.stderr)
            return 2
        pp, mk = setup(args.bits, rng)
    _write_entity(args.out, pp)
    master_out = args.master_out if args.master_out else args.out + ".master"
    _write_entity(master_out, mk)
    return 0


def _cmd_keygen(args) -> int:
    pp = _read_entity(args.params, PublicParams, "public parameters")
    rng = default_rng()
    if args.role == "acs":
        if args.master is None:
            print("hesuite: keygen --role acs needs --master F", file=sys.stderr)
            return 2
        mk = _read_entity(args.master, MasterKey, "a master key")
        _write_entity(args.out, dealer_register_acs(mk, pp, args.bits, rng))
    else:
        kp = keygen(pp, args.bits, rng)
        _write_entity(args.out, KeyRecord(n=pp.n, sk=kp.sk, pk=kp.pk))
    return 0


def _cmd_joint_pk(args) -> int:
    csp = _read_entity(args.csp, KeyRecord, "a keypair")
    acs = _read_entity(args.acs, (AcsKeyMaterial, KeyRecord), "a key record")
    n = csp.n
    for pk in (csp.pk, acs.pk):
        if gcd(pk, n) != 1:
            raise ParameterError("public value is not a unit mod N^2")
    joint = JointPublicKey(
        pk_joint=csp.pk * acs.pk % (n * n), pk_csp=csp.pk, pk_acs=acs.pk
    )
    _write_entity(args.out, joint)
    return 0


def _cmd_upload(args) -> int:
    pp = _read_entity(args.params, PublicParams, "public parameters")
    joint = _read_entity(args.jointpk, JointPublicKey, "a joint public key")
    rng = default_rng()
    msg = dp_upload(pp, joint, args.values, rng)
    store_dir = Path(args.store)
    store_dir.mkdir(parents=True, exist_ok=True)
    store = CiphertextStore()
    for cid in csp_ingest(store, msg):
        _write_entity(store_dir / f"{cid}.json", store.get(cid))
        print(cid)
    return 0


def _load_keys(keys_dir: str) -> tuple[PublicParams, KeyRecord, AcsKeyMaterial, KeyRecord]:
    base = Path(keys_dir)
    pp = _read_entity(base / "params.json", PublicParams, "public parameters")
    csp = _read_entity(base / "csp.json", KeyRecord, "the CSP keypair")
    acs = _read_entity(base / "acs.json", AcsKeyMaterial, "the ACS key material")
    dr = _read_entity(base / "dr.json", KeyRecord, "the DR keypair")
    for rec, name in ((csp, "csp"), (dr, "dr")):
        if rec.n != pp.n:
            raise ParameterError(f"{name} key was generated for a different modulus")
    return pp, csp, acs, dr


def _load_store(store_dir: str, pp: PublicParams) -> CiphertextStore:
    store = CiphertextStore()
    for path in sorted(Path(store_dir).glob("*.json")):
        ct = _read_entity(path, Ciphertext, "a ciphertext", params=pp)
        store.put(ct, cid=path.stem)
    return store


def _cmd_request(args) -> int:
    pp, csp_rec, acs_key, dr_rec = _load_keys(args.keys)
    store = _load_store(args.store, pp)
    rng = default_rng()
    csp = CloudServiceProvider(pp, KeyPair(sk=csp_rec.sk, pk=csp_rec.pk), store, rng)
    acs = AccessControlServer(pp, acs_key, allowlist={dr_rec.pk}, rng=rng)
    dr = DataRequester(pp, KeyPair(sk=dr_rec.sk, pk=dr_rec.pk))
    roles = Roles(pp=pp, csp=csp, acs=acs, dr=dr)
    op = Op.ADD if args.op == "add" else Op.MULT
    outcome = run_session(DirectTransport(), roles, dr.request(op, args.ids))
    print(outcome.value)
    return 0


def _cmd_bench(args) -> int:
    config = BenchConfig(
        n_bits_list=args.bits,
        iterations=args.iters,
        keybits=args.keybits,
        databits=args.databits,
        randbits=args.randbits,
        seed=args.seed,
        subjects=args.subjects,
    )
    records = bench_run(config)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hesuite",
        description="Privacy-preserving outsourced addition and multiplication "
                    "over additively homomorphic ciphertexts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", help="generate public parameters and the master key")
    p.add_argument("--bits", type=int, help="bit length of the modulus N")
    p.add_argument("--out", required=True, help="output file for the public parameters")
    p.add_argument("--toy", type=_prime_pair, metavar="P,Q",
                   help="inject small safe primes instead of searching")
    p.add_argument("--master-out", help="master key file (default: OUT.master)")
    p.set_defaults(func=_cmd_setup)

    p = sub.add_parser("keygen", help="generate a role keypair")
    p.add_argument("--role", required=True, choices=("csp", "acs", "dr", "dp"))
    p.add_argument("--params", required=True, help="public parameters file")
    p.add_argument("--bits", type=int, default=DEFAULT_KEYBITS,
                   help="secret exponent bit length (default 500)")
    p.add_argument("--out", required=True, help="output key file")
    p.add_argument("--master", help="master key file (required for --role acs)")
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("joint-pk", help="combine CSP and ACS keys into the joint key")
    p.add_argument("--csp", required=True, help="CSP keypair file")
    p.add_argument("--acs", required=True, help="ACS key file")
    p.add_argument("--out", required=True, help="output joint key file")
    p.set_defaults(func=_cmd_joint_pk)

    p = sub.add_parser("upload", help="encrypt values under the joint key into a store")
    p.add_argument("--params", required=True, help="public parameters file")
    p.add_argument("--jointpk", required=True, help="joint public key file")
    p.add_argument("--values", required=True, type=_int_tuple, metavar="V1,V2,...")
    p.add_argument("--store", required=True, help="store directory (created if missing)")
    p.set_defaults(func=_cmd_upload)

    p = sub.add_parser("request", help="run a computation session and print the result")
    p.add_argument("--op", required=True, choices=("add", "mult"))
    p.add_argument("--ids", required=True, type=_str_tuple, metavar="ID1,ID2,...")
    p.add_argument("--keys", required=True,
                   help="directory holding params.json, csp.json, acs.json, dr.json")
    p.add_argument("--store", required=True, help="store directory")
    p.set_defaults(func=_cmd_request)

    p = sub.add_parser("bench", help="time the primitives and protocol steps")
    p.add_argument("--bits", type=_int_tuple, default=(512, 768, 1024, 1280),
                   metavar="B1,B2,...", help="modulus sizes (default 512,768,1024,1280)")
    p.add_argument("--iters", type=int, default=500, help="iterations per subject")
    p.add_argument("--csv", help="output CSV file (default: stdout)")
    p.add_argument("--keybits", type=int, default=DEFAULT_KEYBITS)
    p.add_argument("--databits", type=int, default=200)
    p.add_argument("--randbits", type=int, default=500,
                   help="encryption exponent bits for enc/dec subjects")
    p.add_argument("--subjects", type=_str_tuple, default=SUBJECTS,
                   metavar="S1,S2,...", help="subset of subjects to run")
    p.add_argument("--seed", type=int, help="randomness seed for this run")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HesuiteError as e:
        print(f"hesuite: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
