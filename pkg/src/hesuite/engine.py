"""Protocol engine: party roles and the blinded ADD/MULT computations.

Four roles cooperate so that no single server learns the data.  The data
provider (DP) encrypts values under the joint key and uploads them.  The
cloud service provider (CSP) stores ciphertexts and runs the homomorphic
leg of each computation, masking intermediate values with fresh
randomness.  The access control server (ACS) authorizes requesters,
finishes decryption of masked values only, and re-encrypts the unmasking
material to the requester.  The data requester (DR) receives a ciphertext
under its own key and decrypts locally.

A computation session is exactly four messages: DR -> ACS (request),
ACS -> CSP (authorized request), CSP -> ACS (work package), ACS -> DR
(result).  The module-level functions implement the individual steps; the
party classes wire them to a transport, and run_session drives a full
round trip.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .access import AcsKeyMaterial, JointPublicKey, reencrypt, rekeygen
from .bcp import (
    Ciphertext,
    Domain,
    KeyPair,
    PublicParams,
    decrypt,
    encrypt,
    hom_add,
    hom_negate,
    hom_scalar_mul,
    pdec1,
    pdec2,
)
from .errors import (
    AccessDenied,
    DomainError,
    HesuiteError,
    ParameterError,
    RequestError,
    SessionError,
    UnknownId,
)
from .messages import (
    AddPackage,
    AuthorizedRequest,
    ComputeRequest,
    MultPackage,
    Op,
    ResultMsg,
    UploadMsg,
)
from .numtheory import default_rng, gcd, invert
from .transport import Transport, TransportRecord


class CiphertextStore:
    """CSP-side table of uploaded ciphertexts, keyed by opaque ids."""

    def __init__(self):
        self._entries: dict[str, Ciphertext] = {}
        self._lock = threading.Lock()

    def put(self, ct: Ciphertext, cid: str | None = None) -> str:
        """Store a ciphertext under a fresh id, or under ``cid`` when
        restoring a persisted store."""
        if ct.domain is not Domain.JOINT:
            raise DomainError(f"store only holds joint-key ciphertexts, got {ct.domain.value}")
        if cid is None:
            cid = uuid.uuid4().hex
        with self._lock:
            if cid in self._entries:
                raise RequestError(f"duplicate ciphertext id {cid!r}")
            self._entries[cid] = ct
        return cid

    def get(self, cid: str) -> Ciphertext:
        try:
            return self._entries[cid]
        except KeyError:
            raise UnknownId(f"no ciphertext stored under id {cid!r}") from None

    def ids(self) -> list[str]:
        return list(self._entries)

    def __len__(self) -> int:
        return len(self._entries)


def dp_upload(pp: PublicParams, joint_pk: JointPublicKey, values: Iterable[int],
              rng=None) -> UploadMsg:
    """Encrypt plaintext values under the joint key for upload."""
    rng = rng or default_rng()
    cts = tuple(
        encrypt(pp, joint_pk.pk_joint, v, rng, domain=Domain.JOINT) for v in values
    )
    return UploadMsg(ciphertexts=cts)


def csp_ingest(store: CiphertextStore, msg: UploadMsg) -> list[str]:
    """Store every uploaded ciphertext; returns the assigned ids in order."""
    return [store.put(ct) for ct in msg.ciphertexts]


def dr_request(op: Op, ids: Sequence[str], pk_dr: int) -> ComputeRequest:
    return ComputeRequest(op=op, ids=tuple(ids), requester_pk=pk_dr)


def acs_authorize(acs: AcsKeyMaterial, req: ComputeRequest, pp: PublicParams,
                  allowlist, *, request_id: str | None = None) -> AuthorizedRequest:
    """Check the requester against the allowlist and issue the CSP-bound
    request carrying a re-encryption key in place of the requester key."""
    if req.requester_pk not in allowlist:
        raise AccessDenied("requester public key is not authorized")
    rk = rekeygen(acs, req.requester_pk, pp)
    return AuthorizedRequest(
        op=req.op,
        ids=req.ids,
        rk=rk.rk,
        request_id=request_id if request_id is not None else uuid.uuid4().hex,
    )


def csp_execute_add(store: CiphertextStore, auth: AuthorizedRequest, sk_csp: int,
                    pp: PublicParams, rng=None, *, noise: int | None = None) -> AddPackage:
    """Sum the referenced ciphertexts homomorphically, strip the CSP key
    share, and mask the underlying sum with additive noise.

    The package carries the masked partial ciphertext plus the noise
    encrypted under the re-encryption key, so only the requester can
    remove the mask.  ``noise`` overrides the sampled mask for tests.
    """
    if auth.op is not Op.ADD:
        raise RequestError(f"addition executor got a {auth.op.value} request")
    rng = rng or default_rng()
    combined = store.get(auth.ids[0])
    for cid in auth.ids[1:]:
        combined = hom_add(pp, combined, store.get(cid))
    partial = pdec1(pp, sk_csp, combined)
    delta = rng.randrange(0, pp.n) if noise is None else noise
    if not 0 <= delta < pp.n:
        raise RequestError("additive noise out of range")
    blinded = Ciphertext(
        a=partial.a,
        b=partial.b * (1 + delta * pp.n) % pp.n_sq,
        domain=Domain.ACS,
    )
    noise_ct = encrypt(pp, auth.rk, delta, rng, domain=Domain.RK)
    return AddPackage(blinded=blinded, noise_ct=noise_ct, request_id=auth.request_id)


def acs_finalize_add(acs: AcsKeyMaterial, pkg: AddPackage, pk_dr: int,
                     pp: PublicParams, rng=None, *, view: list | None = None) -> ResultMsg:
    """Decrypt the masked sum, re-encrypt everything to the requester, and
    cancel the mask homomorphically.

    The ACS sees only the masked value; ``view`` collects it for tests
    that check the mask leaks nothing.
    """
    rng = rng or default_rng()
    masked = pdec2(pp, acs.b, pkg.blinded)
    if view is not None:
        view.append(masked)
    noise_dr = reencrypt(acs, pkg.noise_ct, pp)
    masked_ct = encrypt(pp, pk_dr, masked, rng, domain=Domain.DR)
    result = hom_add(pp, masked_ct, hom_negate(pp, noise_dr))
    return ResultMsg(result=result, request_id=pkg.request_id)


def _sample_unit(pp: PublicParams, rng, max_attempts: int = 4096) -> int:
    for _ in range(max_attempts):
        r = rng.randrange(1, pp.n)
        if gcd(r, pp.n) == 1:
            return r
    raise ParameterError("could not sample a unit mod N")


def csp_execute_mult(store: CiphertextStore, auth: AuthorizedRequest, sk_csp: int,
                     pp: PublicParams, rng=None, *,
                     blinding: Sequence[int] | None = None) -> MultPackage:
    """Strip the CSP key share from each factor and blind it with a fresh
    multiplicative mask; the product of all masks is cancelled by the
    inverse mask shipped to the requester under the re-encryption key.

    ``blinding`` overrides the sampled masks for tests; each override must
    be a unit mod N.
    """
    if auth.op is not Op.MULT:
        raise RequestError(f"multiplication executor got a {auth.op.value} request")
    if len(auth.ids) < 2:
        raise RequestError("multiplication needs at least two operands")
    rng = rng or default_rng()
    if blinding is None:
        masks = [_sample_unit(pp, rng) for _ in auth.ids]
    else:
        if len(blinding) != len(auth.ids):
            raise RequestError("one blinding factor per operand required")
        for r in blinding:
            if not 1 <= r < pp.n or gcd(r, pp.n) != 1:
                raise RequestError("blinding factors must be units mod N")
        masks = list(blinding)
    blinded = []
    for cid, r in zip(auth.ids, masks):
        partial = pdec1(pp, sk_csp, store.get(cid))
        blinded.append(hom_scalar_mul(pp, partial, r))
    mask_prod = 1
    for r in masks:
        mask_prod = mask_prod * r % pp.n
    unblinder = invert(mask_prod, pp.n)
    unblinder_ct = encrypt(pp, auth.rk, unblinder, rng, domain=Domain.RK)
    return MultPackage(
        blinded_list=tuple(blinded),
        unblinder_ct=unblinder_ct,
        request_id=auth.request_id,
    )


def acs_finalize_mult(acs: AcsKeyMaterial, pkg: MultPackage, pp: PublicParams, *,
                      view: list | None = None) -> ResultMsg:
    """Decrypt the masked factors, multiply them, and raise the
    re-encrypted inverse mask to that power, which cancels every mask and
    leaves the requester-keyed product.

    The ACS sees only masked factors and their product; ``view`` collects
    them for tests.
    """
    w = 1
    factors = []
    for ct in pkg.blinded_list:
        m = pdec2(pp, acs.b, ct)
        factors.append(m)
        w = w * m % pp.n
    if view is not None:
        view.extend(factors)
        view.append(w)
    unblinder_dr = reencrypt(acs, pkg.unblinder_ct, pp)
    result = hom_scalar_mul(pp, unblinder_dr, w)
    return ResultMsg(result=result, request_id=pkg.request_id)


def dr_decrypt(sk_dr: int, msg: ResultMsg, pp: PublicParams) -> int:
    if msg.result.domain is not Domain.DR:
        raise DomainError(f"result ciphertext is in domain {msg.result.domain.value}")
    return decrypt(pp, sk_dr, msg.result)


class CloudServiceProvider:
    """Storage plus the homomorphic leg of each computation."""

    def __init__(self, pp: PublicParams, keypair: KeyPair, store: CiphertextStore | None = None,
                 rng=None):
        self.pp = pp
        self.keypair = keypair
        self.store = store if store is not None else CiphertextStore()
        self.rng = rng or default_rng()

    def ingest(self, msg: UploadMsg) -> list[str]:
        return csp_ingest(self.store, msg)

    def handle(self, msg, ctx) -> AddPackage | MultPackage:
        if not isinstance(msg, AuthorizedRequest):
            raise RequestError(f"CSP cannot handle {type(msg).__name__}")
        if msg.op is Op.ADD:
            return csp_execute_add(self.store, msg, self.keypair.sk, self.pp, self.rng)
        return csp_execute_mult(self.store, msg, self.keypair.sk, self.pp, self.rng)


class AccessControlServer:
    """Authorization, finishing decryption of masked values, re-encryption.

    ``observed`` accumulates every plaintext this party gets to see, one
    (request_id, op, values) entry per finished session, so tests can
    check the protocol leaks nothing but masked values here.
    """

    def __init__(self, pp: PublicParams, key: AcsKeyMaterial, allowlist=None, rng=None):
        self.pp = pp
        self.key = key
        self.allowlist = set(allowlist) if allowlist is not None else set()
        self.rng = rng or default_rng()
        self.observed: list[tuple[str, Op, tuple[int, ...]]] = []
        self._pending: dict[str, int] = {}

    def allow(self, pk: int) -> None:
        self.allowlist.add(pk)

    def handle(self, msg, ctx) -> ResultMsg:
        if not isinstance(msg, ComputeRequest):
            raise RequestError(f"ACS cannot handle {type(msg).__name__}")
        auth = acs_authorize(self.key, msg, self.pp, self.allowlist)
        self._pending[auth.request_id] = msg.requester_pk
        try:
            pkg = ctx.request("csp", auth)
            view: list[int] = []
            if isinstance(pkg, AddPackage):
                result = acs_finalize_add(self.key, pkg, msg.requester_pk, self.pp,
                                          self.rng, view=view)
            elif isinstance(pkg, MultPackage):
                result = acs_finalize_mult(self.key, pkg, self.pp, view=view)
            else:
                raise RequestError(f"unexpected CSP reply {type(pkg).__name__}")
            if pkg.request_id != auth.request_id:
                raise RequestError("CSP reply carries a different request id")
        finally:
            self._pending.pop(auth.request_id, None)
        self.observed.append((auth.request_id, msg.op, tuple(view)))
        return result


class DataRequester:
    """Holds the requester keypair; issues requests and decrypts results."""

    def __init__(self, pp: PublicParams, keypair: KeyPair):
        self.pp = pp
        self.keypair = keypair

    def request(self, op: Op, ids: Sequence[str]) -> ComputeRequest:
        return dr_request(op, ids, self.keypair.pk)

    def decrypt_result(self, msg: ResultMsg) -> int:
        return dr_decrypt(self.keypair.sk, msg, self.pp)


@dataclass
class Roles:
    """The wired party set for one deployment."""

    pp: PublicParams
    csp: CloudServiceProvider
    acs: AccessControlServer
    dr: DataRequester

    def attach(self, transport: Transport) -> None:
        transport.bind("csp", self.csp.handle)
        transport.bind("acs", self.acs.handle)


@dataclass(frozen=True)
class SessionOutcome:
    """Decrypted result plus the full message trace of the session."""

    value: int
    request_id: str
    transcript: tuple[TransportRecord, ...] = field(repr=False)


def run_session(transport: Transport, roles: Roles, req: ComputeRequest) -> SessionOutcome:
    """Drive one computation session end to end over the transport.

    Any step failure surfaces as SessionError naming the failing hop.
    """
    roles.attach(transport)
    session = transport.session()
    result = session.request("dr", "acs", req)
    if not isinstance(result, ResultMsg):
        raise SessionError("acs", RequestError("session did not end in a result"))
    try:
        value = roles.dr.decrypt_result(result)
    except HesuiteError as e:
        raise SessionError("dr", e) from e
    return SessionOutcome(
        value=value,
        request_id=result.request_id,
        transcript=tuple(session.transcript),
    )
