"""Privacy-preserving outsourced calculation over encrypted data.

An additively homomorphic cryptosystem with two-phase decryption, proxy
re-encryption for requester access control, and four-party protocols that
let two non-colluding servers add and multiply encrypted values without
either one seeing the data.
"""

from .access import (
    AcsKeyMaterial,
    JointPublicKey,
    ReEncKey,
    dealer_register_acs,
    joint_public_key,
    reencrypt,
    rekeygen,
)
from .bcp import (
    DEFAULT_KEYBITS,
    Ciphertext,
    Domain,
    KeyPair,
    MasterKey,
    PublicParams,
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
from .bench import SUBJECTS, BenchConfig, BenchRecord, bench_run, read_csv, write_csv
from .engine import (
    AccessControlServer,
    CiphertextStore,
    CloudServiceProvider,
    DataRequester,
    Roles,
    SessionOutcome,
    acs_authorize,
    acs_finalize_add,
    acs_finalize_mult,
    csp_execute_add,
    csp_execute_mult,
    csp_ingest,
    dp_upload,
    dr_decrypt,
    dr_request,
    run_session,
)
from .errors import (
    AccessDenied,
    DomainError,
    HesuiteError,
    MalformedCiphertext,
    ParameterError,
    RangeError,
    RequestError,
    SerializationError,
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
from .serialize import KeyRecord, decode_entity, encode_entity
from .transport import (
    DirectTransport,
    Session,
    StreamTransport,
    Transport,
    TransportRecord,
    read_frame,
    write_frame,
)

__version__ = "0.1.0"
