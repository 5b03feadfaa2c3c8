"""Message types exchanged between the four party roles.

A compute session is exactly four messages: the requester's ComputeRequest
to the ACS, the AuthorizedRequest the ACS forwards to the CSP, the blinded
data package the CSP returns, and the ResultMsg the ACS sends back.  The
packages carry the request_id so concurrent sessions stay correlated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .bcp import Ciphertext
from .errors import RequestError


class Op(enum.Enum):
    ADD = "add"
    MULT = "mult"


@dataclass(frozen=True)
class UploadMsg:
    """Joint-key ciphertexts a data provider sends to the CSP for storage."""

    ciphertexts: tuple[Ciphertext, ...]


@dataclass(frozen=True)
class ComputeRequest:
    """A data requester's ask: apply ``op`` to the stored ciphertexts ``ids``."""

    op: Op
    ids: tuple[str, ...]
    requester_pk: int

    def __post_init__(self):
        if len(self.ids) < 2:
            raise RequestError("a compute request needs at least two ids")
        if len(set(self.ids)) != len(self.ids):
            raise RequestError("request ids must be distinct")


@dataclass(frozen=True)
class AuthorizedRequest:
    """What the CSP sees: the request plus rk, minus the requester's identity."""

    op: Op
    ids: tuple[str, ...]
    rk: int
    request_id: str


@dataclass(frozen=True)
class AddPackage:
    """blinded = [m + delta]_ACS, noise_ct = [delta]_rk."""

    blinded: Ciphertext
    noise_ct: Ciphertext
    request_id: str


@dataclass(frozen=True)
class MultPackage:
    """blinded_list = [m_i * r_i]_ACS for each factor, unblinder_ct = [r3]_rk
    with r3 the inverse of the product of the r_i mod N."""

    blinded_list: tuple[Ciphertext, ...]
    unblinder_ct: Ciphertext
    request_id: str

    def __post_init__(self):
        if len(self.blinded_list) < 2:
            raise RequestError("a multiplication package needs at least two factors")


@dataclass(frozen=True)
class ResultMsg:
    """The DR-domain result ciphertext, correlated by request_id."""

    result: Ciphertext
    request_id: str


Message = (
    UploadMsg | ComputeRequest | AuthorizedRequest | AddPackage | MultPackage | ResultMsg
)
