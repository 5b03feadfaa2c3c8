"""Message transport between the protocol parties.

A transport routes request/response pairs between named parties and records
every delivered message in a per-session transcript.  Two realizations are
provided: DirectTransport hands message objects straight to the receiving
handler, StreamTransport pushes canonical bytes through length-prefixed
in-memory pipes and hands the receiver the re-decoded object, so a session
run over it proves the wire format carries the whole protocol.

Handlers are called as handler(message, ctx); the ctx lets a party issue
nested requests of its own within the same session.  Each party processes
one inbound message at a time.
"""

from __future__ import annotations

import abc
import struct
import threading
from dataclasses import dataclass, field
from typing import Any, BinaryIO, Callable

from .bcp import PublicParams
from .errors import SerializationError, SessionError
from .serialize import decode_entity, encode_entity

_LEN = struct.Struct(">I")


def write_frame(stream, payload: bytes) -> None:
    """Write one length-prefixed frame (4-byte big-endian length, then payload)."""
    if len(payload) > 0xFFFFFFFF:
        raise SerializationError("frame payload too large")
    stream.write(_LEN.pack(len(payload)))
    stream.write(payload)


def read_frame(stream) -> bytes:
    """Read one length-prefixed frame; raises SerializationError on truncation."""
    header = stream.read(_LEN.size)
    if len(header) != _LEN.size:
        raise SerializationError("truncated frame header")
    (length,) = _LEN.unpack(header)
    payload = stream.read(length)
    if len(payload) != length:
        raise SerializationError("truncated frame payload")
    return payload


@dataclass(frozen=True)
class TransportRecord:
    """One delivered protocol message."""

    sender: str
    receiver: str
    message: Any


class Session:
    """Transcript scope for one protocol run."""

    def __init__(self, transport: "Transport"):
        self._transport = transport
        self.transcript: list[TransportRecord] = []

    def request(self, sender: str, receiver: str, message) -> Any:
        return self._transport._dispatch(self, sender, receiver, message)


class _HopContext:
    """Lets a handler issue nested requests as itself within the session."""

    def __init__(self, session: Session, me: str):
        self._session = session
        self.me = me

    def request(self, receiver: str, message) -> Any:
        return self._session.request(self.me, receiver, message)


class Transport(abc.ABC):
    def __init__(self):
        self._handlers: dict[str, Callable] = {}
        self._locks: dict[str, threading.Lock] = {}

    def bind(self, name: str, handler: Callable) -> None:
        """Register the handler that receives messages addressed to ``name``."""
        self._handlers[name] = handler
        self._locks.setdefault(name, threading.Lock())

    def session(self) -> Session:
        return Session(self)

    def _run_handler(self, session: Session, receiver: str, message) -> Any:
        try:
            handler = self._handlers[receiver]
        except KeyError:
            raise SessionError(receiver, KeyError(f"no party bound as {receiver!r}")) from None
        ctx = _HopContext(session, receiver)
        with self._locks[receiver]:
            try:
                return handler(message, ctx)
            except SessionError:
                raise
            except Exception as e:
                raise SessionError(receiver, e) from e

    @abc.abstractmethod
    def _dispatch(self, session: Session, sender: str, receiver: str, message) -> Any:
        raise NotImplementedError


class DirectTransport(Transport):
    """In-process transport passing message objects by reference."""

    def _dispatch(self, session, sender, receiver, message):
        session.transcript.append(TransportRecord(sender, receiver, message))
        reply = self._run_handler(session, receiver, message)
        session.transcript.append(TransportRecord(receiver, sender, reply))
        return reply


class _Pipe:
    """In-memory byte stream with blocking-free sequential read/write."""

    def __init__(self):
        self._buf = bytearray()
        self.lock = threading.Lock()

    def write(self, data: bytes) -> int:
        self._buf.extend(data)
        return len(data)

    def read(self, n: int) -> bytes:
        out = bytes(self._buf[:n])
        del self._buf[:n]
        return out


class StreamTransport(Transport):
    """Transport that serializes every hop through a byte pipe.

    Each ordered party pair gets its own pipe; the recorded transcript holds
    the objects as decoded on the receiving side.  Decoding validates
    ciphertext components against the supplied public parameters.
    """

    def __init__(self, params: PublicParams):
        super().__init__()
        self._params = params
        self._pipes: dict[tuple[str, str], _Pipe] = {}
        self._pipes_lock = threading.Lock()

    def _pipe(self, sender: str, receiver: str) -> _Pipe:
        with self._pipes_lock:
            return self._pipes.setdefault((sender, receiver), _Pipe())

    def _ship(self, sender: str, receiver: str, message) -> Any:
        pipe = self._pipe(sender, receiver)
        payload = encode_entity(message)
        with pipe.lock:
            write_frame(pipe, payload)
            data = read_frame(pipe)
        return decode_entity(data, self._params)

    def _dispatch(self, session, sender, receiver, message):
        try:
            delivered = self._ship(sender, receiver, message)
        except SerializationError as e:
            raise SessionError(receiver, e) from e
        session.transcript.append(TransportRecord(sender, receiver, delivered))
        reply = self._run_handler(session, receiver, delivered)
        try:
            returned = self._ship(receiver, sender, reply)
        except SerializationError as e:
            raise SessionError(sender, e) from e
        session.transcript.append(TransportRecord(receiver, sender, returned))
        return returned
