"""A TLS 1.3-shaped handshake over pluggable KEM and signature suites.

Seven messages cross the wire, always in this order: ClientHello,
ServerHello, EncryptedExtensions, Certificate, CertificateVerify,
server Finished, client Finished.  The client's key share rides in the
ClientHello, the server's encapsulation in the ServerHello, and both
sides derive four handshake keys from the shared secret and a running
transcript hash.  The server authenticates with a toy certificate signed
by one pinned issuer (no chains, no expiry) and a CertificateVerify
signature over the transcript; both directions finish with a keyed-hash
MAC over everything seen so far.

Wire format: every message is a frame of one type tag byte, a four-byte
big-endian payload length, and the payload; multi-field payloads carry
four-byte length prefixes per field.  Byte accounting is exact and
client-centric: the transcript reports precisely what the client wrote
and read, so handshake sizes can be compared across suites down to the
byte.  Key and ciphertext sizes of schemes this package does not
implement are modeled by honest stub suites dialed to the registry's
published sizes.

The key derivation is a labeled-hash construction, not HKDF: real TLS
1.3 expands keys via HMAC-based HKDF, but this artifact deliberately
avoids reimplementing HMAC, and the labels ("c hs", "s hs", "fin c",
"fin s") keep the four keys domain-separated.

Divergence worth knowing: here the signature suite changes the size of
CertificateVerify and of the certificate itself, so handshake totals DO
vary with the signature scheme; measurement setups whose certificates
are classical see no such variation.
"""

from __future__ import annotations

import statistics
import threading
import time
from dataclasses import dataclass
from queue import SimpleQueue
from random import Random
from typing import Callable

from .errors import PqbenchError
from .hashing import DEFAULT_HASH, HashFunction
from .kex import KemInstance, SigInstance
from .registry import Kind, Registry, default_registry
from .serialize import MalformedFrame, pack, read_u32, u32, unpack
from .suites import sized_stub_kem, sized_stub_sig

KEY_LABELS = ("c hs", "s hs", "fin c", "fin s")

# wire sizes the registry does not publish, shared by every stub suite
STUB_CIPHERTEXT_BYTES = 1088
STUB_SIG_PUBLIC_BYTES = 1312
STUB_SIGNATURE_BYTES = 2420


class NegotiationFailure(PqbenchError):
    """No suite label both sides accept."""


class CertVerifyFailure(PqbenchError):
    """Certificate or CertificateVerify rejected."""


class MacMismatch(PqbenchError):
    """A Finished MAC did not match the transcript."""


class UnexpectedMessage(PqbenchError):
    """Protocol order violated."""


class ConnectionClosed(PqbenchError):
    """Peer went away mid-handshake."""


class InconsistentByteCounts(PqbenchError):
    """Byte counts varied across iterations of a fixed-size measurement."""


class MeasureAborted(PqbenchError):
    """A handshake failed partway through a measurement run."""

    def __init__(self, completed: int, cause: PqbenchError):
        super().__init__(f"aborted after {completed} completed iterations: {cause}")
        self.completed = completed
        self.cause = cause


# --- messages and their wire form ---


@dataclass(frozen=True)
class ClientHello:
    offered_suites: tuple[str, ...]
    kem_public: bytes


@dataclass(frozen=True)
class ServerHello:
    chosen_suite: str
    kem_ciphertext: bytes


@dataclass(frozen=True)
class EncryptedExtensions:
    payload: bytes = b""


@dataclass(frozen=True)
class Certificate:
    """Toy credential: one subject key vouched for by the pinned issuer."""

    subject: str
    sig_scheme: str
    subject_public_key: bytes
    issuer_signature: bytes


@dataclass(frozen=True)
class CertificateMessage:
    cert: Certificate


@dataclass(frozen=True)
class CertificateVerify:
    signature: bytes


@dataclass(frozen=True)
class FinishedServer:
    mac: bytes


@dataclass(frozen=True)
class FinishedClient:
    mac: bytes


_MESSAGE_TAGS = {
    ClientHello: 1,
    ServerHello: 2,
    EncryptedExtensions: 3,
    CertificateMessage: 4,
    CertificateVerify: 5,
    FinishedServer: 6,
    FinishedClient: 7,
}
_TAG_TYPES = {tag: cls for cls, tag in _MESSAGE_TAGS.items()}


def _label_bytes(text: str) -> bytes:
    return text.encode("utf-8")


def _decode_label(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise MalformedFrame(f"label is not valid utf-8: {e}") from e


def _encode_payload(msg) -> bytes:
    if isinstance(msg, ClientHello):
        return u32(len(msg.offered_suites)) + pack(
            *(_label_bytes(s) for s in msg.offered_suites), msg.kem_public
        )
    if isinstance(msg, ServerHello):
        return pack(_label_bytes(msg.chosen_suite), msg.kem_ciphertext)
    if isinstance(msg, EncryptedExtensions):
        return msg.payload
    if isinstance(msg, CertificateMessage):
        c = msg.cert
        return pack(_label_bytes(c.subject), _label_bytes(c.sig_scheme),
                    c.subject_public_key, c.issuer_signature)
    if isinstance(msg, CertificateVerify):
        return msg.signature
    if isinstance(msg, (FinishedServer, FinishedClient)):
        return msg.mac
    raise TypeError(f"not a handshake message: {msg!r}")


def encode_message(msg) -> bytes:
    payload = _encode_payload(msg)
    return bytes([_MESSAGE_TAGS[type(msg)]]) + u32(len(payload)) + payload


def decode_message(data: bytes):
    """Inverse of encode_message over a complete frame."""
    if len(data) < 5:
        raise MalformedFrame(f"frame needs at least 5 bytes, got {len(data)}")
    tag = data[0]
    plen, offset = read_u32(data, 1)
    payload = data[offset:]
    if len(payload) != plen:
        raise MalformedFrame(f"frame announces {plen} payload bytes, carries {len(payload)}")
    cls = _TAG_TYPES.get(tag)
    if cls is None:
        raise MalformedFrame(f"unknown message tag {tag}")
    if cls is ClientHello:
        count, at = read_u32(payload, 0)
        chunks = unpack(payload[at:], count + 1)
        return ClientHello(tuple(_decode_label(c) for c in chunks[:-1]), chunks[-1])
    if cls is ServerHello:
        label, ct = unpack(payload, 2)
        return ServerHello(_decode_label(label), ct)
    if cls is EncryptedExtensions:
        return EncryptedExtensions(payload)
    if cls is CertificateMessage:
        subject, scheme, key, sig = unpack(payload, 4)
        return CertificateMessage(
            Certificate(_decode_label(subject), _decode_label(scheme), key, sig)
        )
    if cls is CertificateVerify:
        return CertificateVerify(payload)
    if cls is FinishedServer:
        return FinishedServer(payload)
    return FinishedClient(payload)


# --- transports ---


class MemoryEndpoint:
    """One end of an in-memory duplex byte stream.

    send_hook, when set, may rewrite outgoing bytes; tests use it to
    corrupt frames in flight.  Counters track post-hook sizes.
    """

    def __init__(self, inbox: SimpleQueue, outbox: SimpleQueue, send_hook=None):
        self._inbox = inbox
        self._outbox = outbox
        self._hook = send_hook
        self._buffer = b""
        self._closed = False
        self.bytes_sent = 0
        self.bytes_received = 0

    def send(self, data: bytes) -> None:
        if self._closed:
            raise ConnectionClosed("send on closed endpoint")
        if self._hook is not None:
            data = self._hook(data)
        self.bytes_sent += len(data)
        self._outbox.put(data)

    def recv_exact(self, n: int) -> bytes:
        while len(self._buffer) < n:
            chunk = self._inbox.get()
            if chunk is None:
                self._inbox.put(None)  # EOF stays visible to later reads
                raise ConnectionClosed(
                    f"peer closed with {len(self._buffer)} of {n} bytes available"
                )
            self._buffer += chunk
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        self.bytes_received += n
        return out

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            self._outbox.put(None)


def memory_pair(client_send_hook=None, server_send_hook=None):
    """(client endpoint, server endpoint) joined back to back."""
    to_client: SimpleQueue = SimpleQueue()
    to_server: SimpleQueue = SimpleQueue()
    client = MemoryEndpoint(to_client, to_server, client_send_hook)
    server = MemoryEndpoint(to_server, to_client, server_send_hook)
    return client, server


class SocketConnection:
    """The same contract over a TCP socket."""

    def __init__(self, sock):
        self._sock = sock
        self.bytes_sent = 0
        self.bytes_received = 0

    def send(self, data: bytes) -> None:
        self._sock.sendall(data)
        self.bytes_sent += len(data)

    def recv_exact(self, n: int) -> bytes:
        buf = b""
        while len(buf) < n:
            got = self._sock.recv(n - len(buf))
            if not got:
                raise ConnectionClosed(f"socket closed with {len(buf)} of {n} bytes read")
            buf += got
        self.bytes_received += n
        return buf

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


def read_message(conn):
    """One framed message off the wire: (decoded message, raw frame)."""
    header = conn.recv_exact(5)
    plen, _ = read_u32(header, 1)
    raw = header + conn.recv_exact(plen)
    return decode_message(raw), raw


def _expect(conn, cls):
    msg, raw = read_message(conn)
    if not isinstance(msg, cls):
        raise UnexpectedMessage(f"wanted {cls.__name__}, got {type(msg).__name__}")
    return msg, raw


# --- suites, certificates, key schedule ---


@dataclass(frozen=True)
class SuiteConfig:
    kem: KemInstance
    sig: SigInstance
    hash: HashFunction
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("suite label must be nonempty")


@dataclass(frozen=True)
class SessionKeys:
    client_hs: bytes
    server_hs: bytes
    fin_c: bytes
    fin_s: bytes


def derive_keys(shared_secret: bytes, transcript_hash: bytes,
                h: HashFunction) -> SessionKeys:
    """Four domain-separated handshake keys (labeled hash, not HKDF)."""
    if not shared_secret:
        raise ValueError("shared secret must be nonempty")
    return SessionKeys(
        *(h(shared_secret + transcript_hash + label.encode()) for label in KEY_LABELS)
    )


def _keys_digest(keys: SessionKeys, h: HashFunction) -> bytes:
    return h(keys.client_hs + keys.server_hs + keys.fin_c + keys.fin_s)


def certificate_signing_bytes(cert: Certificate) -> bytes:
    """What the issuer signs: subject, scheme name, and subject key."""
    return pack(_label_bytes(cert.subject), _label_bytes(cert.sig_scheme),
                cert.subject_public_key)


def pinned_issuer(sig: SigInstance) -> tuple[bytes, bytes]:
    """The well-known issuer keypair for a signature scheme.

    Derived from a fixed seed so every party can recompute it; this is
    the single trust anchor (no chains).
    """
    seed = DEFAULT_HASH(b"pqbench pinned issuer: " + sig.name.encode())
    return sig.keypair(Random(seed))


@dataclass(frozen=True)
class Identity:
    certificate: Certificate
    sig_secret: bytes


def make_identity(sig: SigInstance, subject: str, rng: Random) -> Identity:
    _, issuer_secret = pinned_issuer(sig)
    public, secret = sig.keypair(rng)
    body = Certificate(subject, sig.name, public, b"")
    issuer_sig = sig.sign(issuer_secret, certificate_signing_bytes(body))
    return Identity(Certificate(subject, sig.name, public, issuer_sig), secret)


def verify_certificate(cert: Certificate, sig: SigInstance) -> bool:
    issuer_public, _ = pinned_issuer(sig)
    return sig.verify(issuer_public, certificate_signing_bytes(cert),
                      cert.issuer_signature)


# --- the two state machines ---


@dataclass(frozen=True)
class SideResult:
    key_digest: bytes
    messages: tuple[tuple[str, int], ...]
    read_bytes: int
    write_bytes: int


class _Trace:
    """Wire-order message log plus the running concatenated transcript."""

    def __init__(self):
        self.messages: list[tuple[str, int]] = []
        self.raw = b""
        self.read = 0
        self.write = 0

    def sent(self, msg, raw: bytes):
        self.messages.append((type(msg).__name__, len(raw)))
        self.raw += raw
        self.write += len(raw)

    def received(self, msg, raw: bytes):
        self.messages.append((type(msg).__name__, len(raw)))
        self.raw += raw
        self.read += len(raw)


def client_handshake(cfg: SuiteConfig, conn, rng: Random) -> SideResult:
    """Drive the client side to mutual Finished over conn."""
    h = cfg.hash
    trace = _Trace()
    try:
        kem_public, kem_secret = cfg.kem.keypair(rng)
        ch = ClientHello((cfg.label,), kem_public)
        ch_raw = encode_message(ch)
        conn.send(ch_raw)
        trace.sent(ch, ch_raw)

        sh, sh_raw = _expect(conn, ServerHello)
        trace.received(sh, sh_raw)
        if sh.chosen_suite != cfg.label:
            raise NegotiationFailure(f"server chose unoffered suite {sh.chosen_suite!r}")
        shared = cfg.kem.decaps(kem_secret, sh.kem_ciphertext)
        keys = derive_keys(shared, h(trace.raw), h)

        ee, ee_raw = _expect(conn, EncryptedExtensions)
        trace.received(ee, ee_raw)

        cert_msg, cert_raw = _expect(conn, CertificateMessage)
        trace.received(cert_msg, cert_raw)
        if cert_msg.cert.sig_scheme != cfg.sig.name:
            raise CertVerifyFailure(
                f"certificate carries {cert_msg.cert.sig_scheme!r}, suite uses {cfg.sig.name!r}"
            )
        if not verify_certificate(cert_msg.cert, cfg.sig):
            raise CertVerifyFailure("issuer signature rejected")
        sign_input = h(trace.raw)  # transcript through Certificate

        cv, cv_raw = _expect(conn, CertificateVerify)
        if not cfg.sig.verify(cert_msg.cert.subject_public_key, sign_input, cv.signature):
            raise CertVerifyFailure("CertificateVerify signature rejected")
        trace.received(cv, cv_raw)

        fin_s, fin_s_raw = _expect(conn, FinishedServer)
        if fin_s.mac != h(keys.fin_s + h(trace.raw)):
            raise MacMismatch("server Finished MAC rejected")
        trace.received(fin_s, fin_s_raw)

        fin_c = FinishedClient(h(keys.fin_c + h(trace.raw)))
        fin_c_raw = encode_message(fin_c)
        conn.send(fin_c_raw)
        trace.sent(fin_c, fin_c_raw)

        return SideResult(_keys_digest(keys, h), tuple(trace.messages),
                          trace.read, trace.write)
    finally:
        conn.close()


def server_handshake(cfg: SuiteConfig, identity: Identity, conn,
                     rng: Random) -> SideResult:
    """Drive the server side; sends nothing if negotiation fails."""
    h = cfg.hash
    trace = _Trace()
    try:
        ch, ch_raw = _expect(conn, ClientHello)
        trace.received(ch, ch_raw)
        if cfg.label not in ch.offered_suites:
            raise NegotiationFailure(
                f"no common suite in {ch.offered_suites!r} (serving {cfg.label!r})"
            )
        ciphertext, shared = cfg.kem.encaps(ch.kem_public, rng)

        def send(msg):
            raw = encode_message(msg)
            conn.send(raw)
            trace.sent(msg, raw)
            return raw

        send(ServerHello(cfg.label, ciphertext))
        keys = derive_keys(shared, h(trace.raw), h)
        send(EncryptedExtensions())
        send(CertificateMessage(identity.certificate))
        sign_input = h(trace.raw)
        send(CertificateVerify(cfg.sig.sign(identity.sig_secret, sign_input)))
        send(FinishedServer(h(keys.fin_s + h(trace.raw))))

        fin_c, fin_c_raw = _expect(conn, FinishedClient)
        if fin_c.mac != h(keys.fin_c + h(trace.raw)):
            raise MacMismatch("client Finished MAC rejected")
        trace.received(fin_c, fin_c_raw)

        return SideResult(_keys_digest(keys, h), tuple(trace.messages),
                          trace.read, trace.write)
    finally:
        conn.close()


# --- orchestration ---


@dataclass(frozen=True)
class HandshakeTranscript:
    messages: tuple[tuple[str, int], ...]
    client_read_bytes: int
    client_write_bytes: int
    wall_time_us: float
    client_key_digest: bytes
    server_key_digest: bytes


def run_handshake(client_cfg: SuiteConfig, server_cfg: SuiteConfig,
                  transport=None, rng: Random | None = None,
                  clock: Callable[[], int] = time.monotonic_ns) -> HandshakeTranscript:
    """One complete handshake, server on a helper thread.

    transport is a (client endpoint, server endpoint) pair, by default a
    fresh in-memory one.  Failures on either side unblock the peer by
    closing the transport; the server's error wins when both sides fail,
    since the client usually just sees the connection drop.
    """
    rng = rng if rng is not None else Random()
    client_end, server_end = transport if transport is not None else memory_pair()
    client_rng = Random(rng.randrange(2**63))
    server_rng = Random(rng.randrange(2**63))
    identity_rng = Random(rng.randrange(2**63))

    start = clock()
    identity = make_identity(server_cfg.sig, "server", identity_rng)
    outcome: dict = {}

    def serve():
        try:
            outcome["result"] = server_handshake(server_cfg, identity, server_end, server_rng)
        except PqbenchError as e:
            outcome["error"] = e

    worker = threading.Thread(target=serve, name="tls-server")
    worker.start()
    try:
        client_result = client_handshake(client_cfg, client_end, client_rng)
    except PqbenchError as client_error:
        worker.join()
        server_error = outcome.get("error")
        if isinstance(client_error, ConnectionClosed) and server_error is not None:
            raise server_error
        raise
    worker.join()
    end = clock()
    if "error" in outcome:
        raise outcome["error"]
    server_result = outcome["result"]

    return HandshakeTranscript(
        messages=client_result.messages,
        client_read_bytes=client_result.read_bytes,
        client_write_bytes=client_result.write_bytes,
        wall_time_us=(end - start) / 1000,
        client_key_digest=client_result.key_digest,
        server_key_digest=server_result.key_digest,
    )


@dataclass(frozen=True)
class MeasureResult:
    iterations: int
    mean_us: float
    stddev_us: float
    bytes_read: int
    bytes_written: int


def measure_handshake(cfg: SuiteConfig, transport_factory=memory_pair,
                      iterations: int = 50, rng: Random | None = None,
                      clock: Callable[[], int] = time.monotonic_ns) -> MeasureResult:
    """Run the handshake repeatedly with fresh keys and report client-side
    wall-time statistics plus the (constant) byte counts."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = rng if rng is not None else Random()
    durations = []
    reads, writes = set(), set()
    for completed in range(iterations):
        try:
            t = run_handshake(cfg, cfg, transport_factory(), rng, clock)
        except PqbenchError as e:
            raise MeasureAborted(completed, e) from e
        if t.client_key_digest != t.server_key_digest:
            raise MeasureAborted(completed, PqbenchError("key digests diverged"))
        durations.append(t.wall_time_us)
        reads.add(t.client_read_bytes)
        writes.add(t.client_write_bytes)
    if len(reads) != 1 or len(writes) != 1:
        raise InconsistentByteCounts(
            f"read sizes {sorted(reads)}, write sizes {sorted(writes)}"
        )
    return MeasureResult(
        iterations=iterations,
        mean_us=statistics.fmean(durations),
        stddev_us=statistics.stdev(durations) if len(durations) > 1 else 0.0,
        bytes_read=reads.pop(),
        bytes_written=writes.pop(),
    )


# --- registry-sized stub suites ---


def stub_suite(label: str, public_key_bytes: int,
               ciphertext_bytes: int = STUB_CIPHERTEXT_BYTES, *,
               sig_public_bytes: int = STUB_SIG_PUBLIC_BYTES,
               signature_bytes: int = STUB_SIGNATURE_BYTES,
               h: HashFunction = DEFAULT_HASH) -> SuiteConfig:
    """Honest stub suite with externally dialed wire sizes."""
    return SuiteConfig(
        kem=sized_stub_kem(f"{label}-kem", public_key_bytes, ciphertext_bytes, h),
        sig=sized_stub_sig("stub-sig", sig_public_bytes, signature_bytes, h),
        hash=h,
        label=label,
    )


def registry_kem_suites(registry: Registry | None = None,
                        h: HashFunction = DEFAULT_HASH) -> list[SuiteConfig]:
    """One stub suite per registry KEM, public key sized per the registry
    and ciphertext fixed at the shared stub size.  Handshake totals then
    rank the KEMs purely by published key size."""
    registry = registry if registry is not None else default_registry()
    return [
        stub_suite(m.name, m.public_key_bytes, h=h)
        for m in registry.schemes(Kind.KEM)
    ]


def handshake_total_bytes(cfg: SuiteConfig, rng: Random | None = None) -> tuple[int, int, int]:
    """(client read, client write, total) for one handshake of cfg."""
    t = run_handshake(cfg, cfg, rng=rng if rng is not None else Random(0))
    return t.client_read_bytes, t.client_write_bytes, t.client_read_bytes + t.client_write_bytes
