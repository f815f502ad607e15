"""Registered KEM and signature instances over the package's schemes.

Everything here adapts a concrete scheme into the uniform KemInstance /
SigInstance contracts from kex.  Key material crosses the contract
boundary as bytes; secret keys for the hash-based, multivariate and
discrete-log signers are stored as short seeds and the full keypair is
regenerated deterministically at signing time, which keeps sign a pure
function of (secret, message) as the contract requires.  Schemes whose
signing is inherently randomized draw their randomness from a hash of
(secret, message) for the same reason.

The stub instances are test doubles: honest implementations of the
contracts with configurable key and payload sizes, used by the handshake
simulation to model wire costs of schemes this package does not
implement.
"""

from __future__ import annotations

from random import Random

from . import codecrypt, hashsig, lattice, mq, sigma
from .binmat import BinaryMatrix, invert_permutation
from .errors import DecodeFailure
from .hashing import DEFAULT_HASH, HashFunction
from .kex import (
    MAIN_CURVE,
    MAIN_GEN,
    MAIN_ORDER,
    DecapsFailure,
    KemInstance,
    SigInstance,
    ecdh_kem,
    kem_from_encryption,
)
from .serialize import MalformedFrame, pack, u32, unpack

_H = DEFAULT_HASH

LWE_PARAMS = lattice.guaranteed_params(n=4, q=521, m=8, b=10)
UOV_PARAMS = mq.UovParams(o=2, v=4, q=7)
# safe prime: g = 4 generates the order-2003 subgroup, so forged or
# cross-message challenges collide with probability 1/2003, not 1/17
DLOG_P, DLOG_G = 4007, 4
KEM_SECRET_BITS = 32
MSS_LEAVES = 8
OTS_MSG_BITS = 32


def _seed_rng(*parts: bytes) -> Random:
    return Random(_H(b"".join(parts)))


# --- LWE as a KEM ---


def _lwe_scalar_bits() -> int:
    return LWE_PARAMS.q.bit_length()


def _lwe_keygen(rng: Random) -> tuple[bytes, bytes]:
    kp = lattice.lwe_keygen(LWE_PARAMS, rng)
    pk = pack(
        *(
            b"".join(x.to_bytes(2, "big") for x in (*s.a, s.b))
            for s in kp.samples
        )
    )
    sk = b"".join(x.to_bytes(2, "big") for x in kp.secret)
    return pk, sk


def _lwe_parse_pk(pk: bytes) -> list[lattice.LweSample]:
    samples = []
    for chunk in unpack(pk, LWE_PARAMS.m):
        vals = [int.from_bytes(chunk[i : i + 2], "big") for i in range(0, len(chunk), 2)]
        samples.append(lattice.LweSample(tuple(vals[:-1]), vals[-1]))
    return samples


def _lwe_encrypt_bit(pk: bytes, bit: int, rng: Random) -> int:
    a, b = lattice.lwe_encrypt_bit(_lwe_parse_pk(pk), bit, LWE_PARAMS, rng)
    w = _lwe_scalar_bits()
    acc = 0
    for x in (*a, b):
        acc = (acc << w) | x
    return acc


def _lwe_decrypt_bit(sk: bytes, block: int) -> int:
    secret = tuple(
        int.from_bytes(sk[i : i + 2], "big") for i in range(0, len(sk), 2)
    )
    w = _lwe_scalar_bits()
    mask = (1 << w) - 1
    vals = [(block >> (w * i)) & mask for i in reversed(range(LWE_PARAMS.n + 1))]
    return lattice.lwe_decrypt_bit(secret, (tuple(vals[:-1]), vals[-1]), LWE_PARAMS)


def lwe_kem(h: HashFunction = _H) -> KemInstance:
    return kem_from_encryption(
        "lwe-toy",
        _lwe_keygen,
        _lwe_encrypt_bit,
        _lwe_decrypt_bit,
        KEM_SECRET_BITS,
        ciphertext_bits=(LWE_PARAMS.n + 1) * _lwe_scalar_bits(),
        h=h,
    )


# --- code-based encryption as a KEM ---


def _mceliece_keygen(rng: Random) -> tuple[bytes, bytes]:
    code = codecrypt.hamming_code(3)
    pk, sk = codecrypt.mceliece_keygen(code, rng)
    pk_bytes = codecrypt.serialize_code_matrix(pk.matrix, pk.t)
    sk_bytes = pack(
        codecrypt.serialize_code_matrix(sk.s_inverse, 0),
        b"".join(u32(x) for x in sk.perm_inverse),
    )
    return pk_bytes, sk_bytes


def _mceliece_encrypt_bit(pk: bytes, bit: int, rng: Random) -> int:
    matrix, t = codecrypt.deserialize_code_matrix(pk)
    return codecrypt.mceliece_encrypt(
        codecrypt.McEliecePublicKey(matrix, t), bit, rng
    )


def _mceliece_decrypt_bit(sk: bytes, block: int) -> int:
    s_inv_blob, perm_blob = unpack(sk, 2)
    s_inverse, _ = codecrypt.deserialize_code_matrix(s_inv_blob)
    perm_inverse = [
        int.from_bytes(perm_blob[i : i + 4], "big") for i in range(0, len(perm_blob), 4)
    ]
    code = codecrypt.hamming_code(3)
    private = codecrypt.McEliecePrivateKey(code, s_inverse, perm_inverse)
    m = codecrypt.mceliece_decrypt(private, block)
    if m >> 1:
        raise DecodeFailure(f"plaintext {m} is not a single bit")
    return m


def mceliece_kem(h: HashFunction = _H) -> KemInstance:
    # each secret bit rides its own length-7 codeword
    return kem_from_encryption(
        "mceliece-toy",
        _mceliece_keygen,
        _mceliece_encrypt_bit,
        _mceliece_decrypt_bit,
        KEM_SECRET_BITS,
        ciphertext_bits=7,
        h=h,
    )


# --- ECDH as a KEM ---


def ecdh_toy_kem(h: HashFunction = _H) -> KemInstance:
    return ecdh_kem(MAIN_CURVE, MAIN_GEN, MAIN_ORDER, h, name="ecdh-toy")


# --- stubs ---


def identity_stub_kem(h: HashFunction = _H) -> KemInstance:
    """Identity 'encryption': the ciphertext is the bit string itself."""
    return kem_from_encryption(
        "stub-kem",
        lambda rng: (b"", b""),
        lambda pk, bit, rng: bit,
        lambda sk, block: block,
        KEM_SECRET_BITS,
        ciphertext_bits=1,
        h=h,
    )


def _stretch(h: HashFunction, seed: bytes, size: int) -> bytes:
    out = bytearray()
    counter = 0
    while len(out) < size:
        out += h(seed + counter.to_bytes(4, "big"))
        counter += 1
    return bytes(out[:size])


def sized_stub_kem(name: str, public_bytes: int, ciphertext_bytes: int,
                   h: HashFunction = _H) -> KemInstance:
    """Honest KEM whose key and ciphertext sizes are dialed in from the
    outside; used to model wire costs of schemes not implemented here."""

    def keypair(rng: Random):
        seed = rng.randbytes(16)
        return _stretch(h, b"pk" + seed, public_bytes), seed

    def encaps(public: bytes, rng: Random):
        if len(public) != public_bytes:
            raise DecapsFailure(f"{name}: unexpected public key size {len(public)}")
        return _stretch(h, b"ct" + public, ciphertext_bytes), h(b"ss" + public)

    def decaps(secret: bytes, ciphertext: bytes):
        if len(ciphertext) != ciphertext_bytes:
            raise DecapsFailure(f"{name}: unexpected ciphertext size {len(ciphertext)}")
        return h(b"ss" + _stretch(h, b"pk" + secret, public_bytes))

    return KemInstance(name, keypair, encaps, decaps)


def sized_stub_sig(name: str, public_bytes: int, signature_bytes: int,
                   h: HashFunction = _H) -> SigInstance:
    """Honest fixed-size signatures: the signature is a keyed hash stretch,
    so verification genuinely depends on every byte."""

    def keypair(rng: Random):
        seed = rng.randbytes(16)
        return _stretch(h, b"sigpk" + seed, public_bytes), seed

    def sign(secret: bytes, msg: bytes):
        public = _stretch(h, b"sigpk" + secret, public_bytes)
        return _stretch(h, public + msg, signature_bytes)

    def verify(public: bytes, msg: bytes, signature: bytes):
        return signature == _stretch(h, public + msg, signature_bytes)

    return SigInstance(name, keypair, sign, verify)


# --- hash-based signers ---


def lamport_sig(h: HashFunction = _H) -> SigInstance:
    def keypair(rng: Random):
        seed = rng.randbytes(16)
        kp = hashsig.lamport_keygen(OTS_MSG_BITS, h, _seed_rng(b"lamport", seed))
        return pack(pack(*kp.public[0]), pack(*kp.public[1])), seed

    def sign(secret: bytes, msg: bytes):
        kp = hashsig.lamport_keygen(OTS_MSG_BITS, h, _seed_rng(b"lamport", secret))
        bits = hashsig.message_bits(h, msg, OTS_MSG_BITS)
        return pack(*hashsig.lamport_sign(kp, bits))

    def verify(public: bytes, msg: bytes, signature: bytes):
        try:
            list0, list1 = (unpack(half) for half in unpack(public, 2))
            sig = unpack(signature)
        except MalformedFrame:
            return False
        bits = hashsig.message_bits(h, msg, OTS_MSG_BITS)
        return hashsig.lamport_verify((list0, list1), bits, sig, h)

    return SigInstance("lamport", keypair, sign, verify)


def wots_sig(h: HashFunction = _H) -> SigInstance:
    params = hashsig.WotsParams(w=4, msg_bits=OTS_MSG_BITS)

    def keypair(rng: Random):
        seed = rng.randbytes(16)
        _, public = hashsig.wots_keygen(params, h, _seed_rng(b"wots", seed))
        return pack(*public), seed

    def sign(secret: bytes, msg: bytes):
        sk, _ = hashsig.wots_keygen(params, h, _seed_rng(b"wots", secret))
        bits = hashsig.message_bits(h, msg, params.msg_bits)
        return pack(*hashsig.wots_sign(params, sk, bits, h))

    def verify(public: bytes, msg: bytes, signature: bytes):
        try:
            pub = unpack(public)
            sig = unpack(signature)
        except MalformedFrame:
            return False
        bits = hashsig.message_bits(h, msg, params.msg_bits)
        return hashsig.wots_verify(params, pub, bits, sig, h)

    return SigInstance("wots", keypair, sign, verify)


def mss_sig(h: HashFunction = _H) -> SigInstance:
    def build(seed: bytes) -> hashsig.MssSigner:
        return hashsig.MssSigner(
            MSS_LEAVES, OTS_MSG_BITS, h, _seed_rng(b"mss", seed), stateless=True
        )

    def keypair(rng: Random):
        seed = rng.randbytes(16)
        return build(seed).root, seed

    def sign(secret: bytes, msg: bytes):
        return hashsig.serialize_mss_signature(build(secret).sign(msg))

    def verify(public: bytes, msg: bytes, signature: bytes):
        try:
            sig = hashsig.deserialize_mss_signature(signature)
            return hashsig.mss_verify(public, msg, sig, h)
        except hashsig.InvalidBundle:
            return False

    return SigInstance("mss", keypair, sign, verify)


# --- multivariate signer ---


def uov_sig(h: HashFunction = _H) -> SigInstance:
    def keypair(rng: Random):
        seed = rng.randbytes(16)
        kp = mq.uov_keygen(UOV_PARAMS, _seed_rng(b"uov", seed))
        return mq.serialize_system(kp.public), seed

    def sign(secret: bytes, msg: bytes):
        kp = mq.uov_keygen(UOV_PARAMS, _seed_rng(b"uov", secret))
        sig = mq.uov_sign(kp.private, msg, h, _seed_rng(b"uov-sign", secret, msg))
        return bytes(sig)

    def verify(public: bytes, msg: bytes, signature: bytes):
        try:
            system = mq.deserialize_system(public)
        except MalformedFrame:
            return False
        sig = tuple(signature)
        if len(sig) != system.n:
            return False
        return mq.uov_verify(system, msg, sig, h)

    return SigInstance("uov", keypair, sign, verify)


# --- discrete-log signer ---


def fs_dlog_sig(h: HashFunction = _H) -> SigInstance:
    setting = sigma.dlog_relation(DLOG_P, DLOG_G)

    def keypair(rng: Random):
        x, y = setting.keypair(rng)
        return y.to_bytes(8, "big"), x.to_bytes(8, "big")

    def sign(secret: bytes, msg: bytes):
        x = int.from_bytes(secret, "big")
        y = pow(setting.g, x, setting.p)
        sig = sigma.fs_sign(setting.relation, x, y, msg, h, _seed_rng(b"fs", secret, msg))
        return pack(sig.commitment, sig.response)

    def verify(public: bytes, msg: bytes, signature: bytes):
        try:
            commitment, response = unpack(signature, 2)
        except MalformedFrame:
            return False
        y = int.from_bytes(public, "big")
        return sigma.fs_verify(
            setting.relation, y, msg, sigma.FsSignature(commitment, response), h
        )

    return SigInstance("fs-dlog", keypair, sign, verify)


def builtin_kems(h: HashFunction = _H) -> dict[str, KemInstance]:
    kems = [ecdh_toy_kem(h), lwe_kem(h), mceliece_kem(h), identity_stub_kem(h)]
    return {k.name: k for k in kems}


def builtin_sigs(h: HashFunction = _H) -> dict[str, SigInstance]:
    sigs = [lamport_sig(h), wots_sig(h), mss_sig(h), uov_sig(h), fs_dlog_sig(h)]
    return {s.name: s for s in sigs}
