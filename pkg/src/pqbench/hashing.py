"""Keyed iterated hash over a public 64-bit mixing permutation.

The package needs a hash it fully controls: deterministic across platforms,
adjustable output length, and cheap enough to call tens of thousands of
times in tests.  Cryptographic strength is explicitly not a goal here; the
schemes built on top only need determinism and good diffusion, and every
construction takes the hash as a parameter so a real one can be swapped in.

The core is mix64, the well-known splitmix64 finalizer: a fixed public
bijection on 64-bit words.  Four lanes of state absorb the input one 64-bit
word at a time, each absorption followed by a round that stirs every lane
through mix64.  Finalization absorbs the message length (so "ab","c" and
"a","bc" separate), runs blank rounds, then squeezes lanes as big-endian
words until enough output has accumulated.
"""

from dataclasses import dataclass, field
from typing import Callable

_MASK = (1 << 64) - 1


def mix64(x: int) -> int:
    """splitmix64 finalizer, a public permutation of 64-bit words."""
    x &= _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


def _round(lanes: list[int]) -> None:
    lanes[0] = mix64(lanes[0] ^ lanes[3])
    lanes[1] = mix64(lanes[1] + lanes[0])
    lanes[2] = mix64(lanes[2] ^ lanes[1])
    lanes[3] = mix64((lanes[3] + lanes[2]) & _MASK)


def _digest(data: bytes, key: bytes, output_bytes: int) -> bytes:
    # lane seeds: distinct constants perturbed by the key
    lanes = [mix64(0x9E3779B97F4A7C15 * (i + 1) + len(key)) for i in range(4)]
    for i in range(0, len(key), 8):
        lanes[(i // 8) % 4] ^= int.from_bytes(key[i : i + 8], "big")
        _round(lanes)

    for i in range(0, len(data), 8):
        lanes[0] ^= int.from_bytes(data[i : i + 8], "big")
        _round(lanes)

    lanes[1] ^= len(data)
    for _ in range(4):
        _round(lanes)

    out = bytearray()
    while len(out) < output_bytes:
        for lane in lanes:
            out += lane.to_bytes(8, "big")
        _round(lanes)
    return bytes(out[:output_bytes])


@dataclass(frozen=True)
class HashFunction:
    """A named hash with a fixed output length.

    Instances are callable.  Everything downstream (signatures, key
    derivation, Fiat-Shamir) takes one of these rather than a hard-coded
    algorithm.
    """

    name: str
    output_bytes: int
    apply: Callable[[bytes], bytes] = field(repr=False)

    def __call__(self, data: bytes) -> bytes:
        out = self.apply(data)
        if len(out) != self.output_bytes:
            raise ValueError(
                f"{self.name}: apply returned {len(out)} bytes, "
                f"declared {self.output_bytes}"
            )
        return out


def make_hash(output_bytes: int = 32, key: bytes = b"") -> HashFunction:
    """Build the default keyed hash at the requested output length."""
    name = f"pqh{8 * output_bytes}"
    if key:
        name += f"-k{key.hex()}"
    return HashFunction(name, output_bytes, lambda data: _digest(data, key, output_bytes))


DEFAULT_HASH = make_hash(32)
