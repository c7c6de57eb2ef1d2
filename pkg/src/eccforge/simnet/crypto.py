"""Key generation, ECDH, the single-byte XOR cipher and HMAC-SHA256.

Warning: ``encrypt_message`` XORs every byte with the same key byte (the low
byte of the shared point's x). It provides no real confidentiality; it is
here to reproduce the simulated integration, with HMAC providing integrity.
"""

from __future__ import annotations

import hashlib
import hmac
import random
from dataclasses import dataclass

from ..ecmath import CurveParams, ECPoint, ec_scalar_multiplication, is_on_curve


class OffCurve(ValueError):
    pass


class InvalidPublicKey(OffCurve):
    pass


class InfinityResult(ValueError):
    pass


class EncryptionFailed(ValueError):
    pass


class DecryptionFailed(ValueError):
    pass


@dataclass(frozen=True)
class KeyPair:
    private: int
    public: ECPoint


def is_valid_point(P: ECPoint, params: CurveParams) -> bool:
    if P.is_infinity or P.x is None or P.y is None:
        return False
    return 0 <= P.x < params.p and 0 <= P.y < params.p and is_on_curve(P, params.a, params.b, params.p)


def generate_private_key(params: CurveParams, rng: random.Random) -> int:
    """Uniform scalar in [1, n - 1]."""
    if params.n < 3:
        raise ValueError("group order too small for key generation")
    return 1 + rng.randrange(params.n - 1)


def generate_public_key(private_key: int, params: CurveParams) -> ECPoint:
    return ec_scalar_multiplication(params.G, private_key, params)


def generate_keypair(params: CurveParams, rng: random.Random) -> KeyPair:
    while True:
        private = generate_private_key(params, rng)
        public = generate_public_key(private, params)
        if not public.is_infinity:
            return KeyPair(private, public)


def int_to_bytes(value: int) -> bytes:
    """Minimal big-endian encoding; zero encodes as a single zero byte."""
    return value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big")


def ecdh_shared_secret(own_private: int, peer_public: ECPoint, params: CurveParams) -> bytes:
    """SHA-256 of the shared point's x coordinate; doubles as the HMAC key."""
    if not is_valid_point(peer_public, params):
        raise OffCurve("peer public key is not a point on the curve")
    shared = ec_scalar_multiplication(peer_public, own_private, params)
    if shared.is_infinity:
        raise InfinityResult("shared point is the point at infinity")
    return hashlib.sha256(int_to_bytes(shared.x)).digest()


def encrypt_message(message: bytes, recipient_public: ECPoint, params: CurveParams,
                    rng: random.Random) -> tuple[ECPoint, bytes]:
    if not is_valid_point(recipient_public, params):
        raise InvalidPublicKey("Public key is not a valid point on the elliptic curve")
    k = generate_private_key(params, rng)
    c1 = ec_scalar_multiplication(params.G, k, params)
    c2 = ec_scalar_multiplication(recipient_public, k, params)
    if c2.is_infinity or c1.is_infinity:
        raise EncryptionFailed("Encryption failed: kQ resulted in the point at infinity")
    key_byte = c2.x & 0xFF
    return c1, bytes(byte ^ key_byte for byte in message)


def decrypt_message(c1: ECPoint, ciphertext: bytes, private_key: int, params: CurveParams) -> bytes:
    if not is_valid_point(c1, params):
        raise DecryptionFailed("C1 is not a point on the curve")
    c2 = ec_scalar_multiplication(c1, private_key, params)
    if c2.is_infinity:
        raise DecryptionFailed("private key times C1 is the point at infinity")
    key_byte = c2.x & 0xFF
    return bytes(byte ^ key_byte for byte in ciphertext)


def hmac_sign(key: bytes, message: bytes) -> bytes:
    return hmac.new(key, message, hashlib.sha256).digest()


def hmac_verify(key: bytes, message: bytes, tag: bytes) -> bool:
    return hmac.compare_digest(hmac_sign(key, message), tag)
