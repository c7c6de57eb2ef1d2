"""JSON wire format for order envelopes.

Big integers travel as decimal strings and byte strings as lowercase hex.
The HMAC covers C1, the sender key, the request id and the ciphertext, so a
corrupted field anywhere in the envelope fails verification.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..ecmath import CurveParams, ECPoint
from .crypto import decrypt_message, ecdh_shared_secret, encrypt_message, hmac_sign, hmac_verify

HMAC_LENGTH = 32


class MalformedEnvelope(ValueError):
    pass


@dataclass(frozen=True)
class OrderEnvelope:
    c1: ECPoint
    ciphertext: bytes
    hmac_tag: bytes
    sender_public: ECPoint
    payload_meta: dict = field(default_factory=dict)

    def to_wire(self) -> dict:
        return {
            "C1x": str(self.c1.x),
            "C1y": str(self.c1.y),
            "ciphertext": self.ciphertext.hex(),
            "hmac": self.hmac_tag.hex(),
            "sender_x": str(self.sender_public.x),
            "sender_y": str(self.sender_public.y),
            "payload_meta": dict(self.payload_meta),
        }

    @classmethod
    def from_wire(cls, body: dict) -> "OrderEnvelope":
        try:
            tag = bytes.fromhex(body["hmac"])
            envelope = cls(
                c1=ECPoint(int(body["C1x"]), int(body["C1y"])),
                ciphertext=bytes.fromhex(body["ciphertext"]),
                hmac_tag=tag,
                sender_public=ECPoint(int(body["sender_x"]), int(body["sender_y"])),
                payload_meta=dict(body.get("payload_meta") or {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedEnvelope(f"bad envelope: {exc}") from exc
        if len(tag) != HMAC_LENGTH:
            raise MalformedEnvelope("hmac tag must be 32 bytes")
        return envelope

    @property
    def request_id(self) -> str:
        return str(self.payload_meta.get("request_id", ""))


def mac_input(c1: ECPoint, sender_public: ECPoint, request_id: str, ciphertext: bytes,
              params: CurveParams) -> bytes:
    width = (params.p.bit_length() + 7) // 8
    parts = [
        *(v.to_bytes(width, "big") for v in (c1.x, c1.y, sender_public.x, sender_public.y)),
        len(request_id.encode()).to_bytes(4, "big"), request_id.encode(),
        ciphertext,
    ]
    return b"".join(parts)


def seal(plaintext: bytes, sender_private: int, sender_public: ECPoint, recipient_public: ECPoint,
         params: CurveParams, rng: random.Random, request_id: str = "") -> OrderEnvelope:
    """Encrypt for the recipient and authenticate with the ECDH-derived key."""
    c1, ciphertext = encrypt_message(plaintext, recipient_public, params, rng)
    key = ecdh_shared_secret(sender_private, recipient_public, params)
    tag = hmac_sign(key, mac_input(c1, sender_public, request_id, ciphertext, params))
    return OrderEnvelope(c1, ciphertext, tag, sender_public, {"request_id": request_id})


def verify_envelope(envelope: OrderEnvelope, recipient_private: int, params: CurveParams) -> bool:
    """Check the tag; raises crypto.OffCurve for a bad sender key."""
    key = ecdh_shared_secret(recipient_private, envelope.sender_public, params)
    width = (params.p.bit_length() + 7) // 8
    values = (envelope.c1.x, envelope.c1.y)
    if any(v < 0 or v.bit_length() > 8 * width for v in values):
        return False
    message = mac_input(envelope.c1, envelope.sender_public, envelope.request_id,
                        envelope.ciphertext, params)
    return hmac_verify(key, message, envelope.hmac_tag)


def open_envelope(envelope: OrderEnvelope, recipient_private: int, params: CurveParams) -> bytes:
    return decrypt_message(envelope.c1, envelope.ciphertext, recipient_private, params)
