"""Simulated e-commerce to ERP integration secured with ECDH, ECC and HMAC."""

from .client import TransactionSummary, fetch_params, fetch_public_key, run_entity_a
from .crypto import (
    DecryptionFailed,
    EncryptionFailed,
    InfinityResult,
    InvalidPublicKey,
    KeyPair,
    OffCurve,
    decrypt_message,
    ecdh_shared_secret,
    encrypt_message,
    generate_keypair,
    generate_private_key,
    generate_public_key,
    hmac_sign,
    hmac_verify,
)
from .orders import OrderRecord, read_orders
from .params import MissingKey, ParseError, load_params, resolve_source, write_params_file
from .server import EntityB, ServerConfig, StartupError, serve_entity_b
from .wire import OrderEnvelope, seal

__all__ = [
    "TransactionSummary", "fetch_params", "fetch_public_key", "run_entity_a",
    "DecryptionFailed", "EncryptionFailed", "InfinityResult", "InvalidPublicKey", "KeyPair",
    "OffCurve", "decrypt_message", "ecdh_shared_secret", "encrypt_message", "generate_keypair",
    "generate_private_key", "generate_public_key", "hmac_sign", "hmac_verify",
    "OrderRecord", "read_orders",
    "MissingKey", "ParseError", "load_params", "resolve_source", "write_params_file",
    "EntityB", "ServerConfig", "StartupError", "serve_entity_b",
    "OrderEnvelope", "seal",
]
