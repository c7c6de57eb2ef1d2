"""
Encrypted orders between two entities
=====================================

Entity B serves its curve and public key over HTTP. Entity A encrypts each
order to B, tags it with an HMAC keyed by the ECDH secret and posts it.
"""

import random

from eccforge.simnet import EntityB, ServerConfig, run_entity_a, serve_entity_b
from eccforge.simnet.client import http_json

server: EntityB = serve_entity_b("secp256k1", config=ServerConfig(seed=3))
print("Entity B at", server.url)

summary = run_entity_a(server.url, duration=5.0, interval=0.0, rng=random.Random(4), max_orders=5)
print(summary.as_dict())
for rec in server.orders[:2]:
    print(rec.order_id, rec.plaintext[:80])

# a tampered envelope is refused
status, body = http_json("POST", f"{server.url}/order",
                         {"C1x": "1", "C1y": "2", "ciphertext": "00", "hmac": "00" * 32,
                          "sender_x": "1", "sender_y": "2"})
print("tampered:", status, body)

server.stop()
