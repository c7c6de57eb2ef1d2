import hashlib
import json
import random
import urllib.request

import pytest

from eccforge.ecmath import ECPoint, ec_scalar_multiplication
from eccforge.simnet.client import ServerUnavailable, fetch_params, fetch_public_key, run_entity_a
from eccforge.simnet.crypto import (
    DecryptionFailed,
    InvalidPublicKey,
    OffCurve,
    decrypt_message,
    ecdh_shared_secret,
    encrypt_message,
    generate_keypair,
    generate_private_key,
    hmac_sign,
    hmac_verify,
)
from eccforge.simnet.orders import OrderRecord, read_orders
from eccforge.simnet.params import MissingKey, ParseError, load_params, parse_params, write_params_file
from eccforge.simnet.server import ServerConfig, StartupError, serve_entity_b
from eccforge.simnet.wire import OrderEnvelope, seal

from conftest import MID, TOY

SECP_P = 2 ** 256 - 2 ** 32 - 977
SECP_N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
SECP_GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
BP_P = 0xA9FB57DBA1EEA9BC3E660A909D838D726E3BF623D52620282013481D1F6E5377
BP_N = 0xA9FB57DBA1EEA9BC3E660A909D838D718C397AA3B561A6F7901E0E82974856A7


class ForcedK(random.Random):
    """PRNG whose first randrange yields k - 1, so generate_private_key returns k."""

    def __init__(self, k):
        super().__init__(0)
        self.k = k

    def randrange(self, *args, **kw):
        return self.k - 1


def test_bundled_curves():
    secp = load_params("secp256k1")
    assert (secp.p, secp.n, secp.h, secp.G.x) == (SECP_P, SECP_N, 1, SECP_GX)
    assert (secp.a, secp.b) == (0, 7)
    bp = load_params("4")
    assert (bp.p, bp.n, bp.h) == (BP_P, BP_N, 1)
    for params in (secp, bp):
        assert ec_scalar_multiplication(params.G, params.n, params).is_infinity
    assert load_params(None) == secp
    assert load_params("3") == secp


def test_param_file_round_trip(tmp_path):
    path = write_params_file(TOY, tmp_path / "ga_ecc_params.txt")
    text = path.read_text()
    assert [line.split("=")[0] for line in text.splitlines()] == ["p", "a", "b", "Gx", "Gy", "n", "h"]
    assert load_params("ga", tmp_path) == TOY
    assert load_params("1", tmp_path) == TOY


def test_param_file_errors(tmp_path):
    with pytest.raises(MissingKey):
        parse_params("p=17\na=2\nb=2\nGx=5\nGy=1\nn=19\n")
    with pytest.raises(ParseError):
        parse_params("p=seventeen\n")
    with pytest.raises(ParseError):
        parse_params("garbage\n")
    with pytest.raises(ValueError):
        write_params_file(TOY.__class__(2, 2, 17, ECPoint.infinity(), 19, 1), tmp_path / "x.txt")
    with pytest.raises(FileNotFoundError):
        load_params("pso", tmp_path)


def test_private_key_range():
    small = TOY.__class__(2, 2, 17, ECPoint(5, 1), 3, 1)
    rng = random.Random(0)
    assert {generate_private_key(small, rng) for _ in range(200)} == {1, 2}
    draws = [generate_private_key(TOY, rng) for _ in range(10 ** 4)]
    assert set(draws) == set(range(1, 19))


def test_ecdh_toy_example():
    pub_a = ec_scalar_multiplication(TOY.G, 3, TOY)
    pub_b = ec_scalar_multiplication(TOY.G, 5, TOY)
    fifteen_g = ec_scalar_multiplication(TOY.G, 15, TOY)
    want = hashlib.sha256(fifteen_g.x.to_bytes(1, "big")).digest()
    assert ecdh_shared_secret(3, pub_b, TOY) == want == ecdh_shared_secret(5, pub_a, TOY)
    with pytest.raises(OffCurve):
        ecdh_shared_secret(3, ECPoint(5, 2), TOY)


@pytest.mark.parametrize("source", ["secp256k1", "brainpoolP256r1"])
def test_ecdh_symmetry(source):
    params = load_params(source)
    rng = random.Random(1)
    for _ in range(10):
        a, b = generate_keypair(params, rng), generate_keypair(params, rng)
        assert ecdh_shared_secret(a.private, b.public, params) == ecdh_shared_secret(b.private, a.public, params)


def test_encryption_forced_k():
    recipient = ec_scalar_multiplication(TOY.G, 3, TOY)
    six_g = ec_scalar_multiplication(TOY.G, 6, TOY)
    message = b"order 42"
    c1, ct = encrypt_message(message, recipient, TOY, ForcedK(2))
    assert c1 == ec_scalar_multiplication(TOY.G, 2, TOY)
    assert ct == bytes(m ^ (six_g.x & 0xFF) for m in message)
    assert decrypt_message(c1, ct, 3, TOY) == message


def test_encryption_round_trip_and_edges():
    rng = random.Random(8)
    keys = generate_keypair(MID, rng)
    for size in (0, 1, 17, 4096):
        m = rng.randbytes(size)
        c1, ct = encrypt_message(m, keys.public, MID, rng)
        assert decrypt_message(c1, ct, keys.private, MID) == m
    with pytest.raises(InvalidPublicKey):
        encrypt_message(b"x", ECPoint(1, 7), MID, rng)
    with pytest.raises(DecryptionFailed):
        decrypt_message(ECPoint(1, 7), b"x", keys.private, MID)


def test_wrong_key_garbles_when_low_bytes_differ():
    rng = random.Random(3)
    c1, ct = encrypt_message(b"hello", ec_scalar_multiplication(MID.G, 10, MID), MID, rng)
    right = ec_scalar_multiplication(c1, 10, MID).x & 0xFF
    wrong = ec_scalar_multiplication(c1, 11, MID).x & 0xFF
    assert (decrypt_message(c1, ct, 11, MID) != b"hello") == (right != wrong)


def _hmac_reference(key, msg):
    block = 64
    if len(key) > block:
        key = hashlib.sha256(key).digest()
    key = key.ljust(block, b"\0")
    inner = hashlib.sha256(bytes(k ^ 0x36 for k in key) + msg).digest()
    return hashlib.sha256(bytes(k ^ 0x5C for k in key) + inner).digest()


def test_hmac_rfc4231_case_2():
    tag = hmac_sign(b"Jefe", b"what do ya want for nothing?")
    assert tag.hex() == "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"
    assert tag == _hmac_reference(b"Jefe", b"what do ya want for nothing?")
    assert hmac_verify(b"Jefe", b"what do ya want for nothing?", tag)
    assert not hmac_verify(b"Jefe", b"what do ya want for nothing!", tag)


def test_hmac_random_round_trip():
    rng = random.Random(0)
    for _ in range(50):
        k, m = rng.randbytes(rng.randrange(1, 100)), rng.randbytes(rng.randrange(0, 300))
        assert hmac_verify(k, m, hmac_sign(k, m))
        assert hmac_sign(k, m) == _hmac_reference(k, m)


def test_orders_bundle():
    records, skipped = read_orders()
    assert len(records) == 50 and skipped == 0
    for rec in records:
        assert OrderRecord.from_json(rec.to_json()) == rec


def test_orders_skip_bad_rows(tmp_path):
    path = tmp_path / "o.csv"
    path.write_text("InvoiceNo,StockCode,Description,Quantity,InvoiceDate,UnitPrice,CustomerID,Country\n"
                    "1,A,thing,2,2020-01-01,1.50,9,UK\n"
                    "2,B,bad,zero,2020-01-01,1.50,9,UK\n"
                    "3,C,nil,0,2020-01-01,1.50,9,UK\n")
    records, skipped = read_orders(path)
    assert len(records) == 1 and skipped == 2


def _get(url):
    with urllib.request.urlopen(url, timeout=5) as resp:
        return json.loads(resp.read())


def test_server_endpoints_and_round_trip():
    with serve_entity_b("secp256k1", config=ServerConfig(seed=1)) as server:
        body = _get(server.url + "/ecc_params")
        assert body["p"] == "115792089237316195423570985008687907853269984665640564039457584007908834671663"
        assert body["status"] == "ok"
        assert fetch_public_key(server.url) == server.keypair.public
        summary = run_entity_a(server.url, duration=30, interval=0, rng=random.Random(2), max_orders=3)
        assert (summary.sent, summary.accepted, summary.rejected) == (3, 3, 0)
        received = {r.request_id: r.plaintext for r in server.orders}
        assert received == summary.payloads


def test_server_rejects_flipped_ciphertext_bit():
    with serve_entity_b("secp256k1", config=ServerConfig(seed=4)) as server:
        rng = random.Random(5)
        keys = generate_keypair(server.params, rng)
        env = seal(b'{"x":1}', keys.private, keys.public, server.keypair.public, server.params, rng, "r1")
        wire = env.to_wire()
        ct = bytearray(env.ciphertext)
        ct[0] ^= 1
        wire["ciphertext"] = ct.hex()
        assert server.handle_order(wire)[0] == 400
        assert server.handle_order({"hmac": "zz"})[0] == 400
        # A genuine envelope with a non-order payload authenticates but cannot be parsed.
        bad = seal(b"not json", keys.private, keys.public, server.keypair.public, server.params, rng, "r2")
        assert server.handle_order(bad.to_wire())[0] == 422
        assert server.handle_order(env.to_wire())[0] == 422


def test_mismatched_curves_never_accept():
    with serve_entity_b("secp256k1", config=ServerConfig(seed=1)) as server:
        summary = run_entity_a(server.url, duration=30, interval=0, rng=random.Random(2), max_orders=3,
                               params_override=load_params("brainpoolP256r1"))
        assert summary.accepted == 0 and summary.sent == 3
        assert summary.rejected + summary.connection_failures == 3
        assert not server.orders


def test_startup_failures(tmp_path):
    with pytest.raises(StartupError):
        serve_entity_b("ga", config=ServerConfig(params_dir=tmp_path))
    bad = tmp_path / "bad.txt"
    bad.write_text("p=17\na=2\nb=2\nGx=5\nGy=1\nn=19\nh=0\n")
    with pytest.raises(StartupError):
        serve_entity_b(str(bad))


def test_client_unreachable():
    with pytest.raises(ServerUnavailable):
        fetch_params("http://127.0.0.1:9", retries=0)


def test_order_log_dump(tmp_path):
    log = tmp_path / "orders.csv"
    with serve_entity_b("secp256k1", config=ServerConfig(seed=1, order_log_csv=log)) as server:
        run_entity_a(server.url, duration=30, interval=0, rng=random.Random(2), max_orders=2)
    lines = log.read_text().splitlines()
    assert lines[0] == "order_id,request_id,payload" and len(lines) == 3


def test_envelope_wire_round_trip():
    rng = random.Random(1)
    keys = generate_keypair(MID, rng)
    env = seal(b"abc", keys.private, keys.public, keys.public, MID, rng, "id-1")
    assert OrderEnvelope.from_wire(json.loads(json.dumps(env.to_wire()))) == env
