"""Key hierarchy and secure-channel primitives.

PIN -> (AK, KDK) -> (TAK, TEK) via PBKDF2-HMAC-SHA256, HMAC-SHA256 tags and
AES-128-CBC with PKCS#7 padding. Everything here is pure.
"""

from __future__ import annotations

import hashlib
import hmac
import random
from dataclasses import dataclass

from cryptography.hazmat.primitives import padding
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

KEY_LEN = 16
NONCE_LEN = 16
TAG_LEN = 32
IV_LEN = 16
DEFAULT_ITERATIONS = 1024


class AuthenticationError(Exception):
    """A ciphertext or tag failed to authenticate."""


@dataclass(frozen=True)
class PresharedKey:
    value: bytes

    def __post_init__(self):
        if not self.value:
            raise ValueError("pre-shared key must be non-empty")

    def __repr__(self):
        return "PresharedKey(<secret>)"


@dataclass(frozen=True)
class LongLivedKeys:
    ak: bytes
    kdk: bytes


@dataclass(frozen=True)
class TransientKeys:
    tak: bytes
    tek: bytes
    r_sn: bytes
    r_im: bytes


@dataclass(frozen=True)
class RoutingAuthKey:
    rak: bytes
    anchor_id: str
    epoch: int


def new_nonce(rng: random.Random) -> bytes:
    return rng.getrandbits(8 * NONCE_LEN).to_bytes(NONCE_LEN, "big")


def new_key(rng: random.Random) -> bytes:
    return rng.getrandbits(8 * KEY_LEN).to_bytes(KEY_LEN, "big")


def _pbkdf2_split(password: bytes, salt: bytes, iterations: int) -> tuple[bytes, bytes]:
    out = hashlib.pbkdf2_hmac("sha256", password, salt, iterations, dklen=2 * KEY_LEN)
    return out[:KEY_LEN], out[KEY_LEN:]


def derive_long_lived(pin: PresharedKey | bytes, node_id: str,
                      iterations: int = DEFAULT_ITERATIONS) -> LongLivedKeys:
    """PBKDF2 with the PIN as password and the node ID as salt."""
    secret = pin.value if isinstance(pin, PresharedKey) else pin
    if not secret:
        raise ValueError("pin must be non-empty")
    if not node_id:
        raise ValueError("node id must be non-empty")
    ak, kdk = _pbkdf2_split(secret, node_id.encode(), iterations)
    return LongLivedKeys(ak, kdk)


def derive_transient(kdk: bytes, r_sn: bytes, r_im: bytes,
                     iterations: int = DEFAULT_ITERATIONS) -> TransientKeys:
    """PBKDF2 with the KDK as password and ``r_sn || r_im`` as salt."""
    if len(r_sn) != NONCE_LEN or len(r_im) != NONCE_LEN:
        raise ValueError(f"nonces must be {NONCE_LEN} octets")
    tak, tek = _pbkdf2_split(kdk, r_sn + r_im, iterations)
    return TransientKeys(tak, tek, r_sn, r_im)


def hmac_sign(key: bytes, payload: bytes) -> bytes:
    return hmac.new(key, payload, hashlib.sha256).digest()


def hmac_verify(key: bytes, payload: bytes, tag: bytes) -> bool:
    if len(tag) != TAG_LEN:
        return False
    return hmac.compare_digest(hmac_sign(key, payload), tag)


def _cipher(key: bytes, iv: bytes) -> Cipher:
    if len(key) != KEY_LEN:
        raise ValueError(f"AES-128 key must be {KEY_LEN} octets")
    if len(iv) != IV_LEN:
        raise ValueError(f"IV must be {IV_LEN} octets")
    return Cipher(algorithms.AES(key), modes.CBC(iv))


def channel_encrypt(tek: bytes, plaintext: bytes, iv: bytes) -> bytes:
    padder = padding.PKCS7(128).padder()
    padded = padder.update(plaintext) + padder.finalize()
    enc = _cipher(tek, iv).encryptor()
    return enc.update(padded) + enc.finalize()


def channel_decrypt(tek: bytes, ciphertext: bytes, iv: bytes) -> bytes:
    if not ciphertext or len(ciphertext) % 16:
        raise AuthenticationError("ciphertext is not a whole number of blocks")
    dec = _cipher(tek, iv).decryptor()
    padded = dec.update(ciphertext) + dec.finalize()
    unpadder = padding.PKCS7(128).unpadder()
    try:
        return unpadder.update(padded) + unpadder.finalize()
    except ValueError as exc:
        raise AuthenticationError("bad padding") from exc
