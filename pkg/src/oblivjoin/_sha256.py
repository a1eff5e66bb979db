"""Chained SHA-256 over fixed 17-byte event records, jitted with numba.

Each chain link hashes a 49-byte message (32-byte previous digest followed
by one record), which pads to exactly one SHA-256 compression block, so the
whole chain is a single tight loop over compressions.  numba is optional:
callers fall back to hashlib when it is unavailable or disabled via
OBLIVJOIN_NO_NUMBA=1.
"""

from __future__ import annotations

import os

import numpy as np

_K = np.array([
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5,
    0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc,
    0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3,
    0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5,
    0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
], dtype=np.int64)

_IV = np.array([
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
], dtype=np.int64)

_M32 = 0xFFFFFFFF

HAVE_NUMBA = False
if os.environ.get("OBLIVJOIN_NO_NUMBA", "") != "1":
    try:
        from numba import njit
        HAVE_NUMBA = True
    except ImportError:
        pass


def _chain_impl(recs, n, h_in, h_out):
    s = np.empty(8, np.int64)
    for i in range(8):
        s[i] = ((np.int64(h_in[4 * i]) << 24) | (np.int64(h_in[4 * i + 1]) << 16)
                | (np.int64(h_in[4 * i + 2]) << 8) | np.int64(h_in[4 * i + 3]))
    w = np.empty(64, np.int64)
    for e in range(n):
        base = e * 17
        # Message bytes 0..31 are the running digest: its words verbatim.
        for i in range(8):
            w[i] = s[i]
        # Bytes 32..48 are the record; byte 49 the 0x80 pad; the block
        # ends with the 392-bit length.
        for i in range(4):
            w[8 + i] = ((np.int64(recs[base + 4 * i]) << 24)
                        | (np.int64(recs[base + 4 * i + 1]) << 16)
                        | (np.int64(recs[base + 4 * i + 2]) << 8)
                        | np.int64(recs[base + 4 * i + 3]))
        w[12] = (np.int64(recs[base + 16]) << 24) | 0x00800000
        w[13] = 0
        w[14] = 0
        w[15] = 392
        for i in range(16, 64):
            x = w[i - 15]
            s0 = ((((x >> 7) | (x << 25)) & _M32)
                  ^ (((x >> 18) | (x << 14)) & _M32) ^ (x >> 3))
            y = w[i - 2]
            s1 = ((((y >> 17) | (y << 15)) & _M32)
                  ^ (((y >> 19) | (y << 13)) & _M32) ^ (y >> 10))
            w[i] = (w[i - 16] + s0 + w[i - 7] + s1) & _M32
        a = _IV[0]; b = _IV[1]; c = _IV[2]; d = _IV[3]
        ee = _IV[4]; f = _IV[5]; g = _IV[6]; h = _IV[7]
        for i in range(64):
            S1 = ((((ee >> 6) | (ee << 26)) & _M32)
                  ^ (((ee >> 11) | (ee << 21)) & _M32)
                  ^ (((ee >> 25) | (ee << 7)) & _M32))
            ch = (ee & f) ^ ((~ee & _M32) & g)
            t1 = (h + S1 + ch + _K[i] + w[i]) & _M32
            S0 = ((((a >> 2) | (a << 30)) & _M32)
                  ^ (((a >> 13) | (a << 19)) & _M32)
                  ^ (((a >> 22) | (a << 10)) & _M32))
            maj = (a & b) ^ (a & c) ^ (b & c)
            t2 = (S0 + maj) & _M32
            h = g; g = f; f = ee; ee = (d + t1) & _M32
            d = c; c = b; b = a; a = (t1 + t2) & _M32
        s[0] = (_IV[0] + a) & _M32
        s[1] = (_IV[1] + b) & _M32
        s[2] = (_IV[2] + c) & _M32
        s[3] = (_IV[3] + d) & _M32
        s[4] = (_IV[4] + ee) & _M32
        s[5] = (_IV[5] + f) & _M32
        s[6] = (_IV[6] + g) & _M32
        s[7] = (_IV[7] + h) & _M32
    for i in range(8):
        h_out[4 * i] = (s[i] >> 24) & 0xFF
        h_out[4 * i + 1] = (s[i] >> 16) & 0xFF
        h_out[4 * i + 2] = (s[i] >> 8) & 0xFF
        h_out[4 * i + 3] = s[i] & 0xFF


if HAVE_NUMBA:
    chain_compress = njit(cache=True)(_chain_impl)
else:
    chain_compress = _chain_impl
