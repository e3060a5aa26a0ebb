"""Binary cache of class sets and Hecke data.

Layout: magic, format version (u16), header length (u32), canonical JSON
header, body.  The body is a small tagged encoding: integers are signed
big-endian byte strings, local ring elements are base-p digit vectors.
The header carries a sha256 over (header without hash) + body, so any edit
to either is caught on load.
"""

import hashlib
import json
import struct

from .errors import CacheVersionMismatch, HashMismatch, IoFailure
from .field_core import Modulus
from .quat_hecke import HeckeLocalData, QuaternionOrder, class_set, prime_by_name, verify_maximal_order

MAGIC = b"HMFSLOPE"
VERSION = 1


# -- body encoding -------------------------------------------------------------

def _int_bytes(n):
    length = max(1, (n.bit_length() + 8) // 8)
    return n.to_bytes(length, "big", signed=True)


def _put_int(buf, n):
    raw = _int_bytes(int(n))
    buf += b"I" + struct.pack(">I", len(raw)) + raw


def _put_digits(buf, x, p, width):
    digits = []
    x = int(x)
    for _ in range(width):
        digits.append(x % p)
        x //= p
    if x:
        raise ValueError("value exceeds digit width")
    buf += b"D" + struct.pack(">IB", width, p) + bytes(digits)


def _put_list(buf, n):
    buf += b"L" + struct.pack(">I", n)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def _take(self, n):
        out = self.data[self.pos:self.pos + n]
        if len(out) != n:
            raise IoFailure("truncated cache body")
        self.pos += n
        return out

    def tag(self, want):
        t = self._take(1)
        if t != want:
            raise IoFailure("cache body: expected %r, found %r" % (want, t))

    def int(self):
        self.tag(b"I")
        (n,) = struct.unpack(">I", self._take(4))
        return int.from_bytes(self._take(n), "big", signed=True)

    def digits(self):
        self.tag(b"D")
        width, p = struct.unpack(">IB", self._take(5))
        x = 0
        for d in reversed(self._take(width)):
            x = x * p + d
        return x

    def list(self):
        self.tag(b"L")
        (n,) = struct.unpack(">I", self._take(4))
        return n


# -- header -----------------------------------------------------------------------

def _canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def provenance(cs):
    """Header fields that determine the cached data."""
    comps = [[q.name(), e] for q, e in cs.modulus.components]
    return {
        "format": "hmfslopes-hecke",
        "order": cs.order.to_json(),
        "level": comps,
        "p": cs.p,
        "s": cs.s,
        "precision": cs.Np,
    }


def cache_key(cs):
    return hashlib.sha256(_canonical(provenance(cs))).hexdigest()[:16]


def _encode_body(cs, hecke_by_prime):
    buf = bytearray()
    p = cs.p
    _put_list(buf, cs.h)
    for k in cs.reps:
        _put_int(buf, k)
    primes = sorted(hecke_by_prime, key=lambda q: q.key())
    _put_list(buf, len(primes))
    for q in primes:
        data = hecke_by_prime[q]
        buf += q.name().encode().ljust(16, b"\0")
        _put_list(buf, len(data.entries))
        for row in data.entries:
            _put_list(buf, len(row))
            for j, alpha, delta, mats in row:
                _put_int(buf, j)
                _put_list(buf, len(alpha))
                for a in alpha:
                    _put_int(buf, a)
                _put_list(buf, len(delta))
                for c in delta:
                    _put_int(buf, c)
                qs = sorted(mats, key=lambda x: x.key())
                _put_list(buf, len(qs))
                for qq in qs:
                    buf += qq.name().encode().ljust(16, b"\0")
                    for r in mats[qq]:
                        for entry in r:
                            _put_list(buf, len(entry))
                            for x in entry:
                                _put_digits(buf, x, p, cs.Np)
    return bytes(buf)


def cache_save(path, cs, hecke_by_prime):
    body = _encode_body(cs, hecke_by_prime)
    header = provenance(cs)
    header["h"] = cs.h
    header["version"] = VERSION
    header["hash"] = hashlib.sha256(_canonical(header) + body).hexdigest()
    raw = _canonical(header)
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC + struct.pack(">HI", VERSION, len(raw)) + raw + body)
    except OSError as exc:
        raise IoFailure("cannot write cache %s: %s" % (path, exc)) from exc
    return header["hash"]


def read_header(path):
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure("cannot read cache %s: %s" % (path, exc)) from exc
    if blob[:len(MAGIC)] != MAGIC:
        raise IoFailure("%s is not a cache file" % path)
    version, n = struct.unpack(">HI", blob[len(MAGIC):len(MAGIC) + 6])
    start = len(MAGIC) + 6
    header = json.loads(blob[start:start + n])
    return version, header, blob[start + n:]


def cache_load(path, expect=None):
    """(class set, {prime: HeckeLocalData}) from a cache file.

    ``expect`` is an optional class set whose provenance must agree with the
    file (stale caches raise HashMismatch).
    """
    version, header, body = read_header(path)
    if version != VERSION or header.get("version") != VERSION:
        raise CacheVersionMismatch("cache version %s, expected %d" % (version, VERSION))
    stored = header.pop("hash", None)
    if hashlib.sha256(_canonical(header) + body).hexdigest() != stored:
        raise HashMismatch("cache content hash does not match")
    if expect is not None:
        want = provenance(expect)
        have = {k: header[k] for k in want}
        if _canonical(want) != _canonical(have):
            raise HashMismatch("cache was built for different inputs")
    order = QuaternionOrder.from_json(header["order"])
    if not verify_maximal_order(order):
        raise HashMismatch("cached order is not maximal")
    F = order.alg.F
    modulus = Modulus([(prime_by_name(F, name), e) for name, e in header["level"]])
    cs = expect if expect is not None else class_set(order, modulus, header["p"], header["s"], Np=header["precision"])
    rd = _Reader(body)
    h = rd.list()
    reps = [rd.int() for _ in range(h)]
    if h != cs.h or reps != cs.reps:
        raise HashMismatch("class set representatives differ from the cache")
    out = {}
    for _ in range(rd.list()):
        q = prime_by_name(F, rd._take(16).rstrip(b"\0").decode())
        entries = []
        for _ in range(rd.list()):
            row = []
            for _ in range(rd.list()):
                j = rd.int()
                alpha = tuple(rd.int() for _ in range(rd.list()))
                delta = tuple(rd.int() for _ in range(rd.list()))
                mats = {}
                for _ in range(rd.list()):
                    qq = prime_by_name(F, rd._take(16).rstrip(b"\0").decode())
                    m = []
                    for _r in range(2):
                        r = []
                        for _c in range(2):
                            r.append(tuple(rd.digits() for _ in range(rd.list())))
                        m.append(tuple(r))
                    mats[qq] = tuple(m)
                row.append((j, alpha, delta, mats))
            entries.append(row)
        out[q] = HeckeLocalData(q, q.generator(), entries, h)
    if rd.pos != len(body):
        raise IoFailure("trailing bytes in cache body")
    return cs, out
