"""Code constructions and encoders.

Block codes are kept as packed generator rows (one int per row, bit j =
column j) in systematic [I | P] form.  The two named constructions are
quadratic-residue codes extended by an overall parity bit; their
generator polynomials are obtained by splitting (x^p + 1)/(x + 1) over
GF(2), and both builds self-check their minimum distance by exhaustive
weight enumeration the first time they run in a process.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class LengthMismatch(ValueError):
    pass


class TapLengthError(ValueError):
    """Octal pattern has more significant bits than the encoder has taps."""


# ---------------------------------------------------------------------------
# GF(2) polynomial arithmetic on ints (bit i = coefficient of x^i)

def _pdeg(a: int) -> int:
    return a.bit_length() - 1


def _pmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _pmod(a: int, m: int) -> int:
    dm = _pdeg(m)
    while _pdeg(a) >= dm:
        a ^= m << (_pdeg(a) - dm)
    return a


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _split_equal_degree(h: int, r: int) -> int:
    """One irreducible factor of h, where h is a product of two distinct
    irreducibles of equal degree r over GF(2).

    Uses the trace map Tr(u) = u + u^2 + ... + u^(2^(r-1)) mod h, which
    splits h through gcd for about half of all u.  The candidate u's are
    tried in a fixed order, so the returned factor is deterministic.
    """
    for k in range(1, 2 * r + 2):
        u = 1 << k  # u(x) = x^k
        tr = 0
        sq = u
        for _ in range(r):
            tr ^= sq
            sq = _pmod(_pmul(sq, sq), h)
        g = _pgcd(h, tr)
        if 0 < _pdeg(g) < _pdeg(h):
            other = _pquo(h, g)
            return min(g, other)
    raise ArithmeticError("trace-map split failed")  # unreachable for our inputs


def _pquo(a: int, b: int) -> int:
    q = 0
    db = _pdeg(b)
    while _pdeg(a) >= db:
        shift = _pdeg(a) - db
        q ^= 1 << shift
        a ^= b << shift
    return q


def quadratic_residue_generator(p: int) -> int:
    """Generator polynomial of the binary quadratic-residue code of prime
    length p, as a packed int of degree (p-1)/2.

    Valid for p with 2 a quadratic residue mod p and (p-1)/2 the order of
    2, e.g. p = 23 and p = 47: then (x^p + 1)/(x + 1) is the product of
    exactly two irreducibles of degree (p-1)/2 (reciprocals of each
    other), and either generates a quadratic-residue code.  The smaller
    factor is returned for determinism.
    """
    h = (1 << p) - 1  # 1 + x + ... + x^(p-1)
    return _split_equal_degree(h, (p - 1) // 2)


# ---------------------------------------------------------------------------
# Block codes

@dataclass(frozen=True)
class BlockCode:
    """(n, k) binary linear block code in systematic [I | P] form.

    rows[i] is row i of the generator matrix packed into an int with bit
    j holding column j; systematic form means rows[i] & ((1 << k) - 1)
    == 1 << i, so the first k code bits of any codeword equal the
    information bits.
    """

    n: int
    k: int
    rows: tuple
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.rows) != self.k:
            raise ValueError("generator must have k rows")
        for i, row in enumerate(self.rows):
            if row & ((1 << self.k) - 1) != (1 << i):
                raise ValueError("generator is not in systematic form")
            if row >> self.n:
                raise ValueError("generator row wider than n")

    def encode_int(self, info: int) -> int:
        word = 0
        i = 0
        while info:
            if info & 1:
                word ^= self.rows[i]
            info >>= 1
            i += 1
        return word

    def parity_column_masks(self) -> tuple:
        """For each column j >= k, the mask of info bits feeding it."""
        if "colmasks" not in self._cache:
            masks = []
            for j in range(self.k, self.n):
                m = 0
                for i in range(self.k):
                    if (self.rows[i] >> j) & 1:
                        m |= 1 << i
                masks.append(m)
            self._cache["colmasks"] = tuple(masks)
        return self._cache["colmasks"]

    def codeword_ints(self) -> np.ndarray:
        """All 2^k codewords as packed uint64, indexed by info int."""
        if self.n > 64:
            raise ValueError("codewords wider than 64 bits")
        arr = np.zeros(1 << self.k, dtype=np.uint64)
        for i, row in enumerate(self.rows):
            half = 1 << i
            arr[half:2 * half] = arr[:half] ^ np.uint64(row)
        return arr

    def minimum_distance(self) -> int:
        if "dmin" not in self._cache:
            self._cache["dmin"] = int(_weight_profile(self)[0])
        return self._cache["dmin"]

    def weight_count(self, w: int) -> int:
        """Number of codewords of Hamming weight w."""
        dmin, counts = _weight_profile(self)
        return int(counts[w])


def _weight_profile(code: BlockCode):
    """(minimum nonzero weight, histogram of weights), by enumerating all
    2^k codewords with a 16-bit popcount table."""
    lut = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)
    words = code.codeword_ints()
    counts = np.zeros(code.n + 1, dtype=np.int64)
    mask = np.uint64(0xFFFF)
    chunk = 1 << 20
    for start in range(0, len(words), chunk):
        c = words[start:start + chunk]
        w = lut[(c & mask).astype(np.int64)].astype(np.int64)
        w += lut[((c >> np.uint64(16)) & mask).astype(np.int64)]
        w += lut[((c >> np.uint64(32)) & mask).astype(np.int64)]
        w += lut[((c >> np.uint64(48)) & mask).astype(np.int64)]
        counts += np.bincount(w, minlength=code.n + 1)
    nonzero = np.nonzero(counts[1:])[0]
    return int(nonzero[0]) + 1, counts


def _systematic_rows(poly: int, p: int, k: int) -> list:
    """Row-reduce the cyclic generator matrix [x^i * g(x)] into [I | P]."""
    rows = [poly << i for i in range(k)]
    for col in range(k):
        pivot = next(i for i in range(col, k) if (rows[i] >> col) & 1)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for i in range(k):
            if i != col and (rows[i] >> col) & 1:
                rows[i] ^= rows[col]
    return rows


def _extend_parity(rows: list, n: int) -> list:
    """Append an overall parity column so every codeword has even weight."""
    out = []
    for row in rows:
        parity = bin(row).count("1") & 1
        out.append(row | (parity << n))
    return out


def _build_extended_qr(p: int, name: str, expected_dmin: int) -> BlockCode:
    k = (p + 1) // 2
    poly = quadratic_residue_generator(p)
    rows = _extend_parity(_systematic_rows(poly, p, k), p)
    code = BlockCode(n=p + 1, k=k, rows=tuple(rows), name=name)
    dmin = code.minimum_distance()
    if dmin != expected_dmin:
        raise AssertionError(f"{name}: minimum distance {dmin}, expected {expected_dmin}")
    return code


@lru_cache(maxsize=None)
def build_extended_golay() -> BlockCode:
    """(24, 12) extended Golay code, systematic, minimum distance 8."""
    return _build_extended_qr(23, "golay24", 8)


@lru_cache(maxsize=None)
def build_extended_qr48() -> BlockCode:
    """(48, 24) extended quadratic-residue code, systematic, minimum
    distance 12.  The distance self-check enumerates all 2^24 codewords;
    it runs once per process and takes a couple of seconds."""
    return _build_extended_qr(47, "qr48", 12)


def encode_block(code: BlockCode, info) -> np.ndarray:
    """info . G over GF(2); systematic, so the first k bits equal info."""
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (code.k,):
        raise LengthMismatch(f"info length {info.shape} != k={code.k}")
    val = 0
    for i in range(code.k):
        if info[i]:
            val ^= code.rows[i]
    return _int_to_bits(val, code.n)


def _int_to_bits(val: int, n: int) -> np.ndarray:
    return np.array([(val >> j) & 1 for j in range(n)], dtype=np.uint8)


# ---------------------------------------------------------------------------
# Convolutional codes

@dataclass(frozen=True)
class ConvCode:
    """(n, 1, m) binary convolutional encoder.

    taps[i] is the length-(m+1) tap vector of output i, current-input
    coefficient first: output bit i at time t is
    sum_j taps[i][j] * u_(t-j) mod 2.
    """

    n_out: int
    m: int
    taps: tuple
    name: str = ""
    k_in: int = 1

    def __post_init__(self):
        if self.k_in != 1:
            raise ValueError("only single-input encoders are supported")
        if len(self.taps) != self.n_out:
            raise ValueError("need one tap vector per output")
        for tap in self.taps:
            if len(tap) != self.m + 1:
                raise ValueError("tap vectors must have length m+1")
        if not any(tap[0] for tap in self.taps):
            raise ValueError("no output taps the current input (pure delay)")

    def step(self, state: int, bit: int):
        """(output bit-pattern, next state) for one input bit.

        State packs the previous inputs with the most recent in the low
        bit, so state s1 is reached from s0 by input 1.
        """
        out = 0
        for i, tap in enumerate(self.taps):
            b = tap[0] & bit
            for j in range(1, self.m + 1):
                b ^= tap[j] & ((state >> (j - 1)) & 1)
            out |= b << i
        nxt = ((state << 1) | bit) & ((1 << self.m) - 1)
        return out, nxt


def parse_octal_generators(octal, m: int, name: str = "") -> ConvCode:
    """Build a ConvCode from octal generator strings.

    Each string expands MSB-first to three bits per digit.  Trailing
    zero bits are insignificant (the written pattern is left-justified);
    after dropping them the pattern, including any leading zero bits,
    must fit within m+1 taps and is padded back out with trailing zeros.
    """
    taps = []
    for s in octal:
        bits = "".join(format(int(c, 8), "03b") for c in s)
        sig = bits.rstrip("0") or "0"
        if len(sig) > m + 1:
            raise TapLengthError(
                f"octal {s}: {len(sig)} significant bits exceed {m + 1} taps")
        sig = sig.ljust(m + 1, "0")
        taps.append(tuple(int(c) for c in sig))
    return ConvCode(n_out=len(taps), m=m, taps=tuple(taps), name=name)


def encode_conv(code: ConvCode, info) -> np.ndarray:
    """Shift-register encoding of info followed by m zero tail bits;
    output length n*(L+m)."""
    info = np.asarray(info, dtype=np.uint8)
    if info.ndim != 1 or len(info) < 1:
        raise LengthMismatch("info must be a nonempty bit vector")
    out = np.empty(code.n_out * (len(info) + code.m), dtype=np.uint8)
    state = 0
    for t, bit in enumerate(list(info) + [0] * code.m):
        pattern, state = code.step(state, int(bit))
        for i in range(code.n_out):
            out[t * code.n_out + i] = (pattern >> i) & 1
    return out
