"""Coding bijections: pairs, triples, binary strings, finite sets, and the
self-delimiting / fixed-width integer codes used by the query-string machinery.

All codes are exact over arbitrary-precision naturals; no floats anywhere.
"""

from __future__ import annotations

from math import isqrt
from typing import Iterable


def _check_natural(value: int, name: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValueError(f"{name} must be a natural number, got {value!r}")
    return value


def _check_bits(bits: str, name: str = "bits") -> str:
    if not isinstance(bits, str) or any(c not in "01" for c in bits):
        raise ValueError(f"{name} must be a string over {{0,1}}, got {bits!r}")
    return bits


def cantor_pair(x: int, y: int) -> int:
    """Cantor pairing: (x+y)(x+y+1)/2 + y."""
    _check_natural(x, "x")
    _check_natural(y, "y")
    s = x + y
    return s * (s + 1) // 2 + y


def cantor_unpair(z: int) -> tuple[int, int]:
    """Inverse of cantor_pair."""
    _check_natural(z, "z")
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def triple_code(x: int, y: int, z: int) -> int:
    """Code a triple as pair(x, pair(y, z))."""
    return cantor_pair(x, cantor_pair(y, z))


def triple_decode(code: int) -> tuple[int, int, int]:
    x, rest = cantor_unpair(code)
    y, z = cantor_unpair(rest)
    return x, y, z


def string_code(bits: str) -> int:
    """Length-lexicographic code of a binary string: 2^len + value - 1.

    The empty string has value 0 and code 0; strings of length L occupy
    the code interval [2^L - 1, 2^(L+1) - 1), so shorter strings always
    get smaller codes.
    """
    _check_bits(bits)
    value = int(bits, 2) if bits else 0
    return (1 << len(bits)) + value - 1


def string_decode(code: int) -> str:
    """Inverse of string_code."""
    _check_natural(code, "code")
    length = (code + 1).bit_length() - 1
    value = code + 1 - (1 << length)
    return format(value, "b").zfill(length) if length else ""


def finite_set_code(members: Iterable[int]) -> int:
    """Canonical index of a finite set: sum of 2^x over its members."""
    code = 0
    for x in members:
        _check_natural(x, "member")
        code |= 1 << x
    return code


def finite_set_decode(code: int) -> frozenset[int]:
    """Inverse of finite_set_code: read the binary expansion."""
    _check_natural(code, "code")
    return frozenset(i for i in range(code.bit_length()) if code >> i & 1)


def prefix_free_code(n: int) -> str:
    """Self-delimiting binary code of n >= 1 in exactly 2*floor(log2 n) + 2 bits.

    Drop the leading 1 of n's binary expansion, double every remaining bit
    (0 -> 00, 1 -> 11), and append the end marker 01.  No codeword is a
    prefix of another because a decoder always stops at the first 01 pair.
    """
    _check_natural(n, "n")
    if n == 0:
        raise ValueError("n must be >= 1: 0 has no payload in this code")
    payload = format(n, "b")[1:]
    return "".join("11" if c == "1" else "00" for c in payload) + "01"


def prefix_free_decode(bits: str) -> tuple[int, int]:
    """Read one codeword from the front of bits; return (n, bits consumed)."""
    _check_bits(bits)
    payload = []
    pos = 0
    while True:
        group = bits[pos : pos + 2]
        if len(group) < 2:
            raise ValueError("truncated codeword: no end marker found")
        pos += 2
        if group == "01":
            return int("1" + "".join(payload), 2), pos
        if group == "00":
            payload.append("0")
        elif group == "11":
            payload.append("1")
        else:
            raise ValueError(f"invalid bit pair {group!r} at offset {pos - 2}")


def fixed_width_len(n: int) -> int:
    """Width of the fixed-width code for base n: least w with 2^w >= n^2."""
    _check_natural(n, "n")
    if n < 2:
        raise ValueError("fixed-width coding needs n >= 2")
    square = n * n
    w = (square - 1).bit_length()
    return w


def fixed_width_code(n: int, x: int) -> str:
    """Big-endian code of x < n^2, zero-padded to fixed_width_len(n) bits."""
    _check_natural(x, "x")
    w = fixed_width_len(n)
    if x >= n * n:
        raise ValueError(f"x must be below n^2 = {n * n}, got {x}")
    return format(x, "b").zfill(w)


def fixed_width_decode(n: int, bits: str) -> int:
    """Inverse of fixed_width_code for the same base n."""
    _check_bits(bits)
    w = fixed_width_len(n)
    if len(bits) != w:
        raise ValueError(f"expected {w} bits for base {n}, got {len(bits)}")
    x = int(bits, 2) if bits else 0
    if x >= n * n:
        raise ValueError(f"decoded value {x} is not below n^2 = {n * n}")
    return x
