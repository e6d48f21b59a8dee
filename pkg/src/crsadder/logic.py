"""Bit-level arithmetic built from the pair's state-update rule.

Everything here manipulates plain 0/1 ints and two's-complement words;
no device physics.  The update rule fsm_next(z, wl, bl) doubles as a
majority gate and (chained) as an XOR, which is what makes ripple-carry
addition in place possible:

    carry:   fsm_next(c, a, NOT b)   equals majority(a, b, c)
    sum:     fsm_next(fsm_next(c, a, b), b, carry_out)
             equals a XOR b XOR c

Both the carry update and the first sum update put a on the wordline,
so a single applied signal pair drives them in the same cycle.
"""

from __future__ import annotations

from .crs import fsm_next


def carry_next(a, b, c):
    """Carry-out of a 1-bit full add, computed as one state update.

    The cell holds c; the applied pair is (wl, bl) = (a, NOT b).
    """
    return fsm_next(c, a, 1 - b)


def carry_oracle(a, b, c):
    """Majority form ab + ac + bc, the carry's conventional definition."""
    return (a & b) | (a & c) | (b & c)


def sum_intermediate(a, b, c):
    """First of the two state updates producing the sum bit.

    The cell holds c; the applied pair is (wl, bl) = (a, b).
    """
    return fsm_next(c, a, b)


def sum_final(s_mid, b, c_next):
    """Second state update: s_mid from sum_intermediate, then this."""
    return fsm_next(s_mid, b, c_next)


def full_adder_bit(a, b, c):
    """(sum, carry) of one bit position via the state-update pipeline."""
    c_out = carry_next(a, b, c)
    s = sum_final(sum_intermediate(a, b, c), b, c_out)
    return s, c_out


# ----------------------------------------------------------------------
# word helpers; words are little-endian bit lists (index 0 = LSB)
# ----------------------------------------------------------------------

def int_to_word(value, n):
    """Two's-complement little-endian bit list of width n."""
    if n < 1:
        raise ValueError("width must be >= 1")
    lo, hi = -(1 << (n - 1)), (1 << (n - 1)) - 1
    if not lo <= value <= hi:
        raise ValueError(f"{value} does not fit in {n} bits two's-complement")
    return [(value >> k) & 1 for k in range(n)]


def word_to_int(bits):
    """Integer value of a two's-complement little-endian bit list."""
    n = len(bits)
    if n < 1:
        raise ValueError("empty word")
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0/1, got {b!r}")
    raw = sum(b << k for k, b in enumerate(bits))
    return raw - (bits[-1] << n)


def word_to_str(bits):
    """MSB-first string rendering, e.g. [0,1,0] -> '010'."""
    return "".join(str(b) for b in reversed(bits))


def str_to_word(s):
    """Parse an MSB-first 0/1 string into a little-endian bit list."""
    if not s or any(ch not in "01" for ch in s):
        raise ValueError(f"expected a nonempty 0/1 string, got {s!r}")
    return [int(ch) for ch in reversed(s)]


def add_words_reference(a_bits, b_bits, c0=0):
    """Sign-extended (n+1)-bit sum by plain integer arithmetic.

    The reference the in-memory schedules are checked against: inputs
    are n-bit two's-complement words, the result is the exact integer
    sum rendered in n+1 bits (always representable).
    """
    if len(a_bits) != len(b_bits):
        raise ValueError("operand widths differ")
    if c0 not in (0, 1):
        raise ValueError("carry-in must be 0 or 1")
    n = len(a_bits)
    total = word_to_int(a_bits) + word_to_int(b_bits) + c0
    return int_to_word(total, n + 1)


def sub_words_reference(a_bits, b_bits):
    """Sign-extended (n+1)-bit difference a - b by integer arithmetic."""
    if len(a_bits) != len(b_bits):
        raise ValueError("operand widths differ")
    n = len(a_bits)
    total = word_to_int(a_bits) - word_to_int(b_bits)
    return int_to_word(total, n + 1)


def ripple_add_words(a_bits, b_bits, c0=0):
    """(n+1)-bit sum using only the state-update pipeline per bit.

    The extra significance reuses the operand MSBs once more (sign
    extension by doubled top bit), so the result is the exact
    two's-complement sum of the operands.
    """
    if len(a_bits) != len(b_bits):
        raise ValueError("operand widths differ")
    n = len(a_bits)
    c = c0
    out = []
    for k in range(n + 1):
        a = a_bits[min(k, n - 1)]
        b = b_bits[min(k, n - 1)]
        s, c = full_adder_bit(a, b, c)
        out.append(s)
    return out
