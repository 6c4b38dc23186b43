"""Pure-Python Monte Carlo kernels: the reference implementation.

The compiled extension (_walk_kernel.pyx) mirrors this file operation for
operation; both must produce bit-identical outputs for identical
(seed, stream) inputs, which the test suite asserts.  The generator is
xoshiro256** seeded through splitmix64, chosen because it is trivial to
reimplement exactly in C and in Python integers.
"""

from __future__ import annotations

BACKEND = "python"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


def _mix64(z):
    z &= _MASK
    z ^= z >> 30
    z = (z * _MIX1) & _MASK
    z ^= z >> 27
    z = (z * _MIX2) & _MASK
    z ^= z >> 31
    return z


def init_state(seed, stream):
    """Derive the four xoshiro256** words from (seed, stream)."""
    x = ((seed & _MASK) * _MIX1 + (stream & _MASK) * _MIX2 + _GOLDEN) & _MASK
    x = _mix64(x)
    s = []
    for _ in range(4):
        x = (x + _GOLDEN) & _MASK
        s.append(_mix64(x))
    if s[0] | s[1] | s[2] | s[3] == 0:
        s[0] = _GOLDEN
    return s


def _rotl(x, r):
    return ((x << r) | (x >> (64 - r))) & _MASK


def next_u64(s):
    s0, s1, s2, s3 = s
    result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
    t = (s1 << 17) & _MASK
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    s[0], s[1], s[2], s[3] = s0, s1, s2, s3
    return result


def next_double(s):
    """Uniform in [0, 1) with 53 random bits."""
    return (next_u64(s) >> 11) * _INV53


def rng_selftest(seed, stream, n):
    """First n raw outputs; used to pin cross-backend equality."""
    s = init_state(seed, stream)
    return [next_u64(s) for _ in range(n)]


def walk_chunk(p, k, seed, stream, dur, win, step_cap):
    """Fill dur/win with one exit-time draw per slot; returns capped count.

    Trajectories that exceed step_cap are flagged with dur = -1, win = 0.
    """
    s = init_state(seed, stream)
    capped = 0
    for t in range(len(dur)):
        pos = 0
        steps = 0
        while -k < pos < k and steps < step_cap:
            steps += 1
            if next_double(s) < p:
                pos += 1
            else:
                pos -= 1
        if -k < pos < k:
            dur[t] = -1
            win[t] = 0
            capped += 1
        else:
            dur[t] = steps
            win[t] = 1 if pos == k else -1
    return capped


def coupled_chunk(u_lo, u_hi, start, seed, stream, y_lo, y_hi, step_cap):
    """Coupled conditioned return times from ``start`` to 0.

    Both walks absorb at 0 under their conditioned kernels (away-from-0
    probabilities u_lo/u_hi indexed by level).  At a shared level one
    uniform is drawn against the ordered thresholds so the hi walk moves
    away whenever the lo walk does; at distinct levels the walks draw
    independently, lo first.  Capped pairs get y = -1 on both sides.
    """
    s = init_state(seed, stream)
    capped = 0
    for t in range(len(y_lo)):
        a = start
        b = start
        sa = 0
        sb = 0
        while (a != 0 or b != 0) and sa < step_cap and sb < step_cap:
            if a != 0 and b != 0:
                if a == b:
                    lvl = a
                    u = next_double(s)
                    a = a + 1 if u < u_lo[lvl] else a - 1
                    b = b + 1 if u < u_hi[lvl] else b - 1
                    sa += 1
                    sb += 1
                else:
                    u = next_double(s)
                    a = a + 1 if u < u_lo[a] else a - 1
                    sa += 1
                    v = next_double(s)
                    b = b + 1 if v < u_hi[b] else b - 1
                    sb += 1
            elif a != 0:
                u = next_double(s)
                a = a + 1 if u < u_lo[a] else a - 1
                sa += 1
            else:
                u = next_double(s)
                b = b + 1 if u < u_hi[b] else b - 1
                sb += 1
        if a != 0 or b != 0:
            y_lo[t] = -1
            y_hi[t] = -1
            capped += 1
        else:
            y_lo[t] = sa
            y_hi[t] = sb
    return capped
