# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernels; mirrors _walk_kernel_py bit for bit."""

from libc.stdint cimport int8_t, int64_t, uint64_t

BACKEND = "cython"

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t _MIX2 = 0x94D049BB133111EBULL
cdef double _INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _rotl(uint64_t x, int r) noexcept nogil:
    return (x << r) | (x >> (64 - r))


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z ^= z >> 30
    z *= _MIX1
    z ^= z >> 27
    z *= _MIX2
    z ^= z >> 31
    return z


ctypedef struct XoState:
    uint64_t s0, s1, s2, s3


cdef inline void _init_state(XoState* st, uint64_t seed, uint64_t stream) noexcept nogil:
    cdef uint64_t x = _mix64(seed * _MIX1 + stream * _MIX2 + _GOLDEN)
    x += _GOLDEN
    st.s0 = _mix64(x)
    x += _GOLDEN
    st.s1 = _mix64(x)
    x += _GOLDEN
    st.s2 = _mix64(x)
    x += _GOLDEN
    st.s3 = _mix64(x)
    if (st.s0 | st.s1 | st.s2 | st.s3) == 0:
        st.s0 = _GOLDEN


cdef inline uint64_t _next_u64(XoState* st) noexcept nogil:
    cdef uint64_t result = _rotl(st.s1 * 5, 7) * 9
    cdef uint64_t t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = _rotl(st.s3, 45)
    return result


cdef inline double _next_double(XoState* st) noexcept nogil:
    return (_next_u64(st) >> 11) * _INV53


def rng_selftest(seed, stream, n):
    """First n raw outputs; used to pin cross-backend equality."""
    cdef XoState st
    _init_state(&st, seed, stream)
    return [_next_u64(&st) for _ in range(n)]


def walk_chunk(double p, int k, unsigned long long seed, unsigned long long stream,
               int64_t[::1] dur, int8_t[::1] win, int64_t step_cap):
    """Fill dur/win with one exit-time draw per slot; returns capped count."""
    cdef XoState st
    cdef Py_ssize_t t, n = dur.shape[0]
    cdef int pos
    cdef int64_t steps
    cdef int capped = 0
    with nogil:
        _init_state(&st, seed, stream)
        for t in range(n):
            pos = 0
            steps = 0
            while -k < pos < k and steps < step_cap:
                steps += 1
                if _next_double(&st) < p:
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


def coupled_chunk(double[::1] u_lo, double[::1] u_hi, int start, unsigned long long seed, unsigned long long stream,
                  int64_t[::1] y_lo, int64_t[::1] y_hi, int64_t step_cap):
    """Coupled conditioned return times from ``start`` to 0."""
    cdef XoState st
    cdef Py_ssize_t t, n = y_lo.shape[0]
    cdef int a, b, lvl
    cdef int64_t sa, sb
    cdef double u, v
    cdef int capped = 0
    with nogil:
        _init_state(&st, seed, stream)
        for t in range(n):
            a = start
            b = start
            sa = 0
            sb = 0
            while (a != 0 or b != 0) and sa < step_cap and sb < step_cap:
                if a != 0 and b != 0:
                    if a == b:
                        lvl = a
                        u = _next_double(&st)
                        a = a + 1 if u < u_lo[lvl] else a - 1
                        b = b + 1 if u < u_hi[lvl] else b - 1
                        sa += 1
                        sb += 1
                    else:
                        u = _next_double(&st)
                        a = a + 1 if u < u_lo[a] else a - 1
                        sa += 1
                        v = _next_double(&st)
                        b = b + 1 if v < u_hi[b] else b - 1
                        sb += 1
                elif a != 0:
                    u = _next_double(&st)
                    a = a + 1 if u < u_lo[a] else a - 1
                    sa += 1
                else:
                    u = _next_double(&st)
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
