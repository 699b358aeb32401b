# cython: language_level=3
"""Compiled inner loop for the certified continued-fraction expansion."""

cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    void mpz_init(mpz_t)
    void mpz_clear(mpz_t)
    int mpz_set_str(mpz_t, const char *, int)
    char *mpz_get_str(char *, int, const mpz_t)
    size_t mpz_sizeinbase(const mpz_t, int)

cdef extern from "cfexpand.h":
    ctypedef unsigned long long cf_u64
    ctypedef struct cf_buf:
        cf_u64 *q
        size_t len
        mpz_t *big
        size_t nbig
    int CF_OK, CF_AMBIGUOUS, CF_NOMEM
    void cf_buf_init(cf_buf *)
    void cf_buf_free(cf_buf *)
    int cf_expand(unsigned long m, unsigned long n, unsigned long digits,
                  const mpz_t bound, cf_buf *out) nogil

from libc.stdlib cimport free, malloc


cdef object _mpz_to_int(mpz_t v):
    cdef size_t size = mpz_sizeinbase(v, 16) + 2
    cdef char *s = <char *>malloc(size)
    if s == NULL:
        raise MemoryError()
    try:
        mpz_get_str(s, 16, v)
        return int(s.decode("ascii"), 16)
    finally:
        free(s)


def expand_quotients(unsigned long m, unsigned long n, unsigned long digits, bound):
    """Return ``(ok, quotients)`` for m**(1/n) at ``digits`` decimal digits.

    On success the list is a_0..a_s, s being the first index whose convergent
    denominator exceeds ``bound``.  Otherwise it holds the quotients certified
    before the first ambiguous one.
    """
    cdef mpz_t cbound
    cdef cf_buf buf
    cdef int status
    cdef size_t i, ib = 0
    cdef bytes text = format(bound, "x").encode("ascii")
    mpz_init(cbound)
    cf_buf_init(&buf)
    try:
        mpz_set_str(cbound, text, 16)
        with nogil:
            status = cf_expand(m, n, digits, cbound, &buf)
        if status == CF_NOMEM:
            raise MemoryError()
        out = [0] * buf.len
        for i in range(buf.len):
            if buf.q[i]:
                out[i] = buf.q[i]
            else:
                out[i] = _mpz_to_int(buf.big[ib])
                ib += 1
        return status == CF_OK, out
    finally:
        cf_buf_free(&buf)
        mpz_clear(cbound)
