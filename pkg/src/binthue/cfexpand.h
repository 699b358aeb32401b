/* Certified continued-fraction expansion of m^(1/n) on GMP integers.
 *
 * The complete quotient is enclosed by two exact rationals P1/Q1 and P2/Q2,
 * seeded with a certified bracket of m^(1/n) on the grid 2^-B.  A partial
 * quotient is accepted only when both endpoints have the same floor and
 * neither remainder vanishes, so every emitted digit is a true digit of
 * m^(1/n).  Runs of digits are extracted from the leading 63 bits of the
 * four integers (Lehmer batching); the truncation is folded into the
 * enclosure, so a batch is certified the same way as a single step.
 */
#ifndef BINTHUE_CFEXPAND_H
#define BINTHUE_CFEXPAND_H

#include <stdlib.h>
#include <string.h>
#include <math.h>
#include <gmp.h>

typedef unsigned long long cf_u64;
typedef unsigned __int128 cf_u128;

#define CF_OK 0
#define CF_AMBIGUOUS 1
#define CF_NOMEM 2

/* Quotients that do not fit in 64 bits are stored as 0 in `q` and the
 * value is appended to `big` (0 is never a valid quotient here). */
typedef struct {
    cf_u64 *q;
    size_t len, cap;
    mpz_t *big;
    size_t nbig, capbig;
} cf_buf;

static void cf_buf_init(cf_buf *b) {
    b->q = NULL; b->len = b->cap = 0;
    b->big = NULL; b->nbig = b->capbig = 0;
}

static void cf_buf_free(cf_buf *b) {
    size_t i;
    for (i = 0; i < b->nbig; i++) mpz_clear(b->big[i]);
    free(b->big);
    free(b->q);
    cf_buf_init(b);
}

static int cf_push_small(cf_buf *b, cf_u64 v) {
    if (b->len == b->cap) {
        size_t nc = b->cap ? 2 * b->cap : 1024;
        cf_u64 *nq = (cf_u64 *)realloc(b->q, nc * sizeof(cf_u64));
        if (!nq) return CF_NOMEM;
        b->q = nq; b->cap = nc;
    }
    b->q[b->len++] = v;
    return CF_OK;
}

static int cf_push_mpz(cf_buf *b, const mpz_t v) {
    if (mpz_sizeinbase(v, 2) <= 64) {
        cf_u64 x = (cf_u64)mpz_get_ui(v);
        return cf_push_small(b, x);
    }
    if (b->nbig == b->capbig) {
        size_t nc = b->capbig ? 2 * b->capbig : 8;
        mpz_t *nb = (mpz_t *)realloc(b->big, nc * sizeof(mpz_t));
        if (!nb) return CF_NOMEM;
        b->big = nb; b->capbig = nc;
    }
    mpz_init_set(b->big[b->nbig++], v);
    return cf_push_small(b, 0);
}

/* top 63 bits of x shifted right by sh */
static cf_u64 cf_top(mpz_t tmp, const mpz_t x, size_t sh) {
    mpz_tdiv_q_2exp(tmp, x, sh);
    return (cf_u64)mpz_get_ui(tmp);
}

#define CF_MAXRUN 96

/* Digits common to every number in [lo, hi] (both given as u64 fractions).
 * Returns the count and fills the transition matrix M = prod [[a,1],[1,0]]. */
static int cf_small_run(cf_u64 ln, cf_u64 ld, cf_u64 hn, cf_u64 hd,
                        cf_u64 *out, cf_u64 M[4]) {
    cf_u64 m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    int t = 0;
    while (t < CF_MAXRUN && ld && hd) {
        cf_u64 qa = ln / ld, qb = hn / hd, ra, rb, n00, n10;
        if (qa != qb) break;
        ra = ln - qa * ld;
        rb = hn - qb * hd;
        if (!ra || !rb) break;
        if (__builtin_mul_overflow(m00, qa, &n00) || __builtin_add_overflow(n00, m01, &n00)) break;
        if (__builtin_mul_overflow(m10, qa, &n10) || __builtin_add_overflow(n10, m11, &n10)) break;
        if ((n00 >> 63) || (n10 >> 63)) break;
        m01 = m00; m00 = n00;
        m11 = m10; m10 = n10;
        ln = ld; ld = ra;
        hn = hd; hd = rb;
        out[t++] = qa;
    }
    M[0] = m00; M[1] = m01; M[2] = m10; M[3] = m11;
    return t;
}

/* (P, Q) <- M^{-1} (P, Q), sign fixed by the parity of the run length. */
static void cf_apply_inverse(mpz_t P, mpz_t Q, mpz_t X, mpz_t Y,
                             const cf_u64 M[4], int odd) {
    mpz_mul_ui(X, P, (unsigned long)M[3]);
    mpz_submul_ui(X, Q, (unsigned long)M[1]);
    mpz_mul_ui(Y, Q, (unsigned long)M[0]);
    mpz_submul_ui(Y, P, (unsigned long)M[2]);
    if (odd) { mpz_neg(X, X); mpz_neg(Y, Y); }
    mpz_swap(P, X);
    mpz_swap(Q, Y);
}

/* an/ad < bn/bd */
static int cf_frac_less(cf_u64 an, cf_u64 ad, cf_u64 bn, cf_u64 bd) {
    return (cf_u128)an * bd < (cf_u128)bn * ad;
}

/* (a / 2^p)^e scaled by 2^p, each product rounded down (up = 0) or up. */
static void cf_fx_pow(mpz_t r, const mpz_t a, unsigned long e, unsigned long p,
                      int up, mpz_t base) {
    mpz_set_ui(r, 1);
    mpz_mul_2exp(r, r, p);
    mpz_set(base, a);
    while (e) {
        if (e & 1) {
            mpz_mul(r, r, base);
            if (up) mpz_cdiv_q_2exp(r, r, p); else mpz_fdiv_q_2exp(r, r, p);
        }
        e >>= 1;
        if (e) {
            mpz_mul(base, base, base);
            if (up) mpz_cdiv_q_2exp(base, base, p); else mpz_fdiv_q_2exp(base, base, p);
        }
    }
}

#define CF_GUARD 32

/* Enclose m^(1/n) in (lo / 2^B, hi / 2^B) with hi - lo <= 3.  Newton iteration
 * in fixed point gives the estimate; a power evaluation with directed rounding
 * certifies both ends.  Falls back to the exact integer root when the check
 * fails. */
static void cf_seed(mpz_t lo, mpz_t hi, unsigned long m, unsigned long n,
                    unsigned long B) {
    mpz_t X, P, Q, T, base;
    unsigned long prec[64], p, q = B + CF_GUARD;
    int np = 0, i, ok;
    double x0 = pow((double)m, 1.0 / (double)n);

    mpz_inits(X, P, Q, T, base, NULL);
    for (p = q; p > 48 && np < 63; p = p / 2 + 8) prec[np++] = p;
    p = 48;
    mpz_set_d(X, ldexp(x0, 48));
    for (i = np - 1; i >= -1; i--) {
        unsigned long target = i >= 0 ? prec[i] : q;  /* one extra pass at q */
        mpz_mul_2exp(X, X, target - p);
        p = target;
        cf_fx_pow(P, X, n - 1, p, 0, base);
        mpz_set_ui(Q, m);
        mpz_mul_2exp(Q, Q, 2 * p);
        mpz_fdiv_q(Q, Q, P);
        mpz_sub(T, Q, X);
        mpz_fdiv_q_ui(T, T, n);
        mpz_add(X, X, T);
    }
    mpz_fdiv_q_2exp(lo, X, CF_GUARD);
    mpz_sub_ui(lo, lo, 1);
    mpz_add_ui(hi, lo, 3);

    /* lower end: (lo/2^B)^n rounded up stays below m */
    mpz_mul_2exp(T, lo, CF_GUARD);
    cf_fx_pow(P, T, n, q, 1, base);
    mpz_set_ui(Q, m);
    mpz_mul_2exp(Q, Q, q);
    ok = mpz_sgn(lo) > 0 && mpz_cmp(P, Q) < 0;
    if (ok) {
        /* upper end: (hi/2^B)^n rounded down stays above m */
        mpz_mul_2exp(T, hi, CF_GUARD);
        cf_fx_pow(P, T, n, q, 0, base);
        ok = mpz_cmp(P, Q) > 0;
    }
    if (!ok) {
        mpz_set_ui(T, m);
        mpz_mul_2exp(T, T, n * B);
        mpz_root(lo, T, n);
        mpz_add_ui(hi, lo, 1);
    }
    mpz_clears(X, P, Q, T, base, NULL);
}

/* Expand m^(1/n) with `digits` decimal digits until the first denominator
 * exceeding `bound`.  Quotients a_0..a_s are appended to `out`. */
static int cf_expand(unsigned long m, unsigned long n, unsigned long digits,
                     const mpz_t bound, cf_buf *out) {
    mpz_t P1, Q1, P2, Q2, X, Y, R, a, k1, k0, kt, tmp;
    cf_u64 run[CF_MAXRUN], M[4];
    int status = CF_OK, done = 0;

    mpz_inits(P1, Q1, P2, Q2, X, Y, R, a, k1, k0, kt, tmp, NULL);
    {
        /* binary scale with at least `digits` decimal digits */
        unsigned long B = (unsigned long)ceil((double)digits * 3.3219280948873623) + 2;
        cf_seed(P1, P2, m, n, B);
        mpz_set_ui(Q1, 1);
        mpz_mul_2exp(Q1, Q1, B);
        mpz_set(Q2, Q1);
    }
    mpz_set_ui(k1, 0);  /* k_{-1} */
    mpz_set_ui(k0, 1);  /* k_{-2} */

    while (!done && status == CF_OK) {
        size_t bits = mpz_sizeinbase(P1, 2), b;
        b = mpz_sizeinbase(Q1, 2); if (b > bits) bits = b;
        b = mpz_sizeinbase(P2, 2); if (b > bits) bits = b;
        b = mpz_sizeinbase(Q2, 2); if (b > bits) bits = b;

        if (bits > 96) {
            size_t sh = bits - 63;
            cf_u64 p1 = cf_top(tmp, P1, sh), q1 = cf_top(tmp, Q1, sh);
            cf_u64 p2 = cf_top(tmp, P2, sh), q2 = cf_top(tmp, Q2, sh);
            int t = 0;
            if (q1 && q2) {
                cf_u64 ln = p1, ld = q1 + 1, hn = p1 + 1, hd = q1;
                if (cf_frac_less(p2, q2 + 1, ln, ld)) { ln = p2; ld = q2 + 1; }
                if (cf_frac_less(hn, hd, p2 + 1, q2)) { hn = p2 + 1; hd = q2; }
                t = cf_small_run(ln, ld, hn, hd, run, M);
            }
            if (t > 0) {
                int i;
                /* k_{j+t-1} = k1*m00 + k0*m10 */
                mpz_mul_ui(kt, k1, (unsigned long)M[0]);
                mpz_addmul_ui(kt, k0, (unsigned long)M[2]);
                if (mpz_cmp(kt, bound) > 0) {
                    for (i = 0; i < t; i++) {
                        if ((status = cf_push_small(out, run[i])) != CF_OK) break;
                        mpz_set(kt, k0);
                        mpz_addmul_ui(kt, k1, (unsigned long)run[i]);
                        mpz_swap(k0, k1);
                        mpz_swap(k1, kt);
                        if (mpz_cmp(k1, bound) > 0) { done = 1; break; }
                    }
                    break;
                }
                for (i = 0; i < t; i++)
                    if ((status = cf_push_small(out, run[i])) != CF_OK) break;
                /* k_{j+t-2} = k1*m01 + k0*m11 */
                mpz_mul_ui(X, k1, (unsigned long)M[1]);
                mpz_addmul_ui(X, k0, (unsigned long)M[3]);
                mpz_swap(k1, kt);
                mpz_swap(k0, X);
                cf_apply_inverse(P1, Q1, X, Y, M, t & 1);
                cf_apply_inverse(P2, Q2, X, Y, M, t & 1);
                continue;
            }
        }

        /* one exact step */
        mpz_tdiv_qr(a, R, P1, Q1);
        mpz_set(Y, P2);
        mpz_submul(Y, a, Q2);
        if (mpz_sgn(R) == 0 || mpz_sgn(Y) <= 0 || mpz_cmp(Y, Q2) >= 0) {
            status = CF_AMBIGUOUS;
            break;
        }
        if ((status = cf_push_mpz(out, a)) != CF_OK) break;
        mpz_set(kt, k0);
        mpz_addmul(kt, a, k1);
        mpz_swap(k0, k1);
        mpz_swap(k1, kt);
        if (mpz_cmp(k1, bound) > 0) { done = 1; break; }
        mpz_swap(P1, Q1); mpz_swap(Q1, R);
        mpz_swap(P2, Q2); mpz_swap(Q2, Y);
    }

    mpz_clears(P1, Q1, P2, Q2, X, Y, R, a, k1, k0, kt, tmp, NULL);
    return status;
}

#endif
