"""Compiled conditional-entropy kernel used inside the measurement optimizer."""

from libc.math cimport log2, sqrt
from libc.stdlib cimport malloc, free
from scipy.linalg.cython_lapack cimport zheev

cdef double EPS_EIG = 1e-12
cdef double EPS_PROB = 1e-10


cdef inline double _xlogx_sum(double *lam, int n, double p) nogil:
    cdef double acc = 0.0, x
    cdef int i
    for i in range(n):
        x = lam[i] / p
        if x >= EPS_EIG:
            acc -= x * log2(x)
    return acc


cdef int _eigvals(double complex *a, int d, double *w,
                  double complex *work, int lwork, double *rwork) nogil:
    cdef double tr, diff, off
    cdef int info = 0
    cdef char jobz = b'N'
    cdef char uplo = b'L'
    if d == 1:
        w[0] = a[0].real
        return 0
    if d == 2:
        tr = 0.5 * (a[0].real + a[3].real)
        diff = 0.5 * (a[0].real - a[3].real)
        off = a[1].real * a[1].real + a[1].imag * a[1].imag
        off = sqrt(diff * diff + off)
        w[0] = tr - off
        w[1] = tr + off
        return 0
    zheev(&jobz, &uplo, &d, a, &d, w, work, &lwork, rwork, &info)
    return info


def weighted_conditional_entropy(const double complex[:, :, :, ::1] rho,
                                 const double complex[:, ::1] vecs):
    """Return sum_k p_k S(rho_k) in bits for rank-one effects v_k v_k^dagger on B.

    ``rho`` has shape (dA, dB, dA, dB); ``vecs`` has shape (n, dB).
    Outcomes with p_k below 1e-10 contribute nothing.
    """
    cdef int da = rho.shape[0]
    cdef int db = rho.shape[1]
    cdef int n = vecs.shape[0]
    cdef int k, a, c, b, e
    cdef int info = 0
    cdef int lwork = 4 * da if da > 1 else 1
    cdef double complex acc, vb
    cdef double p, total = 0.0
    if vecs.shape[1] != db:
        raise ValueError("effect vectors do not match the measured dimension")
    cdef double complex *cond = <double complex *> malloc(da * da * sizeof(double complex))
    cdef double complex *tmp = <double complex *> malloc(da * db * da * sizeof(double complex))
    cdef double complex *work = <double complex *> malloc(lwork * sizeof(double complex))
    cdef double *rwork = <double *> malloc((3 * da) * sizeof(double))
    cdef double *w = <double *> malloc(da * sizeof(double))
    if cond == NULL or tmp == NULL or work == NULL or rwork == NULL or w == NULL:
        free(cond); free(tmp); free(work); free(rwork); free(w)
        raise MemoryError()
    try:
        with nogil:
            for k in range(n):
                # tmp[a, b, c] = sum_e rho[a, b, c, e] v[e]
                for a in range(da):
                    for b in range(db):
                        for c in range(da):
                            acc = 0.0
                            for e in range(db):
                                acc = acc + rho[a, b, c, e] * vecs[k, e]
                            tmp[(a * db + b) * da + c] = acc
                # cond[a, c] = sum_b conj(v[b]) tmp[a, b, c]
                p = 0.0
                for a in range(da):
                    for c in range(da):
                        acc = 0.0
                        for b in range(db):
                            vb = vecs[k, b]
                            acc = acc + vb.conjugate() * tmp[(a * db + b) * da + c]
                        cond[a * da + c] = acc
                    p += cond[a * da + a].real
                if p <= EPS_PROB:
                    continue
                info = _eigvals(cond, da, w, work, lwork, rwork)
                if info != 0:
                    break
                total += p * _xlogx_sum(w, da, p)
        if info != 0:
            raise RuntimeError(f"zheev failed with info={info}")
    finally:
        free(cond); free(tmp); free(work); free(rwork); free(w)
    return total
