"""Pure numpy implementation of the compiled kernels (import-time fallback)."""

import numpy as np

EPS_EIG = 1e-12
EPS_PROB = 1e-10


def weighted_conditional_entropy(rho, vecs):
    """Return sum_k p_k S(rho_k) in bits for rank-one effects v_k v_k^dagger on B.

    ``rho`` has shape (dA, dB, dA, dB); ``vecs`` has shape (n, dB).
    """
    rho = np.asarray(rho)
    vecs = np.asarray(vecs)
    if vecs.shape[1] != rho.shape[1]:
        raise ValueError("effect vectors do not match the measured dimension")
    cond = np.einsum("kb,abce,ke->kac", vecs.conj(), rho, vecs)
    p = np.einsum("kaa->k", cond).real
    keep = p > EPS_PROB
    if not np.any(keep):
        return 0.0
    p = p[keep]
    lam = np.linalg.eigvalsh(cond[keep]) / p[:, None]
    mask = lam >= EPS_EIG
    terms = np.zeros_like(lam)
    terms[mask] = -lam[mask] * np.log2(lam[mask])
    return float(np.dot(p, terms.sum(axis=1)))
