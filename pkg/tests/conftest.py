"""Shared fixtures and independent reference computations.

The reference routines here avoid the package's own kernels: projections
come from classical Gram-Schmidt, bounds from dense eigenvalue calls on
explicitly summed rank-one terms.
"""
import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def gram_schmidt(V, tol=1e-10):
    """Orthonormal basis of the column span by modified Gram-Schmidt (two passes)."""
    V = np.asarray(V)
    dtype = np.complex128 if np.iscomplexobj(V) else np.float64
    scale = max(np.linalg.norm(V, axis=0).max(initial=0.0), 1.0)
    out = []
    for k in range(V.shape[1]):
        u = V[:, k].astype(dtype)
        for _ in range(2):
            for q in out:
                u = u - np.vdot(q, u) * q
        nrm = np.linalg.norm(u)
        if nrm > tol * scale:
            out.append(u / nrm)
    if not out:
        return np.zeros((V.shape[0], 0), dtype=dtype)
    return np.column_stack(out)


def ref_projector(V):
    Q = gram_schmidt(V)
    return Q @ Q.conj().T


def ref_frame_operator(bases, weights):
    """``sum_i v_i^2 sum_k q_ik q_ik^H`` from Gram-Schmidt bases of the given spanning sets."""
    n = np.asarray(bases[0]).shape[0]
    S = np.zeros((n, n), dtype=complex)
    for V, v in zip(bases, weights):
        Q = gram_schmidt(V)
        for k in range(Q.shape[1]):
            S += v**2 * np.outer(Q[:, k], Q[:, k].conj())
    return S


def ref_vector_bounds(V):
    """Bounds of the system ``{columns of V}`` from ``sum_j f_j f_j^H``."""
    n = V.shape[0]
    S = np.zeros((n, n), dtype=complex)
    for j in range(V.shape[1]):
        S += np.outer(V[:, j], V[:, j].conj())
    w = np.linalg.eigvalsh((S + S.conj().T) / 2)
    return w[0], w[-1]


def probe_ratio_extremes(Q, rng, probes=2000):
    """Random-probe estimate of the extreme Rayleigh quotients of Hermitian ``Q``."""
    n = Q.shape[0]
    X = rng.standard_normal((n, probes)) + 1j * rng.standard_normal((n, probes))
    X /= np.linalg.norm(X, axis=0)
    r = np.real(np.einsum("ij,ij->j", X.conj(), Q @ X))
    return r.min(), r.max()
