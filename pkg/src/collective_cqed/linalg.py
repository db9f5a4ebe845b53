"""Cyclic Jacobi eigensolver for real symmetric and complex Hermitian matrices.

The matrices in this package are small (4x4 for the reduced model, at most a
few dozen states for the full-model oracle), so a plain cyclic Jacobi sweep
is fast enough and gives bit-reproducible results.
"""

from __future__ import annotations

import numpy as np

__all__ = ["jacobi_eigh", "hermitian_eigh", "ConvergenceError"]


class ConvergenceError(RuntimeError):
    pass


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(matrix, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    matrix : array_like, shape (n, n)
        Real symmetric matrix. Only the symmetric part is used.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is at most
        ``tol * ||matrix||_F``.
    max_sweeps : int
        Upper bound on the number of full sweeps.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Ascending.
    eigenvectors : ndarray, shape (n, n)
        Orthonormal columns, ``eigenvectors[:, k]`` belongs to ``eigenvalues[k]``.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = float(np.linalg.norm(a))
    if n < 2 or scale == 0.0:
        return _sorted(np.diag(a).copy(), v)

    target = tol * scale
    for _ in range(max_sweeps):
        if _off_norm(a) <= target:
            return _sorted(np.diag(a).copy(), v)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                # below round-off relative to both diagonal entries: skip
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * (abs(a[p, p]) + abs(a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c

                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if _off_norm(a) <= target:
        return _sorted(np.diag(a).copy(), v)
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def _sorted(w: np.ndarray, v: np.ndarray):
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigh(matrix, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a complex Hermitian matrix.

    Real input is passed straight to :func:`jacobi_eigh`. Complex input
    ``A + iB`` is diagonalized through its real embedding
    ``[[A, -B], [B, A]]``, whose spectrum is that of the original with every
    eigenvalue doubled; each degenerate pair of real eigenvectors ``(x, y)``
    yields the complex eigenvector ``x + iy``.
    """
    h = np.asarray(matrix)
    if not np.iscomplexobj(h) or not np.any(h.imag):
        w, v = jacobi_eigh(np.real(h), tol=tol, max_sweeps=max_sweeps)
        return w, v.astype(complex) if np.iscomplexobj(h) else v

    h = 0.5 * (h + h.conj().T)
    n = h.shape[0]
    a, b = h.real, h.imag
    embed = np.block([[a, -b], [b, a]])
    w2, v2 = jacobi_eigh(embed, tol=tol, max_sweeps=max_sweeps)
    cand = v2[:n, :] + 1j * v2[n:, :]

    # Group the doubled spectrum into clusters and pull an orthonormal complex
    # basis out of each cluster by Gram-Schmidt.
    gap = 1e-10 * max(float(np.linalg.norm(embed)), 1.0)
    values, vectors = [], []
    start = 0
    while start < 2 * n:
        stop = start + 1
        while stop < 2 * n and w2[stop] - w2[stop - 1] <= gap:
            stop += 1
        size = stop - start
        if size % 2:
            raise ConvergenceError("real embedding produced an unpaired eigenvalue")
        # the candidates are a real orthonormal frame of a k-dim complex space,
        # so the largest residual is always at least 1/sqrt(k)
        rest = cand[:, start:stop].copy()
        basis = []
        for _ in range(size // 2):
            norms = np.linalg.norm(rest, axis=0)
            j = int(np.argmax(norms))
            if norms[j] < 1e-6:
                raise ConvergenceError("could not recover complex eigenvectors from the embedding")
            e = rest[:, j] / norms[j]
            e -= sum((np.vdot(f, e) * f for f in basis), np.zeros(n, complex))
            e /= np.linalg.norm(e)
            basis.append(e)
            rest -= np.outer(e, e.conj() @ rest)
        vectors.extend(basis)
        start = stop
    # Vectors of close but separate clusters are orthogonal only to about
    # residual/gap; a symmetric (Loewdin) correction V (I - E/2), E = V^H V - I,
    # restores orthonormality while moving each vector as little as possible.
    vecs = np.column_stack(vectors)
    for _ in range(2):
        err = vecs.conj().T @ vecs - np.eye(n)
        vecs = vecs - 0.5 * vecs @ err
    values = np.real(np.einsum("ij,ij->j", vecs.conj(), h @ vecs))
    order = np.argsort(values, kind="stable")
    return values[order], vecs[:, order]
