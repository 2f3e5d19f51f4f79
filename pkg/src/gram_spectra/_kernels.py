"""Numba kernels behind the dense linear algebra and the solver loops.

Everything here is deliberately scalar-loop code: the decompositions are
self-contained (Householder QR, one-sided Jacobi SVD, cyclic Jacobi
eigensolver) rather than LAPACK bindings, because high relative accuracy of
the *smallest* singular values is the quantity of scientific interest.
Kernels are sequential and allocation-free in their hot loops, so results
are bit-reproducible for a fixed build regardless of how callers schedule
trials.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def _dot(a, b):
    s = 0.0
    for k in range(a.shape[0]):
        s += a[k] * b[k]
    return s


@njit(cache=True, fastmath=True)
def householder_qr(A):
    """Factor A (n x p, n >= p) as Q R.

    Returns ``(R, vs, vnorm2)`` where R is the p x p upper triangle and
    ``vs[k]``/``vnorm2[k]`` hold the k-th reflector (supported on rows k..n-1).
    """
    n, p = A.shape
    R = A.copy()
    vs = np.zeros((p, n))
    vnorm2 = np.zeros(p)
    for k in range(p):
        s = 0.0
        for i in range(k, n):
            s += R[i, k] * R[i, k]
        norm = np.sqrt(s)
        if norm == 0.0:
            continue
        alpha = -norm if R[k, k] >= 0.0 else norm
        v0 = R[k, k] - alpha
        vn2 = v0 * v0
        for i in range(k + 1, n):
            vs[k, i] = R[i, k]
            vn2 += R[i, k] * R[i, k]
        if vn2 == 0.0:
            continue
        vs[k, k] = v0
        vnorm2[k] = vn2
        for j in range(k, p):
            dot = 0.0
            for i in range(k, n):
                dot += vs[k, i] * R[i, j]
            c = 2.0 * dot / vn2
            for i in range(k, n):
                R[i, j] -= c * vs[k, i]
    Rtri = np.zeros((p, p))
    for i in range(p):
        for j in range(i, p):
            Rtri[i, j] = R[i, j]
    return Rtri, vs, vnorm2


@njit(cache=True, fastmath=True)
def apply_q(vs, vnorm2, B):
    """Compute Q @ [B; 0] where Q is the implicit QR factor (n x n) and
    B is p x m; the result is n x m."""
    p, n = vs.shape
    m = B.shape[1]
    out = np.zeros((n, m))
    for i in range(p):
        for j in range(m):
            out[i, j] = B[i, j]
    for k in range(p - 1, -1, -1):
        if vnorm2[k] == 0.0:
            continue
        for j in range(m):
            dot = 0.0
            for i in range(k, n):
                dot += vs[k, i] * out[i, j]
            c = 2.0 * dot / vnorm2[k]
            for i in range(k, n):
                out[i, j] -= c * vs[k, i]
    return out


@njit(cache=True, fastmath=True)
def onesided_jacobi(W, VW, accumulate_v, tol, max_sweeps):
    """Orthogonalize the rows of W (p x m) by plane rotations.

    Rows of W are the columns of the matrix being decomposed.  On exit the
    rows are mutually orthogonal: row norms are the singular values.  When
    ``accumulate_v`` is set the same rotations are applied to the rows of VW
    (p x p, starts as identity), so that VW = V^T of the decomposition.
    Returns the number of sweeps used (max_sweeps means no full convergence;
    in practice convergence takes O(log p) sweeps).
    """
    p, m = W.shape
    sweeps = 0
    for sweep in range(max_sweeps):
        rotated = 0
        for i in range(p - 1):
            for j in range(i + 1, p):
                wi = W[i]
                wj = W[j]
                alpha = _dot(wi, wi)
                beta = _dot(wj, wj)
                gamma = _dot(wi, wj)
                if alpha == 0.0 or beta == 0.0:
                    continue
                if abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated += 1
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for k in range(m):
                    a = wi[k]
                    b = wj[k]
                    wi[k] = c * a - s * b
                    wj[k] = s * a + c * b
                if accumulate_v:
                    vi = VW[i]
                    vj = VW[j]
                    for k in range(p):
                        a = vi[k]
                        b = vj[k]
                        vi[k] = c * a - s * b
                        vj[k] = s * a + c * b
        sweeps = sweep + 1
        if rotated == 0:
            break
    return sweeps


@njit(cache=True, fastmath=True)
def sym_jacobi(S, V, accumulate_v, tol, max_sweeps):
    """Cyclic Jacobi diagonalization of symmetric S (in place).

    When ``accumulate_v`` is set, V (starts as identity) accumulates the
    rotations so that the input satisfies S_in = V diag(S_out) V^T.
    Convergence: off-diagonal Frobenius mass below tol * ||S||_F.
    """
    p = S.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        nrm = 0.0
        for i in range(p):
            for j in range(p):
                nrm += S[i, j] * S[i, j]
                if j > i:
                    off += S[i, j] * S[i, j]
        if nrm == 0.0 or off <= tol * tol * nrm:
            return sweep
        for i in range(p - 1):
            for j in range(i + 1, p):
                sij = S[i, j]
                if sij == 0.0:
                    continue
                if abs(sij) <= 1e-18 * (abs(S[i, i]) + abs(S[j, j])):
                    continue
                theta = (S[j, j] - S[i, i]) / (2.0 * sij)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for k in range(p):
                    a = S[k, i]
                    b = S[k, j]
                    S[k, i] = c * a - s * b
                    S[k, j] = s * a + c * b
                for k in range(p):
                    a = S[i, k]
                    b = S[j, k]
                    S[i, k] = c * a - s * b
                    S[j, k] = s * a + c * b
                if accumulate_v:
                    for k in range(p):
                        a = V[k, i]
                        b = V[k, j]
                        V[k, i] = c * a - s * b
                        V[k, j] = s * a + c * b
    return max_sweeps


@njit(cache=True)
def gd_loop(S, b, theta, theta_star, L, epsilon, max_iter, gaps, resids, collect):
    """Gradient descent on g(x) = x'Sx/2 - b'x with step 1/L.

    Records the objective gap g(theta_t) - g(theta*) = e_t' S e_t / 2 in
    ``gaps`` (one entry per visited iterate).  When ``collect`` is set,
    ``resids[t]`` receives the relative residual of the exact error
    recursion e_{t+1} = (I - S/L) e_t measured on the computed iterates.
    Returns the first t with gap_t <= epsilon * gap_0, or -1 if max_iter
    iterations were exhausted first.
    """
    p = S.shape[0]
    v = np.empty(p)
    w = np.empty(p)
    # w = S theta_star (residual reference for the recursion check)
    for i in range(p):
        acc = 0.0
        for j in range(p):
            acc += S[i, j] * theta_star[j]
        w[i] = acc
    inv_l = 1.0 / L
    eps_gap = 0.0
    for t in range(max_iter + 1):
        for i in range(p):
            acc = 0.0
            for j in range(p):
                acc += S[i, j] * theta[j]
            v[i] = acc
        gap = 0.0
        for i in range(p):
            gap += (theta[i] - theta_star[i]) * (v[i] - b[i])
        gap *= 0.5
        gaps[t] = gap
        if t == 0:
            eps_gap = epsilon * gap
        if gap <= eps_gap:
            return t
        if t == max_iter:
            return -1
        if collect:
            # predicted e_{t+1} = e_t - (S e_t)/L with S e_t = v - w
            num = 0.0
            den = 0.0
            for i in range(p):
                e_old = theta[i] - theta_star[i]
                den += e_old * e_old
                pred = e_old - inv_l * (v[i] - w[i])
                e_new = (theta[i] - inv_l * (v[i] - b[i])) - theta_star[i]
                d = e_new - pred
                num += d * d
            if den > 0.0:
                resids[t] = np.sqrt(num / den)
            else:
                resids[t] = 0.0
        for i in range(p):
            theta[i] -= inv_l * (v[i] - b[i])
    return -1
