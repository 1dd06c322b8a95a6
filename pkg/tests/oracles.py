"""Independent reference implementations used only to check the package.

Everything here deliberately avoids the code paths under test: the
eigendecomposition is a hand-written cyclic Jacobi, the Gram oracle is a
double loop, alignment is brute-forced over an angle grid, and incoherence
is recomputed with scalar scans straight from the definitions.
"""

import numpy as np


def jacobi_eig(a, tol=1e-14, max_sweeps=100):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi
    rotations, run until the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||A||_F)``.  Returns (values desc, vectors)."""
    a = np.array(a, dtype=np.float64)
    d = a.shape[0]
    v = np.eye(d)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= threshold:
            w = np.diag(a).copy()
            order = np.argsort(w)[::-1]
            return w[order], v[:, order]
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:  # theta^2 would overflow
                    t = 1.0 / (2.0 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    raise RuntimeError("Jacobi sweep budget exhausted")


def gram_double_loop(obs):
    """Brute-force G_ik = (1/p^2) sum_j A_ij A_kj for i != k, zero diagonal."""
    a = np.zeros((obs.d1, obs.d2))
    a[obs.rows, obs.cols] = obs.values
    g = np.zeros((obs.d1, obs.d1))
    for i in range(obs.d1):
        for k in range(obs.d1):
            if i == k:
                continue
            acc = 0.0
            for j in range(obs.d2):
                acc += a[i, j] * a[k, j]
            g[i, k] = acc / (obs.p * obs.p)
    return g


def incoherence_scan(truth):
    """Recompute (mu0, mu1, mu2, kappa) by plain scalar scans."""
    a, u, v = truth.astar, truth.ustar, truth.vstar
    best = 0.0
    fro2 = 0.0
    for i in range(truth.d1):
        for j in range(truth.d2):
            fro2 += a[i, j] ** 2
            best = max(best, a[i, j] ** 2)
    mu0 = truth.d1 * truth.d2 * best / fro2
    mu1 = truth.d1 / truth.r * max(sum(u[i, k] ** 2 for k in range(truth.r))
                                   for i in range(truth.d1))
    mu2 = truth.d2 / truth.r * max(sum(v[j, k] ** 2 for k in range(truth.r))
                                   for j in range(truth.d2))
    kappa = truth.sigma_star[0] / truth.sigma_star[-1]
    return mu0, mu1, mu2, kappa


def rotation_reflection_grid(step=1e-4):
    """All 2x2 rotations Q(theta) and reflections Q(theta) diag(1, -1) on a
    theta grid of the given step, stacked as (n, 2, 2)."""
    thetas = np.arange(0.0, 2.0 * np.pi, step)
    c, s = np.cos(thetas), np.sin(thetas)
    qs = []
    for refl in (1.0, -1.0):
        q = np.empty((thetas.size, 2, 2))
        q[:, 0, 0] = c
        q[:, 0, 1] = -s * refl
        q[:, 1, 0] = s
        q[:, 1, 1] = c * refl
        qs.append(q)
    return np.concatenate(qs, axis=0)


def brute_align_spec(u, ustar, step=1e-4):
    """Brute-force min over orthogonal Q of ||U Q - U*|| (spectral norm);
    r = 1 enumerates signs, r = 2 walks the angle grid."""
    r = u.shape[1]
    if r == 1:
        return min(float(np.linalg.norm(s * u - ustar, 2)) for s in (1.0, -1.0))
    if r != 2:
        raise ValueError("brute force supports r in {1, 2}")
    qs = rotation_reflection_grid(step)
    m = np.einsum("ij,tjk->tik", u, qs) - ustar[None, :, :]
    mtm = np.einsum("tij,tik->tjk", m, m)
    tr = mtm[:, 0, 0] + mtm[:, 1, 1]
    det = mtm[:, 0, 0] * mtm[:, 1, 1] - mtm[:, 0, 1] * mtm[:, 1, 0]
    top = (tr + np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0))) / 2.0
    return float(np.sqrt(np.min(top)))


def brute_align_fro(u, ustar, step=1e-4):
    """Brute-force min over orthogonal Q of ||U Q - U*||_F for r in {1, 2}."""
    r = u.shape[1]
    if r == 1:
        return min(float(np.linalg.norm(s * u - ustar)) for s in (1.0, -1.0))
    qs = rotation_reflection_grid(step)
    m = np.einsum("ij,tjk->tik", u, qs) - ustar[None, :, :]
    return float(np.sqrt(np.min(np.sum(m * m, axis=(1, 2)))))


def unfold_contraction(t):
    """Triple-loop contraction C_{i,i'} = sum_{j,k} T[i,j,k] T[i',j,k]."""
    d = t.shape[0]
    c = np.zeros((d, d))
    for i in range(d):
        for ip in range(d):
            acc = 0.0
            for j in range(d):
                for k in range(d):
                    acc += t[i, j, k] * t[ip, j, k]
            c[i, ip] = acc
    return c


def projector_pinv(w):
    """Column-space projector via the pseudo-inverse, W (W^T W)^-1 W^T."""
    return w @ np.linalg.pinv(w)


def random_orthonormal(d, r, seed):
    """Haar-ish orthonormal columns from a QR of reference Gaussians
    (numpy's own generator, independent of the package streams)."""
    g = np.random.default_rng(seed)
    q, _ = np.linalg.qr(g.standard_normal((d, r)))
    return q[:, :r]
