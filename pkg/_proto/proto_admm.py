"""Prototype: ADMM for the Toeplitz-block SDP + FFT basis-pursuit oracle."""
import numpy as np
import time


def toeplitz_from_first_row(u):
    n = u.shape[0]
    t = np.empty((n, n), dtype=complex)
    for k in range(n):
        v = u[k]
        for i in range(n - k):
            t[i, i + k] = v
            t[i + k, i] = np.conj(v)
    return t


def diag_means(e):
    n = e.shape[0]
    u = np.empty(n, dtype=complex)
    for k in range(n):
        u[k] = np.mean(np.diagonal(e, k))
    return u


def psd_project(a):
    m = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(m)
    pos = w > 0
    if not np.any(pos):
        return np.zeros_like(m)
    vp = v[:, pos]
    return (vp * w[pos]) @ vp.conj().T


def admm_anm(n, mode, h_fixed, b, cnt, znorm2, xi, rho=1.0, max_iter=20000,
             eps_abs=1e-7, eps_rel=1e-6, adapt=True, state=None):
    """mode 0: atomic-norm SDP with h fixed. mode 1: regularized denoiser."""
    if state is None:
        z_mat = np.zeros((n + 1, n + 1), dtype=complex)
        lam = np.zeros((n + 1, n + 1), dtype=complex)
        h = h_fixed.copy()
    else:
        z_mat, lam, h = state
        h = h.copy()
    d = np.zeros((n + 1, n + 1), dtype=complex)
    it = 0
    for it in range(1, max_iter + 1):
        e = z_mat - lam / rho
        # (t, u, h) updates
        t = e[n, n].real - xi / (2.0 * rho)
        u = diag_means(e[:n, :n])
        u[0] = u[0].real - xi / (2.0 * rho * n)
        u[0] = u[0].real
        if mode == 1:
            eh = e[:n, n]
            h = (b + 2.0 * rho * eh) / (cnt + 2.0 * rho)
        # assemble D
        tu = toeplitz_from_first_row(u)
        d[:n, :n] = tu
        d[:n, n] = h
        d[n, :n] = h.conj()
        d[n, n] = t
        z_old = z_mat
        z_mat = psd_project(d + lam / rho)
        lam = lam + rho * (d - z_mat)
        pri = np.linalg.norm(d - z_mat)
        dua = rho * np.linalg.norm(z_mat - z_old)
        eps_pri = (n + 1) * eps_abs + eps_rel * max(np.linalg.norm(d), np.linalg.norm(z_mat))
        eps_dua = (n + 1) * eps_abs + eps_rel * np.linalg.norm(lam)
        if pri <= eps_pri and dua <= eps_dua:
            break
        if adapt and it % 10 == 0:
            if pri > 10 * dua:
                rho *= 2.0
            elif dua > 10 * pri:
                rho /= 2.0
    fit = 0.0
    if mode == 1:
        fit = znorm2 + np.sum(cnt * np.abs(h) ** 2) - 2.0 * np.sum((h.conj() * b).real)
    obj = 0.5 * xi * (t + u[0].real) + 0.5 * fit
    return h, u, t, it, obj, (z_mat, lam, h), rho


def steering(n, s):
    return np.exp(1j * np.pi * np.arange(n) * s)


# ---------- FFT basis pursuit oracle ----------
def grid_l1(h, grid_bits=16, rho=1.0, max_iter=8000, tol=1e-7):
    n = h.shape[0]
    g = 1 << grid_bits
    idx = np.arange(n)
    ph = np.exp(-1j * np.pi * idx)  # s_g = 2(g+1)/G - 1 phasing

    def psi(c):  # (G,) -> (N,)
        ct = np.roll(c, 1)
        return (g * np.fft.ifft(ct)[:n]) * ph

    def psi_h(q):  # (N,) -> (G,)
        qt = np.zeros(g, dtype=complex)
        qt[:n] = q * np.conj(ph)
        return np.roll(np.fft.fft(qt), -1)

    scale = np.linalg.norm(h)
    hh = h / scale
    c = np.zeros(g, dtype=complex)
    w = psi_h(hh) / g
    y = np.zeros(g, dtype=complex)
    best_gap = np.inf
    ub = lb = np.nan
    for it in range(1, max_iter + 1):
        x = w - y / rho
        mag = np.abs(x)
        c = np.where(mag > 1.0 / rho, (1.0 - 1.0 / (rho * mag + 1e-300)) * x, 0.0)
        p = c + y / rho
        w = p + psi_h(hh - psi(p)) / g
        y = y + rho * (c - w)
        if it % 50 == 0:
            # primal feasible candidate + value
            cf = c + psi_h(hh - psi(c)) / g
            ubv = np.sum(np.abs(cf))
            q = psi(y) / g
            dual_inf = np.max(np.abs(psi_h(q)))
            lbv = (np.vdot(q, hh).real / max(dual_inf, 1e-300))
            gap = ubv - lbv
            if gap < best_gap:
                best_gap, ub, lb = gap, ubv, lbv
            if gap <= tol * max(ubv, 1e-12):
                break
    return ub * scale, lb * scale, it


if __name__ == "__main__":
    rng = np.random.default_rng(7)
    n = 64

    print("== atomic norm, single atom ==")
    for trial in range(3):
        s = rng.uniform(-1, 1)
        cval = (rng.uniform(0.3, 3.0)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        h = cval * steering(n, s)
        t0 = time.time()
        _, u, t, it, obj, _, _ = admm_anm(n, 0, h, None, None, 0.0, 1.0)
        dt = time.time() - t0
        print(f"|c|={abs(cval):.6f} sdp={obj:.6f} rel={(obj-abs(cval))/abs(cval):+.2e} it={it} {dt*1e3:.0f}ms")

    print("== atomic norm vs grid L1, 2 atoms ==")
    for trial in range(3):
        s1 = rng.uniform(-0.9, 0.9)
        s2 = s1 + 4.0 / n * rng.choice([-1, 1]) * rng.uniform(1.0, 3.0)
        h = 1.0 * steering(n, s1) + 2.0 * np.exp(1j * 0.7) * steering(n, ((s2 + 1) % 2) - 1)
        t0 = time.time()
        _, u, t, it, obj, _, _ = admm_anm(n, 0, h, None, None, 0.0, 1.0)
        dt = time.time() - t0
        t1 = time.time()
        ub, lb, itg = grid_l1(h)
        dtg = time.time() - t1
        print(f"sdp={obj:.6f} it={it} {dt*1e3:.0f}ms | grid ub={ub:.6f} lb={lb:.6f} it={itg} {dtg*1e3:.0f}ms | gap={(ub-obj)/obj:+.3e}")

    print("== noiseless ADSS recovery, L=2, |Omega|=16 ==")
    for trial in range(3):
        # random within-subarray sampling: 8 subarrays of 8, pick 2 each
        omega = np.concatenate([q * 8 + rng.choice(8, size=2, replace=False) for q in range(8)])
        s1 = rng.uniform(-0.9, 0.9)
        s2 = ((s1 + 4.0 / n * rng.uniform(1.0, 8.0) + 1) % 2) - 1
        b1 = (0.5 + rng.uniform(0, 1.5)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        b2 = (0.5 + rng.uniform(0, 1.5)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        h_true = b1 * steering(n, s1) + b2 * steering(n, s2)
        zt = h_true[omega]  # noiseless, normalized sensing
        bvec = np.zeros(n, dtype=complex)
        cnt = np.zeros(n)
        for w_i, i in enumerate(omega):
            bvec[i] += zt[w_i]
            cnt[i] += 1.0
        znorm2 = np.linalg.norm(zt) ** 2
        zsc = np.linalg.norm(zt)
        t0 = time.time()
        state = None
        tot_it = 0
        h_est = None
        for xi_rel in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
            xi = xi_rel * zsc
            h_est, u, t, it, obj, state, rho = admm_anm(
                n, 1, np.zeros(n, dtype=complex), bvec, cnt, znorm2, xi,
                rho=1.0, max_iter=30000, state=state)
            tot_it += it
        dt = time.time() - t0
        rel = np.linalg.norm(h_est - h_true) / np.linalg.norm(h_true)
        print(f"rel err={rel:.3e} tot_it={tot_it} {dt*1e3:.0f}ms")
