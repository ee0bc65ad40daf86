"""Prototype v2: vectorized ADMM + over-relaxation + dual cutting-plane oracle."""
import numpy as np
import time


def make_toeplitz_gather(n):
    i = np.arange(n)
    return (n - 1) + i[None, :] - i[:, None]


def admm_anm(n, mode, h_fixed, b, cnt, znorm2, xi, rho=1.0, max_iter=20000,
             eps_abs=1e-8, eps_rel=1e-6, adapt=True, alpha=1.7, state=None):
    idx = make_toeplitz_gather(n)
    if state is None:
        z_mat = np.zeros((n + 1, n + 1), dtype=complex)
        lam = np.zeros((n + 1, n + 1), dtype=complex)
        h = h_fixed.copy()
    else:
        z_mat, lam, h = state
        h = h.copy()
    d = np.zeros((n + 1, n + 1), dtype=complex)
    u_ext = np.empty(2 * n - 1, dtype=complex)
    it = 0
    for it in range(1, max_iter + 1):
        e = z_mat - lam / rho
        t = e[n, n].real - xi / (2.0 * rho)
        euu = e[:n, :n]
        u = np.array([euu.diagonal(k).mean() for k in range(n)])
        u[0] = u[0].real - xi / (2.0 * rho * n)
        if mode == 1:
            h = (b + 2.0 * rho * e[:n, n]) / (cnt + 2.0 * rho)
        u_ext[: n - 1] = np.conj(u[1:][::-1])
        u_ext[n - 1:] = u
        d[:n, :n] = u_ext[idx]
        d[:n, n] = h
        d[n, :n] = h.conj()
        d[n, n] = t
        d_rel = alpha * d + (1.0 - alpha) * z_mat
        z_old = z_mat
        m_in = d_rel + lam / rho
        m_in = 0.5 * (m_in + m_in.conj().T)
        w, v = np.linalg.eigh(m_in)
        pos = w > 0.0
        vp = v[:, pos]
        z_mat = (vp * w[pos]) @ vp.conj().T
        lam = lam + rho * (d_rel - z_mat)
        if it % 5 == 0 or it == 1:
            pri = np.linalg.norm(d - z_mat)
            dua = rho * np.linalg.norm(z_mat - z_old)
            eps_pri = (n + 1) * eps_abs + eps_rel * max(np.linalg.norm(d), np.linalg.norm(z_mat))
            eps_dua = (n + 1) * eps_abs + eps_rel * np.linalg.norm(lam)
            if pri <= eps_pri and dua <= eps_dua:
                break
            if adapt:
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


def grid_l1_dual(h, grid_bits=16, tol=1e-6, max_cuts=60):
    """Cutting-plane on: max Re<q,h> s.t. |a_g^H q| <= 1 on the full sine grid."""
    import cvxpy as cp

    n = h.shape[0]
    g = 1 << grid_bits
    ph = np.exp(-1j * np.pi * np.arange(n))

    def atoms_conj_apply(q):
        # returns <a_g, q> = a_g^H q for all g, via FFT
        qt = np.zeros(g, dtype=complex)
        qt[:n] = q * np.conj(ph)
        return np.roll(np.fft.fft(qt), -1)

    def atom(gi):
        s = 2.0 * (gi + 1) / g - 1.0
        return steering(n, s)

    # initial working set: coarse uniform grid + best correlations with h
    corr = np.abs(atoms_conj_apply(h))
    ws = set(np.arange(0, g, g // (4 * n)).tolist())
    ws.update(np.argsort(corr)[-8:].tolist())
    ws = sorted(ws)

    qv = cp.Variable(n, complex=True)
    for rounds in range(max_cuts):
        a_mat = np.stack([atom(gi) for gi in ws])  # |S| x n
        cons = [cp.abs(a_mat.conj() @ qv) <= 1.0]
        prob = cp.Problem(cp.Maximize(cp.real(cp.sum(cp.multiply(np.conj(h), qv)))), cons)
        prob.solve(solver=cp.CLARABEL)
        q = qv.value
        vals = np.abs(atoms_conj_apply(q))
        worst = float(vals.max())
        if worst <= 1.0 + tol:
            lb = np.vdot(q, h).real / worst
            return prob.value, lb, rounds, len(ws)
        add = np.argsort(vals)[-6:]
        ws = sorted(set(ws).union(add.tolist()))
    raise RuntimeError("cutting plane did not converge")


if __name__ == "__main__":
    rng = np.random.default_rng(7)
    n = 64

    print("== atomic norm single atom (eps 1e-8/1e-6, alpha 1.7) ==")
    for trial in range(3):
        s = rng.uniform(-1, 1)
        cval = rng.uniform(0.3, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        h = cval * steering(n, s)
        t0 = time.time()
        _, u, t, it, obj, _, _ = admm_anm(n, 0, h, None, None, 0.0, 1.0)
        dt = time.time() - t0
        print(f"|c|={abs(cval):.6f} rel={(obj-abs(cval))/abs(cval):+.2e} it={it} {dt*1e3:.0f}ms")

    print("== multi-atom vs cutting-plane oracle ==")
    for trial in range(3):
        l_atoms = rng.integers(2, 5)
        sines = []
        while len(sines) < l_atoms:
            cand = rng.uniform(-1, 1)
            if all(min(abs(cand - s0), 2 - abs(cand - s0)) >= 4.0 / n for s0 in sines):
                sines.append(cand)
        gains = rng.uniform(0.5, 2.0, l_atoms) * np.exp(1j * rng.uniform(0, 2 * np.pi, l_atoms))
        h = sum(gv * steering(n, sv) for gv, sv in zip(gains, sines))
        t0 = time.time()
        _, _, _, it, obj, _, _ = admm_anm(n, 0, h, None, None, 0.0, 1.0)
        dt = time.time() - t0
        t1 = time.time()
        ub, lb, rounds, nws = grid_l1_dual(h)
        dt1 = time.time() - t1
        print(f"sum|b|={np.sum(np.abs(gains)):.6f} sdp={obj:.6f} it={it} {dt*1e3:.0f}ms | "
              f"grid=[{lb:.6f},{ub:.6f}] rounds={rounds} |S|={nws} {dt1*1e3:.0f}ms | "
              f"rel gap={(ub-obj)/obj:+.3e}")

    print("== noiseless ADSS L in {1,2}, faster continuation ==")
    for l_true in (1, 2):
        tt = 0.0
        errs = []
        its = []
        for trial in range(5):
            omega = np.concatenate([q * 8 + rng.choice(8, size=2, replace=False) for q in range(8)])
            sines = []
            while len(sines) < l_true:
                cand = rng.uniform(-1, 1)
                if all(min(abs(cand - s0), 2 - abs(cand - s0)) >= 4.0 / n for s0 in sines):
                    sines.append(cand)
            gains = rng.uniform(0.5, 2.0, l_true) * np.exp(1j * rng.uniform(0, 2 * np.pi, l_true))
            h_true = sum(gv * steering(n, sv) for gv, sv in zip(gains, sines))
            zt = h_true[omega]
            bvec = np.zeros(n, dtype=complex)
            cnt = np.zeros(n)
            np.add.at(bvec, omega, zt)
            np.add.at(cnt, omega, 1.0)
            zsc = np.linalg.norm(zt)
            t0 = time.time()
            state = None
            tot_it = 0
            h_prev = None
            for stage, xi_rel in enumerate((1e-2, 1e-4, 1e-6)):
                final = stage == 2
                h_est, u, t, it, obj, state, rho = admm_anm(
                    n, 1, np.zeros(n, dtype=complex), bvec, cnt, zsc**2, xi_rel * zsc,
                    rho=1.0, max_iter=30000, state=state,
                    eps_abs=1e-8 if final else 1e-7,
                    eps_rel=1e-6 if final else 1e-4)
                tot_it += it
                if h_prev is not None and np.linalg.norm(h_est - h_prev) <= 1e-5 * np.linalg.norm(h_est):
                    break
                h_prev = h_est
            tt += time.time() - t0
            errs.append(np.linalg.norm(h_est - h_true) / np.linalg.norm(h_true))
            its.append(tot_it)
        print(f"L={l_true}: max rel err={max(errs):.3e} iters={its} avg time={tt/5*1e3:.0f}ms")

    print("== noisy denoise (SNR-ish 20dB post) timing ==")
    tt = 0.0
    for trial in range(5):
        omega = np.concatenate([q * 8 + rng.choice(8, size=2, replace=False) for q in range(8)])
        sines = [rng.uniform(-1, 1) for _ in range(3)]
        gains = rng.uniform(0.5, 2.0, 3) * np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
        h_true = sum(gv * steering(n, sv) for gv, sv in zip(gains, sines))
        sigma = 0.1 * np.linalg.norm(h_true) / np.sqrt(n)
        noise = sigma * (rng.standard_normal(16) + 1j * rng.standard_normal(16)) / np.sqrt(2)
        zt = h_true[omega] + noise
        bvec = np.zeros(n, dtype=complex)
        cnt = np.zeros(n)
        np.add.at(bvec, omega, zt)
        np.add.at(cnt, omega, 1.0)
        xi = sigma * np.sqrt(n * np.log(n))
        t0 = time.time()
        h_est, u, t, it, obj, state, rho = admm_anm(
            n, 1, np.zeros(n, dtype=complex), bvec, cnt, np.linalg.norm(zt)**2, xi,
            rho=1.0, max_iter=30000, eps_abs=1e-8, eps_rel=1e-5)
        tt += time.time() - t0
        nm = np.linalg.norm(h_est - h_true)**2 / np.linalg.norm(h_true)**2
        print(f"  it={it} nmse={10*np.log10(nm):.1f}dB time={(time.time()-t0)*1e3:.0f}ms")
