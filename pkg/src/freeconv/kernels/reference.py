"""Pure NumPy implementations of the hot solver kernels.

Two kernels dominate the engine's runtime:

* ``omega1_solve`` -- the subordination fixed point for additive free
  convolution: w solves w = z - phi(F_nu(w)), found as the attracting
  (Denjoy-Wolff) fixed point of the iteration, with a damped-Newton
  fallback when the Picard contraction stalls.
* ``rect_h_solve`` -- inversion of w / T(C(w)) = z along a continuation
  path from the origin, tracking the correct quadratic root g of
  lam g^2 + (1 - lam) g = H/z on the way.

Both exist here as vectorized reference code and, signature for
signature, in the compiled extension ``freeconv.kernels._fast``.
The callable-based entry points (`solve_subordination`,
`solve_rect_inverse`) also serve arbitrary measures that have no
compact parametric form.
"""

import numpy as np

__all__ = [
    "solve_subordination",
    "omega1_solve",
    "solve_rect_inverse",
    "rect_h_solve",
    "BACKEND",
]

BACKEND = "python"


# ---------------------------------------------------------------------------
# square case
# ---------------------------------------------------------------------------

def solve_subordination(z, w0, phi, dphi, F, dF, tol=1e-12, maxit=10000,
                        slow_window=200, contract_cap=0.95):
    """Vectorized Denjoy-Wolff solve of w = z - phi(F(w)).

    Parameters are vectorized callables; returns arrays
    (w, iterations, residual, converged, used_newton).
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    w = np.atleast_1d(np.asarray(w0, dtype=np.complex128)).copy()
    n = z.size
    iters = np.zeros(n, dtype=np.int64)
    slow = np.zeros(n, dtype=np.int64)
    prev_step = np.full(n, np.inf)
    newton = np.zeros(n, dtype=bool)
    done = np.zeros(n, dtype=bool)
    bad = np.zeros(n, dtype=bool)

    for _ in range(maxit):
        act = ~(done | bad)
        if not act.any():
            break
        wa = w[act]
        za = z[act]
        with np.errstate(all="ignore"):
            Fa = F(wa)
            pa = phi(Fa)
        # Picard proposal
        wn = za - pa
        finite = np.isfinite(wn)
        step = np.abs(wn - wa)

        na = newton[act]
        if na.any():
            # damped Newton on R(w) = w + phi(F(w)) - z
            wN = wa[na]
            with np.errstate(all="ignore"):
                FN = F(wN)
                R = wN + phi(FN) - za[na]
                Rp = 1.0 + dphi(FN) * dF(wN)
                d = np.where(Rp != 0, R / Rp, 0.0)
            accepted = np.zeros(wN.shape, dtype=bool)
            wtry = wN.copy()
            alpha = np.ones(wN.shape)
            absR = np.abs(R)
            for _ in range(9):
                rem = ~accepted
                if not rem.any():
                    break
                cand = wN[rem] - alpha[rem] * d[rem]
                okim = cand.imag > -1e-12
                with np.errstate(all="ignore"):
                    Rc = cand + phi(F(cand)) - za[na][rem]
                better = okim & np.isfinite(Rc) & (np.abs(Rc) < absR[rem])
                idx = np.flatnonzero(rem)
                wtry[idx[better]] = cand[better]
                accepted[idx[better]] = True
                alpha[idx[~better]] *= 0.5
            # fall back to the Picard proposal where line search failed
            wn_na = wn[na].copy()
            wn_na[accepted] = wtry[accepted]
            wn[na] = wn_na
            step = np.abs(wn - wa)

        # stall detection on the Picard branch
        pic = ~na
        stalled = np.zeros(wa.shape, dtype=bool)
        stalled[pic] = step[pic] > contract_cap * prev_step[act][pic]
        snew = np.where(stalled, slow[act] + 1, 0)
        slow[act] = np.where(pic, snew, slow[act])
        newton[act] |= slow[act] >= slow_window

        wn = np.where(finite, wn, wa)
        bad_now = ~finite
        wn = wn.real + 1j * np.maximum(wn.imag, 0.0)
        conv = step <= tol * (1.0 + np.abs(wn))
        w[act] = wn
        iters[act] += 1
        prev_step[act] = step
        ids = np.flatnonzero(act)
        done[ids[conv & ~bad_now]] = True
        bad[ids[bad_now]] = True

    with np.errstate(all="ignore"):
        resid = np.abs(w + phi(F(w)) - z)
    resid = np.where(np.isfinite(resid), resid, np.inf)
    converged = done & ~bad
    return w, iters, resid, converged, newton


def _phi_closure(sig_t, sig_w, gamma1, cauchy_c):
    sig_t = np.asarray(sig_t, dtype=float)
    sig_w = np.asarray(sig_w, dtype=float)

    def phi(u):
        out = np.full(u.shape, gamma1 - 1j * cauchy_c, dtype=np.complex128)
        if sig_t.size:
            out = out + np.sum(sig_w / (u[..., None] - sig_t), axis=-1)
        return out

    def dphi(u):
        if not sig_t.size:
            return np.zeros(u.shape, dtype=np.complex128)
        return -np.sum(sig_w / (u[..., None] - sig_t) ** 2, axis=-1)

    return phi, dphi


def _F_closure(nu_x, nu_w):
    nu_x = np.asarray(nu_x, dtype=float)
    nu_w = np.asarray(nu_w, dtype=float)

    def G(u):
        return np.sum(nu_w / (u[..., None] - nu_x), axis=-1)

    def F(u):
        return 1.0 / G(u)

    def dF(u):
        g = G(u)
        gp = -np.sum(nu_w / (u[..., None] - nu_x) ** 2, axis=-1)
        return -gp / g**2

    return F, dF


def omega1_solve(z, w0, sig_t, sig_w, gamma1, cauchy_c, nu_x, nu_w,
                 tol=1e-12, maxit=10000, slow_window=200, contract_cap=0.95):
    """Parametric kernel: phi(u) = gamma1 - i*c + sum sig_w/(u - sig_t),
    G_nu(u) = sum nu_w/(u - nu_x)."""
    phi, dphi = _phi_closure(sig_t, sig_w, gamma1, cauchy_c)
    F, dF = _F_closure(nu_x, nu_w)
    return solve_subordination(z, w0, phi, dphi, F, dF, tol=tol, maxit=maxit,
                               slow_window=slow_window, contract_cap=contract_cap)


# ---------------------------------------------------------------------------
# rectangular case
# ---------------------------------------------------------------------------

def _march_radial(targets, J, branch_check, tol):
    """Real preimages on the principal branch: w < 0 with J(w) = target.

    J is increasing from -inf to 0 on the branch through the origin, so an
    explicit downward march with monotonicity checks cannot leave it; a
    guarded geometric bisection finishes the job.  ``branch_check(w)``
    confirms membership (the transform constraint C(w) in (-1, 0] on the
    branch, when available).
    """
    targets = np.asarray(targets, dtype=float)     # negative reals
    n = targets.size
    w = np.maximum(targets, -1e-2)                 # J(w) ~ w near 0
    Jw = np.real(J(w.astype(np.complex128)))
    lo = np.full(n, np.nan)                        # J(lo) <= target, or off-branch
    hi = np.full(n, np.nan)                        # on-branch with J(hi) > target
    ok = np.ones(n, dtype=bool)
    have = Jw <= targets
    lo[have] = w[have]
    hi[have] = -1e-300                             # J ~ 0 there

    guard = 0
    while True:
        active = ok & np.isnan(lo)
        if not active.any() or guard >= 400:
            break
        guard += 1
        wn = np.where(active, w * 4.0, w)
        with np.errstate(all="ignore"):
            Jn = np.real(J(wn.astype(np.complex128)))
        on_branch = np.isfinite(Jn) & (Jn < Jw) & (Jn < 0) & branch_check(wn)
        hit = active & (~on_branch | (Jn <= targets))
        lo[hit] = wn[hit]                          # off-branch lo is still a bracket
        hi[hit] = w[hit]
        go = active & on_branch & ~hit
        w[go] = wn[go]
        Jw[go] = Jn[go]
    ok &= ~np.isnan(lo)

    # geometric bisection; an off-branch midpoint means the root sits on the
    # hi (closer to zero) side, exactly like an overshot J value
    lo_s = np.where(ok, lo, -1.0)
    hi_s = np.where(ok, hi, -0.5)
    hi_s = np.where(hi_s >= 0, -1e-300, hi_s)
    for _ in range(220):
        mid = -np.sqrt(lo_s * hi_s)
        with np.errstate(all="ignore"):
            Jm = np.real(J(mid.astype(np.complex128)))
        on_branch = np.isfinite(Jm) & (Jm < 0) & branch_check(mid)
        to_hi = on_branch & (Jm > targets)
        hi_s = np.where(to_hi, mid, hi_s)
        lo_s = np.where(to_hi, lo_s, mid)
        if np.all((lo_s / hi_s) < 1.0 + 1e-15):
            break
    w_out = hi_s
    with np.errstate(all="ignore"):
        resid = np.abs(np.real(J(w_out.astype(np.complex128))) - targets)
    # near a finite branch endpoint, huge targets condition J so badly that
    # machine-resolved w cannot push the J-residual down; the root is still
    # pinned inside the collapsed bracket, which is what callers consume
    collapsed = (lo_s / hi_s) < 1.0 + 1e-12
    ok &= np.isfinite(resid) & \
        ((resid <= 1e-7 * (1.0 + np.abs(targets))) | collapsed)
    return w_out.astype(np.complex128), ok


def solve_rect_inverse(ztarg, C, dC, lam, tol=1e-13, max_newton=12,
                       max_rounds=4000, ds0=1.0 / 32.0):
    """Invert w / T(C(w)) = z on the principal branch (the right inverse H).

    The path from the origin to each target runs down the negative axis
    (explicit monotone march, immune to branch jumps) and then rotates at
    constant radius to the target angle with damped Newton steps.  Returns
    (H, g, resid, ok, rounds) with g = 1 + C(H): the analytic extension of
    the moment transform satisfies M(z) = C(H(z)), so this is the correct
    branch of lam g^2 + (1-lam) g = H/z everywhere, with no root tracking.
    """
    ztarg = np.atleast_1d(np.asarray(ztarg, dtype=np.complex128))
    n = ztarg.size
    rt = np.abs(ztarg)
    theta_t = np.mod(np.angle(ztarg), 2.0 * np.pi)

    def T(c):
        return (lam * c + 1.0) * (c + 1.0)

    def Tp(c):
        return 2.0 * lam * c + lam + 1.0

    def J(w):
        with np.errstate(all="ignore"):
            return w / T(C(w))

    def branch_check(wneg):
        with np.errstate(all="ignore"):
            c = np.real(C(wneg.astype(np.complex128)))
        return (c > -1.0 + 1e-14) & (c <= 1e-12)

    # radial leg: solve J(w) = -rt exactly on the branch
    w, ok = _march_radial(-rt, J, branch_check, tol)

    def newton(zn, wstart):
        # stopping accepts either the z-scaled residual or a collapsed step:
        # near branch endpoints H is resolved in w far below what the huge
        # |z| residual scale can certify
        wv = wstart.copy()
        good = np.zeros(wv.shape, dtype=bool)
        step_ok = np.zeros(wv.shape, dtype=bool)
        for _ in range(max_newton):
            with np.errstate(all="ignore"):
                c = C(wv)
                Tc = T(c)
                f = wv / Tc - zn
            good = np.isfinite(f) & (np.abs(f) <= tol * (1.0 + np.abs(zn)) + 1e-15)
            if (good | step_ok).all():
                break
            with np.errstate(all="ignore"):
                fp = (Tc - wv * Tp(c) * dC(wv)) / (Tc * Tc)
                d = f / fp
            d = np.where(np.isfinite(d) & ~good, d, 0.0)
            step_ok = np.isfinite(f) & (np.abs(d) <= 1e-14 * (1.0 + np.abs(wv)))
            wnew = wv - d
            onto_cut = (wnew.imag == 0.0) & (wnew.real >= 0.0)
            wnew = np.where(onto_cut, wv - 0.5 * d, wnew)
            wv = wnew
        with np.errstate(all="ignore"):
            f = wv / T(C(wv)) - zn
        good = np.isfinite(f) & \
            ((np.abs(f) <= 1e3 * tol * (1.0 + np.abs(zn))) | step_ok)
        return wv, good

    # angular leg: rotate from angle pi to the target angle
    s = np.zeros(n)
    ds = np.full(n, ds0)
    done_angle = np.abs(theta_t - np.pi) < 1e-15
    s[done_angle] = 1.0
    rounds = 0
    active = (s < 1.0) & ok
    while active.any() and rounds < max_rounds:
        rounds += 1
        sp = np.minimum(1.0, s + ds)
        th = np.pi + (theta_t - np.pi) * sp
        zp = rt * np.exp(1j * th)
        wprev = w[active]
        wtry, good = newton(zp[active], wprev)
        # reject basin jumps: the arc turns slowly, so a large relative move
        # in one step means Newton crossed into a different inverse branch
        cap = 0.75 * (np.abs(wprev) + 1e-15)
        good &= np.abs(wtry - wprev) <= cap
        ids = np.flatnonzero(active)
        acc = ids[good]
        rej = ids[~good]
        w[acc] = wtry[good]
        s[acc] = sp[acc]
        ds[acc] = np.minimum(ds[acc] * 1.5, 0.125)
        ds[rej] *= 0.5
        ok[rej[ds[rej] < 1e-10]] = False
        active = (s < 1.0) & ok

    ok &= s >= 1.0
    # the right inverse preserves half-planes; a conjugate-branch result is
    # a solver failure, not an answer
    upper = ztarg.imag > 0
    lower = ztarg.imag < 0
    ok &= ~(upper & (w.imag < -1e-9 * np.abs(w)))
    ok &= ~(lower & (w.imag > 1e-9 * np.abs(w)))
    with np.errstate(all="ignore"):
        g = 1.0 + C(w)
        resid = np.abs(w / T(C(w)) - ztarg)
    resid = np.where(np.isfinite(resid), resid, np.inf)
    return w, g, resid, ok, np.full(n, rounds)


def _c_closure(levy_t, levy_w, stable_p, stable_c):
    levy_t = np.asarray(levy_t, dtype=float)
    levy_w = np.asarray(levy_w, dtype=float)
    stable_p = np.asarray(stable_p, dtype=float)
    stable_c = np.asarray(stable_c, dtype=float)

    def C(w):
        out = np.zeros(w.shape, dtype=np.complex128)
        if levy_t.size:
            t2 = levy_t**2
            out = out + w * np.sum(levy_w * (1.0 + t2) / (1.0 - w[..., None] * t2), axis=-1)
        if stable_p.size:
            out = out + np.sum(stable_c * (-w[..., None]) ** stable_p, axis=-1)
        return out

    def dC(w):
        out = np.zeros(w.shape, dtype=np.complex128)
        if levy_t.size:
            t2 = levy_t**2
            out = out + np.sum(levy_w * (1.0 + t2) / (1.0 - w[..., None] * t2) ** 2, axis=-1)
        if stable_p.size:
            out = out - np.sum(stable_c * stable_p * (-w[..., None]) ** (stable_p - 1.0), axis=-1)
        return out

    return C, dC


def rect_h_solve(ztarg, levy_t, levy_w, stable_p, stable_c, lam,
                 tol=1e-13, max_newton=12, max_rounds=4000, ds0=1.0 / 32.0):
    """Parametric kernel:
    C(w) = w * sum levy_w (1+levy_t^2)/(1 - w levy_t^2)
           + sum stable_c * (-w)^stable_p."""
    C, dC = _c_closure(levy_t, levy_w, stable_p, stable_c)
    return solve_rect_inverse(ztarg, C, dC, lam, tol=tol, max_newton=max_newton,
                              max_rounds=max_rounds, ds0=ds0)
