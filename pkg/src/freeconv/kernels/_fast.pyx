# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the reference kernels (see reference.py for the
algorithms).  Scalar per-point loops over C99 complex arithmetic; selected
at import when available, with the NumPy reference as the fallback."""

import numpy as np

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)
    double complex csqrt(double complex)
    double cabs(double complex)
    double cimag(double complex)
    double creal(double complex)

BACKEND = "compiled"


# ---------------------------------------------------------------------------
# square case
# ---------------------------------------------------------------------------

cdef inline double complex _G_nu(double complex u, double[::1] nx,
                                 double[::1] nw) nogil:
    cdef double complex acc = 0
    cdef Py_ssize_t i
    for i in range(nx.shape[0]):
        acc = acc + nw[i] / (u - nx[i])
    return acc


cdef inline double complex _Gp_nu(double complex u, double[::1] nx,
                                  double[::1] nw) nogil:
    cdef double complex acc = 0
    cdef double complex d
    cdef Py_ssize_t i
    for i in range(nx.shape[0]):
        d = u - nx[i]
        acc = acc - nw[i] / (d * d)
    return acc


cdef inline double complex _phi(double complex u, double[::1] st,
                                double[::1] sw, double gamma1,
                                double cconst) nogil:
    cdef double complex acc = gamma1 - 1j * cconst
    cdef Py_ssize_t i
    for i in range(st.shape[0]):
        acc = acc + sw[i] / (u - st[i])
    return acc


cdef inline double complex _dphi(double complex u, double[::1] st,
                                 double[::1] sw) nogil:
    cdef double complex acc = 0
    cdef double complex d
    cdef Py_ssize_t i
    for i in range(st.shape[0]):
        d = u - st[i]
        acc = acc - sw[i] / (d * d)
    return acc


cdef inline int _finite(double complex v) nogil:
    return (v == v) and cabs(v) < 1e300


def omega1_solve(z, w0, sig_t, sig_w, double gamma1, double cauchy_c,
                 nu_x, nu_w, double tol=1e-12, int maxit=10000,
                 int slow_window=200, double contract_cap=0.95):
    """Parametric subordination solve; see reference.omega1_solve."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    w_arr = np.atleast_1d(np.asarray(w0, dtype=np.complex128)).copy()
    st = np.ascontiguousarray(sig_t, dtype=np.float64)
    sw = np.ascontiguousarray(sig_w, dtype=np.float64)
    nx = np.ascontiguousarray(nu_x, dtype=np.float64)
    nw = np.ascontiguousarray(nu_w, dtype=np.float64)
    cdef Py_ssize_t n = z_arr.size
    iters = np.zeros(n, dtype=np.int64)
    resid = np.zeros(n, dtype=np.float64)
    conv = np.zeros(n, dtype=np.uint8)
    used_newton = np.zeros(n, dtype=np.uint8)

    cdef double complex[::1] zv = z_arr
    cdef double complex[::1] wv = w_arr
    cdef long long[::1] itv = iters
    cdef double[::1] rv = resid
    cdef unsigned char[::1] cv = conv
    cdef unsigned char[::1] nv = used_newton
    cdef double[::1] stv = st
    cdef double[::1] swv = sw
    cdef double[::1] nxv = nx
    cdef double[::1] nwv = nw

    cdef Py_ssize_t i
    cdef int it, k
    cdef bint newton, bad, accepted
    cdef int slow
    cdef double prev_step, step, absR, alpha
    cdef double complex w, zi, F, phi, wn, R, Rp, d, cand, Rc, FF

    with nogil:
        for i in range(n):
            zi = zv[i]
            w = wv[i]
            newton = False
            bad = False
            slow = 0
            prev_step = 1e308
            step = 1e308
            for it in range(maxit):
                F = 1.0 / _G_nu(w, nxv, nwv)
                phi = _phi(F, stv, swv, gamma1, cauchy_c)
                wn = zi - phi
                if newton:
                    R = w + phi - zi
                    Rp = 1.0 + _dphi(F, stv, swv) * (
                        -_Gp_nu(w, nxv, nwv) * F * F)
                    if Rp != 0:
                        d = R / Rp
                    else:
                        d = 0
                    accepted = False
                    absR = cabs(R)
                    alpha = 1.0
                    for k in range(9):
                        cand = w - alpha * d
                        if cimag(cand) > -1e-12:
                            FF = 1.0 / _G_nu(cand, nxv, nwv)
                            Rc = cand + _phi(FF, stv, swv, gamma1, cauchy_c) - zi
                            if _finite(Rc) and cabs(Rc) < absR:
                                wn = cand
                                accepted = True
                                break
                        alpha = alpha * 0.5
                    # else: fall back to the Picard proposal already in wn
                step = cabs(wn - w)
                if not newton:
                    if step > contract_cap * prev_step:
                        slow = slow + 1
                    else:
                        slow = 0
                    if slow >= slow_window:
                        newton = True
                if not _finite(wn):
                    bad = True
                    itv[i] = itv[i] + 1
                    break
                if cimag(wn) < 0:
                    wn = creal(wn)
                w = wn
                itv[i] = itv[i] + 1
                prev_step = step
                if step <= tol * (1.0 + cabs(w)):
                    break
            wv[i] = w
            F = 1.0 / _G_nu(w, nxv, nwv)
            R = w + _phi(F, stv, swv, gamma1, cauchy_c) - zi
            if _finite(R):
                rv[i] = cabs(R)
            else:
                rv[i] = 1e308
            cv[i] = 1 if ((not bad) and step <= tol * (1.0 + cabs(w))) else 0
            nv[i] = 1 if newton else 0

    resid = np.where(resid >= 1e308, np.inf, resid)
    return w_arr, iters, resid, conv.astype(bool), used_newton.astype(bool)


# ---------------------------------------------------------------------------
# rectangular case
# ---------------------------------------------------------------------------

cdef inline double complex _cpow_neg(double complex w, double p) nogil:
    # (-w)^p on the principal branch; p = 1/2 and p = 1 cover the stable
    # indices with closed forms and dominate in practice
    if p == 0.5:
        return csqrt(-w)
    if p == 1.0:
        return -w
    if p == 0.0:
        return 1.0
    if p == -0.5:
        return 1.0 / csqrt(-w)
    return cexp(p * clog(-w))


cdef inline double complex _C_rect(double complex w, double[::1] lt,
                                   double[::1] lw, double[::1] sp,
                                   double[::1] sc) nogil:
    cdef double complex acc = 0
    cdef double t2
    cdef Py_ssize_t i
    for i in range(lt.shape[0]):
        t2 = lt[i] * lt[i]
        acc = acc + lw[i] * (1.0 + t2) / (1.0 - w * t2)
    acc = acc * w
    for i in range(sp.shape[0]):
        acc = acc + sc[i] * _cpow_neg(w, sp[i])
    return acc


cdef inline double complex _dC_rect(double complex w, double[::1] lt,
                                    double[::1] lw, double[::1] sp,
                                    double[::1] sc) nogil:
    cdef double complex acc = 0
    cdef double complex den
    cdef double t2
    cdef Py_ssize_t i
    for i in range(lt.shape[0]):
        t2 = lt[i] * lt[i]
        den = 1.0 - w * t2
        acc = acc + lw[i] * (1.0 + t2) / (den * den)
    for i in range(sp.shape[0]):
        acc = acc - sc[i] * sp[i] * _cpow_neg(w, sp[i] - 1.0)
    return acc


cdef inline double complex _T(double complex c, double lam) nogil:
    return (lam * c + 1.0) * (c + 1.0)


cdef inline double complex _J(double complex w, double lam, double[::1] lt,
                              double[::1] lw, double[::1] sp,
                              double[::1] sc) nogil:
    return w / _T(_C_rect(w, lt, lw, sp, sc), lam)


cdef inline bint _branch_ok(double w, double lam, double[::1] lt,
                            double[::1] lw, double[::1] sp,
                            double[::1] sc) nogil:
    cdef double c = creal(_C_rect(w, lt, lw, sp, sc))
    return (c > -1.0 + 1e-14) and (c <= 1e-12)


def rect_h_solve(ztarg, levy_t, levy_w, stable_p, stable_c, double lam,
                 double tol=1e-13, int max_newton=12, int max_rounds=4000,
                 double ds0=1.0 / 32.0):
    """Parametric transform inverse; see reference.rect_h_solve."""
    z_arr = np.atleast_1d(np.asarray(ztarg, dtype=np.complex128))
    lt = np.ascontiguousarray(levy_t, dtype=np.float64)
    lw = np.ascontiguousarray(levy_w, dtype=np.float64)
    sp = np.ascontiguousarray(stable_p, dtype=np.float64)
    sc = np.ascontiguousarray(stable_c, dtype=np.float64)
    cdef Py_ssize_t n = z_arr.size
    H = np.zeros(n, dtype=np.complex128)
    g = np.zeros(n, dtype=np.complex128)
    resid = np.zeros(n, dtype=np.float64)
    ok = np.zeros(n, dtype=np.uint8)
    rounds_out = np.zeros(n, dtype=np.int64)

    cdef double complex[::1] zv = z_arr
    cdef double complex[::1] Hv = H
    cdef double complex[::1] gv = g
    cdef double[::1] rv = resid
    cdef unsigned char[::1] okv = ok
    cdef long long[::1] rndv = rounds_out
    cdef double[::1] ltv = lt
    cdef double[::1] lwv = lw
    cdef double[::1] spv = sp
    cdef double[::1] scv = sc

    cdef Py_ssize_t i
    cdef int guard, it, rounds, k
    cdef bint good, have, onb, failed, step_ok
    cdef double rt, theta, target, Jw, Jn, Jm, lo, hi, mid, wre, ds, s, sp_next, th
    cdef double complex w, wn, zn, c, Tc, f, fp, dstep, wnew, zi
    cdef double pi = 3.141592653589793238462643383279502884

    with nogil:
        for i in range(n):
            zi = zv[i]
            rt = cabs(zi)
            theta = creal(clog(zi) * (-1j))      # atan2 via log; adjusted below
            # angle in [0, 2pi)
            if theta < 0:
                theta = theta + 2.0 * pi
            target = -rt
            failed = False

            # --- radial march: bracket the branch preimage of -rt ---
            wre = target
            if wre < -1e-2:
                wre = -1e-2
            Jw = creal(_J(wre, lam, ltv, lwv, spv, scv))
            lo = 0.0
            hi = 0.0
            have = False
            if Jw <= target:
                lo = wre
                hi = -1e-300
                have = True
            guard = 0
            while (not have) and (not failed) and guard < 400:
                guard = guard + 1
                mid = wre * 4.0
                Jn = creal(_J(mid, lam, ltv, lwv, spv, scv))
                onb = (Jn == Jn) and (Jn < Jw) and (Jn < 0) and \
                    _branch_ok(mid, lam, ltv, lwv, spv, scv)
                if (not onb) or (Jn <= target):
                    lo = mid
                    hi = wre
                    have = True
                else:
                    wre = mid
                    Jw = Jn
            if not have:
                failed = True

            if not failed:
                for it in range(220):
                    mid = -((-lo) ** 0.5) * ((-hi) ** 0.5)
                    Jm = creal(_J(mid, lam, ltv, lwv, spv, scv))
                    onb = (Jm == Jm) and (Jm < 0) and \
                        _branch_ok(mid, lam, ltv, lwv, spv, scv)
                    if onb and Jm > target:
                        hi = mid
                    else:
                        lo = mid
                    if lo / hi < 1.0 + 1e-15:
                        break
                w = hi
                Jm = creal(_J(w, lam, ltv, lwv, spv, scv))
                # a collapsed bracket pins the root even when the huge
                # target makes the J-residual unreachable in float64
                if not (Jm == Jm and
                        ((Jm - target if Jm > target else target - Jm)
                         <= 1e-7 * (1.0 + rt) or lo / hi < 1.0 + 1e-12)):
                    failed = True

            # --- angular leg ---
            rounds = 0
            if not failed:
                s = 0.0
                if theta == pi:
                    s = 1.0
                ds = ds0
                while s < 1.0 and not failed and rounds < max_rounds:
                    rounds = rounds + 1
                    sp_next = s + ds
                    if sp_next > 1.0:
                        sp_next = 1.0
                    th = pi + (theta - pi) * sp_next
                    zn = rt * cexp(1j * th)
                    # damped Newton from w; accept either the z-scaled
                    # residual or a collapsed step (huge |z| near branch
                    # endpoints cannot certify an already-converged w)
                    wn = w
                    good = False
                    step_ok = False
                    for it in range(max_newton):
                        c = _C_rect(wn, ltv, lwv, spv, scv)
                        Tc = _T(c, lam)
                        f = wn / Tc - zn
                        if _finite(f) and cabs(f) <= tol * (1.0 + cabs(zn)) + 1e-15:
                            good = True
                            break
                        if step_ok:
                            break
                        fp = (Tc - wn * (2.0 * lam * c + lam + 1.0) *
                              _dC_rect(wn, ltv, lwv, spv, scv)) / (Tc * Tc)
                        dstep = f / fp
                        if not _finite(dstep):
                            dstep = 0
                        if _finite(f) and cabs(dstep) <= 1e-14 * (1.0 + cabs(wn)):
                            step_ok = True
                        wnew = wn - dstep
                        if cimag(wnew) == 0.0 and creal(wnew) >= 0.0:
                            wnew = wn - 0.5 * dstep
                        wn = wnew
                    if not good:
                        c = _C_rect(wn, ltv, lwv, spv, scv)
                        f = wn / _T(c, lam) - zn
                        good = step_ok or (_finite(f) and
                                           cabs(f) <= 1e3 * tol * (1.0 + cabs(zn)))
                    if good and cabs(wn - w) <= 0.75 * (cabs(w) + 1e-15):
                        w = wn
                        s = sp_next
                        ds = ds * 1.5
                        if ds > 0.125:
                            ds = 0.125
                    else:
                        ds = ds * 0.5
                        if ds < 1e-10:
                            failed = True

            if not failed:
                # half-plane sanity
                if cimag(zi) > 0 and cimag(w) < -1e-9 * cabs(w):
                    failed = True
                if cimag(zi) < 0 and cimag(w) > 1e-9 * cabs(w):
                    failed = True

            if failed:
                Hv[i] = w
                gv[i] = 1.0 + _C_rect(w, ltv, lwv, spv, scv)
                rv[i] = 1e308
                okv[i] = 0
            else:
                Hv[i] = w
                gv[i] = 1.0 + _C_rect(w, ltv, lwv, spv, scv)
                f = w / _T(_C_rect(w, ltv, lwv, spv, scv), lam) - zi
                rv[i] = cabs(f) if _finite(f) else 1e308
                okv[i] = 1
            rndv[i] = rounds

    resid = np.where(resid >= 1e308, np.inf, resid)
    return H, g, resid, ok.astype(bool), rounds_out
