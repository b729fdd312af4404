"""Rectangular free convolution with ratio lambda.

Computation follows the transform chain: the rectangular transforms C add,
H is recovered as the right inverse of w -> w / T(C(w)) by guarded
continuation from the origin, and boundary values of G come back through
the analytic branch g = 1 + C(H(z)) of lam g^2 + (1 - lam) g = H(z)/z:

    G(1/sqrt(z)) = sqrt(z) * g(z),   z = 1/u^2,  u = x - i eps.

When only the left operand is infinitely divisible, the subordination
function omega2 (right inverse of k(w) = H_nu(w) / T[C_mu(H_nu(w)) + M_nu(w)])
carries the same chain: H of the convolution is H_nu(omega2(z)).
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .branchcuts import T, V, sqrt_upper_unchecked
from .errors import ConvergenceError, DomainError
from .inversion import DEFAULT_LADDER, DensityCurve, PointFlag, richardson, support_scan
from .measures import (
    AtomicMeasure,
    GridDensityMeasure,
    Measure,
    RectIDLaw,
    RectStable,
)

__all__ = [
    "RectConvHandle",
    "HoleReport",
    "rect_C_sum",
    "H_from_C",
    "G_from_H",
    "rect_density_curve",
    "omega2_general",
    "atom_at_zero",
    "hole_detect",
    "lambda_reductions_check",
    "rect_law_density_curve",
    "realize_rect_id",
    "rect_id_cauchy",
]


def _as_rect_id(m, lam):
    if isinstance(m, (RectIDLaw, RectStable)):
        return RectIDLaw.from_measure(m, lam) if isinstance(m, RectStable) else m
    return None


def _is_delta0(m):
    if isinstance(m, AtomicMeasure):
        at = m.atoms()
        return len(at) == 1 and at[0][0] == 0.0
    if isinstance(m, RectIDLaw):
        return m.levy is None and not m.stable_terms
    return False


class RectConvHandle:
    """Operand pair for mu (+)_lam nu: mu must be ID (a RectIDLaw or a
    RectStable family value); nu is any symmetric measure, and when nu is
    itself ID the C transforms add and the direct chain is used."""

    def __init__(self, mu, nu, lam=None, tol=1e-13, ladder=DEFAULT_LADDER,
                 force_general=False):
        mu_id = _as_rect_id(mu, getattr(mu, "ratio", lam))
        if mu_id is None:
            raise DomainError("mu must be a rectangular ID law")
        if lam is None:
            lam = mu_id.ratio
        if abs(mu_id.ratio - lam) > 1e-12:
            raise DomainError(f"lambda mismatch: mu has {mu_id.ratio}, handle {lam}")
        self.lam = float(lam)
        self.mu = mu_id
        nu_id = _as_rect_id(nu, lam) if not isinstance(nu, AtomicMeasure) else None
        if force_general:
            nu_id = None         # route an ID nu through the subordination solver
        if nu_id is not None and abs(nu_id.ratio - lam) > 1e-12:
            raise DomainError(f"lambda mismatch: nu has {nu_id.ratio}, handle {lam}")
        self.nu_id = nu_id
        if nu_id is None:
            if not isinstance(nu, Measure):
                raise DomainError("nu must be a Measure")
            if not nu.is_symmetric(1e-9):
                raise DomainError("nu must be symmetric")
        self.nu = nu
        self.tol = tol
        self.ladder = tuple(ladder)

    def both_id(self):
        return self.nu_id is not None

    def summed_law(self):
        if not self.both_id():
            raise DomainError("nu is not ID: no summed C transform")
        return rect_C_sum(self.mu, self.nu_id)


def rect_C_sum(mu, nu):
    """C transforms add: merge Levy measures and stable terms."""
    mu = RectIDLaw.from_measure(mu, mu.ratio) if isinstance(mu, RectStable) else mu
    nu = RectIDLaw.from_measure(nu, nu.ratio) if isinstance(nu, RectStable) else nu
    if abs(mu.ratio - nu.ratio) > 1e-12:
        raise DomainError("cannot add rectangular transforms with different lambda")
    levies = [lv for lv in (mu.levy, nu.levy) if lv is not None]
    if len(levies) == 2:
        if isinstance(levies[0], AtomicMeasure) and isinstance(levies[1], AtomicMeasure):
            acc = {}
            for lv in levies:
                for p, m in lv.atoms():
                    acc[p] = acc.get(p, 0.0) + m
            levy = AtomicMeasure(acc.items(), require_probability=False)
        else:
            raise DomainError("cannot merge grid Levy measures directly")
    else:
        levy = levies[0] if levies else None
    return RectIDLaw(levy, mu.ratio, mu.stable_terms + nu.stable_terms)


def _kernel_params(law):
    """(levy_t, levy_w, stable_p, stable_c) for the compiled kernel, or None."""
    if isinstance(law.levy, GridDensityMeasure):
        return None
    if isinstance(law.levy, AtomicMeasure):
        lt = law.levy.positions
        lw = law.levy.masses
    else:
        lt = np.zeros(0)
        lw = np.zeros(0)
    sp, sc = [], []
    for a, t in law.stable_terms:
        if a == 2.0:
            sp.append(1.0)
            sc.append(-t)
        else:
            sp.append(a / 2.0)
            sc.append(-t / np.sin(np.pi * a / 2.0))
    return lt, lw, np.array(sp), np.array(sc)


def H_from_C(law, z, tol=1e-13):
    """Right inverse of w / T(C(w)) at z (H of the law), plus the branch
    value g = 1 + C(H) used for G recovery.

    Returns (H, g, ok) arrays; scalar z yields scalars.  Points where the
    continuation fails at the default step size are retried with finer
    steps before being flagged.
    """
    zv = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if np.any((zv.imag == 0) & (zv.real >= 0)):
        raise DomainError("H is defined on the complement of [0, inf)")
    params = _kernel_params(law)

    def run(zz, ds0):
        if params is not None:
            return kernels.rect_h_solve(zz, params[0], params[1], params[2],
                                        params[3], law.ratio, tol=tol, ds0=ds0)
        return kernels.solve_rect_inverse(
            zz, lambda w: np.asarray(law.c_transform(w)),
            lambda w: np.asarray(law.c_prime(w)), law.ratio, tol=tol, ds0=ds0)

    H, g, resid, ok, _ = run(zv, 1.0 / 32.0)
    for ds0 in (1.0 / 256.0, 1.0 / 2048.0):
        if ok.all():
            break
        bad = ~ok
        H2, g2, r2, ok2, _ = run(zv[bad], ds0)
        idx = np.flatnonzero(bad)
        H[idx], g[idx], ok[idx] = H2, g2, ok2
    if np.ndim(z) == 0:
        return complex(H[0]), complex(g[0]), bool(ok[0])
    return H, g, ok


def G_from_H(H_value, z, lam):
    """G at 1/sqrt(z) from H(z): sqrt(z) * V(H(z)/z), principal V branch.

    Valid near the origin; the density pipeline instead uses the analytic
    branch g = 1 + C(H(z)), which is correct globally (the principal V
    formula leaves its sheet away from the origin).
    """
    s = sqrt_upper_unchecked(z)
    return s * V(np.asarray(H_value, dtype=np.complex128) / np.asarray(z), lam)


# ---------------------------------------------------------------------------
# general-nu subordination
# ---------------------------------------------------------------------------

def _nu_chain(nu, lam):
    """Vectorized H_nu, M_nu and derivatives through u = 1/sqrt(w)."""

    def parts(w):
        u = 1.0 / sqrt_upper_unchecked(w)
        with np.errstate(all="ignore"):
            G = np.asarray(nu.cauchy(u), dtype=np.complex128)
            Gp = np.asarray(nu.cauchy_prime(u), dtype=np.complex128)
        q = u * G
        dq = (G + u * Gp) * (-0.5 * u**3)
        M = q - 1.0
        H = w * q * (lam * q - lam + 1.0)
        dH = q * (lam * q - lam + 1.0) + w * (2.0 * lam * q - lam + 1.0) * dq
        return H, dH, M, dq

    return parts


def _continued_inverse(ztarg, fval, fprime, branch_check, tol=1e-12,
                       max_newton=12, max_rounds=4000, ds0=1.0 / 32.0):
    """Solve f(w) = z on the branch with f(w) ~ w at the origin.

    Radial leg by guarded march/bisection (f is real and monotone on the
    branch along the negative axis), angular leg by damped Newton with
    basin-jump rejection; same scheme as the transform-inverse kernel.
    """
    from .kernels.reference import _march_radial

    ztarg = np.atleast_1d(np.asarray(ztarg, dtype=np.complex128))
    n = ztarg.size
    rt = np.abs(ztarg)
    theta_t = np.mod(np.angle(ztarg), 2.0 * np.pi)

    w, ok = _march_radial(-rt, fval, branch_check, tol)

    def newton(zn, wstart):
        wv = wstart.copy()
        good = np.zeros(wv.shape, dtype=bool)
        step_ok = np.zeros(wv.shape, dtype=bool)
        for _ in range(max_newton):
            with np.errstate(all="ignore"):
                f = fval(wv) - zn
            good = np.isfinite(f) & (np.abs(f) <= tol * (1.0 + np.abs(zn)))
            if (good | step_ok).all():
                break
            with np.errstate(all="ignore"):
                d = f / fprime(wv)
            d = np.where(np.isfinite(d) & ~good, d, 0.0)
            step_ok = np.isfinite(f) & (np.abs(d) <= 1e-14 * (1.0 + np.abs(wv)))
            wnew = wv - d
            onto_cut = (wnew.imag == 0.0) & (wnew.real >= 0.0)
            wnew = np.where(onto_cut, wv - 0.5 * d, wnew)
            wv = wnew
        with np.errstate(all="ignore"):
            f = fval(wv) - zn
        good = np.isfinite(f) & \
            ((np.abs(f) <= 1e3 * tol * (1.0 + np.abs(zn))) | step_ok)
        return wv, good

    s = np.zeros(n)
    ds = np.full(n, ds0)
    s[np.abs(theta_t - np.pi) < 1e-15] = 1.0
    rounds = 0
    active = (s < 1.0) & ok
    while active.any() and rounds < max_rounds:
        rounds += 1
        sp = np.minimum(1.0, s + ds)
        th = np.pi + (theta_t - np.pi) * sp
        zp = rt * np.exp(1j * th)
        wprev = w[active]
        wtry, good = newton(zp[active], wprev)
        cap = 0.75 * (np.abs(wprev) + 1e-15)
        good &= np.abs(wtry - wprev) <= cap
        ids = np.flatnonzero(active)
        acc, rej = ids[good], ids[~good]
        w[acc] = wtry[good]
        s[acc] = sp[acc]
        ds[acc] = np.minimum(ds[acc] * 1.5, 0.125)
        ds[rej] *= 0.5
        ok[rej[ds[rej] < 1e-10]] = False
        active = (s < 1.0) & ok
    ok &= s >= 1.0
    upper = ztarg.imag > 0
    lower = ztarg.imag < 0
    ok &= ~(upper & (w.imag < -1e-9 * np.abs(w)))
    ok &= ~(lower & (w.imag > 1e-9 * np.abs(w)))
    with np.errstate(all="ignore"):
        resid = np.abs(fval(w) - ztarg)
    return w, np.where(np.isfinite(resid), resid, np.inf), ok


def omega2_general(handle, z):
    """Subordination point omega2(z) for mu ID, nu arbitrary symmetric.

    Solves k(omega) = z with k(w) = H_nu(w) / T[C_mu(H_nu(w)) + M_nu(w)].
    Returns (omega2, residual, ok); scalars for scalar z.
    """
    lam = handle.lam
    parts = _nu_chain(handle.nu, lam)
    law = handle.mu

    def kval(w):
        H, _, M, _ = parts(w)
        X = np.asarray(law.c_transform(H)) + M
        return H / T(X, lam)

    def kprime(w):
        H, dH, M, dM = parts(w)
        X = np.asarray(law.c_transform(H)) + M
        TX = T(X, lam)
        dTX = (2.0 * lam * X + lam + 1.0) * (np.asarray(law.c_prime(H)) * dH + dM)
        return (dH * TX - H * dTX) / TX**2

    def branch_check(wneg):
        # on the negative-axis branch the combined transform value stays in
        # (-1, 0], exactly as for a single ID law
        with np.errstate(all="ignore"):
            H, _, M, _ = parts(wneg.astype(np.complex128))
            X = np.real(np.asarray(law.c_transform(H)) + M)
            Him = np.abs(np.imag(H))
        return (X > -1.0 + 1e-14) & (X <= 1e-9) & (Him <= 1e-9 * (1 + np.abs(H)))

    zv = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    w, resid, ok = _continued_inverse(zv, kval, kprime, branch_check,
                                      tol=handle.tol)
    for ds0 in (1.0 / 256.0, 1.0 / 2048.0):
        if ok.all():
            break
        bad = ~ok
        w2, r2, ok2 = _continued_inverse(zv[bad], kval, kprime, branch_check,
                                         tol=handle.tol, ds0=ds0)
        idx = np.flatnonzero(bad)
        w[idx], resid[idx], ok[idx] = w2, r2, ok2
    if np.ndim(z) == 0:
        return complex(w[0]), float(resid[0]), bool(ok[0])
    return w, resid, ok


def _g_total_via_omega2(handle, z):
    """q = (1/sqrt z) G_{mu (+) nu}(1/sqrt z) through the subordination route."""
    lam = handle.lam
    parts = _nu_chain(handle.nu, lam)
    w, resid, ok = omega2_general(handle, np.atleast_1d(z))
    H, _, M, _ = parts(w)
    M_tot = M + np.asarray(handle.mu.c_transform(H))
    return M_tot + 1.0, ok


# ---------------------------------------------------------------------------
# density, atoms, holes
# ---------------------------------------------------------------------------

def _chain_density_rows(handle, xs, ladder):
    """(rows, okall): density estimates at each ladder epsilon."""
    rows = []
    okall = np.ones(xs.shape, dtype=bool)
    if handle.both_id():
        law = handle.summed_law()
        for eps in ladder:
            u = xs - 1j * eps
            z = 1.0 / u**2
            H, g, ok = H_from_C(law, z, tol=handle.tol)
            G = g / u
            rows.append(G.imag / np.pi)
            okall &= ok
    else:
        for eps in ladder:
            u = xs - 1j * eps
            z = 1.0 / u**2
            q, ok = _g_total_via_omega2(handle, z)
            G = q / u
            rows.append(G.imag / np.pi)
            okall &= ok
    return np.vstack(rows), okall


def _extrapolate_with_fallback(compute_rows, xs, ladder):
    """Richardson over the ladder; points failing at deep rungs (extreme
    1/eps^2 targets are ill-conditioned) are redone on a shallower ladder."""
    rows, okall = compute_rows(xs, ladder)
    dens, errs = richardson(rows, np.asarray(ladder))
    if not okall.all() and len(ladder) > 4:
        shallow = tuple(ladder[: max(3, len(ladder) // 2)])
        idx = np.flatnonzero(~okall)
        rows2, ok2 = compute_rows(xs[idx], shallow)
        d2, e2 = richardson(rows2, np.asarray(shallow))
        dens[idx] = np.where(ok2, d2, dens[idx])
        errs[idx] = np.where(ok2, e2, errs[idx])
        okall[idx] = ok2
    return dens, errs, okall


def rect_density_curve(handle, grid, ladder=None, support_threshold=1e-6):
    """Density of mu (+)_lam nu on a symmetric grid of abscissae.

    Positive abscissae are computed from boundary values u = x - i eps with
    Richardson extrapolation along the ladder; negative ones follow by
    symmetry.  The atom at the origin (if any) is attached from the
    transform-limit estimate.
    """
    if _is_delta0(handle.nu if not handle.both_id() else handle.nu_id):
        return rect_law_density_curve(handle.mu, grid, ladder=ladder or handle.ladder)
    grid = np.asarray(grid, dtype=float)
    ladder = tuple(ladder) if ladder is not None else handle.ladder
    mass0 = atom_at_zero(handle)
    xs = np.unique(np.abs(grid))
    if mass0 > 1e-9:
        xs = xs[xs > 1e-12]     # boundary values diverge at an atom
    dens_pos, err_pos, okall = _extrapolate_with_fallback(
        lambda xv, lad: _chain_density_rows(handle, xv, lad), xs, ladder)

    dens = np.interp(np.abs(grid), xs, dens_pos, left=0.0, right=0.0)
    errs = np.interp(np.abs(grid), xs, err_pos, left=0.0, right=0.0)
    okmask = np.interp(np.abs(grid), xs, okall.astype(float)) > 0.999
    flags = np.where(okmask, np.int8(PointFlag.OK), np.int8(PointFlag.FAILED))
    if mass0 > 1e-9:
        dens = np.where(np.abs(grid) <= 1e-12, 0.0, dens)

    atoms = [(0.0, mass0)] if mass0 > 1e-9 else []
    curve = DensityCurve(grid, dens, errs, atoms=atoms, flags=flags,
                         diagnostics={"ladder": list(ladder),
                                      "computed_abscissae": len(xs),
                                      "mode": "C-chain" if handle.both_id()
                                              else "omega2"})
    curve.support = support_scan((grid, curve.density), support_threshold)
    return curve


def rect_law_density_curve(law, grid, ladder=DEFAULT_LADDER):
    """Density curve of a single rectangular ID law (no second operand)."""
    grid = np.asarray(grid, dtype=float)
    mass0 = law.mass_at_zero()
    xs = np.unique(np.abs(grid))
    if mass0 > 1e-9:
        xs = xs[xs > 1e-12]

    def compute_rows(xv, lad):
        rows = []
        okall = np.ones(xv.shape, dtype=bool)
        for eps in lad:
            u = xv - 1j * eps
            z = 1.0 / u**2
            H, g, ok = H_from_C(law, z)
            rows.append((g / u).imag / np.pi)
            okall &= ok
        return np.vstack(rows), okall

    dens_pos, err_pos, okall = _extrapolate_with_fallback(compute_rows, xs, tuple(ladder))
    dens = np.interp(np.abs(grid), xs, dens_pos, left=0.0, right=0.0)
    errs = np.interp(np.abs(grid), xs, err_pos, left=0.0, right=0.0)
    if mass0 > 1e-9:
        dens = np.where(np.abs(grid) <= 1e-12, 0.0, dens)
    flags = np.where(np.interp(np.abs(grid), xs, okall.astype(float)) > 0.999,
                     np.int8(PointFlag.OK), np.int8(PointFlag.FAILED))
    atoms = [(0.0, mass0)] if mass0 > 1e-9 else []
    curve = DensityCurve(grid, dens, errs, atoms=atoms, flags=flags,
                         diagnostics={"mode": "single-law"})
    curve.support = support_scan((grid, curve.density))
    return curve


def realize_rect_id(law, n_points=1201, mass_tol=2e-3, ladder=None):
    """Materialize a rectangular ID law as a grid density plus its atom at 0,
    widening the grid until the captured mass is complete within tolerance.
    Used by the Monte Carlo oracle to sample transform-defined laws."""
    ladder = ladder or DEFAULT_LADDER
    mass0 = law.mass_at_zero()
    scale = 1.0
    if law.levy is not None:
        lo, hi = law.levy.support()
        scale = max(abs(lo), abs(hi), 0.5)
    for a, t in law.stable_terms:
        scale = max(scale, 4.0 * t)
    xmax = 6.0 * scale
    for _ in range(8):
        grid = np.linspace(-xmax, xmax, n_points)
        curve = rect_law_density_curve(law, grid, ladder=ladder)
        deficit = 1.0 - (curve.integral() + mass0)
        if deficit < mass_tol:
            return GridDensityMeasure(grid, curve.density, atom_at_zero=mass0,
                                      expected_total=1.0, normalize=True)
        xmax *= 2.0
    raise ConvergenceError(
        f"could not capture the law's mass on a finite grid (deficit {deficit:.3e})")


def rect_id_cauchy(law, z):
    """Cauchy transform of a rectangular ID law at complex points, via the
    chain (z in C \\ R; boundary values from the correct side)."""
    zv = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    upper = zv.imag >= 0
    u = np.where(upper, np.conj(zv), zv)      # chain lives in the lower half
    zz = 1.0 / u**2
    H, g, ok = H_from_C(law, zz)
    G = g / u
    out = np.where(upper, np.conj(G), G)
    return out if np.ndim(z) else complex(out[0])


def atom_at_zero(handle_or_law, ladder_exponents=(2, 3, 4, 5, 6, 7, 8)):
    """Mass of mu (+)_lam nu at the origin.

    For a summed transform the C ladder limit L = lim C(w), w -> -inf gives
    the mass 1 + L when L lands in (-1, 0]; with a general second operand
    the subordination route's M ladder plays the same role.  Cross-checked
    against max(0, mu({0}) + nu({0}) - 1) when both operand masses are known.
    """
    if isinstance(handle_or_law, (RectIDLaw, RectStable)):
        law = RectIDLaw.from_measure(handle_or_law, handle_or_law.ratio) \
            if isinstance(handle_or_law, RectStable) else handle_or_law
        return law.mass_at_zero()
    handle = handle_or_law
    if handle.both_id():
        mass = handle.summed_law().mass_at_zero()
        by_formula = max(0.0, handle.mu.mass_at_zero()
                         + handle.nu_id.mass_at_zero() - 1.0)
        if abs(mass - by_formula) > 5e-3:
            import warnings
            warnings.warn(
                f"transform-limit atom {mass:.4f} disagrees with the operand "
                f"mass formula {by_formula:.4f}")
        return mass
    xs = -np.power(10.0, ladder_exponents).astype(float)
    q, ok = _g_total_via_omega2(handle, xs.astype(np.complex128))
    vals = q.real[ok]
    if vals.size < 2 or abs(vals[-1] - vals[-2]) > 1e-3:
        return 0.0
    return float(max(0.0, min(1.0, vals[-1])))


@dataclass
class HoleReport:
    has_hole: bool
    hole_radius_estimate: float
    atom_at_zero: float
    diagnostics: dict = field(default_factory=dict)


def _density_probe(handle, xs, ladder=(1e-4, 10 ** -4.5, 1e-5)):
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    rows, ok = _chain_density_rows(handle, xs, ladder)
    d, e = richardson(rows, np.asarray(ladder))
    return np.where(ok, d, np.nan)


def hole_detect(handle, resolution=1e-4, threshold=1e-6):
    """Locate the support hole around the origin (mu ID, nu symmetric).

    Bisects for the smallest x > 0 with density above the threshold; the
    hole is confirmed by three consecutive extrapolated evaluations inside.
    """
    mass0 = atom_at_zero(handle)
    mu0 = handle.mu.mass_at_zero()
    nu0 = handle.nu_id.mass_at_zero() if handle.both_id() else handle.nu.mass_at(0.0)
    diag = {"mu_mass0": mu0, "nu_mass0": nu0}
    if mu0 + nu0 >= 1.0 - 1e-9:
        return HoleReport(False, 0.0, mass0, diag)

    # initial scale: spread outward until the density is visible
    scale = 1.0
    if handle.both_id():
        law = handle.summed_law()
        if law.levy is not None:
            lo, hi = law.levy.support()
            scale = max(abs(lo), abs(hi), 1e-3)
        for a, t in law.stable_terms:
            scale = max(scale, t)
    x_hi = 0.05 * scale
    for _ in range(80):
        d = _density_probe(handle, x_hi)[0]
        if np.isfinite(d) and d > threshold:
            break
        x_hi *= 1.6
    else:
        return HoleReport(False, 0.0, mass0, {**diag, "error": "no density found"})

    x_lo = min(resolution, x_hi / 4.0)
    d_lo = _density_probe(handle, x_lo)[0]
    if np.isfinite(d_lo) and d_lo > threshold:
        return HoleReport(False, 0.0, mass0, {**diag, "note": "density at origin scale"})

    while x_hi - x_lo > resolution:
        mid = 0.5 * (x_lo + x_hi)
        d = _density_probe(handle, mid)[0]
        if np.isfinite(d) and d > threshold:
            x_hi = mid
        else:
            x_lo = mid
    radius = 0.5 * (x_lo + x_hi)

    inside = _density_probe(handle, np.array([radius / 4, radius / 2, 3 * radius / 4]))
    confirmed = bool(np.all(np.isnan(inside) | (inside <= threshold)))
    diag.update({"confirmed_inside": confirmed,
                 "inside_values": inside.tolist()})
    return HoleReport(True, float(radius), mass0, diag)


# ---------------------------------------------------------------------------
# reductions at the edge ratios
# ---------------------------------------------------------------------------

def _square_equivalent(m):
    """The square-convolution description of a rectangular law at lambda = 1."""
    from .measures import CauchyLaw, Semicircle

    if isinstance(m, RectStable):
        if m.alpha == 2.0:
            return Semicircle(m.t)
        if m.alpha == 1.0:
            return CauchyLaw(m.t)
    raise DomainError("no square-engine counterpart known for this operand")


def lambda_reductions_check(m1, m2, grid=None):
    """Consistency of the rectangular machinery at the edge ratios.

    At lambda = 1 the rectangular density must match the square-engine
    density of the equivalent operands.  At lambda = 0 the convolution is
    the symmetric square root of the additive convolution of the squared
    push-forwards; for a pair of rectangular Gaussians that is a two-point
    measure, recovered here from the chain's boundary values.  Returns a
    report dict with the observed gaps.
    """
    from . import square

    if grid is None:
        grid = np.linspace(-4.0, 4.0, 321)
    grid = np.asarray(grid, dtype=float)
    report = {}

    h_rect = RectConvHandle(RectIDLaw.from_measure(m1, 1.0),
                            RectIDLaw.from_measure(m2, 1.0), 1.0)
    curve_rect = rect_density_curve(h_rect, grid)
    sq1 = _square_equivalent(m1)
    sq2 = _square_equivalent(m2)
    h_sq = square.SquareConvHandle(sq1, sq2)
    curve_sq = square.density_curve_square(h_sq, grid)
    gap = float(np.max(np.abs(curve_rect.density - curve_sq.density)))
    report["lambda1_max_density_gap"] = gap
    report["square_operands"] = (type(sq1).__name__, type(sq2).__name__)

    if all(isinstance(m, RectStable) and m.alpha == 2.0 for m in (m1, m2)):
        report["lambda0_atom_gap"] = _lambda0_gaussian_atom_gap(m1.t, m2.t)
    return report


def _lambda0_gaussian_atom_gap(s, t):
    """lambda = 0 reduction for rectangular Gaussians: the squared
    push-forwards are point masses, so the convolution is the symmetrized
    square root of delta_{s+t}; recover its atom from the chain at lam = 0
    (the chain formulas degenerate cleanly: T(c) = c + 1, g = H/z)."""
    pos = np.sqrt(s + t)
    masses = []
    for eps in (1e-5, 1e-6, 1e-7):
        u = np.array([pos + 1j * eps])
        z = 1.0 / np.conj(u) ** 2          # chain variable for G at conj(u)
        H, g, resid, ok, _ = kernels.rect_h_solve(
            z, np.zeros(0), np.zeros(0), np.array([1.0]),
            np.array([-(s + t)]), 0.0)
        if not ok[0]:
            return np.inf
        G_at_u = np.conj(g[0] / np.conj(u[0]))
        masses.append((1j * eps * G_at_u).real)
    return abs(masses[-1] - 0.5)
