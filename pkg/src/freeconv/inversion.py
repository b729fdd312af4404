"""Stieltjes inversion utilities: boundary-value extrapolation, atom masses,
support scanning and cusp classification on computed transforms."""

import csv
import enum
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_LADDER",
    "DensityCurve",
    "PointFlag",
    "CuspClass",
    "richardson",
    "stieltjes_density",
    "stieltjes_density_grid",
    "atom_mass",
    "atom_mass_full",
    "support_scan",
    "cusp_detect",
]

#: geometric epsilon ladder 1e-3 .. 1e-7 with ratio 1/sqrt(10)
DEFAULT_LADDER = tuple(np.geomspace(1e-3, 1e-7, 9))

NEGATIVE_CLIP = -1e-7


class PointFlag(enum.IntEnum):
    OK = 0
    LADDER = 1          # direct boundary solve failed; epsilon ladder used
    CLIPPED = 2         # negative extrapolation clipped to zero
    FAILED = 3          # no convergence; value unreliable


class CuspClass(enum.Enum):
    ZERO_FINITE_SLOPE = "Zero+FiniteSlope"
    CUSP = "Cusp"
    POSITIVE = "Positive"
    UNDECIDED = "Undecided"


def richardson(values, ladder):
    """Two-level Richardson extrapolation of f(eps) -> f(0) on a geometric
    ladder.  Returns (value, error_bar).  ``values`` may be (k,) or (k, n).

    A non-monotone tail (differences growing) falls back to the smallest-eps
    raw value with the spread as a wide error bar.
    """
    v = np.asarray(values, dtype=float)
    ladder = np.asarray(ladder, dtype=float)
    k = v.shape[0]
    if k == 1:
        return v[0], np.full_like(v[0], np.inf) if v.ndim > 1 else np.inf
    r = ladder[1] / ladder[0]
    r1 = (v[1:] - r * v[:-1]) / (1.0 - r)
    if k >= 3:
        r2 = (r1[1:] - r * r * r1[:-1]) / (1.0 - r * r)
        est = r2[-1]
        err = np.abs(r2[-1] - r2[-2]) if r2.shape[0] >= 2 else np.abs(r1[-1] - r1[-2])
    else:
        est = r1[-1]
        err = np.abs(v[-1] - v[-2])
    diffs = np.abs(np.diff(v, axis=0))
    bad = diffs[-1] > diffs[0] + 1e-30
    est = np.where(bad, v[-1], est)
    err = np.where(bad, np.max(diffs, axis=0), err)
    if np.ndim(est) == 0:
        return float(est), float(err)
    return est, err


def stieltjes_density_grid(G_eval, xs, ladder=DEFAULT_LADDER):
    """Density via -(1/pi) Im G(x + i eps), extrapolated eps -> 0.

    ``G_eval`` maps a complex array to G values; returns (density, error_bar)
    arrays over ``xs``.
    """
    xs = np.asarray(xs, dtype=float)
    rows = []
    for eps in ladder:
        g = np.asarray(G_eval(xs + 1j * eps))
        rows.append(-g.imag / np.pi)
    return richardson(np.vstack(rows), ladder)


def stieltjes_density(G_eval, x, ladder=DEFAULT_LADDER):
    """Scalar convenience wrapper: (density, error_bar) at one point."""
    d, e = stieltjes_density_grid(G_eval, np.array([x]), ladder)
    return float(d[0]), float(e[0])


def atom_mass_full(G_eval, a, ladder=DEFAULT_LADDER):
    """Atom mass lim eps -> 0 of i eps G(a + i eps).

    Returns (mass, error_bar, imag_residual); a diverging ladder yields mass
    0 with an infinite error bar.
    """
    ladder = np.asarray(ladder, dtype=float)
    vals = np.array([complex(1j * eps * np.asarray(G_eval(np.array([a + 1j * eps])))[0])
                     for eps in ladder])
    mass, err = richardson(vals.real, ladder)
    imag_res = float(np.abs(vals.imag[-1]))
    if not np.isfinite(mass) or mass < -1e-6:
        return 0.0, np.inf, imag_res
    return max(float(mass), 0.0), err, imag_res


def atom_mass(G_eval, a, ladder=DEFAULT_LADDER):
    return atom_mass_full(G_eval, a, ladder)[0]


def support_scan(curve, threshold=1e-6):
    """Maximal intervals where the density exceeds the threshold.

    Accepts a DensityCurve or an (xs, density) pair; returns a list of
    [lo, hi] intervals.  Gaps (including a hole containing 0, if any) can be
    read off between consecutive intervals.
    """
    if isinstance(curve, DensityCurve):
        xs, d = curve.grid, curve.density
    else:
        xs, d = curve
    above = np.asarray(d) > threshold
    intervals = []
    i = 0
    n = len(xs)
    while i < n:
        if above[i]:
            j = i
            while j + 1 < n and above[j + 1]:
                j += 1
            intervals.append([float(xs[i]), float(xs[j])])
            i = j + 1
        else:
            i += 1
    return intervals


def gaps_of(intervals, lo, hi):
    """Complementary gaps of the intervals inside [lo, hi]."""
    gaps = []
    prev = lo
    for a, b in intervals:
        if a > prev:
            gaps.append([prev, a])
        prev = max(prev, b)
    if prev < hi:
        gaps.append([prev, hi])
    return gaps


def _powerlaw_fit(lx, ly):
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(res[0]) if len(res) else float(np.sum((ly - A @ coef) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2


def cusp_detect(curve, x0, positive_threshold=1e-3, window_frac=0.1,
                min_points=5, r2_threshold=0.9):
    """Classify the local behaviour of the density at x0.

    Fits d(x) ~ c |x - x0|^p on each side of x0; p >= 1 means a zero with a
    finite one-sided derivative, p in (0, 1) a cusp.  A density value above
    ``positive_threshold`` at x0 short-circuits to POSITIVE.  The window
    starts at window_frac of the local support width and shrinks toward x0
    until the power law fits cleanly (mixing the local regime with the bulk
    would otherwise spoil the exponent).
    """
    xs, d = curve.grid, curve.density
    d0 = float(np.interp(x0, xs, d))
    if d0 > positive_threshold:
        return CuspClass.POSITIVE
    if curve.support:
        width = max(b - a for a, b in curve.support)
    else:
        width = xs[-1] - xs[0]
    floor = np.maximum(1e-9, 5.0 * curve.error_bars)
    # identically-zero neighborhood (a gap through x0): vanishing with a
    # (trivially) finite one-sided derivative
    win0 = window_frac * width * 0.125
    near = np.abs(xs - x0) < win0
    if near.sum() >= min_points and np.all(d[near] <= floor[near]):
        return CuspClass.ZERO_FINITE_SLOPE
    for shrink in (1.0, 0.5, 0.25, 0.125):
        win = window_frac * width * shrink
        exps = []
        fit_ok = True
        for side in (-1, 1):
            sel = (side * (xs - x0) > 1e-12) & (np.abs(xs - x0) < win) & (d > floor)
            if sel.sum() < min_points:
                fit_ok = False
                break
            p, r2 = _powerlaw_fit(np.log(np.abs(xs[sel] - x0)), np.log(d[sel]))
            if r2 < r2_threshold:
                fit_ok = False
                break
            exps.append(p)
        if fit_ok and exps:
            p = float(np.mean(exps))
            return CuspClass.CUSP if p < 0.9 else CuspClass.ZERO_FINITE_SLOPE
    return CuspClass.UNDECIDED


@dataclass
class DensityCurve:
    """Grid of abscissae with extrapolated density values, detected atoms and
    support intervals; the universal output of both convolution engines."""

    grid: np.ndarray
    density: np.ndarray
    error_bars: np.ndarray
    atoms: list = field(default_factory=list)          # [(position, mass)]
    support: list = field(default_factory=list)        # [[lo, hi], ...]
    flags: np.ndarray = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        self.error_bars = np.asarray(self.error_bars, dtype=float)
        if self.flags is None:
            self.flags = np.zeros(self.grid.shape, dtype=np.int8)
        neg = self.density < 0
        if neg.any():
            hard = self.density < NEGATIVE_CLIP
            self.flags = np.where(hard, np.int8(PointFlag.CLIPPED), self.flags)
            self.density = np.clip(self.density, 0.0, None)
        if not self.support:
            self.support = support_scan((self.grid, self.density))

    def atom_mass_total(self):
        return float(sum(m for _, m in self.atoms))

    def integral(self):
        return float(np.trapezoid(self.density, self.grid))

    def total_mass(self):
        return self.integral() + self.atom_mass_total()

    def density_at(self, x):
        return float(np.interp(x, self.grid, self.density))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (self.density[1:] + self.density[:-1]) * np.diff(self.grid))]
        )
        out = np.interp(x, self.grid, cum, left=0.0, right=cum[-1])
        for p, m in self.atoms:
            out = out + np.where(x >= p, m, 0.0)
        return out if out.ndim else float(out)

    def gaps(self):
        return gaps_of(self.support, float(self.grid[0]), float(self.grid[-1]))

    def hole(self):
        """The support gap containing 0, or None."""
        for a, b in self.gaps():
            if a < 0.0 < b:
                return [a, b]
        return None

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "density", "error_bar", "flag"])
            for x, d, e, f in zip(self.grid, self.density, self.error_bars, self.flags):
                w.writerow([f"{x:.17g}", f"{d:.17g}", f"{e:.17g}", int(f)])

    def sidecar_dict(self):
        return {
            "atoms": [{"position": p, "mass": m} for p, m in self.atoms],
            "support": [[a, b] for a, b in self.support],
        }

    def write_sidecar(self, path):
        with open(path, "w") as fh:
            json.dump(self.sidecar_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
