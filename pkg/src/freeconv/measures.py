"""Probability measures on the real line and their integral transforms.

Every representation the engine manipulates lives here:

* ``AtomicMeasure``           -- finite convex combinations of point masses
* ``GridDensityMeasure``      -- piecewise-linear density samples on a grid
* closed-form families        -- semicircle, Cauchy, Bernoulli, free Poisson,
                                 arcsine, Marchenko-Pastur, rectangular stable
* ``SquareIDLaw``             -- law defined by gamma and a Levy measure
                                 through its additive-convolution transform
* ``RectIDLaw``               -- law defined by a symmetric Levy measure (and
                                 optional stable terms) through its
                                 rectangular transform
* ``TransformDefinedMeasure`` -- law given by an expression for F or G

Measures are immutable after construction and all evaluations are pure,
so everything here is safe to call concurrently.
"""

import warnings

import numpy as np

from .errors import DomainError, PoleError

__all__ = [
    "Measure",
    "AtomicMeasure",
    "DiracMass",
    "GridDensityMeasure",
    "Semicircle",
    "CauchyLaw",
    "SymmetricBernoulli",
    "FreePoisson",
    "Arcsine",
    "MarchenkoPastur",
    "RectStable",
    "SquareIDLaw",
    "CallablePhiIDLaw",
    "RectIDLaw",
    "TransformDefinedMeasure",
    "cauchy_transform",
    "reciprocal_cauchy",
    "psi_transform",
    "push_forward_square",
    "symmetric_sqrt",
    "as_square_id",
    "wasserstein1",
    "measures_close",
]

MIN_IM_HEIGHT = 1e-8       # grid quadrature refuses closer approaches near support
ATOM_SUM_TOL = 1e-12
GRID_MASS_TOL = 1e-6


def _carr(z):
    return np.asarray(z, dtype=np.complex128)


def _scalar_like(out, z):
    return out if np.ndim(z) else complex(out)


def _edge_sqrt(z, a, b):
    """sqrt((z-a)(z-b)) analytic off [a, b], ~ z at infinity.

    Real arguments inside (a, b) give the boundary value from the upper
    half-plane (numpy's sqrt(-x + 0j) = +i sqrt(x) convention).
    """
    return np.sqrt(z - a) * np.sqrt(z - b)


class Measure:
    """Common interface; subclasses implement `_cauchy` and friends."""

    total_mass = 1.0

    # -- transforms ---------------------------------------------------------

    def cauchy(self, z):
        """G(z) = integral of 1/(z - x) dmu(x), vectorized.

        Off the real axis this is always defined; on the axis subclasses
        return the boundary value from the upper half-plane where it exists
        and raise PoleError at atoms.
        """
        raise NotImplementedError

    def cauchy_prime(self, z):
        """dG/dz, used by Newton solvers."""
        z = _carr(z)
        h = 1e-6 * np.maximum(1.0, np.abs(z))
        out = (self.cauchy(z + h) - self.cauchy(z - h)) / (2.0 * h)
        return _scalar_like(out, z)

    def reciprocal_cauchy(self, z):
        g = self.cauchy(z)
        if np.any(g == 0):
            raise PoleError("G vanishes: potential boundary zero, F undefined")
        out = 1.0 / g
        return _scalar_like(out, z)

    # -- structure ----------------------------------------------------------

    def atoms(self):
        """List of (position, mass) pairs (may be empty)."""
        return []

    def mass_at(self, x):
        for p, m in self.atoms():
            if p == x:
                return m
        return 0.0

    def support(self):
        """A finite (lo, hi) bracket containing essentially all mass."""
        raise NotImplementedError

    def is_symmetric(self, tol=1e-9):
        raise NotImplementedError

    def density(self, x):
        """Density of the absolutely continuous part (0 where none)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        return out if out.ndim else float(out)

    def cdf(self, x):
        raise NotImplementedError

    def expect(self, f):
        """Numeric integral of f against the measure."""
        raise NotImplementedError

    def inv_square_moment(self):
        """integral of t^-2 dmu(t); +inf when mass accumulates at 0."""
        raise NotImplementedError

    def sample(self, rng, n):
        raise DomainError(f"{type(self).__name__} is not sampleable")

    def to_spec(self):
        raise NotImplementedError

    def __repr__(self):
        try:
            return f"<{type(self).__name__} {self.to_spec()}>"
        except Exception:
            return f"<{type(self).__name__}>"


# ---------------------------------------------------------------------------
# atomic measures
# ---------------------------------------------------------------------------

class AtomicMeasure(Measure):
    def __init__(self, atoms, require_probability=True):
        pts = sorted((float(p), float(m)) for p, m in atoms)
        pos = [p for p, _ in pts]
        if len(set(pos)) != len(pos):
            raise DomainError("duplicate atom positions")
        if any(m <= 0 for _, m in pts):
            raise DomainError("atom masses must be positive")
        self._pos = np.array(pos)
        self._mass = np.array([m for _, m in pts])
        self.total_mass = float(self._mass.sum())
        if require_probability and abs(self.total_mass - 1.0) > ATOM_SUM_TOL:
            raise DomainError(
                f"atom masses sum to {self.total_mass!r}, expected 1 within {ATOM_SUM_TOL}"
            )

    @property
    def positions(self):
        return self._pos

    @property
    def masses(self):
        return self._mass

    def atoms(self):
        return list(zip(self._pos.tolist(), self._mass.tolist()))

    def cauchy(self, z):
        z = _carr(z)
        d = z[..., None] - self._pos
        if np.any(d == 0):
            raise PoleError("Cauchy transform evaluated at an atom position")
        out = np.sum(self._mass / d, axis=-1)
        return _scalar_like(out, z)

    def cauchy_prime(self, z):
        z = _carr(z)
        d = z[..., None] - self._pos
        if np.any(d == 0):
            raise PoleError("Cauchy transform evaluated at an atom position")
        out = -np.sum(self._mass / d**2, axis=-1)
        return _scalar_like(out, z)

    def support(self):
        return float(self._pos[0]), float(self._pos[-1])

    def is_symmetric(self, tol=1e-9):
        for p, m in self.atoms():
            q = -p
            mm = 0.0
            for p2, m2 in self.atoms():
                if abs(p2 - q) <= tol * max(1.0, abs(q)):
                    mm = m2
                    break
            if abs(mm - m) > tol:
                return False
        return True

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.sum(np.where(x[..., None] >= self._pos, self._mass, 0.0), axis=-1)
        return out if out.ndim else float(out)

    def expect(self, f):
        return float(np.sum(self._mass * np.asarray(f(self._pos), dtype=float)))

    def inv_square_moment(self):
        if np.any(self._pos == 0):
            return np.inf
        return float(np.sum(self._mass / self._pos**2))

    def sample(self, rng, n):
        idx = rng.choice(len(self._pos), size=n, p=self._mass / self.total_mass)
        return self._pos[idx]

    def to_spec(self):
        body = ", ".join(f"{p:.17g}:{m:.17g}" for p, m in self.atoms())
        return "atomic{" + body + "}"


def DiracMass(a):
    return AtomicMeasure([(a, 1.0)])


class SymmetricBernoulli(AtomicMeasure):
    """(delta_{-a} + delta_{+a}) / 2."""

    def __init__(self, a):
        if a <= 0:
            raise DomainError("Bernoulli parameter a must be positive")
        self.a = float(a)
        super().__init__([(-a, 0.5), (a, 0.5)])

    def to_spec(self):
        return f"bernoulli{{a:{self.a:.17g}}}"


# ---------------------------------------------------------------------------
# grid densities (piecewise linear)
# ---------------------------------------------------------------------------

class GridDensityMeasure(Measure):
    """Piecewise-linear density on a strictly increasing grid, plus an
    optional atom at zero.  The Cauchy transform of the interpolant is
    evaluated in closed form (cell-by-cell logs), which stays accurate
    much closer to the axis than quadrature would."""

    def __init__(self, grid, values, atom_at_zero=0.0, expected_total=1.0,
                 normalize=False):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise DomainError("grid and values must be equal-length 1-d arrays")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        if np.any(values < -1e-12):
            raise DomainError("density values must be nonnegative")
        values = np.clip(values, 0.0, None)
        if not 0.0 <= atom_at_zero < 1.0:
            raise DomainError("atom_at_zero must lie in [0, 1)")
        ac = float(np.trapezoid(values, grid))
        if normalize and expected_total is not None and ac > 0:
            values = values * (expected_total - atom_at_zero) / ac
            ac = expected_total - atom_at_zero
        self.grid = grid
        self.values = values
        self.atom_at_zero = float(atom_at_zero)
        self.total_mass = ac + self.atom_at_zero
        if expected_total is not None and abs(self.total_mass - expected_total) > GRID_MASS_TOL:
            raise DomainError(
                f"grid measure mass {self.total_mass:.9f} != {expected_total} "
                f"within {GRID_MASS_TOL}"
            )

    def atoms(self):
        return [(0.0, self.atom_at_zero)] if self.atom_at_zero > 0 else []

    def _check_height(self, z):
        z = _carr(z)
        lo, hi = self.grid[0], self.grid[-1]
        margin = 1e-9 * max(1.0, abs(lo), abs(hi))
        near = (np.abs(z.imag) < MIN_IM_HEIGHT) & (z.real > lo - margin) & (z.real < hi + margin)
        if np.any(near):
            raise DomainError(
                f"direct evaluation refused for |Im z| < {MIN_IM_HEIGHT} over the "
                "support; use the boundary-value solvers instead"
            )
        return z

    def _cells(self, zflat, deriv):
        x0 = self.grid[:-1]
        x1 = self.grid[1:]
        v0 = self.values[:-1]
        v1 = self.values[1:]
        h = x1 - x0
        out = np.empty(zflat.shape, dtype=np.complex128)
        step = max(1, int(2_000_000 // max(1, x0.size)))
        for i in range(0, zflat.size, step):
            zz = zflat[i:i + step, None]
            L = np.log((zz - x0) / (zz - x1))
            if not deriv:
                cell = v0 * L + (v1 - v0) / h * ((zz - x0) * L - h)
            else:
                Lp = 1.0 / (zz - x0) - 1.0 / (zz - x1)
                cell = v0 * Lp + (v1 - v0) / h * (L + (zz - x0) * Lp)
            out[i:i + step] = np.sum(cell, axis=-1)
        return out

    def cauchy(self, z):
        z = self._check_height(z)
        out = self._cells(np.atleast_1d(z).ravel(), deriv=False).reshape(np.shape(z))
        if self.atom_at_zero:
            out = out + self.atom_at_zero / z
        return _scalar_like(out, z)

    def cauchy_prime(self, z):
        z = self._check_height(z)
        out = self._cells(np.atleast_1d(z).ravel(), deriv=True).reshape(np.shape(z))
        if self.atom_at_zero:
            out = out - self.atom_at_zero / z**2
        return _scalar_like(out, z)

    def support(self):
        lo = float(self.grid[0])
        hi = float(self.grid[-1])
        if self.atom_at_zero:
            lo, hi = min(lo, 0.0), max(hi, 0.0)
        return lo, hi

    def is_symmetric(self, tol=1e-6):
        g, v = self.grid, self.values
        if not np.allclose(g, -g[::-1], atol=tol * max(1.0, abs(g[-1]))):
            return False
        return bool(np.allclose(v, v[::-1], atol=tol * (1.0 + v.max())))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.grid, self.values, left=0.0, right=0.0)
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.grid))]
        )
        out = np.interp(x, self.grid, cum, left=0.0, right=cum[-1])
        if self.atom_at_zero:
            out = out + np.where(x >= 0.0, self.atom_at_zero, 0.0)
        return out if out.ndim else float(out)

    def expect(self, f):
        val = float(np.trapezoid(np.asarray(f(self.grid), dtype=float) * self.values, self.grid))
        if self.atom_at_zero:
            val += self.atom_at_zero * float(f(0.0))
        return val

    def inv_square_moment(self):
        if self.atom_at_zero > 0:
            return np.inf
        near = np.abs(self.grid) < 1e-9
        if np.any(near) and np.any(self.values[near] > 1e-12):
            return np.inf
        dens0 = self.density(0.0)
        lo, hi = self.grid[0], self.grid[-1]
        if lo < 0 < hi and dens0 > 1e-12:
            return np.inf
        return self.expect(lambda t: 1.0 / t**2)

    def sample(self, rng, n):
        u = rng.random(n)
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.grid))]
        )
        out = np.empty(n)
        p_atom = self.atom_at_zero / self.total_mass
        from_atom = u < p_atom
        out[from_atom] = 0.0
        rest = ~from_atom
        ac_mass = cum[-1]
        v = rng.random(int(rest.sum())) * ac_mass
        out[rest] = np.interp(v, cum, self.grid)
        return out

    def to_spec(self):
        xs = ",".join(f"{x:.17g}" for x in self.grid)
        vs = ",".join(f"{v:.17g}" for v in self.values)
        return f'grid{{x:"{xs}", density:"{vs}", atom_at_zero:{self.atom_at_zero:.17g}}}'


# ---------------------------------------------------------------------------
# closed-form families
# ---------------------------------------------------------------------------

class _DensityFamily(Measure):
    """Shared helpers: cached quantile table built from the closed density."""

    _qtable = None

    def _density_grid(self):
        raise NotImplementedError

    def _cdf_table(self):
        if self._qtable is None:
            x, d = self._density_grid()
            cum = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(x))])
            ac = self._ac_mass()
            if cum[-1] > 0:
                cum = cum * (ac / cum[-1])
            self._qtable = (x, cum)
        return self._qtable

    def _ac_mass(self):
        return self.total_mass - sum(m for _, m in self.atoms())

    def cdf(self, x):
        xs, cum = self._cdf_table()
        x = np.asarray(x, dtype=float)
        out = np.interp(x, xs, cum, left=0.0, right=cum[-1])
        for p, m in self.atoms():
            out = out + np.where(x >= p, m, 0.0)
        return out if out.ndim else float(out)

    def expect(self, f):
        x, d = self._density_grid()
        val = float(np.trapezoid(np.asarray(f(x), dtype=float) * d, x))
        for p, m in self.atoms():
            val += m * float(f(p))
        return val

    def sample(self, rng, n):
        xs, cum = self._cdf_table()
        masses = [m for _, m in self.atoms()]
        p_ac = cum[-1] / self.total_mass
        u = rng.random(n)
        out = np.empty(n)
        ac = u < p_ac
        v = rng.random(int(ac.sum())) * cum[-1]
        out[ac] = np.interp(v, cum, xs)
        rest = np.flatnonzero(~ac)
        if rest.size:
            positions = np.array([p for p, _ in self.atoms()])
            w = np.array(masses) / sum(masses)
            out[rest] = positions[rng.choice(len(positions), size=rest.size, p=w)]
        return out


class Semicircle(_DensityFamily):
    """Semicircle law with variance v: density sqrt(4v - x^2) / (2 pi v)."""

    def __init__(self, variance):
        if variance <= 0:
            raise DomainError("semicircle variance must be positive")
        self.variance = float(variance)
        self.radius = 2.0 * np.sqrt(self.variance)

    def cauchy(self, z):
        # rationalized form of (z - sqrt(z^2 - 4v)) / 2v: no cancellation
        # at large |z|
        z = _carr(z)
        out = 2.0 / (z + _edge_sqrt(z, -self.radius, self.radius))
        return _scalar_like(out, z)

    def cauchy_prime(self, z):
        z = _carr(z)
        s = _edge_sqrt(z, -self.radius, self.radius)
        out = -2.0 * (1.0 + z / s) / (z + s) ** 2
        return _scalar_like(out, z)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(
            np.abs(x) < self.radius,
            np.sqrt(np.clip(self.radius**2 - x**2, 0.0, None)) / (2.0 * np.pi * self.variance),
            0.0,
        )
        return out if out.ndim else float(out)

    def support(self):
        return -self.radius, self.radius

    def is_symmetric(self, tol=1e-9):
        return True

    def inv_square_moment(self):
        return 1.0 / self.variance

    def _density_grid(self):
        x = np.linspace(-self.radius, self.radius, 10001)
        return x, self.density(x)

    def to_spec(self):
        return f"semicircle{{variance:{self.variance:.17g}}}"


class CauchyLaw(_DensityFamily):
    """Cauchy law with scale t: density (t/pi) / (t^2 + x^2)."""

    def __init__(self, t):
        if t <= 0:
            raise DomainError("Cauchy scale must be positive")
        self.t = float(t)

    def cauchy(self, z):
        z = _carr(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(z.imag >= 0, 1.0 / (z + 1j * self.t),
                           1.0 / (z - 1j * self.t))
        return _scalar_like(out, z)

    def cauchy_prime(self, z):
        z = _carr(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(z.imag >= 0, -1.0 / (z + 1j * self.t) ** 2,
                           -1.0 / (z - 1j * self.t) ** 2)
        return _scalar_like(out, z)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = (self.t / np.pi) / (self.t**2 + x**2)
        return out if out.ndim else float(out)

    def support(self):
        return -300.0 * self.t, 300.0 * self.t

    def is_symmetric(self, tol=1e-9):
        return True

    def inv_square_moment(self):
        return np.inf

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = 0.5 + np.arctan(x / self.t) / np.pi
        return out if out.ndim else float(out)

    def sample(self, rng, n):
        return self.t * rng.standard_cauchy(n)

    def expect(self, f):
        x = self.t * np.tan(np.linspace(-np.pi / 2 + 1e-5, np.pi / 2 - 1e-5, 20001))
        return float(np.trapezoid(np.asarray(f(x), dtype=float) * self.density(x), x))

    def to_spec(self):
        return f"cauchy{{t:{self.t:.17g}}}"


class FreePoisson(_DensityFamily):
    """Free Poisson law, rate k:
    density sqrt(4k - (x - 1 - k)^2) / (2 pi x) on [(1-sqrt k)^2, (1+sqrt k)^2],
    plus an atom of mass (1 - k) at 0 when k < 1.  Optional dilation (scale)
    and translation (shift) of the variable."""

    def __init__(self, rate, scale=1.0, shift=0.0):
        if rate <= 0 or scale <= 0:
            raise DomainError("free Poisson rate and scale must be positive")
        self.rate = float(rate)
        self.scale = float(scale)
        self.shift = float(shift)
        k = self.rate
        self.edge_lo = self.scale * (1.0 - np.sqrt(k)) ** 2 + self.shift
        self.edge_hi = self.scale * (1.0 + np.sqrt(k)) ** 2 + self.shift

    def atoms(self):
        if self.rate < 1.0:
            return [(self.shift, 1.0 - self.rate)]
        return []

    def _base_z(self, z):
        return (z - self.shift) / self.scale

    def cauchy(self, z):
        # rationalized: (w + 1 - k - sqrt((w-a)(w-b))) / 2w = 2/(w + 1 - k + sqrt(..))
        z = _carr(z)
        w = self._base_z(z)
        k = self.rate
        a = (1.0 - np.sqrt(k)) ** 2
        b = (1.0 + np.sqrt(k)) ** 2
        if np.any(w == 0):
            raise PoleError("free Poisson transform evaluated at its atom")
        g = 2.0 / (w + 1.0 - k + _edge_sqrt(w, a, b))
        out = g / self.scale
        return _scalar_like(out, z)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        w = (x - self.shift) / self.scale
        k = self.rate
        rad = 4.0 * k - (w - 1.0 - k) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            d = np.where((rad > 0) & (w != 0), np.sqrt(np.clip(rad, 0, None)) / (2.0 * np.pi * np.abs(w)), 0.0)
        out = d / self.scale
        return out if out.ndim else float(out)

    def support(self):
        lo = self.edge_lo if self.rate >= 1 else min(self.shift, self.edge_lo)
        return lo, self.edge_hi

    def is_symmetric(self, tol=1e-9):
        return False

    def inv_square_moment(self):
        if self.rate < 1.0:
            return np.inf if self.shift == 0 else self.expect(lambda t: 1.0 / t**2)
        if self.edge_lo <= 0 <= self.edge_hi:
            return np.inf
        return self.expect(lambda t: 1.0 / t**2)

    def _density_grid(self):
        x = np.linspace(self.edge_lo, self.edge_hi, 20001)
        return x, self.density(x)

    def to_spec(self):
        return f"free_poisson{{rate:{self.rate:.17g}, scale:{self.scale:.17g}, shift:{self.shift:.17g}}}"


class Arcsine(_DensityFamily):
    """Arcsine law on (-R, R): density 1 / (pi sqrt(R^2 - x^2))."""

    def __init__(self, radius):
        if radius <= 0:
            raise DomainError("arcsine radius must be positive")
        self.radius = float(radius)

    def cauchy(self, z):
        z = _carr(z)
        out = 1.0 / _edge_sqrt(z, -self.radius, self.radius)
        return _scalar_like(out, z)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(np.abs(x) < self.radius,
                           1.0 / (np.pi * np.sqrt(np.clip(self.radius**2 - x**2, 1e-300, None))),
                           0.0)
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        xx = np.clip(x / self.radius, -1.0, 1.0)
        out = 0.5 + np.arcsin(xx) / np.pi
        return out if out.ndim else float(out)

    def support(self):
        return -self.radius, self.radius

    def is_symmetric(self, tol=1e-9):
        return True

    def inv_square_moment(self):
        return np.inf

    def sample(self, rng, n):
        return self.radius * np.sin(np.pi * (rng.random(n) - 0.5))

    def expect(self, f):
        th = np.linspace(-np.pi / 2, np.pi / 2, 20001)
        x = self.radius * np.sin(th)
        vals = np.asarray(f(x), dtype=float) / np.pi
        return float(np.trapezoid(vals, th))

    def to_spec(self):
        return f"arcsine{{radius:{self.radius:.17g}}}"


class MarchenkoPastur(_DensityFamily):
    """Marchenko-Pastur law, ratio lam in (0, 1] and scale s:
    density sqrt((b - x)(x - a)) / (2 pi lam s x) on [a, b] with
    a = s (1 - sqrt lam)^2, b = s (1 + sqrt lam)^2 (no atom for lam <= 1)."""

    def __init__(self, ratio, scale=1.0):
        if not 0 < ratio <= 1:
            raise DomainError("Marchenko-Pastur ratio must lie in (0, 1]")
        if scale <= 0:
            raise DomainError("Marchenko-Pastur scale must be positive")
        self.ratio = float(ratio)
        self.scale = float(scale)
        self.edge_lo = scale * (1.0 - np.sqrt(ratio)) ** 2
        self.edge_hi = scale * (1.0 + np.sqrt(ratio)) ** 2

    def cauchy(self, z):
        # rationalized: (w + lam - 1 - sqrt((w-a)(w-b))) / (2 lam w)
        #             = 2 / (w + lam - 1 + sqrt((w-a)(w-b)))
        z = _carr(z)
        lam, s = self.ratio, self.scale
        w = z / s
        if np.any(w == 0):
            raise PoleError("Marchenko-Pastur transform evaluated at 0")
        g = 2.0 / (w + lam - 1.0 +
                   _edge_sqrt(w, (1 - np.sqrt(lam)) ** 2, (1 + np.sqrt(lam)) ** 2))
        out = g / s
        return _scalar_like(out, z)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        rad = (self.edge_hi - x) * (x - self.edge_lo)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(
                (rad > 0) & (x != 0),
                np.sqrt(np.clip(rad, 0, None)) / (2.0 * np.pi * self.ratio * self.scale * np.abs(x)),
                0.0,
            )
        return out if out.ndim else float(out)

    def support(self):
        return self.edge_lo, self.edge_hi

    def is_symmetric(self, tol=1e-9):
        return False

    def inv_square_moment(self):
        if self.edge_lo <= 0:
            return np.inf
        return self.expect(lambda t: 1.0 / t**2)

    def _density_grid(self):
        x = np.linspace(self.edge_lo, self.edge_hi, 20001)
        return x, self.density(x)

    def to_spec(self):
        return f"marchenko_pastur{{ratio:{self.ratio:.17g}, scale:{self.scale:.17g}}}"


class RectStable(_DensityFamily):
    """Rectangular stable law with index alpha in (0, 2], power t, ratio lam.

    Time-normalized so the alpha = 1 family has the explicit density

        t / (pi (lam t^2 + x^2)) * sqrt(1 - t^2 (1 - lam)^2 / (4 x^2))

    on |x| >= t (1 - lam) / 2, i.e. its rectangular transform is
    C(z) = -t sqrt(-z).  For general alpha the transform is
    C(z) = -(t / sin(pi alpha / 2)) (-z)^(alpha/2) (alpha = 2: C(z) = t z,
    the symmetrized square root of a dilated Marchenko-Pastur law).
    """

    def __init__(self, alpha, t, ratio):
        if not 0 < alpha <= 2:
            raise DomainError("stable index alpha must lie in (0, 2]")
        if t <= 0:
            raise DomainError("stable power t must be positive")
        if not 0 < ratio <= 1:
            raise DomainError("stable ratio lambda must lie in (0, 1]")
        self.alpha = float(alpha)
        self.t = float(t)
        self.ratio = float(ratio)

    # law-level helpers ------------------------------------------------------

    def hole_radius(self):
        if self.alpha == 1.0:
            return self.t * (1.0 - self.ratio) / 2.0
        if self.alpha == 2.0:
            return np.sqrt(self.t) * (1.0 - np.sqrt(self.ratio))
        return None

    def density(self, x):
        x = np.asarray(x, dtype=float)
        lam, t = self.ratio, self.t
        if self.alpha == 1.0:
            with np.errstate(invalid="ignore", divide="ignore"):
                rad = 1.0 - t**2 * (lam - 1.0) ** 2 / (4.0 * x**2)
                out = np.where(
                    rad > 0,
                    t / (np.pi * (lam * t**2 + x**2)) * np.sqrt(np.clip(rad, 0, None)),
                    0.0,
                )
            return out if out.ndim else float(out)
        if self.alpha == 2.0:
            mp = MarchenkoPastur(lam, t)
            with np.errstate(invalid="ignore"):
                out = np.abs(x) * mp.density(x**2)
            return out if out.ndim else float(out)
        raise DomainError("closed-form density only available for alpha in {1, 2}; "
                          "realize the law through the rectangular engine instead")

    def cauchy(self, z):
        if getattr(self, "_grid_approx", None) is None:
            xs, d = self._density_grid()
            self._grid_approx = GridDensityMeasure(xs, d, expected_total=None)
        return self._grid_approx.cauchy(z)

    def support(self):
        if self.alpha == 1.0:
            return -60.0 * self.t, 60.0 * self.t
        if self.alpha == 2.0:
            return -np.sqrt(self.t) * (1 + np.sqrt(self.ratio)), np.sqrt(self.t) * (1 + np.sqrt(self.ratio))
        raise DomainError("support known in closed form only for alpha in {1, 2}")

    def is_symmetric(self, tol=1e-9):
        return True

    def inv_square_moment(self):
        return self.expect(lambda t: 1.0 / t**2)

    def _density_grid(self):
        lam, t = self.ratio, self.t
        if self.alpha == 1.0:
            # tan grading captures the Cauchy-like tails
            lo = t * (1.0 - lam) / 2.0
            th = np.linspace(0.0, np.pi / 2 - 2.8e-4, 30001)
            right = lo + t * np.tan(th)
            x = np.concatenate([-right[::-1], right])
            return x, self.density(x)
        if self.alpha == 2.0:
            hi = np.sqrt(t) * (1 + np.sqrt(lam))
            x = np.linspace(-hi, hi, 20001)
            return x, self.density(x)
        raise DomainError("no closed density for this alpha")

    def to_spec(self):
        return (f"rect_stable{{alpha:{self.alpha:.17g}, t:{self.t:.17g}, "
                f"lambda:{self.ratio:.17g}}}")


# ---------------------------------------------------------------------------
# ID laws given by their transforms
# ---------------------------------------------------------------------------

class SquareIDLaw(Measure):
    """Additive-convolution infinitely divisible law given by

        phi(z) = gamma + integral (1 + t z)/(z - t) dG(t)

    with G a finite positive Levy measure.  A nonzero ``cauchy_scale`` c
    adds the non-discretizable component dG = (c/pi) dt / (1 + t^2),
    whose contribution to phi is the constant -ci (a Cauchy law component).
    """

    def __init__(self, gamma=0.0, levy=None, cauchy_scale=0.0):
        if cauchy_scale < 0:
            raise DomainError("cauchy_scale must be nonnegative")
        if levy is not None and levy.total_mass < 0:
            raise DomainError("Levy measure must be positive")
        self.gamma = float(gamma)
        self.levy = levy
        self.cauchy_scale = float(cauchy_scale)

    # sigma representation: phi(z) = gamma1 - i c + integral dsigma(t)/(z - t)
    def sigma_parts(self):
        """Return (gamma1, positions, weights, grid_sigma, cauchy_scale).

        ``grid_sigma`` is a GridDensityMeasure-shaped pair (grid, values) for
        a continuous Levy part, or None.
        """
        g1 = self.gamma
        pos = np.zeros(0)
        wts = np.zeros(0)
        grid_sigma = None
        lv = self.levy
        if isinstance(lv, AtomicMeasure):
            pos = lv.positions
            wts = (1.0 + pos**2) * lv.masses
            g1 = g1 + float(np.sum(pos * lv.masses))
        elif isinstance(lv, GridDensityMeasure):
            grid_sigma = (lv.grid, (1.0 + lv.grid**2) * lv.values)
            g1 = g1 + float(np.trapezoid(lv.grid * lv.values, lv.grid))
            if lv.atom_at_zero:
                pos = np.array([0.0])
                wts = np.array([lv.atom_at_zero])
        elif lv is not None:
            raise DomainError("Levy measure must be atomic or a grid density")
        return g1, pos, wts, grid_sigma, self.cauchy_scale

    def phi(self, z):
        """Voiculescu transform on the closed upper half-plane."""
        z = _carr(z)
        g1, pos, wts, grid_sigma, c = self.sigma_parts()
        out = np.full(z.shape, g1, dtype=np.complex128) - 1j * c
        if pos.size:
            d = z[..., None] - pos
            if np.any(d == 0):
                raise PoleError("phi evaluated at a Levy atom on the real axis")
            out = out + np.sum(wts / d, axis=-1)
        if grid_sigma is not None:
            gm = GridDensityMeasure(grid_sigma[0], grid_sigma[1], expected_total=None)
            out = out + gm.cauchy(z)
        return _scalar_like(out, z)

    def phi_prime(self, z):
        z = _carr(z)
        g1, pos, wts, grid_sigma, c = self.sigma_parts()
        out = np.zeros(z.shape, dtype=np.complex128)
        if pos.size:
            out = out - np.sum(wts / (z[..., None] - pos) ** 2, axis=-1)
        if grid_sigma is not None:
            gm = GridDensityMeasure(grid_sigma[0], grid_sigma[1], expected_total=None)
            out = out + gm.cauchy_prime(z)
        return _scalar_like(out, z)

    def sigma_mass(self):
        """sigma(R) = integral (1 + t^2) dG(t); +inf for a Cauchy component."""
        if self.cauchy_scale > 0:
            return np.inf
        _, _, wts, grid_sigma, _ = self.sigma_parts()
        total = float(np.sum(wts))
        if grid_sigma is not None:
            total += float(np.trapezoid(grid_sigma[1], grid_sigma[0]))
        return total

    def semigroup_power(self, t):
        if t < 0:
            raise DomainError("semigroup power must be nonnegative")
        lv = None
        if self.levy is not None and t > 0:
            if isinstance(self.levy, AtomicMeasure):
                lv = AtomicMeasure(
                    [(p, m * t) for p, m in self.levy.atoms()], require_probability=False
                )
            else:
                lv = GridDensityMeasure(
                    self.levy.grid, self.levy.values * t,
                    atom_at_zero=min(self.levy.atom_at_zero * t, 1 - 1e-15),
                    expected_total=None,
                )
        return SquareIDLaw(self.gamma * t, lv, self.cauchy_scale * t)

    # distribution-level interface: F is the fixed point of w = z - phi(w)

    def reciprocal_cauchy(self, z):
        z = _carr(z)
        zz = np.atleast_1d(z)
        w = zz + 1j * (zz.imag < 1e-12)
        for _ in range(4000):
            wn = zz - self.phi(w)
            if np.all(np.abs(wn - w) <= 1e-14 * (1 + np.abs(wn))):
                w = wn
                break
            w = wn
        out = w.reshape(np.shape(z))
        return _scalar_like(out, z)

    def cauchy(self, z):
        out = 1.0 / self.reciprocal_cauchy(z)
        return _scalar_like(out, _carr(z))

    def is_symmetric(self, tol=1e-9):
        if self.gamma != 0:
            return False
        if self.levy is None:
            return True
        return self.levy.is_symmetric(tol)

    def support(self):
        lo, hi = (-1.0, 1.0) if self.levy is None else self.levy.support()
        pad = 2.0 * np.sqrt(max(self.sigma_mass(), 1.0)) if np.isfinite(self.sigma_mass()) else 10.0
        return (min(lo, -1.0) - pad + self.gamma, max(hi, 1.0) + pad + self.gamma)

    def to_spec(self):
        parts = [f"gamma:{self.gamma:.17g}"]
        if self.cauchy_scale:
            parts.append(f"cauchy:{self.cauchy_scale:.17g}")
        if self.levy is not None:
            parts.append(f"levy: {self.levy.to_spec()}")
        return "square_id{" + ", ".join(parts) + "}"


class CallablePhiIDLaw(SquareIDLaw):
    """ID law specified directly by an analytic phi: C+ -> C- (plus boundary)."""

    def __init__(self, phi, phi_prime=None, label="callable_phi", validate=True):
        super().__init__(0.0, None, 0.0)
        self._phi = phi
        self._phi_prime = phi_prime
        self.label = label
        if validate:
            probes = np.array([0.3 + 0.7j, -1.1 + 0.4j, 2.2 + 1.5j, 0.05 + 3j])
            vals = np.asarray(phi(probes))
            if not np.all(np.isfinite(vals)):
                raise DomainError("phi not finite on probe grid")
            if np.any(vals.imag > 1e-9):
                warnings.warn("phi has positive imaginary part on probe points; "
                              "law may not be infinitely divisible")

    def phi(self, z):
        out = self._phi(_carr(z))
        return _scalar_like(np.asarray(out, dtype=np.complex128), z)

    def phi_prime(self, z):
        if self._phi_prime is not None:
            return self._phi_prime(z)
        z = _carr(z)
        h = 1e-7 * np.maximum(1.0, np.abs(z))
        out = (self._phi(z + h) - self._phi(z - h)) / (2 * h)
        return _scalar_like(out, z)

    def sigma_mass(self):
        # numeric: sigma(R) = lim_{y->inf} -y Im phi(iy)
        y = 1e8
        return float(-y * np.imag(self._phi(1j * y)))

    def sigma_parts(self):
        raise DomainError("callable phi law has no explicit Levy decomposition")

    def semigroup_power(self, t):
        if t < 0:
            raise DomainError("semigroup power must be nonnegative")
        return CallablePhiIDLaw(lambda z, f=self._phi: t * f(z),
                                None if self._phi_prime is None
                                else (lambda z, fp=self._phi_prime: t * fp(z)),
                                label=f"{self.label}^{t}", validate=False)

    def to_spec(self):
        raise DomainError("callable phi laws have no textual spec form")


class RectIDLaw(Measure):
    """Rectangular-convolution ID law with ratio lam, defined by a symmetric
    finite positive Levy measure G (and optional stable components) through

        C(z) = z * integral (1 + t^2) / (1 - z t^2) dG(t)
               + sum_j  -(t_j / sin(pi a_j / 2)) (-z)^(a_j / 2).
    """

    def __init__(self, levy=None, ratio=0.5, stable_terms=()):
        if not 0 < ratio <= 1:
            raise DomainError("ratio lambda must lie in (0, 1]")
        if levy is not None and not levy.is_symmetric(1e-9):
            raise DomainError("rectangular Levy measure must be symmetric")
        for a, t in stable_terms:
            if not 0 < a <= 2 or t <= 0:
                raise DomainError("invalid stable term")
        self.levy = levy
        self.ratio = float(ratio)
        self.stable_terms = tuple((float(a), float(t)) for a, t in stable_terms)

    @classmethod
    def from_measure(cls, m, ratio):
        """View a RectStable family value (or a Levy measure) as a RectIDLaw."""
        if isinstance(m, RectStable):
            if abs(m.ratio - ratio) > 1e-12:
                raise DomainError("ratio mismatch")
            return cls(None, ratio, ((m.alpha, m.t),))
        if isinstance(m, cls):
            return m
        raise DomainError(f"cannot interpret {type(m).__name__} as a rectangular ID law")

    def _stable_c(self, z, deriv=False):
        z = _carr(z)
        out = np.zeros(z.shape, dtype=np.complex128)
        for a, t in self.stable_terms:
            if a == 2.0:
                out = out + (t if not deriv else 0.0) * (z if not deriv else 1.0)
                if deriv:
                    out = out + t
                continue
            p = a / 2.0
            coef = t / np.sin(np.pi * a / 2.0)
            if not deriv:
                out = out - coef * (-z) ** p
            else:
                out = out + coef * p * (-z) ** (p - 1.0)
        return out

    def c_transform(self, z):
        z = _carr(z)
        out = self._stable_c(z)
        lv = self.levy
        if isinstance(lv, AtomicMeasure):
            t2 = lv.positions ** 2
            m = lv.masses
            out = out + np.sum(m * (1.0 + t2) / (1.0 - z[..., None] * t2), axis=-1) * z
        elif isinstance(lv, GridDensityMeasure):
            # C(z) = G_tau(1/z), tau = push-forward of (1+t^2) dG(t) under t -> t^2
            out = out + self._levy_tau().cauchy(1.0 / z)
        elif lv is not None:
            raise DomainError("Levy measure must be atomic or a grid density")
        return _scalar_like(out, z)

    def c_prime(self, z):
        z = _carr(z)
        out = self._stable_c(z, deriv=True)
        lv = self.levy
        if isinstance(lv, AtomicMeasure):
            t2 = lv.positions ** 2
            m = lv.masses
            out = out + np.sum(m * (1.0 + t2) / (1.0 - z[..., None] * t2) ** 2, axis=-1)
        elif isinstance(lv, GridDensityMeasure):
            out = out - self._levy_tau().cauchy_prime(1.0 / z) / z**2
        return _scalar_like(out, z)

    def _levy_tau(self):
        if getattr(self, "_tau_cache", None) is None:
            lv = self.levy
            pos = lv.grid > 0
            s = lv.grid[pos] ** 2
            rho_s = (1.0 + s) * lv.values[pos] / np.sqrt(s)
            order = np.argsort(s)
            self._tau_cache = GridDensityMeasure(
                s[order], rho_s[order], atom_at_zero=lv.atom_at_zero, expected_total=None
            )
        return self._tau_cache

    def total_levy_mass(self):
        total = self.levy.total_mass if self.levy is not None else 0.0
        for a, t in self.stable_terms:
            if a < 2.0:
                total += np.inf if a <= 0 else _stable_levy_mass(a, t)
            else:
                total += t
        return total

    def c_limit_minus_inf(self, ladder=None):
        """Ladder estimate of lim_{w -> -inf} C(w); (value, converged)."""
        ks = ladder if ladder is not None else [2, 3, 4, 5, 6, 7, 8]
        vals = np.array([complex(self.c_transform(-10.0**k)).real for k in ks])
        conv = abs(vals[-1] - vals[-2]) <= 1e-4 * max(1.0, abs(vals[-1]))
        return float(vals[-1]), bool(conv), vals

    def mass_at_zero(self):
        L, conv, _ = self.c_limit_minus_inf()
        if conv and -1.0 < L <= 1e-9:
            return 1.0 + min(L, 0.0)
        return 0.0

    def semigroup_power(self, t):
        if t < 0:
            raise DomainError("semigroup power must be nonnegative")
        lv = None
        if self.levy is not None and t > 0:
            if isinstance(self.levy, AtomicMeasure):
                lv = AtomicMeasure([(p, m * t) for p, m in self.levy.atoms()],
                                   require_probability=False)
            else:
                lv = GridDensityMeasure(self.levy.grid, self.levy.values * t,
                                        atom_at_zero=min(self.levy.atom_at_zero * t, 1 - 1e-15),
                                        expected_total=None)
        return RectIDLaw(lv, self.ratio, tuple((a, s * t) for a, s in self.stable_terms))

    def is_symmetric(self, tol=1e-9):
        return True

    def cauchy(self, z):
        from . import rect
        return rect.rect_id_cauchy(self, z)

    def support(self):
        sup = 1.0
        if self.levy is not None:
            lo, hi = self.levy.support()
            sup = max(sup, abs(lo), abs(hi))
        for a, t in self.stable_terms:
            sup = max(sup, 60.0 * t)
        return -4.0 * sup, 4.0 * sup

    def to_spec(self):
        if self.stable_terms and self.levy is None and len(self.stable_terms) == 1:
            a, t = self.stable_terms[0]
            return f"rect_stable{{alpha:{a:.17g}, t:{t:.17g}, lambda:{self.ratio:.17g}}}"
        if self.levy is None:
            raise DomainError("mixed rectangular laws have no single spec form")
        return f"rect_id{{lambda:{self.ratio:.17g}, levy: {self.levy.to_spec()}}}"


def _stable_levy_mass(alpha, t):
    # mass of (t/pi) |x|^(1-alpha) / (1+x^2) dx over R
    x = np.tan(np.linspace(1e-6, np.pi / 2 - 1e-6, 20001))
    integ = x ** (1.0 - alpha) / (1.0 + x**2)
    return 2.0 * t / np.pi * float(np.trapezoid(integ, x))


class TransformDefinedMeasure(Measure):
    """Measure specified by an expression for F (reciprocal Cauchy transform)
    or for G directly.  The expression object must expose ``eval(z)``."""

    def __init__(self, which, expr, text="", validate=True):
        if which not in ("F", "G"):
            raise DomainError("which must be 'F' or 'G'")
        self.which = which
        self.expr = expr
        self.text = text
        if validate:
            self._validate()

    def _validate(self):
        probes = np.array([0.1 + 0.2j, -0.7 + 0.9j, 1.3 + 0.05j, -2.0 + 2.0j, 0.0 + 1.0j])
        vals = np.asarray(self.expr.eval(probes))
        if not np.all(np.isfinite(vals)):
            raise DomainError("transform expression not finite on probe grid")
        if self.which == "F":
            y = 1e6
            slope = complex(self.expr.eval(np.array([1j * y]))[0]) / (1j * y)
            if abs(slope - 1.0) > 1e-3:
                raise DomainError(
                    f"F(iy)/iy = {slope:.6f} at y=1e6; not a reciprocal Cauchy "
                    "transform (Nevanlinna slope must be 1)"
                )
            if np.any(vals.imag < -1e-9):
                warnings.warn("Im F < 0 at some probe points in the upper half-plane")

    def F(self, z):
        z = _carr(z)
        if self.which == "F":
            out = np.asarray(self.expr.eval(z), dtype=np.complex128)
        else:
            out = 1.0 / np.asarray(self.expr.eval(z), dtype=np.complex128)
        return _scalar_like(out, z)

    def cauchy(self, z):
        z = _carr(z)
        if self.which == "G":
            out = np.asarray(self.expr.eval(z), dtype=np.complex128)
        else:
            out = 1.0 / np.asarray(self.expr.eval(z), dtype=np.complex128)
        return _scalar_like(out, z)

    def is_symmetric(self, tol=1e-9):
        probes = np.array([0.37 + 0.41j, 1.9 + 0.23j, 0.08 + 1.7j])
        g = np.asarray(self.cauchy(probes))
        g2 = np.asarray(self.cauchy(-np.conj(probes)))
        return bool(np.allclose(g2, -np.conj(g), atol=tol))

    def inv_square_moment(self):
        """Through the pole of F at the origin: when F(z) ~ -rho0/z with
        rho0 > 0 (and the odd inverse moment vanishes), the inverse-square
        moment equals 1/rho0; without such a pole the boundary density at 0
        decides between a finite numeric value and infinity."""
        ys = np.geomspace(1e-3, 1e-7, 5)
        vals = np.array([complex(1j * y * self.F(1j * y)) for y in ys])
        rho0 = -vals.real[-1]
        if abs(vals[-1] - vals[-2]) < 1e-4 and rho0 > 1e-9:
            return 1.0 / rho0
        g0 = complex(self.cauchy(1e-7j))
        if abs(g0.imag) > 1e-6:       # positive density at the origin
            return np.inf
        raise DomainError("inverse-square moment not identifiable from the "
                          "transform's behaviour at the origin")

    def support(self):
        return -50.0, 50.0

    def to_spec(self):
        return f'transform{{which:"{self.which}", expr:"{self.text}"}}'


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def cauchy_transform(m, z):
    """G_m(z); maps the upper half-plane into the lower one."""
    return m.cauchy(z)


def reciprocal_cauchy(m, z):
    """F_m(z) = 1 / G_m(z); maps the upper half-plane into itself."""
    return m.reciprocal_cauchy(z)


def psi_transform(m, z):
    """psi_m(z) = integral z t / (1 - z t) dm(t) = G_m(1/z)/z - 1 (z != 0)."""
    z = _carr(z)
    if np.any(z == 0):
        if np.ndim(z) == 0:
            return 0.0 + 0.0j
        out = np.empty(z.shape, dtype=np.complex128)
        zero = z == 0
        out[zero] = 0.0
        out[~zero] = psi_transform(m, z[~zero])
        return out
    out = m.cauchy(1.0 / z) / z - 1.0
    return _scalar_like(out, z)


def push_forward_square(m, n_grid=4001):
    """Image of a symmetric measure under t -> t^2 (a measure on [0, inf))."""
    if not m.is_symmetric(1e-9):
        raise DomainError("push_forward_square requires a symmetric measure")
    if isinstance(m, AtomicMeasure):
        acc = {}
        for p, w in m.atoms():
            acc[p * p] = acc.get(p * p, 0.0) + w
        return AtomicMeasure(acc.items(), require_probability=False) \
            if abs(sum(acc.values()) - 1) > ATOM_SUM_TOL else AtomicMeasure(acc.items())
    if isinstance(m, Semicircle):
        return MarchenkoPastur(1.0, m.variance)
    if isinstance(m, RectStable) and m.alpha == 2.0:
        return MarchenkoPastur(m.ratio, m.t)
    lo, hi = m.support()
    r = max(abs(lo), abs(hi))
    x = np.linspace(0.0, r, n_grid)[1:]
    u = x**2
    dens_u = m.density(x) / x          # symmetric halves combine: rho(sqrt u)/sqrt u
    atom0 = m.mass_at(0.0)
    return GridDensityMeasure(u, dens_u, atom_at_zero=atom0,
                              expected_total=m.total_mass, normalize=True)


def symmetric_sqrt(m, n_grid=4001):
    """Symmetric measure whose push-forward under t -> t^2 is m."""
    lo, _ = m.support()
    if lo < -1e-12:
        raise DomainError("symmetric_sqrt requires a measure supported on [0, inf)")
    if isinstance(m, AtomicMeasure):
        out = []
        for p, w in m.atoms():
            if p == 0:
                out.append((0.0, w))
            else:
                out.append((np.sqrt(p), w / 2))
                out.append((-np.sqrt(p), w / 2))
        return AtomicMeasure(out, require_probability=abs(m.total_mass - 1) <= ATOM_SUM_TOL)
    if isinstance(m, MarchenkoPastur):
        if m.ratio == 1.0:
            return Semicircle(m.scale)
        return RectStable(2.0, m.scale, m.ratio)
    _, hi = m.support()
    x = np.linspace(0.0, np.sqrt(hi), n_grid)[1:]
    dens_x = x * m.density(x**2)
    grid = np.concatenate([-x[::-1], x])
    vals = np.concatenate([dens_x[::-1], dens_x])
    return GridDensityMeasure(grid, vals, atom_at_zero=m.mass_at(0.0),
                              expected_total=m.total_mass, normalize=True)


def as_square_id(m):
    """Interpret a measure as an additive-convolution ID law, if known to be one."""
    if isinstance(m, SquareIDLaw):
        return m
    if isinstance(m, Semicircle):
        return SquareIDLaw(0.0, AtomicMeasure([(0.0, m.variance)], require_probability=False))
    if isinstance(m, CauchyLaw):
        return SquareIDLaw(0.0, None, cauchy_scale=m.t)
    if isinstance(m, FreePoisson):
        # phi(z) = shift + s k + k s^2 / (z - s): sigma = k s^2 at s
        s, k = m.scale, m.rate
        g_mass = k * s**2 / (1.0 + s**2)
        gamma = m.shift + s * k - s * g_mass
        return SquareIDLaw(gamma, AtomicMeasure([(s, g_mass)], require_probability=False))
    if isinstance(m, AtomicMeasure) and len(m.atoms()) == 1:
        return SquareIDLaw(m.atoms()[0][0], None)
    raise DomainError(f"{type(m).__name__} is not a known ID law; supply a SquareIDLaw")


# ---------------------------------------------------------------------------
# comparison
# ---------------------------------------------------------------------------

def wasserstein1(m1, m2, grid=None, n=4001):
    """W1 distance as the integral of |CDF1 - CDF2| on a canonical grid."""
    if grid is None:
        lo1, hi1 = m1.support()
        lo2, hi2 = m2.support()
        lo, hi = min(lo1, lo2), max(hi1, hi2)
        pad = 0.05 * (hi - lo)
        grid = np.linspace(lo - pad, hi + pad, n)
    d = np.abs(m1.cdf(grid) - m2.cdf(grid))
    return float(np.trapezoid(d, grid))


def measures_close(m1, m2, tol=1e-6, grid=None):
    return wasserstein1(m1, m2, grid=grid) < tol
