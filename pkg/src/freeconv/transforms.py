"""Named transforms of the rectangular chain, branch-correct.

The chain runs G -> H -> C through the square roots with the two cuts:
H uses the root cut along [0, +inf) (so 1/sqrt(z) lands in the lower
half-plane, where G of a symmetric measure behaves), while U and V use the
principal root.  See branchcuts for the conventions.
"""

import numpy as np

from .branchcuts import T, U, V, sqrt_principal, sqrt_upper, sqrt_upper_unchecked
from .errors import DomainError
from .measures import as_square_id, psi_transform, push_forward_square

__all__ = [
    "T", "U", "V", "sqrt_upper", "sqrt_principal",
    "H_transform", "M_transform",
    "phi_voiculescu_ID", "C_transform_ID", "C_from_square_phi",
    "limit_along_ladder", "h_mass_limit",
]


def _require_symmetric(m):
    if not m.is_symmetric(1e-9):
        raise DomainError("this transform is defined for symmetric measures")


def H_transform(m, lam, z):
    """H(z) = lam G(1/sqrt z)^2 + (1 - lam) sqrt(z) G(1/sqrt z)."""
    _require_symmetric(m)
    z = np.asarray(z, dtype=np.complex128)
    s = sqrt_upper_unchecked(z)
    G = np.asarray(m.cauchy(1.0 / s), dtype=np.complex128)
    out = lam * G**2 + (1.0 - lam) * s * G
    return out if out.ndim else complex(out)


def M_transform(m, z):
    """M(z) = psi(sqrt z) = (1/sqrt z) G(1/sqrt z) - 1; H = z T(M)."""
    _require_symmetric(m)
    z = np.asarray(z, dtype=np.complex128)
    s = sqrt_upper_unchecked(z)
    out = np.asarray(psi_transform(m, s), dtype=np.complex128)
    return out if out.ndim else complex(out)


def phi_voiculescu_ID(law, z):
    """The additive transform of an ID law on the closed upper half-plane."""
    return as_square_id(law).phi(z)


def C_transform_ID(law, z):
    """The rectangular transform of a rectangular ID law on C \\ [0, inf)."""
    return law.c_transform(z)


def _phi_reflected(law, u):
    """phi extended to the lower half-plane by conjugation symmetry."""
    u = np.asarray(u, dtype=np.complex128)
    lower = u.imag < 0
    uin = np.where(lower, np.conj(u), u)
    vals = np.asarray(law.phi(uin), dtype=np.complex128)
    return np.where(lower, np.conj(vals), vals)


def C_from_square_phi(m, z, lam):
    """The edge-ratio reductions of the rectangular transform:
    C(z) = sqrt(z) phi(1/sqrt z) at lam = 1 and C(z) = z phi_rho(z) at
    lam = 0, with rho the push-forward of m under t -> t^2."""
    z = np.asarray(z, dtype=np.complex128)
    if lam == 1:
        _require_symmetric(m)
        law = as_square_id(m)
        s = sqrt_upper_unchecked(z)
        out = s * _phi_reflected(law, 1.0 / s)
        return out if out.ndim else complex(out)
    if lam == 0:
        _require_symmetric(m)
        rho = as_square_id(push_forward_square(m))
        out = z * _phi_reflected(rho, z)
        return out if out.ndim else complex(out)
    raise DomainError("reduction formulas exist only for lam in {0, 1}")


def limit_along_ladder(f, points, richardson=True):
    """Estimate lim f along a geometric ladder of points.

    Returns (value, indicator) where the indicator is the spread of the
    last extrapolants (smaller is more converged).
    """
    pts = np.asarray(points)
    vals = np.asarray([complex(f(p)) for p in pts])
    if not richardson or len(vals) < 3:
        return complex(vals[-1]), float(abs(vals[-1] - vals[-2]))
    ratio = abs(pts[1] / pts[0]) if abs(pts[0]) > abs(pts[1]) else abs(pts[0] / pts[1])
    # linear elimination in the small parameter (1/|p| or |p|)
    r1 = (vals[1:] - ratio * vals[:-1]) / (1.0 - ratio)
    return complex(r1[-1]), float(abs(r1[-1] - r1[-2]))


def h_mass_limit(m, lam, exponents=(2, 3, 4, 5, 6, 7, 8)):
    """lim_{x -> -inf} H(x)/x, which equals lam m({0})^2 + (1-lam) m({0})."""
    def f(k):
        x = -10.0 ** k
        return H_transform(m, lam, x) / x
    vals = [complex(f(k)).real for k in exponents]
    return vals[-1], abs(vals[-1] - vals[-2])
