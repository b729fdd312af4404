"""Branch-correct elementary functions.

Two square roots coexist in the transform formulas:

* ``sqrt_upper`` cuts along the positive half-line.  Writing
  ``z = r exp(i theta)`` with ``theta in [0, 2pi)`` it returns
  ``sqrt(r) exp(i theta/2)``, so the image is the closed upper half-plane
  and ``sqrt_upper(-1) == 1j``.
* ``sqrt_principal`` cuts along the negative half-line and fixes the
  positive half-line (``sqrt_principal(1) == 1``).

Every multi-valued evaluation in the package goes through one of these
(or through explicit root tracking in the solvers); there is no silent
branch choice.
"""

import enum

import numpy as np

from .errors import BranchCutError

__all__ = [
    "Branch",
    "csqrt",
    "sqrt_upper",
    "sqrt_principal",
    "T",
    "U",
    "V",
    "u_branch_point",
]

#: Half-width of the guard band around a cut, relative to |z|.
CUT_GUARD = 1e-10


class Branch(enum.Enum):
    UPPER_CUT = "upper_cut"      # theta in [0, 2pi), cut on [0, +inf)
    PRINCIPAL = "principal"      # theta in (-pi, pi), cut on (-inf, 0)


def _as_complex(z):
    return np.asarray(z, dtype=np.complex128)


def _on_positive_cut(z):
    return (np.abs(z.imag) <= CUT_GUARD * np.maximum(1.0, np.abs(z))) & (z.real > 0)


def _on_negative_cut(z):
    return (np.abs(z.imag) <= CUT_GUARD * np.maximum(1.0, np.abs(z))) & (z.real < 0)


def sqrt_upper(z):
    """Square root with cut on [0, +inf); maps into the closed upper half-plane.

    Raises BranchCutError for arguments on (or within 1e-10 of) the cut.
    """
    za = _as_complex(z)
    if np.any(_on_positive_cut(za)):
        raise BranchCutError("sqrt_upper evaluated on its cut [0, +inf)")
    theta = np.mod(np.angle(za), 2.0 * np.pi)
    out = np.sqrt(np.abs(za)) * np.exp(0.5j * theta)
    out = np.where(za == 0, 0.0 + 0.0j, out)
    return out if np.ndim(z) else complex(out)


def sqrt_upper_unchecked(z):
    """As sqrt_upper, but boundary points on [0, inf) take the limit from
    above (continuous extension) instead of raising.  Solver-internal."""
    za = _as_complex(z)
    theta = np.mod(np.angle(za), 2.0 * np.pi)
    out = np.sqrt(np.abs(za)) * np.exp(0.5j * theta)
    return out if np.ndim(z) else complex(out)


def sqrt_principal(z, guard=True):
    """Principal square root (cut on the negative half-line, 1**0.5 == 1)."""
    za = _as_complex(z)
    if guard and np.any(_on_negative_cut(za)):
        raise BranchCutError("sqrt_principal evaluated on its cut (-inf, 0)")
    out = np.sqrt(za)
    return out if np.ndim(z) else complex(out)


def csqrt(z, branch):
    if branch is Branch.UPPER_CUT:
        return sqrt_upper(z)
    if branch is Branch.PRINCIPAL:
        return sqrt_principal(z)
    raise ValueError(f"unknown branch {branch!r}")


def T(z, lam):
    """T(z) = (lam*z + 1)(z + 1)."""
    nd = np.ndim(z)
    za = _as_complex(z)
    out = (lam * za + 1.0) * (za + 1.0)
    return out if nd else complex(out)


def u_branch_point(lam):
    """Branch point of U: the critical value -(1-lam)^2 / (4 lam) of T - 1."""
    if lam == 0:
        return -np.inf
    return -((1.0 + lam) ** 2) / (4.0 * lam)


def U(z, lam):
    """Inverse of T - 1 fixing 0; principal branch of the discriminant root.

    U(z) = (-lam - 1 + sqrt((lam+1)^2 + 4 lam z)) / (2 lam), and U(z) = z
    when lam == 0.  Arguments whose discriminant falls within 1e-10 of the
    principal cut raise BranchCutError: both one-sided limits are meaningful
    there and the caller must decide.
    """
    nd = np.ndim(z)
    za = _as_complex(z)
    if lam == 0:
        return za if nd else complex(za)
    disc = (lam + 1.0) ** 2 + 4.0 * lam * za
    if np.any(_on_negative_cut(disc)):
        raise BranchCutError("U evaluated on the image of its branch cut")
    out = (-lam - 1.0 + np.sqrt(disc)) / (2.0 * lam)
    return out if nd else complex(out)


def V(z, lam):
    """V(z) = U(z - 1) + 1 = (lam - 1 + sqrt((lam-1)^2 + 4 lam z)) / (2 lam).

    Solves h = lam*g^2 + (1-lam)*g for g near 1 when h is near 1; V(1) = 1.
    """
    nd = np.ndim(z)
    za = _as_complex(z)
    if lam == 0:
        return za if nd else complex(za)
    disc = (lam - 1.0) ** 2 + 4.0 * lam * za
    if np.any(_on_negative_cut(disc)):
        raise BranchCutError("V evaluated on the image of its branch cut")
    out = (lam - 1.0 + np.sqrt(disc)) / (2.0 * lam)
    return out if nd else complex(out)
