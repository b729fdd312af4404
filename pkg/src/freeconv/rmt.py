"""Monte Carlo ground truth from finite random matrices.

The square model draws A + U B U* with A, B diagonal samples of the two
measures and U Haar unitary; its eigenvalues approximate the additive free
convolution.  The rectangular model draws N x M matrices A + U B V with
Haar unitaries on both sides; the symmetrized singular values approximate
the rectangular convolution with ratio N/M.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "EmpiricalSpectrum",
    "haar_unitary",
    "square_model_spectrum",
    "rect_model_spectrum",
    "ks_distance",
]


@dataclass
class EmpiricalSpectrum:
    """Sorted pooled sample of eigenvalues or symmetrized singular values."""

    samples: np.ndarray
    n_matrices: int
    dims: tuple
    kind: str                       # "eigenvalues" | "singular-symmetrized"
    seed: int = None
    requested_ratio: float = None

    def __post_init__(self):
        self.samples = np.sort(np.asarray(self.samples, dtype=float))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.searchsorted(self.samples, x, side="right") / self.samples.size
        return out if out.ndim else float(out)

    def mass_near(self, center=0.0, tol=1e-9):
        return float(np.mean(np.abs(self.samples - center) <= tol))

    def mass_in(self, lo, hi):
        return float(np.mean((self.samples > lo) & (self.samples < hi)))

    def write_csv(self, path):
        np.savetxt(path, self.samples, header="sample", comments="")

    def summary(self, ks=None):
        out = {"n": int(self.samples.size), "n_matrices": self.n_matrices,
               "dims": list(self.dims), "kind": self.kind, "seed": self.seed}
        if self.requested_ratio is not None:
            realized = self.dims[0] / self.dims[1]
            out["ratio"] = self.requested_ratio
            out["ratio_drift"] = realized - self.requested_ratio
        if ks is not None:
            out["ks"] = float(ks)
        return out

    def write_summary(self, path, ks=None):
        with open(path, "w") as fh:
            json.dump(self.summary(ks), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _rng_of(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(n, seed=None):
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the
    R-diagonal phases normalized."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    rng = _rng_of(seed)
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q


def _trial_rngs(seed, trials):
    ss = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(trials)]


def _run_trials(fn, rngs, workers):
    """Trials are independent with private RNG streams; merging preserves
    the trial order, so the pooled result is seed-deterministic regardless
    of the worker count (LAPACK kernels release the GIL)."""
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, rngs))
    return [fn(rng) for rng in rngs]


def square_model_spectrum(muA, muB, N, trials=1, seed=0, workers=1):
    """Pooled eigenvalues of A + U B U* over independent trials."""
    if N < 1 or trials < 1:
        raise DomainError("N and trials must be >= 1")

    def one(rng):
        a = muA.sample(rng, N)
        b = muB.sample(rng, N)
        U = haar_unitary(N, rng)
        M = np.diag(a).astype(np.complex128) + (U * b) @ U.conj().T
        M = 0.5 * (M + M.conj().T)
        return np.linalg.eigvalsh(M)

    pooled = _run_trials(one, _trial_rngs(seed, trials), workers)
    return EmpiricalSpectrum(np.concatenate(pooled), trials, (N, N),
                             "eigenvalues", seed)


def rect_model_spectrum(muA, muB, N, lam=None, M=None, trials=1, seed=0,
                        workers=1):
    """Pooled symmetrized singular values of A + U B V (A, B diagonal N x M
    with |samples| of the symmetric inputs on the diagonal).

    M defaults to round(N / lam); the induced ratio drift is recorded on
    the returned spectrum's dims.
    """
    if M is None:
        if lam is None:
            raise DomainError("provide either M or lam")
        M = int(round(N / lam))
    if N > M:
        raise DomainError("requires N <= M")

    def one(rng):
        a = np.abs(muA.sample(rng, N))
        b = np.abs(muB.sample(rng, N))
        U = haar_unitary(N, rng)
        V = haar_unitary(M, rng)
        # D_B V has rows b_i * V[i, :]; U @ (D_B V) is N x M
        X = np.zeros((N, M), dtype=np.complex128)
        X[:, :N] = np.diag(a)
        X = X + U @ (b[:, None] * V[:N, :])
        sv = np.linalg.svd(X, compute_uv=False)
        return np.concatenate([sv, -sv])

    pooled = _run_trials(one, _trial_rngs(seed, trials), workers)
    return EmpiricalSpectrum(np.concatenate(pooled), trials, (N, M),
                             "singular-symmetrized", seed,
                             requested_ratio=lam)


def _target_cdf(target):
    if callable(target):
        return target
    if hasattr(target, "cdf"):
        return target.cdf
    raise DomainError("target must expose a cdf or be callable")


def ks_distance(spectrum, target):
    """sup |F_emp - F_target| over the pooled sample points."""
    cdf = _target_cdf(target)
    xs = spectrum.samples
    n = xs.size
    F = np.asarray(cdf(xs), dtype=float)
    upper = np.abs(np.arange(1, n + 1) / n - F)
    lower = np.abs(np.arange(0, n) / n - F)
    return float(max(upper.max(), lower.max()))
