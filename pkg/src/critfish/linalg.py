"""Dense real-symmetric linear algebra.

Every operator in this package has real matrix elements in its chosen
basis, so matrices are plain float64 ndarrays, symmetry is enforced
exactly at construction and no complex arithmetic appears anywhere.
Functions are pure and outputs never alias inputs, which makes all of
this safe to call from parallel sweep workers.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimMismatch, InvalidMatrix, NotPSD

# negative eigenvalues above -PSD_CLAMP_RTOL * ||M|| count as roundoff
PSD_CLAMP_RTOL = 1e-10


def symmetrize(entries):
    """Return the exactly symmetric part (A + A.T) / 2 of a square matrix.

    Raises InvalidMatrix for non-square shapes or non-finite entries.
    """
    a = np.array(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a real symmetric matrix.

    eigenvalues are ascending; eigenvectors[:, k] is the orthonormal
    eigenvector of eigenvalues[k], with the largest-magnitude component
    of each column made positive so repeated runs give identical output.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return int(self.eigenvalues.shape[0])


def eigh(matrix):
    """Full eigendecomposition of a symmetric matrix with fixed signs."""
    m = symmetrize(matrix)
    vals, vecs = scipy.linalg.eigh(m)
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[lead, np.arange(vecs.shape[1])])
    signs[signs == 0.0] = 1.0
    vecs = vecs * signs
    vals.flags.writeable = False
    vecs.flags.writeable = False
    return Spectrum(eigenvalues=vals, eigenvectors=vecs)


def psd_sqrt(matrix):
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-1e-10 * ||M||, 0) are clamped to zero; Gibbs-state
    inputs are PSD analytically, so anything in that band is roundoff.
    More negative input raises NotPSD.
    """
    spec = eigh(matrix)
    vals = spec.eigenvalues
    scale = float(np.max(np.abs(vals)))
    floor = -PSD_CLAMP_RTOL * scale
    if vals[0] < floor:
        raise NotPSD(f"eigenvalue {vals[0]:.6e} below roundoff floor {floor:.6e}")
    roots = np.sqrt(np.clip(vals, 0.0, None))
    v = spec.eigenvectors
    return symmetrize((v * roots) @ v.T)


def fidelity(rho, sigma):
    """Uhlmann fidelity of two density matrices, clamped to [0, 1].

    Equals [tr sqrt(sqrt(rho) sigma sqrt(rho))]^2, evaluated as the
    squared nuclear norm of sqrt(rho) @ sqrt(sigma) -- the same value
    with one nested root fewer, which behaves better for nearly equal
    states.  Symmetric in its arguments to ~1e-10.
    """
    r = np.asarray(rho, dtype=float)
    s = np.asarray(sigma, dtype=float)
    if r.shape != s.shape:
        raise DimMismatch(f"density-matrix shapes differ: {r.shape} vs {s.shape}")
    for m in (r, s):
        tr = float(np.trace(m))
        if abs(tr - 1.0) > 1e-9:
            raise InvalidMatrix(f"density matrix trace {tr!r} is not 1")
    singulars = scipy.linalg.svdvals(psd_sqrt(r) @ psd_sqrt(s))
    value = float(np.sum(singulars)) ** 2
    return min(max(value, 0.0), 1.0)


def validate_density_matrix(rho, trace_tol=1e-12, eig_floor=1e-12):
    """Check symmetry, unit trace and numerical positivity; raise if not."""
    r = np.asarray(rho, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise InvalidMatrix("density matrix has non-finite entries")
    if abs(float(np.trace(r)) - 1.0) > trace_tol:
        raise InvalidMatrix(f"trace {float(np.trace(r))!r} not within {trace_tol} of 1")
    lowest = float(scipy.linalg.eigvalsh(symmetrize(r))[0])
    if lowest < -eig_floor:
        raise NotPSD(f"minimum eigenvalue {lowest:.6e} below -{eig_floor}")
