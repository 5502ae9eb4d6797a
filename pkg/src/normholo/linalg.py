"""Dense numeric core: spectra, spans, projections, tolerant kernels.

All inner products are trace(A^T B); on symmetric matrices this is
trace(AB).  Every rank or kernel decision funnels through the Gram
route (eigendecomposition of M^T M) with the shared rank tolerance, so
thresholds behave consistently across modules.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInput
from .kernels import jacobi_eigh, matrix_exp as _expm_core


@dataclass(frozen=True)
class Tolerances:
    """Shared numeric thresholds.

    sym: allowed asymmetry before a matrix is rejected as "symmetric"
    eig: reconstruction tolerance for spectral decompositions
    rank: relative threshold for tolerant rank / kernel decisions
    cluster_gap: eigenvalues closer than this share a cluster
    """

    sym: float = 1e-10
    eig: float = 1e-9
    rank: float = 1e-8
    cluster_gap: float = 1e-6

    def with_cluster_gap(self, gap: float) -> "Tolerances":
        return replace(self, cluster_gap=gap)


DEFAULT_TOLS = Tolerances()


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues ascending, orthonormal eigenvector columns, clusters.

    clusters is a tuple of index tuples; consecutive eigenvalues whose
    gap is below the cluster threshold share a cluster.
    """

    values: np.ndarray
    vectors: np.ndarray
    clusters: tuple = ()

    def cluster_means(self) -> np.ndarray:
        return np.array([float(np.mean(self.values[list(c)]))
                         for c in self.clusters])

    def cluster_sizes(self) -> tuple:
        return tuple(len(c) for c in self.clusters)


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis columns of a subspace of R^ambient_dim."""

    ambient_dim: int
    basis: np.ndarray  # (ambient_dim, k)
    tol: float = DEFAULT_TOLS.rank

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ x)

    def coords(self, x: np.ndarray) -> np.ndarray:
        return self.basis.T @ x

    def contains(self, x: np.ndarray, tol: float | None = None) -> bool:
        t = self.tol if tol is None else tol
        res = x - self.project(x)
        return float(np.linalg.norm(res)) <= t * (1.0 + float(np.linalg.norm(x)))

    def complement_within(self, other: "Subspace") -> "Subspace":
        """Orthogonal complement of self inside other (self must sit in it)."""
        resid = other.basis - self.basis @ (self.basis.T @ other.basis)
        return orthonormal_span(resid.T, ambient_dim=self.ambient_dim,
                                tol=self.tol)


def check_symmetric(a: np.ndarray, tol: float = DEFAULT_TOLS.sym) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
    scale = 1.0 + float(np.linalg.norm(a))
    if float(np.linalg.norm(a - a.T)) > tol * scale:
        raise InvalidInput("matrix is not symmetric within tolerance")
    return 0.5 * (a + a.T)


def cluster_indices(values: np.ndarray, gap: float) -> tuple:
    """Group ascending values: a new cluster starts when the gap to the
    previous value exceeds the threshold."""
    if len(values) == 0:
        return ()
    clusters = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return tuple(tuple(c) for c in clusters)


def sym_eig(a: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> SpectralDecomposition:
    """Spectral decomposition of a symmetric matrix via cyclic Jacobi."""
    a = check_symmetric(a, tols.sym)
    w, v = jacobi_eigh(a)
    clusters = cluster_indices(w, tols.cluster_gap)
    w.flags.writeable = False
    v.flags.writeable = False
    return SpectralDecomposition(values=w, vectors=v, clusters=clusters)


def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix commutator [x, y] = xy - yx."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise InvalidInput("bracket needs two square matrices of equal size")
    return x @ y - y @ x

def matrix_exp(x: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaled Taylor, exact identity at zero)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise InvalidInput("matrix_exp needs a square matrix")
    return _expm_core(x)


def orthonormal_span(vectors, ambient_dim: int | None = None,
                     tol: float = DEFAULT_TOLS.rank) -> Subspace:
    """Orthonormal span of a list of vectors.

    Modified Gram-Schmidt with one re-orthogonalization pass; a vector is
    accepted only if its residual exceeds tol * (1 + original norm), so
    the result is deterministic for a fixed input order.
    """
    vecs = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if ambient_dim is None:
        if not vecs:
            raise InvalidInput("cannot infer ambient dimension of empty span")
        ambient_dim = vecs[0].size
    basis = []
    for v in vecs:
        if v.size != ambient_dim:
            raise InvalidInput("span vectors have inconsistent sizes")
        orig = float(np.linalg.norm(v))
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w = w - (b @ w) * b
        nrm = float(np.linalg.norm(w))
        if nrm > tol * (1.0 + orig):
            basis.append(w / nrm)
    mat = np.column_stack(basis) if basis else np.zeros((ambient_dim, 0))
    mat.flags.writeable = False
    return Subspace(ambient_dim=ambient_dim, basis=mat, tol=tol)


def extend_span(space: Subspace, vectors) -> Subspace:
    """Grow a span by extra vectors (same acceptance rule)."""
    cols = [space.basis[:, j] for j in range(space.dim)]
    cols.extend(np.asarray(v, dtype=float).ravel() for v in vectors)
    return orthonormal_span(cols, ambient_dim=space.ambient_dim, tol=space.tol)


def project_onto(space: Subspace, x: np.ndarray) -> np.ndarray:
    return space.project(np.asarray(x, dtype=float).ravel())


def gram_kernel(mat: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> Subspace:
    """Kernel of a linear map given as rows-act matrix (m, n).

    Works on the Gram operator M^T M; eigenvectors below
    rank_tol * (largest eigenvalue + 1) span the kernel.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2:
        raise InvalidInput("gram_kernel expects a 2-d matrix")
    n = mat.shape[1]
    gram = mat.T @ mat
    w, v = jacobi_eigh(gram)
    top = float(w[-1]) if len(w) else 0.0
    thresh = tols.rank * (top + 1.0)
    cols = v[:, w <= thresh]
    cols = np.ascontiguousarray(cols)
    cols.flags.writeable = False
    return Subspace(ambient_dim=n, basis=cols, tol=tols.rank)


def tolerant_rank(mat: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> int:
    mat = np.asarray(mat, dtype=float)
    n = mat.shape[1]
    return n - gram_kernel(mat, tols).dim


def mgs_qr(a: np.ndarray, tol: float = DEFAULT_TOLS.rank):
    """Thin QR by modified Gram-Schmidt with re-orthogonalization.

    Returns (q, r, accepted) where accepted lists the column indices that
    survived the rank test; r is square over the accepted columns.
    """
    a = np.asarray(a, dtype=float)
    m, n = a.shape
    qcols = []
    rcols = []
    accepted = []
    for j in range(n):
        v = a[:, j].copy()
        orig = float(np.linalg.norm(v))
        coef = np.zeros(len(qcols))
        for _ in range(2):
            for i, q in enumerate(qcols):
                c = float(q @ v)
                coef[i] += c
                v = v - c * q
        nrm = float(np.linalg.norm(v))
        if nrm > tol * (1.0 + orig):
            qcols.append(v / nrm)
            rcols.append(np.append(coef, nrm))
            accepted.append(j)
    k = len(qcols)
    q = np.column_stack(qcols) if k else np.zeros((m, 0))
    r = np.zeros((k, k))
    for col, coef in enumerate(rcols):
        r[: len(coef), col] = coef
    return q, r, accepted


def subspace_distance(a: Subspace, b: Subspace) -> float:
    """Spectral-norm distance between orthogonal projectors."""
    if a.ambient_dim != b.ambient_dim:
        raise InvalidInput("subspaces live in different ambient spaces")
    pa = a.basis @ a.basis.T
    pb = b.basis @ b.basis.T
    diff = pa - pb
    w, _ = jacobi_eigh(diff.T @ diff)
    return float(np.sqrt(max(0.0, float(w[-1]))))


def principal_angle_max(a: Subspace, b: Subspace) -> float:
    """Largest principal angle between equal-dimension subspaces (radians)."""
    if a.dim == 0 or b.dim == 0:
        return 0.0
    m = a.basis.T @ b.basis
    w, _ = jacobi_eigh(m.T @ m)
    smin = np.sqrt(max(0.0, float(w[0])))
    smin = min(1.0, smin)
    return float(np.arccos(smin))


def orthogonal_log(t: np.ndarray, terms: int = 24) -> np.ndarray:
    """Principal log of an orthogonal matrix close to the identity.

    Series in e = t - id; callers keep ||e|| well below 1, where 24
    terms are far past machine precision.
    """
    t = np.asarray(t, dtype=float)
    n = t.shape[0]
    e = t - np.eye(n)
    if float(np.linalg.norm(e)) > 0.7:
        raise InvalidInput("orthogonal_log expects a near-identity matrix")
    out = np.zeros_like(e)
    power = np.eye(n)
    for k in range(1, terms + 1):
        power = power @ e
        out += ((-1.0) ** (k + 1) / k) * power
    return 0.5 * (out - out.T)


def polar_orthogonalize(t: np.ndarray, sweeps: int = 12) -> np.ndarray:
    """Nearest orthogonal matrix via Newton iteration for the polar factor."""
    q = np.asarray(t, dtype=float).copy()
    for _ in range(sweeps):
        qi = np.linalg.inv(q)
        q_next = 0.5 * (q + qi.T)
        if float(np.linalg.norm(q_next - q)) < 1e-15:
            q = q_next
            break
        q = q_next
    return q
