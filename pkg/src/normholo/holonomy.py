"""Adapted normal curvature and the restricted normal holonomy algebra.

Everything here works in coordinates of the orthonormal normal frame at
the orbit base point.  The curvature endomorphisms come from the
commutator-trace formula on shape operators; their bracket closure is
the holonomy algebra; verdicts (fixed set, invariant factors, per-factor
transitivity, the factor-count bound) are assembled on top.  The loop
probe at the bottom is the independent cross-check: it derives holonomy
elements from honest parallel transport around small closed loops and
compares their logs against the curvature-generated algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NotApplicable
from .liealg import (LieAlgebraSpan, RepDecomposition, TransitivityResult,
                     bracket_closure, invariant_decomposition,
                     is_transitive_on_sphere, skew_span)
from .linalg import (DEFAULT_TOLS, Subspace, Tolerances, matrix_exp,
                     orthogonal_log, polar_orthogonalize, tolerant_rank)
from .orbit import (OrbitSubmanifold, homothecy_test, shape_operator,
                    shape_operators)
from .srep import CartanCurvature, slice_rep_image
from .transport import closed_square_loop, transport_frame_return

LOOP_PROBE_STEP = 2.5e-4


@dataclass(frozen=True)
class AdaptedCurvature:
    """Normal curvature tensor over an orthonormal frame of nu_v.

    tensor[a, b, c, d] = -trace([A_a, A_b] [A_c, A_d]) where A_k is the
    shape operator of the k-th frame vector.  Skew in (a,b) and (c,d),
    symmetric under pair swap, and first-Bianchi to round-off.
    """

    frame: np.ndarray     # (K, R, R)
    tensor: np.ndarray    # (K, K, K, K)

    @property
    def normal_dim(self) -> int:
        return self.tensor.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensor))

    def endomorphism(self, a: int, b: int) -> np.ndarray:
        """Matrix of the curvature operator of the frame pair (a, b)."""
        return self.tensor[a, b].T

    def endomorphisms(self) -> np.ndarray:
        """All pair endomorphisms, (K(K-1)/2, K, K), pairs a < b."""
        k = self.normal_dim
        out = [self.tensor[a, b].T for a in range(k) for b in range(a + 1, k)]
        if not out:
            return np.zeros((0, k, k))
        return np.stack(out)

    def symmetry_residuals(self) -> dict:
        t = self.tensor
        return {
            "skew_first_pair": float(np.linalg.norm(t + t.transpose(1, 0, 2, 3))),
            "skew_second_pair": float(np.linalg.norm(t + t.transpose(0, 1, 3, 2))),
            "pair_symmetry": float(np.linalg.norm(t - t.transpose(2, 3, 0, 1))),
            "first_bianchi": float(np.linalg.norm(
                t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3))),
        }


def adapted_curvature(M: OrbitSubmanifold,
                      check_tol: float = 1e-9) -> AdaptedCurvature:
    """Curvature tensor of the normal connection over the nu_v frame."""
    ops = shape_operators(M)
    coms = np.einsum("aij,bjk->abik", ops, ops)
    coms = coms - coms.transpose(1, 0, 2, 3)
    tensor = -np.einsum("abij,cdji->abcd", coms, coms)
    result = AdaptedCurvature(frame=M.normal_frame, tensor=tensor)
    worst = max(result.symmetry_residuals().values())
    scale = 1.0 + result.norm()
    if worst > check_tol * scale:
        raise InvalidInput(
            f"curvature symmetry residual {worst:.2e} exceeds tolerance; "
            "shape operators are inconsistent")
    return result


def holonomy_algebra(M: OrbitSubmanifold, cap: int | None = None,
                     tols: Tolerances = DEFAULT_TOLS) -> LieAlgebraSpan:
    """Bracket closure of the curvature endomorphisms on nu_v coords."""
    curv = adapted_curvature(M)
    endos = curv.endomorphisms()
    scale = max(1.0, curv.norm())
    keep = [e for e in endos if np.linalg.norm(e) > tols.rank * scale]
    if not keep:
        return LieAlgebraSpan(acting_dim=curv.normal_dim, basis=(),
                              closed=True)
    span = skew_span(keep, acting_dim=curv.normal_dim, tol=tols.rank)
    return bracket_closure(span, cap=cap, tol=tols.rank)


def position_fixed_residual(M: OrbitSubmanifold,
                            algebra: LieAlgebraSpan) -> float:
    """Max norm of algebra elements applied to the position direction."""
    vc = M.normal_coords(M.point)
    if algebra.dim == 0:
        return 0.0
    return float(max(np.linalg.norm(x @ vc) for x in algebra.basis))


def fiber_orbit_dimension(algebra: LieAlgebraSpan, xi_coords: np.ndarray,
                          tols: Tolerances = DEFAULT_TOLS) -> int:
    """Dimension of the algebra orbit through a normal coordinate vector."""
    xi_coords = np.asarray(xi_coords, dtype=np.float64)
    if algebra.dim == 0:
        return 0
    img = np.column_stack([x @ xi_coords for x in algebra.basis])
    return tolerant_rank(img, tols)


def symmetric_system_residual(curv: AdaptedCurvature,
                              algebra: LieAlgebraSpan, samples: int = 6,
                              seed: int = 0) -> float:
    """Invariance defect of the curvature tensor under sampled holonomy.

    Pulls the tensor back through h = exp(Lambda) for random unit
    algebra elements and reports the max relative change.
    """
    if algebra.dim == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    t = curv.tensor
    scale = max(np.linalg.norm(t), 1e-30)
    worst = 0.0
    for _ in range(samples):
        c = rng.standard_normal(algebra.dim)
        c /= np.linalg.norm(c)
        lam = np.einsum("p,pij->ij", c, algebra.matrices())
        h = matrix_exp(lam)
        pulled = t
        for _ in range(4):
            # contract the leading slot and cycle it to the back
            pulled = np.tensordot(pulled, h, axes=([0], [0]))
        worst = max(worst, float(np.linalg.norm(pulled - t) / scale))
    return worst


def slice_holonomy_distance(M: OrbitSubmanifold,
                            algebra: LieAlgebraSpan,
                            tols: Tolerances = DEFAULT_TOLS) -> float:
    """Subspace distance between the slice image and the holonomy algebra.

    Both algebras act on nu_v in the same frame coordinates; they are
    compared as subspaces of the skew matrices via their orthogonal
    projectors.
    """
    _, iso_mats = M.rep.isotropy_algebra(M.point, tols=tols)
    slice_mats = slice_rep_image(M.rep, iso_mats, M.normal_frame)
    keep = [s for s in slice_mats if np.linalg.norm(s) > tols.rank]
    k = algebra.acting_dim
    slice_span = skew_span(keep, acting_dim=k, tol=tols.rank) if keep \
        else LieAlgebraSpan(acting_dim=k, basis=())

    def projector(span):
        if span.dim == 0:
            return np.zeros((k * k, k * k))
        b = span.matrices().reshape(span.dim, -1)
        return b.T @ b

    return float(np.linalg.norm(projector(slice_span) - projector(algebra), 2))


@dataclass(frozen=True)
class CartanComparison:
    """Normal curvature over nu_bar against the scaled ambient model."""

    beta: float            # homothecy ratio of the traceless shape map
    tensor_norm: float     # Frobenius norm of the nu_bar curvature tensor
    residual: float        # max entrywise gap / max entry magnitude


def cartan_comparison(M: OrbitSubmanifold,
                      tols: Tolerances = DEFAULT_TOLS) -> CartanComparison:
    """Match the nu_bar normal curvature to the ambient Cartan tensor.

    When xi -> A~_xi is a homothecy of ratio beta on nu_bar, the tensor
    -tr([A_a, A_b][A_c, A_d]) over an orthonormal nu_bar frame must equal
    beta**4 times the Cartan curvature entries of the same frame matrices.
    Raises NotApplicable when the homothecy premise fails.
    """
    hom = homothecy_test(M)
    if not hom.is_homothecy:
        raise NotApplicable(
            "traceless shape map is not a homothecy on nu_bar "
            f"(gram residual {hom.gram_residual:.2e})")
    nbar = M.nbar_frame
    ops = np.stack([shape_operator(M, xi) for xi in nbar])
    coms = np.einsum("aij,bjk->abik", ops, ops)
    coms = coms - coms.transpose(1, 0, 2, 3)
    lhs = -np.einsum("abij,cdji->abcd", coms, coms)
    rhs = hom.ratio ** 4 * CartanCurvature.entries(nbar)
    scale = max(float(np.max(np.abs(lhs))), 1e-30)
    gap = float(np.max(np.abs(lhs - rhs))) / scale
    return CartanComparison(beta=hom.ratio,
                            tensor_norm=float(np.linalg.norm(lhs)),
                            residual=gap)


@dataclass(frozen=True)
class FactorVerdict:
    """Transitivity data for one invariant factor of the holonomy action."""

    subspace: Subspace
    dim: int
    algebra_dim: int
    transitive: bool
    evidence: TransitivityResult
    irreducible_by_probe: bool


@dataclass
class HolonomyVerdict:
    """Holonomy phenotype of an orbit: factors, rank, bound, class."""

    orbit: OrbitSubmanifold
    curvature: AdaptedCurvature
    algebra: LieAlgebraSpan
    decomposition: RepDecomposition
    factors: tuple              # of FactorVerdict
    rank: int                   # holonomy-fixed rank
    factor_count: int
    bound_satisfied: bool
    conjecture_class: str
    position_residual: float
    symmetric_residual: float
    seed: int

    @property
    def factor_dims(self) -> tuple:
        return tuple(f.dim for f in self.factors)


def _matches_projective_signature(factor: FactorVerdict) -> bool:
    # the non-transitive irreducible phenotype of projective-plane type
    # orbits: factor dim m(m+1)/2 - 1 with algebra dim m(m-1)/2, m >= 3
    for m in range(3, 2 + int(np.sqrt(2 * factor.dim + 2))):
        if factor.dim == m * (m + 1) // 2 - 1 \
                and factor.algebra_dim == m * (m - 1) // 2 \
                and not factor.transitive:
            return True
    return False


def analyze(M: OrbitSubmanifold, seed: int = 0, cap: int | None = None,
            tols: Tolerances = DEFAULT_TOLS) -> HolonomyVerdict:
    """Full holonomy verdict for an orbit.

    The conjecture class is operational, not a theorem: "transitive"
    when a single factor covers the sphere-normal directions and acts
    transitively; "s-orbit-compatible" when the fixed set has dimension
    at least 2 or the single factor matches the projective signature;
    anything else is flagged "violation-candidate" for inspection.
    """
    curv = adapted_curvature(M)
    algebra = holonomy_algebra(M, cap=cap, tols=tols)
    decomp = invariant_decomposition(algebra, seed=seed, tols=tols)
    factors = []
    for sub, irr in zip(decomp.factors, decomp.irreducible_by_probe):
        restricted = algebra.restrict(sub)
        ev = is_transitive_on_sphere(restricted, seed=seed, tols=tols)
        factors.append(FactorVerdict(
            subspace=sub, dim=sub.dim, algebra_dim=restricted.dim,
            transitive=ev.transitive, evidence=ev, irreducible_by_probe=irr))
    factors = tuple(factors)
    rank = decomp.rank
    r = len(factors)
    k = curv.normal_dim

    if rank == 1 and r == 1 and factors[0].dim == k - 1 \
            and factors[0].transitive:
        verdict_class = "transitive"
    elif rank >= 2:
        verdict_class = "s-orbit-compatible"
    elif rank == 1 and r == 1 and _matches_projective_signature(factors[0]):
        verdict_class = "s-orbit-compatible"
    else:
        verdict_class = "violation-candidate"

    return HolonomyVerdict(
        orbit=M, curvature=curv, algebra=algebra, decomposition=decomp,
        factors=factors, rank=rank, factor_count=r,
        bound_satisfied=(r <= M.dim // 2), conjecture_class=verdict_class,
        position_residual=position_fixed_residual(M, algebra),
        symmetric_residual=symmetric_system_residual(curv, algebra, seed=seed),
        seed=seed)


@dataclass(frozen=True)
class CertificatePair:
    """One non-commuting shape pair witnessing a non-flat factor."""

    factor_index: int
    xi_a: np.ndarray
    xi_b: np.ndarray
    commutator: np.ndarray
    norm: float


@dataclass
class CommutingCertificate:
    """Independent commuting commutators, one per non-flat factor."""

    pairs: list = field(default_factory=list)
    flat_factors: list = field(default_factory=list)
    independent: bool = True
    max_pairwise_commutator: float = 0.0


def commuting_certificate(M: OrbitSubmanifold,
                          verdict: HolonomyVerdict | None = None,
                          tol: float = 1e-8,
                          tols: Tolerances = DEFAULT_TOLS) -> CommutingCertificate:
    """Search each holonomy factor for a non-commuting shape pair.

    For factor i the pair (xi_i, xi_i') maximizing |[A_xi, A_xi']| over
    the factor frame is recorded; factors where every commutator is
    negligible are flagged as flat anomalies.  The collected commutators
    are certified linearly independent and pairwise commuting.
    """
    if verdict is None:
        verdict = analyze(M, tols=tols)
    if not verdict.factors:
        raise InvalidInput("no holonomy factors to certify")
    ops = shape_operators(M)
    cert = CommutingCertificate()
    for i, fac in enumerate(verdict.factors):
        cols = fac.subspace.basis            # (K, d) nu-frame coords
        best = None
        for a in range(cols.shape[1]):
            opa = np.einsum("k,kij->ij", cols[:, a], ops)
            for b in range(a + 1, cols.shape[1]):
                opb = np.einsum("k,kij->ij", cols[:, b], ops)
                com = opa @ opb - opb @ opa
                nrm = float(np.linalg.norm(com))
                if best is None or nrm > best[0]:
                    best = (nrm, a, b, com)
        if best is None or best[0] <= tol:
            cert.flat_factors.append(i)
            continue
        nrm, a, b, com = best
        xi_a = np.einsum("k,kij->ij", cols[:, a], M.normal_frame)
        xi_b = np.einsum("k,kij->ij", cols[:, b], M.normal_frame)
        cert.pairs.append(CertificatePair(
            factor_index=i, xi_a=xi_a, xi_b=xi_b, commutator=com, norm=nrm))
    if cert.pairs:
        stacked = np.stack([p.commutator.ravel() / p.norm for p in cert.pairs])
        cert.independent = tolerant_rank(stacked.T, tols) == len(cert.pairs)
        worst = 0.0
        for i in range(len(cert.pairs)):
            ci = cert.pairs[i].commutator / cert.pairs[i].norm
            for j in range(i + 1, len(cert.pairs)):
                cj = cert.pairs[j].commutator / cert.pairs[j].norm
                worst = max(worst, float(np.linalg.norm(ci @ cj - cj @ ci)))
        cert.max_pairwise_commutator = worst
    return cert


@dataclass
class LoopProbeResult:
    """Holonomy span derived from parallel transport around small loops."""

    span: LieAlgebraSpan            # bracket closure of the loop logs
    raw_dim: int                    # span dim before closure
    logs: np.ndarray                # (L, K, K)
    containment_residual: float     # vs the curvature-generated algebra
    loop_radius: float


def loop_holonomy_probe(M: OrbitSubmanifold, loop_radius: float = 0.05,
                        count: int = 12, seed: int = 0,
                        step: float = LOOP_PROBE_STEP,
                        algebra: LieAlgebraSpan | None = None,
                        tols: Tolerances = DEFAULT_TOLS) -> LoopProbeResult:
    """Transport the normal frame around seeded square loops.

    Each loop's frame-return map is polar-corrected, its log extracted,
    and the logs bracket-closed.  The containment residual is the max
    relative distance of a log from the curvature algebra; for the
    orbits in scope the closed span reproduces that algebra.
    """
    if algebra is None:
        algebra = holonomy_algebra(M, tols=tols)
    rng = np.random.default_rng(seed)
    k = M.codim
    logs = []
    worst = 0.0
    alg_flat = algebra.matrices().reshape(algebra.dim, -1) \
        if algebra.dim else np.zeros((0, k * k))
    attempts = 0
    while len(logs) < count and attempts < 4 * count + 8:
        attempts += 1
        c1 = rng.standard_normal(M.dim)
        c1 /= np.linalg.norm(c1)
        c2 = rng.standard_normal(M.dim)
        c2 -= (c2 @ c1) * c1
        nrm = np.linalg.norm(c2)
        if nrm < 1e-8:
            continue
        c2 /= nrm
        x = np.einsum("g,gij->ij", c1 @ M.m_basis, M.rep.generators)
        y = np.einsum("g,gij->ij", c2 @ M.m_basis, M.rep.generators)
        loop = closed_square_loop(M, x, y, loop_radius, step=step)
        ret = transport_frame_return(loop, step=step)
        lam = orthogonal_log(polar_orthogonalize(ret))
        nrm = np.linalg.norm(lam)
        if nrm < 1e-12:
            continue
        if alg_flat.shape[0]:
            coeffs = alg_flat @ lam.ravel()
            resid = lam.ravel() - alg_flat.T @ coeffs
            worst = max(worst, float(np.linalg.norm(resid) / nrm))
        else:
            worst = max(worst, 1.0)
        logs.append(lam)
    if not logs:
        raise InvalidInput("no non-trivial loops produced; widen the radius")
    raw = skew_span(logs, acting_dim=k, tol=tols.rank)
    closed = bracket_closure(raw, tol=tols.rank)
    return LoopProbeResult(span=closed, raw_dim=raw.dim,
                           logs=np.stack(logs), containment_residual=worst,
                           loop_radius=loop_radius)
