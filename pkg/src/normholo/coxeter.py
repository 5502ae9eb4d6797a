"""Curvature normals and reflection groups of isoparametric orbits.

A principal orbit with flat normal bundle carries a commuting family of
shape operators.  Their common eigendistributions define curvature
normals eta_i in the normal space; reflections across the hyperplanes
eta_i-perp close (for the orbits in scope) into a finite group acting on
the span of the normals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ClosureCapReached, DegenerateSpectrum, InvalidInput,
                     NotIsoparametric)
from .linalg import DEFAULT_TOLS, Tolerances, mgs_qr, sym_eig
from .orbit import OrbitSubmanifold, shape_operators

FLATNESS_TOL = 1e-8
CLOSURE_CAP = 10_000
DEDUP_TOL = 1e-8
ANGLE_TOL = 1e-6

# bucket width for the closure dictionary; comfortably above product
# round-off, comfortably below the separation of distinct elements
_KEY_DECIMALS = 6


@dataclass(frozen=True)
class CurvatureNormalSet:
    """Common eigendistributions of the shape-operator family.

    normals holds one carrier matrix per distinct curvature normal;
    nu_coords are their coordinates in the orbit's normal frame, so
    row i solves <xi_a, eta_i> = (eigenvalue of A_a on E_i) over the
    frame.  residual bounds the scalarity defect of every operator on
    every eigendistribution.
    """

    orbit: OrbitSubmanifold
    normals: np.ndarray          # (r, d, d) carrier matrices
    nu_coords: np.ndarray        # (r, K) coords in the normal frame
    multiplicities: tuple        # eigendistribution dims, sum = dim M
    distributions: np.ndarray    # (n, n) eigenvector columns, blocked
    block_slices: tuple          # (start, stop) per normal
    residual: float

    @property
    def count(self) -> int:
        return len(self.multiplicities)

    def position_pairings(self) -> np.ndarray:
        """<v, eta_i> for every normal; -1 throughout for orbit data."""
        p = self.orbit.point
        return np.einsum("ij,kij->k", p, self.normals)

    def pairwise_angles(self) -> np.ndarray:
        """Angles between the normals as vectors in the normal space."""
        g = self.nu_coords @ self.nu_coords.T
        norms = np.sqrt(np.diag(g))
        cosines = np.clip(g / np.outer(norms, norms), -1.0, 1.0)
        return np.arccos(cosines)


def _flatness_defect(ops: np.ndarray) -> float:
    worst = 0.0
    for a in range(ops.shape[0]):
        for b in range(a + 1, ops.shape[0]):
            com = ops[a] @ ops[b] - ops[b] @ ops[a]
            worst = max(worst, float(np.linalg.norm(com)))
    return worst


def curvature_normals(M: OrbitSubmanifold, seed: int = 0,
                      tols: Tolerances = DEFAULT_TOLS) -> CurvatureNormalSet:
    """Simultaneously diagonalize the shape operators of a flat-normal
    orbit and recover the curvature normals.

    A seeded generic combination provides the first eigenspace split;
    cluster intersection against each frame operator refines it until
    every operator is scalar on every block.  Residual scalarity above
    the eigenvalue tolerance raises DegenerateSpectrum.
    """
    ops = shape_operators(M)
    defect = _flatness_defect(ops)
    if defect > FLATNESS_TOL:
        raise NotIsoparametric(
            f"normal bundle is not flat (commutator norm {defect:.3e}); "
            "curvature normals need a principal isoparametric orbit")
    n = M.dim
    k = ops.shape[0]
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(k)
    gen = np.einsum("a,aij->ij", w, ops)
    dec = sym_eig(gen, tols=tols)
    vectors = dec.vectors.copy()
    blocks = [list(c) for c in dec.clusters]

    # refine: split any block on which some operator still has spread
    changed = True
    while changed:
        changed = False
        for a in range(k):
            new_blocks = []
            for blk in blocks:
                vb = vectors[:, blk]
                b = vb.T @ ops[a] @ vb
                sub = sym_eig(0.5 * (b + b.T), tols=tols)
                if len(sub.clusters) > 1:
                    vectors[:, blk] = vb @ sub.vectors
                    for c in sub.clusters:
                        new_blocks.append([blk[j] for j in c])
                    changed = True
                else:
                    new_blocks.append(blk)
            blocks = new_blocks

    # scalarity audit and eigenvalue table
    eigtable = np.zeros((k, len(blocks)))
    residual = 0.0
    for i, blk in enumerate(blocks):
        vb = vectors[:, blk]
        for a in range(k):
            b = vb.T @ ops[a] @ vb
            mean = float(np.trace(b)) / len(blk)
            residual = max(residual,
                           float(np.linalg.norm(b - mean * np.eye(len(blk)))))
            eigtable[a, i] = mean
    if residual > 1e2 * tols.eig:
        raise DegenerateSpectrum(
            f"cluster refinement left a non-scalar block (residual "
            f"{residual:.3e}); eigenvalue clustering is ambiguous here")

    # merge blocks whose eigenvalue columns coincide (same normal)
    order = sorted(range(len(blocks)), key=lambda i: tuple(eigtable[:, i]))
    merged: list[list[int]] = []
    cols: list[np.ndarray] = []
    for i in order:
        if cols and np.max(np.abs(cols[-1] - eigtable[:, i])) <= 1e2 * tols.eig:
            merged[-1].extend(blocks[i])
        else:
            merged.append(list(blocks[i]))
            cols.append(eigtable[:, i])
    blocks = merged
    coords = np.stack(cols)

    perm = [j for blk in blocks for j in blk]
    distributions = vectors[:, perm]
    mults = tuple(len(blk) for blk in blocks)
    if sum(mults) != n:
        raise DegenerateSpectrum("eigendistribution dimensions do not "
                                 "exhaust the tangent space")
    slices = []
    start = 0
    for m in mults:
        slices.append((start, start + m))
        start += m
    normals = np.einsum("ra,aij->rij", coords, M.normal_frame)
    return CurvatureNormalSet(orbit=M, normals=normals, nu_coords=coords,
                              multiplicities=mults,
                              distributions=distributions,
                              block_slices=tuple(slices),
                              residual=residual)


@dataclass(frozen=True)
class ReflectionGroup:
    """Closure of the reflections across the curvature-normal hyperplanes.

    Elements are orthogonal matrices in an orthonormal basis of
    span{eta_i}; span_basis carries that basis back to normal-frame
    coordinates.
    """

    span_basis: np.ndarray       # (K, s) columns, normal-frame coords
    normal_span_coords: np.ndarray   # (r, s) the normals in that basis
    generators: np.ndarray       # (r, s, s)
    elements: tuple              # of (s, s) arrays
    finite: bool
    order: int
    closure_defect: float

    @property
    def span_dim(self) -> int:
        return self.span_basis.shape[1]


def _element_key(mat: np.ndarray) -> tuple:
    return tuple(np.round(mat.ravel(), _KEY_DECIMALS).tolist())


def reflection_group(normals: CurvatureNormalSet,
                     cap: int = CLOSURE_CAP,
                     dedup_tol: float = DEDUP_TOL,
                     tols: Tolerances = DEFAULT_TOLS) -> ReflectionGroup:
    """Generate and close the group of reflections across eta_i-perp.

    Acts on span{eta_i} inside the normal space.  Breadth-first closure
    with de-duplication at dedup_tol; exceeding cap elements raises
    ClosureCapReached.  The returned group re-verifies orthogonality of
    every element and closure of every product.
    """
    if normals.count == 0:
        raise InvalidInput("no curvature normals to reflect across")
    span, _, accepted = mgs_qr(normals.nu_coords.T, tol=tols.rank)
    span = span[:, : len(accepted)]
    u = normals.nu_coords @ span           # (r, s)
    s = span.shape[1]
    gens = np.empty((normals.count, s, s))
    for i in range(normals.count):
        unit = u[i] / np.linalg.norm(u[i])
        gens[i] = np.eye(s) - 2.0 * np.outer(unit, unit)

    elements: list[np.ndarray] = [np.eye(s)]
    index = {_element_key(np.eye(s)): 0}

    def lookup(mat: np.ndarray) -> int | None:
        j = index.get(_element_key(mat))
        if j is not None and np.max(np.abs(elements[j] - mat)) <= dedup_tol:
            return j
        return None

    frontier = [0]
    while frontier:
        nxt = []
        for ei in frontier:
            for g in gens:
                prod = elements[ei] @ g
                if lookup(prod) is None:
                    if len(elements) >= cap:
                        raise ClosureCapReached(
                            f"reflection closure exceeded {cap} elements; "
                            "group may be infinite")
                    index[_element_key(prod)] = len(elements)
                    elements.append(prod)
                    nxt.append(len(elements) - 1)
        frontier = nxt

    worst_orth = max(float(np.linalg.norm(e.T @ e - np.eye(s)))
                     for e in elements)
    if worst_orth > 1e-10:
        raise DegenerateSpectrum(
            f"closure produced a non-orthogonal element ({worst_orth:.3e})")
    closure_defect = 0.0
    for a in elements:
        for b in elements:
            prod = a @ b
            if lookup(prod) is None:
                raise DegenerateSpectrum("closure list is not closed under "
                                         "composition at the dedup tolerance")
            closure_defect = max(closure_defect, float(np.max(np.abs(
                prod - elements[lookup(prod)]))))
    return ReflectionGroup(span_basis=span, normal_span_coords=u,
                           generators=gens, elements=tuple(elements),
                           finite=True, order=len(elements),
                           closure_defect=closure_defect)


def hyperplane_permutation_check(g: np.ndarray,
                                 group: ReflectionGroup,
                                 angle_tol: float = ANGLE_TOL) -> bool:
    """Whether g maps the set of normal lines onto itself.

    g acts in the span basis.  Each image line must land on some normal
    line within angle_tol, and the assignment must be a bijection.
    """
    u = group.normal_span_coords
    units = u / np.linalg.norm(u, axis=1, keepdims=True)
    hit = set()
    for i in range(units.shape[0]):
        img = g @ units[i]
        dots = np.abs(units @ img)
        j = int(np.argmax(dots))
        angle = float(np.arccos(np.clip(dots[j], -1.0, 1.0)))
        if angle > angle_tol or j in hit:
            return False
        hit.add(j)
    return len(hit) == units.shape[0]


def focal_displacement(normals: CurvatureNormalSet, index: int,
                       seed: int = 0, attempts: int = 16) -> np.ndarray:
    """A carrier point v + xi with <xi, eta_index> = 1, generic otherwise.

    Orbits through such points lose the index-th eigendistribution from
    their tangent space, so their dimension drops strictly.  The seeded
    in-hyperplane component is retried until the point is clear of the
    other focal hyperplanes.
    """
    if not 0 <= index < normals.count:
        raise InvalidInput("curvature normal index out of range")
    M = normals.orbit
    coords = normals.nu_coords
    eta = coords[index]
    base = eta / float(eta @ eta)
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        h = rng.standard_normal(coords.shape[1])
        h -= (h @ eta) / (eta @ eta) * eta
        xi = base + 0.25 * h / max(np.linalg.norm(h), 1e-12)
        pair = coords @ xi
        others = np.delete(np.abs(pair - 1.0), index)
        if others.size == 0 or np.min(others) > 1e-2:
            return M.point + M.normal_vector(xi)
    raise InvalidInput("could not find a displacement clear of the other "
                       "focal hyperplanes; widen attempts")
