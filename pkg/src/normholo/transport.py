"""Parallel transport in the normal bundle of an orbit.

Curves on an orbit are piecewise one-parameter subgroup arcs
c(t) = exp(tX) c0 exp(-tX).  Along such an arc the normal spaces move by
conjugation, so the conjugated base frame stays exactly orthonormal and
the stepper in :mod:`normholo.kernels` only has to update frame
coefficients.  The discrete rule (project onto the next fiber, apply one
midpoint correction, renormalize) measures close to third-order endpoint
convergence on the audit; the certified contract is the first-order one,
and :func:`transport_convergence_audit` reports the observed order so a
regression is visible in reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInput, TransportDiverged
from .kernels import matrix_exp, transport_segment
from .linalg import Tolerances, orthogonal_log
from .orbit import OrbitSubmanifold, build_orbit, traceless_shape_operator
from .linalg import sym_eig

DEFAULT_STEP = 1e-3

# A projection step that eats more than half the vector means the fiber
# turned too fast for the step size; results past that point are noise.
MIN_NORM_RATIO = 0.5


def _check_skew(x: np.ndarray, r: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (r, r):
        raise InvalidInput(f"generator shape {x.shape}, expected {(r, r)}")
    if np.linalg.norm(x + x.T) > 1e-10 * (1.0 + np.linalg.norm(x)):
        raise InvalidInput("curve generator is not skew-symmetric")
    return x


@dataclass(frozen=True)
class OrbitCurve:
    """Piecewise one-parameter-subgroup curve on an orbit.

    segments: tuple of (X, duration) with X skew; the curve runs
    c(t) = g(t) c(0) g(t)^T where g advances by exp(tX) on each piece.
    """

    orbit: OrbitSubmanifold
    segments: tuple
    step: float = DEFAULT_STEP

    def __post_init__(self):
        r = self.orbit.rep.total_size
        cleaned = []
        for seg in self.segments:
            x, dur = seg
            dur = float(dur)
            if dur < 0.0:
                raise InvalidInput("segment duration must be >= 0")
            cleaned.append((_check_skew(x, r), dur))
        object.__setattr__(self, "segments", tuple(cleaned))
        if not self.step > 0.0:
            raise InvalidInput("step must be positive")

    @classmethod
    def from_tangent_coords(cls, orbit: OrbitSubmanifold, pieces: Sequence,
                            step: float = DEFAULT_STEP) -> "OrbitCurve":
        """Build segments from tangent coordinates at the base point.

        Each piece is (coeffs, duration); coeffs are coordinates in the
        orbit tangent frame and are lifted to so(r) through the m-basis.
        """
        segs = []
        for coeffs, dur in pieces:
            c = np.asarray(coeffs, dtype=np.float64)
            if c.shape != (orbit.dim,):
                raise InvalidInput("tangent coefficient length mismatch")
            x = np.einsum("g,gij->ij", c @ orbit.m_basis,
                          orbit.rep.generators)
            segs.append((x, dur))
        return cls(orbit=orbit, segments=tuple(segs), step=step)

    @property
    def total_time(self) -> float:
        return float(sum(d for _, d in self.segments))

    def group_path_end(self) -> np.ndarray:
        g = np.eye(self.orbit.rep.total_size)
        for x, dur in self.segments:
            if dur > 0.0:
                g = g @ matrix_exp(dur * x)
        return g

    def endpoint(self) -> np.ndarray:
        g = self.group_path_end()
        return g @ self.orbit.point @ g.T

    def is_closed(self, tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(self.endpoint() - self.orbit.point) <= tol)


def closed_square_loop(orbit: OrbitSubmanifold, x: np.ndarray, y: np.ndarray,
                       radius: float, step: float = DEFAULT_STEP) -> OrbitCurve:
    """Small closed loop exp(sX) exp(sY) exp(-sX) exp(-sY) plus closure arc.

    The four-arc group commutator misses the identity by O(s^2); a fifth
    arc along -log of the defect closes the loop exactly up to the log
    series truncation.  The result is a null-homotopic loop at the base
    point suitable for holonomy probes.
    """
    r = orbit.rep.total_size
    x = _check_skew(x, r)
    y = _check_skew(y, r)
    s = float(radius)
    if not s > 0.0:
        raise InvalidInput("loop radius must be positive")
    segs = [(x, s), (y, s), (-x, s), (-y, s)]
    g = np.eye(r)
    for z, dur in segs:
        g = g @ matrix_exp(dur * z)
    w = -orthogonal_log(g)
    segs.append((w, 1.0))
    curve = OrbitCurve(orbit=orbit, segments=tuple(segs), step=step)
    g_end = curve.group_path_end()
    if np.linalg.norm(g_end - np.eye(r)) > 1e-9:
        raise InvalidInput("loop closure arc failed to return to identity")
    return curve


@dataclass
class TransportResult:
    """Outcome of transporting a stack of normal vectors along a curve."""

    curve: OrbitCurve
    xis_start: np.ndarray        # (M, R, R)
    xis_end: np.ndarray          # (M, R, R)
    g_end: np.ndarray            # (R, R)
    times: np.ndarray            # (S,)
    samples: np.ndarray          # (S, M, R, R)
    g_samples: np.ndarray        # (S, R, R)
    drift: float                 # max pre-renormalization norm drift
    min_ratio: float
    step: float
    end_holonomy_defect: float | None = None
    bundle: str = "normal"       # "normal" or "tangent"

    @property
    def xi_end(self) -> np.ndarray:
        return self.xis_end[0]

    def fiber_residual(self) -> float:
        """Max distance of the sampled vectors from the sampled fibers."""
        base = (self.curve.orbit.tangent_frame if self.bundle == "tangent"
                else self.curve.orbit.normal_frame)
        worst = 0.0
        for g, xis in zip(self.g_samples, self.samples):
            frames = np.einsum("ip,kpq,jq->kij", g, base, g)
            coeffs = np.einsum("kij,mij->mk", frames, xis)
            recon = np.einsum("mk,kij->mij", coeffs, frames)
            gap = float(np.max(np.linalg.norm(
                (xis - recon).reshape(xis.shape[0], -1), axis=1)))
            worst = max(worst, gap)
        return worst


def _validate_in_fiber(orbit: OrbitSubmanifold, xi: np.ndarray,
                       frame: np.ndarray, label: str) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    r = orbit.rep.total_size
    if xi.shape != (r, r):
        raise InvalidInput(f"{label} vector shape {xi.shape}, expected {(r, r)}")
    coeffs = np.einsum("kij,ij->k", frame, xi)
    recon = np.einsum("k,kij->ij", coeffs, frame)
    if np.linalg.norm(xi - recon) > 1e-8 * (1.0 + np.linalg.norm(xi)):
        raise InvalidInput(f"vector does not lie in the {label} space at c(0)")
    return xi


def parallel_transport_stack(curve: OrbitCurve, xis: np.ndarray,
                             step: float | None = None,
                             samples_per_segment: int = 16,
                             bundle: str = "normal") -> TransportResult:
    """Transport a stack of vectors along the curve.

    bundle selects the normal bundle (default) or the tangent bundle,
    where the same projection scheme realizes Levi-Civita transport.
    Norms are renormalized to their initial values after every step; the
    accumulated pre-renormalization drift and the worst single-step norm
    ratio are reported.  A ratio below MIN_NORM_RATIO aborts with
    TransportDiverged.
    """
    orbit = curve.orbit
    h = float(step) if step is not None else curve.step
    if not h > 0.0:
        raise InvalidInput("step must be positive")
    if bundle not in ("normal", "tangent"):
        raise InvalidInput("bundle must be 'normal' or 'tangent'")
    base = (orbit.tangent_frame if bundle == "tangent"
            else orbit.normal_frame)
    xis = np.asarray(xis, dtype=np.float64)
    if xis.ndim == 2:
        xis = xis[None, :, :]
    for m in range(xis.shape[0]):
        _validate_in_fiber(orbit, xis[m], base, bundle)
    targets = np.linalg.norm(xis.reshape(xis.shape[0], -1), axis=1)

    r = orbit.rep.total_size
    g = np.eye(r)
    cur = xis.copy()
    drift = 0.0
    min_ratio = np.inf
    times = [0.0]
    all_samples = [cur.copy()]
    all_g = [g.copy()]
    t0 = 0.0
    for x, dur in curve.segments:
        if dur == 0.0:
            continue
        nsteps = max(1, int(np.ceil(dur / h)))
        hseg = dur / nsteps
        stride = max(1, nsteps // max(1, samples_per_segment))
        e_half = matrix_exp(0.5 * hseg * x)
        cur, g, seg_drift, seg_ratio, samples, g_samples, n_samp = \
            transport_segment(base, cur, g, e_half, nsteps, targets,
                              sample_stride=stride)
        drift += float(np.max(seg_drift))
        min_ratio = min(min_ratio, float(np.min(seg_ratio)))
        for i in range(n_samp):
            # sample i corresponds to step (i+1)*stride, capped at nsteps
            k = min((i + 1) * stride, nsteps)
            times.append(t0 + k * hseg)
            all_samples.append(samples[i])
            all_g.append(g_samples[i])
        if times[-1] < t0 + dur - 1e-15:
            times.append(t0 + dur)
            all_samples.append(cur.copy())
            all_g.append(g.copy())
        t0 += dur
        if min_ratio < MIN_NORM_RATIO:
            raise TransportDiverged(
                f"projection ratio {min_ratio:.3f} fell below "
                f"{MIN_NORM_RATIO}; reduce the step size")
    if min_ratio is np.inf:
        min_ratio = 1.0

    result = TransportResult(
        curve=curve, xis_start=xis, xis_end=cur, g_end=g,
        times=np.array(times), samples=np.array(all_samples),
        g_samples=np.array(all_g), drift=drift, min_ratio=float(min_ratio),
        step=h, bundle=bundle)
    if curve.is_closed():
        defect = float(np.max(np.linalg.norm(
            (cur - xis).reshape(xis.shape[0], -1), axis=1)))
        result.end_holonomy_defect = defect
    return result


def parallel_transport_normal(curve: OrbitCurve, xi0: np.ndarray,
                              step: float | None = None,
                              samples_per_segment: int = 16) -> TransportResult:
    """Transport a single normal vector; see parallel_transport_stack."""
    return parallel_transport_stack(curve, np.asarray(xi0)[None], step=step,
                                    samples_per_segment=samples_per_segment)


def parallel_transport_tangent(curve: OrbitCurve, x0: np.ndarray,
                               step: float | None = None,
                               samples_per_segment: int = 16) -> TransportResult:
    """Levi-Civita transport of a single tangent vector."""
    return parallel_transport_stack(curve, np.asarray(x0)[None], step=step,
                                    samples_per_segment=samples_per_segment,
                                    bundle="tangent")


def transport_frame_return(curve: OrbitCurve,
                           step: float | None = None) -> np.ndarray:
    """Coefficient matrix of the transported normal frame for a closed curve.

    Returns the K x K matrix O with O[k, l] = <tau(f_l), f_k>, the
    holonomy element of the loop expressed in the base normal frame.
    """
    if not curve.is_closed():
        raise InvalidInput("frame return requires a closed curve")
    orbit = curve.orbit
    res = parallel_transport_stack(curve, orbit.normal_frame, step=step,
                                   samples_per_segment=2)
    return np.einsum("kij,lij->kl", orbit.normal_frame, res.xis_end)


@dataclass
class ConvergenceAudit:
    """Richardson comparison of transports at step h, h/2, h/4."""

    steps: tuple
    drifts: tuple
    endpoint_gaps: tuple      # (|xi_h - xi_{h/2}|, |xi_{h/2} - xi_{h/4}|)
    order_estimate: float
    drift_halving_ok: bool


def _roundoff_drift_floor(curve: OrbitCurve, h: float, scale: float) -> float:
    # Accumulated renormalization round-off grows about quadratically in
    # the step count (the group element is never re-orthogonalized), at
    # roughly machine epsilon per step squared.  Below this floor the
    # halving contract is vacuous.
    nsteps = sum(max(1, int(np.ceil(dur / h))) for _, dur in curve.segments
                 if dur > 0.0)
    return 1e-16 * nsteps * nsteps * (1.0 + scale)


def transport_convergence_audit(curve: OrbitCurve, xi0: np.ndarray,
                                step: float | None = None) -> ConvergenceAudit:
    """Audit convergence of the transport scheme by step halving.

    The certified contract is first order: halving the step at least
    halves the pre-renormalization drift, up to the round-off floor.
    The order estimate comes from endpoint Richardson differences; the
    baseline step is lifted to total_time/64 if the requested step is
    finer, so the differences sit above round-off where an order is
    measurable at all.  (The stepper itself shows close to third-order
    endpoint convergence in that regime.)
    """
    h = float(step) if step is not None else curve.step
    total = curve.total_time
    if total > 0.0:
        h = max(h, total / 64.0)
    runs = [parallel_transport_normal(curve, xi0, step=h / (2 ** k),
                                      samples_per_segment=1)
            for k in range(3)]
    gaps = (float(np.linalg.norm(runs[0].xi_end - runs[1].xi_end)),
            float(np.linalg.norm(runs[1].xi_end - runs[2].xi_end)))
    if gaps[1] > 1e-15:
        order = float(np.log2(gaps[0] / gaps[1]))
    else:
        order = np.inf
    drifts = tuple(r.drift for r in runs)
    scale = float(np.linalg.norm(xi0))
    ok = all(
        drifts[k + 1] <= 0.5 * drifts[k]
        + _roundoff_drift_floor(curve, h / (2 ** (k + 1)), scale)
        for k in range(2))
    return ConvergenceAudit(steps=(h, h / 2, h / 4), drifts=drifts,
                            endpoint_gaps=gaps, order_estimate=order,
                            drift_halving_ok=ok)


def traceless_spectra_along(result: TransportResult, vector_index: int = 0,
                            max_points: int = 12,
                            tols: Tolerances = Tolerances()) -> tuple:
    """Spectra of the traceless shape operator along a transported vector.

    Rebuilds the orbit data honestly at sampled curve points instead of
    pushing the base-point operator forward, so transport error shows up
    as eigenvalue drift.  Returns (times, spectra) with spectra of shape
    (S, dim M).
    """
    orbit = result.curve.orbit
    n_samples = result.samples.shape[0]
    if n_samples <= max_points:
        idx = np.arange(n_samples)
    else:
        idx = np.unique(np.linspace(0, n_samples - 1, max_points).astype(int))
    times = result.times[idx]
    spectra = []
    for i in idx:
        g = result.g_samples[i]
        point = g @ orbit.point @ g.T
        local = build_orbit(orbit.rep, point, tols=tols)
        xi = result.samples[i, vector_index]
        spectra.append(sym_eig(traceless_shape_operator(local, xi)).values)
    return times, np.array(spectra)
