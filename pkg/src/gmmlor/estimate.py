"""Mixture estimation from lines of response.

The fit alternates two regimes.  Phase 1 works on hard assignments:
each component's mean is the weighted least-squares fit of a sinusoid
to its LoRs in (s, phi), and LoRs move to whichever mean sinusoid
passes closest.  Phase 2 switches to soft memberships derived from the
per-component projected densities and re-estimates means, covariances,
and weights until the weights settle.

Covariances never come from point clouds: a component only sees the
scalar offsets of its LoRs from the mean sinusoid.  The radial moments
of those offsets fix the two principal variances, the angular
dependence of the squared offsets fixes the orientation (a quartic in
cos of the doubled angle), and a final weighted least squares refines
the variances in the recovered frame.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ComponentDeathError,
    DegenerateGeometryError,
    InputError,
)
from .model import (
    EigenDecomposition2D,
    GaussianComponent2D,
    MembershipMatrix,
    MixtureModel2D,
    canonicalize_orientation,
    covariance_from_eigen,
)
from .projection import (
    CenteredOffsets,
    log_line_integral_profile,
    mean_sinusoid,
)
from .quartic import solve_quartic
from .rng import SeededStream, derive_seed

#: Lower bound applied to estimated principal variances when no
#: configuration is in play (image-plane units squared).
DEFAULT_VARIANCE_FLOOR = 1e-8

#: A component whose responsibility mass stays below
#: N * MASS_FLOOR_FACTOR / K for DEATH_PATIENCE consecutive iterations
#: is reported as dead rather than silently dropped.
MASS_FLOOR_FACTOR = 1e-3
DEATH_PATIENCE = 3

#: Normal systems with condition number beyond this are refused: the
#: data no longer pins down the quantity being solved for.
CONDITION_LIMIT = 1e12

#: Stationarity-residual filter for quartic roots, relative to the
#: magnitude of the trigonometric coefficient set.
_ROOT_RESIDUAL_RTOL = 1e-8

#: Imaginary parts below this (relative) are treated as rounding noise
#: when screening quartic roots for real stationary points.
_IMAG_RTOL = 1e-9

_GRID_POINTS = 720


@dataclass(frozen=True)
class FitConfig:
    """Knobs for :func:`fit`.  Defaults suit a few thousand LoRs."""

    K: int
    max_iters_phase1: int = 50
    max_iters_phase2: int = 200
    weight_tol: float = 1e-4
    mean_tol: float = 1e-6
    variance_floor: float = DEFAULT_VARIANCE_FLOOR
    seed: int = 0
    restarts: int = 1

    def __post_init__(self):
        if self.K < 1:
            raise InputError("K must be at least 1")
        if self.restarts < 1:
            raise InputError("restarts must be at least 1")
        for name in ("weight_tol", "mean_tol", "variance_floor"):
            if getattr(self, name) <= 0.0:
                raise InputError(f"{name} must be positive")
        for name in ("max_iters_phase1", "max_iters_phase2"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be at least 1")


_CONFIG_FIELDS = (
    "K", "max_iters_phase1", "max_iters_phase2", "weight_tol",
    "mean_tol", "variance_floor", "seed", "restarts",
)


def config_from_dict(mapping, **overrides) -> FitConfig:
    """Build a :class:`FitConfig` from a mapping, rejecting unknown keys.

    ``overrides`` win over the mapping; both must stay within the known
    field set so typos fail loudly instead of silently using defaults.
    """
    merged = dict(mapping)
    merged.update(overrides)
    unknown = set(merged) - set(_CONFIG_FIELDS)
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    if "K" not in merged:
        raise InputError("config requires K")
    return FitConfig(**merged)


def config_to_dict(config: FitConfig) -> dict:
    return {name: getattr(config, name) for name in _CONFIG_FIELDS}


@dataclass(frozen=True)
class TraceRecord:
    """One fit iteration: global index, phase, weights, loglik proxy.

    ``loglik_proxy`` is the soft-membership log-likelihood of the
    parameters entering the iteration; phase 1 has no memberships, so
    it carries None there.
    """

    iteration: int
    phase: int
    weights: tuple[float, ...]
    loglik_proxy: float | None


def trace_to_jsonl(trace) -> str:
    """Serialize trace records as JSON lines, one record per iteration."""
    lines = []
    for rec in trace:
        proxy = rec.loglik_proxy
        if proxy is not None and not math.isfinite(proxy):
            proxy = None
        lines.append(json.dumps({
            "iter": rec.iteration,
            "phase": rec.phase,
            "weights": list(rec.weights),
            "loglik_proxy": proxy,
        }))
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class FitState:
    """Snapshot at the end of a fit: model, memberships, progress flags."""

    model: MixtureModel2D
    memberships: MembershipMatrix
    iteration: int
    phase: int
    converged: bool


@dataclass
class FitResult:
    model: MixtureModel2D
    state: FitState
    trace: list[TraceRecord]
    loglik: float
    restart_index: int

    @property
    def converged(self) -> bool:
        return self.state.converged


# ---------------------------------------------------------------------------
# covariance estimation from centered offsets


@dataclass(frozen=True)
class WeightedMoments:
    """Weighted second/fourth moments of centered offsets, plus the mass.

    m4w is clamped up to m2w^2 on construction: any distribution has
    E[X^4] >= E[X^2]^2, so a violation is pure sampling noise and would
    otherwise leak a negative discriminant into the moment inversion.
    """

    m2w: float
    m4w: float
    mass: float

    def __post_init__(self):
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise InputError("moment mass must be positive and finite")
        if not (self.m2w >= 0.0 and math.isfinite(self.m2w)):
            raise InputError("m2w must be nonnegative and finite")
        if not math.isfinite(self.m4w):
            raise InputError("m4w must be finite")
        floor = self.m2w * self.m2w
        if self.m4w < floor:
            object.__setattr__(self, "m4w", floor)


def _offset_arrays(offsets):
    """Accept CenteredOffsets, an (s_c, phi) array pair, an (N, 2) array,
    or any iterable of (s_c, phi) records."""
    if isinstance(offsets, CenteredOffsets):
        return offsets.s_c, offsets.phi
    if (
        isinstance(offsets, tuple)
        and len(offsets) == 2
        and not hasattr(offsets[0], "s_c")
    ):
        s_c = np.asarray(offsets[0], dtype=float).ravel()
        phi = np.asarray(offsets[1], dtype=float).ravel()
        if s_c.shape != phi.shape:
            raise InputError("offset arrays must have matching length")
        return s_c, phi
    if isinstance(offsets, np.ndarray):
        arr = np.asarray(offsets, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InputError(f"offset array must be (N, 2), got {arr.shape}")
        return arr[:, 0].copy(), arr[:, 1].copy()
    items = list(offsets)
    s_c = np.array([o.s_c for o in items], dtype=float)
    phi = np.array([o.phi for o in items], dtype=float)
    return s_c, phi


def moments_from_offsets(offsets, weights=None) -> WeightedMoments:
    """Weighted second and fourth moments of the centered offsets."""
    s_c, _ = _offset_arrays(offsets)
    s2 = s_c * s_c
    if weights is None:
        total = float(s2.size)
        if total == 0.0:
            raise InputError("no offsets to take moments of")
        m2 = float(np.sum(s2) / total)
        m4 = float(np.sum(s2 * s2) / total)
    else:
        w = np.asarray(weights, dtype=float)
        total = float(np.sum(w))
        if total <= 0.0:
            raise InputError("total weight must be positive")
        m2 = float(np.dot(w, s2) / total)
        m4 = float(np.dot(w, s2 * s2) / total)
    return WeightedMoments(m2w=m2, m4w=m4, mass=total)


def invert_moments(
    m: WeightedMoments, variance_floor: float = DEFAULT_VARIANCE_FLOOR
) -> tuple[float, float]:
    """Principal variances from the marginal moments.

    Inverts m2 = (s1 + s2)/2 and m4 = (9 s1^2 + 6 s1 s2 + 9 s2^2)/8 for
    the pair (s1, s2).  Sampling noise can push the discriminant
    m4/3 - m2^2 slightly negative (the isotropic boundary); it is
    clamped at zero, and both outputs are clamped at the variance
    floor so downstream divisions stay finite.
    """
    disc = m.m4w / 3.0 - m.m2w * m.m2w
    if disc < 0.0:
        disc = 0.0
    half_gap = math.sqrt(2.0 * disc)
    s1 = max(m.m2w + half_gap, variance_floor)
    s2 = max(m.m2w - half_gap, variance_floor)
    return s1, s2


def _orientation_stats(offsets, weights):
    s_c, phi = _offset_arrays(offsets)
    t = s_c * s_c
    if weights is None:
        p = np.ones_like(phi)
    else:
        p = np.asarray(weights, dtype=float)
    return phi, t, p


def solve_orientation(
    offsets,
    weights,
    sigma1_sq: float,
    sigma2_sq: float,
) -> float:
    """Orientation phi0 minimizing the squared-offset residual.

    With alpha = 2 phi the model for the squared offset is
    e + c cos(alpha - alpha0), e = (s1 + s2)/2, c = (s2 - s1)/2.  The
    stationarity condition in x = cos(alpha0), y = sin(alpha0) is

        A_s2 (y^2 - x^2) + A_sc x y + A_s y + A_c x = 0

    which together with x^2 + y^2 = 1 reduces to a quartic in x.  Real
    roots are paired with both square-root branches of y, screened by
    the stationarity residual, and ranked by the actual objective.  If
    no root survives (flat objective, lost precision), a dense grid
    plus golden-section refinement takes over.
    """
    phi, t, p = _orientation_stats(offsets, weights)
    dsig = sigma2_sq - sigma1_sq
    ssum = sigma1_sq + sigma2_sq
    if abs(dsig) <= 1e-12 * max(1.0, ssum):
        return 0.0  # isotropic: every orientation is stationary

    alpha = 2.0 * phi
    sa, ca = np.sin(alpha), np.cos(alpha)
    M = p * dsig
    N = p * (ssum - 2.0 * t)
    A_s2 = float(np.dot(M, sa * ca))
    A_sc = float(np.dot(M, ca * ca - sa * sa))
    A_s = float(np.dot(N, ca))
    A_c = -float(np.dot(N, sa))

    # O(1) objective pieces: L(alpha0) in terms of x, y
    c_amp = 0.5 * dsig
    g = 0.5 * ssum - t
    S1 = float(np.sum(p))
    Sc2 = float(np.dot(p, np.cos(2.0 * alpha)))
    Ss2 = float(np.dot(p, np.sin(2.0 * alpha)))
    Tc = float(np.dot(p, g * ca))
    Ts = float(np.dot(p, g * sa))
    T0 = float(np.dot(p, g * g))

    def objective_xy(x: float, y: float) -> float:
        quad = S1 + (x * x - y * y) * Sc2 + 2.0 * x * y * Ss2
        return (
            0.5 * c_amp * c_amp * quad
            + 2.0 * c_amp * (x * Tc + y * Ts)
            + T0
        )

    def objective(alpha0: float) -> float:
        return objective_xy(math.cos(alpha0), math.sin(alpha0))

    a_scale = max(abs(A_s2), abs(A_sc), abs(A_s), abs(A_c))
    candidates: list[tuple[float, float]] = []
    if a_scale > 0.0:
        c4 = 4.0 * A_s2 * A_s2 + A_sc * A_sc
        c3 = 2.0 * A_sc * A_s - 4.0 * A_s2 * A_c
        c2 = A_c * A_c + A_s * A_s - A_sc * A_sc - 4.0 * A_s2 * A_s2
        c1 = 2.0 * A_s2 * A_c - 2.0 * A_sc * A_s
        c0 = A_s2 * A_s2 - A_s * A_s
        try:
            roots = solve_quartic(c4, c3, c2, c1, c0)
        except InputError:
            roots = []
        tol = _ROOT_RESIDUAL_RTOL * a_scale
        for z in roots:
            if abs(z.imag) > _IMAG_RTOL * max(1.0, abs(z)):
                continue
            x = z.real
            if abs(x) > 1.0 + 1e-9:
                continue
            x = min(1.0, max(-1.0, x))
            y_mag = math.sqrt(max(0.0, 1.0 - x * x))
            for y in (y_mag, -y_mag):
                resid = (
                    A_s2 * (y * y - x * x)
                    + A_sc * x * y
                    + A_s * y
                    + A_c * x
                )
                if abs(resid) <= tol:
                    candidates.append((objective_xy(x, y), math.atan2(y, x)))

    if candidates:
        best = min(candidates, key=lambda pair: pair[0])
        return canonicalize_orientation(0.5 * best[1])

    # fallback: the objective is 2 pi periodic in alpha0
    grid = np.linspace(-math.pi, math.pi, _GRID_POINTS, endpoint=False)
    vals = [objective(a0) for a0 in grid]
    i_best = int(np.argmin(vals))
    span = 2.0 * math.pi / _GRID_POINTS
    a0 = _golden_min(objective, grid[i_best] - span, grid[i_best] + span)
    return canonicalize_orientation(0.5 * a0)


def _golden_min(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def refine_sigmas(
    offsets,
    weights,
    phi0: float,
    variance_floor: float = DEFAULT_VARIANCE_FLOOR,
) -> tuple[float, float, float]:
    """Re-fit the principal variances with the orientation held fixed.

    Weighted least squares of the squared offsets against
    (sin^2(phi0 - phi), cos^2(phi0 - phi)).  The solution is clamped at
    the variance floor, and if the fit comes back with the minor
    variance larger, the pair is swapped and the orientation rotated a
    quarter turn so sigma1_sq stays the major variance.  The possibly
    adjusted orientation is returned with the pair:
    (sigma1_sq, sigma2_sq, phi0).
    """
    phi, t, p = _orientation_stats(offsets, weights)
    d = phi0 - phi
    sd = np.sin(d)
    cd = np.cos(d)
    u = sd * sd
    v = cd * cd
    m11 = float(np.dot(p, u * u))
    m12 = float(np.dot(p, u * v))
    m22 = float(np.dot(p, v * v))
    b1 = float(np.dot(p, t * u))
    b2 = float(np.dot(p, t * v))

    mid = 0.5 * (m11 + m22)
    rad = math.hypot(0.5 * (m11 - m22), m12)
    lo, hi_ = mid - rad, mid + rad
    if lo <= 0.0 or hi_ / lo > CONDITION_LIMIT:
        raise DegenerateGeometryError(
            "angle coverage too thin to separate the principal variances"
        )
    det = m11 * m22 - m12 * m12
    s1 = (m22 * b1 - m12 * b2) / det
    s2 = (m11 * b2 - m12 * b1) / det
    s1 = max(s1, variance_floor)
    s2 = max(s2, variance_floor)
    if s2 > s1:
        s1, s2 = s2, s1
        phi0 = phi0 + 0.5 * math.pi
    return s1, s2, canonicalize_orientation(phi0)


def estimate_covariance(
    offsets, weights=None, config: FitConfig | None = None
) -> np.ndarray:
    """Covariance of one component from its centered offsets.

    Moment inversion gives the variance pair, the quartic solve gives
    the orientation, a least-squares pass re-fits the variances in that
    frame, and the orientation is solved once more with the refined
    pair.  Returns the symmetric positive-definite covariance matrix.
    """
    floor = config.variance_floor if config is not None else DEFAULT_VARIANCE_FLOOR
    m = moments_from_offsets(offsets, weights)
    s1, s2 = invert_moments(m, floor)
    phi0 = solve_orientation(offsets, weights, s1, s2)
    s1, s2, phi0 = refine_sigmas(offsets, weights, phi0, floor)
    phi0 = solve_orientation(offsets, weights, s1, s2)
    eigen = EigenDecomposition2D(
        sigma1_sq=s1, sigma2_sq=s2, phi0=canonicalize_orientation(phi0)
    )
    return covariance_from_eigen(eigen)


# ---------------------------------------------------------------------------
# mean estimation and memberships


def _as_arrays(lors):
    """Accept (s, phi) arrays, an (N, 2) array, or LineOfResponse items."""
    if isinstance(lors, tuple) and len(lors) == 2:
        s = np.asarray(lors[0], dtype=float)
        phi = np.asarray(lors[1], dtype=float)
    elif isinstance(lors, np.ndarray):
        arr = np.asarray(lors, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InputError("LoR array must have shape (N, 2)")
        s, phi = arr[:, 0].copy(), arr[:, 1].copy()
    else:
        items = list(lors)
        s = np.array([lor.s for lor in items], dtype=float)
        phi = np.array([lor.phi for lor in items], dtype=float)
    if s.shape != phi.shape or s.ndim != 1:
        raise InputError("s and phi must be matching 1-D arrays")
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(phi))):
        raise InputError("LoRs contain non-finite values")
    return s, phi


def fit_mean(lors, weights=None) -> np.ndarray:
    """Weighted least-squares mean under the sinusoid model.

    Minimizes sum p_i (s_i - (-mu_x sin(phi_i) + mu_y cos(phi_i)))^2.
    The 2x2 normal system is solved in closed form; a condition number
    beyond 1e12 (all LoRs nearly parallel) is refused since the mean
    position is unidentifiable along the common line direction.
    """
    s, phi = _as_arrays(lors)
    p = np.ones_like(s) if weights is None else np.asarray(weights, float)
    si, co = np.sin(phi), np.cos(phi)
    a = float(np.dot(p, si * si))
    b = float(np.dot(p, si * co))
    c = float(np.dot(p, co * co))
    r1 = -float(np.dot(p, s * si))
    r2 = float(np.dot(p, s * co))

    mid = 0.5 * (a + c)
    rad = math.hypot(0.5 * (a - c), b)
    lo = mid - rad
    if lo <= 0.0 or (mid + rad) / lo > CONDITION_LIMIT:
        raise DegenerateGeometryError(
            "LoR angles too concentrated to locate a mean"
        )
    det = a * c - b * b
    mu_x = (c * r1 + b * r2) / det
    mu_y = (b * r1 + a * r2) / det
    return np.array([mu_x, mu_y])


def center_offsets(lors, mean) -> CenteredOffsets:
    """Offsets of each LoR from the mean sinusoid of ``mean``."""
    s, phi = _as_arrays(lors)
    return CenteredOffsets(s - mean_sinusoid(phi, mean), phi)


def _memberships_arrays(s, phi, means, covariances, tau):
    """Soft memberships and the log-likelihood proxy.

    Posterior over components per LoR, from weight times projected
    density, computed in log space and normalized after subtracting the
    row maximum so distant components underflow gracefully.  Rows where
    every component underflows entirely fall back to uniform.  Returns
    (memberships, sum of per-LoR log marginal densities).
    """
    K = len(tau)
    logp = np.empty((s.size, K))
    for k in range(K):
        if tau[k] <= 0.0:
            logp[:, k] = -np.inf
        else:
            logp[:, k] = math.log(tau[k]) + log_line_integral_profile(
                covariances[k], means[k], s, phi
            )
    row_max = np.max(logp, axis=1)
    ok = np.isfinite(row_max)
    shifted = np.exp(logp[ok] - row_max[ok, None])
    row_sum = np.sum(shifted, axis=1)
    resp = np.full((s.size, K), 1.0 / K)
    resp[ok] = shifted / row_sum[:, None]
    if bool(np.all(ok)):
        loglik = float(np.sum(row_max + np.log(row_sum)))
    else:
        loglik = -math.inf
    return resp, loglik


def update_memberships(model: MixtureModel2D, lors) -> MembershipMatrix:
    """Responsibilities of each model component for each LoR.

    Row i is the posterior over components given LoR i: mixing weight
    times the projected density along the line, normalized across
    components.  Rows whose numerators all underflow double precision
    fall back to the uniform distribution over components.
    """
    s, phi = _as_arrays(lors)
    means = [c.mean for c in model.components]
    covariances = [c.covariance for c in model.components]
    tau = [c.weight for c in model.components]
    resp, _ = _memberships_arrays(s, phi, means, covariances, tau)
    return MembershipMatrix(resp)


# ---------------------------------------------------------------------------
# driver


def _balanced_random_assignment(n: int, k: int, stream: SeededStream):
    """Random hard assignment with near-equal cluster sizes."""
    labels = np.empty(n, dtype=np.int64)
    labels[stream.permutation(n)] = np.arange(n) % k
    return labels


def _run_single_fit(
    s, phi, config: FitConfig, assignment, trace, on_iteration
) -> FitResult:
    n, K = s.size, config.K

    def record(phase, weights, loglik):
        rec = TraceRecord(
            iteration=len(trace),
            phase=phase,
            weights=tuple(float(w) for w in weights),
            loglik_proxy=loglik,
        )
        trace.append(rec)
        if on_iteration is not None:
            on_iteration(rec)

    # phase 1: hard assignments, means only
    means = np.zeros((K, 2))
    prev_means = None
    for _ in range(config.max_iters_phase1):
        counts = np.bincount(assignment, minlength=K)
        for k in range(K):
            if counts[k] == 0:
                raise ComponentDeathError(
                    component=k, mass=0.0, iteration=len(trace)
                )
            idx = assignment == k
            means[k] = fit_mean((s[idx], phi[idx]))
        record(1, counts / n, None)
        if prev_means is not None:
            delta = float(np.max(np.linalg.norm(means - prev_means, axis=1)))
            if delta < config.mean_tol:
                break
        prev_means = means.copy()
        # reassign to the nearest mean sinusoid
        dist = np.abs(
            s[:, None]
            + means[None, :, 0] * np.sin(phi)[:, None]
            - means[None, :, 1] * np.cos(phi)[:, None]
        )
        assignment = np.argmin(dist, axis=1)

    covariances = np.empty((K, 2, 2))
    counts = np.bincount(assignment, minlength=K)
    for k in range(K):
        if counts[k] == 0:
            raise ComponentDeathError(
                component=k, mass=0.0, iteration=len(trace)
            )
        idx = assignment == k
        offs = center_offsets((s[idx], phi[idx]), means[k])
        covariances[k] = estimate_covariance(offs, None, config)
    tau = counts / n

    # phase 2: soft memberships
    mass_floor = n * MASS_FLOOR_FACTOR / K
    low_streak = np.zeros(K, dtype=int)
    converged = False
    resp = None
    for _ in range(config.max_iters_phase2):
        resp, loglik = _memberships_arrays(s, phi, means, covariances, tau)
        masses = np.sum(resp, axis=0)
        for k in range(K):
            if masses[k] < mass_floor:
                low_streak[k] += 1
                if low_streak[k] >= DEATH_PATIENCE:
                    raise ComponentDeathError(
                        component=k,
                        mass=float(masses[k]),
                        iteration=len(trace),
                    )
            else:
                low_streak[k] = 0
        tau_new = masses / n
        for k in range(K):
            means[k] = fit_mean((s, phi), resp[:, k])
            offs = center_offsets((s, phi), means[k])
            covariances[k] = estimate_covariance(offs, resp[:, k], config)
        record(2, tau_new, loglik)
        shift = float(np.max(np.abs(tau_new - tau)))
        tau = tau_new
        if shift < config.weight_tol:
            converged = True
            break

    resp, loglik = _memberships_arrays(s, phi, means, covariances, tau)
    if np.any(tau <= 0.0):
        k = int(np.argmin(tau))
        raise ComponentDeathError(
            component=k, mass=float(tau[k] * n), iteration=len(trace)
        )
    weights = tau / math.fsum(tau)
    model = MixtureModel2D(
        components=tuple(
            GaussianComponent2D(
                mean=means[k].copy(),
                covariance=covariances[k].copy(),
                weight=float(weights[k]),
            )
            for k in range(K)
        )
    )
    state = FitState(
        model=model,
        memberships=MembershipMatrix(resp),
        iteration=len(trace),
        phase=2,
        converged=converged,
    )
    return FitResult(
        model=model,
        state=state,
        trace=trace,
        loglik=loglik,
        restart_index=0,
    )


def fit(
    lors,
    config: FitConfig,
    *,
    initial_assignment=None,
    on_iteration: Callable[[TraceRecord], None] | None = None,
) -> FitResult:
    """Fit a K-component mixture to LoRs.

    ``lors`` may be a (s, phi) array pair, an (N, 2) array, or a
    sequence of LoR objects.  ``initial_assignment`` pins the phase-1
    starting labels of the first restart; later restarts always start
    from a fresh seeded random balanced assignment.  Restarts that lose
    a component are skipped as long as at least one restart completes;
    the best completed restart by final log-likelihood wins.
    """
    s, phi = _as_arrays(lors)
    K = config.K
    if s.size < 5 * K:
        raise InputError(
            f"need at least {5 * K} LoRs to fit {K} components, got {s.size}"
        )
    if initial_assignment is not None:
        initial_assignment = np.asarray(initial_assignment)
        if initial_assignment.shape != s.shape:
            raise InputError("initial_assignment length must match LoRs")
        if not np.issubdtype(initial_assignment.dtype, np.integer):
            raise InputError("initial_assignment must be integer labels")
        if initial_assignment.min() < 0 or initial_assignment.max() >= K:
            raise InputError("initial_assignment labels out of range")

    best: FitResult | None = None
    last_death: ComponentDeathError | None = None
    for r in range(config.restarts):
        seed_r = config.seed if r == 0 else derive_seed(config.seed, r)
        if r == 0 and initial_assignment is not None:
            assignment = initial_assignment.astype(np.int64).copy()
        else:
            stream = SeededStream(seed_r)
            assignment = _balanced_random_assignment(s.size, K, stream)
        try:
            result = _run_single_fit(
                s, phi, config, assignment, [], on_iteration
            )
        except ComponentDeathError as death:
            last_death = death
            continue
        result.restart_index = r
        if best is None or result.loglik > best.loglik:
            best = result
    if best is None:
        assert last_death is not None
        raise last_death
    return best
