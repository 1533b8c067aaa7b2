"""Environment dynamics: rotation machinery and per-change parameter updates.

All randomness flows through a single ``numpy.random.Generator`` per run with
a fixed draw order, so a scenario's full trajectory is a pure function of its
seed. Draw order during initialization, per component: center, height,
widths, angle, eta, tau, rotation source matrix (skipped when rotation is
disabled). Draw order per update, per component: shift direction, height,
widths, angle, eta, tau, plane permutation (skipped when rotation is
disabled).
"""

from __future__ import annotations

import math

import numpy as np

from .landscape import ComponentState, Landscape, ScenarioConfig, make_landscape

__all__ = [
    "RngStream",
    "ScenarioExhausted",
    "ORTHOGONALITY_TOL",
    "plane_pairs",
    "givens_matrix",
    "orthogonality_error",
    "gram_schmidt",
    "initial_rotation",
    "update_rotation",
    "reflect",
    "update_component",
    "advance_environment",
    "init_landscape",
]

# Deterministic PCG64 stream; identical seeds give identical trajectories
# across platforms.
RngStream = np.random.Generator

ORTHOGONALITY_TOL = 1e-9
_PIVOT_TOL = 1e-12


class ScenarioExhausted(RuntimeError):
    """Raised when advancing past the final environment of a scenario."""


def plane_pairs(d: int) -> list[tuple[int, int]]:
    """All d*(d-1)/2 axis index pairs (p < q), in lexicographic order."""
    return [(p, q) for p in range(d) for q in range(p + 1, d)]


def givens_matrix(d: int, pair: tuple[int, int], theta: float) -> np.ndarray:
    """Plane rotation by ``theta`` in the (p, q) coordinate plane.

    Identity except entries (p,p) = (q,q) = cos(theta), (p,q) = -sin(theta),
    (q,p) = sin(theta); orthogonal with determinant 1.
    """
    p, q = pair
    if not (0 <= p < q < d):
        raise ValueError(f"plane pair {pair} invalid for dimension {d}")
    g = np.eye(d)
    c, s = math.cos(theta), math.sin(theta)
    g[p, p] = c
    g[q, q] = c
    g[p, q] = -s
    g[q, p] = s
    return g


def orthogonality_error(r: np.ndarray) -> float:
    """Max-abs entry of R^T R - I."""
    d = r.shape[0]
    return float(np.abs(r.T @ r - np.eye(d)).max())


def gram_schmidt(a: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of ``a`` in index order (modified variant)."""
    q = np.array(a, dtype=float)
    d = q.shape[1]
    for k in range(d):
        for j in range(k):
            q[:, k] -= (q[:, j] @ q[:, k]) * q[:, j]
        norm = float(np.linalg.norm(q[:, k]))
        if norm < _PIVOT_TOL:
            raise ValueError(f"degenerate pivot at column {k}")
        q[:, k] /= norm
    return q


def initial_rotation(d: int, rng: RngStream, rotation_enabled: bool = True) -> np.ndarray:
    """Random orthogonal matrix from Gram-Schmidt on normal entries.

    Returns the identity when rotation is disabled (no draws consumed). A
    degenerate source matrix (probability zero) is redrawn.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if not rotation_enabled:
        return np.eye(d)
    while True:
        try:
            return gram_schmidt(rng.standard_normal((d, d)))
        except ValueError:
            continue


def update_rotation(r: np.ndarray, theta: float, rng: RngStream) -> np.ndarray:
    """Left-multiply ``r`` by the product of all plane rotations at ``theta``.

    The product runs over every coordinate plane in a fresh random
    permutation (plane rotations on different planes do not commute). Each
    factor is applied as a two-row update, which is the exact product in the
    permuted order. Floating-point drift beyond ORTHOGONALITY_TOL triggers a
    Gram-Schmidt re-orthonormalization.
    """
    d = r.shape[0]
    pairs = plane_pairs(d)
    order = rng.permutation(len(pairs))
    out = np.array(r, dtype=float)
    c, s = math.cos(theta), math.sin(theta)
    rot2 = np.array([[c, -s], [s, c]])
    # product[order[0]] @ product[order[1]] @ ... @ r applies the last factor first
    for idx in order[::-1]:
        p, q = pairs[idx]
        out[[p, q]] = rot2 @ out[[p, q]]
    if orthogonality_error(out) > ORTHOGONALITY_TOL:
        out = gram_schmidt(out)
        assert orthogonality_error(out) <= ORTHOGONALITY_TOL
    return out


def reflect(value: float, delta: float, lo: float, hi: float) -> float:
    """Move ``value`` by ``delta`` and mirror at the range edges until inside.

    In-range results pass through; a result below ``lo`` maps to
    ``2*lo - value - delta``, above ``hi`` to ``2*hi - value - delta``, and the
    reflection repeats so the output lies in [lo, hi] even for deltas larger
    than the range width.
    """
    if lo > hi:
        raise ValueError(f"invalid range: lo={lo} > hi={hi}")
    if lo == hi:
        return lo
    v = value + delta
    while v < lo or v > hi:
        if v < lo:
            v = 2.0 * lo - v
        else:
            v = 2.0 * hi - v
    return v


def _reflect_each(values: np.ndarray, deltas: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return np.array([reflect(float(v), float(dv), lo, hi)
                     for v, dv in zip(values, deltas)])


def update_component(comp: ComponentState, cfg: ScenarioConfig, rng: RngStream) -> ComponentState:
    """One environment change for a single component.

    The center moves a step of exactly ``shift_severity`` along a uniformly
    random direction; height, widths, angle, eta and tau get independent
    Gaussian perturbations scaled by their severities. Every parameter is
    reflected back into its range, per dimension where applicable. The
    rotation matrix is advanced with the *new* angle.
    """
    d = comp.dimension
    r = rng.standard_normal(d)
    norm = float(np.linalg.norm(r))
    while norm < _PIVOT_TOL:
        r = rng.standard_normal(d)
        norm = float(np.linalg.norm(r))
    height_draw = float(rng.standard_normal())
    width_draws = rng.standard_normal(d)
    angle_draw = float(rng.standard_normal())
    eta_draws = rng.standard_normal(4)
    tau_draw = float(rng.standard_normal())

    lb, ub = cfg.search_range
    center = _reflect_each(comp.center, cfg.shift_severity * r / norm, lb, ub)
    height = reflect(comp.height, cfg.height_severity * height_draw, *cfg.height_range)
    widths = _reflect_each(comp.widths, cfg.width_severity * width_draws, *cfg.width_range)
    angle = reflect(comp.angle, cfg.angle_severity * angle_draw, *cfg.angle_range)
    eta = _reflect_each(comp.eta, cfg.eta_severity * eta_draws, *cfg.eta_range)
    tau = reflect(comp.tau, cfg.tau_severity * tau_draw, *cfg.tau_range)

    if cfg.rotation_enabled:
        rotation = update_rotation(comp.rotation, angle, rng)
    else:
        rotation = comp.rotation
    return ComponentState(center=center, height=height, widths=widths,
                          angle=angle, tau=tau, eta=eta, rotation=rotation)


def advance_environment(landscape: Landscape, cfg: ScenarioConfig, rng: RngStream) -> Landscape:
    """Update every component in index order and recompute the optimum."""
    if landscape.environment_index >= cfg.num_environments - 1:
        raise ScenarioExhausted(
            f"environment {landscape.environment_index} is the last of {cfg.num_environments}")
    comps = [update_component(c, cfg, rng) for c in landscape.components]
    return make_landscape(landscape.environment_index + 1, comps)


def init_landscape(cfg: ScenarioConfig, rng: RngStream) -> Landscape:
    """Draw the initial environment: all parameters uniform in their ranges."""
    cfg.validate()
    lb, ub = cfg.search_range
    comps = []
    for _ in range(cfg.num_components):
        center = rng.uniform(lb, ub, cfg.dimension)
        height = float(rng.uniform(*cfg.height_range))
        widths = rng.uniform(*cfg.width_range, cfg.dimension)
        angle = float(rng.uniform(*cfg.angle_range))
        eta = rng.uniform(*cfg.eta_range, 4)
        tau = float(rng.uniform(*cfg.tau_range))
        rotation = initial_rotation(cfg.dimension, rng, cfg.rotation_enabled)
        comps.append(ComponentState(center=center, height=height, widths=widths,
                                    angle=angle, tau=tau, eta=eta, rotation=rotation))
    return make_landscape(0, comps)
