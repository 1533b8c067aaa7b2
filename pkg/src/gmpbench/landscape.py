"""Landscape state and objective evaluation for generalized moving peaks.

A landscape is the max-composition of ``m`` peak components. Each component
is a cone apex at ``center`` with height ``height``, bent by a sign-preserving
log-sine warp of the rotated offset and weighted per axis by ``widths``:

    value(x) = height - sqrt(sum_j widths_j * T(y_j)^2),   y = rotation @ (x - center)

The warp ``T`` (see :func:`irregularity_transform`) leaves 0, 1 and -1 fixed
and is the identity when ``tau == 0``; nonzero ``tau``/``eta`` make the
component irregular, multimodal and (with unequal ``eta``) asymmetric.
Evaluation never mutates landscape state; all mutation goes through the
dynamics module between environments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "ComponentState",
    "ScenarioConfig",
    "Landscape",
    "irregularity_transform",
    "transform_vector",
    "component_value",
    "evaluate_raw",
    "evaluate_batch",
    "optimum",
    "make_landscape",
]


@dataclass(frozen=True, eq=False)
class ComponentState:
    """One peak of the landscape.

    ``widths`` must be strictly positive (they scale the cone slope per
    rotated axis, so the condition number of the component is
    ``widths.max() / widths.min()``). ``rotation`` must be orthogonal; the
    dynamics module is responsible for keeping it so.
    """

    center: np.ndarray
    height: float
    widths: np.ndarray
    angle: float
    tau: float
    eta: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        widths = np.asarray(self.widths, dtype=float)
        eta = np.asarray(self.eta, dtype=float)
        rotation = np.asarray(self.rotation, dtype=float)
        d = center.shape[0]
        if center.ndim != 1:
            raise ValueError("center must be a 1-d vector")
        if widths.shape != (d,):
            raise ValueError(f"widths shape {widths.shape} does not match dimension {d}")
        if eta.shape != (4,):
            raise ValueError("eta must hold exactly four frequencies")
        if rotation.shape != (d, d):
            raise ValueError(f"rotation shape {rotation.shape} does not match dimension {d}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "height", float(self.height))
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "angle", float(self.angle))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "rotation", rotation)

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    @property
    def condition_number(self) -> float:
        return float(self.widths.max() / self.widths.min())


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario parameters; defaults are the standard benchmark settings.

    Severities are the per-change perturbation scales, ranges the bounds the
    corresponding parameters are reflected into. ``change_frequency`` is the
    number of fitness evaluations between changes and ``num_environments``
    the number of static intervals, so a full run spends exactly
    ``change_frequency * num_environments`` evaluations.
    """

    dimension: int = 10
    num_components: int = 10
    shift_severity: float = 1.0
    height_severity: float = 7.0
    width_severity: float = 1.0
    angle_severity: float = math.pi / 9
    tau_severity: float = 0.2
    eta_severity: float = 2.0
    search_range: tuple[float, float] = (-100.0, 100.0)
    height_range: tuple[float, float] = (30.0, 70.0)
    width_range: tuple[float, float] = (1.0, 12.0)
    angle_range: tuple[float, float] = (-math.pi, math.pi)
    tau_range: tuple[float, float] = (-1.0, 1.0)
    eta_range: tuple[float, float] = (-20.0, 20.0)
    change_frequency: int = 5000
    num_environments: int = 100
    rotation_enabled: bool = True
    seed: int = 0

    def __post_init__(self):
        for name in ("search_range", "height_range", "width_range",
                     "angle_range", "tau_range", "eta_range"):
            lo, hi = getattr(self, name)
            object.__setattr__(self, name, (float(lo), float(hi)))

    @property
    def budget(self) -> int:
        return self.change_frequency * self.num_environments

    def violations(self) -> list[str]:
        """All violated constraints, each naming the offending field."""
        bad = []
        if not isinstance(self.dimension, int) or self.dimension < 1:
            bad.append("dimension must be an integer >= 1")
        if not isinstance(self.num_components, int) or self.num_components < 1:
            bad.append("num_components must be an integer >= 1")
        for name in ("shift_severity", "height_severity", "width_severity",
                     "angle_severity", "tau_severity", "eta_severity"):
            if getattr(self, name) < 0:
                bad.append(f"{name} must be nonnegative")
        if not self.search_range[0] < self.search_range[1]:
            bad.append("search_range must satisfy lower < upper")
        for name in ("height_range", "width_range", "angle_range",
                     "tau_range", "eta_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                bad.append(f"{name} minimum exceeds maximum")
        if self.width_range[0] <= 0:
            bad.append("width range must be positive")
        if not isinstance(self.change_frequency, int) or self.change_frequency < 1:
            bad.append("change_frequency must be an integer >= 1")
        if not isinstance(self.num_environments, int) or self.num_environments < 1:
            bad.append("num_environments must be an integer >= 1")
        if not isinstance(self.seed, int) or self.seed < 0:
            bad.append("seed must be a nonnegative integer")
        return bad

    def validate(self) -> "ScenarioConfig":
        """Return self, raising ``ValueError`` naming every violated constraint."""
        bad = self.violations()
        if bad:
            raise ValueError("invalid scenario config: " + "; ".join(bad))
        return self


@dataclass(frozen=True, eq=False)
class Landscape:
    """One static environment: component set plus its cached global optimum.

    The optimum is analytic: a component's value never exceeds its height and
    attains it only at the center, so the global maximum is the largest
    height, located at that component's center (ties: lowest index).
    """

    environment_index: int
    components: tuple[ComponentState, ...]
    optimum_value: float
    optimum_position: np.ndarray

    @property
    def dimension(self) -> int:
        return self.components[0].dimension

    @property
    def num_components(self) -> int:
        return len(self.components)


def make_landscape(environment_index: int, components: Sequence[ComponentState]) -> Landscape:
    """Assemble a landscape, computing the cached optimum from the heights."""
    components = tuple(components)
    if not components:
        raise ValueError("landscape needs at least one component")
    heights = np.array([c.height for c in components])
    k = int(np.argmax(heights))
    return Landscape(
        environment_index=int(environment_index),
        components=components,
        optimum_value=float(heights[k]),
        optimum_position=components[k].center.copy(),
    )


def irregularity_transform(y: float, tau: float, eta: Sequence[float]) -> float:
    """Sign-preserving log-sine warp of a scalar offset.

    Positive inputs use the first two ``eta`` frequencies, negative inputs the
    last two; 0 maps to 0 exactly. The ``exp(log|y| + ...)`` form is evaluated
    literally rather than rewritten through powers, so with ``tau == 0`` the
    result is ``exp(log|y|) * sign(y)``, equal to ``y`` up to rounding.
    """
    if y == 0.0:
        return 0.0
    ly = math.log(abs(y))
    if y > 0.0:
        a, b = eta[0], eta[1]
    else:
        a, b = eta[2], eta[3]
    out = math.exp(ly + tau * (math.sin(a * ly) + math.sin(b * ly)))
    return out if y > 0.0 else -out


def transform_vector(y: np.ndarray, tau: float, eta: np.ndarray) -> np.ndarray:
    """Elementwise :func:`irregularity_transform` over an array of offsets."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0.0
    if pos.any():
        ly = np.log(y[pos])
        out[pos] = np.exp(ly + tau * (np.sin(eta[0] * ly) + np.sin(eta[1] * ly)))
    neg = y < 0.0
    if neg.any():
        ly = np.log(-y[neg])
        out[neg] = -np.exp(ly + tau * (np.sin(eta[2] * ly) + np.sin(eta[3] * ly)))
    return out


def component_value(x: np.ndarray, comp: ComponentState) -> float:
    """Value of a single component at ``x``; at most ``comp.height``, with
    equality exactly at the center."""
    x = np.asarray(x, dtype=float)
    if x.shape != (comp.dimension,):
        raise ValueError(f"point of dimension {x.shape} does not match component dimension {comp.dimension}")
    y = comp.rotation @ (x - comp.center)
    t = transform_vector(y, comp.tau, comp.eta)
    return float(comp.height - math.sqrt(float((comp.widths * t) @ t)))


def evaluate_raw(x: np.ndarray, landscape: Landscape) -> float:
    """Landscape objective at ``x``: max over components (ties: lowest index)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (landscape.dimension,):
        raise ValueError(f"point of shape {x.shape} does not match landscape dimension {landscape.dimension}")
    best = -math.inf
    for comp in landscape.components:
        y = comp.rotation @ (x - comp.center)
        t = transform_vector(y, comp.tau, comp.eta)
        v = comp.height - math.sqrt(float((comp.widths * t) @ t))
        if v > best:
            best = v
    return best


def evaluate_batch(points: np.ndarray, landscape: Landscape) -> np.ndarray:
    """Vectorized :func:`evaluate_raw` over an ``(n, d)`` array of points."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != landscape.dimension:
        raise ValueError(f"points of shape {points.shape} do not match landscape dimension {landscape.dimension}")
    best = np.full(points.shape[0], -np.inf)
    for comp in landscape.components:
        y = (points - comp.center) @ comp.rotation.T
        t = transform_vector(y, comp.tau, comp.eta)
        np.maximum(best, comp.height - np.sqrt((t * t) @ comp.widths), out=best)
    return best


def optimum(landscape: Landscape) -> tuple[float, np.ndarray]:
    """Global maximum value and its position (cached at construction)."""
    return landscape.optimum_value, landscape.optimum_position.copy()
