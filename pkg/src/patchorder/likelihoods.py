"""Data terms, range penalties and objective assembly.

An assembled objective maps a column-stacked candidate image to
(value, gradient) of

    data(x, y) + mu * smoothness(x) + lower_penalty(x) + upper_penalty(x)

where the smoothness term runs along a fixed pixel ordering and the penalties
softly keep x inside [x_min, x_max].  Everything is differentiable: absolute
values are smoothed, and the Poisson log term is extrapolated quadratically
below a small positive threshold so the objective is defined on all of R^N.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .image import as_image, column_stack_pixels, unstack_pixels
from .ordering import Permutation
from .regularizer import OrderingWeights, SmoothnessPrior, smoothed_abs, smoothed_abs_grad

__all__ = [
    "gaussian_term",
    "linear_term",
    "poisson_term",
    "bound_penalty",
    "ObjectiveSpec",
    "Objective",
    "assemble_objective",
]


def gaussian_term(x, y) -> tuple[float, np.ndarray]:
    """0.5 * ||x - y||^2 and its gradient."""
    r = np.asarray(x, dtype=np.float64) - y
    return 0.5 * float((r * r).sum()), r


def linear_term(x, y, op) -> tuple[float, np.ndarray]:
    """0.5 * ||A x - y||^2 with the gradient formed through the exact adjoint."""
    r = op.forward(x) - y
    return 0.5 * float((r * r).sum()), op.adjoint(r)


def poisson_term(x, y, eps_f: float) -> tuple[float, np.ndarray]:
    """Poisson negative log likelihood sum(-y * log x + x), smoothly extended.

    Below eps_f the term follows its second order Taylor expansion around
    eps_f, which keeps value and gradient continuous at the seam and convex
    everywhere (the quadratic coefficient y / eps_f^2 is non-negative).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if eps_f <= 0:
        raise ValueError("eps_f must be positive")
    if y.min() < 0:
        raise ValueError("counts must be non-negative")
    below = x < eps_f
    xs = np.where(below, eps_f, x)
    val_main = -y * np.log(xs) + x
    g_main = 1.0 - y / xs
    d1 = 1.0 - y / eps_f
    d2 = y / (eps_f * eps_f)
    dx = x - eps_f
    val_taylor = (-y * np.log(eps_f) + eps_f) + d1 * dx + 0.5 * d2 * dx * dx
    g_taylor = d1 + d2 * dx
    value = float(np.where(below, val_taylor, val_main).sum())
    grad = np.where(below, g_taylor, g_main)
    return value, grad


def bound_penalty(u, w, eps_p: float, scale: float = 1.0,
                  mask: Optional[np.ndarray] = None) -> tuple[float, np.ndarray, np.ndarray]:
    """One-sided penalty scale * sum(rho(u - w, eps_p) + (u - w)).

    Stays within eps_p of zero where u <= w and grows like 2 * scale * (u - w)
    above, so it pushes u below w without a hard constraint.  Returns the value
    and the gradients with respect to u and w; ``mask`` restricts the sum to
    selected entries.
    """
    d = np.asarray(u, dtype=np.float64) - np.asarray(w, dtype=np.float64)
    val = smoothed_abs(d, eps_p) + d
    g = smoothed_abs_grad(d, eps_p) + 1.0
    if mask is not None:
        val = np.where(mask, val, 0.0)
        g = np.where(mask, g, 0.0)
    value = scale * float(val.sum())
    grad_u = scale * g
    return value, grad_u, -grad_u


@dataclass(frozen=True)
class ObjectiveSpec:
    """Everything that defines a restoration objective except the ordering.

    data_term: 'gaussian', 'linear' or 'poisson'.
    operator: required for 'linear'; its input shape is the unknown's shape.
    mu: smoothness weight, applied to the sum over all shifted copies.
    lower_only_zero_counts: for Poisson, apply the lower penalty only where
        the observed count is zero.
    """

    data_term: str
    mu: float
    epsilon_r: float = 0.1
    epsilon_p: float = 1e-3
    penalty_scale: float = 1.0
    x_min: float = 0.0
    x_max: float = 1.0
    operator: object | None = None
    epsilon_f: float | None = None
    lower_only_zero_counts: bool = False

    def __post_init__(self):
        if self.data_term not in ("gaussian", "linear", "poisson"):
            raise ValueError(f"unknown data term {self.data_term!r}")
        if self.data_term == "linear" and self.operator is None:
            raise ValueError("linear data term needs an operator")
        if self.data_term == "poisson" and self.epsilon_f is None:
            raise ValueError("poisson data term needs epsilon_f")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")


class Objective:
    """Callable (value, gradient) of the full restoration objective.

    Operates on column-stacked vectors so it can be handed to the minimizer
    directly; ``x_shape`` tells how to fold them back into images.
    """

    def __init__(self, spec: ObjectiveSpec, y, perm: Permutation,
                 weights: OrderingWeights, patch_side: int):
        self.spec = spec
        self.y = as_image(y)
        if spec.data_term == "linear":
            self.x_shape = tuple(spec.operator.input_shape)
            if tuple(spec.operator.output_shape) != self.y.shape:
                raise ValueError("operator output shape does not match the data")
        else:
            self.x_shape = self.y.shape
        self.prior = SmoothnessPrior(perm, weights, patch_side, self.x_shape, spec.epsilon_r)
        self._lower_mask = None
        if spec.data_term == "poisson" and spec.lower_only_zero_counts:
            self._lower_mask = self.y == 0

    @property
    def n(self) -> int:
        return self.x_shape[0] * self.x_shape[1]

    def __call__(self, x_flat: np.ndarray) -> tuple[float, np.ndarray]:
        spec = self.spec
        x = unstack_pixels(x_flat, self.x_shape)
        if spec.data_term == "gaussian":
            value, grad = gaussian_term(x, self.y)
        elif spec.data_term == "linear":
            value, grad = linear_term(x, self.y, spec.operator)
        else:
            value, grad = poisson_term(x, self.y, spec.epsilon_f)

        r_val, r_grad = self.prior.value_grad(x)
        value += spec.mu * r_val
        grad = grad + spec.mu * r_grad

        lo_val, _, lo_gw = bound_penalty(spec.x_min, x, spec.epsilon_p,
                                         spec.penalty_scale, mask=self._lower_mask)
        hi_val, hi_gu, _ = bound_penalty(x, spec.x_max, spec.epsilon_p, spec.penalty_scale)
        value += lo_val + hi_val
        grad = grad + lo_gw + hi_gu
        return value, column_stack_pixels(grad)


def assemble_objective(spec: ObjectiveSpec, y, perm: Permutation,
                       weights: OrderingWeights, patch_side: int) -> Objective:
    """Bind a spec to data, ordering and weights; see :class:`Objective`."""
    return Objective(spec, y, perm, weights, patch_side)
