"""
Simultaneous-iteration (Aberth-Ehrlich) root finding for complex polynomials.
"""
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from app.core.errors import RootFinderError

logger = logging.getLogger(__name__)

EPSILON = np.finfo(float).eps


@dataclass(frozen=True)
class RootCluster:
    center: complex
    multiplicity: int
    members: tuple[complex, ...]


def trim_leading(coefficients: Sequence[complex], relative_tolerance: float = 1e-14) -> np.ndarray:
    """Drop numerically zero leading coefficients (highest degree first)."""
    c = np.asarray(coefficients, dtype=complex)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        raise RootFinderError("the zero polynomial has no finite root set")
    nonzero = np.flatnonzero(np.abs(c) > relative_tolerance * scale)
    return c[nonzero[0]:]


def polynomial_roots(coefficients: Sequence[complex], tol: float = 1e-14, max_iterations: int = 500) -> np.ndarray:
    """
    All complex roots of a polynomial by the Aberth-Ehrlich iteration.

    Initial guesses lie on a circle whose radius comes from the Fujiwara
    bound, rotated off the real axis; the schedule is fixed so results are
    reproducible. A root is accepted when its correction is below ``tol``
    (relative) or its residual is at rounding level, which lets clusters of
    multiple roots terminate.

    Args:
        coefficients (Sequence[complex]): Highest degree first.
        tol (float): Relative correction threshold.
        max_iterations (int): Iteration cap.

    Returns:
        np.ndarray: The roots, in iteration order.

    Raises:
        RootFinderError: On the zero polynomial or when the cap is reached.
    """
    c = trim_leading(coefficients)
    degree = c.size - 1
    if degree == 0:
        return np.empty(0, dtype=complex)
    c = c / c[0]
    dc = np.polyder(c)
    magnitudes = np.abs(c)
    radius = 2.0 * max(magnitudes[j] ** (1.0 / j) for j in range(1, degree + 1))
    radius = max(radius, 1e-3)
    z = 0.5 * radius * np.exp(1j * (2.0 * np.pi * np.arange(degree) / degree + 0.4))
    if degree == 1:
        return np.array([-c[1]], dtype=complex)

    for iteration in range(max_iterations):
        pz = np.polyval(c, z)
        dpz = np.polyval(dc, z)
        bound = np.polyval(magnitudes, np.abs(z))
        settled = np.abs(pz) <= 16.0 * EPSILON * bound
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dpz != 0, pz / dpz, pz)
            difference = z[:, None] - z[None, :]
            np.fill_diagonal(difference, np.inf)
            repulsion = np.sum(1.0 / difference, axis=1)
            correction = ratio / (1.0 - ratio * repulsion)
        correction = np.where(np.isfinite(correction), correction, 0.0)
        correction = np.where(settled, 0.0, correction)
        z = z - correction
        if np.all(settled | (np.abs(correction) <= tol * (1.0 + np.abs(z)))):
            logger.debug("Aberth converged after %d iterations (degree %d)", iteration + 1, degree)
            return z
    raise RootFinderError(f"root finder did not converge within {max_iterations} iterations (degree {degree})")


def cluster_roots(roots: Sequence[complex], radius: float, merge_closest: bool = False) -> list[RootCluster]:
    """
    Group roots by single linkage within ``radius``.

    With ``merge_closest`` the closest pair is always merged, whatever its
    distance; used at discriminant points where a double root is known to
    exist.
    """
    roots = [complex(r) for r in roots]
    parent = list(range(len(roots)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        parent[find(i)] = find(j)

    closest = None
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            distance = abs(roots[i] - roots[j])
            if distance <= radius:
                union(i, j)
            if closest is None or distance < closest[0]:
                closest = (distance, i, j)
    if merge_closest and closest is not None:
        union(closest[1], closest[2])

    groups: dict[int, list[complex]] = {}
    for i, root in enumerate(roots):
        groups.setdefault(find(i), []).append(root)
    return [RootCluster(complex(np.mean(members)), len(members), tuple(members)) for members in groups.values()]
