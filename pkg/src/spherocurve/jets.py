"""Derivative-jet arithmetic and finite-difference stencils.

A jet is an array whose leading axis stacks a value and its t-derivatives:
jet[k] = d^k x / dt^k.  Scalar jets have shape (k+1,), vector jets
(k+1, dim).  All rules below are exact for the stored orders, so curve
transformations built on them inherit analytic-quality derivatives.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 3

# binomial table C(k, j) for k, j <= MAX_ORDER
_BINOM = np.array([[1, 0, 0, 0], [1, 1, 0, 0], [1, 2, 1, 0], [1, 3, 3, 1]], dtype=float)


def jmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Leibniz product of two jets (elementwise in any trailing axes)."""
    k = min(len(a), len(b))
    out = [sum(_BINOM[r, j] * a[j] * b[r - j] for j in range(r + 1)) for r in range(k)]
    return np.array(out)


def jdot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Leibniz rule for the Euclidean inner product of two vector jets."""
    k = min(len(a), len(b))
    out = [
        sum(_BINOM[r, j] * float(a[j] @ b[r - j]) for j in range(r + 1))
        for r in range(k)
    ]
    return np.array(out)


def jdiv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Jet of a / b for a scalar-jet denominator b with b[0] != 0."""
    k = min(len(a), len(b))
    out = []
    for r in range(k):
        acc = a[r].copy() if isinstance(a[r], np.ndarray) else a[r]
        for j in range(r):
            acc = acc - _BINOM[r, j] * out[j] * b[r - j]
        out.append(acc / b[0])
    return np.array(out)


def jsqrt(a: np.ndarray) -> np.ndarray:
    """Jet of sqrt(a) for a scalar jet with a[0] > 0."""
    s0 = math.sqrt(float(a[0]))
    out = [s0]
    for r in range(1, len(a)):
        acc = a[r]
        for j in range(1, r):
            acc = acc - _BINOM[r, j] * out[j] * out[r - j]
        out.append(acc / (2.0 * s0))
    return np.array(out)


def jcompose(g: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Chain rule: jet of t -> g(phi(t)).

    `g` is the jet of the outer map at phi[0]; `phi` a scalar jet
    (phi[0] is the inner value, phi[1:] its t-derivatives).  Orders up
    to 3 via the Faa di Bruno expansion.
    """
    k = min(len(g), len(phi))
    out = [g[0]]
    if k > 1:
        out.append(g[1] * phi[1])
    if k > 2:
        out.append(g[2] * phi[1] ** 2 + g[1] * phi[2])
    if k > 3:
        out.append(g[3] * phi[1] ** 3 + 3.0 * g[2] * phi[1] * phi[2] + g[1] * phi[3])
    return np.array(out)


def fd_weights(nodes: np.ndarray, x0: float, order: int) -> np.ndarray:
    """Stencil weights for the `order`-th derivative at x0 from `nodes`.

    Solves the Vandermonde moment system; exact for polynomials of
    degree < len(nodes).  Nodes are shifted/scaled internally for
    conditioning.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    if order >= n:
        raise ValueError(f"need more than {order} nodes for derivative order {order}")
    h = max(np.max(np.abs(nodes - x0)), 1e-300)
    x = (nodes - x0) / h
    V = np.vander(x, n, increasing=True).T  # V[i, j] = x_j ** i
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    w = np.linalg.solve(V, rhs)
    return w / h**order


def window_indices(n_nodes: int, center: int, width: int) -> np.ndarray:
    """Index window of `width` nodes around `center`, clamped to the grid."""
    lo = min(max(center - width // 2, 0), n_nodes - width)
    return np.arange(lo, lo + width)
