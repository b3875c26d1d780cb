"""Selection-basis column conventions shared by schemas and PEP builders.

A layout with M inner steps stacks the algorithmic vectors as
``[w_star, w_0, v_0..v_M, e_0..e_M]`` (dimension 2M+4) and the function
values as ``[h_0..h_M]`` (h at the minimizer is identically zero).
"""

from __future__ import annotations

import numpy as np


def basis_dim(n_inner: int) -> int:
    return 2 * n_inner + 4


def value_dim(n_inner: int) -> int:
    return n_inner + 1


def wstar_col(n_inner: int) -> int:
    return 0


def w0_col(n_inner: int) -> int:
    return 1


def v_col(n_inner: int, k: int) -> int:
    if not 0 <= k <= n_inner:
        raise IndexError(f"v index {k} out of range for {n_inner} inner steps")
    return 2 + k


def e_col(n_inner: int, k: int) -> int:
    if not 0 <= k <= n_inner:
        raise IndexError(f"e index {k} out of range for {n_inner} inner steps")
    return 3 + n_inner + k


def unit(dim: int, idx: int) -> np.ndarray:
    u = np.zeros(dim)
    u[idx] = 1.0
    return u
