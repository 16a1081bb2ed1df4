"""Small dense tensor kernels for surface (d = 2, 3) and ambient (n = 3, 4) indices.

Arrays may carry leading batch dimensions; the tensor indices are always the
trailing axes.  Alternating symbols are stored as explicit arrays.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np


class TensorInputError(ValueError):
    """Raised when a kernel receives non-finite or ill-shaped input."""


def _parity(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _alternating(dim):
    e = np.zeros((dim,) * dim)
    for p in permutations(range(dim)):
        e[p] = _parity(p)
    return e


# e[i, j, ...] = sign of the permutation (i, j, ...), 0 on repeated indices.
ALTERNATING = {dim: _alternating(dim) for dim in (2, 3, 4)}
ALTERNATING_2 = ALTERNATING[2]

# delta^{ab}_{cd} = e^{ab} e_{cd}, indexed [a, b, c, d]
DELTA_SYSTEM_2 = np.einsum("ab,cd->abcd", ALTERNATING_2, ALTERNATING_2)


def check_finite(*arrays, what="input"):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise TensorInputError(f"non-finite {what}: {np.asarray(a)!r}")


@dataclass(frozen=True)
class PermutationSymbols:
    """Alternating symbols plus the metric scaling of the Levi-Civita symbols.

    ``orientation`` flips the sign of both Levi-Civita symbols; it is -1 when
    the surface normal was reversed relative to the parameter ordering.
    """

    e: np.ndarray
    sqrt_det_S: np.ndarray
    orientation: int = 1

    @property
    def eps_lower(self):
        s = np.asarray(self.sqrt_det_S)[..., None, None]
        return self.orientation * s * self.e

    @property
    def eps_upper(self):
        s = np.asarray(self.sqrt_det_S)[..., None, None]
        return self.orientation * self.e / s


def permutation_symbols(g_cov, orientation=1):
    """Levi-Civita symbols for a 2D covariant metric (batched)."""
    g_cov = np.asarray(g_cov, dtype=float)
    check_finite(g_cov, what="metric")
    if g_cov.shape[-2:] != (2, 2):
        raise TensorInputError("permutation symbols are only provided for d = 2")
    det = g_cov[..., 0, 0] * g_cov[..., 1, 1] - g_cov[..., 0, 1] * g_cov[..., 1, 0]
    if np.any(det <= 0):
        raise TensorInputError("metric is not positive definite")
    return PermutationSymbols(ALTERNATING_2, np.sqrt(det), orientation)


def raise_first_index(B, S_inv):
    """Return B^a_b = S^{ag} B_{gb}."""
    B = np.asarray(B, dtype=float)
    S_inv = np.asarray(S_inv, dtype=float)
    check_finite(B, S_inv)
    return np.einsum("...ag,...gb->...ab", S_inv, B)


def delta_system(a, b, c, d):
    """Second-order delta system delta^{ab}_{cd} in two dimensions (1-based indices)."""
    for idx in (a, b, c, d):
        if idx not in (1, 2):
            raise IndexError(f"surface index {idx} out of range 1..2")
    return float(DELTA_SYSTEM_2[a - 1, b - 1, c - 1, d - 1])


def det2_via_delta(A):
    """Determinant of a 2x2 mixed tensor.

    This is the scalar for which A^a_c A^b_d - A^a_d A^b_c = det * delta^{ab}_{cd}.
    """
    A = np.asarray(A, dtype=float)
    check_finite(A)
    if A.shape[-2:] != (2, 2):
        raise TensorInputError(f"expected 2x2 tensor, got shape {A.shape}")
    return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]


def delta_residual(A, det=None):
    """Entrywise A^a_c A^b_d - A^a_d A^b_c - det * delta^{ab}_{cd}, shape (..., 2, 2, 2, 2)."""
    A = np.asarray(A, dtype=float)
    if det is None:
        det = det2_via_delta(A)
    quad = np.einsum("...ac,...bd->...abcd", A, A) - np.einsum("...ad,...bc->...abcd", A, A)
    return quad - np.asarray(det)[..., None, None, None, None] * DELTA_SYSTEM_2


def generalized_cross(*vectors):
    """w_i = e_{i j1 ... j(n-1)} v1^j1 ... v(n-1)^j(n-1) for n = 3 or 4.

    Accepts either n-1 separate vectors or a single array of shape (..., n-1, n).
    """
    if len(vectors) == 1:
        stack = np.asarray(vectors[0], dtype=float)
    else:
        stack = np.stack([np.asarray(v, dtype=float) for v in vectors], axis=-2)
    n = stack.shape[-1]
    if n not in (3, 4) or stack.shape[-2] != n - 1:
        raise TensorInputError(
            f"need n-1 vectors of length n with n in (3, 4); got {stack.shape[-2]} of length {n}")
    check_finite(stack, what="vector")
    e = ALTERNATING[n]
    if n == 3:
        return np.einsum("ijk,...j,...k->...i", e, stack[..., 0, :], stack[..., 1, :])
    return np.einsum("ijkl,...j,...k,...l->...i", e,
                     stack[..., 0, :], stack[..., 1, :], stack[..., 2, :])
