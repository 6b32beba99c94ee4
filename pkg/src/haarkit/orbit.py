"""Moments of group-orbit random variables X: g -> rho(g) v.

Supported representations: the natural action on vectors, the order-n
tensor action, and conjugation g v g^T on symmetric matrices.  Moments
come from quadrature (the Reynolds average of tensor powers of X) or from
Monte Carlo sampling with entry-wise standard errors.

For conjugation orbits of symmetric 3x3 seeds the first two moments have
closed forms in the isotropic tensors; see the *_closed functions.  They
follow from the fourth-order column moments of a uniform rotation:

    E[u_i u_j u_k u_l] = (d_ij d_kl + d_ik d_jl + d_il d_jk) / 15
    E[u_i u_j v_k v_l] = (4 d_ij d_kl - d_ik d_jl - d_il d_jk) / 30

for distinct orthonormal columns u, v (d is the Kronecker delta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .haar import HaarDensity, integrate_tensor
from .sampling import SamplerConfig, sample
from .tensors import MAX_ENTRIES, Tensor, act_batch, as_tensor, outer_power

REPRESENTATIONS = ("natural", "tensor", "sym2")

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OrbitSpec:
    """A group, a representation, and the seed the orbit passes through."""

    group: str
    representation: str
    seed: Tensor

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}; "
                             f"expected one of {', '.join(REPRESENTATIONS)}")
        object.__setattr__(self, "seed", as_tensor(self.seed))
        if self.representation == "natural" and self.seed.order != 1:
            raise ValueError("the natural representation acts on vectors (order-1 tensors)")
        if self.representation == "sym2":
            if self.seed.order != 2:
                raise ValueError("conjugation acts on matrices (order-2 tensors)")
            a = self.seed.array
            if np.abs(a - a.T).max() > SYMMETRY_TOL:
                raise ValueError("conjugation orbits need a symmetric seed")
        expected_dim = 2 if self.group.endswith("2") else 3
        if self.seed.dim != expected_dim:
            raise ValueError(f"seed dimension {self.seed.dim} does not match group {self.group}")

    def values(self, mats: np.ndarray) -> np.ndarray:
        """Orbit points rho(g) v for a stack of group elements, (N, ...)."""
        return act_batch(mats, self.seed)


def _tensor_power_batch(values: np.ndarray, r: int) -> np.ndarray:
    """Per-sample r-fold outer product, flattened to (N, S^r)."""
    flat = values.reshape(values.shape[0], -1)
    out = flat
    for _ in range(r - 1):
        out = np.einsum("na,nb->nab", out, flat).reshape(values.shape[0], -1)
    return out


def _power_shape(spec: OrbitSpec, r: int) -> tuple[int, ...]:
    shape = spec.seed.entries.shape * r
    if spec.seed.dim ** (spec.seed.order * r) > MAX_ENTRIES:
        raise ValueError(f"moment of order {r} over an order-{spec.seed.order} seed "
                         f"exceeds the {MAX_ENTRIES}-entry budget")
    return shape


def moment(spec: OrbitSpec, r: int, density: HaarDensity, rule=None) -> Tensor:
    """The r-th moment m_r(X), an order r*n tensor, by quadrature."""
    if r < 1:
        raise ValueError("moment order must be positive")
    shape = _power_shape(spec, r)
    flat = integrate_tensor(
        lambda mats: _tensor_power_batch(spec.values(mats), r),
        spec.group, density, rule=rule, vectorized=True)
    return Tensor.from_array(np.asarray(flat).reshape(shape) if shape else float(np.asarray(flat)),
                             dim=spec.seed.dim)


def covariance(spec: OrbitSpec, density: HaarDensity, rule=None) -> Tensor:
    """Cov(X) = m2 - m1 (x) m1, the standard (positive-semidefinite) convention."""
    m1 = moment(spec, 1, density, rule=rule)
    m2 = moment(spec, 2, density, rule=rule)
    return m2 - outer_power(m1, 2)


def mc_moments(spec: OrbitSpec, r: int, config: SamplerConfig) -> tuple[Tensor, Tensor]:
    """Monte Carlo m_r(X) with entry-wise standard errors of the mean."""
    if r < 1:
        raise ValueError("moment order must be positive")
    shape = _power_shape(spec, r)
    batch = sample(config)
    values = _tensor_power_batch(spec.values(batch.matrices), r)
    n = values.shape[0]
    mean = values.mean(axis=0)
    if n > 1:
        stderr = values.std(axis=0, ddof=1) / np.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    dim = spec.seed.dim
    return (Tensor.from_array(mean.reshape(shape), dim=dim),
            Tensor.from_array(stderr.reshape(shape), dim=dim))


# ---------------------------------------------------------------------------
# Isotropic order-4 tensors and the conjugation-orbit closed forms (D = 3)


def diagonal_delta(dim: int = 3) -> Tensor:
    """The order-4 tensor with 1 where i = j = k = l (not rotation-invariant)."""
    arr = np.zeros((dim,) * 4)
    for i in range(dim):
        arr[i, i, i, i] = 1.0
    return Tensor.from_array(arr, dim=dim)


def identity_pair(dim: int = 3) -> Tensor:
    """delta_ij delta_kl."""
    eye = np.eye(dim)
    return Tensor.from_array(np.einsum("ij,kl->ijkl", eye, eye), dim=dim)


def isotropic_basis(dim: int = 3) -> list[Tensor]:
    """The three products of Kronecker deltas spanning invariant order-4 tensors."""
    eye = np.eye(dim)
    return [
        Tensor.from_array(np.einsum("ij,kl->ijkl", eye, eye), dim=dim),
        Tensor.from_array(np.einsum("ik,jl->ijkl", eye, eye), dim=dim),
        Tensor.from_array(np.einsum("il,jk->ijkl", eye, eye), dim=dim),
    ]


def decompose(t: Tensor, basis: list[Tensor]) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of t in a tensor basis and the residual."""
    a = np.stack([b.entries.ravel() for b in basis], axis=1)
    coeffs, *_ = np.linalg.lstsq(a, t.entries.ravel(), rcond=None)
    residual = float(np.abs(t.entries.ravel() - a @ coeffs).max())
    return coeffs, residual


def _invariants(v) -> tuple[float, float]:
    a = as_tensor(v).array
    return float(np.trace(a)), float(np.trace(a @ a))


def sym2_mean_closed(v) -> Tensor:
    """E[g v g^T] = (Tr v / 3) I for uniform g in SO(3) or O(3)."""
    t1, _ = _invariants(v)
    return Tensor.from_array(t1 / 3.0 * np.eye(3))


def sym2_second_moment_closed(v) -> Tensor:
    """E[(g v g^T) (x) (g v g^T)] in the isotropic basis."""
    t1, t2 = _invariants(v)
    j_pair, j_ik, j_il = isotropic_basis(3)
    c_pair = (2.0 * t1**2 - t2) / 15.0
    c_cross = (3.0 * t2 - t1**2) / 30.0
    return c_pair * j_pair + c_cross * (j_ik + j_il)


def sym2_covariance_closed(v) -> Tensor:
    """Cov of a conjugation orbit: a multiple of the symmetric traceless projector.

    Cov = ((3 Tr(v^2) - (Tr v)^2) / 15) * (Sym - (1/3) delta_ij delta_kl),
    with Sym_ijkl = (delta_ik delta_jl + delta_il delta_jk) / 2.  Zero
    exactly when v is a multiple of the identity.
    """
    t1, t2 = _invariants(v)
    j_pair, j_ik, j_il = isotropic_basis(3)
    sym = 0.5 * (j_ik + j_il)
    return ((3.0 * t2 - t1**2) / 15.0) * (sym + (-1.0 / 3.0) * j_pair)
