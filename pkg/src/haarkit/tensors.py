"""Dense tensors of arbitrary order with the rotation action.

A Tensor is a dim-D, order-n dense array of D^n reals.  The action of a
group element is (g * T)_{i1..in} = g_{i1 j1} ... g_{in jn} T_{j1..jn},
computed as n successive mode contractions (cost n * D^(n+1)) rather than
one D^n x D^n operator product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

# Per-tensor entry budget: 3^10.  Orders above this are a sign the dense
# representation is the wrong tool, independent of available memory.
MAX_ENTRIES = 3**10


@dataclass(frozen=True, eq=False)
class Tensor:
    dim: int
    order: int
    entries: np.ndarray  # shape (dim,) * order, read-only

    @classmethod
    def from_array(cls, array, dim: int | None = None) -> "Tensor":
        arr = np.array(array, dtype=float)
        d = dim if dim is not None else (arr.shape[0] if arr.ndim else 1)
        if arr.shape != (d,) * arr.ndim:
            raise ValueError(f"tensor axes must all have length {d}, got shape {arr.shape}")
        if d ** arr.ndim > MAX_ENTRIES:
            raise ValueError(f"order-{arr.ndim} tensor over dimension {d} exceeds the "
                             f"{MAX_ENTRIES}-entry budget")
        arr.setflags(write=False)
        return cls(dim=d, order=arr.ndim, entries=arr)

    @classmethod
    def zeros(cls, dim: int, order: int) -> "Tensor":
        return cls.from_array(np.zeros((dim,) * order), dim=dim)

    @classmethod
    def basis_element(cls, dim: int, index: tuple[int, ...]) -> "Tensor":
        arr = np.zeros((dim,) * len(index))
        arr[index] = 1.0
        return cls.from_array(arr, dim=dim)

    @property
    def array(self) -> np.ndarray:
        return self.entries

    def norm_inf(self) -> float:
        return float(np.abs(self.entries).max()) if self.entries.size else 0.0

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_like(other)
        return Tensor.from_array(self.entries + other.entries, dim=self.dim)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_like(other)
        return Tensor.from_array(self.entries - other.entries, dim=self.dim)

    def __mul__(self, scalar: float) -> "Tensor":
        return Tensor.from_array(self.entries * float(scalar), dim=self.dim)

    __rmul__ = __mul__

    def _check_like(self, other: "Tensor") -> None:
        if (self.dim, self.order) != (other.dim, other.order):
            raise ValueError(f"tensor mismatch: ({self.dim}, order {self.order}) vs "
                             f"({other.dim}, order {other.order})")

    def __repr__(self) -> str:
        return f"Tensor(dim={self.dim}, order={self.order})"

    # -- serialization: {"dim": D, "order": n, "entries": [flat row-major]} --

    def to_json(self) -> str:
        return json.dumps({
            "dim": self.dim,
            "order": self.order,
            "entries": [float(x) for x in self.entries.ravel()],
        })

    @classmethod
    def from_json(cls, text: str) -> "Tensor":
        data = json.loads(text)
        if not isinstance(data, dict) or not {"dim", "order", "entries"} <= data.keys():
            raise ValueError('tensor JSON needs the keys "dim", "order", and "entries"')
        dim, order = int(data["dim"]), int(data["order"])
        entries = np.asarray(data["entries"], dtype=float)
        if entries.size != dim**order:
            raise ValueError(f"expected {dim}^{order} = {dim**order} entries, "
                             f"got {entries.size}")
        return cls.from_array(entries.reshape((dim,) * order), dim=dim)


def as_tensor(value, dim: int | None = None) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor.from_array(np.asarray(value, dtype=float), dim=dim)


def act(g, t: Tensor) -> Tensor:
    """Transform a tensor by one group element, mode by mode."""
    m = np.asarray(g, dtype=float)
    if m.shape != (t.dim, t.dim):
        raise ValueError(f"element is {m.shape}, tensor has dimension {t.dim}")
    out = t.entries
    # consume the leading axis and append the rotated index; after n steps
    # the axis order is restored
    for _ in range(t.order):
        out = np.tensordot(out, m, axes=([0], [1]))
    return Tensor.from_array(out, dim=t.dim)


def act_batch(mats: np.ndarray, t: Tensor) -> np.ndarray:
    """Transform one tensor by a whole (N, D, D) stack, returning (N, ...)."""
    out = np.broadcast_to(t.entries, mats.shape[:1] + t.entries.shape)
    for _ in range(t.order):
        out = np.einsum("nij,nj...->n...i", mats, out)
    return np.ascontiguousarray(out) if t.order == 0 else out


def outer_power(t: Tensor, r: int) -> Tensor:
    """The r-fold outer product of a tensor with itself."""
    if r < 1:
        raise ValueError("outer power needs r >= 1")
    out = t.entries
    for _ in range(r - 1):
        out = np.multiply.outer(out, t.entries)
    return Tensor.from_array(out, dim=t.dim)
