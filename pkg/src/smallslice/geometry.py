"""Subspaces of R^n, Grassmannian metrics, sphere sampling and delta-nets.

A codimension-k subspace F is stored through an orthonormal frame of its
orthogonal complement (k row vectors), because every downstream formula only
ever needs the distance d(F, x) = |P_{F^perp} x|.

The metric used between subspaces is the operator norm of the difference of
orthogonal projections, equal to the sine of the largest principal angle.
It lower-bounds the rotation-quotient metric on the Grassmannian, and the map
F -> d(F, theta) is 1-Lipschitz with respect to it, which is the only
property the net construction relies on.

Subspace and GrassmannNet are immutable after construction and safe to share
across threads; sampling takes an explicit generator, so concurrent callers
should derive one independent stream per task from a master seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NetConstructionError, NetCoverageError

_GRAM_TOL = 1e-10


def _orthonormal_rows(mat: np.ndarray) -> np.ndarray:
    """Orthonormalize the rows of a full-row-rank matrix (QR with sign fix)."""
    mat = np.asarray(mat, dtype=float)
    q, r = np.linalg.qr(mat.T)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    frame = (q * signs).T
    gram = frame @ frame.T
    if np.max(np.abs(gram - np.eye(frame.shape[0]))) > _GRAM_TOL:
        # one re-orthogonalization pass handles badly conditioned inputs
        q2, r2 = np.linalg.qr(frame.T)
        signs2 = np.sign(np.diag(r2))
        signs2[signs2 == 0.0] = 1.0
        frame = (q2 * signs2).T
    return frame


@dataclass(frozen=True, eq=False)
class Subspace:
    """A codimension-k subspace F of R^n, stored via a frame of F^perp.

    normal_frame has shape (codim, ambient_dim) with orthonormal rows.
    Instances are immutable; the frame array is marked read-only.
    """

    ambient_dim: int
    codim: int
    normal_frame: np.ndarray

    def __post_init__(self):
        frame = np.array(self.normal_frame, dtype=float)
        if not (1 <= self.codim <= self.ambient_dim):
            raise ValueError(f"codim must be in [1, {self.ambient_dim}], got {self.codim}")
        if frame.shape != (self.codim, self.ambient_dim):
            raise ValueError(
                f"normal_frame shape {frame.shape} does not match "
                f"(codim, ambient_dim) = ({self.codim}, {self.ambient_dim})"
            )
        gram = frame @ frame.T
        if np.max(np.abs(gram - np.eye(self.codim))) > _GRAM_TOL:
            raise ValueError("normal_frame rows are not orthonormal to 1e-10")
        frame.flags.writeable = False
        object.__setattr__(self, "normal_frame", frame)

    @classmethod
    def from_normals(cls, normals: np.ndarray) -> "Subspace":
        """Build the subspace orthogonal to the span of the given row vectors."""
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        frame = _orthonormal_rows(normals)
        return cls(ambient_dim=normals.shape[1], codim=normals.shape[0], normal_frame=frame)

    def basis(self) -> np.ndarray:
        """An orthonormal basis of F itself, shape (ambient_dim - codim, ambient_dim)."""
        # full SVD of the frame: the trailing right-singular vectors span F
        _, _, vt = np.linalg.svd(self.normal_frame, full_matrices=True)
        return vt[self.codim:]

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "codim": self.codim,
            "normal_frame": [float(v) for v in self.normal_frame.ravel()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Subspace":
        frame = np.array(d["normal_frame"], dtype=float).reshape(d["codim"], d["ambient_dim"])
        return cls(ambient_dim=int(d["ambient_dim"]), codim=int(d["codim"]), normal_frame=frame)


def distance_to_subspace(subspace: Subspace, x: np.ndarray) -> float:
    """Euclidean distance from x to the subspace, |P_{F^perp} x|."""
    x = np.asarray(x, dtype=float)
    if x.shape != (subspace.ambient_dim,):
        raise ValueError(f"x has shape {x.shape}, expected ({subspace.ambient_dim},)")
    return float(np.linalg.norm(subspace.normal_frame @ x))


def distances_to_subspace(subspace: Subspace, points: np.ndarray) -> np.ndarray:
    """Row-wise distances from an array of points, shape (B, ambient_dim)."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != subspace.ambient_dim:
        raise ValueError(f"points must have shape (B, {subspace.ambient_dim})")
    return np.linalg.norm(points @ subspace.normal_frame.T, axis=1)


def _min_sigma(products: np.ndarray) -> np.ndarray:
    """Smallest singular value of each (k, k) block in a stacked array."""
    k = products.shape[-1]
    if k == 1:
        return np.abs(products[..., 0, 0])
    if k == 2:
        # closed form via Frobenius norm and determinant of the 2x2 blocks
        fro2 = np.sum(products * products, axis=(-2, -1))
        det = (products[..., 0, 0] * products[..., 1, 1]
               - products[..., 0, 1] * products[..., 1, 0])
        disc = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * det * det, 0.0))
        return np.sqrt(np.maximum(0.5 * (fro2 - disc), 0.0))
    gram = products @ np.swapaxes(products, -2, -1)
    smallest = np.linalg.eigvalsh(gram)[..., 0]
    return np.sqrt(np.maximum(smallest, 0.0))


def projection_metric(first: Subspace, second: Subspace) -> float:
    """Operator-norm distance between the orthogonal projections onto the
    two subspaces; equals the sine of their largest principal angle."""
    if (first.ambient_dim, first.codim) != (second.ambient_dim, second.codim):
        raise ValueError("subspaces must share ambient dimension and codimension")
    a, b = first.normal_frame, second.normal_frame
    if a.tobytes() > b.tobytes():
        # fixed evaluation order makes the metric exactly symmetric in floats
        a, b = b, a
    products = a @ b.T
    smin = float(np.clip(_min_sigma(products[None])[0], 0.0, 1.0))
    return float(np.sqrt(max(0.0, 1.0 - smin * smin)))


def _frame_distances(stack: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Projection-metric distances from every stacked frame to one frame."""
    products = np.einsum("mkn,jn->mkj", stack, frame)
    smin = np.clip(_min_sigma(products), 0.0, 1.0)
    return np.sqrt(np.maximum(0.0, 1.0 - smin * smin))


def sample_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    """One point uniform on S^{n-1} (normalized standard Gaussian)."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    while True:
        v = rng.standard_normal(int(n))
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


def sample_sphere_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """count iid uniform points on S^{n-1}, shape (count, n)."""
    v = rng.standard_normal((int(count), int(n)))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    bad = norms[:, 0] <= 1e-12
    while np.any(bad):
        v[bad] = rng.standard_normal((int(bad.sum()), int(n)))
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        bad = norms[:, 0] <= 1e-12
    return v / norms


def sample_grassmannian(n: int, k: int, rng: np.random.Generator) -> Subspace:
    """Rotation-invariant random codimension-k subspace of R^n."""
    if int(k) != k or not (1 <= k <= n):
        raise ValueError(f"k must be an integer in [1, {n}], got {k!r}")
    frame = _orthonormal_rows(rng.standard_normal((int(k), int(n))))
    return Subspace(ambient_dim=int(n), codim=int(k), normal_frame=frame)


@dataclass
class GrassmannNet:
    """A finite covering set of subspaces with an empirical certificate.

    coverage_max_gap is the largest distance from any of coverage_probes
    random subspaces to the net; the construction only returns nets with
    coverage_max_gap < delta. Treat instances as immutable.
    """

    ambient_dim: int
    codim: int
    delta: float
    members: list[Subspace]
    coverage_probes: int
    coverage_max_gap: float
    separation: float = field(default=0.0)

    def __post_init__(self):
        if not self.members:
            raise ValueError("a net must have at least one member")
        if not (self.coverage_max_gap < self.delta):
            raise ValueError(
                f"uncertified net: coverage_max_gap={self.coverage_max_gap} "
                f"is not below delta={self.delta}"
            )

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def frame_stack(self) -> np.ndarray:
        """All member frames stacked, shape (size, codim, ambient_dim)."""
        stack = np.stack([m.normal_frame for m in self.members])
        stack.flags.writeable = False
        return stack

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "codim": self.codim,
            "delta": float(self.delta),
            "coverage_probes": self.coverage_probes,
            "coverage_max_gap": float(self.coverage_max_gap),
            "separation": float(self.separation),
            "members": [m.to_dict() for m in self.members],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GrassmannNet":
        return cls(
            ambient_dim=int(d["ambient_dim"]),
            codim=int(d["codim"]),
            delta=float(d["delta"]),
            members=[Subspace.from_dict(m) for m in d["members"]],
            coverage_probes=int(d["coverage_probes"]),
            coverage_max_gap=float(d["coverage_max_gap"]),
            separation=float(d.get("separation", 0.0)),
        )


def build_net(
    n: int,
    k: int,
    delta: float,
    rng: np.random.Generator,
    probe_count: int = 10_000,
    candidate_budget: int = 400,
    margin: float = 0.25,
    max_members: int = 1 << 16,
) -> GrassmannNet:
    """Greedy packing net on the Grassmannian, certified by random probes.

    Candidates are sampled rotation-invariantly; one is admitted whenever it
    is farther than delta*(1-margin) from every current member, and the
    build stops after candidate_budget consecutive rejections. The finished
    net is then probed with probe_count fresh subspaces; if any probe is at
    distance >= delta the net is rejected (never returned uncertified).
    """
    if not (0.0 < delta <= float(np.sqrt(2.0))):
        raise ValueError(f"delta must lie in (0, sqrt(2)], got {delta}")
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if probe_count < 1 or candidate_budget < 1:
        raise ValueError("probe_count and candidate_budget must be positive")

    threshold = delta * (1.0 - margin)
    first = sample_grassmannian(n, k, rng)
    frames = np.empty((256, k, n))
    frames[0] = first.normal_frame
    size = 1
    rejections = 0
    while rejections < candidate_budget:
        cand = sample_grassmannian(n, k, rng)
        dmin = float(_frame_distances(frames[:size], cand.normal_frame).min())
        if dmin > threshold:
            if size == frames.shape[0]:
                grown = np.empty((2 * size, k, n))
                grown[:size] = frames
                frames = grown
            frames[size] = cand.normal_frame
            size += 1
            rejections = 0
            if size > max_members:
                raise NetConstructionError(
                    f"net exceeded the size ceiling {max_members} at delta={delta}; "
                    f"increase delta or lower the dimension"
                )
        else:
            rejections += 1

    stack = frames[:size]
    max_gap = 0.0
    for _ in range(int(probe_count)):
        probe = sample_grassmannian(n, k, rng)
        gap = float(_frame_distances(stack, probe.normal_frame).min())
        if gap > max_gap:
            max_gap = gap
    if not (max_gap < delta):
        raise NetCoverageError(
            f"coverage probe found a gap of {max_gap:.6f} >= delta={delta}; "
            f"net of size {size} is not certified"
        )

    members = [
        Subspace(ambient_dim=n, codim=k, normal_frame=stack[i].copy()) for i in range(size)
    ]
    return GrassmannNet(
        ambient_dim=n,
        codim=k,
        delta=float(delta),
        members=members,
        coverage_probes=int(probe_count),
        coverage_max_gap=max_gap,
        separation=threshold,
    )
