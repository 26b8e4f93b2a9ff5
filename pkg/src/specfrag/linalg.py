"""Dense real-symmetric linear algebra underneath the fragmentation metrics.

Every matrix in this package is small (a few hundred rows), so storage is
plain dense float64 throughout. Decompositions are validated on the spot:
orthogonality, residual and completeness checks run right after each solve,
and a violation raises ConvergenceError instead of letting bad numbers
propagate into the metrics.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, InputError

ORTHOGONALITY_TOL = 1e-10
RESIDUAL_TOL = 1e-10
COMPLETENESS_TOL = 1e-10
BLOCK_UNITARY_TOL = 1e-12


class SymmetricMatrix:
    """Dense real symmetric matrix.

    The lower triangle of the input is authoritative; construction mirrors
    it onto the upper triangle, so ``entries[i, j] == entries[j, i]`` holds
    exactly (bitwise), not merely within roundoff. Entries are frozen after
    construction and safe to share across threads.
    """

    __slots__ = ("entries",)

    def __init__(self, entries) -> None:
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise InputError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(a)):
            raise InputError("matrix entries must be finite")
        lower = np.tril(a)
        full = lower + lower.T
        np.fill_diagonal(full, a.diagonal())
        full.flags.writeable = False
        object.__setattr__(self, "entries", full)

    def __setattr__(self, name, value):
        raise AttributeError("SymmetricMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __repr__(self) -> str:
        return f"SymmetricMatrix(dim={self.dim})"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric
    matrix. Column i of ``eigenvectors`` holds the coefficients of
    eigenstate i in the basis the matrix was written in."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])


@dataclass(frozen=True)
class ShellGroup:
    """One degenerate subspace: a label, the basis indices it contains and
    their shared zeroth-order energy."""

    label: int
    indices: tuple[int, ...]
    energy: float


@dataclass(frozen=True)
class ShellPartition:
    """Ordered grouping of basis indices into degenerate subspaces.

    Groups must be disjoint, jointly cover 0..dim-1 and have strictly
    increasing energies.
    """

    groups: tuple[ShellGroup, ...]

    def __post_init__(self):
        if not self.groups:
            raise InputError("partition needs at least one group")
        seen: set[int] = set()
        total = 0
        for g in self.groups:
            if not g.indices:
                raise InputError(f"group {g.label} is empty")
            total += len(g.indices)
            seen.update(g.indices)
        if len(seen) != total:
            raise InputError("partition groups overlap")
        if seen != set(range(total)):
            raise InputError("partition groups must jointly cover 0..dim-1")
        energies = [g.energy for g in self.groups]
        if any(b <= a for a, b in zip(energies, energies[1:])):
            raise InputError("group energies must strictly increase")

    @property
    def dim(self) -> int:
        return sum(len(g.indices) for g in self.groups)

    def labels(self) -> tuple[int, ...]:
        return tuple(g.label for g in self.groups)

    def group(self, label: int) -> ShellGroup:
        for g in self.groups:
            if g.label == label:
                return g
        raise InputError(f"no group labeled {label!r} in partition")


def eigh(m: SymmetricMatrix) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric matrix, validated.

    Raises InputError for non-finite entries and ConvergenceError (naming
    the matrix dimension) if the solver fails or the result violates the
    orthogonality / residual / completeness tolerances.
    """
    h = m.entries
    if not np.all(np.isfinite(h)):
        raise InputError("matrix entries must be finite")
    try:
        vals, vecs = scipy.linalg.eigh(h)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(
            f"eigensolver did not converge on a {m.dim}x{m.dim} matrix"
        ) from exc

    dim = m.dim
    ortho = np.abs(vecs.T @ vecs - np.eye(dim)).max()
    if ortho > ORTHOGONALITY_TOL:
        raise ConvergenceError(
            f"eigenvectors of a {dim}x{dim} matrix lost orthogonality "
            f"(deviation {ortho:.3e})"
        )
    fro = np.linalg.norm(h)
    residual = np.linalg.norm(h @ vecs - vecs * vals, axis=0).max()
    if residual > RESIDUAL_TOL * fro:
        raise ConvergenceError(
            f"eigenpair residual {residual:.3e} exceeds tolerance for a "
            f"{dim}x{dim} matrix (|H|_F = {fro:.3e})"
        )
    completeness = np.abs((vecs ** 2).sum(axis=1) - 1.0).max()
    if completeness > COMPLETENESS_TOL:
        raise ConvergenceError(
            f"eigenvector completeness defect {completeness:.3e} on a "
            f"{dim}x{dim} matrix"
        )
    if np.any(np.diff(vals) < 0):
        raise ConvergenceError(f"eigenvalues of a {dim}x{dim} matrix not ascending")

    vals.flags.writeable = False
    vecs.flags.writeable = False
    return SpectralDecomposition(eigenvalues=vals, eigenvectors=vecs)


def projection_onto_subset(d: SpectralDecomposition, subset: Iterable[int]) -> np.ndarray:
    """Per-eigenstate weight inside a set of basis states.

    Returns w_i = sum over alpha in subset of c_i^alpha squared, one value
    per eigenstate. Each w_i lies in [0, 1] and the w_i sum to |subset|
    (completeness of the truncated space).
    """
    idx = np.asarray(list(subset), dtype=int)
    if idx.size == 0:
        raise InputError("subset must be nonempty")
    if np.unique(idx).size != idx.size:
        raise InputError("subset contains duplicate basis indices")
    if idx.min() < 0 or idx.max() >= d.dim:
        raise InputError(
            f"basis index out of range: subset spans [{idx.min()}, {idx.max()}] "
            f"but dim = {d.dim}"
        )
    return (d.eigenvectors[idx, :] ** 2).sum(axis=0)


def random_block_unitary(partition: ShellPartition, seed: int) -> np.ndarray:
    """Random real orthogonal matrix that is block-diagonal on a partition.

    Each diagonal block is an orthogonalized standard-normal draw from a
    PCG64 generator, so the result is deterministic per seed. Entries
    outside the diagonal blocks are exactly zero, and U^T U = I holds to
    1e-12 or better (modified Gram-Schmidt with a second pass).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    dim = partition.dim
    u = np.zeros((dim, dim))
    for g in partition.groups:
        idx = np.asarray(g.indices, dtype=int)
        u[np.ix_(idx, idx)] = _random_orthogonal(rng, idx.size)
    return u


def _random_orthogonal(rng: np.random.Generator, k: int) -> np.ndarray:
    for _ in range(8):
        q = rng.standard_normal((k, k))
        if _mgs(q):
            return q
    raise ConvergenceError(f"could not orthogonalize a random {k}x{k} block")


def _mgs(q: np.ndarray) -> bool:
    # in-place modified Gram-Schmidt; the second inner pass keeps the
    # orthogonality defect near machine precision even for clustered draws
    k = q.shape[0]
    for j in range(k):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= (q[:, i] @ q[:, j]) * q[:, i]
        nrm = np.linalg.norm(q[:, j])
        if nrm < 1e-8:
            return False
        q[:, j] /= nrm
    return True


def dump_matrix_csv(m: SymmetricMatrix, path, metadata: dict | None = None) -> None:
    """Debug dump of a matrix: ``#`` metadata lines, then one row per basis
    index."""
    _dump_rows(path, "symmetric-matrix", metadata, m.entries)


def dump_decomposition_csv(d: SpectralDecomposition, path, metadata: dict | None = None) -> None:
    """Debug dump of a decomposition: eigenvalue column followed by the
    eigenvector coefficients of each eigenstate (one eigenstate per row)."""
    rows = np.column_stack([d.eigenvalues, d.eigenvectors.T])
    _dump_rows(path, "spectral-decomposition", metadata, rows)


def _dump_rows(path, kind: str, metadata: dict | None, rows: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# kind: {kind}\n")
        fh.write(f"# rows: {rows.shape[0]}\n")
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}: {value}\n")
        for row in rows:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")
