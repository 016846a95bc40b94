"""Labeled Hermitian kernels, the Markov product, and PSD certification.

A kernel on a finite labeled set is stored as a square complex matrix
indexed by an ordered tuple of distinct string labels.  Two kernels that
share exactly one label can be glued into their Markov product: the
result restricts to each operand on its own labels and factors every
cross entry through the shared point.

Positive semidefiniteness is certified by two independent routes, a
direct eigendecomposition and a Schur-complement reduction at a unit
basepoint, so each can serve as an oracle for the other.

All types are immutable after construction (arrays are write-locked)
and all operations are pure, so values are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BasepointNotUnitError,
    DimensionMismatchError,
    DuplicateLabelError,
    IntersectionNotSingletonError,
    LabelNotFoundError,
    NotHermitianError,
    NumericalFailureError,
)

#: Relative eigenvalue tolerance for PSD verdicts: the matrix passes when
#: lambda_min >= -tol * max(1, largest |eigenvalue|).
DEFAULT_PSD_TOL = 1e-9

#: Absolute tolerance on |K(x0, x0) - 1| for glue points and basepoints.
DEFAULT_BASEPOINT_TOL = 1e-12


def mirror_upper(matrix: np.ndarray) -> np.ndarray:
    """Return a copy whose lower triangle is the exact conjugate mirror
    of the upper triangle and whose diagonal has zero imaginary part.

    This is how every Hermitian matrix in this package is finalized:
    floating-point kernels (FMA contraction in complex multiplies) make
    "symmetric" formulas only approximately Hermitian, while the library
    contract is exact entrywise conjugate symmetry.
    """
    out = np.array(matrix, dtype=np.complex128)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {out.shape}")
    n = out.shape[0]
    i, j = np.triu_indices(n, 1)
    out[j, i] = out[i, j].conj()
    d = np.arange(n)
    out[d, d] = out[d, d].real
    return out


def _lock(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _is_hermitian_exact(m: np.ndarray) -> bool:
    return bool(np.array_equal(m, m.conj().T))


def _worst_hermitian_violation(m: np.ndarray) -> tuple[int, int, float]:
    dev = np.abs(m - m.conj().T)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return int(i), int(j), float(dev[i, j])


@dataclass(frozen=True, eq=False)
class IndexedKernel:
    """A Hermitian kernel over an ordered finite set of string labels.

    ``entries[i, j]`` is the kernel value between ``labels[i]`` and
    ``labels[j]``.  Construction validates that labels are distinct, the
    matrix is square of matching dimension, and conjugate symmetry holds
    exactly; nothing is repaired.
    """

    labels: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        labels = tuple(str(l) for l in self.labels)
        object.__setattr__(self, "labels", labels)
        seen = set()
        for l in labels:
            if l in seen:
                raise DuplicateLabelError(f"label {l!r} appears more than once")
            seen.add(l)
        if not labels:
            raise DimensionMismatchError("a kernel needs at least one label")
        m = np.array(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"entries must be square, got shape {m.shape}")
        if m.shape[0] != len(labels):
            raise DimensionMismatchError(
                f"{len(labels)} labels but a {m.shape[0]}x{m.shape[1]} matrix"
            )
        if not _is_hermitian_exact(m):
            i, j, dev = _worst_hermitian_violation(m)
            raise NotHermitianError(
                f"entries[{j},{i}] != conj(entries[{i},{j}]), deviation {dev:.3e}"
            )
        object.__setattr__(self, "entries", _lock(m))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelNotFoundError(f"label {label!r} not in kernel {self.labels}") from None

    def entry(self, s: str, t: str) -> complex:
        return complex(self.entries[self.index(s), self.index(t)])

    def restrict(self, labels) -> "IndexedKernel":
        """Kernel restricted to ``labels``, in the given order.

        Also serves as a pure reordering when ``labels`` is a permutation
        of this kernel's labels.
        """
        idx = [self.index(l) for l in labels]
        return IndexedKernel(tuple(labels), self.entries[np.ix_(idx, idx)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexedKernel):
            return NotImplemented
        return self.labels == other.labels and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __repr__(self) -> str:
        return f"IndexedKernel(labels={self.labels}, dim={self.dim})"


@dataclass(frozen=True)
class GluePoint:
    """The distinguished shared label at which two kernels are joined."""

    label: str


@dataclass(frozen=True, eq=False)
class SchurSplit:
    """Decomposition of a kernel at a unit basepoint s0.

    ``corner`` is the (s0, s0) entry, ``alpha`` the s0-row restricted to
    the remaining labels, and ``block`` the kernel on the remaining
    labels.  Positivity of the bordered matrix is equivalent to
    positivity of ``block - alpha* alpha``.
    """

    corner: complex
    alpha: np.ndarray
    block: np.ndarray
    basepoint_tol: float = DEFAULT_BASEPOINT_TOL

    def __post_init__(self):
        corner = complex(self.corner)
        alpha = np.array(self.alpha, dtype=np.complex128).reshape(-1)
        block = np.array(self.block, dtype=np.complex128)
        if block.ndim != 2 or block.shape[0] != block.shape[1]:
            raise DimensionMismatchError(f"block must be square, got shape {block.shape}")
        if alpha.shape[0] != block.shape[0]:
            raise DimensionMismatchError(
                f"alpha has length {alpha.shape[0]} but block is {block.shape[0]}x{block.shape[0]}"
            )
        if not _is_hermitian_exact(block):
            i, j, dev = _worst_hermitian_violation(block)
            raise NotHermitianError(
                f"block[{j},{i}] != conj(block[{i},{j}]), deviation {dev:.3e}"
            )
        if abs(corner - 1.0) > self.basepoint_tol:
            raise BasepointNotUnitError(
                f"corner entry is {corner}, not 1 within {self.basepoint_tol:g}"
            )
        object.__setattr__(self, "corner", corner)
        object.__setattr__(self, "alpha", _lock(alpha))
        object.__setattr__(self, "block", _lock(block))

    @property
    def dim(self) -> int:
        return self.block.shape[0]

    def schur_complement(self) -> np.ndarray:
        """The reduced matrix ``block - alpha* alpha`` (exactly Hermitian)."""
        reduced = self.block - np.outer(self.alpha.conj(), self.alpha)
        return mirror_upper(reduced)


@dataclass(frozen=True, eq=False)
class PsdCertificate:
    """Verdict of a positive semidefiniteness check, with witness.

    ``verdict`` is True when the minimum eigenvalue clears the relative
    threshold ``-tolerance_used * max(1, largest |eigenvalue|)``.  When
    False, ``witness`` holds a unit vector whose quadratic form against
    the tested matrix equals ``min_eigenvalue``.
    """

    verdict: bool
    min_eigenvalue: float
    witness: np.ndarray | None
    tolerance_used: float

    def __post_init__(self):
        if self.witness is not None:
            w = np.array(self.witness, dtype=np.complex128).reshape(-1)
            object.__setattr__(self, "witness", _lock(w))


def make_kernel(labels, entries) -> IndexedKernel:
    """Build an IndexedKernel, validating labels and Hermitian symmetry."""
    return IndexedKernel(tuple(labels), entries)


def _glue_label(x0) -> str:
    return x0.label if isinstance(x0, GluePoint) else str(x0)


def _check_unit_diagonal(k: IndexedKernel, label: str, tol: float) -> int:
    i = k.index(label)
    value = complex(k.entries[i, i])
    if abs(value - 1.0) > tol:
        raise BasepointNotUnitError(
            f"kernel entry at ({label!r}, {label!r}) is {value}, not 1 within {tol:g}"
        )
    return i


def markov_product(
    k1: IndexedKernel,
    k2: IndexedKernel,
    x0: GluePoint | str,
    *,
    basepoint_tol: float = DEFAULT_BASEPOINT_TOL,
) -> IndexedKernel:
    """Glue two kernels at their unique shared label.

    The result lives on the union of the label sets (operand-1 order
    followed by operand-2 order, with the glue point kept at its
    operand-1 position), restricts to each operand on its own labels,
    and has cross entries ``k1(s1, x0) * k2(x0, s2)``.

    Both kernels must carry the value 1 at the glue point diagonal,
    within ``basepoint_tol``.
    """
    label = _glue_label(x0)
    shared = set(k1.labels) & set(k2.labels)
    if shared != {label}:
        raise IntersectionNotSingletonError(
            f"label sets must intersect exactly in {{{label!r}}}, "
            f"got intersection {sorted(shared)}"
        )
    i1 = _check_unit_diagonal(k1, label, basepoint_tol)
    i2 = _check_unit_diagonal(k2, label, basepoint_tol)

    n1 = k1.dim
    rest2 = [i for i in range(k2.dim) if i != i2]
    n = n1 + len(rest2)
    labels = k1.labels + tuple(k2.labels[i] for i in rest2)

    out = np.zeros((n, n), dtype=np.complex128)
    out[:n1, :n1] = k1.entries
    # Bitwise copy of the second operand onto its (glue-point-shared)
    # positions; the single overlapping diagonal entry keeps operand 1's
    # value so both restrictions are exact when the corners agree.
    pos2 = np.array([i1 if i == i2 else n1 + rest2.index(i) for i in range(k2.dim)])
    out[np.ix_(pos2, pos2)] = k2.entries
    out[i1, i1] = k1.entries[i1, i1]

    rows1 = [i for i in range(n1) if i != i1]
    if rows1 and rest2:
        cross = np.outer(k1.entries[rows1, i1], k2.entries[i2, rest2])
        cols = np.arange(n1, n)
        out[np.ix_(rows1, cols)] = cross
        out[np.ix_(cols, rows1)] = cross.conj().T

    return IndexedKernel(labels, out)


def _eigen_certificate(matrix: np.ndarray, tol: float) -> PsdCertificate:
    if matrix.shape[0] == 0:
        return PsdCertificate(True, 0.0, None, float(tol))
    try:
        w, v = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver did not converge: {exc}") from exc
    scale = max(1.0, float(np.abs(w).max()))
    lam_min = float(w[0])
    verdict = lam_min >= -tol * scale
    witness = None if verdict else v[:, 0]
    return PsdCertificate(bool(verdict), lam_min, witness, float(tol))


def psd_check_eigen(k: IndexedKernel, tol: float = DEFAULT_PSD_TOL) -> PsdCertificate:
    """Certify positive semidefiniteness by direct eigendecomposition.

    The verdict is relative: ``lambda_min >= -tol * max(1, |lambda|_max)``.
    On a False verdict the certificate carries the minimizing unit
    eigenvector as witness.
    """
    return _eigen_certificate(k.entries, tol)


def schur_reduce(
    k: IndexedKernel,
    s0: str,
    *,
    basepoint_tol: float = DEFAULT_BASEPOINT_TOL,
) -> SchurSplit:
    """Split a kernel at a unit basepoint into (corner, alpha, block).

    ``alpha`` collects the s0-row over the remaining labels in kernel
    order; ``block`` is the kernel restricted to those labels.
    """
    i0 = k.index(_glue_label(s0))
    corner = complex(k.entries[i0, i0])
    if abs(corner - 1.0) > basepoint_tol:
        raise BasepointNotUnitError(
            f"kernel entry at ({s0!r}, {s0!r}) is {corner}, not 1 within {basepoint_tol:g}"
        )
    rest = [i for i in range(k.dim) if i != i0]
    alpha = k.entries[i0, rest]
    block = k.entries[np.ix_(rest, rest)]
    return SchurSplit(corner, alpha, block, basepoint_tol=basepoint_tol)


def psd_check_schur(split: SchurSplit, tol: float = DEFAULT_PSD_TOL) -> PsdCertificate:
    """Certify the bordered matrix via its Schur complement.

    The bordered matrix with unit corner is PSD exactly when
    ``block - alpha* alpha`` is, so the verdict (and the certificate's
    eigenvalue and witness) refer to the reduced matrix.
    """
    return _eigen_certificate(split.schur_complement(), tol)


def normalize_at_basepoint(k: IndexedKernel, x0: GluePoint | str) -> IndexedKernel:
    """Rescale a kernel so the diagonal entry at ``x0`` becomes exactly 1.

    Only legal when that entry is real and strictly positive (the
    rescaling then preserves positive semidefiniteness).  Never applied
    implicitly by any other operation.
    """
    i0 = k.index(_glue_label(x0))
    value = complex(k.entries[i0, i0])
    if not (value.imag == 0.0 and value.real > 0.0):
        raise BasepointNotUnitError(
            f"cannot normalize: entry at ({_glue_label(x0)!r}) is {value}, "
            "not real positive"
        )
    # Componentwise real division keeps conjugate symmetry exact and
    # makes the basepoint diagonal exactly 1.0.
    scaled = k.entries.real / value.real + 1j * (k.entries.imag / value.real)
    return IndexedKernel(k.labels, scaled)
