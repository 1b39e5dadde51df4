"""Dense complex matrix kernel.

Construction and arithmetic for square complex matrices, the eigenvalue
and singular-value sequence calculus with a canonical deterministic
ordering, and the factorizations (polar, spectral projection, four-unitary
split) the verification suites are built on.

Eigen- and singular-value decompositions are delegated to LAPACK through
numpy (Hessenberg reduction plus implicitly shifted QR with the driver's
internal sweep cap); non-convergence is surfaced as `NumericalFailure`,
never as silent garbage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NumericalFailure, SingularMatrixError

#: Default relative threshold below which an eigenvalue is classified zero.
ZERO_TOL_REL = 1e-10

#: Condition-number cap beyond which shifted operators are treated as singular.
CONDITION_CAP = 1e12

_TWO_PI = 2.0 * np.pi


def _as_square_array(entries) -> np.ndarray:
    arr = np.array(entries, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ContractViolation("matrix dimension must be positive")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ContractViolation("matrix entries must be finite")
    return arr


class ComplexMatrix:
    """Immutable square complex matrix with a cached operator 2-norm.

    Entries are validated to be finite at construction; every arithmetic
    operation returns a new instance through the same validation, so the
    finiteness invariant survives all operations.  Instances are safe to
    share between concurrent workers.
    """

    __slots__ = ("_entries", "_norm_cache")

    def __init__(self, entries) -> None:
        arr = _as_square_array(entries)
        arr.setflags(write=False)
        self._entries = arr
        self._norm_cache: float | None = None

    @classmethod
    def identity(cls, dim: int) -> "ComplexMatrix":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def zeros(cls, dim: int) -> "ComplexMatrix":
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @classmethod
    def diagonal(cls, values) -> "ComplexMatrix":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only view of the underlying complex array."""
        return self._entries

    @property
    def norm(self) -> float:
        """Operator 2-norm (largest singular value), computed once."""
        if self._norm_cache is None:
            self._norm_cache = float(np.linalg.norm(self._entries, 2))
        return self._norm_cache

    def trace(self) -> complex:
        return complex(np.trace(self._entries))

    def adjoint(self) -> "ComplexMatrix":
        return ComplexMatrix(self._entries.conj().T)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        defect = np.abs(self._entries - self._entries.conj().T).max()
        return bool(defect <= tol * max(1.0, self.norm))

    def __add__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self._entries + other._entries)

    def __sub__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self._entries - other._entries)

    def __neg__(self) -> "ComplexMatrix":
        return ComplexMatrix(-self._entries)

    def __mul__(self, scalar: complex) -> "ComplexMatrix":
        return ComplexMatrix(self._entries * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if self.dim != other.dim:
            raise ContractViolation(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )
        return ComplexMatrix(self._entries @ other._entries)

    def allclose(self, other: "ComplexMatrix", atol: float = 1e-12) -> bool:
        return bool(np.abs(self._entries - other._entries).max() <= atol)

    def __repr__(self) -> str:
        return f"ComplexMatrix(dim={self.dim})"


@dataclass(frozen=True)
class EigenvalueSequence:
    """Eigenvalues in canonical order: nonincreasing modulus, ties broken by
    ascending argument in [0, 2*pi).  Values classified as zero are not
    stored; their count is kept in ``zero_tail_count`` so that
    ``len(values) + zero_tail_count == source_dim``.
    """

    values: tuple[complex, ...]
    zero_tail_count: int
    source_dim: int

    def __post_init__(self) -> None:
        if self.zero_tail_count < 0:
            raise ContractViolation("zero_tail_count must be nonnegative")
        if len(self.values) + self.zero_tail_count != self.source_dim:
            raise ContractViolation(
                "values length plus zero tail must equal source_dim"
            )
        mods = [abs(v) for v in self.values]
        for j in range(len(mods) - 1):
            if mods[j] < mods[j + 1]:
                raise ContractViolation("moduli must be nonincreasing")

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(np.asarray(self.values, dtype=np.complex128))

    def padded(self) -> np.ndarray:
        """Values followed by the classified-zero tail, length source_dim."""
        out = np.zeros(self.source_dim, dtype=np.complex128)
        out[: len(self.values)] = self.values
        return out

    @classmethod
    def from_unordered(
        cls, values, zero_tol_abs: float, source_dim: int | None = None
    ) -> "EigenvalueSequence":
        """Canonicalize an unordered spectrum listing.

        Sorts by nonincreasing modulus with the argument tie-break (the
        argument of a negative real is pi), then splits off every value of
        modulus <= ``zero_tol_abs`` into the zero tail.
        """
        vals = np.asarray(values, dtype=np.complex128).ravel()
        if source_dim is None:
            source_dim = vals.size
        mods = np.abs(vals)
        args = np.mod(np.angle(vals), _TWO_PI)
        order = np.lexsort((args, -mods))
        vals = vals[order]
        mods = mods[order]
        keep = mods > zero_tol_abs
        kept = vals[keep]
        return cls(
            values=tuple(complex(v) for v in kept),
            zero_tail_count=int(source_dim - kept.size),
            source_dim=int(source_dim),
        )


@dataclass(frozen=True, eq=False)
class SingularSequence:
    """Nonincreasing nonnegative real sequence; ``source_dim`` is set when
    the sequence came from a concrete matrix and absent for abstract ones.
    """

    values: np.ndarray
    source_dim: int | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64).ravel()
        if arr.size and not np.all(np.isfinite(arr)):
            raise ContractViolation("singular values must be finite")
        if arr.size and arr.min() < 0.0:
            raise ContractViolation("singular values must be nonnegative")
        if arr.size > 1 and np.any(np.diff(arr) > 0.0):
            raise ContractViolation("singular values must be nonincreasing")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    @classmethod
    def sorted(cls, values, source_dim: int | None = None) -> "SingularSequence":
        arr = np.sort(np.asarray(values, dtype=np.float64).ravel())[::-1]
        return cls(values=arr.copy(), source_dim=source_dim)


@dataclass(frozen=True)
class PolarFactors:
    """Factors of A = unitary * positive with the unitary completed on the
    kernel so it is a genuine unitary even for singular input."""

    unitary: ComplexMatrix
    positive: ComplexMatrix


def _eigvals(a: ComplexMatrix) -> np.ndarray:
    try:
        return np.linalg.eigvals(a.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed: {exc}") from exc


def _svd(arr: np.ndarray, compute_uv: bool = True):
    try:
        return np.linalg.svd(arr, compute_uv=compute_uv)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"singular value decomposition failed: {exc}") from exc


def eigenvalue_sequence(
    a: ComplexMatrix, zero_tol_rel: float = ZERO_TOL_REL
) -> EigenvalueSequence:
    """Full spectrum of ``a`` with algebraic multiplicity, canonically ordered.

    Parameters
    ----------
    a:
        Square complex matrix.
    zero_tol_rel:
        Relative threshold in [0, 1); eigenvalues of modulus at most
        ``zero_tol_rel * norm(a)`` are classified zero and counted in the
        tail instead of being listed.

    Raises
    ------
    NumericalFailure
        If the QR iteration does not converge within the LAPACK driver's
        sweep cap.
    """
    if not 0.0 <= zero_tol_rel < 1.0:
        raise ContractViolation("zero_tol_rel must lie in [0, 1)")
    vals = _eigvals(a)
    return EigenvalueSequence.from_unordered(
        vals, zero_tol_abs=zero_tol_rel * a.norm, source_dim=a.dim
    )


def singular_value_sequence(a: ComplexMatrix) -> SingularSequence:
    """Singular values of ``a`` in nonincreasing order, length ``a.dim``."""
    s = _svd(a.entries, compute_uv=False)
    return SingularSequence(values=np.asarray(s, dtype=np.float64), source_dim=a.dim)


def polar_decompose(a: ComplexMatrix) -> PolarFactors:
    """Polar factorization A = U * |A| with U unitary.

    U = W V* and |A| = V S V* from the singular decomposition A = W S V*;
    kernel directions are thereby completed to a full unitary, which the
    trace pipelines need on both sides of A.
    """
    w, s, vh = _svd(a.entries)
    unitary = w @ vh
    positive = (vh.conj().T * s) @ vh
    # kill the roundoff asymmetry so downstream Hermitian checks are exact
    positive = 0.5 * (positive + positive.conj().T)
    return PolarFactors(unitary=ComplexMatrix(unitary), positive=ComplexMatrix(positive))


def spectral_projection(a: ComplexMatrix, cutoff: float) -> ComplexMatrix:
    """Orthogonal projection onto eigenvectors of Hermitian PSD ``a`` with
    eigenvalue >= ``cutoff``.

    The input must be Hermitian positive semidefinite within 1e-10 relative
    tolerance, otherwise `ContractViolation` is raised.  The output commutes
    with ``a`` up to roundoff because both are functions of the same
    eigenbasis.
    """
    if cutoff <= 0.0:
        raise ContractViolation("cutoff must be positive")
    scale = max(1.0, a.norm)
    arr = a.entries
    herm_defect = float(np.abs(arr - arr.conj().T).max())
    if herm_defect > 1e-10 * scale:
        raise ContractViolation(
            f"matrix is not Hermitian within tolerance (defect {herm_defect:.3e})"
        )
    sym = 0.5 * (arr + arr.conj().T)
    try:
        evals, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Hermitian eigensolve failed: {exc}") from exc
    if evals.size and float(evals.min()) < -1e-10 * scale:
        raise ContractViolation(
            f"matrix is not positive semidefinite within tolerance "
            f"(min eigenvalue {float(evals.min()):.3e})"
        )
    sel = evals >= cutoff
    basis = vecs[:, sel]
    proj = basis @ basis.conj().T
    proj = 0.5 * (proj + proj.conj().T)
    return ComplexMatrix(proj)


def four_unitary_decomposition(
    a: ComplexMatrix,
) -> tuple[tuple[complex, ...], tuple[ComplexMatrix, ...]]:
    """Write ``a`` as a linear combination of four unitaries.

    Splits a into Hermitian parts a = H + iK, scales each by norm(a) so the
    spectrum lies in [-1, 1], and applies X -> X + i*sqrt(I - X^2) (principal
    square root, evaluated in the eigenbasis so each factor is unitary to
    machine precision).  The zero matrix is returned by convention as all-zero
    coefficients with placeholder unitaries (I, I, iI, -iI).
    """
    dim = a.dim
    s = a.norm
    if s == 0.0:
        eye = ComplexMatrix.identity(dim)
        return (
            (0j, 0j, 0j, 0j),
            (eye, eye, 1j * eye, -1j * eye),
        )
    arr = a.entries
    herm = 0.5 * (arr + arr.conj().T)
    skew = (arr - arr.conj().T) / 2j

    def _unitary_pair(x: np.ndarray) -> tuple[ComplexMatrix, ComplexMatrix]:
        evals, vecs = np.linalg.eigh(0.5 * (x + x.conj().T))
        evals = np.clip(evals, -1.0, 1.0)
        phases = evals + 1j * np.sqrt(1.0 - evals**2)
        u = (vecs * phases) @ vecs.conj().T
        return ComplexMatrix(u), ComplexMatrix(u.conj().T)

    u1, u2 = _unitary_pair(herm / s)
    u3, u4 = _unitary_pair(skew / s)
    coeffs = (complex(s / 2), complex(s / 2), 1j * s / 2, 1j * s / 2)
    return coeffs, (u1, u2, u3, u4)


def resolvent_identity_residual(
    a: ComplexMatrix, b: ComplexMatrix, lam: complex
) -> float:
    """Operator-norm residual of the shifted-inverse exchange identity
    ``(lam - BA)^{-1} = lam^{-1} (I + B (lam - AB)^{-1} A)``.

    Raises `SingularMatrixError` when either shifted operator has condition
    number beyond `CONDITION_CAP`.
    """
    if a.dim != b.dim:
        raise ContractViolation("operands must have equal dimension")
    if lam == 0:
        raise ContractViolation("the shift must be nonzero")
    eye = np.eye(a.dim, dtype=np.complex128)
    shifted_ab = lam * eye - a.entries @ b.entries
    shifted_ba = lam * eye - b.entries @ a.entries
    for label, m in (("lam - AB", shifted_ab), ("lam - BA", shifted_ba)):
        cond = float(np.linalg.cond(m, 2))
        if not np.isfinite(cond) or cond > CONDITION_CAP:
            raise SingularMatrixError(
                f"{label} is numerically singular (condition {cond:.3e})"
            )
    lhs = np.linalg.inv(shifted_ba)
    rhs = (eye + b.entries @ np.linalg.inv(shifted_ab) @ a.entries) / lam
    return float(np.linalg.norm(lhs - rhs, 2))


def algebraic_multiplicity(
    a: ComplexMatrix, lam: complex, cluster_tol: float
) -> int:
    """Number of eigenvalues of ``a`` within ``cluster_tol * max(1, norm(a))``
    of ``lam``, counted with algebraic multiplicity."""
    if cluster_tol <= 0.0:
        raise ContractViolation("cluster_tol must be positive")
    vals = _eigvals(a)
    radius = cluster_tol * max(1.0, a.norm)
    return int(np.count_nonzero(np.abs(vals - lam) <= radius))


def commutator(x: ComplexMatrix, y: ComplexMatrix) -> ComplexMatrix:
    """XY - YX."""
    if x.dim != y.dim:
        raise ContractViolation("commutator operands must have equal dimension")
    return ComplexMatrix(x.entries @ y.entries - y.entries @ x.entries)
