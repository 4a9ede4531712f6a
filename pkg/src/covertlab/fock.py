"""Truncated Fock-space linear algebra.

States and operators are dense complex matrices on the first ``dim`` photon
number levels of a single mode (or a Kronecker product of modes).  Every
constructor declares the truncation mass it leaves outside the retained
levels, so downstream tolerances can be audited against it.

Conventions fixed here and relied on everywhere else:

* entropic quantities (entropy, relative entropy, chi-square bounds) are in
  nats; rate formulas elsewhere convert to base 2 explicitly,
* logarithms of eigenvalues use a floor of ``EIG_FLOOR``: smaller
  eigenvalues are clamped and their mass is subject to the support checks,
* matrices are dense; ``MAX_SINGLE_MODE_DIM`` / ``MAX_COMPOSITE_DIM`` bound
  the supported envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TAIL_BUDGET = 1e-12
EIG_FLOOR = 1e-12
HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_SLACK = 1e-9
# Mass of rho tolerated on sigma's clamped directions before a SupportError:
# sized so truncation dust on composite spaces (products of per-mode tails,
# up to ~1e-8 at dim 4096) passes while genuine violations (>= 1e-3 for any
# state with real weight on a killed direction) are still caught.
SUPPORT_TOL = 1e-6
DIM_FLOOR = 20
MAX_SINGLE_MODE_DIM = 64
MAX_COMPOSITE_DIM = 4096


class FockError(ValueError):
    """Base class for Fock-space errors."""


class DimensionError(FockError):
    """Operands have incompatible or unsupported dimensions."""


class TruncationError(FockError):
    """Truncation leakage exceeds the declared budget."""


class SupportError(FockError):
    """support(rho) is not contained in support(sigma) within EIG_FLOOR."""


def _as_complex(data) -> np.ndarray:
    arr = np.array(data, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _is_diagonal(data: np.ndarray) -> bool:
    return np.count_nonzero(data) == np.count_nonzero(np.diagonal(data))


def _eigvals_hermitian(data: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, with a diagonal fast path.

    The fast path keeps composite-space checks (dim up to 4096, where the
    states of interest are diagonal) from paying an O(dim^3) eigensolve.
    """
    if _is_diagonal(data):
        return np.sort(np.diagonal(data).real)
    return np.linalg.eigvalsh(data)


def _eigh_hermitian(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if _is_diagonal(data):
        vals = np.diagonal(data).real.copy()
        return vals, np.eye(data.shape[0], dtype=complex)
    return np.linalg.eigh(data)


@dataclass(frozen=True)
class FockOperator:
    """A dim x dim complex operator on the truncated Fock space."""

    dim: int
    data: np.ndarray

    def __post_init__(self):
        arr = _as_complex(self.data)
        if arr.shape[0] != self.dim:
            raise DimensionError(f"data shape {arr.shape} does not match dim={self.dim}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def dagger(self) -> "FockOperator":
        return FockOperator(self.dim, self.data.conj().T)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-one (minus declared tail) matrix.

    ``tail`` is the truncation mass the constructor knowingly left beyond the
    retained levels; the trace must lie in [1 - tail - slack, 1 + slack].
    """

    dim: int
    data: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        arr = _as_complex(self.data)
        if arr.shape[0] != self.dim:
            raise DimensionError(f"data shape {arr.shape} does not match dim={self.dim}")
        if self.dim < 1:
            raise DimensionError("dim must be >= 1")
        if self.dim > MAX_COMPOSITE_DIM:
            raise DimensionError(
                f"dim={self.dim} exceeds the supported envelope ({MAX_COMPOSITE_DIM})"
            )
        herm_defect = float(np.max(np.abs(arr - arr.conj().T)))
        if herm_defect > HERMITICITY_TOL:
            raise FockError(f"matrix is not Hermitian: max |A - A^dag| = {herm_defect:.3e}")
        min_eig = float(_eigvals_hermitian(arr)[0])
        if min_eig < -PSD_TOL:
            raise FockError(f"matrix is not PSD: min eigenvalue = {min_eig:.3e}")
        tr = float(np.trace(arr).real)
        if not (1.0 - self.tail - TRACE_SLACK <= tr <= 1.0 + TRACE_SLACK):
            raise TruncationError(
                f"trace {tr!r} outside [1 - tail, 1] for declared tail {self.tail:.3e}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def purity(self) -> float:
        return float(np.trace(self.data @ self.data).real)

    def mean_photon_number(self) -> float:
        """<n> for a single-mode state (diagonal weighting by level index)."""
        return float(np.sum(np.arange(self.dim) * np.diagonal(self.data).real))


def thermal_dim(nbar: float, tail_budget: float = TAIL_BUDGET, floor: int = DIM_FLOOR) -> int:
    """Smallest dim whose thermal tail mass beyond dim-1 is below ``tail_budget``.

    The tail of the geometric photon-number distribution with mean ``nbar``
    beyond the first ``dim`` levels is (nbar / (1 + nbar))^dim.
    """
    if nbar < 0:
        raise FockError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        return floor
    x = nbar / (1.0 + nbar)
    dim = int(math.ceil(math.log(tail_budget) / math.log(x))) + 1
    return min(max(dim, floor), MAX_SINGLE_MODE_DIM)


def thermal_state(nbar: float, dim: int) -> DensityMatrix:
    """Thermal state with mean photon number ``nbar`` on ``dim`` levels.

    Diagonal entry k is nbar^k / (1 + nbar)^(k + 1); the geometric tail mass
    beyond level dim-1 is declared as the truncation leakage.
    """
    if nbar < 0:
        raise FockError(f"nbar must be >= 0, got {nbar}")
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    if nbar == 0:
        diag = np.zeros(dim)
        diag[0] = 1.0
        tail = 0.0
    else:
        x = nbar / (1.0 + nbar)
        diag = x ** np.arange(dim) / (1.0 + nbar)
        tail = x**dim
    return DensityMatrix(dim, np.diag(diag.astype(complex)), tail=tail)


def coherent_state(amplitude: complex, dim: int, tail_budget: float = TAIL_BUDGET) -> DensityMatrix:
    """Projector onto the truncated coherent state of the given amplitude.

    Rejects the construction when the Poisson tail beyond level dim-1
    exceeds ``tail_budget``.
    """
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    k = np.arange(dim)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, dim)))))
    amp = complex(amplitude)
    mean = abs(amp) ** 2
    if mean == 0:
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1.0
    else:
        log_mag = -mean / 2.0 + k * math.log(abs(amp)) - log_fact / 2.0
        phase = np.exp(1j * k * np.angle(amp))
        psi = np.exp(log_mag) * phase
    tail = max(0.0, 1.0 - float(np.sum(np.abs(psi) ** 2)))
    if tail > tail_budget:
        raise TruncationError(
            f"coherent-state tail {tail:.3e} beyond level {dim - 1} exceeds budget {tail_budget:.1e}"
        )
    return DensityMatrix(dim, np.outer(psi, psi.conj()), tail=tail)


def ladder_ops(dim: int) -> tuple[FockOperator, FockOperator, FockOperator]:
    """(annihilation, creation, number) operators on ``dim`` levels."""
    if dim < 2:
        raise DimensionError("dim must be >= 2 for ladder operators")
    a = np.zeros((dim, dim), dtype=complex)
    ks = np.arange(1, dim)
    a[ks - 1, ks] = np.sqrt(ks)
    adag = a.conj().T
    return FockOperator(dim, a), FockOperator(dim, adag), FockOperator(dim, adag @ a)


def tensor(a, b):
    """Kronecker product of two states or two operators (same kind)."""
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        tail = a.tail + b.tail
        return DensityMatrix(a.dim * b.dim, np.kron(a.data, b.data), tail=tail)
    if isinstance(a, FockOperator) and isinstance(b, FockOperator):
        return FockOperator(a.dim * b.dim, np.kron(a.data, b.data))
    raise TypeError("tensor expects two DensityMatrix or two FockOperator values")


def partial_trace(rho: DensityMatrix, keep, dims) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists the per-subsystem dimensions whose product must equal
    rho.dim; ``keep`` lists the (0-based) subsystem indices to retain, in the
    order they should appear in the result.
    """
    dims = list(dims)
    keep = list(keep)
    n = len(dims)
    if int(np.prod(dims)) != rho.dim:
        raise DimensionError(f"prod(dims)={int(np.prod(dims))} does not match rho.dim={rho.dim}")
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise DimensionError(f"invalid keep indices {keep} for {n} subsystems")
    arr = rho.data.reshape(dims + dims)
    ket = [chr(ord("a") + i) for i in range(n)]
    bra = [chr(ord("A") + i) if i in keep else ket[i] for i in range(n)]
    out = "".join(ket[k] for k in keep) + "".join(bra[k] for k in keep)
    arr = np.einsum("".join(ket) + "".join(bra) + "->" + out, arr)
    out_dim = int(np.prod([dims[k] for k in keep]))
    return DensityMatrix(out_dim, arr.reshape(out_dim, out_dim), tail=rho.tail)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(1/2) || rho - sigma ||_1."""
    _check_same_dim(rho, sigma)
    eigs = _eigvals_hermitian(rho.data - sigma.data)
    return 0.5 * float(np.sum(np.abs(eigs)))


def _sqrtm_psd(data: np.ndarray) -> np.ndarray:
    if _is_diagonal(data):
        return np.diag(np.sqrt(np.clip(np.diagonal(data).real, 0.0, None)).astype(complex))
    vals, vecs = _eigh_hermitian(data)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity [tr sqrt(sqrt(rho) sigma sqrt(rho))]^2 in [0, 1]."""
    _check_same_dim(rho, sigma)
    sr = _sqrtm_psd(rho.data)
    inner = _sqrtm_psd(sr @ sigma.data @ sr)
    val = float(np.trace(inner).real) ** 2
    return min(max(val, 0.0), 1.0)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """- tr(rho ln rho) in nats, with eigenvalues clamped at EIG_FLOOR."""
    vals = _eigvals_hermitian(rho.data)
    vals = vals[vals > EIG_FLOOR]
    return float(-np.sum(vals * np.log(vals)))


def _support_decomposition(sigma: DensityMatrix):
    """Eigen-decomposition of sigma split at the EIG_FLOOR support cut."""
    vals, vecs = _eigh_hermitian(sigma.data)
    on = vals > EIG_FLOOR
    return vals, vecs, on


def _support_violation(rho: DensityMatrix, vecs: np.ndarray, off_mask: np.ndarray) -> float:
    if not np.any(off_mask):
        return 0.0
    off_vecs = vecs[:, off_mask]
    return float(np.einsum("ij,jk,ki->", off_vecs.conj().T, rho.data, off_vecs).real)


def _check_support_mass(mass: float) -> None:
    if mass > SUPPORT_TOL:
        raise SupportError(f"support violation: {mass:.3e} of rho lies outside support(sigma)")


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Quantum relative entropy tr(rho ln rho - rho ln sigma) in nats.

    Raises SupportError (rather than returning infinity) when rho carries
    more than SUPPORT_TOL mass outside sigma's support.
    """
    _check_same_dim(rho, sigma)
    if _is_diagonal(rho.data) and _is_diagonal(sigma.data):
        p = np.diagonal(rho.data).real
        q = np.diagonal(sigma.data).real
        _check_support_mass(float(np.sum(p[q <= EIG_FLOOR])))
        p_pos = p[p > EIG_FLOOR]
        plogp = float(np.sum(p_pos * np.log(p_pos)))
        plogq = float(np.sum(p * np.log(np.clip(q, EIG_FLOOR, None))))
        return plogp - plogq
    vals_s, vecs_s, on = _support_decomposition(sigma)
    _check_support_mass(_support_violation(rho, vecs_s, ~on))
    vals_r = _eigvals_hermitian(rho.data)
    vals_r = vals_r[vals_r > EIG_FLOOR]
    plogp = float(np.sum(vals_r * np.log(vals_r)))
    diag_in_s = np.einsum("ji,jk,ki->i", vecs_s.conj(), rho.data, vecs_s).real
    log_s = np.log(np.clip(vals_s, EIG_FLOOR, None))
    plogq = float(np.sum(diag_in_s * log_s))
    return plogp - plogq


def chi2_divergence(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """chi^2 divergence tr[rho^2 sigma^{-1}] - 1, sigma inverted on its support."""
    _check_same_dim(rho, sigma)
    if _is_diagonal(rho.data) and _is_diagonal(sigma.data):
        p = np.diagonal(rho.data).real
        q = np.diagonal(sigma.data).real
        _check_support_mass(float(np.sum(p[q <= EIG_FLOOR])))
        on = q > EIG_FLOOR
        return float(np.sum(p[on] ** 2 / q[on]) - 1.0)
    vals_s, vecs_s, on = _support_decomposition(sigma)
    _check_support_mass(_support_violation(rho, vecs_s, ~on))
    a = vecs_s.conj().T @ rho.data @ vecs_s
    weights = np.abs(a) ** 2  # |<v_i| rho |v_j>|^2
    inv = np.zeros_like(vals_s)
    inv[on] = 1.0 / vals_s[on]
    return float(np.sum(weights.sum(axis=1) * inv) - 1.0)


def _check_same_dim(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")


def thermal_entropy_closed_form(nbar: float) -> float:
    """(1 + nbar) ln(1 + nbar) - nbar ln(nbar), in nats (0 at nbar = 0)."""
    if nbar < 0:
        raise FockError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        return 0.0
    return (1.0 + nbar) * math.log1p(nbar) - nbar * math.log(nbar)
