"""Quantum channel constructors and appliers on the truncated Fock space.

The lossy thermal-noise channel with transmittance eta and environment mean
photon number nbar_b is realized as a pure-loss channel of transmissivity
tau = eta / G followed by a quantum-limited amplifier of gain
G = 1 + (1 - eta) * nbar_b.  The Kraus families are

    A_l = sqrt((1 - tau)^l / l!) tau^(n/2) a^l          (loss)
    B_k = sqrt((1/k!) (1/G) ((G-1)/G)^k) a†^k G^(-n/2)  (amplifier)

composed as {B_k A_l}.  The receiver port uses (tau, G) as above; the
eavesdropper port is the reflected output: transmissivity 1 - eta mixed with
the same environment, i.e. gain 1 + eta * nbar_b, so vacuum in maps to a
thermal state of mean eta * nbar_b.  The reflected port additionally carries
the beamsplitter phase (-1)^n; this local diagonal unitary matches the
single-rail output-state derivation used by the verification oracles and
leaves every photon-number statistic unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import (
    DensityMatrix,
    DimensionError,
    FockError,
    FockOperator,
)

COMPLETENESS_TOL = 1e-8
PROJECTION_FLOOR = 1e-12
PAULI_SUM_TOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


class ChannelError(FockError):
    """Base class for channel-construction and application errors."""


class CompletenessError(ChannelError):
    """Kraus completeness defect above threshold on the declared subspace."""


class ProjectionError(ChannelError):
    """Qubit projection succeeded with probability below the floor."""


@dataclass(frozen=True)
class ChannelParams:
    """Transmittance eta in [0, 1] and mean thermal photon number nbar_b >= 0."""

    eta: float
    nbar_b: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ChannelError(f"eta must be in [0, 1], got {self.eta}")
        if self.nbar_b < 0.0:
            raise ChannelError(f"nbar_b must be >= 0, got {self.nbar_b}")

    @property
    def gain(self) -> float:
        """Amplifier gain of the receiver-port decomposition."""
        return 1.0 + (1.0 - self.eta) * self.nbar_b

    @property
    def tau(self) -> float:
        """Pure-loss transmissivity of the receiver-port decomposition."""
        return self.eta / self.gain


@dataclass(frozen=True)
class PauliVector:
    """Probability vector (p_i, p_x, p_y, p_z) over the Pauli group."""

    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self):
        vec = self.as_array()
        if np.any(vec < -PAULI_SUM_TOL) or np.any(vec > 1.0 + PAULI_SUM_TOL):
            raise ChannelError(f"Pauli probabilities outside [0, 1]: {vec}")
        total = float(vec.sum())
        if abs(total - 1.0) > PAULI_SUM_TOL:
            raise ChannelError(f"Pauli probabilities sum to {total!r}, expected 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_i, self.p_x, self.p_y, self.p_z], dtype=float)


@dataclass(frozen=True)
class KrausChannel:
    """An ordered Kraus family with its completeness bookkeeping."""

    operators: tuple[FockOperator, ...]
    in_dim: int
    out_dim: int

    def __post_init__(self):
        for op in self.operators:
            if op.data.shape != (self.out_dim, self.in_dim):
                raise DimensionError(
                    f"Kraus operator shape {op.data.shape} does not match "
                    f"({self.out_dim}, {self.in_dim})"
                )
        stack = np.stack([op.data for op in self.operators])
        stack.setflags(write=False)
        gram = np.einsum("aji,ajk->ik", stack.conj(), stack)
        gram.setflags(write=False)
        object.__setattr__(self, "_stack", stack)
        object.__setattr__(self, "_gram", gram)

    def completeness_defect(self, levels: int | None = None) -> float:
        """max |(sum_K K†K - I)| over the first ``levels`` input levels."""
        if levels is None:
            levels = self.in_dim
        block = self._gram[:levels, :levels] - np.eye(levels)
        return float(np.max(np.abs(block)))


def _loss_kraus_entries(tau: float, dim: int, l: int) -> np.ndarray:
    """A_l in the Fock basis: maps |m> to sqrt(C(m,l) (1-tau)^l tau^(m-l)) |m-l>."""
    op = np.zeros((dim, dim), dtype=complex)
    for m in range(l, dim):
        op[m - l, m] = math.sqrt(math.comb(m, l) * (1.0 - tau) ** l * tau ** (m - l))
    return op


def _amp_kraus_entries(gain: float, dim: int, k: int) -> np.ndarray:
    """B_k in the Fock basis: maps |m> to sqrt(C(m+k,k) x^k / G^(m+1)) |m+k>."""
    op = np.zeros((dim, dim), dtype=complex)
    x = (gain - 1.0) / gain
    for m in range(0, dim - k):
        op[m + k, m] = math.sqrt(math.comb(m + k, k) * x**k / gain ** (m + 1))
    return op


def _composed_kraus(tau: float, gain: float, dim: int, photon_cutoff: int) -> list[np.ndarray]:
    ops = []
    amp_ops = [_amp_kraus_entries(gain, dim, k) for k in range(photon_cutoff + 1)]
    for l in range(photon_cutoff + 1):
        a_l = _loss_kraus_entries(tau, dim, l)
        if not a_l.any():
            continue
        for b_k in amp_ops:
            if not b_k.any():
                continue
            op = b_k @ a_l
            if op.any():
                ops.append(op)
    return ops


def lossy_thermal_kraus(
    params: ChannelParams, dim: int, photon_cutoff: int | None = None
) -> KrausChannel:
    """Receiver-port channel {B_k A_l} for the given (eta, nbar_b).

    ``photon_cutoff`` bounds both the loss index l and the amplifier index k;
    it defaults to dim - 1 (every operator the truncation can support).
    Raises CompletenessError when the defect on the <=1-photon subspace
    exceeds COMPLETENESS_TOL.
    """
    return _port_channel(params.tau, params.gain, dim, photon_cutoff, parity_phase=False)


def willie_port_kraus(
    params: ChannelParams, dim: int, photon_cutoff: int | None = None
) -> KrausChannel:
    """Transmitter-to-eavesdropper port of the same beamsplitter channel.

    Transmissivity 1 - eta, amplifier gain 1 + eta * nbar_b (vacuum maps to a
    thermal state of mean eta * nbar_b), with the reflected-port phase
    (-1)^n folded into the Kraus family.
    """
    gain_w = 1.0 + params.eta * params.nbar_b
    tau_w = (1.0 - params.eta) / gain_w
    return _port_channel(tau_w, gain_w, dim, photon_cutoff, parity_phase=True)


# channels are immutable value objects, so sharing cached instances is safe
@lru_cache(maxsize=128)
def _port_channel(
    tau: float, gain: float, dim: int, photon_cutoff: int | None, parity_phase: bool
) -> KrausChannel:
    if dim < 2:
        raise DimensionError("channel truncation dim must be >= 2")
    if photon_cutoff is None:
        photon_cutoff = dim - 1
    if photon_cutoff < 1:
        raise ChannelError("photon_cutoff must be >= 1")
    ops = _composed_kraus(tau, gain, dim, photon_cutoff)
    if parity_phase:
        parity = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
        ops = [parity[:, None] * op for op in ops]
    channel = KrausChannel(tuple(FockOperator(dim, op) for op in ops), dim, dim)
    defect = channel.completeness_defect(levels=2)
    if defect > COMPLETENESS_TOL:
        raise CompletenessError(
            f"completeness defect {defect:.3e} on the <=1-photon subspace "
            f"exceeds {COMPLETENESS_TOL:.1e}; increase photon_cutoff or dim"
        )
    return channel


def apply(channel: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """sum_K K rho K†, with the trace deficit declared as truncation tail."""
    if rho.dim != channel.in_dim:
        raise DimensionError(f"state dim {rho.dim} does not match channel in_dim {channel.in_dim}")
    stack = channel._stack
    out = np.einsum("aij,jk,alk->il", stack, rho.data, stack.conj(), optimize=True)
    out = 0.5 * (out + out.conj().T)
    tail = max(0.0, 1.0 - float(np.trace(out).real))
    return DensityMatrix(channel.out_dim, out, tail=tail)


def qubit_project(rho: DensityMatrix) -> tuple[float, DensityMatrix]:
    """Project onto span{|0>, |1>}: returns (tr(Pi rho Pi), renormalized 2x2 state)."""
    if rho.dim < 2:
        raise DimensionError("qubit projection needs dim >= 2")
    success = float((rho.data[0, 0] + rho.data[1, 1]).real)
    if success < PROJECTION_FLOOR:
        raise ProjectionError(f"projection success probability {success:.3e} is degenerate")
    projected = rho.data[:2, :2] / success
    return success, DensityMatrix(2, projected, tail=0.0)


def single_rail_state(beta_sq: float, gamma: complex, dim: int = 2) -> DensityMatrix:
    """Qubit state [[1 - beta_sq, gamma], [gamma*, beta_sq]] padded to ``dim`` levels."""
    if not 0.0 <= beta_sq <= 1.0:
        raise ChannelError(f"beta_sq must be in [0, 1], got {beta_sq}")
    if abs(gamma) ** 2 > beta_sq * (1.0 - beta_sq) + 1e-12:
        raise ChannelError(f"|gamma|={abs(gamma):.3e} violates positivity for beta_sq={beta_sq}")
    data = np.zeros((dim, dim), dtype=complex)
    data[0, 0] = 1.0 - beta_sq
    data[1, 1] = beta_sq
    data[0, 1] = gamma
    data[1, 0] = np.conj(gamma)
    return DensityMatrix(dim, data)


def embed_qubit_operator(op: np.ndarray, dim: int) -> np.ndarray:
    """Pad a 2x2 operator with zeros to act on the first two of ``dim`` levels."""
    out = np.zeros((dim, dim), dtype=complex)
    out[:2, :2] = op
    return out


def depolarizing_vector(lam: float) -> PauliVector:
    """Pauli vector (1 - 3 lam / 4, lam / 4, lam / 4, lam / 4)."""
    if not 0.0 <= lam <= 1.0:
        raise ChannelError(f"depolarizing parameter must be in [0, 1], got {lam}")
    return PauliVector(1.0 - 0.75 * lam, 0.25 * lam, 0.25 * lam, 0.25 * lam)


def pauli_apply(p: PauliVector, rho: DensityMatrix) -> DensityMatrix:
    """Apply the Pauli channel to a qubit, or to the second qubit of a pair."""
    if rho.dim == 2:
        paulis = PAULIS
    elif rho.dim == 4:
        paulis = tuple(np.kron(PAULI_I, pm) for pm in PAULIS)
    else:
        raise DimensionError(f"pauli_apply expects dim 2 or 4, got {rho.dim}")
    weights = p.as_array()
    out = sum(w * (pm @ rho.data @ pm.conj().T) for w, pm in zip(weights, paulis))
    return DensityMatrix(rho.dim, out, tail=rho.tail)


# Klein four-group labels in symplectic form: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).
_SYMPLECTIC = ((0, 0), (1, 0), (1, 1), (0, 1))


def pauli_convolve(a: PauliVector, b: PauliVector) -> PauliVector:
    """Pauli vector of the composition of two Pauli channels (group convolution)."""
    av, bv = a.as_array(), b.as_array()
    out = np.zeros(4)
    index = {lab: i for i, lab in enumerate(_SYMPLECTIC)}
    for i, la in enumerate(_SYMPLECTIC):
        for j, lb in enumerate(_SYMPLECTIC):
            c = index[(la[0] ^ lb[0], la[1] ^ lb[1])]
            out[c] += av[i] * bv[j]
    return PauliVector(*out)


_BELL = {
    "phi+": np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2),
    "psi+": np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2),
    "psi-": np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2),
    "phi-": np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2),
}


def choi_state(channel: KrausChannel) -> tuple[DensityMatrix, float]:
    """Choi state of the channel restricted to the qubit subspace.

    Sends half of (|00> + |11>)/sqrt(2) through the channel (the channel acts
    on the second subsystem), projects the output onto span{|0>, |1>}, and
    renormalizes.  Returns (4x4 Choi state, pre-normalization trace); the
    trace is the projection success probability on the Choi input.
    """
    d = channel.in_dim
    if d < 2:
        raise DimensionError("choi_state needs a channel acting on dim >= 2")
    psi = np.zeros((2, d), dtype=complex)
    psi[0, 0] = psi[1, 1] = 1.0 / math.sqrt(2)
    rho_in = np.einsum("ai,bj->aibj", psi, psi.conj())
    stack = channel._stack
    out = np.einsum("kim,ambn,kjn->aibj", stack, rho_in, stack.conj(), optimize=True)
    block = out[:, :2, :, :2].reshape(4, 4)
    block = 0.5 * (block + block.conj().T)
    pre_trace = float(np.trace(block).real)
    if pre_trace < PROJECTION_FLOOR:
        raise ProjectionError(f"Choi projection trace {pre_trace:.3e} is degenerate")
    return DensityMatrix(4, block / pre_trace, tail=0.0), pre_trace


def twirl_from_choi(choi: DensityMatrix) -> PauliVector:
    """Pauli-twirl probabilities as Bell-basis overlaps of a two-qubit Choi state."""
    if choi.dim != 4:
        raise DimensionError(f"expected a 4x4 Choi state, got dim {choi.dim}")
    overlaps = []
    for key in ("phi+", "psi+", "psi-", "phi-"):
        v = _BELL[key]
        overlaps.append(float((v.conj() @ choi.data @ v).real))
    overlaps = np.array(overlaps)
    if np.any(overlaps < -1e-10):
        raise ChannelError(f"negative Bell overlap beyond tolerance: {overlaps}")
    overlaps = np.clip(overlaps, 0.0, None)
    overlaps /= overlaps.sum()
    return PauliVector(*overlaps)
