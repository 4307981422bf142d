"""
Channel model for the SWIPT link.

Generates uncorrelated flat-fading Rayleigh MIMO channels, restricts them to a
receive-antenna subset and exposes the eigen-channel power gains that the
resource allocation works on.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np

from swipt.errors import (
    AntennaIndexError,
    DecompositionError,
    InvalidDimensionError,
)

logger = logging.getLogger(__name__)

GAIN_FLOOR = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Complex N_R x N_T channel, rows are receive antennas."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise InvalidDimensionError(f"channel must be a non-empty matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def n_rx(self) -> int:
        return self.entries.shape[0]

    @property
    def n_tx(self) -> int:
        return self.entries.shape[1]

    def frobenius_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))


@dataclass(frozen=True)
class AntennaSet:
    """Sorted, duplicate-free set of active receive antennas."""

    indices: tuple

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if not indices:
            raise InvalidDimensionError("antenna set must not be empty")
        if len(set(indices)) != len(indices):
            raise AntennaIndexError(f"duplicate antenna indices in {indices}")
        if any(i < 0 for i in indices):
            raise AntennaIndexError(f"negative antenna index in {indices}")
        object.__setattr__(self, "indices", tuple(sorted(indices)))

    @classmethod
    def of(cls, indices: Iterable[int]) -> "AntennaSet":
        return cls(tuple(indices))

    @classmethod
    def full(cls, n_rx: int) -> "AntennaSet":
        return cls(tuple(range(n_rx)))

    @property
    def size(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def label(self) -> str:
        """Semicolon-joined indices, as written to CSV."""
        return ";".join(str(i) for i in self.indices)


@dataclass(frozen=True, eq=False)
class EigenChannels:
    """Power gains of the parallel SISO eigen-channels, sorted descending."""

    gains: np.ndarray

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float).ravel()
        if gains.size < 1:
            raise InvalidDimensionError("at least one eigen-channel is required")
        if not np.all(np.isfinite(gains)) or np.any(gains < 0):
            raise ValueError(f"eigen-channel gains must be finite and non-negative, got {gains}")
        gains = np.where(gains < GAIN_FLOOR, 0.0, gains)
        object.__setattr__(self, "gains", _frozen(np.sort(gains)[::-1]))

    @classmethod
    def from_gains(cls, gains: Sequence[float]) -> "EigenChannels":
        return cls(np.asarray(gains, dtype=float))

    @property
    def count(self) -> int:
        return self.gains.size

    def __len__(self) -> int:
        return self.gains.size


def generate_rayleigh(n_rx: int, n_tx: int, rng_seed: int) -> ChannelMatrix:
    """Draw an i.i.d. CN(0, 1) channel, deterministic for a given seed."""
    if n_rx < 1 or n_tx < 1:
        raise InvalidDimensionError(f"antenna counts must be positive, got n_rx={n_rx}, n_tx={n_tx}")
    rng = np.random.Generator(np.random.PCG64(int(rng_seed) & 0xFFFFFFFFFFFFFFFF))
    real = rng.standard_normal((n_rx, n_tx))
    imag = rng.standard_normal((n_rx, n_tx))
    return ChannelMatrix((real + 1j * imag) / np.sqrt(2.0))


def select_rows(h: ChannelMatrix, chi: Union[AntennaSet, Iterable[int]]) -> ChannelMatrix:
    """Return the sub-channel H_chi made of the rows named by ``chi``."""
    if not isinstance(chi, AntennaSet):
        chi = AntennaSet.of(chi)
    bad = [i for i in chi.indices if i >= h.n_rx]
    if bad:
        raise AntennaIndexError(f"antenna indices {bad} out of range for n_rx={h.n_rx}")
    return ChannelMatrix(h.entries[list(chi.indices), :])


def eigen_channels(h_chi: ChannelMatrix) -> EigenChannels:
    """Eigenvalues of H_chi H_chi^H (squared singular values), top L = min(rows, cols)."""
    entries = h_chi.entries
    # the smaller Gram matrix has the same non-zero spectrum
    if entries.shape[0] <= entries.shape[1]:
        gram = entries @ entries.conj().T
    else:
        gram = entries.conj().T @ entries
    try:
        values = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigensolver did not converge: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise DecompositionError("eigensolver returned non-finite values")
    n_channels = min(h_chi.n_rx, h_chi.n_tx)
    values = np.sort(np.clip(values, 0.0, None))[::-1][:n_channels]
    return EigenChannels(values)


def frobenius_row_norms(h: ChannelMatrix) -> List[float]:
    """Squared norm of every receive-antenna row."""
    return [float(v) for v in np.sum(np.abs(h.entries) ** 2, axis=1)]


def save_channel(h: ChannelMatrix, path: Union[str, Path]) -> None:
    """Write ``h`` as a header line ``n_rx n_tx`` followed by row-major ``re im`` pairs."""
    lines = [f"{h.n_rx} {h.n_tx}"]
    for row in h.entries:
        lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug("wrote %dx%d channel to %s", h.n_rx, h.n_tx, path)


def load_channel(path: Union[str, Path]) -> ChannelMatrix:
    """Read a channel written by :func:`save_channel`."""
    tokens = Path(path).read_text(encoding="utf-8").split()
    if len(tokens) < 2:
        raise InvalidDimensionError(f"{path}: missing 'n_rx n_tx' header")
    n_rx, n_tx = int(tokens[0]), int(tokens[1])
    if n_rx < 1 or n_tx < 1:
        raise InvalidDimensionError(f"{path}: non-positive dimensions {n_rx}x{n_tx}")
    values = np.array([float(t) for t in tokens[2:]])
    if values.size != 2 * n_rx * n_tx:
        raise InvalidDimensionError(
            f"{path}: expected {2 * n_rx * n_tx} numbers for a {n_rx}x{n_tx} channel, got {values.size}")
    pairs = values.reshape(n_rx, n_tx, 2)
    return ChannelMatrix(pairs[..., 0] + 1j * pairs[..., 1])
