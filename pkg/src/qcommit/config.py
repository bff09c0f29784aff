"""Numerical tolerances and simulation caps shared by every module."""
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    structural: float = 1e-9    # norms, hermiticity, trace, PSD
    end_to_end: float = 1e-7    # bound checks over whole experiments
    eig_clamp: float = 1e-12    # relative: smaller eigenvalues are zeroed before sqrt
    kernel: float = 1e-12       # |eigenvalue| below this lands in the kernel


TOL = Tolerances()


class CapExceeded(ValueError):
    """A requested object is larger than the configured simulation caps."""


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


def max_dense_qubits() -> int:
    """Largest register width for a dense density matrix."""
    return _env_int("QCOMMIT_MAX_DENSE_QUBITS", 16)


def max_pure_qubits() -> int:
    """Largest register width for a dense state vector."""
    return _env_int("QCOMMIT_MAX_PURE_QUBITS", 22)


def max_key_bits() -> int:
    """log2 of the largest key space that may be enumerated exhaustively."""
    return _env_int("QCOMMIT_MAX_KEY_BITS", 24)


def check_dense(nqubits: int, what: str = "density operator"):
    if nqubits > max_dense_qubits():
        raise CapExceeded(
            f"{what} on {nqubits} qubits exceeds the dense cap of "
            f"{max_dense_qubits()} (set QCOMMIT_MAX_DENSE_QUBITS to override)")


def check_pure(nqubits: int, what: str = "state vector"):
    if nqubits > max_pure_qubits():
        raise CapExceeded(
            f"{what} on {nqubits} qubits exceeds the pure-state cap of "
            f"{max_pure_qubits()} (set QCOMMIT_MAX_PURE_QUBITS to override)")


def check_keys(nbits: int, what: str = "key space"):
    if nbits > max_key_bits():
        raise CapExceeded(
            f"{what} of 2^{nbits} keys exceeds the enumeration cap of "
            f"2^{max_key_bits()} (set QCOMMIT_MAX_KEY_BITS to override)")
