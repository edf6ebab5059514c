"""Block-encodings, quantum signal processing and polynomial transforms."""

from .angles import find_angles
from .assembly import hermitize, linear_combine, multiply, multiply_many, shift_rescale
from .dilation import (
    BlockEncoding,
    chain_dilation,
    extract_block,
    four_block_dilation,
    hermitian_dilation,
    hermitian_embed,
    minimal_dilation,
    polar_dilation,
)
from .errors import QSPForgeError
from .lcu import (
    PauliHamiltonian,
    PauliTerm,
    assemble_lcu,
    pauli_decompose,
    prepare_angles,
    sparse_block_encoding,
)
from .linalg import QuantumState, matrix_exponential, psd_sqrt, spectral_norm
from .models import heisenberg, ising_chain
from .polynomial import Polynomial
from .qsp import PhaseSequence

__version__ = "0.1.0"

__all__ = [
    "find_angles",
    "hermitize",
    "linear_combine",
    "multiply",
    "multiply_many",
    "shift_rescale",
    "BlockEncoding",
    "chain_dilation",
    "extract_block",
    "four_block_dilation",
    "hermitian_dilation",
    "hermitian_embed",
    "minimal_dilation",
    "polar_dilation",
    "QSPForgeError",
    "PauliHamiltonian",
    "PauliTerm",
    "assemble_lcu",
    "pauli_decompose",
    "prepare_angles",
    "sparse_block_encoding",
    "QuantumState",
    "matrix_exponential",
    "psd_sqrt",
    "spectral_norm",
    "heisenberg",
    "ising_chain",
    "Polynomial",
    "PhaseSequence",
]
