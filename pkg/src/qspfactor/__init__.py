"""Factorization of bounded periodic functions into SU(2) primitive products."""

from .completion import ComplementGrid, RootList, build_real_poly, complete, find_roots
from .decompose import Decomposition, Projector2, extract_factors, quantize_output, to_angles
from .errors import (
    DegenerateInputError,
    InputValidationError,
    NotParityConstrainedError,
    PrecisionCapExceededError,
    PrecisionInsufficientError,
    QspError,
)
from .fourier import MatrixCoeffSeq, assemble_F, matrix_fft
from .ingest import TargetSpec, TruncatedPair, truncate, validate
from .poly import ExactComplex, LaurentPoly, check_parity, evaluate, split_parts
from .precision import PrecisionContext, worst_case_bits
from .targets import (
    InverseSpec,
    JacobiAngerSpec,
    bessel_j,
    inverse_params,
    inverse_poly,
    jacobi_anger,
)
from .verify import VerifyReport, check, reconstruct, run_adaptive, run_once

__version__ = "0.1.0"
