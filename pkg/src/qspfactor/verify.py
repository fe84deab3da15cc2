"""Reconstruction test and the precision-doubling driver.

A candidate decomposition is accepted only if the product of its
primitive factors reproduces the target on a dense grid of roots of
unity to within 30 epsilon.  The driver runs the whole pipeline at 64
bits, doubles on any failed certification gate or failed test, and
stops at the worst-case bit cap.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import mpmath as mp
from mpmath import libmp

from .completion import complete
from .decompose import Decomposition, extract_factors, quantize_output, to_angles
from .errors import (
    InputValidationError,
    NotParityConstrainedError,
    PrecisionCapExceededError,
    PrecisionInsufficientError,
)
from .fourier import assemble_F, matrix_fft
from .gridfft import laurent_values_on_grid
from .ingest import EVEN, ODD, TargetSpec, truncate, validate
from .precision import INITIAL_BITS, PrecisionContext, worst_case_bits

log = logging.getLogger(__name__)

PRECISION_OVERRIDE_ENV = "QSP_PRECISION_OVERRIDE"


@dataclass(frozen=True)
class VerifyReport:
    max_error: object
    grid_size: int
    passed: bool
    r_used: int = 0


def _projector_entries(d: Decomposition):
    return [
        (p.matrix.a._mpc_, p.matrix.b._mpc_, p.matrix.c._mpc_, p.matrix.d._mpc_)
        for p in d.projectors
    ]


def _reconstruct_from_entries(e0, entries, t, prec: int):
    # row vector <+| E0 ... times sqrt(2), using
    # E(t) = (1/t) I + (t - 1/t) P, six multiplies per factor; the loop
    # runs on raw mantissa tuples because it executes grid * factors times
    cadd, csub, cmul, cdiv = libmp.mpc_add, libmp.mpc_sub, libmp.mpc_mul, libmp.mpc_div
    rnd = "n"
    one = libmp.mpc_one
    t = t._mpc_
    tinv = cdiv(one, t, prec, rnd)
    w = csub(t, tinv, prec, rnd)
    u0 = cadd(e0.a._mpc_, e0.c._mpc_, prec, rnd)
    u1 = cadd(e0.b._mpc_, e0.d._mpc_, prec, rnd)
    for p00, p01, p10, p11 in entries:
        ea = cadd(tinv, cmul(w, p00, prec, rnd), prec, rnd)
        eb = cmul(w, p01, prec, rnd)
        ec = cmul(w, p10, prec, rnd)
        ed = cadd(tinv, cmul(w, p11, prec, rnd), prec, rnd)
        u0, u1 = (
            cadd(cmul(u0, ea, prec, rnd), cmul(u1, ec, prec, rnd), prec, rnd),
            cadd(cmul(u0, eb, prec, rnd), cmul(u1, ed, prec, rnd), prec, rnd),
        )
    re, im = cadd(u0, u1, prec, rnd)
    return mp.make_mpc((libmp.mpf_shift(re, -1), libmp.mpf_shift(im, -1)))


def reconstruct(d: Decomposition, t, bits: int = 0):
    """<+| E0 E_1(t) ... E_m(t) |+> at |t| = 1."""
    if not bits:
        bits = d.output_precision_bits + 32
    with mp.workprec(bits):
        return _reconstruct_from_entries(d.e0, _projector_entries(d), mp.mpc(t), bits)


def default_grid_size(degree_bound: int) -> int:
    """Smallest power of two at or above 4N."""
    n = max(degree_bound, 1)
    d = 1
    while d < 4 * n:
        d <<= 1
    return d


def check(d: Decomposition, spec: TargetSpec, grid_size: int = 0) -> VerifyReport:
    """Max deviation between target and reconstruction over the test grid.

    t runs over points whose squares are the grid_size-th roots of
    unity; the verdict compares against 30 epsilon.
    """
    n = max(spec.degree_bound, 1)
    if not grid_size:
        grid_size = default_grid_size(n)
    if grid_size < 4 * n:
        raise InputValidationError(f"test grid of {grid_size} points is below 4N = {4 * n}")
    bits = d.output_precision_bits + 32
    with mp.workprec(bits):
        worst = mp.mpf(0)
        entries = _projector_entries(d)
        # the points t_j = e^(i pi j / D) square onto the D-th roots of
        # unity, which is exactly the transform grid for the target
        targets = laurent_values_on_grid(spec.coeffs, grid_size, bits)
        for j in range(grid_size):
            t = mp.expjpi(mp.mpf(j) / grid_size)
            got = _reconstruct_from_entries(d.e0, entries, t, bits)
            worst = max(worst, abs(targets[j] - got))
        passed = worst <= 30 * spec.epsilon
    return VerifyReport(max_error=worst, grid_size=grid_size, passed=bool(passed), r_used=d.bits)


def run_once(spec: TargetSpec, ctx: PrecisionContext, grid_size: int = 0):
    """One full pass of the pipeline at a fixed precision."""
    pair = truncate(spec)
    roots, grid = complete(pair, ctx)
    equator = pair.parity_re == EVEN and pair.parity_im == ODD
    table = assemble_F(pair, grid, ctx, swap_complement=equator)
    seq = matrix_fft(table, pair.n, ctx)
    d = extract_factors(seq, ctx)
    try:
        d = to_angles(d, mp.mpf(2) ** (-ctx.bits // 4))
    except NotParityConstrainedError as exc:
        if equator:
            # even/odd targets have an exact equator constraint, so a
            # violation is accumulated rounding error, not structure
            raise PrecisionInsufficientError("to_angles", str(exc))
    d = quantize_output(d, spec.degree_bound, spec.epsilon)
    report = check(d, spec, grid_size)
    return d, report


def _override_bits() -> int:
    raw = os.environ.get(PRECISION_OVERRIDE_ENV, "")
    if not raw:
        return 0
    try:
        bits = int(raw)
    except ValueError:
        raise InputValidationError(f"{PRECISION_OVERRIDE_ENV} must be an integer, got {raw!r}")
    if bits < 8:
        raise InputValidationError(f"{PRECISION_OVERRIDE_ENV} below 8 bits")
    return bits


def run_adaptive(
    spec: TargetSpec,
    initial_bits: int = INITIAL_BITS,
    max_bits: int = 0,
    grid_size: int = 0,
):
    """Steps 1-6 under exponential precision scheduling.

    Returns (decomposition, report, bits_used) for the first passing
    round.  With the QSP_PRECISION_OVERRIDE environment variable set, a
    single round runs at that fixed precision and its report is
    returned whether or not it passed.
    """
    validate(spec)
    n = max(spec.degree_bound, 1)
    cap = max_bits or worst_case_bits(n, spec.epsilon)

    forced = _override_bits()
    if forced:
        ctx = PrecisionContext(forced, n, spec.epsilon)
        try:
            d, report = run_once(spec, ctx, grid_size)
        except PrecisionInsufficientError as exc:
            log.info("forced %d-bit round failed its gates: %s", forced, exc)
            report = VerifyReport(max_error=mp.inf, grid_size=grid_size or default_grid_size(n),
                                  passed=False, r_used=forced)
            return None, report, forced
        return d, report, forced

    bits = initial_bits
    history = []
    while bits <= cap:
        ctx = PrecisionContext(bits, n, spec.epsilon)
        try:
            d, report = run_once(spec, ctx, grid_size)
        except PrecisionInsufficientError as exc:
            log.info("round at %d bits failed: %s", bits, exc)
            history.append({"bits": bits, "stage": exc.stage, "detail": exc.detail})
            bits *= 2
            continue
        if report.passed:
            log.info(
                "passed at %d bits with max grid error %s", bits, mp.nstr(report.max_error, 6)
            )
            return d, report, bits
        history.append(
            {"bits": bits, "stage": "check", "detail": f"max_error={mp.nstr(report.max_error, 8)}"}
        )
        log.info("check failed at %d bits: %s", bits, mp.nstr(report.max_error, 6))
        bits *= 2
    raise PrecisionCapExceededError(
        f"no passing decomposition up to the {cap}-bit cap", diagnostics={"rounds": history}
    )
