"""Peeling primitive matrices off a matrix coefficient sequence.

Each pass strips one factor t P + (1/t)(I - P): the projector comes
from the top coefficient as P = C^dagger C / Tr(C^dagger C), the
complementary projector independently from the bottom coefficient, and
the coefficient list shortens by one.  The leading norms can only grow
through the loop, so a single floor at eps/(2N) certifies every
division.

A running error estimate is threaded through the loop, seeded from the
transform's measured noise floor and propagated with the measured
leading norms (capped by the worst-case cascade factor).  It is
recorded as a certificate in the diagnostics; the decision to accept a
run rests with the reconstruction test, which is the cheaper and far
tighter gate in practice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import mpmath as mp

from .errors import NotParityConstrainedError, PrecisionInsufficientError, QspError
from .fourier import MatrixCoeffSeq
from .mat2 import Mat2
from .precision import PrecisionContext


@dataclass(frozen=True)
class Projector2:
    """Rank-one Hermitian projector with its Bloch vector."""

    matrix: Mat2
    bloch: tuple

    @classmethod
    def from_matrix(cls, m: Mat2) -> "Projector2":
        return cls(matrix=m, bloch=m.bloch_parts())

    @classmethod
    def from_bloch(cls, px, py, pz) -> "Projector2":
        return cls(matrix=Mat2.bloch_projector(px, py, pz), bloch=(mp.mpf(px), mp.mpf(py), mp.mpf(pz)))

    def z_component(self):
        """Tr(Z P), the distance from the Bloch equator."""
        return self.bloch[2]


@dataclass(frozen=True)
class Decomposition:
    """Constant unitary plus the ordered projector list, optionally angles."""

    e0: Mat2
    projectors: tuple
    output_precision_bits: int
    bits: int
    angles: Optional[tuple] = None  # (phi_0, phi_1, ..., phi_m) when available
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_factors(self) -> int:
        return len(self.projectors)


def primitive_matrix(p: Projector2, t) -> Mat2:
    """t P + (1/t)(I - P)."""
    t = mp.mpc(t)
    tinv = 1 / t
    m = p.matrix
    return m.scale(t) + (Mat2.identity() - m).scale(tinv)


def extract_factors(seq: MatrixCoeffSeq, ctx: PrecisionContext) -> Decomposition:
    """Strip primitive factors from the top exponent down to the constant.

    Raises PrecisionInsufficientError when a leading coefficient falls
    below the eps/(2N) floor or its Gram trace underflows.
    """
    with ctx.working():
        floor = ctx.extraction_floor()
        floor_sq = floor * floor
        entries = list(seq.entries)
        m = seq.top
        delta = seq.noise_floor if seq.noise_floor is not None else ctx.ulp * (seq.top + 2)
        delta = mp.mpf(delta)
        with mp.workprec(64):
            cascade_cap = 76 * max(ctx.degree_bound, 1) / ctx.epsilon
        projectors = []
        norm_trace = []
        budget_trace = []
        certified = True
        invalid_from = None

        while m >= 1:
            c_top = entries[-1]
            c_bot = entries[0]
            top_norm = c_top.opnorm()
            bot_norm = c_bot.opnorm()
            lead = min(top_norm, bot_norm)
            if lead < floor:
                raise PrecisionInsufficientError(
                    "extract_factors",
                    f"leading norm {mp.nstr(lead, 5)} below floor {mp.nstr(floor, 5)} at m={m}",
                )
            tr_top = c_top.frobenius_sq()
            tr_bot = c_bot.frobenius_sq()
            if tr_top < floor_sq or tr_bot < floor_sq:
                raise PrecisionInsufficientError(
                    "extract_factors", f"Gram trace underflow at m={m}"
                )
            proj = c_top.dagger() @ c_top
            proj = proj.scale(1 / tr_top)
            comp = c_bot.dagger() @ c_bot
            comp = comp.scale(1 / tr_bot)
            projectors.append(Projector2.from_matrix(proj))

            lead_cert = lead - delta
            if lead_cert <= 0:
                beta = mp.mpf("inf")
            else:
                beta = 36 * delta / lead_cert
            step = 4 * delta + 2 * beta
            with mp.workprec(64):
                capped = cascade_cap * delta
            delta = min(step, capped)
            norm_trace.append((float(top_norm), float(bot_norm)))
            budget_trace.append(float(delta) if delta < mp.mpf(10) ** 300 else math.inf)
            if certified and delta > ctx.extraction_floor():
                certified = False
                invalid_from = m

            nxt = []
            for i in range(m):
                lo = entries[i] @ comp
                hi = entries[i + 1] @ proj
                nxt.append(lo + hi)
            entries = nxt
            m -= 1

        e0 = entries[0]
        diagnostics = {
            "leading_norms": norm_trace,
            "tracked_budget": budget_trace,
            "budget_certified": certified,
            "budget_invalid_from": invalid_from,
            "noise_floor": float(seq.noise_floor) if seq.noise_floor is not None else None,
            "e0_det_defect": float(abs(e0.det() - 1)),
        }
        out_bits = output_bits(ctx.degree_bound, ctx.epsilon)
        # projectors were appended from m = top downward; the output order
        # is P_1 ... P_top
        return Decomposition(
            e0=e0,
            projectors=tuple(reversed(projectors)),
            output_precision_bits=out_bits,
            bits=ctx.bits,
            diagnostics=diagnostics,
        )


def output_bits(degree_bound: int, epsilon) -> int:
    n = max(int(degree_bound), 1)
    with mp.workprec(64):
        return int(mp.ceil(mp.log(20 * n / mp.mpf(epsilon), 2)))


def _round_to(x, bits: int):
    with mp.workprec(bits):
        return +mp.mpf(x) if isinstance(x, mp.mpf) else +mp.mpc(x)


def quantize_output(d: Decomposition, degree_bound: int, epsilon) -> Decomposition:
    """Round every emitted number to ceil(log2(20N/eps)) bits.

    Projector matrices are rebuilt from their rounded Bloch vectors so
    the two representations stay consistent.
    """
    bits = output_bits(degree_bound, epsilon)
    e0 = Mat2(*(_round_to(x, bits) for x in d.e0.entries()))
    projectors = tuple(
        Projector2.from_bloch(*(_round_to(x, bits) for x in p.bloch)) for p in d.projectors
    )
    angles = None
    if d.angles is not None:
        angles = tuple(_round_to(x, bits) for x in d.angles)
    return replace(
        d, e0=e0, projectors=projectors, angles=angles, output_precision_bits=bits
    )


def projector_from_angle(phi) -> Projector2:
    """exp(i Z phi/2) |+><+| exp(-i Z phi/2)."""
    phi = mp.mpf(phi)
    return Projector2.from_bloch(mp.cos(phi), -mp.sin(phi), mp.mpf(0))


def e0_from_angle(phi0) -> Mat2:
    half = mp.mpf(phi0) / 2
    return Mat2(mp.expj(half), 0, 0, mp.expj(-half))


def to_angles(d: Decomposition, tolerance) -> Decomposition:
    """Angle form of an equator-constrained decomposition.

    Every projector must satisfy |Tr(Z P)| <= tolerance and the constant
    unitary must be diagonal to the same tolerance; otherwise the
    decomposition has no angle form and the matrix form stands.
    """
    with mp.workprec(d.bits + 16):
        tolerance = mp.mpf(tolerance)
        phis = []
        if abs(d.e0.b) > tolerance or abs(d.e0.c) > tolerance:
            raise NotParityConstrainedError(
                f"constant unitary is not diagonal to tolerance {mp.nstr(tolerance, 4)}"
            )
        phi0 = 2 * mp.arg(d.e0.a)
        phis.append(phi0)
        for j, p in enumerate(d.projectors):
            if abs(p.z_component()) > tolerance:
                raise NotParityConstrainedError(
                    f"projector {j + 1} has Bloch z-component {mp.nstr(p.z_component(), 4)}"
                )
            px, py, _ = p.bloch
            phis.append(mp.atan2(-py, px))

        # the angle form must reproduce the matrices it came from
        worst = e0_from_angle(phi0).distance(d.e0)
        for phi, p in zip(phis[1:], d.projectors):
            worst = max(worst, projector_from_angle(phi).matrix.distance(p.matrix))
        if worst > 4 * tolerance:
            raise NotParityConstrainedError(
                f"angle form misses the matrices by {mp.nstr(worst, 4)}"
            )
        return replace(d, angles=tuple(phis))
