"""Command-line driver and JSON file formats.

Commands: decompose, generate-ja, generate-inverse, verify.  All
numbers cross the process boundary as decimal strings carrying the full
declared precision, so write-then-read is lossless and output bytes are
deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

import mpmath as mp

from .decompose import Decomposition, Projector2, e0_from_angle, projector_from_angle
from .errors import (
    InputValidationError,
    NotParityConstrainedError,
    PrecisionCapExceededError,
    QspError,
)
from .ingest import TargetSpec, input_bits
from .mat2 import Mat2
from .precision import INITIAL_BITS, format_mpf, parse_decimal, worst_case_bits
from .targets import JacobiAngerSpec, inverse_params, inverse_poly, jacobi_anger
from .verify import VerifyReport, check, run_adaptive

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_PRECISION_CAP = 3


@dataclass
class JobConfig:
    command: str
    input_path: str = ""
    output_path: str = ""
    decomposition_path: str = ""
    epsilon: str = ""
    tau: str = ""
    kappa: str = ""
    initial_precision: int = INITIAL_BITS
    max_precision: int = 0
    grid_size: int = 0
    emit_angles: str = "auto"


# -- JSON formats ------------------------------------------------------


def spec_to_json(spec: TargetSpec) -> dict:
    bits = input_bits(spec.degree_bound, spec.epsilon)
    coefficients = []
    for k in sorted(spec.coeffs):
        v = spec.coeffs[k]
        coefficients.append(
            {"k": k, "re": format_mpf(v.real, bits), "im": format_mpf(v.imag, bits)}
        )
    doc = {
        "epsilon": format_mpf(spec.epsilon, bits),
        "parity_re": spec.parity_re,
        "parity_im": spec.parity_im,
        "coefficients": coefficients,
    }
    if spec.metadata:
        doc["metadata"] = {str(k): v for k, v in spec.metadata.items()}
    return doc


def spec_from_json(doc: dict) -> TargetSpec:
    try:
        eps_text = doc["epsilon"]
        rows = doc["coefficients"]
        parity_re = doc["parity_re"]
        parity_im = doc["parity_im"]
    except (KeyError, TypeError) as exc:
        raise InputValidationError(f"malformed target document: missing {exc}")
    n = max((abs(int(r["k"])) for r in rows), default=0)
    probe_eps = parse_decimal(str(eps_text), 64)
    if not 0 < probe_eps < 1:
        raise InputValidationError("epsilon out of range")
    bits = input_bits(n, probe_eps)
    coeffs = {}
    for r in rows:
        k = int(r["k"])
        re = parse_decimal(str(r.get("re", "0")), bits)
        im = parse_decimal(str(r.get("im", "0")), bits)
        if k in coeffs:
            raise InputValidationError(f"duplicate coefficient for exponent {k}")
        coeffs[k] = mp.mpc(re, im)
    return TargetSpec(
        epsilon=parse_decimal(str(eps_text), bits),
        coeffs=coeffs,
        parity_re=str(parity_re),
        parity_im=str(parity_im),
        metadata=dict(doc.get("metadata", {})),
    )


def decomposition_to_json(d: Decomposition, emit_angles: str = "auto") -> dict:
    bits = d.output_precision_bits
    use_angles = d.angles is not None and emit_angles != "never"
    if emit_angles == "require" and d.angles is None:
        raise NotParityConstrainedError("no angle form available for this decomposition")
    doc = {"n_factors": d.n_factors, "precision_bits": bits}
    if use_angles:
        doc["e0"] = {"angle": format_mpf(d.angles[0], bits)}
        doc["projectors"] = [{"phi": format_mpf(phi, bits)} for phi in d.angles[1:]]
    else:
        doc["e0"] = {
            "matrix": [[format_mpf(x.real, bits), format_mpf(x.imag, bits)] for x in d.e0.entries()]
        }
        doc["projectors"] = [
            {
                "px": format_mpf(p.bloch[0], bits),
                "py": format_mpf(p.bloch[1], bits),
                "pz": format_mpf(p.bloch[2], bits),
            }
            for p in d.projectors
        ]
    return doc


def decomposition_from_json(doc: dict) -> Decomposition:
    try:
        bits = int(doc["precision_bits"])
        e0_doc = doc["e0"]
        projs = doc["projectors"]
        n_factors = int(doc["n_factors"])
    except (KeyError, TypeError) as exc:
        raise InputValidationError(f"malformed decomposition document: missing {exc}")
    if len(projs) != n_factors:
        raise InputValidationError("n_factors disagrees with the projector list")
    work = bits + 32
    with mp.workprec(work):
        angles = None
        if "angle" in e0_doc:
            phi0 = parse_decimal(str(e0_doc["angle"]), work)
            e0 = e0_from_angle(phi0)
            phis = [phi0]
            projectors = []
            for row in projs:
                phi = parse_decimal(str(row["phi"]), work)
                phis.append(phi)
                projectors.append(projector_from_angle(phi))
            angles = tuple(phis)
        else:
            m = e0_doc["matrix"]
            vals = [mp.mpc(parse_decimal(str(r), work), parse_decimal(str(i), work)) for r, i in m]
            e0 = Mat2(*vals)
            projectors = [
                Projector2.from_bloch(
                    parse_decimal(str(row["px"]), work),
                    parse_decimal(str(row["py"]), work),
                    parse_decimal(str(row["pz"]), work),
                )
                for row in projs
            ]
    return Decomposition(
        e0=e0,
        projectors=tuple(projectors),
        output_precision_bits=bits,
        bits=bits,
        angles=angles,
    )


def report_to_json(report: VerifyReport) -> dict:
    return {
        "max_error": mp.nstr(mp.mpf(report.max_error), 17),
        "grid_size": report.grid_size,
        "passed": report.passed,
        "r_used": report.r_used,
    }


def _dump(path: str, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _report_path(output_path: str) -> str:
    if output_path.endswith(".json"):
        return output_path[: -len(".json")] + ".report.json"
    return output_path + ".report.json"


# -- commands ----------------------------------------------------------


def _parse_epsilon(text: str):
    eps = parse_decimal(text, 64)
    if not 0 < eps < mp.mpf(1) / 100:
        raise InputValidationError("epsilon must lie strictly between 0 and 0.01")
    return text


def run(config: JobConfig) -> int:
    """Execute one job; returns the process exit status."""
    if config.command == "generate-ja":
        _parse_epsilon(config.epsilon)
        spec = jacobi_anger(JacobiAngerSpec(tau=config.tau, epsilon=config.epsilon))
        _dump(config.output_path, spec_to_json(spec))
        return EXIT_OK

    if config.command == "generate-inverse":
        _parse_epsilon(config.epsilon)
        params = inverse_params(config.kappa, config.epsilon)
        spec = inverse_poly(params)
        _dump(config.output_path, spec_to_json(spec))
        return EXIT_OK

    if config.command == "decompose":
        spec = spec_from_json(_load(config.input_path))
        d, report, _bits = run_adaptive(
            spec,
            initial_bits=config.initial_precision,
            max_bits=config.max_precision,
            grid_size=config.grid_size,
        )
        if d is not None:
            _dump(config.output_path, decomposition_to_json(d, config.emit_angles))
        _dump(_report_path(config.output_path), report_to_json(report))
        print(json.dumps(report_to_json(report), sort_keys=True))
        return EXIT_OK if report.passed else EXIT_VERIFY_FAILED

    if config.command == "verify":
        spec = spec_from_json(_load(config.input_path))
        d = decomposition_from_json(_load(config.decomposition_path))
        report = check(d, spec, config.grid_size)
        if config.output_path:
            _dump(config.output_path, report_to_json(report))
        print(json.dumps(report_to_json(report), sort_keys=True))
        return EXIT_OK if report.passed else EXIT_VERIFY_FAILED

    raise InputValidationError(f"unknown command {config.command!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qspfactor",
        description="Factor a bounded periodic function into SU(2) primitive matrices.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    dec = sub.add_parser("decompose", help="factor a target spec")
    dec.add_argument("--input", required=True)
    dec.add_argument("--output", required=True)
    dec.add_argument("--grid-size", type=int, default=0)
    dec.add_argument("--initial-precision", type=int, default=INITIAL_BITS)
    dec.add_argument("--max-precision", type=int, default=0)
    dec.add_argument("--emit-angles", choices=("auto", "require", "never"), default="auto")

    gja = sub.add_parser("generate-ja", help="emit the oscillation target e^(i tau sin phi)")
    gja.add_argument("--tau", required=True)
    gja.add_argument("--epsilon", required=True)
    gja.add_argument("--output", required=True)

    ginv = sub.add_parser("generate-inverse", help="emit the bounded reciprocal target")
    ginv.add_argument("--kappa", required=True)
    ginv.add_argument("--epsilon", required=True)
    ginv.add_argument("--output", required=True)

    ver = sub.add_parser("verify", help="re-test a decomposition against its target")
    ver.add_argument("--input", required=True, help="target spec JSON")
    ver.add_argument("--decomposition", required=True)
    ver.add_argument("--output", default="")
    ver.add_argument("--grid-size", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    config = JobConfig(
        command=args.command,
        input_path=getattr(args, "input", ""),
        output_path=getattr(args, "output", ""),
        decomposition_path=getattr(args, "decomposition", ""),
        epsilon=getattr(args, "epsilon", ""),
        tau=getattr(args, "tau", ""),
        kappa=getattr(args, "kappa", ""),
        initial_precision=getattr(args, "initial_precision", INITIAL_BITS),
        max_precision=getattr(args, "max_precision", 0),
        grid_size=getattr(args, "grid_size", 0),
        emit_angles=getattr(args, "emit_angles", "auto"),
    )
    try:
        return run(config)
    except PrecisionCapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for row in exc.diagnostics.get("rounds", []):
            print(f"  round {row}", file=sys.stderr)
        return EXIT_PRECISION_CAP
    except (InputValidationError, NotParityConstrainedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except QspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
