"""
BINOMIAL GROWTH ANALYZER
Admissible orders and types of entire solutions of linear difference equations
with polynomial coefficients.

Commands:
- analyze   exact s-sequence, (rho_j, L_j) profile and hull cross-check
- solve     solution basis of the coefficient recurrence, chi/tau estimates, profile match
- construct equation with a solution of prescribed order q/p and type sigma
- verify    log M(r) on circles against the profile and the coefficient-side type

Exit codes: 0 ok, 2 input error, 3 empty profile, 4 precision, 5 invariant failure
"""
import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from loguru import logger

from config import (
    CircleConfig,
    ConstructorConfig,
    EstimateConfig,
    ExitCodes,
    LOG_FILE,
    LOG_LEVEL,
    RecurrenceConfig,
)
from src import report as reporting
from src.constructor import build_shifted, normalize_shifts, reference_solution, sigma_from_float
from src.equation_io import load_equation, write_equation
from src.errors import (
    AllCoefficientsZero,
    EquationFormatError,
    GrowthError,
    InvalidLambda,
    InvalidSigma,
    InvariantViolation,
    PrecisionTooLow,
)
from src.growth_estimate import estimate_growth, profile_match
from src.newton_polygon import DifferenceEquation, degrees, growth_profile, hull_crosscheck
from src.recurrence import (
    BasisClass,
    build_system,
    characteristic_roots,
    check_residuals,
    degree_table_violations,
    solution_basis,
)
from src.series_eval import empirical_growth

PREVIEW = ConstructorConfig.PREVIEW_TERMS


@dataclass
class CommandResult:
    exit_code: int
    report: Dict[str, Any] = field(default_factory=dict)


def configure_logging(level: str = LOG_LEVEL, log_file: str = LOG_FILE):
    """Logs go to stderr so stdout carries only the report"""
    logger.remove()
    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan> - <level>{message}</level>",
        level=level,
    )
    if log_file:
        logger.add(log_file, rotation="1 day", retention="7 days", level="DEBUG")


def parse_radii(text: str) -> List[float]:
    try:
        radii = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}: {e}")
    if not radii or any(r <= 0 for r in radii):
        raise argparse.ArgumentTypeError("radii must be positive")
    return radii


# =============================================================================
# PIPELINES
# =============================================================================

def _analysis(eq: DifferenceEquation, report: Dict[str, Any]) -> int:
    """Fills the analyze sections; returns the exit code they imply"""
    profile = growth_profile(eq)
    rs = build_system(eq)
    ok, hull = hull_crosscheck(eq, rs)
    violations = degree_table_violations(eq, rs)

    report.update({
        "equation": eq.to_json(),
        "equation_text": str(eq),
        "degrees": [[j, d] for j, d in degrees(eq)],
        "s_sequence": reporting.sseq_section(profile.sseq),
        "profile": reporting.profile_section(profile),
        "hull": reporting.hull_section(hull),
        "degree_table": violations,
        "characteristic_roots": [reporting.roots_section(characteristic_roots(rs, profile, e.j))
                                 for e in profile],
        "resonances": list(rs.resonances),
    })

    if not ok or violations:
        report["error"] = "internal invariant failure: hull or degree table mismatch"
        return ExitCodes.INVARIANT
    if profile.is_empty:
        report.setdefault("warnings", []).append("no admissible order < 1 (p = 1)")
        return ExitCodes.EMPTY_PROFILE
    return ExitCodes.OK


def cmd_analyze(path: str) -> CommandResult:
    report: Dict[str, Any] = {"command": "analyze", "file": path}
    code = _analysis(load_equation(path), report)
    return CommandResult(code, report)


def _solve_into(eq: DifferenceEquation, report: Dict[str, Any], terms: int, precision_bits: int):
    profile = growth_profile(eq)
    rs = build_system(eq)
    basis = solution_basis(rs, terms, precision_bits, profile)

    members = []
    for index, member in enumerate(basis.members):
        match = estimate = None
        if member.kind is not BasisClass.OTHER:
            match = profile_match(member.sequence, profile)
            estimate = estimate_growth(member.sequence, member.rho)
        members.append(reporting.member_section(index, member, match, estimate, PREVIEW))

    report["basis"] = {
        "dimension": basis.dimension,
        "N": basis.N,
        "precision_bits": precision_bits,
        "tail_extension": basis.extension,
        "members": members,
        "order_below_one": len(basis.of_order_below_one()),
    }
    report.setdefault("warnings", []).extend(basis.warnings)
    return profile, basis


def cmd_solve(path: str, terms: int = RecurrenceConfig.TERMS,
              precision_bits: int = RecurrenceConfig.PRECISION_BITS) -> CommandResult:
    report: Dict[str, Any] = {
        "command": "solve",
        "file": path,
        "settings": {"terms": terms, "precision_bits": precision_bits,
                     "chi_tolerance": EstimateConfig.CHI_TOLERANCE,
                     "type_tolerance": EstimateConfig.TYPE_TOLERANCE},
    }
    eq = load_equation(path)
    code = _analysis(eq, report)
    if code == ExitCodes.INVARIANT:
        return CommandResult(code, report)
    _solve_into(eq, report, terms, precision_bits)
    return CommandResult(code, report)


def cmd_construct(lam: str, sigma: Optional[str] = None, sigma_float: Optional[str] = None,
                  out: Optional[str] = None, precision_bits: int = RecurrenceConfig.PRECISION_BITS) -> CommandResult:
    if (sigma is None) == (sigma_float is None):
        raise InvalidSigma("give exactly one of --sigma and --sigma-float")
    warnings = []
    if sigma_float is not None:
        exact_sigma = sigma_from_float(sigma_float)
        warnings.append(f"sigma {sigma_float} rationalized to {exact_sigma} "
                        f"({ConstructorConfig.SIGMA_FLOAT_BITS} significant bits)")
    else:
        exact_sigma = sigma

    se = build_shifted(lam, exact_sigma)
    eq = normalize_shifts(se)
    a0_over_ap, a0_over_a1 = se.ratios()
    report: Dict[str, Any] = {"command": "construct", "warnings": warnings}
    code = _analysis(eq, report)

    profile = growth_profile(eq)
    round_trip = profile.contains(se.lam, se.sigma)
    preview = reference_solution(se.lam, se.sigma, 200, precision_bits)
    check_residuals(build_system(eq), preview)

    report["construction"] = {
        "lambda": str(se.lam),
        "sigma": str(se.sigma),
        "A": [str(a) for a in se.coefficients],
        "A0_over_Ap": str(a0_over_ap),
        "A0_over_A1": str(a0_over_a1),
        "shifted_equation": str(se),
        "round_trip": round_trip,
        "written_to": out,
    }
    report["preview"] = reporting.coefficient_preview(preview, PREVIEW * se.q)

    if out:
        write_equation(eq, out, meta={"lambda": str(se.lam), "sigma": str(se.sigma)})
    if not round_trip:
        report["error"] = f"constructed profile does not contain ({se.lam}, {se.sigma})"
        return CommandResult(ExitCodes.INVARIANT, report)
    return CommandResult(code, report)


def cmd_verify(path: str, radii: Optional[List[float]] = None, terms: int = RecurrenceConfig.TERMS,
               precision_bits: int = RecurrenceConfig.PRECISION_BITS,
               samples: int = CircleConfig.SAMPLES) -> CommandResult:
    radii = radii or parse_radii(CircleConfig.RADII)
    report: Dict[str, Any] = {
        "command": "verify",
        "file": path,
        "settings": {"terms": terms, "precision_bits": precision_bits, "samples": samples,
                     "radii": ",".join(f"{r:g}" for r in radii),
                     "budget_factor": CircleConfig.BUDGET_FACTOR},
    }
    eq = load_equation(path)
    code = _analysis(eq, report)
    if code == ExitCodes.INVARIANT:
        return CommandResult(code, report)
    profile, basis = _solve_into(eq, report, terms, precision_bits)
    entries = {e.j: e for e in profile}

    growth = []
    for index, member in enumerate(basis.members):
        if member.kind is BasisClass.ORDER:
            entry = entries[member.segment]
            result = empirical_growth(member.sequence, radii, member.rho, samples)
            tau = report["basis"]["members"][index].get("tau_hat")
            growth.append(reporting.growth_section(index, result, float(entry.type), tau,
                                                   CircleConfig.AGREEMENT_BRACKET))
        elif member.kind is BasisClass.POLYNOMIAL:
            result = empirical_growth(member.sequence, radii, "fit", samples)
            growth.append(reporting.growth_section(index, result, None, None,
                                                   CircleConfig.AGREEMENT_BRACKET))
    report["growth"] = growth
    return CommandResult(code, report)


# =============================================================================
# ENTRY POINT
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="growth",
        description="Orders and types of entire solutions of linear difference equations",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable report")
    parser.add_argument("--log-level", default=LOG_LEVEL, help=f"log level (default {LOG_LEVEL})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="exact profile of an equation file")
    p.add_argument("path")

    def numeric(sp):
        sp.add_argument("--terms", type=int, default=RecurrenceConfig.TERMS,
                        help=f"coefficients a_0..a_N (default {RecurrenceConfig.TERMS})")
        sp.add_argument("--precision-bits", type=int, default=RecurrenceConfig.PRECISION_BITS,
                        help=f"mantissa bits (default {RecurrenceConfig.PRECISION_BITS})")

    p = sub.add_parser("solve", help="solution basis and growth estimates")
    p.add_argument("path")
    numeric(p)

    p = sub.add_parser("construct", help="equation with prescribed order and type")
    p.add_argument("--lambda", dest="lam", required=True, help="order q/p in (0, 1)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--sigma", help="type a/b > 0")
    group.add_argument("--sigma-float", help="type as a decimal, rationalized to 64 bits")
    p.add_argument("--out", help="equation file to write (.json or .yaml)")

    p = sub.add_parser("verify", help="maximum modulus on circles against the profile")
    p.add_argument("path")
    numeric(p)
    p.add_argument("--radii", type=parse_radii, default=parse_radii(CircleConfig.RADII),
                   help=f"comma-separated radii (default {CircleConfig.RADII})")
    p.add_argument("--samples", type=int, default=CircleConfig.SAMPLES,
                   help=f"points per circle (default {CircleConfig.SAMPLES})")
    return parser


def dispatch(args: argparse.Namespace) -> CommandResult:
    if args.command == "analyze":
        return cmd_analyze(args.path)
    if args.command == "solve":
        return cmd_solve(args.path, args.terms, args.precision_bits)
    if args.command == "construct":
        return cmd_construct(args.lam, args.sigma, args.sigma_float, args.out)
    return cmd_verify(args.path, args.radii, args.terms, args.precision_bits, args.samples)


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitCodes.INPUT_ERROR if e.code else ExitCodes.OK

    configure_logging(args.log_level)
    try:
        result = dispatch(args)
    except (EquationFormatError, InvalidLambda, InvalidSigma, AllCoefficientsZero, ValueError) as e:
        result = CommandResult(ExitCodes.INPUT_ERROR, {"command": args.command, "error": str(e)})
    except PrecisionTooLow as e:
        hint = f"; try --precision-bits {e.suggested_bits}" if e.suggested_bits else ""
        result = CommandResult(ExitCodes.PRECISION, {"command": args.command, "error": f"{e}{hint}"})
    except (InvariantViolation, GrowthError) as e:
        result = CommandResult(ExitCodes.INVARIANT, {"command": args.command, "error": str(e)})

    result.report["exit_code"] = result.exit_code
    if result.exit_code != ExitCodes.OK and "error" in result.report:
        logger.error(result.report["error"])
    text = reporting.render_json(result.report) if args.json else reporting.render_text(result.report)
    print(text)
    return result.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
