"""
Functional Equation and Inverse Mellin Checks
=============================================
"""

from mpmath import mp

from analysis.mellin_remainder import (
    boundedness_profile, dirichlet_consistency, functional_equation_check, inverse_mellin_check,
    scan_estar_poles,
)
from checks.base_check import BaseCheck, CheckContext, CheckInfo, CheckReport
from config.config_manager import get_config
from utils.errors import HeckeRpfError, InputError
from utils.numerics import strip_grid

DIRICHLET_TOLERANCE = 1e-6
INVMELLIN_TOLERANCE = 1e-4


class FunctionalEquationCheck(BaseCheck):
    """Phi(2k - s) + Phi(s) = R(s) with Phi = D + E0 + E*"""

    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="fe",
            version="1.0.0",
            description="Hecke functional equation with remainder term",
            equations=["Phi(2k - s) + Phi(s) = R(s)"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        series, spec = context.series, context.spec
        if series is None and spec is None:
            raise InputError("fe needs a spec or Fourier coefficients")
        k = series.k if series is not None else spec.k
        grid = strip_grid(k, get_config('Verification', 'strip_points'), context.seed,
                          exclusion=get_config('Verification', 'grid_exclusion'))
        report = functional_equation_check(series, spec, grid, context.tolerance)

        if series is not None and not series.is_zero():
            with mp.workprec(context.precision_bits):
                dirichlet = dirichlet_consistency(series, k + 3)
            report.details["dirichlet"] = dirichlet
            if dirichlet["relative_error"] > DIRICHLET_TOLERANCE + 2 * dirichlet["tail_bound"]:
                report.fail("Dirichlet series and D disagree beyond the tail bound")

        if spec is not None and spec.terms:
            poles = scan_estar_poles(spec, -2, spec.weight + 1)
            report.details["estar_poles"] = sorted(poles)
            stray = [n for n in poles if n > spec.weight - 1]
            if stray:
                report.fail(f"E* has poles right of 2k - 1: {stray}")

        try:
            report.details["boundedness"] = boundedness_profile(series, spec)
        except HeckeRpfError as e:
            self.logger.warning(f"boundedness profile unavailable: {e.message}")
            report.details["boundedness"] = None
        return self.finish(report)


class InverseMellinCheck(BaseCheck):
    """Inverse transform of the closed-form atom along Re s = d"""

    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="invmellin",
            version="1.0.0",
            description="Inverse Mellin transform of R(s; a, b)",
            equations=["(1/2 pi i) int R(s; a, b) y^(-s) ds = (a - b)^k / ((iy - a)^k (iy - b)^k)"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        params = {"a": 1, "b": -1, "k": 1, "y": 1, "d": 1}
        params.update(context.extras.get("invmellin", {}))
        T = get_config('Quadrature', 'invmellin_truncation')
        report = CheckReport(self.info.name, max(context.tolerance, INVMELLIN_TOLERANCE))
        runs = []
        with mp.workprec(context.precision_bits):
            for factor in (1, 2, 4):
                runs.append(inverse_mellin_check(T=T * factor, **params))
        report.add(complex(params["d"], T), runs[0]["error"])
        errors = [r["error"] for r in runs]
        improving = all(b <= 1.5 * a + 1e-12 for a, b in zip(errors, errors[1:]))
        report.details.update({"parameters": params, "runs": [
            {"T": r["T"], "error": r["error"], "truncation_estimate": r["truncation_estimate"]} for r in runs
        ], "improving": improving})
        if not improving:
            report.fail(f"error does not shrink as T doubles: {errors}")
        return self.finish(report)
