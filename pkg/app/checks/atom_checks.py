"""
Remainder Atom Check
====================

Closed form of the remainder atom against direct quadrature over every
sign configuration of the pole pair, plus the reflection identity that
lets rho act on atoms.
"""

from mpmath import mp

from analysis.mellin_remainder import atom_closed, atom_quadrature, reflection_residual
from checks.base_check import BaseCheck, CheckContext, CheckInfo, CheckReport
from config.config_manager import get_config
from utils.numerics import regular_strip_grid, relative_error

# (a, b) with a < 0 < b, b < 0 < a, 0 < b < a, a < b < 0, then the two swapped cases
SIGN_CONFIGURATIONS = [(-0.5, 1.5), (1.5, -0.5), (2.0, 0.5), (-2.0, -0.5), (0.5, 2.0), (-0.5, -2.0)]
WEIGHTS = (1, 3)
RELATIVE_TOLERANCE = 1e-6
ANCHOR_TOLERANCE = 1e-10


class AtomFormulaCheck(BaseCheck):
    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="lemma1",
            version="1.0.0",
            description="Closed form of R(s; a, b) against quadrature",
            equations=["R(s; a, b) = i^s (...) B(2k - s, s - k) 2F1[k, 1 - k; k - s + 1; b/(b - a)] + ...",
                       "R(s; U^-1 a, U^-1 b) = -R(2k - s; a - lambda, b - lambda)"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        report = CheckReport(self.info.name, max(context.tolerance, RELATIVE_TOLERANCE))
        exclusion = get_config('Verification', 'grid_exclusion')
        p = context.spec.p if context.spec is not None else 3
        reflection = 0.0
        with mp.workprec(max(context.precision_bits, 64)):
            for k in WEIGHTS:
                for s in regular_strip_grid(k, 3, 3, exclusion):
                    worst = 0.0
                    for a, b in SIGN_CONFIGURATIONS:
                        worst = max(worst, relative_error(atom_closed(s, a, b, k), atom_quadrature(s, a, b, k)))
                    report.add(s, worst)
                    reflection = max(reflection, reflection_residual(s, 2.5, -0.7, k, p))

            anchor = atom_closed(1, 1, -1, 1)
            anchor_quad = atom_quadrature(1, 1, -1, 1)
            anchor_error = float(max(abs(anchor + mp.pi), abs(anchor_quad + mp.pi)))

        report.details.update({
            "configurations": [list(c) for c in SIGN_CONFIGURATIONS],
            "weights": list(WEIGHTS),
            "anchor_R(1;1,-1)": float(anchor.real),
            "anchor_error": anchor_error,
            "reflection_max": reflection,
        })
        if anchor_error > ANCHOR_TOLERANCE:
            report.fail(f"R(1; 1, -1) misses -pi by {anchor_error:.3e}")
        if reflection > report.tolerance:
            report.fail(f"reflection identity off by {reflection:.3e}")
        return self.finish(report)
