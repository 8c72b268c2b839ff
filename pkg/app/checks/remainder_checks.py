"""
Remainder Term Checks
=====================

Both relations of the remainder term R(s): the reflection R(2k - s) = R(s)
and the cancellation of R + rho R + ... + rho^(p-1) R.
"""

from analysis.mellin_remainder import first_relation_check, verify_second_relation
from checks.base_check import BaseCheck, CheckContext, CheckInfo, CheckReport
from config.config_manager import get_config
from utils.numerics import strip_grid


def remainder_grid(context: CheckContext):
    return strip_grid(context.spec.k, get_config('Verification', 'strip_points'), context.seed,
                      exclusion=get_config('Verification', 'grid_exclusion'))


class R1Check(BaseCheck):
    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="r1",
            version="1.0.0",
            description="R(2k - s) - R(s) = 0, closed form against quadrature",
            equations=["R(2k - s) = R(s)", "R(s) = -int_0^inf q*(iy) y^(s-1) dy"],
            needs=["spec"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        return self.finish(first_relation_check(context.spec, remainder_grid(context), context.tolerance))


class R2Check(BaseCheck):
    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="r2",
            version="1.0.0",
            description="Exact and numeric cancellation of sum_j rho^j(R)",
            equations=["R + rho(R) + ... + rho^(p-1)(R) = 0", "rho^p = id"],
            needs=["spec"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        return self.finish(verify_second_relation(context.spec, remainder_grid(context), context.tolerance))
