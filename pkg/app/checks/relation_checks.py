"""
Period Relation Checks
======================

The two defining relations of a rational period function, evaluated on
seeded points of the upper half-plane.
"""

from analysis.rpf import growth_profile, verify_odd_symmetry, verify_relation1, verify_relation2
from checks.base_check import BaseCheck, CheckContext, CheckInfo, CheckReport
from config.config_manager import get_config
from utils.numerics import sample_upper_half_plane

# 64-bit evaluation loses digits to cancellation in weight 6 and above
LOW_PRECISION_FLOOR = 1e-6


def relation_tolerance(context: CheckContext) -> float:
    spec = context.spec
    if spec.k >= 3 and spec.bits < 128:
        return max(context.tolerance, LOW_PRECISION_FLOOR)
    return context.tolerance


def relation_samples(context: CheckContext):
    return sample_upper_half_plane(
        context.sample_count, context.seed,
        x_max=get_config('Verification', 'x_max'),
        y_min=get_config('Verification', 'y_min'),
        y_max=get_config('Verification', 'y_max'),
    )


class Rpf1Check(BaseCheck):
    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="rpf1",
            version="1.0.0",
            description="q|T + q = 0",
            equations=["q(z) + z^(-2k) q(-1/z) = 0"],
            needs=["spec"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        samples = relation_samples(context)
        report = verify_relation1(context.spec, samples, relation_tolerance(context))
        symmetry = verify_odd_symmetry(context.spec, samples, relation_tolerance(context))
        report.details["odd_symmetry_max"] = symmetry.max_residual
        report.details["growth"] = growth_profile(context.spec)
        if not symmetry.passed:
            report.fail("pole set sums are not odd under conjugation")
        return self.finish(report)


class Rpf2Check(BaseCheck):
    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="rpf2",
            version="1.0.0",
            description="q + q|U + ... + q|U^(p-1) = 0",
            equations=["sum_(j<p) q|U^j = 0"],
            needs=["spec"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        report = verify_relation2(context.spec, relation_samples(context), relation_tolerance(context))
        return self.finish(report)
