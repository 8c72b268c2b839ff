"""
Group and Cycle Checks
======================

Exact checks on the Hecke group itself and on the simple cycle of a seed
form. Neither samples anything numerically except the interior points of
the interval shift test.
"""

from algebra.hecke_group import (
    interval_decomposition, verify_endpoint_order, verify_group_relations, verify_interval_shift,
)
from algebra.quadratic_forms import enumerate_simple_cycle, verify_pole_involution
from checks.base_check import BaseCheck, CheckContext, CheckInfo, CheckReport
from config.config_manager import get_config


class GroupCheck(BaseCheck):
    """T^2 = (ST)^p = I, endpoint order and the interval shift of U"""

    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="group",
            version="1.0.0",
            description="Defining relations and interval decomposition of G_p",
            equations=["T^2 = I", "(ST)^p = I", "U(I_j) = I_(j-1)"],
            needs=["p"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        report = CheckReport(self.info.name, context.tolerance)
        relations = verify_group_relations(context.p)
        dec = interval_decomposition(context.p)
        order_ok = verify_endpoint_order(dec)
        shift = verify_interval_shift(dec, seed=context.seed, x_max=get_config('Verification', 'x_max'))

        report.details.update({
            "p": context.p,
            "relations": relations,
            "endpoint_order": order_ok,
            "interval_shift": {"endpoints": shift["endpoints"], "interior": shift["interior"]},
            "decomposition": dec.to_json(),
        })
        for name, ok in relations.items():
            if not ok:
                report.fail(f"relation {name} fails")
        if not order_ok:
            report.fail("interval endpoints out of order")
        if not (shift["endpoints"] and shift["interior"]):
            report.fail(f"U does not shift the intervals ({len(shift['failures'])} sample failures)")
        return self.finish(report)


class CycleCheck(BaseCheck):
    """Enumeration of Z_A with interval mapping certificates"""

    def get_check_info(self) -> CheckInfo:
        return CheckInfo(
            name="cycle",
            version="1.0.0",
            description="Simple numbers of a Hecke symmetric class",
            equations=["{beta' : beta in Z cap I_(p-j+2)} = U^(j-1)(Z cap I_j)"],
            needs=["form"],
        )

    def run(self, context: CheckContext) -> CheckReport:
        report = CheckReport(self.info.name, context.tolerance)
        cycle = enumerate_simple_cycle(context.form, context.max_depth)
        involution = verify_pole_involution(cycle)
        report.details.update(cycle.to_json())
        report.details["pole_involution"] = involution
        if not involution:
            report.fail("-1/alpha does not permute the pole set")
        return self.finish(report)
