"""Lattice limit of coupled four-parameter polynomials.

Driving the degree, parameters and evaluation points of the coupled
polynomial product along the schedule sends the normalized values to a
prefactored multivariate lattice Bessel function; the error contracts by
about the base per step.
"""

from qcoupling import LimitSchedule, QContext, limit_check

ctx = QContext("0.5")

for sched, label in [
    (LimitSchedule(tuple(range(1, 9)), (0,), (0, 3, 1), (0,)), "one variable"),
    (LimitSchedule(tuple(range(1, 9)), (0, 1), (0, 2, 2, 0), (-1, 0)), "two variables"),
]:
    print(f"{label}: lam={sched.lam} nu={sched.nu} x={sched.x}")
    print("   m   rel. error     normalized/target")
    for pt in limit_check(sched, ctx):
        if pt.skipped:
            print(f"  {pt.m:2d}   skipped ({pt.reason})")
        else:
            print(f"  {pt.m:2d}   {pt.rel_error:10.3e}   {pt.ratio:+.8f}")
    print()
