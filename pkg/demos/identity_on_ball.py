"""Both sides of the integral identity for the de Rham pair, plus the estimate quotients.

Run: python3 demos/identity_on_ball.py
"""

import numpy as np

from weitzenbock import catalog, domains, fields, verify

pair = catalog.de_rham(3, 1).pair
rng = np.random.default_rng(0)

for dom in (domains.ball(), domains.ellipsoid([1.0, 1.5, 2.0])):
    suite = [fields.make_bump_field(dom, [0.1, 0.0, 0.0], 0.5, (rng.normal(size=3), rng.normal(size=(3, 3)))),
             fields.make_projected_field(pair, dom, fields.random_polynomial_field(3, 3, 3, rng))]
    if dom.name == "ball":
        suite.append(fields.rotation_field([0.0, 0.0, 1.0], pair.B, dom))
    print(dom)
    for fld in suite:
        r = verify.weitzenbock_residual(pair, dom, fld)
        print(f"  {fld.descriptor:42s} interior {r.lhs_interior:+.10f}  boundary {r.rhs_boundary:+.10f}"
              f"  residual {r.residual:.1e}")
    mq = verify.morrey_quotient(pair, dom, suite)
    sq = verify.square_function_quotient(pair, dom, suite)
    print(f"  max Morrey quotient {mq['max_quotient']:.6f}, max square-function quotient {sq['max_quotient']:.6f}")
    if dom.name == "ball":
        print(f"  rotation field: both sides should be 8 pi / 3 = {8 * np.pi / 3:.10f}")
