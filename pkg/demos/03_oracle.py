"""
Closed forms against brute force
================================

The LP over mean distributions, the partition search and the dual
certificate, at a few points.  At mu = 0.45, c = 2 the closed form for
1/4 < mu < 1/2 leaves revenue on the table and the certificate fails.
"""
from productline import ModelParams
from productline.oracle import run_oracle

for mu, c in [(0.2, 1.0), (0.35, 1.0), (0.45, 2.0), (0.75, 2.0)]:
    rep = run_oracle(ModelParams.create(mu, 1.0, c), grid_size=1001)
    print(f"mu={mu:.2f} c={c:.1f}  LP={rep.lp.value:.6f}  closed={rep.closed_form:.6f}  "
          f"LP-closed={rep.lp_minus_closed:+.2e}  certificate ok={rep.certificate_report.passed}")
