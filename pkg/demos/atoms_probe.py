"""Feed dyadic atoms to discretized norms and compare the ratio growth with the analytic slope."""

from embedkit.criteria import EmbeddingQuery, SpaceSpec
from embedkit.oracle import embedding_ratio_probe
from embedkit.weights import Constant, RadialPower


def probe(label, s0, p0, s1, p1, w0, w1):
    q = EmbeddingQuery(SpaceSpec("F", s0, p0, 2, w0), SpaceSpec("F", s1, p1, 2, w1))
    rep = embedding_ratio_probe(q, nus=range(2, 7))
    print(f"{label}: {rep.conclusion}")
    for ln in rep.lines:
        print(f"    {ln.label:<10} measured {ln.measured_slope:+.3f}  analytic {ln.analytic_slope:+.3f}")


u = Constant(1)
probe("F^1_2 -> F^0_2", 1, 2, 0, 2, u, u)
probe("F^1_2 -> F^0.9_10", 1, 2, 0.9, 10, u, u)
probe("F^1_2(|x|) -> F^0.75_2", 1, 2, 0.75, 2, RadialPower(1, 1, 1), u)
