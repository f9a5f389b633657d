"""Check a Gagliardo-Nirenberg type inequality on random band-limited fields."""

from embedkit.oracle import gn_check, random_band_limited
from embedkit.weights import Constant, RadialPower

fields = random_band_limited(50, seed=7)
u = Constant(1)
for w1 in (u, RadialPower(1, 0.5, 0.5)):
    for theta in (0.25, 0.5, 0.75):
        rep = gn_check(fields, theta, 1.0, 2.0, 2.0, u, 0.0, 2.0, 2.0, w1)
        print(f"w1={w1!r:<40} theta={theta:.2f}  s={rep.s:.2f}  max ratio {rep.max_ratio:.3f}")
