"""Kernel coefficient tables: the b-recurrence, weight rows, regularity.

Walks through the three presets, shows the reciprocal-series recurrence that
produces the b-table, the averaging weights and their row sums, and what the
finite-horizon regularity trends look like for a kernel that is *not*
regular (a geometric coefficient decay).
"""
from fractions import Fraction

import numpy as np

from cnpcurv import CNPViolation, bn_from_an, from_coefficients, preset, regularity, weights

print("=" * 72)
print("1. Presets and the b-recurrence")
print("=" * 72)

for name in ("szego", "drury-arveson", "dirichlet"):
    k = preset(name, d=1, N=8)
    print(f"\n{name}:")
    print("  a =", [str(x) for x in k.a_exact])
    print("  b =", [str(x) for x in k.b_exact[1:]])

print(
    """
The constant table a_n = 1 inverts to b = (1, 0, 0, ...): for that kernel the
defect series is the familiar I - sum T_i T_i*.  The dirichlet table
a_n = 1/(n+1) produces the slowly decaying b-sequence 1/2, 1/12, 1/24, ...
whose partial sums creep toward 1.
"""
)

k = preset("dirichlet", d=1, N=200)
for horizon in (20, 50, 100, 200):
    print(f"  sum of b_1..b_{horizon:<4d} = {k.b_partial_sum(horizon):.6f}")

print()
print("=" * 72)
print("2. Weight rows: the averaging kernel of the asymptotic formula")
print("=" * 72)

k = preset("dirichlet", d=1, N=10)
for n in (0, 1, 4):
    row = weights(k, n)
    print(f"  w[{n}] = {[str(x) for x in row.w_exact]}  (sum = "
          f"{sum(row.w_exact, Fraction(0))})")

da = preset("drury-arveson", d=2, N=10)
print("  drury-arveson row n=6:", weights(da, 6).w, " (a Kronecker row)")

print()
print("=" * 72)
print("3. Regularity trends (never certificates)")
print("=" * 72)

for label, k in (
    ("dirichlet, N=100", preset("dirichlet", d=1, N=100)),
    ("geometric a_n = 2^-n", from_coefficients([Fraction(1, 2**n) for n in range(30)], d=1)),
):
    rep = regularity(k)
    print(f"\n  {label}")
    print(f"    last ratios a_n/a_n+1 : {np.round(rep.ratio_tail, 4)}")
    print(f"    sum a_n (divergence proxy): {rep.divergence_proxy:.4f}")
    print(f"    sum b_n: {rep.b_partial_sum:.6f}")
    print(f"    flags: cnp={rep.cnp_flag} ratio_trend={rep.ratio_flag} "
          f"divergence_trend={rep.divergence_flag}")

print()
print("=" * 72)
print("4. Rejection: tables whose inverse has a negative coefficient")
print("=" * 72)

try:
    bn_from_an([1, 2, 1])
except CNPViolation as exc:
    print(f"  a = (1, 2, 1) rejected: {exc}")
