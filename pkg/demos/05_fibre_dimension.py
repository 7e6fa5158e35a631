"""Fibre dimension: evaluation rank versus the graded-dimension quotient.

The rank of theta(z) is generically maximal, so sampling a handful of ball
points already pins the fibre dimension; the graded quotients
dim(P_n Ran M_theta)/q_d(n) approach the same number from below, at a speed
visible in the tables printed here.  Closes with the inner-multiplier chain
and what slow kernel tails do to it at a finite horizon.
"""
import numpy as np

from cnpcurv import (
    RunSettings,
    defect_package,
    fd_by_grading,
    fd_report,
    load_tuple,
    preset,
    purity,
    run_curvature,
    taylor,
)

print("=" * 72)
print("1. Jordan block: fd = 1, graded quotients (n-2)/(n+1)")
print("=" * 72)

J = np.zeros((3, 3)); J[1, 0] = J[2, 1] = 1.0
t = load_tuple([J])
k = preset("szego", d=1, N=16)
pkg = defect_package(t, k)
pur = purity(t, k, pkg)
rep = fd_report(pkg, k, purity_residual=pur.purity_residual)
print(f"evaluation rank: fd = {rep.fd_eval}  [{rep.label}], attained by "
      f"{100 * rep.attained_fraction:.0f}% of samples")

series = taylor(pkg, k)
seq = fd_by_grading(series, k, 14)
print("graded quotients:", np.round(seq, 4))

print()
print("=" * 72)
print("2. Zero tuple on C^3: full fibre dimension")
print("=" * 72)

t0 = load_tuple([np.zeros((3, 3))])
k0 = preset("drury-arveson", d=1, N=10)
pkg0 = defect_package(t0, k0, n_op=1)
rep0 = fd_report(pkg0, k0, purity_residual=0.0)
print(f"fd = {rep0.fd_eval}  (theta(z) = z·I_3 has full row rank off the origin)")

print()
print("=" * 72)
print("3. The inner-multiplier chain, and finite-horizon honesty")
print("=" * 72)

res = run_curvature(t, k, RunSettings(n_samples=600, n_max=12))
v = res.innermult
print("Jordan block (terminating series):")
print(f"  series value vs fd gap : {v.gap_series_vs_eval:.2e}  -> ok = {v.ok}")
print(f"  P-quotient trend       : {v.gap_p_quotient_early:.4f} -> "
      f"{v.gap_p_quotient_last:.4f} (approaching fd)")

t2 = load_tuple([np.zeros((2, 2))])
kd = preset("dirichlet", d=1, N=44)
res2 = run_curvature(t2, kd, RunSettings(n_op=40, n_theta=40, n_max=10, n_samples=300))
v2 = res2.innermult
print("\nZero tuple on C^2, dirichlet kernel, horizon 40 (slow b-tails):")
print(f"  series value vs fd gap : {v2.gap_series_vs_eval:.4f}  -> ok = {v2.ok}")
print(f"  (the gap equals dim times the kernel's b-tail mass "
      f"{1 - kd.b_partial_sum(40):.4f}; it shrinks only logarithmically,")
print("   so the 0.05 gate in the chain check genuinely fails at this horizon --")
print("   the verdict reports the deficit instead of hiding it)")
