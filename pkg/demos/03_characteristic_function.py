"""The characteristic function: point values versus Taylor coefficients.

Three views of theta:
  * J_3 over the constant-coefficient kernel, where theta(z) = unimodular z^3
    (a polynomial; the series terminates and the two views agree exactly);
  * the scalar contraction 1/2, whose theta is the Moebius map
    (z - 1/2)/(1 - z/2) with geometric Taylor coefficients;
  * the zero tuple, where theta(z) is the coefficient row Z(z) itself.
"""
import numpy as np

from cnpcurv import (
    check_consistency,
    defect_package,
    eval_theta,
    load_tuple,
    preset,
    taylor,
)

print("=" * 72)
print("1. Jordan block J_3: a polynomial characteristic function")
print("=" * 72)

J = np.zeros((3, 3)); J[1, 0] = J[2, 1] = 1.0
t = load_tuple([J])
k = preset("szego", d=1, N=12)
pkg = defect_package(t, k)
series = taylor(pkg, k)
print("is_polynomial:", series.is_polynomial, " degree:", series.degree)
for key, a in sorted(series.coeffs.items()):
    if np.abs(a).max() > 1e-12:
        print(f"  A_{key} = {a.ravel()}")
for z in (0.5, 0.9, -0.3):
    pe = eval_theta(pkg, k, [z])
    print(f"  |theta({z:+.1f})| = {abs(pe.theta[0,0]):.6f}   |z|^3 = {abs(z)**3:.6f}")

print()
print("=" * 72)
print("2. Scalar contraction 1/2: the Moebius map")
print("=" * 72)

th = load_tuple([np.array([[0.5]])])
k40 = preset("szego", d=1, N=40)
pkg_h = defect_package(th, k40, n_op=30)
series_h = taylor(pkg_h, k40, n_theta=8)
print("A_0 =", series_h.coeffs[(0,)][0, 0], "  (constant term -T)")
print("geometric coefficients 3/4 * (1/2)^(n-1):")
for n in range(1, 6):
    print(f"  |A_{n}| = {abs(series_h.coeffs[(n,)][0,0]):.6f}   "
          f"expected {0.75 * 0.5 ** (n - 1):.6f}")
z = 0.4
pe = eval_theta(pkg_h, k40, [z])
moebius = (z - 0.5) / (1 - z / 2)
print(f"theta({z}) = {pe.theta[0,0]:.8f}   Moebius value {moebius:.8f}")

chk = check_consistency(series_h, pkg_h, k40, r_check=0.5)
print(f"series vs pointwise on ||z|| <= 0.5: max residual {chk.max_residual:.2e}"
      f"  (analytic tail bound {chk.tail_bound:.2e})")

print()
print("=" * 72)
print("3. Zero tuple in two variables: theta is the coefficient row")
print("=" * 72)

t0 = load_tuple([np.zeros((1, 1)), np.zeros((1, 1))])
k2 = preset("drury-arveson", d=2, N=8)
pkg0 = defect_package(t0, k2, n_op=1)
pe = eval_theta(pkg0, k2, [0.3, 0.4])
print("theta(0.3, 0.4) =", np.round(pe.theta, 12))
print("norm:", pe.norm, " (= ||z|| = 0.5; the row is contractive on the ball)")
