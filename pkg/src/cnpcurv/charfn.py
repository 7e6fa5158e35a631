"""Characteristic function of a tuple: point evaluation and Taylor series.

theta(z) = W* (-Ttilde + Delta (I - B(z))^{-1} Z(z) Dtilde) V, where
B(z) = sum b_alpha z^alpha (T^alpha)* and Z(z) is the block row with
alpha-block sqrt(b_alpha) z^alpha I.  Compressing by the range bases W and V
loses nothing: theta maps Ran Dtilde into Ran Delta, and the compression
makes trace(A_gamma A_gamma*) basis independent.

Taylor coefficients are extracted by graded convolution of the operator
power series G = Z + B G (never by numerical differentiation), which is
exact for jointly nilpotent tuples.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .comb import MultiIndex, enumerate_degree
from .config import DEFAULT, Tolerances
from .errors import HorizonExceeded, NearSingular, OutsideBall
from .kernel import KernelSpec
from .tuples import DefectPackage, op_norm

__all__ = [
    "PointEvaluation",
    "CharacteristicSeries",
    "eval_theta",
    "taylor",
    "check_consistency",
    "sample_ball_points",
]


@dataclass(frozen=True)
class PointEvaluation:
    z: np.ndarray
    theta: np.ndarray            # rank_delta x rank_d
    singular_values: np.ndarray

    @property
    def norm(self) -> float:
        return float(self.singular_values[0]) if self.singular_values.size else 0.0

    @property
    def trace_theta_theta_star(self) -> float:
        return float(np.sum(self.singular_values**2))


def _z_power(z: np.ndarray, alpha: MultiIndex) -> complex:
    out = complex(1.0)
    for zi, e in zip(z, alpha.entries):
        if e:
            out *= zi**e
    return out


def _resolvent_input(pkg: DefectPackage, k: KernelSpec, z: np.ndarray):
    """B(z) = Z(z) Ttilde* as a dimH x dimH matrix and the block row Z(z).

    Both come straight out of the package's block row: the alpha-block of
    Ttilde is sqrt(b_alpha) T^alpha, so b_alpha z^alpha (T^alpha)* is
    sqrt(b_alpha) z^alpha times the block's adjoint.
    """
    dim = pkg.dim_h
    b = np.zeros((dim, dim), dtype=complex)
    z_row = np.zeros((dim, pkg.tilde_dim), dtype=complex)
    eye = np.eye(dim)
    for idx, alpha in enumerate(pkg.tilde_index_set):
        psi = np.sqrt(k.b_of(alpha)) * _z_power(z, alpha)
        block = pkg.t_tilde[:, pkg.block_slice(idx)]
        b += psi * block.conj().T
        z_row[:, pkg.block_slice(idx)] = psi * eye
    return b, z_row


def eval_theta(
    pkg: DefectPackage,
    k: KernelSpec,
    z,
    tol: Tolerances = DEFAULT,
) -> PointEvaluation:
    """Evaluate theta at a point of the open unit ball.

    Solves (I - B(z)) X = Z(z) Dtilde directly; invertibility inside the ball
    is guaranteed because ||B(z)|| <= 1 - 1/s(z, z) < 1 before truncation.
    Raises OutsideBall for ||z|| >= 1 and NearSingular when the resolvent
    system's condition number exceeds the gate (point too close to the
    boundary for the horizon).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (k.d,):
        raise ValueError(f"point must have {k.d} coordinates, got {z.shape}")
    if np.linalg.norm(z) >= 1.0:
        raise OutsideBall(f"||z|| = {np.linalg.norm(z):.6f} is not < 1")
    b, z_row = _resolvent_input(pkg, k, z)
    system = np.eye(pkg.dim_h) - b
    if pkg.dim_h and np.linalg.cond(system) > tol.near_singular_cond:
        raise NearSingular(
            "resolvent system is ill-conditioned at this point; reduce the "
            "radius or raise the horizon"
        )
    x = np.linalg.solve(system, z_row @ pkg.d_tilde)
    theta = pkg.w.conj().T @ (-pkg.t_tilde + pkg.delta @ x) @ pkg.v
    sv = np.linalg.svd(theta, compute_uv=False) if theta.size else np.zeros(0)
    return PointEvaluation(z=z, theta=theta, singular_values=sv)


@dataclass(frozen=True)
class CharacteristicSeries:
    """Graded Taylor data: coeffs maps alpha entries to the rank_delta x
    rank_d matrix A_alpha, for |alpha| <= n_theta.  w and v are the range
    bases the coefficients are expressed in (handles from the package)."""

    coeffs: dict[tuple[int, ...], np.ndarray]
    n_theta: int
    d: int
    rank_delta: int
    rank_d: int
    is_polynomial: bool
    degree: int | None           # exact degree when is_polynomial
    kernel_fingerprint: tuple
    w: np.ndarray | None = None
    v: np.ndarray | None = None

    def coeff(self, alpha) -> np.ndarray:
        key = tuple(alpha.entries) if isinstance(alpha, MultiIndex) else tuple(alpha)
        a = self.coeffs.get(key)
        if a is None:
            return np.zeros((self.rank_delta, self.rank_d), dtype=complex)
        return a

    def coeff_gram_trace(self, alpha) -> float:
        """trace(A_alpha A_alpha*)."""
        a = self.coeff(alpha)
        return float(np.sum(np.abs(a) ** 2))

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """Sum of A_gamma z^gamma over the stored coefficients."""
        out = np.zeros((self.rank_delta, self.rank_d), dtype=complex)
        for key, a in self.coeffs.items():
            out += a * _z_power(z, MultiIndex(key))
        return out


def taylor(
    pkg: DefectPackage,
    k: KernelSpec,
    n_theta: int | None = None,
    tol: Tolerances = DEFAULT,
) -> CharacteristicSeries:
    """Extract A_gamma for |gamma| <= n_theta by graded convolution.

    A_0 = -W* Ttilde V; for |gamma| >= 1, A_gamma = W* Delta G_gamma Dtilde V
    where G solves G = Z + B G degree by degree.  Requires n_theta <= n_op
    unless the kernel certifies b_n = 0 beyond the package horizon.
    """
    if n_theta is None:
        n_theta = default_taylor_horizon(pkg, k)
    if n_theta < 0:
        raise ValueError("n_theta must be >= 0")
    if n_theta > pkg.n_op and not k.b_is_zero_beyond(pkg.n_op):
        raise HorizonExceeded(
            f"n_theta = {n_theta} demands blocks beyond the package horizon "
            f"n_op = {pkg.n_op}"
        )
    if n_theta > k.N and not k.b_is_zero_beyond(k.N):
        raise HorizonExceeded(f"n_theta = {n_theta} beyond kernel horizon {k.N}")

    dim, tdim = pkg.dim_h, pkg.tilde_dim

    b_coeff: dict[tuple[int, ...], np.ndarray] = {}
    z_coeff: dict[tuple[int, ...], np.ndarray] = {}
    for idx, alpha in enumerate(pkg.tilde_index_set):
        root = np.sqrt(k.b_of(alpha))
        block = pkg.t_tilde[:, pkg.block_slice(idx)]
        b_coeff[alpha.entries] = root * block.conj().T
        sel = np.zeros((dim, tdim), dtype=complex)
        sel[:, pkg.block_slice(idx)] = root * np.eye(dim)
        z_coeff[alpha.entries] = sel

    left = pkg.w.conj().T @ pkg.delta
    right = pkg.d_tilde @ pkg.v

    coeffs: dict[tuple[int, ...], np.ndarray] = {}
    coeffs[(0,) * k.d] = -pkg.w.conj().T @ pkg.t_tilde @ pkg.v

    g: dict[tuple[int, ...], np.ndarray] = {}
    for n in range(1, n_theta + 1):
        for gamma in enumerate_degree(k.d, n):
            acc = z_coeff.get(gamma.entries)
            acc = acc.copy() if acc is not None else np.zeros((dim, tdim), dtype=complex)
            for beta_key, b_mat in b_coeff.items():
                rest = tuple(ge - be for ge, be in zip(gamma.entries, beta_key))
                if any(e < 0 for e in rest) or sum(rest) == 0:
                    continue
                acc += b_mat @ g[rest]
            g[gamma.entries] = acc
            coeffs[gamma.entries] = left @ acc @ right

    is_poly, degree = _polynomial_state(pkg, k, coeffs, n_theta, tol)
    return CharacteristicSeries(
        coeffs=coeffs,
        n_theta=n_theta,
        d=k.d,
        rank_delta=pkg.rank_delta,
        rank_d=pkg.rank_d,
        is_polynomial=is_poly,
        degree=degree,
        kernel_fingerprint=k.fingerprint(),
        w=pkg.w,
        v=pkg.v,
    )


def default_taylor_horizon(pkg: DefectPackage, k: KernelSpec) -> int:
    """Termination degree for nilpotent tuples over finitely supported b,
    else the package horizon."""
    nd = pkg.nilpotent_degree
    if nd is not None and k.b_support_bound is not None:
        return max(1, nd - 1 + k.b_support_bound)
    return pkg.n_op


def _polynomial_state(pkg, k, coeffs, n_theta, tol):
    """theta is certified polynomial when the tuple is nilpotent and the
    kernel's b-support is finite: every coefficient beyond
    (nilpotency - 1) + max b-support then vanishes identically."""
    nd = pkg.nilpotent_degree
    if nd is None or k.b_support_bound is None:
        return False, None
    bound = nd - 1 + k.b_support_bound
    if n_theta < bound:
        return False, None
    scale = max(1.0, max((op_norm(a) for a in coeffs.values()), default=0.0))
    degree = 0
    for key, a in coeffs.items():
        if op_norm(a) > tol.eps_id * scale and sum(key) > degree:
            degree = sum(key)
    return True, degree


def sample_ball_points(d: int, n_samples: int, radius: float, seed: int) -> np.ndarray:
    """Deterministic points z = r * u with u uniform on the unit sphere of C^d
    (normalized complex Gaussian directions)."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n_samples, d)) + 1j * rng.standard_normal((n_samples, d))
    u = g / np.linalg.norm(g, axis=1, keepdims=True)
    return radius * u


@dataclass(frozen=True)
class ConsistencyCheck:
    max_residual: float
    tail_bound: float

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tail_bound


def check_consistency(
    series: CharacteristicSeries,
    pkg: DefectPackage,
    k: KernelSpec,
    n_samples: int = 20,
    r_check: float = 0.5,
    seed: int = 2024,
    tol: Tolerances = DEFAULT,
) -> ConsistencyCheck:
    """Max over sampled ||z|| <= r_check of ||eval - series sum||.

    The residual is the analytic tail of a contractive function, so it must
    stay below (1 + eps) * r^{n_theta+1} / (1 - r).
    """
    points = sample_ball_points(k.d, n_samples, r_check, seed)
    worst = 0.0
    for z in points:
        pe = eval_theta(pkg, k, z, tol=tol)
        worst = max(worst, op_norm(pe.theta - series.evaluate(z)))
    bound = (1.0 + 1e-8) * r_check ** (series.n_theta + 1) / (1.0 - r_check)
    return ConsistencyCheck(max_residual=worst, tail_bound=bound + tol.eps_id)
