"""Constrained Cramer-Rao bounds on UE position and orientation.

The estimation state is r = [p (3), rho (1), vec(R) (9)] with vec stacking
the columns of the UE rotation matrix, 13 entries total.  Information flows
per visible path from the five channel parameters (ETA_NAMES order) through
the chain rule into r-space, is summed over paths, and is then restricted
to the orthonormality constraint manifold of R:

    CRB = M (M^T I(r) M)^{-1} M^T,

where the columns of M span the null space of the constraint Jacobian.
PEB is the root-trace of the position block; OEB is the root-trace of the
rotation block, converted to degrees through the small-angle relation
|dR|_F = sqrt(2) * angle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    BeamformerSet,
    SignalConfig,
    draw_beamformers,
    path_gain,
    signal_gradient,
)
from .errors import GeometryError
from .geometry import (
    SPEED_OF_LIGHT,
    PathParams,
    Pose,
    Subarray,
    path_params,
    subarray_global_pose,
    visible_paths,
)

STATE_DIM = 13
CONSTRAINED_DIM = 7

# Equilibrated condition number beyond which the information matrix is
# treated as singular.
CONDITION_LIMIT = 1e12

LOCALIZABLE = "localizable"
COMM_ONLY = "comm_only"
NO_LOS = "no_los"

_ELEVATION_TOL = 1e-12


def path_fim(
    params: PathParams,
    gain: complex,
    beams: BeamformerSet,
    bs_elements_m: np.ndarray,
    sub_elements_m: np.ndarray,
    config: SignalConfig,
    unknown_gain: bool = False,
) -> np.ndarray:
    """5x5 Fisher information of one path's channel parameters.

    With unknown_gain the real and imaginary parts of the complex amplitude
    are treated as nuisance parameters and removed by Schur complement, so
    the result is the equivalent information of the five geometric
    parameters alone.
    """
    mu, dmu = signal_gradient(params, gain, beams, bs_elements_m, sub_elements_m, config)
    jac = dmu.reshape(-1, 5)
    scale = 2.0 / config.noise_variance_w
    if not unknown_gain:
        fim = scale * np.real(jac.conj().T @ jac)
        return 0.5 * (fim + fim.T)
    dg = np.stack([(mu / gain).ravel(), (1j * mu / gain).ravel()], axis=1)
    full = np.hstack([jac, dg])
    fim7 = scale * np.real(full.conj().T @ full)
    fim7 = 0.5 * (fim7 + fim7.T)
    head, cross = fim7[:5, :5], fim7[:5, 5:]
    nuisance = fim7[5:, 5:]
    fim = head - cross @ np.linalg.pinv(nuisance) @ cross.T
    return 0.5 * (fim + fim.T)


def stacked_fim(path_fims: list[np.ndarray]) -> np.ndarray:
    """Block-diagonal information of all paths, shape (5D, 5D)."""
    total = 5 * len(path_fims)
    out = np.zeros((total, total))
    for i, fim in enumerate(path_fims):
        out[5 * i : 5 * i + 5, 5 * i : 5 * i + 5] = fim
    return out


def _vec(matrix: np.ndarray) -> np.ndarray:
    # Column-major stacking, matching the vec(R) part of the state.
    return matrix.reshape(9, order="F")


def state_jacobian(bs_pose: Pose, ue_pose: Pose, subarray: Subarray) -> np.ndarray:
    """Jacobian of one path's channel parameters in the 13-entry state.

    Rows follow ETA_NAMES; columns are [p, rho, vec(R)].  The entries of R
    are differentiated as free variables; the orthonormality constraint is
    applied later through the null-space basis.

    Raises:
        GeometryError: at |elevation| = 90 deg where azimuth is undefined.
    """
    d = subarray.offset
    r_ue = ue_pose.rotation
    sub_pose = subarray_global_pose(ue_pose, subarray)
    v = sub_pose.position - bs_pose.position
    dist = float(np.linalg.norm(v))
    if dist < 1e-9:
        raise GeometryError("BS and subarray positions coincide")

    jac = np.zeros((5, STATE_DIM))

    def fill(row: int, d_dp: np.ndarray, d_dvec: np.ndarray) -> None:
        jac[row, 0:3] = d_dp
        jac[row, 4:13] = d_dvec

    # Departure side: v resolved on the BS axes.
    b1, b2, b3 = bs_pose.rotation.T
    x1, y1, z1 = b1 @ v, b2 @ v, b3 @ v
    if 1.0 - abs(z1 / dist) < _ELEVATION_TOL:
        raise GeometryError("departure elevation at the arcsin branch point")
    daz_dv = (x1 * b2 - y1 * b1) / (x1 * x1 + y1 * y1)
    s1 = 1.0 / np.sqrt(1.0 - (z1 / dist) ** 2)
    del_dv = s1 * (b3 / dist - z1 * v / dist**3)
    fill(0, daz_dv, np.kron(d, daz_dv))
    fill(1, del_dv, np.kron(d, del_dv))

    # Arrival side: -v resolved on the subarray axes, which move with R.
    n1, n2, n3 = subarray.rotation.T  # subarray axes in the UE frame
    a1, a2, a3 = (r_ue @ n1, r_ue @ n2, r_ue @ n3)
    big_a, big_b, big_c = a1 @ v, a2 @ v, a3 @ v
    if 1.0 - abs(big_c / dist) < _ELEVATION_TOL:
        raise GeometryError("arrival elevation at the arcsin branch point")
    den = big_a * big_a + big_b * big_b
    d_a = np.outer(v, n1) + np.outer(a1, d)
    d_b = np.outer(v, n2) + np.outer(a2, d)
    d_c = np.outer(v, n3) + np.outer(a3, d)
    fill(2, (big_a * a2 - big_b * a1) / den, (big_a * _vec(d_b) - big_b * _vec(d_a)) / den)
    s2 = 1.0 / np.sqrt(1.0 - (big_c / dist) ** 2)
    dist_dvec = _vec(np.outer(v, d)) / dist
    fill(
        3,
        -s2 * (a3 / dist - big_c * v / dist**3),
        -s2 * (_vec(d_c) / dist - big_c * dist_dvec / dist**2),
    )

    # Delay.
    jac[4, 0:3] = v / (SPEED_OF_LIGHT * dist)
    jac[4, 3] = 1.0
    jac[4, 4:13] = _vec(np.outer(v, d)) / (SPEED_OF_LIGHT * dist)
    return jac


def state_fim(path_fims: list[np.ndarray], jacobians: list[np.ndarray]) -> np.ndarray:
    """13x13 information in the state, summed over paths."""
    fim = np.zeros((STATE_DIM, STATE_DIM))
    for block, jac in zip(path_fims, jacobians, strict=True):
        fim += jac.T @ block @ jac
    return 0.5 * (fim + fim.T)


def constraint_basis(rotation: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space of the constrained state.

    Position and clock bias are unconstrained; the rotation part spans the
    three infinitesimal rotations of R, each normalized to unit length.
    M satisfies M^T M = I_7 and J_h M = 0 for the Jacobian J_h of the
    orthonormality constraints on R.
    """
    c1, c2, c3 = rotation[:, 0], rotation[:, 1], rotation[:, 2]
    basis = np.zeros((STATE_DIM, CONSTRAINED_DIM))
    basis[:4, :4] = np.eye(4)
    inv_rt2 = 1.0 / np.sqrt(2.0)
    basis[4:7, 4] = -c3 * inv_rt2
    basis[10:13, 4] = c1 * inv_rt2
    basis[7:10, 5] = -c3 * inv_rt2
    basis[10:13, 5] = c2 * inv_rt2
    basis[4:7, 6] = c2 * inv_rt2
    basis[7:10, 6] = -c1 * inv_rt2
    return basis


def constrained_crb(
    fim: np.ndarray, basis: np.ndarray, condition_limit: float = CONDITION_LIMIT
) -> tuple[np.ndarray | None, float]:
    """Constrained CRB M (M^T I M)^{-1} M^T with a singularity check.

    The 7x7 reduced information mixes units (meters, seconds, dimensionless
    rotation entries), so the condition number is measured after Jacobi
    equilibration D^{-1/2} A D^{-1/2}; that leaves the inverse unchanged
    while making the threshold scale-free.

    Returns:
        (crb, condition) with crb None when the information is singular.
    """
    reduced = basis.T @ fim @ basis
    reduced = 0.5 * (reduced + reduced.T)
    diag = np.diag(reduced).copy()
    if not np.all(np.isfinite(diag)) or np.any(diag <= 0.0):
        return None, np.inf
    scale = 1.0 / np.sqrt(diag)
    balanced = scale[:, None] * reduced * scale[None, :]
    balanced = 0.5 * (balanced + balanced.T)
    eigvals, eigvecs = np.linalg.eigh(balanced)
    if eigvals[0] <= 0.0 or not np.all(np.isfinite(eigvals)):
        return None, np.inf
    condition = float(eigvals[-1] / eigvals[0])
    if condition > condition_limit:
        return None, condition
    inv_balanced = (eigvecs / eigvals) @ eigvecs.T
    inv_reduced = scale[:, None] * inv_balanced * scale[None, :]
    crb = basis @ inv_reduced @ basis.T
    return 0.5 * (crb + crb.T), condition


def error_bounds(crb: np.ndarray) -> tuple[float, float, float]:
    """(peb_m, oeb_raw, oeb_deg) from a 13x13 constrained CRB."""
    peb = float(np.sqrt(np.trace(crb[0:3, 0:3])))
    oeb_raw = float(np.sqrt(np.trace(crb[4:13, 4:13])))
    oeb_deg = float(np.rad2deg(oeb_raw / np.sqrt(2.0)))
    return peb, oeb_raw, oeb_deg


def classify_localizability(num_visible_bs: int, invertible: bool) -> str:
    """Label a pose by what the visible geometry supports."""
    if num_visible_bs == 0:
        return NO_LOS
    if num_visible_bs == 1 or not invertible:
        return COMM_ONLY
    return LOCALIZABLE


@dataclass(frozen=True)
class PathObservation:
    """One visible path and its channel parameters."""

    bs_index: int
    subarray_index: int
    params: PathParams


@dataclass(frozen=True)
class BoundResult:
    """Error bounds and diagnostics for one UE pose.

    peb_m and oeb_deg are +inf when the constrained information matrix is
    singular or no path is visible.  A pose with exactly one visible BS is
    classified comm_only, yet its numeric bounds are reported whenever the
    matrix inverts: such poses are weakly identifiable through subarray
    parallax, and coverage statistics count them at their finite value.
    """

    classification: str
    peb_m: float
    oeb_deg: float
    oeb_raw: float
    num_paths: int
    num_visible_bs: int
    condition_number: float
    paths: tuple[PathObservation, ...]

    @property
    def localizable(self) -> bool:
        return self.classification == LOCALIZABLE

    def metric(self, name: str) -> float:
        if name == "peb":
            return self.peb_m
        if name == "oeb":
            return self.oeb_deg
        raise ValueError(f"unknown metric {name!r}, expected 'peb' or 'oeb'")


def evaluate_bounds(
    bs_poses: list[Pose],
    bs_elements_m: list[np.ndarray],
    subarrays: list[Subarray],
    signal: SignalConfig,
    ue_pose: Pose,
    clock_bias_s: float = 0.0,
    seed: int = 0,
    trial: int = 0,
    unknown_gain: bool = False,
) -> BoundResult:
    """Bound computation for one UE pose against a set of BSs.

    Beamformers are drawn per (seed, trial, bs, subarray), so results are
    reproducible and nested BS sets share their common paths' draws.
    """
    pairs = visible_paths(bs_poses, ue_pose, subarrays)
    num_visible_bs = len({m for m, _ in pairs})
    observations = []
    fims, jacobians = [], []
    degenerate = False
    for m, n in pairs:
        sub = subarrays[n]
        params = path_params(bs_poses[m], ue_pose, sub, clock_bias_s)
        observations.append(PathObservation(m, n, params))
        gain = path_gain(params.distance, signal.wavelength_m)
        beams = draw_beamformers(
            seed,
            m,
            n,
            signal.num_transmissions,
            sub.elements.shape[0],
            bs_elements_m[m].shape[0],
            trial=trial,
        )
        try:
            jacobians.append(state_jacobian(bs_poses[m], ue_pose, sub))
        except GeometryError:
            # Elevation at the arcsin branch point: the angle Jacobian is
            # undefined, so no finite bound is reported for this pose.
            degenerate = True
            break
        fims.append(
            path_fim(params, gain, beams, bs_elements_m[m], sub.elements, signal, unknown_gain)
        )

    crb_matrix, condition = None, np.inf
    if pairs and not degenerate:
        fim = state_fim(fims, jacobians)
        crb_matrix, condition = constrained_crb(fim, constraint_basis(ue_pose.rotation))

    if crb_matrix is None:
        peb = oeb_raw = oeb_deg = np.inf
    else:
        peb, oeb_raw, oeb_deg = error_bounds(crb_matrix)
    return BoundResult(
        classification=classify_localizability(num_visible_bs, crb_matrix is not None),
        peb_m=peb,
        oeb_deg=oeb_deg,
        oeb_raw=oeb_raw,
        num_paths=len(pairs),
        num_visible_bs=num_visible_bs,
        condition_number=condition,
        paths=tuple(observations),
    )
