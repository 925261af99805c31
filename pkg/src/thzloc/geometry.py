"""Rigid-body geometry for a UE carrying planar subarrays in 3D.

Conventions used throughout the package:

* Rotations are 3x3 orthonormal matrices mapping local coordinates to the
  parent frame.  Euler angles (alpha, beta, gamma) are in degrees and
  compose as R = Rz(gamma) @ Ry(beta) @ Rx(alpha).
* Every antenna panel radiates and receives along its local +X axis; panel
  elements lie in the local Y-Z plane.
* Azimuth/elevation of a unit direction u are az = atan2(u_y, u_x) and
  el = asin(u_z), both in radians internally.
* Delays are in seconds, positions and offsets in meters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError

SPEED_OF_LIGHT = 299792458.0

# Boresight of every panel in its own frame.
BORESIGHT = np.array([1.0, 0.0, 0.0])

_ORTHONORMALITY_TOL = 1e-6
_GIMBAL_TOL = 1e-12


def _sind(deg: float) -> float:
    # Exact at multiples of 90 so axis-aligned presets stay exact.
    if deg % 90.0 == 0.0:
        return float([0.0, 1.0, 0.0, -1.0][int(deg / 90.0) % 4])
    return float(np.sin(np.deg2rad(deg)))


def _cosd(deg: float) -> float:
    if deg % 90.0 == 0.0:
        return float([1.0, 0.0, -1.0, 0.0][int(deg / 90.0) % 4])
    return float(np.cos(np.deg2rad(deg)))


@dataclass(frozen=True)
class EulerAngles:
    """Z-Y-X Euler angles in degrees."""

    alpha: float
    beta: float
    gamma: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


def rot_x(deg: float) -> np.ndarray:
    c, s = _cosd(deg), _sind(deg)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(deg: float) -> np.ndarray:
    c, s = _cosd(deg), _sind(deg)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(deg: float) -> np.ndarray:
    c, s = _cosd(deg), _sind(deg)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def euler_to_rotation(angles: EulerAngles) -> np.ndarray:
    """Compose a rotation matrix from Z-Y-X Euler angles in degrees."""
    return rot_z(angles.gamma) @ rot_y(angles.beta) @ rot_x(angles.alpha)


def orthonormality_residual(rotation: np.ndarray) -> float:
    """Max-norm of R^T R - I, zero for an exact rotation."""
    rotation = np.asarray(rotation, dtype=float)
    return float(np.max(np.abs(rotation.T @ rotation - np.eye(3))))


def rotation_to_euler(rotation: np.ndarray) -> EulerAngles:
    """Extract Z-Y-X Euler angles in degrees from a rotation matrix.

    Args:
        rotation: 3x3 orthonormal matrix.

    Returns:
        EulerAngles with beta in [-90, 90].  At the gimbal-lock points
        beta = +/-90 only the sum/difference of alpha and gamma is
        observable; the convention alpha = 0 is returned there.

    Raises:
        GeometryError: if the input is not orthonormal to 1e-6.
    """
    rotation = np.asarray(rotation, dtype=float)
    residual = orthonormality_residual(rotation)
    if residual > _ORTHONORMALITY_TOL:
        raise GeometryError(
            f"input is not a rotation matrix, orthonormality residual {residual:.3e}"
        )
    sin_beta = -rotation[2, 0]
    if 1.0 - abs(sin_beta) < _GIMBAL_TOL:
        beta = 90.0 if sin_beta > 0 else -90.0
        gamma = np.rad2deg(np.arctan2(-rotation[0, 1], rotation[1, 1]))
        return EulerAngles(0.0, beta, float(gamma))
    beta = np.rad2deg(np.arcsin(np.clip(sin_beta, -1.0, 1.0)))
    alpha = np.rad2deg(np.arctan2(rotation[2, 1], rotation[2, 2]))
    gamma = np.rad2deg(np.arctan2(rotation[1, 0], rotation[0, 0]))
    return EulerAngles(float(alpha), float(beta), float(gamma))


@dataclass(frozen=True)
class Pose:
    """Position and orientation of a rigid body in the global frame."""

    position: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))


def element_grid(rows: int, cols: int, spacing_m: float) -> np.ndarray:
    """Centered element offsets of a rows-by-cols panel in its local frame.

    Elements lie in the local Y-Z plane: columns step along +Y, rows along
    +Z, row-major element order.  The centroid is exactly zero.

    Returns:
        (rows * cols, 3) array of offsets in meters.
    """
    if rows < 1 or cols < 1:
        raise GeometryError(f"panel needs at least one element, got {rows}x{cols}")
    y = (np.arange(cols) - (cols - 1) / 2.0) * spacing_m
    z = (np.arange(rows) - (rows - 1) / 2.0) * spacing_m
    yy, zz = np.meshgrid(y, z)
    offsets = np.zeros((rows * cols, 3))
    offsets[:, 1] = yy.ravel()
    offsets[:, 2] = zz.ravel()
    return offsets


@dataclass(frozen=True)
class Subarray:
    """One planar subarray rigidly mounted on the UE.

    Attributes:
        offset: subarray center in the UE frame, meters.
        rotation: UE-frame-to-subarray mounting rotation R_n.
        elements: element offsets in the subarray frame, meters.
    """

    offset: np.ndarray
    rotation: np.ndarray
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=float))
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        object.__setattr__(self, "elements", np.asarray(self.elements, dtype=float))


def subarray_global_pose(ue_pose: Pose, subarray: Subarray) -> Pose:
    """Global pose of a subarray given the UE pose it is mounted on."""
    return Pose(
        ue_pose.position + ue_pose.rotation @ subarray.offset,
        ue_pose.rotation @ subarray.rotation,
    )


def visible_paths(
    bs_poses: list[Pose], ue_pose: Pose, subarrays: list[Subarray]
) -> list[tuple[int, int]]:
    """Indices (m, n) of BS/subarray pairs with line-of-sight.

    A pair is visible when each end lies strictly in the open half-space in
    front of the other end's panel.  Grazing incidence (either inner product
    exactly zero) does not count.

    Returns:
        Pairs sorted by BS index then subarray index.
    """
    pairs = []
    for m, bs in enumerate(bs_poses):
        bs_normal = bs.rotation @ BORESIGHT
        for n, sub in enumerate(subarrays):
            sub_pose = subarray_global_pose(ue_pose, sub)
            sub_normal = sub_pose.rotation @ BORESIGHT
            los = bs.position - sub_pose.position
            if los @ sub_normal > 0.0 and (-los) @ bs_normal > 0.0:
                pairs.append((m, n))
    return pairs


@dataclass(frozen=True)
class PathParams:
    """Geometric channel parameters of one BS-to-subarray path.

    Angles in radians: departure azimuth/elevation in the BS frame, arrival
    azimuth/elevation in the subarray frame.  Delay in seconds includes the
    UE clock bias.
    """

    aod_az: float
    aod_el: float
    aoa_az: float
    aoa_el: float
    delay: float
    distance: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.aod_az, self.aod_el, self.aoa_az, self.aoa_el, self.delay]
        )


def _safe_asin(x: float) -> float:
    # Clamp only roundoff-scale excursions beyond +/-1.
    if abs(x) > 1.0 + 1e-12:
        raise GeometryError(f"arcsin argument {x!r} out of range")
    return float(np.arcsin(np.clip(x, -1.0, 1.0)))


def path_params(
    bs_pose: Pose, ue_pose: Pose, subarray: Subarray, clock_bias_s: float = 0.0
) -> PathParams:
    """Angles and delay of the far-field path from a BS to one subarray.

    The connecting vector is v = p_ue + R_ue d_n - p_bs.  Departure angles
    resolve v in the BS frame; arrival angles resolve -v in the subarray
    frame; the delay is |v| / c plus the clock bias.

    Raises:
        GeometryError: if the subarray center coincides with the BS.
    """
    sub_pose = subarray_global_pose(ue_pose, subarray)
    v = sub_pose.position - bs_pose.position
    distance = float(np.linalg.norm(v))
    if distance < 1e-9:
        raise GeometryError("BS and subarray positions coincide")

    v_bs = bs_pose.rotation.T @ v
    aod_az = float(np.arctan2(v_bs[1], v_bs[0]))
    aod_el = _safe_asin(v_bs[2] / distance)

    v_sub = sub_pose.rotation.T @ v
    aoa_az = float(np.arctan2(-v_sub[1], -v_sub[0]))
    aoa_el = _safe_asin(-v_sub[2] / distance)

    delay = distance / SPEED_OF_LIGHT + clock_bias_s
    return PathParams(aod_az, aod_el, aoa_az, aoa_el, delay, distance)
