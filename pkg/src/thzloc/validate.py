"""Built-in consistency checks exposed through the validate command.

These are runtime self-diagnostics: finite-difference spot checks of the
analytic Jacobians, algebraic identities of the constraint basis, exact
scaling laws, and config round-trips.  They complement the test suite and
run against whatever scenario the user supplies.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .channel import draw_beamformers, path_gain, signal_gradient
from .coverage import PoseDistribution, coverage_ccdf, sample_pose
from .crb import constraint_basis, evaluate_bounds, state_jacobian
from .geometry import (
    EulerAngles,
    PathParams,
    Pose,
    Subarray,
    euler_to_rotation,
    path_params,
)
from .scenario import ScenarioConfig, parse_config, serialize_config


def _random_rotation(rng) -> np.ndarray:
    return euler_to_rotation(EulerAngles(*rng.uniform(0.0, 360.0, size=3)))


def _random_geometry(rng):
    """A generic BS/UE/subarray triple with no extreme elevations."""
    while True:
        bs = Pose(rng.uniform(-15.0, 15.0, 3) + np.array([0.0, 0.0, 8.0]), _random_rotation(rng))
        ue = Pose(rng.uniform(-8.0, 8.0, 3), _random_rotation(rng))
        sub = Subarray(
            offset=rng.uniform(-0.1, 0.1, 3),
            rotation=_random_rotation(rng),
            elements=np.zeros((1, 3)),
        )
        params = path_params(bs, ue, sub)
        if max(abs(params.aod_el), abs(params.aoa_el)) < np.deg2rad(85.0):
            return bs, ue, sub


def _fd_state_jacobian(bs: Pose, ue: Pose, sub: Subarray, step: float = 1e-6) -> np.ndarray:
    def eta_of(state: np.ndarray) -> np.ndarray:
        pose = Pose(state[0:3], state[4:13].reshape(3, 3, order="F"))
        p = path_params(bs, pose, sub, clock_bias_s=float(state[3]))
        return p.as_array()

    base = np.concatenate([ue.position, [0.0], ue.rotation.reshape(9, order="F")])
    jac = np.zeros((5, 13))
    for j in range(13):
        forward, backward = base.copy(), base.copy()
        forward[j] += step
        backward[j] -= step
        jac[:, j] = (eta_of(forward) - eta_of(backward)) / (2.0 * step)
    return jac


def check_state_jacobian(trials: int, rng) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(trials):
        bs, ue, sub = _random_geometry(rng)
        analytic = state_jacobian(bs, ue, sub)
        numeric = _fd_state_jacobian(bs, ue, sub)
        for row in range(5):
            scale = max(np.max(np.abs(numeric[row])), 1e-30)
            worst = max(worst, np.max(np.abs(analytic[row] - numeric[row])) / scale)
    return worst < 1e-5, f"max relative error {worst:.2e} over {trials} geometries"


def check_signal_gradient(config: ScenarioConfig, trials: int, rng) -> tuple[bool, str]:
    scn = config.realize()
    worst = 0.0
    for _ in range(trials):
        bs, ue, sub = _random_geometry(rng)
        sub = Subarray(sub.offset, sub.rotation, scn.subarrays[0].elements)
        params = path_params(bs, ue, sub)
        gain = path_gain(params.distance, scn.signal.wavelength_m)
        beams = draw_beamformers(
            int(rng.integers(1 << 31)), 0, 0, 4,
            sub.elements.shape[0], scn.bs_elements[0].shape[0],
        )
        args = (gain, beams, scn.bs_elements[0], sub.elements, scn.signal)
        _, dmu = signal_gradient(params, *args)
        eta = params.as_array()
        steps = np.array([1e-7, 1e-7, 1e-7, 1e-7, 1e-13])
        for j in range(5):
            fwd, bwd = eta.copy(), eta.copy()
            fwd[j] += steps[j]
            bwd[j] -= steps[j]
            mu_f, _ = signal_gradient(
                PathParams(*fwd, params.distance), *args, with_gradient=False
            )
            mu_b, _ = signal_gradient(
                PathParams(*bwd, params.distance), *args, with_gradient=False
            )
            numeric = (mu_f - mu_b) / (2.0 * steps[j])
            scale = max(np.max(np.abs(numeric)), 1e-30)
            worst = max(worst, np.max(np.abs(dmu[:, :, j] - numeric)) / scale)
    return worst < 1e-5, f"max relative error {worst:.2e} over {trials} configurations"


def check_constraint_basis(trials: int, rng) -> tuple[bool, str]:
    worst_orth, worst_null = 0.0, 0.0
    for _ in range(trials):
        rot = _random_rotation(rng)
        basis = constraint_basis(rot)
        worst_orth = max(worst_orth, np.max(np.abs(basis.T @ basis - np.eye(7))))
        jac_h = np.zeros((6, 13))
        cols = [rot[:, 0], rot[:, 1], rot[:, 2]]
        row = 0
        for i in range(3):
            for j in range(i, 3):
                jac_h[row, 4 + 3 * i : 7 + 3 * i] += cols[j]
                jac_h[row, 4 + 3 * j : 7 + 3 * j] += cols[i]
                row += 1
        worst_null = max(worst_null, np.max(np.abs(jac_h @ basis)))
    ok = worst_orth < 1e-12 and worst_null < 1e-10
    return ok, f"orthonormality {worst_orth:.2e}, null-space residual {worst_null:.2e}"


def check_power_scaling(config: ScenarioConfig, rng) -> tuple[bool, str]:
    scn = config.realize()
    louder = dataclasses.replace(
        config.signal, power_dbm=config.signal.power_dbm + 10.0 * np.log10(4.0)
    )
    boosted = dataclasses.replace(config, signal=louder).realize()
    for trial in range(200):
        pose = sample_pose(PoseDistribution(), config.seed, trial)
        base = evaluate_bounds(
            scn.bs_poses, scn.bs_elements, scn.subarrays, scn.signal, pose,
            clock_bias_s=scn.clock_bias_s, seed=scn.seed, trial=trial,
        )
        if not base.localizable:
            continue
        ref = evaluate_bounds(
            boosted.bs_poses, boosted.bs_elements, boosted.subarrays, boosted.signal,
            pose, clock_bias_s=boosted.clock_bias_s, seed=boosted.seed, trial=trial,
        )
        ratio = ref.peb_m / base.peb_m
        ok = abs(ratio - 0.5) < 1e-9
        return ok, f"PEB ratio under 4x power: {ratio:.12f}"
    return False, "no localizable pose found in 200 draws"


def check_roundtrip(config: ScenarioConfig) -> tuple[bool, str]:
    ok = parse_config(serialize_config(config)) == config
    return ok, "serialize/parse round-trip" + ("" if ok else " mismatch")


def check_ccdf(config: ScenarioConfig) -> tuple[bool, str]:
    first = coverage_ccdf(config, trials=20)
    second = coverage_ccdf(config, trials=20)
    ok = np.array_equal(first.exceedance, second.exceedance)
    return ok, f"20-trial curve reproducible, outage {first.outage:.2f}"


def run_validation(config: ScenarioConfig, trials: int = 50, seed: int = 0):
    """Run all checks; yields (name, passed, detail) triples."""
    rng = np.random.default_rng(seed)
    yield ("state_jacobian_fd", *check_state_jacobian(trials, rng))
    yield ("signal_gradient_fd", *check_signal_gradient(config, max(10, trials // 5), rng))
    yield ("constraint_basis", *check_constraint_basis(max(100, trials), rng))
    yield ("power_scaling", *check_power_scaling(config, rng))
    yield ("config_roundtrip", *check_roundtrip(config))
    yield ("ccdf_reproducible", *check_ccdf(config))
