"""Far-field THz downlink signal model for one BS-to-subarray path.

The received pilot on transmission g and subcarrier k is

    mu[g, k] = sqrt(P) * w_ue^T H[k] w_bs,
    H[k] = gain * exp(-j 2 pi f_k tau) * a_ue(aoa) a_bs(aod)^T,

with unit pilot symbol, deterministic free-space gain, and random
phase-shifter beamformers redrawn per transmission.  Subcarriers sit on a
symmetric grid around the carrier, f_k = (k - (K + 1) / 2) * W / K for
k = 1..K, so the grid never contains the carrier itself for even K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import SPEED_OF_LIGHT, PathParams

# Order of the per-path channel parameters everywhere in this package.
ETA_NAMES = ("aod_az", "aod_el", "aoa_az", "aoa_el", "delay")


@dataclass(frozen=True)
class SignalConfig:
    """Waveform and noise parameters shared by all paths."""

    power_dbm: float = 0.0
    carrier_hz: float = 140e9
    bandwidth_hz: float = 1e9
    num_subcarriers: int = 10
    num_transmissions: int = 50
    noise_psd_dbm_hz: float = -173.855
    noise_figure_db: float = 10.0

    @property
    def power_w(self) -> float:
        return 10.0 ** (self.power_dbm / 10.0) * 1e-3

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def subcarrier_offsets_hz(self) -> np.ndarray:
        """Baseband frequency of each subcarrier, symmetric around zero."""
        k = np.arange(1, self.num_subcarriers + 1)
        return (k - (self.num_subcarriers + 1) / 2.0) * (
            self.bandwidth_hz / self.num_subcarriers
        )

    @property
    def noise_variance_w(self) -> float:
        """Post-combining noise power over the full signal bandwidth."""
        psd_w_hz = 10.0 ** ((self.noise_psd_dbm_hz + self.noise_figure_db) / 10.0) * 1e-3
        return psd_w_hz * self.bandwidth_hz


def path_gain(distance_m: float, wavelength_m: float) -> float:
    """Free-space amplitude gain lambda / (4 pi d), treated as known."""
    return wavelength_m / (4.0 * np.pi * distance_m)


def direction_vector(az: float, el: float) -> np.ndarray:
    """Unit vector for azimuth/elevation in the panel frame."""
    return np.array(
        [np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)]
    )


def steering_vector(elements_m: np.ndarray, az: float, el: float, wavelength_m: float):
    """Narrowband steering vector of a panel toward (az, el).

    Entry i is exp(j * 2 pi / lambda * <offset_i, u(az, el)>) with unit
    magnitude; no amplitude taper.
    """
    phase = (2.0 * np.pi / wavelength_m) * (elements_m @ direction_vector(az, el))
    return np.exp(1j * phase)


def steering_gradients(elements_m: np.ndarray, az: float, el: float, wavelength_m: float):
    """Steering vector and its derivatives with respect to az and el.

    Returns:
        (a, da_daz, da_del), each of shape (N,).
    """
    u = direction_vector(az, el)
    du_daz = np.array([-np.cos(el) * np.sin(az), np.cos(el) * np.cos(az), 0.0])
    du_del = np.array([-np.sin(el) * np.cos(az), -np.sin(el) * np.sin(az), np.cos(el)])
    wavenumber = 2.0 * np.pi / wavelength_m
    a = np.exp(1j * wavenumber * (elements_m @ u))
    da_daz = 1j * wavenumber * (elements_m @ du_daz) * a
    da_del = 1j * wavenumber * (elements_m @ du_del) * a
    return a, da_daz, da_del


@dataclass(frozen=True)
class BeamformerSet:
    """Phase-shifter weights for all transmissions of one path.

    ue has shape (G, N_ue), bs has shape (G, N_bs).  Precoder entries have
    unit modulus (constant-amplitude phase shifters, so the radiated field
    grows with the BS element count); the combiner is scaled to unit norm,
    which keeps the post-combining noise variance at sigma^2 and is
    SNR-equivalent to unit-modulus combining with noise amplified by the
    combiner norm.
    """

    ue: np.ndarray
    bs: np.ndarray


def draw_beamformers(
    seed: int,
    bs_index: int,
    subarray_index: int,
    num_transmissions: int,
    n_ue: int,
    n_bs: int,
    trial: int = 0,
) -> BeamformerSet:
    """Draw uniform-phase beamformers for one path, reproducibly.

    The stream is keyed on (seed, trial, bs_index, subarray_index) with a
    counter-based generator, so the draw for a given path does not depend
    on how many other BSs or subarrays exist.  That keeps random draws
    common when comparing nested BS sets.
    """
    key = np.random.SeedSequence(seed, spawn_key=(trial, bs_index, subarray_index))
    rng = np.random.Generator(np.random.Philox(key))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(num_transmissions, n_ue + n_bs))
    ue = np.exp(1j * phases[:, :n_ue]) / np.sqrt(n_ue)
    bs = np.exp(1j * phases[:, n_ue:])  # unit modulus, one PA per element
    return BeamformerSet(ue=ue, bs=bs)


def mean_signal(
    params: PathParams,
    gain: complex,
    beams: BeamformerSet,
    bs_elements_m: np.ndarray,
    sub_elements_m: np.ndarray,
    config: SignalConfig,
) -> np.ndarray:
    """Noise-free received pilot, shape (G, K)."""
    mu, _ = signal_gradient(
        params, gain, beams, bs_elements_m, sub_elements_m, config, with_gradient=False
    )
    return mu


def signal_gradient(
    params: PathParams,
    gain: complex,
    beams: BeamformerSet,
    bs_elements_m: np.ndarray,
    sub_elements_m: np.ndarray,
    config: SignalConfig,
    with_gradient: bool = True,
):
    """Mean signal and its gradient in the five path parameters.

    Args:
        params: path angles and delay.
        gain: complex channel amplitude (known constant).
        beams: beamformer weights for all transmissions.
        bs_elements_m: BS panel element offsets, (N_bs, 3).
        sub_elements_m: subarray element offsets, (N_ue, 3).
        config: waveform parameters.
        with_gradient: skip the gradient when False.

    Returns:
        (mu, dmu) with mu of shape (G, K) and dmu of shape (G, K, 5)
        ordered as ETA_NAMES; dmu is None when with_gradient is False.
    """
    lam = config.wavelength_m
    a_bs, da_bs_az, da_bs_el = steering_gradients(
        bs_elements_m, params.aod_az, params.aod_el, lam
    )
    a_ue, da_ue_az, da_ue_el = steering_gradients(
        sub_elements_m, params.aoa_az, params.aoa_el, lam
    )

    # Per-transmission scalar couplings, shape (G,).
    g_bs = beams.bs @ a_bs
    g_ue = beams.ue @ a_ue

    f_k = config.subcarrier_offsets_hz()
    tone = np.exp(-2j * np.pi * f_k * params.delay)
    amp = np.sqrt(config.power_w) * gain

    mu = amp * (g_ue * g_bs)[:, None] * tone[None, :]
    if not with_gradient:
        return mu, None

    dmu = np.empty(mu.shape + (5,), dtype=complex)
    dmu[:, :, 0] = amp * (g_ue * (beams.bs @ da_bs_az))[:, None] * tone[None, :]
    dmu[:, :, 1] = amp * (g_ue * (beams.bs @ da_bs_el))[:, None] * tone[None, :]
    dmu[:, :, 2] = amp * ((beams.ue @ da_ue_az) * g_bs)[:, None] * tone[None, :]
    dmu[:, :, 3] = amp * ((beams.ue @ da_ue_el) * g_bs)[:, None] * tone[None, :]
    dmu[:, :, 4] = mu * (-2j * np.pi * f_k)[None, :]
    return mu, dmu
