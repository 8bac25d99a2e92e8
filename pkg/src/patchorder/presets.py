"""Published parameter presets for each restoration problem.

A preset bundles everything the pipeline needs: patch and search-window sizes,
choice temperature, weight construction constants, smoothing epsilons and the
smoothness weight mu.  Stored mu values are final, i.e. they already include
the division by the number of shifted copies (patch_side squared), so they
multiply the full summed smoothness term directly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .operators import blur_scenario

__all__ = ["Preset", "gaussian_preset", "deblur_preset", "sr_preset", "poisson_preset",
           "named_preset", "preset_names", "with_mu", "SELF_INIT_MU_SCHEDULE"]


@dataclass(frozen=True)
class Preset:
    problem: str  # 'gauss' | 'deblur' | 'sr' | 'poisson'
    name: str
    patch_side: int
    window_side: int
    delta: float
    gamma_edge: float
    g_thr: float | None
    m_max: float
    epsilon_r: float
    epsilon_p: float
    penalty_scale: float
    mu: float
    epsilon_f: float | None = None
    sigma: float | None = None  # Gaussian noise std, 0-255 scale
    peak: float | None = None
    scenario: int | None = None
    binning: int = 1
    sr_factor: int | None = None
    sr_blur_std: float | None = None
    sr_blur_size: int | None = None

    @property
    def n_shifts(self) -> int:
        return self.patch_side * self.patch_side


def _common(problem: str, name: str, mu: float, **kw) -> Preset:
    base = dict(
        problem=problem, name=name, patch_side=7, window_side=121, delta=1e6,
        gamma_edge=1.5, g_thr=3.5, m_max=20.0, epsilon_r=0.1, epsilon_p=1e-3,
        penalty_scale=1.0, mu=mu,
    )
    base.update(kw)
    return Preset(**base)


_GAUSS_MU_TABLE = {25.0: 2.5, 50.0: 5.0, 75.0: 8.0, 100.0: 12.0}


def gaussian_preset(sigma: float) -> Preset:
    """Denoising preset for noise std ``sigma`` on the 0-255 scale.

    Tabulated at sigma in {25, 50, 75, 100}; other levels interpolate the
    table linearly (clamped at the ends).
    """
    n = 49
    sigmas = sorted(_GAUSS_MU_TABLE)
    vals = [_GAUSS_MU_TABLE[s] for s in sigmas]
    v = float(np.interp(sigma, sigmas, vals))
    return _common("gauss", f"gauss-sigma{sigma:g}", mu=v / (100.0 * n), sigma=float(sigma))


_DEBLUR_MU_TABLE = {1: 9.0, 2: 24.0, 3: 1.6, 4: 140.0, 5: 8.0, 6: 500.0}


def deblur_preset(scenario: int) -> Preset:
    if scenario not in _DEBLUR_MU_TABLE:
        raise ValueError(f"unknown blur scenario {scenario}")
    n = 49
    _, noise_sigma = blur_scenario(scenario)
    return _common("deblur", f"deblur-scenario{scenario}",
                   mu=_DEBLUR_MU_TABLE[scenario] / (1e5 * n),
                   scenario=scenario, sigma=noise_sigma)


def sr_preset(noisy: bool) -> Preset:
    """3x super-resolution: blur by a 7 x 7 Gaussian of std 1.6, then decimate.

    The noisy variant adds Gaussian noise of std 5 (0-255 scale) to the
    low-resolution observation.
    """
    n = 49
    mu = (9.0 if noisy else 1.0) / (1e5 * n)
    return _common("sr", "sr-noisy" if noisy else "sr-noiseless", mu=mu,
                   sigma=5.0 if noisy else 0.0, sr_factor=3,
                   sr_blur_std=1.6, sr_blur_size=7)


# peak -> (g_thr, gamma_edge, mu numerator); mu divides by the shift count.
_POISSON_TABLE = {
    4.0: (20.0, 2.5, 0.6),
    2.0: (None, 1.0, 0.9),
    1.0: (None, 1.0, 1.35),
    0.5: (10.0, 2.5, 0.55),
    0.2: (None, 1.0, 0.95),
    0.1: (None, 1.0, 1.15),
}


def poisson_preset(peak: float, binning: int | None = None) -> Preset:
    """Photon-limited preset; peaks at or below 0.5 restore on a 3x3-binned grid."""
    if peak not in _POISSON_TABLE:
        raise ValueError(f"no tabulated parameters for peak {peak}; "
                         f"available: {sorted(_POISSON_TABLE)}")
    g_thr, gamma_edge, mu_num = _POISSON_TABLE[peak]
    if binning is None:
        binning = 3 if peak <= 0.5 else 1
    if binning > 1:
        patch_side, window_side = 7, 101
    else:
        patch_side, window_side = 9, 201
    n = patch_side * patch_side
    return Preset(
        problem="poisson", name=f"poisson-peak{peak:g}", patch_side=patch_side,
        window_side=window_side, delta=1e6, gamma_edge=gamma_edge, g_thr=g_thr,
        m_max=5.0, epsilon_r=0.1, epsilon_p=1e-3, penalty_scale=1.0,
        mu=mu_num / n, epsilon_f=1e-3, peak=float(peak), binning=binning,
    )


#: Smoothness schedule for self-initialized denoising, one entry per round
#: (the last repeats).  Entries are on the single-shift scale and are divided
#: by the shift count when applied.
SELF_INIT_MU_SCHEDULE = (0.45, 0.12, 0.08)


def named_preset(name: str) -> Preset:
    """Look up a preset by its printable name, e.g. 'gauss-sigma50'."""
    for builder, keys in (
        (gaussian_preset, [25.0, 50.0, 75.0, 100.0]),
        (deblur_preset, [1, 2, 3, 4, 5, 6]),
        (poisson_preset, list(_POISSON_TABLE)),
    ):
        for key in keys:
            p = builder(key)
            if p.name == name:
                return p
    for noisy in (False, True):
        p = sr_preset(noisy)
        if p.name == name:
            return p
    raise ValueError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")


def preset_names() -> list[str]:
    names = [gaussian_preset(s).name for s in (25.0, 50.0, 75.0, 100.0)]
    names += [deblur_preset(k).name for k in range(1, 7)]
    names += [sr_preset(False).name, sr_preset(True).name]
    names += [poisson_preset(p).name for p in sorted(_POISSON_TABLE, reverse=True)]
    return names


def with_mu(preset: Preset, mu: float) -> Preset:
    return replace(preset, mu=float(mu))
