"""Linear stability of the spatially uniform steady state.

Perturbing (u*, v*) by a Neumann eigenfunction with eigenvalue lambda
decouples the linearized dynamics mode by mode; each mode grows or decays
like exp(sigma(lambda) t) with

    sigma(lambda) = -lambda
                    + chi0 nu gamma u*^(m+gamma-1) / (1+v*)^beta
                      * lambda / (mu + lambda)
                    - a alpha.

The critical sensitivity chi* is the exact positive chi0 at which the
largest sigma over the nonzero modes crosses zero. This module also checks
that the discrete linearization matrix reproduces the dispersion relation
on the grid's own eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Equilibrium, GridDomain, ModelParams, SpectrumTable
from .helmholtz import neumann_laplacian


class SpectrumTooShort(ValueError):
    """The eigenvalue table ends before the candidate scan stabilizes."""


class EigsolverFailure(RuntimeError):
    """Dense eigendecomposition failed or the grid is too large for it."""


DENSE_EIG_CELL_LIMIT = 4096
CRITICAL_BAND = 1e-12


def _feedback_gain(params: ModelParams, eq: Equilibrium) -> float:
    """chi0-independent factor nu gamma u*^(m+gamma-1) / (1+v*)^beta."""
    return (
        params.nu
        * params.gamma
        * eq.u_star ** (params.m + params.gamma - 1.0)
        / (1.0 + eq.v_star) ** params.beta
    )


def sigma_n(
    params: ModelParams, eq: Equilibrium, lam: float | np.ndarray
) -> float | np.ndarray:
    """Growth rate of the mode with Neumann eigenvalue lam (vectorized)."""
    lam = np.asarray(lam, dtype=float)
    gain = _feedback_gain(params, eq)
    rate = (
        -lam
        + params.chi0 * gain * lam / (params.mu + lam)
        - params.a * params.alpha
    )
    if rate.ndim == 0:
        return float(rate)
    return rate


def sigma_zero(params: ModelParams) -> float:
    """Rate of the spatially uniform mode: -a alpha, zero for the minimal model."""
    return -params.a * params.alpha


def mode_candidates(
    params: ModelParams, eq: Equilibrium, spectrum: SpectrumTable
) -> np.ndarray:
    """Per-mode critical sensitivities (1+v*)^beta (lam+a alpha)(mu+lam) /
    (nu gamma u*^(m+gamma-1) lam) for the nonzero modes."""
    lam = spectrum.as_array()[1:]
    gain = _feedback_gain(params, eq)
    return (lam + params.a * params.alpha) * (params.mu + lam) / (gain * lam)


def critical_sensitivity(
    params: ModelParams,
    eq: Equilibrium,
    spectrum: SpectrumTable,
    tail_window: int = 10,
) -> tuple[float, int]:
    """Exact instability threshold chi* and the mode index attaining it.

    The per-mode candidates eventually increase in lam, so the infimum is
    certified once the trailing `tail_window` candidates are non-decreasing;
    a table too short for that certificate raises SpectrumTooShort.
    """
    if len(spectrum) < tail_window + 2:
        raise SpectrumTooShort(
            f"need at least {tail_window + 2} eigenvalues, got {len(spectrum)}"
        )
    candidates = mode_candidates(params, eq, spectrum)
    tail = candidates[-tail_window:]
    if np.any(np.diff(tail) < 0.0):
        raise SpectrumTooShort(
            "candidate sequence still decreasing at the end of the table; "
            "supply more eigenvalues"
        )
    argmin = int(np.argmin(candidates))
    return float(candidates[argmin]), argmin + 1


@dataclass(frozen=True)
class StabilityReport:
    """Verdict on one (parameters, equilibrium, spectrum) triple."""

    chi_star: float
    argmin_mode: int
    verdict: str                # "stable" | "unstable" | "critical"
    sigma_zero: float
    sigma_max: float            # over modes n >= 1
    fastest_mode: int           # argmax of sigma over n >= 1
    sigma: tuple[float, ...]    # per-mode rates, n = 0 .. len(spectrum)-1


def classify_equilibrium(
    params: ModelParams, eq: Equilibrium, spectrum: SpectrumTable
) -> StabilityReport:
    """Dichotomy verdict: stable iff chi0 < chi*, with a relative band of
    1e-12 around chi* reported as critical."""
    chi_star, argmin_mode = critical_sensitivity(params, eq, spectrum)
    lam = spectrum.as_array()
    rates = np.asarray(sigma_n(params, eq, lam))
    fastest = 1 + int(np.argmax(rates[1:]))
    if abs(params.chi0 - chi_star) <= CRITICAL_BAND * max(1.0, abs(chi_star)):
        verdict = "critical"
    elif params.chi0 < chi_star:
        verdict = "stable"
    else:
        verdict = "unstable"
    return StabilityReport(
        chi_star=chi_star,
        argmin_mode=argmin_mode,
        verdict=verdict,
        sigma_zero=sigma_zero(params),
        sigma_max=float(rates[fastest]),
        fastest_mode=fastest,
        sigma=tuple(float(r) for r in rates),
    )


def linearized_matrix(
    params: ModelParams, eq: Equilibrium, grid: GridDomain
) -> np.ndarray:
    """Dense matrix of the linearization about (u*, v*).

    A = lap_h - chi0 c* nu gamma u*^(gamma-1) (mu (mu I - lap_h)^{-1} - I)
        - a alpha I,   c* = u*^m / (1+v*)^beta.

    A is a rational function of the symmetric lap_h, hence symmetric with
    the same eigenvectors.
    """
    n = grid.total_cells
    if n > DENSE_EIG_CELL_LIMIT:
        raise EigsolverFailure(
            f"{n} cells exceeds the dense eigendecomposition limit "
            f"{DENSE_EIG_CELL_LIMIT}"
        )
    lap = neumann_laplacian(grid).toarray()
    coupling = params.chi0 * _feedback_gain(params, eq)
    helm_inv = np.linalg.inv(params.mu * np.eye(n) - lap)
    a = (
        lap
        - coupling * (params.mu * helm_inv - np.eye(n))
        - params.a * params.alpha * np.eye(n)
    )
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class DiscreteSpectrumReport:
    """Agreement between the discrete linearization and the dispersion relation."""

    grid_eigenvalues: tuple[float, ...]      # of -lap_h, ascending
    predicted: tuple[float, ...]             # sigma evaluated on grid eigenvalues
    rayleigh: tuple[float, ...]              # quotients of A on lap_h eigenvectors
    max_mode_deviation: float                # per-mode, via shared eigenvectors
    max_set_deviation: float                 # sorted-spectrum comparison
    n_modes: int


def discrete_spectrum_check(
    params: ModelParams,
    eq: Equilibrium,
    grid: GridDomain,
    n_modes: int,
) -> DiscreteSpectrumReport:
    """Verify the discrete linearization reproduces sigma on grid eigenvalues.

    The first check pairs modes through the shared eigenvectors of lap_h
    (Rayleigh quotients of A); the second compares the two full spectra as
    sorted sets, which is pairing-free.
    """
    n = grid.total_cells
    if n_modes < 1 or n_modes >= n:
        raise ValueError(f"n_modes must be in [1, {n - 1}], got {n_modes}")
    lap = neumann_laplacian(grid).toarray()
    a = linearized_matrix(params, eq, grid)
    try:
        lam_h, vecs = np.linalg.eigh(-0.5 * (lap + lap.T))
        eig_a = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise EigsolverFailure(f"dense eigendecomposition failed: {exc}") from exc
    lam_h = np.maximum(lam_h, 0.0)  # clip rounding noise on the zero mode

    predicted = np.asarray(sigma_n(params, eq, lam_h))
    quad = np.einsum("ij,ij->j", vecs, a @ vecs)

    keep = n_modes + 1
    mode_dev = float(np.abs(quad[:keep] - predicted[:keep]).max())
    set_dev = float(np.abs(np.sort(eig_a) - np.sort(predicted)).max())
    return DiscreteSpectrumReport(
        grid_eigenvalues=tuple(float(x) for x in lam_h[:keep]),
        predicted=tuple(float(x) for x in predicted[:keep]),
        rayleigh=tuple(float(x) for x in quad[:keep]),
        max_mode_deviation=mode_dev,
        max_set_deviation=set_dev,
        n_modes=n_modes,
    )
