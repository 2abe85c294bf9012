"""Fisher-information estimators for omega-parametrized thermal states.

Several routes to the same quantity, kept deliberately independent so
they can cross-check each other:

* ``qfi_spectral``       -- exact decomposition of the quantum Fisher
  information of a Gibbs state into the probability (classical) and
  eigenvector-rotation (quantum) pieces, with eigenstate derivatives
  from first-order perturbation theory in the analytic generator dH.
* ``qfi_fidelity_fd``    -- second-order finite difference of the
  Uhlmann fidelity between neighbouring thermal states.
* ``qfi_pure``           -- Fisher information of a single eigenstate.
* ``cfi_projective``     -- classical Fisher information of one fixed
  projective measurement.
* ``fi_error_propagation`` -- the two-moment (signal slope over noise)
  lower bound for the same observable.

Eigenvector derivatives are never taken numerically: perturbation
theory on dH avoids sign and rotation instabilities entirely.  Inside
degenerate subspaces the eigenbasis is first rotated to diagonalize dH,
which makes level derivatives well-defined and removes intra-subspace
couplings by construction.

All estimators are pure functions of their arguments; grid points of a
parameter sweep can run in parallel without coordination.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateLevel,
    DimMismatch,
    InvalidTemperature,
    NoFDConvergence,
    ZeroVariance,
)
from .linalg import eigh, fidelity
from .thermal import density_matrix, gibbs, thermal_expectation

DEGENERACY_RTOL = 1e-10        # |E_i - E_j| below this * ||H|| counts as degenerate
PAIR_WEIGHT_FLOOR = 1e-15      # skip quantum terms with p_n + p_m below this
PROB_FLOOR = 1e-300            # skip classical terms with p_n below this
OUTCOME_GROUP_RTOL = 1e-10     # merge observable eigenvalues within this * scale
OUTCOME_PROB_FLOOR = 1e-12     # skip measurement outcomes below this probability
FD_RTOL = 1e-3                 # ladder acceptance: consecutive estimates agree to this
FD_ATOL = 1e-10                # absolute slack for near-zero estimates
FD_DELTA_FACTOR = 1e-4         # default starting step, in units of omega
FD_DELTA_MIN_FACTOR = 1e-8     # smallest step the ladder will try, in units of omega
VARIANCE_FLOOR_RTOL = 1e-14    # ZeroVariance below this * scale^2
_CHUNK = 512                   # row blocking for the pair sums


@dataclass(frozen=True)
class FisherBreakdown:
    """Total Fisher information with its classical/quantum split.

    total == classical_part + quantum_part by construction; both parts
    are sums of squares and therefore non-negative.  ``meta`` records
    the tolerances and truncation that produced the numbers.
    """

    total: float
    classical_part: float
    quantum_part: float
    method: str
    meta: dict


def _degenerate_groups(values, tol):
    """Split ascending values into runs whose consecutive gaps stay <= tol."""
    groups = []
    start = 0
    n = len(values)
    for i in range(1, n + 1):
        if i == n or values[i] - values[i - 1] > tol:
            groups.append(range(start, i))
            start = i
    return groups


def _rotated_generator(spectrum, generator, tol):
    """Matrix elements <n|dH|m> in a degeneracy-adapted eigenbasis.

    Within each group of numerically equal eigenvalues the basis is
    rotated to diagonalize dH restricted to the group, so the diagonal
    becomes the proper Hellmann-Feynman derivative and intra-group
    couplings vanish by construction.

    Returns (elements, group id per level).
    """
    v = spectrum.eigenvectors
    m = v.T @ (np.asarray(generator, dtype=float) @ v)
    groups = _degenerate_groups(spectrum.eigenvalues, tol)
    gid = np.empty(spectrum.dim, dtype=np.intp)
    for k, group in enumerate(groups):
        gid[group.start:group.stop] = k
        if len(group) > 1:
            sl = slice(group.start, group.stop)
            block = (m[sl, sl] + m[sl, sl].T) / 2.0
            _, u = scipy.linalg.eigh(block)
            m[:, sl] = m[:, sl] @ u
            m[sl, :] = u.T @ m[sl, :]
    return (m + m.T) / 2.0, gid


def _quantum_pair_sum(energies, probs, elements, gid, by_offset=False):
    """2 sum_{n,m} (p_n - p_m)^2/(p_n + p_m) |<n|dH|m>|^2 / (E_m - E_n)^2.

    Ordered pairs inside one degenerate group are skipped (their
    couplings are zero after the basis rotation anyway), as are pairs
    whose combined weight is negligible.  With ``by_offset`` the mass is
    also histogrammed by the level-index distance |n - m|.
    """
    d = len(energies)
    total = 0.0
    offsets = np.zeros(d) if by_offset else None
    for lo in range(0, d, _CHUNK):
        hi = min(lo + _CHUNK, d)
        p_rows = probs[lo:hi, None]
        weight_sum = p_rows + probs[None, :]
        e_diff = energies[None, :] - energies[lo:hi, None]
        mask = (weight_sum >= PAIR_WEIGHT_FLOOR) & (gid[lo:hi, None] != gid[None, :])
        denom = np.where(mask, weight_sum * e_diff * e_diff, 1.0)
        contrib = np.where(
            mask,
            (p_rows - probs[None, :]) ** 2 * elements[lo:hi, :] ** 2 / denom,
            0.0,
        )
        total += float(contrib.sum())
        if by_offset:
            idx = np.abs(np.arange(lo, hi)[:, None] - np.arange(d)[None, :])
            np.add.at(offsets, idx.ravel(), contrib.ravel())
    if by_offset:
        return 2.0 * total, 2.0 * offsets
    return 2.0 * total, None


def _clamp_part(value):
    # parts are sums of squares; tiny negatives would be a bug, not roundoff
    if value < -1e-12:
        raise AssertionError(f"negative Fisher contribution {value}")
    return max(value, 0.0)


def qfi_spectral(model, state, degeneracy_rtol=DEGENERACY_RTOL):
    """Quantum Fisher information of a finite-temperature Gibbs state.

    classical_part = sum_n (dp_n/domega)^2 / p_n with Hellmann-Feynman
    level derivatives; quantum_part couples eigenpairs through
    <n|dH|m> / (E_m - E_n).  Requires finite beta (use qfi_pure or
    qfi_fidelity_fd for the T = 0 curve).
    """
    if state.dim != model.H.shape[0]:
        raise DimMismatch(
            f"state dimension {state.dim} does not match model dimension {model.H.shape[0]}"
        )
    if math.isinf(state.beta):
        raise InvalidTemperature(
            "spectral decomposition needs finite beta; at T = 0 use qfi_pure or qfi_fidelity_fd"
        )
    energies = state.spectrum.eigenvalues
    probs = state.probs
    tol = degeneracy_rtol * max(1.0, float(np.max(np.abs(energies))))
    elements, gid = _rotated_generator(state.spectrum, model.dH, tol)

    level_slopes = np.diag(elements).copy()
    mean_slope = float(np.dot(probs, level_slopes))
    dprobs = -state.beta * probs * (level_slopes - mean_slope)
    keep = probs > PROB_FLOOR
    classical = float(np.sum(dprobs[keep] ** 2 / probs[keep]))

    quantum, _ = _quantum_pair_sum(energies, probs, elements, gid)

    classical = _clamp_part(classical)
    quantum = _clamp_part(quantum)
    return FisherBreakdown(
        total=classical + quantum,
        classical_part=classical,
        quantum_part=quantum,
        method="spectral",
        meta={
            "degeneracy_tol": tol,
            "pair_weight_floor": PAIR_WEIGHT_FLOOR,
            "prob_floor": PROB_FLOOR,
            "size": model.size,
        },
    )


def quantum_term_by_offset(model, state, degeneracy_rtol=DEGENERACY_RTOL):
    """Quantum-term mass of qfi_spectral, resolved by level distance |n - m|.

    Diagnostic companion to qfi_spectral: returns an array whose k-th
    entry is the mass carried by eigenpairs k levels apart (entry 0 is
    always zero).  For the oscillator model essentially all mass sits at
    distance 2.
    """
    if math.isinf(state.beta):
        raise InvalidTemperature("needs finite beta")
    energies = state.spectrum.eigenvalues
    tol = degeneracy_rtol * max(1.0, float(np.max(np.abs(energies))))
    elements, gid = _rotated_generator(state.spectrum, model.dH, tol)
    _, offsets = _quantum_pair_sum(energies, state.probs, elements, gid, by_offset=True)
    return offsets


def qfi_pure(model, spectrum, level=0, degeneracy_rtol=DEGENERACY_RTOL):
    """Fisher information of one eigenstate: 4 sum_{m!=n} |<m|dH|n>|^2/(E_n-E_m)^2."""
    energies = spectrum.eigenvalues
    d = spectrum.dim
    if not 0 <= level < d:
        raise ValueError(f"level {level} out of range for dimension {d}")
    tol = degeneracy_rtol * max(1.0, float(np.max(np.abs(energies))))
    if (level > 0 and energies[level] - energies[level - 1] <= tol) or (
        level < d - 1 and energies[level + 1] - energies[level] <= tol
    ):
        raise DegenerateLevel(f"level {level} is degenerate within tolerance {tol:.3e}")
    column = spectrum.eigenvectors.T @ (np.asarray(model.dH, dtype=float) @ spectrum.eigenvectors[:, level])
    diffs = energies[level] - energies
    mask = np.arange(d) != level
    return 4.0 * float(np.sum(column[mask] ** 2 / diffs[mask] ** 2))


def _fd_ladder(estimate, delta0, delta_min, rtol, atol):
    """Halve the step until two consecutive estimates agree.

    Near criticality no single step is safe, so convergence is judged by
    agreement of neighbouring rungs; failure to settle by delta_min
    raises NoFDConvergence carrying the last two estimates.  All
    estimates here are even-order in the step, so the accepted pair is
    returned step-doubling extrapolated, (4 fine - coarse) / 3, which
    squares the relative accuracy without extra rungs.
    """
    history = [(delta0, estimate(delta0))]
    delta = delta0 / 2.0
    while delta >= delta_min:
        value = estimate(delta)
        previous = history[-1][1]
        if abs(value - previous) <= rtol * max(abs(value), abs(previous)) + atol:
            return (4.0 * value - previous) / 3.0, delta
        history.append((delta, value))
        delta /= 2.0
    raise NoFDConvergence(
        f"finite-difference estimates did not settle before delta = {delta * 2.0:.3e}",
        estimates=tuple(v for _, v in history[-2:]),
    )


def _thermal_density(model_factory, omega, beta):
    model = model_factory(omega)
    return density_matrix(gibbs(eigh(model.H), beta))


def qfi_fidelity_fd(
    model_factory,
    omega,
    beta,
    delta_omega=None,
    fd_rtol=FD_RTOL,
    fd_atol=FD_ATOL,
):
    """Quantum Fisher information from the fidelity between neighbours:

        8 * (1 - sqrt(F[rho(omega - d/2), rho(omega + d/2)])) / d^2

    with the step halved until two consecutive estimates agree to
    ``fd_rtol`` (plus ``fd_atol`` absolute).  The square root matters:
    1 - F itself shrinks like QFI * d^2 / 4, so feeding the squared
    fidelity into the /8 form would return twice the Fisher information
    (pure states make this obvious: F = |<psi|psi'>|^2 = 1 - QFI d^2/4).
    ``beta`` is held fixed across the two evaluations; resolve any
    gap-ratio parametrization before calling.  Root infidelities below
    the roundoff scale of the fidelity count as exact zero, so identical
    states give 0 instead of amplified noise.
    """
    if delta_omega is None:
        delta_omega = FD_DELTA_FACTOR * omega
    delta_min = FD_DELTA_MIN_FACTOR * omega

    def estimate(step):
        rho = _thermal_density(model_factory, omega - step / 2.0, beta)
        sigma = _thermal_density(model_factory, omega + step / 2.0, beta)
        infidelity = 1.0 - math.sqrt(fidelity(rho, sigma))
        floor = 8.0 * rho.shape[0] * np.finfo(float).eps
        if infidelity < floor:
            infidelity = 0.0
        return 8.0 * infidelity / step ** 2

    value, _ = _fd_ladder(estimate, delta_omega, delta_min, fd_rtol, fd_atol)
    return max(value, 0.0)


def _outcome_projectors(observable):
    """Eigenbasis of the observable with degenerate eigenvalues merged.

    Returns (basis columns, list of column ranges), one range per
    distinct outcome.  Merging matters: measuring a squared spin
    component must not distinguish +m from -m.
    """
    spec = eigh(observable)
    scale = max(1.0, float(np.max(np.abs(spec.eigenvalues))))
    groups = _degenerate_groups(spec.eigenvalues, OUTCOME_GROUP_RTOL * scale)
    return spec.eigenvectors, groups


def cfi_projective(
    model_factory,
    omega,
    beta,
    observable,
    delta_omega=None,
    fd_rtol=FD_RTOL,
    fd_atol=FD_ATOL,
):
    """Classical Fisher information of projectively measuring an observable.

    Outcome probabilities p_k(omega) = tr(rho(omega) Pi_k) are formed
    from the observable's merged eigenprojectors (fixed across the
    differentiation); their derivatives come from the same central-
    difference ladder as qfi_fidelity_fd.  Outcomes with probability
    below 1e-12 at the centre are skipped.
    """
    obs = np.asarray(observable, dtype=float)
    if delta_omega is None:
        delta_omega = FD_DELTA_FACTOR * omega
    delta_min = FD_DELTA_MIN_FACTOR * omega
    basis, groups = _outcome_projectors(obs)
    if len(groups) == 1:
        return 0.0  # one outcome: the distribution cannot move

    def outcome_probs(at_omega):
        model = model_factory(at_omega)
        if model.H.shape != obs.shape:
            raise DimMismatch(
                f"observable shape {obs.shape} does not match model dimension {model.H.shape}"
            )
        rho = _thermal_density(model_factory, at_omega, beta)
        overlap = np.einsum("ik,ik->k", basis, rho @ basis)
        return np.array([float(np.sum(overlap[g.start:g.stop])) for g in groups])

    center = outcome_probs(omega)
    keep = center > OUTCOME_PROB_FLOOR

    def estimate(step):
        plus = outcome_probs(omega + step / 2.0)
        minus = outcome_probs(omega - step / 2.0)
        slopes = (plus - minus) / step
        return float(np.sum(slopes[keep] ** 2 / center[keep]))

    value, _ = _fd_ladder(estimate, delta_omega, delta_min, fd_rtol, fd_atol)
    return max(value, 0.0)


def fi_error_propagation(
    model_factory,
    omega,
    beta,
    observable,
    delta_omega=None,
    fd_rtol=FD_RTOL,
    fd_atol=1e-12,
):
    """Two-moment Fisher information (d<A>/domega)^2 / Var(A).

    The weakest of the three estimators but the cheapest experimentally:
    only the mean and variance of one observable enter.  Raises
    ZeroVariance when the observable does not fluctuate in the state.
    """
    obs = np.asarray(observable, dtype=float)
    if delta_omega is None:
        delta_omega = FD_DELTA_FACTOR * omega
    delta_min = FD_DELTA_MIN_FACTOR * omega

    def state_at(at_omega):
        model = model_factory(at_omega)
        if model.H.shape != obs.shape:
            raise DimMismatch(
                f"observable shape {obs.shape} does not match model dimension {model.H.shape}"
            )
        return gibbs(eigh(model.H), beta)

    center = state_at(omega)
    mean = thermal_expectation(center, obs)
    second = thermal_expectation(center, obs @ obs)
    variance = second - mean ** 2
    scale = max(1.0, float(np.max(np.abs(obs))))
    if variance <= VARIANCE_FLOOR_RTOL * scale ** 2:
        raise ZeroVariance(f"Var(A) = {variance:.3e} is numerically zero")

    def estimate(step):
        plus = thermal_expectation(state_at(omega + step / 2.0), obs)
        minus = thermal_expectation(state_at(omega - step / 2.0), obs)
        return (plus - minus) / step

    slope, _ = _fd_ladder(estimate, delta_omega, delta_min, fd_rtol, fd_atol)
    return slope ** 2 / variance
