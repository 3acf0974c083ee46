"""Architecture-constrained optimizers for the received-power objective.

The tridiagonal and group-connected optimizers share one idea: a surface
achieves the relevant upper bound exactly when its susceptance matrix B
steers the (normalized) transmit channel onto the receive channel, which
is a linear condition B alpha = beta on the free entries of B.  Stacking
real and imaginary parts gives an ordinary real least-squares problem; the
minimum-norm solution is exact whenever the system is consistent and a
well-behaved heuristic when it is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .architecture import (
    DEFAULT_Z0,
    KIND_SINGLE,
    KIND_TREE,
    ArchitectureSpec,
    ScatteringMatrix,
    SusceptanceMatrix,
    partition_from_cuts,
    pattern_mask,
    received_power,
    scattering_from_susceptance,
    upper_bound_full,
    upper_bound_gc,
)
from .channel import ChannelPair, Rng, normalize
from .errors import InputError
from .linalg import min_norm_least_squares

DEFAULT_RANK_RTOL = 1e-10
# A steering system counts as consistent when the least-squares residual is
# below this, relative to ||b||.
CONSISTENT_RTOL = 1e-8
# Group with || hr_hat + ht_hat || below this is degenerate (opposite unit
# vectors); the linear system vanishes and per-element phasing takes over.
_DEGENERATE_GROUP_TOL = 1e-10
# Keep per-element phases strictly inside (-pi, pi) so tan stays finite.
_PHASE_MARGIN = 1e-6


@dataclass(frozen=True)
class LinearSystem:
    """Real-stacked steering system for a tridiagonal surface.

    Unknown layout: x[:n] are the diagonal entries B_11..B_nn, x[n:] the
    couplings B_12..B_{n-1,n}.  alpha is the complex coefficient vector
    j z0 (hr_hat + ht_hat) the columns are built from.
    """

    a: np.ndarray
    b: np.ndarray
    alpha: np.ndarray
    n: int


@dataclass(frozen=True)
class OptimizeResult:
    """Outcome of one architecture-constrained optimization."""

    b_matrix: SusceptanceMatrix
    theta: ScatteringMatrix
    p_r: float
    p_bar_full: float
    p_bar_arch: float
    ratio_full: float
    residual_norm: float
    consistent: bool


def build_tc_system(pair: ChannelPair, z0: float = DEFAULT_Z0) -> LinearSystem:
    """Equations a tridiagonal surface must satisfy to reach the full bound.

    With unit-norm channels and alpha = j z0 (hr_hat + ht_hat), any
    tridiagonal B solving B alpha = ht_hat - hr_hat makes the scattering
    matrix map ht_hat exactly onto hr_hat.  Row k of the complex system
    reads B_kk alpha_k + B_{k-1,k} alpha_{k-1} + B_{k,k+1} alpha_{k+1};
    the real stacking puts real parts on top of imaginary parts.
    """
    n = pair.n
    if n < 2:
        raise InputError("the tridiagonal steering system needs n >= 2")
    _check_z0(z0)
    hr = normalize(pair.h_r)
    ht = normalize(pair.h_t)
    alpha = 1j * z0 * (hr + ht)
    beta = ht - hr
    a1 = np.diag(alpha)
    a2 = np.zeros((n, n - 1), dtype=complex)
    for k in range(n - 1):
        a2[k, k] = alpha[k + 1]
        a2[k + 1, k] = alpha[k]
    ac = np.hstack([a1, a2])
    a = np.vstack([ac.real, ac.imag])
    b = np.concatenate([beta.real, beta.imag])
    return LinearSystem(a=a, b=b, alpha=alpha, n=n)


def optimize_tc(pair: ChannelPair, z0: float = DEFAULT_Z0,
                rank_rtol: float = DEFAULT_RANK_RTOL) -> OptimizeResult:
    """Tridiagonal optimizer: minimum-norm least squares on the steering system."""
    system = build_tc_system(pair, z0)
    sol = min_norm_least_squares(system.a, system.b, rank_rtol)
    n = system.n
    b = np.zeros((n, n))
    b[np.arange(n), np.arange(n)] = sol.x[:n]
    for k in range(n - 1):
        b[k, k + 1] = b[k + 1, k] = sol.x[n + k]
    consistent = sol.residual_norm <= CONSISTENT_RTOL * float(np.linalg.norm(system.b))
    return _finish(pair, SusceptanceMatrix(b), z0, upper_bound_full(pair),
                   sol.residual_norm, consistent)


def optimize_gc(pair: ChannelPair, cuts, z0: float = DEFAULT_Z0,
                rank_rtol: float = DEFAULT_RANK_RTOL) -> OptimizeResult:
    """Group-connected optimizer: one dense steering system per group.

    Each group is normalized independently, which pins every group's
    contribution to phase zero so they add coherently; under that
    normalization the per-group consistency scalar Im(alpha^H beta)
    vanishes identically and the group systems are generically solvable.
    Degenerate groups (hr_hat ~ -ht_hat, vanishing alpha) fall back to
    per-element phasing, which meets the group bound in that case.
    """
    _check_z0(z0)
    n = pair.n
    spans = partition_from_cuts(cuts, n)
    b = np.zeros((n, n))
    worst_residual = 0.0
    scale = 0.0
    for lo, hi in spans:
        hr = pair.h_r[lo:hi]
        ht = pair.h_t[lo:hi]
        nr = float(np.linalg.norm(hr))
        nt = float(np.linalg.norm(ht))
        if nr == 0.0 or nt == 0.0:
            continue  # dead group: contributes nothing for any block value
        hrn = hr / nr
        htn = ht / nt
        if np.linalg.norm(hrn + htn) < _DEGENERATE_GROUP_TOL:
            d = _phase_align_susceptance(hr, ht, z0)
            idx = np.arange(lo, hi)
            b[idx, idx] = d
            continue
        a, rhs, index_pairs = _group_system(hrn, htn, z0)
        sol = min_norm_least_squares(a, rhs, rank_rtol)
        for c, (i, j) in enumerate(index_pairs):
            b[lo + i, lo + j] = b[lo + j, lo + i] = sol.x[c]
        worst_residual = max(worst_residual, sol.residual_norm)
        scale = max(scale, float(np.linalg.norm(rhs)))
    consistent = worst_residual <= CONSISTENT_RTOL * scale if scale > 0.0 else True
    return _finish(pair, SusceptanceMatrix(b), z0, upper_bound_gc(pair, cuts),
                   worst_residual, consistent)


def optimize_sc(pair: ChannelPair, z0: float = DEFAULT_Z0) -> OptimizeResult:
    """Closed-form diagonal optimizer: per-element phase alignment.

    Element i gets scattering phase arg(h_r,i) - arg(h_t,i), so every term
    of the received sum lands on the positive real axis and the diagonal
    bound (sum_i |h_r,i| |h_t,i|)^2 is met up to the phase clamp.
    """
    _check_z0(z0)
    d = _phase_align_susceptance(pair.h_r, pair.h_t, z0)
    p_bar_arch = float(np.sum(np.abs(pair.h_r) * np.abs(pair.h_t)) ** 2)
    return _finish(pair, SusceptanceMatrix(np.diag(d)), z0, p_bar_arch, 0.0, True)


def optimize(pair: ChannelPair, spec: ArchitectureSpec, z0: float = DEFAULT_Z0,
             rank_rtol: float = DEFAULT_RANK_RTOL) -> OptimizeResult:
    """Run the optimizer matching the architecture kind."""
    if spec.n != pair.n:
        raise InputError(f"architecture is for n = {spec.n}, channels have n = {pair.n}")
    if spec.kind == KIND_SINGLE:
        return optimize_sc(pair, z0)
    if spec.kind == KIND_TREE:
        return optimize_tc(pair, z0, rank_rtol)
    return optimize_gc(pair, spec.effective_cuts, z0, rank_rtol)


@dataclass(frozen=True)
class SearchResult:
    """Best candidate found by brute_force_power_search."""

    p_r: float
    b_matrix: SusceptanceMatrix
    evaluations: int


class _BudgetExhausted(Exception):
    pass


def brute_force_power_search(pair: ChannelPair, spec: ArchitectureSpec,
                             z0: float = DEFAULT_Z0, budget: int = 100_000,
                             rng: Rng | None = None) -> SearchResult:
    """Derivative-free search over patterned susceptance matrices.

    Cauchy-distributed random candidates cover every magnitude scale, then
    the best ones are refined coordinate by coordinate with a grid scan
    plus golden-section line search on the bounded reparametrization
    u = atan(z0 * b).  Spends at most `budget` received-power evaluations;
    since every candidate's scattering matrix is unitary, the result can
    never exceed the full upper bound.
    """
    if spec.n != pair.n:
        raise InputError(f"architecture is for n = {spec.n}, channels have n = {pair.n}")
    if not isinstance(budget, int) or budget < 1:
        raise InputError(f"evaluation budget must be a positive integer, got {budget!r}")
    if rng is None:
        raise InputError("brute_force_power_search needs an explicit rng")
    _check_z0(z0)
    n = pair.n
    mask = pattern_mask(spec)
    coords = [(i, j) for i in range(n) for j in range(i, n) if mask[i, j]]
    k = len(coords)
    eye = np.eye(n)
    hr_conj = pair.h_r.conj()

    state = {"spent": 0, "best_p": -1.0, "best_vals": np.zeros(k)}

    def eval_batch(vals: np.ndarray) -> np.ndarray:
        left = budget - state["spent"]
        if left <= 0:
            raise _BudgetExhausted
        vals = vals[:left]
        bs = np.zeros((vals.shape[0], n, n))
        for c, (i, j) in enumerate(coords):
            bs[:, i, j] = vals[:, c]
            if i != j:
                bs[:, j, i] = vals[:, c]
        jb = 1j * z0 * bs
        theta = np.linalg.solve(eye + jb, eye - jb)
        p = np.abs(np.einsum("i,mij,j->m", hr_conj, theta, pair.h_t)) ** 2
        state["spent"] += vals.shape[0]
        top = int(np.argmax(p))
        if p[top] > state["best_p"]:
            state["best_p"] = float(p[top])
            state["best_vals"] = vals[top].copy()
        return p

    def eval_one(vals: np.ndarray) -> float:
        return float(eval_batch(vals[None, :])[0])

    pool: list[np.ndarray] = []
    try:
        eval_one(np.zeros(k))  # the all-zero surface is always a candidate
        explore = min(budget // 2, max(64, 32 * k))
        while explore > 0:
            m = min(explore, 4096)
            u = rng.uniform(m * k).reshape(m, k)
            vals = np.tan(np.pi * (u - 0.5)) / z0
            p = eval_batch(vals)
            order = np.argsort(p)[::-1][:4]
            pool.extend(vals[i].copy() for i in order)
            explore -= m
        pool.sort(key=lambda v: -eval_one(v))
        if not pool:
            pool = [np.zeros(k)]
        for start in pool:
            vals = start.copy()
            current = eval_one(vals)
            for _ in range(60):  # coordinate cycles per start
                improved = False
                for ci in range(k):
                    better, u_best = _line_search(eval_one, vals, ci, z0, current)
                    if better > current * (1.0 + 1e-12):
                        current = better
                        vals[ci] = math.tan(u_best) / z0
                        improved = True
                if not improved:
                    break
    except _BudgetExhausted:
        pass
    b = np.zeros((n, n))
    for c, (i, j) in enumerate(coords):
        b[i, j] = b[j, i] = state["best_vals"][c]
    return SearchResult(p_r=state["best_p"], b_matrix=SusceptanceMatrix(b),
                        evaluations=state["spent"])


def _line_search(eval_one, vals, ci, z0, f_cur):
    """Grid + golden-section maximization along one susceptance coordinate.

    Works on u = atan(z0 * b) so the whole real susceptance axis becomes
    the bounded interval (-pi/2, pi/2).  Returns (best value, best u).
    """
    lim = math.pi / 2 - 1e-4
    u_cur = math.atan(z0 * vals[ci])
    grid = np.linspace(-lim, lim, 13)

    def f_at(u: float) -> float:
        probe = vals.copy()
        probe[ci] = math.tan(u) / z0
        return eval_one(probe)

    scores = [(f_cur, u_cur)] + [(f_at(u), u) for u in grid]
    f0, u0 = max(scores, key=lambda t: t[0])
    lo = max(u0 - 0.3, -lim)
    hi = min(u0 + 0.3, lim)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f_at(c), f_at(d)
    for _ in range(30):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f_at(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f_at(d)
    cands = [(f0, u0), (fc, c), (fd, d)]
    return max(cands, key=lambda t: t[0])


def _group_system(hr_n, ht_n, z0: float):
    """Real-stacked steering system of one fully-coupled group.

    Unknowns are the upper triangle of the group block: diagonal entries
    first, then couplings (i, j) with i < j in row-major order.
    """
    k = hr_n.size
    alpha = 1j * z0 * (hr_n + ht_n)
    beta = ht_n - hr_n
    index_pairs = [(i, i) for i in range(k)]
    index_pairs += [(i, j) for i in range(k) for j in range(i + 1, k)]
    m = np.zeros((k, len(index_pairs)), dtype=complex)
    for c, (i, j) in enumerate(index_pairs):
        m[i, c] += alpha[j]
        if j != i:
            m[j, c] += alpha[i]
    a = np.vstack([m.real, m.imag])
    rhs = np.concatenate([beta.real, beta.imag])
    return a, rhs, index_pairs


def _phase_align_susceptance(h_r, h_t, z0: float) -> np.ndarray:
    """Diagonal susceptances giving element i the phase arg(h_r,i) - arg(h_t,i).

    A diagonal entry b produces the scattering phase -2 atan(z0 b), so
    b = -tan(phase / 2) / z0.  Elements with a zero channel entry on either
    side contribute nothing; their phase is pinned to 0.  Phases are
    clamped strictly inside (-pi, pi) to keep tan finite.
    """
    phase = np.angle(h_r) - np.angle(h_t)
    phase = (phase + np.pi) % (2.0 * np.pi) - np.pi
    phase[(h_r == 0) | (h_t == 0)] = 0.0
    limit = np.pi - _PHASE_MARGIN
    phase = np.clip(phase, -limit, limit)
    return -np.tan(0.5 * phase) / z0


def _finish(pair, b_matrix, z0, p_bar_arch, residual_norm, consistent) -> OptimizeResult:
    theta = scattering_from_susceptance(b_matrix, z0)
    p_r = received_power(pair, theta)
    p_bar_full = upper_bound_full(pair)
    return OptimizeResult(
        b_matrix=b_matrix,
        theta=theta,
        p_r=p_r,
        p_bar_full=p_bar_full,
        p_bar_arch=p_bar_arch,
        ratio_full=p_r / p_bar_full,
        residual_norm=residual_norm,
        consistent=consistent,
    )


def _check_z0(z0) -> None:
    if not np.isfinite(z0) or z0 <= 0:
        raise InputError(f"reference impedance must be positive and finite, got {z0!r}")
