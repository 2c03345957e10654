"""Detectors for the spread anti-jamming modulation.

Three variants:
  * full_mld       -- exhaustive joint search over symbol vectors and jamming
                      indicator patterns (known jamming variance).
  * lowcomp_mld    -- per-J sorted-residual search, O(M^S * (N+1)); decision
                      equivalent to full_mld up to exact likelihood ties.
  * approx_mld     -- lowcomp with the jamming variance replaced by a
                      per-candidate residual-based estimate (unknown variance).

All likelihood comparisons are done in the log domain.  Ties break toward
the lexicographically smallest symbol-index vector, then the smallest
indicator (as a binary integer) or J.  The batch entry points vectorize
over many blocks sharing one spreading matrix; an optional per-block
boolean mask excludes zero-padded subcarriers from every residual sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellations import Constellation
from .errors import ConfigurationError
from .spreading import SpreadingMatrix

_LOG_PI = float(np.log(np.pi))


@dataclass(frozen=True)
class DetectionResult:
    s_hat: np.ndarray  # (S,) complex, estimated symbol vector
    s_indices: np.ndarray  # (S,) int, constellation indices of s_hat
    j_hat: int
    log_likelihood: float
    sigma_z2_used: float
    c_hat: np.ndarray | None = None  # (N,) 0/1, full MLD only


def candidate_indices(m: int, s: int) -> np.ndarray:
    """(M^S, S) symbol-index vectors in ascending lexicographic order."""
    ncand = m**s
    k = np.arange(ncand)
    out = np.empty((ncand, s), dtype=np.int64)
    for j in range(s):
        out[:, j] = (k // m ** (s - 1 - j)) % m
    return out


def _residual_energies(
    y: np.ndarray, h: np.ndarray, sm: SpreadingMatrix, c: Constellation
) -> tuple[np.ndarray, np.ndarray]:
    """Per-(block, candidate, subcarrier) squared residual magnitudes.

    Returns (E, cand_idx) with E of shape (B, M^S, N).
    """
    cand_idx = candidate_indices(c.order, sm.n_symbols)
    spread = c.points[cand_idx] @ sm.matrix.T  # (ncand, N)
    pred = h[:, None, :] * spread[None, :, :]
    e = y[:, None, :] - pred
    return (e.real**2 + e.imag**2), cand_idx


def sort_residuals(e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Magnitudes in descending order plus the stable permutation applied."""
    mags = np.abs(np.asarray(e).ravel())
    perm = np.argsort(-mags, kind="stable")
    return mags[perm], perm


def estimate_sigma_z2(
    y: np.ndarray,
    h: np.ndarray,
    sm: SpreadingMatrix,
    s_candidate: np.ndarray,
    j: int,
    sigma_w2: float,
    mask: np.ndarray | None = None,
) -> float:
    """Residual-based jamming-variance estimate for a hypothesized (s, J)."""
    if j == 0:
        return 0.0
    resid = np.asarray(y) - np.asarray(h) * (sm.matrix @ np.asarray(s_candidate))
    if mask is not None:
        resid = resid[np.asarray(mask, dtype=bool)]
    n_eff = resid.size
    return float(max((np.sum(np.abs(resid) ** 2) - n_eff * sigma_w2) / j, 0.0))


# ---------------------------------------------------------------------------
# batch cores (operate on blocks sharing one mask pattern)
# ---------------------------------------------------------------------------


def _full_core(E, sigma_w2, sigma_z2):
    """argmax of the exact joint log-likelihood over (candidate, indicator)."""
    B, ncand, n = E.shape
    patterns = ((np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1).astype(float)
    weights = patterns * sigma_z2 + sigma_w2  # (2^n, n)
    pops = patterns.sum(axis=1)
    const = -n * _LOG_PI - pops * np.log(sigma_z2 + sigma_w2) - (n - pops) * np.log(sigma_w2)
    ll = const[None, None, :] - np.einsum("bkn,cn->bkc", E, 1.0 / weights)
    flat = ll.reshape(B, -1)
    best = np.argmax(flat, axis=1)  # first max: smallest (candidate, c)
    k = best // (1 << n)
    cbits = patterns[best % (1 << n)].astype(np.int8)
    return k, cbits, flat[np.arange(B), best]


def _sorted_prefix(E):
    """Cumulative sums of per-candidate residual energies sorted descending."""
    es = -np.sort(-E, axis=-1)
    prefix = np.concatenate(
        [np.zeros(es.shape[:-1] + (1,)), np.cumsum(es, axis=-1)], axis=-1
    )
    return prefix  # (..., n+1); prefix[..., J] = sum of J largest


def _lowcomp_core(E, sigma_w2, sigma_z2):
    """Algorithm: per-J least-squares candidate, then pick J by likelihood."""
    B, ncand, n = E.shape
    prefix = _sorted_prefix(E)
    total = prefix[..., -1]
    js = np.arange(n + 1)
    # obj[b, k, J]: weighted residual objective
    obj = prefix / (sigma_z2 + sigma_w2) + (total[..., None] - prefix) / sigma_w2
    k_j = np.argmin(obj, axis=1)  # (B, n+1), first min = smallest lexicographic s
    obj_best = np.take_along_axis(obj, k_j[:, None, :], axis=1)[:, 0, :]
    const = -n * _LOG_PI - js * np.log(sigma_z2 + sigma_w2) - (n - js) * np.log(sigma_w2)
    ll = const[None, :] - obj_best
    j_hat = np.argmax(ll, axis=1)  # first max = smallest J on ties
    k = k_j[np.arange(B), j_hat]
    return k, j_hat, ll[np.arange(B), j_hat]


def _approx_core(E, sigma_w2, forced_sigma_z2=None):
    """Joint (s, J) search with a per-hypothesis jamming-variance estimate."""
    B, ncand, n = E.shape
    prefix = _sorted_prefix(E)
    total = prefix[..., -1]  # (B, ncand)
    js = np.arange(n + 1)[None, None, :]
    if forced_sigma_z2 is None:
        with np.errstate(divide="ignore", invalid="ignore"):
            sz = np.maximum((total[..., None] - n * sigma_w2) / js, 0.0)
        sz[..., 0] = 0.0
    else:
        sz = np.full((B, ncand, n + 1), float(forced_sigma_z2))
        sz[..., 0] = forced_sigma_z2  # J=0 terms below are J-weighted anyway
    denom = sz + sigma_w2
    obj = prefix / denom + (total[..., None] - prefix) / sigma_w2
    ll = (
        -n * _LOG_PI
        - js * np.log(denom)
        - (n - js) * np.log(sigma_w2)
        - obj
    )
    flat = ll.reshape(B, -1)
    best = np.argmax(flat, axis=1)  # first max: smallest (candidate, J)
    k = best // (n + 1)
    j_hat = best % (n + 1)
    sz_used = sz.reshape(B, -1)[np.arange(B), best]
    return k, j_hat, flat[np.arange(B), best], sz_used


# ---------------------------------------------------------------------------
# batch entry points with mask grouping
# ---------------------------------------------------------------------------


def _run_masked(core, y, h, sm, c, mask, *args, **kwargs):
    y = np.atleast_2d(np.asarray(y))
    h = np.atleast_2d(np.asarray(h))
    B, n = y.shape
    if mask is None:
        cand_idx = candidate_indices(c.order, sm.n_symbols)
        spread = c.points[cand_idx] @ sm.matrix.T
        pred = h[:, None, :] * spread[None, :, :]
        e = y[:, None, :] - pred
        E = e.real**2 + e.imag**2
        return cand_idx, core(E, *args, **kwargs), None
    mask = np.atleast_2d(np.asarray(mask, dtype=bool))
    cand_idx = candidate_indices(c.order, sm.n_symbols)
    outs = [None] * 5
    results = {}
    uniq, inv = np.unique(mask, axis=0, return_inverse=True)
    for u_i in range(uniq.shape[0]):
        rows = np.nonzero(inv == u_i)[0]
        cols = np.nonzero(uniq[u_i])[0]
        sub_sm_matrix = sm.matrix[cols]
        spread = c.points[cand_idx] @ sub_sm_matrix.T
        pred = h[np.ix_(rows, cols)][:, None, :] * spread[None, :, :]
        e = y[np.ix_(rows, cols)][:, None, :] - pred
        E = e.real**2 + e.imag**2
        results[u_i] = (rows, cols, core(E, *args, **kwargs))
    return cand_idx, results, uniq


def full_mld_batch(y, h, sm: SpreadingMatrix, c: Constellation, sigma_w2, sigma_z2, mask=None):
    """Vectorized full MLD over B blocks; returns (s_idx, c_hat, j_hat, ll)."""
    _guard_full(sm, c)
    y2 = np.atleast_2d(np.asarray(y))
    B, n = y2.shape
    cand_idx, res, uniq = _run_masked(_full_core, y, h, sm, c, mask, sigma_w2, sigma_z2)
    if uniq is None:
        k, cbits, ll = res
        return cand_idx[k], cbits, cbits.sum(axis=1), ll
    s_idx = np.empty((B, sm.n_symbols), dtype=np.int64)
    c_hat = np.zeros((B, n), dtype=np.int8)
    ll = np.empty(B)
    for rows, cols, (k, cbits, ll_g) in res.values():
        s_idx[rows] = cand_idx[k]
        c_hat[np.ix_(rows, cols)] = cbits
        ll[rows] = ll_g
    return s_idx, c_hat, c_hat.sum(axis=1), ll


def lowcomp_mld_batch(y, h, sm: SpreadingMatrix, c: Constellation, sigma_w2, sigma_z2, mask=None):
    """Vectorized low-complexity MLD; returns (s_idx, j_hat, ll)."""
    y2 = np.atleast_2d(np.asarray(y))
    B, n = y2.shape
    cand_idx, res, uniq = _run_masked(_lowcomp_core, y, h, sm, c, mask, sigma_w2, sigma_z2)
    if uniq is None:
        k, j_hat, ll = res
        return cand_idx[k], j_hat, ll
    s_idx = np.empty((B, sm.n_symbols), dtype=np.int64)
    j_hat = np.empty(B, dtype=np.int64)
    ll = np.empty(B)
    for rows, _cols, (k, j_g, ll_g) in res.values():
        s_idx[rows] = cand_idx[k]
        j_hat[rows] = j_g
        ll[rows] = ll_g
    return s_idx, j_hat, ll


def approx_mld_batch(y, h, sm: SpreadingMatrix, c: Constellation, sigma_w2, mask=None, forced_sigma_z2=None):
    """Vectorized approximate MLD; returns (s_idx, j_hat, ll, sigma_z2_used)."""
    y2 = np.atleast_2d(np.asarray(y))
    B, n = y2.shape
    cand_idx, res, uniq = _run_masked(
        _approx_core, y, h, sm, c, mask, sigma_w2, forced_sigma_z2=forced_sigma_z2
    )
    if uniq is None:
        k, j_hat, ll, sz = res
        return cand_idx[k], j_hat, ll, sz
    s_idx = np.empty((B, sm.n_symbols), dtype=np.int64)
    j_hat = np.empty(B, dtype=np.int64)
    ll = np.empty(B)
    sz = np.empty(B)
    for rows, _cols, (k, j_g, ll_g, sz_g) in res.values():
        s_idx[rows] = cand_idx[k]
        j_hat[rows] = j_g
        ll[rows] = ll_g
        sz[rows] = sz_g
    return s_idx, j_hat, ll, sz


def _guard_full(sm: SpreadingMatrix, c: Constellation):
    if sm.n_subcarriers > 16:
        raise ConfigurationError(f"full MLD refuses N > 16 (N={sm.n_subcarriers})")
    if c.order**sm.n_symbols > 1 << 20:
        raise ConfigurationError(
            f"full MLD refuses |X|^S > 2^20 (M={c.order}, S={sm.n_symbols})"
        )


# ---------------------------------------------------------------------------
# single-block wrappers
# ---------------------------------------------------------------------------


def full_mld(y, h, sm, c, sigma_w2, sigma_z2, mask=None) -> DetectionResult:
    s_idx, c_hat, j_hat, ll = full_mld_batch(
        y[None, :], h[None, :], sm, c, sigma_w2, sigma_z2,
        mask=None if mask is None else np.asarray(mask)[None, :],
    )
    return DetectionResult(
        s_hat=c.points[s_idx[0]], s_indices=s_idx[0], j_hat=int(j_hat[0]),
        log_likelihood=float(ll[0]), sigma_z2_used=float(sigma_z2), c_hat=c_hat[0],
    )


def lowcomp_mld(y, h, sm, c, sigma_w2, sigma_z2, mask=None) -> DetectionResult:
    s_idx, j_hat, ll = lowcomp_mld_batch(
        y[None, :], h[None, :], sm, c, sigma_w2, sigma_z2,
        mask=None if mask is None else np.asarray(mask)[None, :],
    )
    return DetectionResult(
        s_hat=c.points[s_idx[0]], s_indices=s_idx[0], j_hat=int(j_hat[0]),
        log_likelihood=float(ll[0]), sigma_z2_used=float(sigma_z2),
    )


def approx_mld(y, h, sm, c, sigma_w2, mask=None, forced_sigma_z2=None) -> DetectionResult:
    s_idx, j_hat, ll, sz = approx_mld_batch(
        y[None, :], h[None, :], sm, c, sigma_w2,
        mask=None if mask is None else np.asarray(mask)[None, :],
        forced_sigma_z2=forced_sigma_z2,
    )
    return DetectionResult(
        s_hat=c.points[s_idx[0]], s_indices=s_idx[0], j_hat=int(j_hat[0]),
        log_likelihood=float(ll[0]), sigma_z2_used=float(sz[0]),
    )
