"""Spectral analysis of superoperators.

Everything here works on the dense D x D matrix of a channel: spectrum with
clustered multiplicities, peripheral part, fixed-space dimension, Cesàro
projectors (exact spectral form and iterated running means), power limits,
and defectiveness detection.

A peripheral Jordan block is a hard error throughout. Positive unital maps
are power-bounded, so a defective peripheral cluster proves the input is not
actually a Markov operator (or that the eigenproblem broke down); treating
it as a classification outcome would be wrong either way.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .channel import MarkovOperator
from .config import DEFAULT, Config
from .errors import DefectivePeripheral, EigensolverFailure


def _rank(m: np.ndarray, rel_tol: float) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > rel_tol * max(float(s[0]), 1.0)))


def _cluster(eigs: np.ndarray, radius: float) -> list[tuple[complex, int]]:
    """Chain-cluster eigenvalues: points within `radius` join a cluster."""
    order = np.lexsort((eigs.imag, eigs.real))
    pts = eigs[order]
    groups: list[list[complex]] = []
    for lam in pts:
        placed = False
        for g in groups:
            if any(abs(lam - mu) <= radius for mu in g):
                g.append(lam)
                placed = True
                break
        if not placed:
            groups.append([lam])
    # chained groups may touch after the fact; merge until stable
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(abs(a - b) <= radius for a in groups[i] for b in groups[j]):
                    groups[i].extend(groups[j])
                    del groups[j]
                    merged = True
                    break
            if merged:
                break
    return [(complex(np.mean(g)), len(g)) for g in groups]


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Spectrum of a channel with the derived mixing-relevant facts."""

    eigenvalues: tuple[complex, ...]
    clusters: tuple[tuple[complex, int], ...]
    peripheral: tuple[complex, ...]          # cluster centers with |lam| ~ 1
    fixed_space_dim: int
    defective_peripheral: bool
    spectral_radius: float
    cesaro_matrix: np.ndarray | None = field(repr=False, default=None)


def spectrum(op: MarkovOperator, config: Config = DEFAULT) -> SpectralSummary:
    """Eigenvalues, peripheral part, fixed space, and the Cesàro projector.

    fixed_space_dim is D - rank(M - I), i.e. the geometric multiplicity at
    eigenvalue 1; defectiveness compares geometric and algebraic (clustered)
    multiplicities on every peripheral cluster. The Cesàro projector is
    attached whenever no peripheral cluster is defective.
    """
    m = op.matrix
    D = op.dim
    try:
        eigs = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK hiccup
        raise EigensolverFailure(f"eigvals failed: {exc}") from exc
    clusters = _cluster(eigs, config.tol_cluster)
    eye = np.eye(D)
    fixed = D - _rank(m - eye, config.tol_rank)
    peripheral = tuple(c for c, _ in clusters
                       if abs(c) >= 1.0 - config.tol_peripheral)
    defective = False
    for center, mult in clusters:
        if abs(center) < 1.0 - config.tol_peripheral or mult == 1:
            continue
        geo = D - _rank(m - center * eye, config.tol_rank)
        if geo < mult:
            defective = True
            break
    # simple peripheral eigenvalues cannot be defective; multiplicity-1
    # clusters are skipped above, but the 1-cluster still needs the
    # geometric count to agree with the rank-based fixed dimension
    cesaro = None if defective else _cesaro_from_matrix(m, config)
    return SpectralSummary(
        eigenvalues=tuple(complex(x) for x in eigs),
        clusters=tuple(clusters),
        peripheral=peripheral,
        fixed_space_dim=int(fixed),
        defective_peripheral=defective,
        spectral_radius=float(np.max(np.abs(eigs))),
        cesaro_matrix=cesaro,
    )


def _cesaro_from_matrix(m: np.ndarray, config: Config) -> np.ndarray:
    """Spectral projector onto the eigenvalue-1 cluster along its complement.

    Complex Schur form with the 1-cluster sorted to the front, then a
    Sylvester solve for the coupling block. Raises DefectivePeripheral when
    the 1-cluster carries a nontrivial Jordan structure.
    """
    D = m.shape[0]
    tol = config.tol_cluster
    try:
        t, z, sdim = scipy.linalg.schur(
            m, output="complex", sort=lambda lam: abs(lam - 1.0) <= tol)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(f"Schur decomposition failed: {exc}") from exc
    k = int(sdim)
    if k == 0:
        return np.zeros_like(m)
    center = complex(np.mean(np.diag(t)[:k]))
    geo = D - _rank(m - center * np.eye(D), config.tol_rank)
    if geo < k:
        raise DefectivePeripheral(
            f"eigenvalue-1 cluster has geometric multiplicity {geo} < {k}")
    if k == D:
        return np.eye(D, dtype=complex)
    u11 = t[:k, :k]
    u12 = t[:k, k:]
    u22 = t[k:, k:]
    r = scipy.linalg.solve_sylvester(u11, -u22, u12)
    w = np.zeros((D, D), dtype=complex)
    w[:k, :k] = np.eye(k)
    w[:k, k:] = r
    return z @ w @ z.conj().T


def cesaro_projector_spectral(op: MarkovOperator,
                              config: Config = DEFAULT) -> np.ndarray:
    """The limit of the running means (1/n) sum_{k<n} T^k, computed exactly."""
    summary = spectrum(op, config)
    if summary.defective_peripheral:
        raise DefectivePeripheral(
            "peripheral cluster with nontrivial Jordan structure; "
            "input is not a power-bounded Markov operator")
    assert summary.cesaro_matrix is not None
    return summary.cesaro_matrix


@dataclass(frozen=True, eq=False)
class CesaroIterate:
    """Result of the iterated Cesàro mean.

    ``matrix`` is the dyadic Richardson extrapolate of the running mean,
    which removes the Theta(1/N) tail of the raw mean while using nothing
    but repeated applications of T; ``raw_mean`` is the plain running mean
    M_N, and ``converged``/``residual`` report the pinned dyadic test
    ||M_N - M_{N/2}|| <= tol (spectral norm).
    """

    matrix: np.ndarray = field(repr=False)
    converged: bool
    residual: float
    raw_mean: np.ndarray = field(repr=False)


def cesaro_projector_iterative(op: MarkovOperator, n: int, tol: float,
                               config: Config = DEFAULT) -> CesaroIterate:
    """Running mean of T^k by repeated application, with extrapolation.

    For power-of-two n the mean is built by dyadic doubling
    (M_{2m} = (M_m + T^m M_m)/2, T^{2m} = (T^m)^2); otherwise by plain
    accumulation. Non-convergence is reported, never raised.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = op.matrix
    D = op.dim
    eye = np.eye(D, dtype=complex)
    if n == 1:
        return CesaroIterate(matrix=eye.copy(), converged=False,
                             residual=float("inf"), raw_mean=eye.copy())
    if n & (n - 1) == 0:
        mean = eye.copy()           # M_1
        step = m.copy()             # T^1
        half = None
        count = 1
        while count < n:
            half = mean
            mean = (mean + step @ mean) / 2.0
            step = step @ step
            count *= 2
        h = count // 2
        m_half, m_full = half, mean
    else:
        h = n // 2
        acc = eye.copy()
        cur = eye.copy()
        m_half = eye.copy() if h == 1 else None
        for k in range(1, n):
            cur = m @ cur
            acc += cur
            if k == h - 1:
                m_half = acc / h
        m_full = acc / n
    assert m_half is not None
    residual = float(np.linalg.norm(m_full - m_half, 2))
    # extrapolate the O(1/n) running-mean tail: exact for the projector part
    extrapolated = (n * m_full - h * m_half) / (n - h)
    return CesaroIterate(matrix=extrapolated, converged=residual <= tol,
                         residual=residual, raw_mean=m_full)


@dataclass(frozen=True, eq=False)
class PowerLimit:
    """Limit of T^n, or the peripheral eigenvalues preventing one."""

    limit: np.ndarray | None = field(repr=False)
    diverges_peripheral: bool
    offending: tuple[complex, ...]


def power_limit(op: MarkovOperator, config: Config = DEFAULT) -> PowerLimit:
    """T^n converges iff the peripheral spectrum is exactly the 1-cluster.

    When it converges, the limit is the spectral projector at 1; otherwise
    the offending peripheral eigenvalues are reported.
    """
    summary = spectrum(op, config)
    if summary.defective_peripheral:
        raise DefectivePeripheral(
            "peripheral cluster with nontrivial Jordan structure")
    offending = tuple(c for c in summary.peripheral
                      if abs(c - 1.0) > config.tol_cluster)
    if offending:
        return PowerLimit(limit=None, diverges_peripheral=True,
                          offending=offending)
    assert summary.cesaro_matrix is not None
    return PowerLimit(limit=summary.cesaro_matrix, diverges_peripheral=False,
                      offending=())


def range_of_defect(op: MarkovOperator, config: Config = DEFAULT) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of T - id.

    Its width is D minus the fixed-space dimension; strict ergodicity shows
    up as width exactly D - 1.
    """
    m = op.matrix - np.eye(op.dim)
    u, s, _ = np.linalg.svd(m)
    if s.size == 0:
        return u[:, :0]
    keep = s > config.tol_rank * max(float(s[0]), 1.0)
    return u[:, keep]
