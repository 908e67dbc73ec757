"""Synthesis and testing of stationary random signals on product graphs.

Three constructions are provided: factor-graph-wise processes (a bivariate
polynomial filter in both factor Laplacians applied to white noise),
directional processes (polynomial in one factor Laplacian with arbitrary
matrix coefficients on the other index), and multivariate processes, which
are directional processes on the product with an edgeless graph.

Every sampler evaluates both its vertex-domain definition and its spectral
form and verifies they agree per sample, so the simulated covariances the
diagnostic tests consume are backed by two independent code paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SamplingError
from .filtering import PolyKernel2D
from .spectral import EigenBasis, default_tol_mult, eigenbasis, vandermonde

PATH_AGREE_TOL = 1e-9


@dataclass(frozen=True)
class WhiteNoise2D:
    """Seeded white-noise source on a vertex grid.

    Sample i draws from an independent stream keyed by (seed, i), so any
    subset of samples is reproducible regardless of generation order.
    """

    n1: int
    n2: int
    seed: int
    distribution: str = "gaussian"  # or "rademacher"

    def __post_init__(self):
        if self.seed < 0:
            raise SamplingError("seed must be nonnegative")
        if self.distribution not in ("gaussian", "rademacher"):
            raise SamplingError(f"unknown noise distribution {self.distribution!r}")

    def sample(self, index: int) -> np.ndarray:
        rng = np.random.default_rng((self.seed, index))
        if self.distribution == "gaussian":
            return rng.standard_normal((self.n1, self.n2))
        return rng.integers(0, 2, size=(self.n1, self.n2)).astype(np.float64) * 2.0 - 1.0

    def batch(self, count: int) -> np.ndarray:
        if count < 1:
            raise SamplingError("sample count must be positive")
        return np.stack([self.sample(i) for i in range(count)])


@dataclass(frozen=True)
class FgwProcess:
    """Factor-graph-wise stationary process defined by a 2-D polynomial kernel."""

    kernel: PolyKernel2D

    def gains(self, b1: EigenBasis, b2: EigenBasis) -> np.ndarray:
        """Per-frequency spectral gain matrix Psi1 H Psi2^T."""
        H = self.kernel.H
        psi1 = vandermonde(b1.values, H.shape[0])
        psi2 = vandermonde(b2.values, H.shape[1])
        return psi1 @ H @ psi2.T


@dataclass(frozen=True)
class DirectionalProcess:
    """Directionally stationary process: polynomial along one factor.

    For direction 1 the coefficients are n1 matrices of size n2 x n2 in
    X = sum_s L1^s Z H_s; for direction 2 they are n2 matrices of size
    n1 x n1 in X = sum_s H_s Z L2^s.
    """

    direction: int
    Hs: np.ndarray  # (count, k, k) stack of coefficient matrices

    def __post_init__(self):
        Hs = np.asarray(self.Hs, dtype=np.float64)
        if Hs.ndim != 3 or Hs.shape[1] != Hs.shape[2]:
            raise SamplingError(f"coefficient stack must be (count, k, k), got {Hs.shape}")
        if self.direction not in (1, 2):
            raise SamplingError(f"direction must be 1 or 2, got {self.direction}")
        object.__setattr__(self, "Hs", Hs)

    def half_gains(self, basis: EigenBasis) -> np.ndarray:
        """Stack of per-frequency matrices Htilde_k = sum_s lambda_k^s H_s."""
        psi = vandermonde(basis.values, self.Hs.shape[0])
        return np.tensordot(psi, self.Hs, axes=(1, 0))  # (n, k, k)


@dataclass(frozen=True)
class CovTensor:
    """Empirical 4-index covariance of 2-D sample matrices."""

    values: np.ndarray  # (n1, n2, n1, n2)
    m: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[:2]

    def as_matrix(self) -> np.ndarray:
        n1, n2 = self.shape
        return self.values.reshape(n1 * n2, n1 * n2)


@dataclass(frozen=True)
class DiagnosticReport:
    """Normalized test statistic with its threshold and verdict.

    Composite tests carry their parts in `sub`; the composite statistic is
    the worst sub-statistic and the verdict requires every part to pass.
    """

    name: str
    statistic: float
    threshold: float
    verdict: bool
    m: int | None = None
    vacuous: bool = False
    sub: tuple["DiagnosticReport", ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "verdict": "pass" if self.verdict else "fail",
        }
        if self.m is not None:
            d["samples"] = self.m
        if self.vacuous:
            d["vacuous"] = True
        if self.sub:
            d["sub"] = [r.to_dict() for r in self.sub]
        return d


def default_mc_tol(m: int) -> float:
    """Default Monte-Carlo threshold for normalized off-diagonal statistics."""
    return 5.0 / np.sqrt(m)


def _as_batch(samples) -> np.ndarray:
    batch = np.asarray(samples)
    if batch.ndim != 3:
        raise DimensionError(f"expected a stack of 2-D samples, got shape {batch.shape}")
    return batch


def _check_paths(vertex: np.ndarray, spectral: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.abs(vertex).max(initial=0.0)))
    err = float(np.abs(vertex - spectral).max())
    if err > PATH_AGREE_TOL * scale:
        raise SamplingError(f"{what}: vertex and spectral paths disagree by {err:g}")


def sample_fgw(proc: FgwProcess, L1: np.ndarray, L2: np.ndarray, seed: int, count: int,
               distribution: str = "gaussian", check: bool = True) -> list[np.ndarray]:
    """Draw samples X = sum_{s1,s2} H[s1,s2] L1^s1 Z L2^s2 with fresh noise Z.

    Every sample is also synthesized through the spectral route (gain times
    noise spectrum) and the two must agree to 1e-9; degree bounds are
    checked against the factor sizes.
    """
    L1 = np.asarray(L1, dtype=np.float64)
    L2 = np.asarray(L2, dtype=np.float64)
    n1, n2 = L1.shape[0], L2.shape[0]
    H = proc.kernel.H
    if H.shape[0] > n1 or H.shape[1] > n2:
        raise SamplingError(
            f"kernel degrees {proc.kernel.degrees} exceed factor sizes ({n1 - 1}, {n2 - 1})"
        )
    noise = WhiteNoise2D(n1, n2, seed, distribution)
    Z = noise.batch(count)

    acc = np.eye(n2)
    pow2 = [acc]
    for _ in range(H.shape[1] - 1):
        acc = acc @ L2
        pow2.append(acc)
    right = np.tensordot(H, np.stack(pow2), axes=(1, 0))  # (S1+1, n2, n2)
    X = np.zeros_like(Z)
    left = Z
    for s1 in range(H.shape[0]):
        if s1 > 0:
            left = L1 @ left
        X = X + left @ right[s1]

    if check:
        b1 = eigenbasis(L1, "laplacian")
        b2 = eigenbasis(L2, "laplacian")
        gains = proc.gains(b1, b2)
        Zhat = b1.vectors.T @ Z @ b2.vectors
        X2 = b1.vectors @ (gains * Zhat) @ b2.vectors.T
        _check_paths(X, X2, "factor-graph-wise sampler")
    return list(X)


def construct_H_from_gamma(Gamma: np.ndarray, b1: EigenBasis, b2: EigenBasis,
                           tol_distinct: float | None = None) -> FgwProcess:
    """Kernel whose process has the prescribed spectral variances Gamma.

    Solves Psi1 H Psi2^T = sqrt(Gamma), which requires both factor spectra
    to be distinct (otherwise the power matrices are singular) and Gamma
    to be entrywise nonnegative.
    """
    Gamma = np.asarray(Gamma, dtype=np.float64)
    if Gamma.shape != (b1.n, b2.n):
        raise DimensionError(f"Gamma shape {Gamma.shape}, expected ({b1.n}, {b2.n})")
    if np.any(Gamma < 0):
        raise SamplingError("Gamma must be entrywise nonnegative")
    _require_distinct(b1.values, tol_distinct, "first factor")
    _require_distinct(b2.values, tol_distinct, "second factor")
    psi1 = vandermonde(b1.values)
    psi2 = vandermonde(b2.values)
    A = np.linalg.solve(psi1, np.sqrt(Gamma))
    H = np.linalg.solve(psi2, A.T).T
    return FgwProcess(kernel=PolyKernel2D(H=H))


def _require_distinct(values: np.ndarray, tol: float | None, what: str) -> None:
    if tol is None:
        tol = default_tol_mult(values)
    gaps = np.diff(values)
    if len(values) > 1 and gaps.min() <= tol:
        raise SamplingError(f"{what} spectrum has repeated eigenvalues (min gap {gaps.min():g})")


def sample_directional(proc: DirectionalProcess, L: np.ndarray, seed: int, count: int,
                       n_other: int | None = None, distribution: str = "gaussian",
                       check: bool = True) -> list[np.ndarray]:
    """Draw directionally stationary samples.

    `L` is the Laplacian of the factor the process is polynomial in; the
    coefficient matrices act on the other index, whose size is taken from
    them. The half-spectral form (transform along the polynomial factor
    only) is evaluated as well and must match per sample.
    """
    L = np.asarray(L, dtype=np.float64)
    n = L.shape[0]
    Hs = proc.Hs
    if Hs.shape[0] != n:
        raise SamplingError(f"need exactly {n} coefficient matrices, got {Hs.shape[0]}")
    k = Hs.shape[1]
    if n_other is not None and n_other != k:
        raise DimensionError(f"coefficient matrices are {k} x {k}, expected {n_other}")

    if proc.direction == 1:
        noise = WhiteNoise2D(n, k, seed, distribution)
        Z = noise.batch(count)
        X = np.zeros_like(Z)
        left = Z
        for s in range(n):
            if s > 0:
                left = L @ left
            X = X + left @ Hs[s]
    else:
        noise = WhiteNoise2D(k, n, seed, distribution)
        Z = noise.batch(count)
        X = np.zeros_like(Z)
        right = Z
        for s in range(n):
            if s > 0:
                right = right @ L
            X = X + Hs[s] @ right

    if check:
        basis = eigenbasis(L, "laplacian")
        hg = proc.half_gains(basis)  # (n, k, k)
        if proc.direction == 1:
            Zt = basis.vectors.T @ Z  # (M, n, k)
            Xt = np.einsum("mki,kij->mkj", Zt, hg)
            X2 = basis.vectors @ Xt
        else:
            Zt = Z @ basis.vectors  # (M, k, n)
            # column form: Xt[:, :, k2] = Htilde_k2 @ Zt[:, :, k2]
            Xt = np.einsum("kij,mjk->mik", hg, Zt)
            X2 = Xt @ basis.vectors.T
        _check_paths(X, X2, "directional sampler")
    return list(X)


def construct_directional_from_gamma(Gammas, basis: EigenBasis, direction: int = 1,
                                     tol_distinct: float | None = None) -> DirectionalProcess:
    """Directional process realizing per-frequency covariances Gamma_k.

    Each Gamma_k must be symmetric positive-semidefinite; a square-root
    factor Htilde_k with Htilde_k^H Htilde_k = Gamma_k^T is taken (Cholesky
    when definite, an eigenvalue square root otherwise) and the polynomial
    coefficients are recovered by inverting the eigenvalue-power matrix,
    which requires a distinct spectrum.
    """
    Gammas = np.asarray(Gammas, dtype=np.float64)
    if Gammas.ndim != 3 or Gammas.shape[0] != basis.n or Gammas.shape[1] != Gammas.shape[2]:
        raise DimensionError(
            f"expected {basis.n} square covariance targets, got shape {Gammas.shape}"
        )
    _require_distinct(basis.values, tol_distinct, "factor")
    halves = np.empty_like(Gammas)
    for idx, G in enumerate(Gammas):
        scale = max(1.0, float(np.abs(G).max()))
        if np.abs(G - G.T).max() > 1e-10 * scale:
            raise SamplingError(f"covariance target {idx} is not symmetric")
        try:
            halves[idx] = np.linalg.cholesky(G.T).T
        except np.linalg.LinAlgError:
            w, v = np.linalg.eigh(G.T)
            if w.min() < -1e-10 * scale:
                raise SamplingError(
                    f"covariance target {idx} is not positive-semidefinite "
                    f"(eigenvalue {w.min():g})"
                ) from None
            halves[idx] = np.diag(np.sqrt(np.clip(w, 0.0, None))) @ v.T
    psi = vandermonde(basis.values)
    k = Gammas.shape[1]
    Hs = np.linalg.solve(psi, halves.reshape(basis.n, k * k)).reshape(basis.n, k, k)
    return DirectionalProcess(direction=direction, Hs=Hs)


def sample_multivariate(Hs, L: np.ndarray, seed: int, count: int,
                        distribution: str = "gaussian", check: bool = True) -> list[np.ndarray]:
    """Draw p-variate stationary samples X = sum_s L^s Z H_s.

    A p-variate signal on a graph is a 2-D signal on the product with the
    p-vertex edgeless graph, so this is exactly direction-1 directional
    sampling and shares its code path (and noise stream) bit for bit.
    """
    proc = DirectionalProcess(direction=1, Hs=np.asarray(Hs, dtype=np.float64))
    return sample_directional(proc, L, seed, count, distribution=distribution, check=check)


def spectra_of(samples, b1: EigenBasis, b2: EigenBasis) -> np.ndarray:
    """2-D spectra of a stack of samples, as one (M, n1, n2) array."""
    batch = _as_batch(samples)
    return b1.vectors.conj().T @ batch @ b2.vectors.conj()


def half_spectra_of(samples, basis: EigenBasis, direction: int) -> np.ndarray:
    """Transform each sample along one factor only."""
    batch = _as_batch(samples)
    if direction == 1:
        return basis.vectors.conj().T @ batch
    return batch @ basis.vectors.conj()


def estimate_cov(samples) -> CovTensor:
    """Mean-subtracted empirical covariance of 2-D sample matrices.

    Entry [k1, k2, l1, l2] is Cov(x[k1, k2], x[l1, l2]) over the sample
    set; Hermitian symmetry holds by construction.
    """
    batch = _as_batch(samples)
    m = batch.shape[0]
    if m < 2:
        raise SamplingError(f"need at least 2 samples, got {m}")
    n1, n2 = batch.shape[1], batch.shape[2]
    flat = batch.reshape(m, n1 * n2)
    centered = flat - flat.mean(axis=0)
    cov = centered.T @ centered.conj() / (m - 1)
    return CovTensor(values=cov.reshape(n1, n2, n1, n2), m=m)


def max_offdiag_correlation(cov: CovTensor) -> float:
    """Largest normalized off-diagonal magnitude of the flattened covariance."""
    c = cov.as_matrix()
    d = np.abs(np.diag(c)).real
    floor = 1e-12 * max(float(d.max()), 1e-300)
    denom = np.sqrt(np.outer(np.maximum(d, floor), np.maximum(d, floor)))
    ratio = np.abs(c) / denom
    np.fill_diagonal(ratio, 0.0)
    return float(ratio.max())


def test_simdiag(C: np.ndarray, U: np.ndarray, tol: float, name: str = "simdiag",
                 m: int | None = None) -> DiagnosticReport:
    """Does the basis U diagonalize C? Statistic: off-diagonal energy ratio.

    The statistic is ||offdiag(U^H C U)||_F / ||C||_F, which lies in [0, 1]
    because the rotation preserves the Frobenius norm. A zero C makes the
    ratio undefined and is reported as a vacuous pass.
    """
    C = np.asarray(C)
    U = np.asarray(U)
    if C.shape != U.shape or C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionError(f"C {C.shape} and U {U.shape} must be equal square shapes")
    total = float(np.linalg.norm(C))
    if total == 0.0:
        return DiagnosticReport(name=name, statistic=0.0, threshold=tol, verdict=True,
                                m=m, vacuous=True)
    rotated = U.conj().T @ C @ U
    off = rotated - np.diag(np.diag(rotated))
    stat = float(np.linalg.norm(off) / total)
    return DiagnosticReport(name=name, statistic=stat, threshold=tol, verdict=stat <= tol, m=m)


def _offdiag_ratio(c: np.ndarray, mask: np.ndarray) -> float:
    total = float(np.linalg.norm(c))
    if total == 0.0:
        return 0.0
    return float(np.linalg.norm(c[mask]) / total)


def _pooled_slice_simdiag(T: np.ndarray, U: np.ndarray, direction: int) -> float:
    """Pooled off-diagonal energy of all rotated slice covariances.

    direction 1 pools the n2 x n2 family Cov(x(., i2), x(., j2)) rotated by
    the given factor basis; direction 2 pools the transposed family.
    """
    n1, n2 = T.shape[0], T.shape[1]
    off_energy = 0.0
    total_energy = 0.0
    if direction == 1:
        for i2 in range(n2):
            for j2 in range(n2):
                c = T[:, i2, :, j2]
                r = U.conj().T @ c @ U
                off = r - np.diag(np.diag(r))
                off_energy += float(np.sum(np.abs(off) ** 2))
                total_energy += float(np.sum(np.abs(c) ** 2))
    else:
        for i1 in range(n1):
            for j1 in range(n1):
                c = T[i1, :, j1, :]
                r = U.conj().T @ c @ U
                off = r - np.diag(np.diag(r))
                off_energy += float(np.sum(np.abs(off) ** 2))
                total_energy += float(np.sum(np.abs(c) ** 2))
    if total_energy == 0.0:
        return 0.0
    return float(np.sqrt(off_energy / total_energy))


def _check_mc_pre(m: int, tol: float) -> None:
    if m < 2:
        raise SamplingError(f"need at least 2 samples, got {m}")
    if default_mc_tol(m) > tol:
        raise SamplingError(
            f"insufficient samples: 5/sqrt({m}) = {default_mc_tol(m):.4g} exceeds tol {tol}"
        )


def test_fgw_stationarity(samples, b1: EigenBasis, b2: EigenBasis,
                          tol: float | None = None) -> DiagnosticReport:
    """Empirical check of the three equivalent factor-graph-wise conditions.

    Condition 1 rotates every vertex-domain slice covariance by its factor
    basis (pooled off-diagonal energy); condition 2 measures off-diagonal
    energy of the spectral covariance; condition 3 rotates the flattened
    vertex covariance by the product basis. A fourth statistic reports the
    literal reading of condition 2 that only constrains index pairs
    differing in both coordinates; it does not enter the verdict.
    """
    batch = _as_batch(samples)
    m = batch.shape[0]
    if tol is None:
        tol = default_mc_tol(m)
    _check_mc_pre(m, tol)

    T = estimate_cov(batch).values
    stat1 = max(
        _pooled_slice_simdiag(T, b1.vectors, direction=1),
        _pooled_slice_simdiag(T, b2.vectors, direction=2),
    )
    cond1 = DiagnosticReport(name="condition1_slice_simdiag", statistic=stat1,
                             threshold=tol, verdict=stat1 <= tol, m=m)

    spec = estimate_cov(spectra_of(batch, b1, b2))
    cs = spec.as_matrix()
    n1, n2 = spec.shape
    k1 = np.repeat(np.arange(n1), n2)
    k2 = np.tile(np.arange(n2), n1)
    full_mask = ~np.eye(len(cs), dtype=bool)
    stat2 = _offdiag_ratio(cs, full_mask)
    cond2 = DiagnosticReport(name="condition2_spectral_uncorrelated", statistic=stat2,
                             threshold=tol, verdict=stat2 <= tol, m=m)
    strict_mask = (k1[:, None] != k1[None, :]) & (k2[:, None] != k2[None, :])
    stat2s = _offdiag_ratio(cs, strict_mask)
    literal = DiagnosticReport(name="condition2_literal_both_differ", statistic=stat2s,
                               threshold=tol, verdict=stat2s <= tol, m=m)

    cflat = T.reshape(n1 * n2, n1 * n2)
    cond3 = test_simdiag(cflat, np.kron(b1.vectors, b2.vectors), tol,
                         name="condition3_product_simdiag", m=m)

    verdicts = [cond1.verdict, cond2.verdict, cond3.verdict]
    agreement = len(set(verdicts)) == 1
    worst = max(cond1.statistic, cond2.statistic, cond3.statistic)
    return DiagnosticReport(
        name="fgw_stationarity" + ("" if agreement else " (conditions disagree)"),
        statistic=worst, threshold=tol, verdict=all(verdicts), m=m,
        sub=(cond1, cond2, cond3, literal),
    )


def test_directional_stationarity(samples, direction: int, basis: EigenBasis,
                                  tol: float | None = None) -> DiagnosticReport:
    """Empirical check of directional stationarity along one factor.

    Sub-test 1 pools the rotated slice covariances across the stationary
    direction; sub-test 2 measures the cross-frequency block energy of the
    half-spectral covariance. The two are equivalent in theory and their
    verdicts are compared.
    """
    if direction not in (1, 2):
        raise SamplingError(f"direction must be 1 or 2, got {direction}")
    batch = _as_batch(samples)
    m = batch.shape[0]
    if tol is None:
        tol = default_mc_tol(m)
    _check_mc_pre(m, tol)

    T = estimate_cov(batch).values
    stat1 = _pooled_slice_simdiag(T, basis.vectors, direction=direction)
    cond1 = DiagnosticReport(name="condition1_slice_simdiag", statistic=stat1,
                             threshold=tol, verdict=stat1 <= tol, m=m)

    half = estimate_cov(half_spectra_of(batch, basis, direction))
    ch = half.as_matrix()
    n1, n2 = half.shape
    if direction == 1:
        freq = np.repeat(np.arange(n1), n2)
    else:
        freq = np.tile(np.arange(n2), n1)
    cross_mask = freq[:, None] != freq[None, :]
    stat2 = _offdiag_ratio(ch, cross_mask)
    cond2 = DiagnosticReport(name="condition2_cross_frequency_blocks", statistic=stat2,
                             threshold=tol, verdict=stat2 <= tol, m=m)

    agreement = cond1.verdict == cond2.verdict
    return DiagnosticReport(
        name=f"directional_stationarity_g{direction}" + ("" if agreement else " (conditions disagree)"),
        statistic=max(stat1, stat2), threshold=tol,
        verdict=cond1.verdict and cond2.verdict, m=m, sub=(cond1, cond2),
    )
