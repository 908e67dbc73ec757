"""Graph Fourier transforms: 1-D, 2-D, n-D, adjacency-based, multivariate.

Signals on a product graph are stored as n1 x n2 matrices (row index runs
over the first factor). Spectra are index-addressed matrices of the same
shape carrying the two factor eigenvalue lists as annotations; keying by
eigenvalue is deliberately avoided because degenerate frequencies would
collide. `aggregate_to_1d` reproduces the eigenvalue-keyed 1-D view by
grouping sum frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, FormatError, SpectrumError
from .spectral import EigenBasis, partition_values

Signal2D = np.ndarray  # real (n1, n2) matrix; validated at function entry


@dataclass(frozen=True)
class Spectrum2D:
    """Index-addressed 2-D spectrum with its factor eigenvalue annotations."""

    values: np.ndarray  # (n1, n2), real or complex
    lambdas1: np.ndarray
    lambdas2: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def power(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def total_power(self) -> float:
        return float(np.sum(self.power()))


@dataclass(frozen=True)
class SpectralGroup:
    frequency: float  # representative sum frequency
    power: float
    members: list[tuple[int, int]]


@dataclass(frozen=True)
class SpectrumGroup1D:
    """2-D spectrum aggregated over coincident sum frequencies."""

    groups: list[SpectralGroup]

    def frequencies(self) -> np.ndarray:
        return np.array([g.frequency for g in self.groups])

    def powers(self) -> np.ndarray:
        return np.array([g.power for g in self.groups])


def _check_signal(f: np.ndarray, n: int | tuple[int, ...], what: str = "signal") -> np.ndarray:
    f = np.asarray(f)
    shape = (n,) if isinstance(n, int) else tuple(n)
    if f.shape != shape:
        raise DimensionError(f"{what} has shape {f.shape}, expected {shape}")
    if not np.all(np.isfinite(f)):
        raise DimensionError(f"{what} has non-finite entries")
    return f


def gft_1d(f: np.ndarray, basis: EigenBasis) -> np.ndarray:
    """Expansion coefficients of f in the eigenbasis: fhat_k = <f, u_k>."""
    f = _check_signal(f, basis.n)
    return basis.vectors.conj().T @ f


def inverse_gft_1d(fhat: np.ndarray, basis: EigenBasis) -> np.ndarray:
    fhat = _check_signal(fhat, basis.n, "spectrum")
    return basis.vectors @ fhat


def gft_2d(f: Signal2D, b1: EigenBasis, b2: EigenBasis) -> Spectrum2D:
    """2-D transform on a product graph: Fhat = U1^H F conj(U2)."""
    f = _check_signal(f, (b1.n, b2.n))
    fhat = b1.vectors.conj().T @ f @ b2.vectors.conj()
    return Spectrum2D(values=fhat, lambdas1=b1.values, lambdas2=b2.values)


def inverse_gft_2d(s: Spectrum2D, b1: EigenBasis, b2: EigenBasis) -> Signal2D:
    """Inverse 2-D transform: F = U1 Fhat U2^T."""
    if s.values.shape != (b1.n, b2.n):
        raise DimensionError(f"spectrum shape {s.values.shape} does not match bases ({b1.n}, {b2.n})")
    return b1.vectors @ s.values @ b2.vectors.T


def gft_nd(f: np.ndarray, bases: list[EigenBasis]) -> np.ndarray:
    """n-D transform: apply each factor's analysis operator along its axis.

    Factors are applied left to right, matching the left-associated product
    ((G1 x G2) x ... x Gn); for n = 2 this coincides with `gft_2d` and for
    n = 1 with `gft_1d`.
    """
    if len(bases) < 1:
        raise DimensionError("need at least one basis")
    f = _check_signal(f, tuple(b.n for b in bases))
    out = np.asarray(f)
    for axis, b in enumerate(bases):
        out = np.moveaxis(np.tensordot(b.vectors.conj().T, out, axes=(1, axis)), 0, axis)
    return out


def inverse_gft_nd(fhat: np.ndarray, bases: list[EigenBasis]) -> np.ndarray:
    if len(bases) < 1:
        raise DimensionError("need at least one basis")
    expected = tuple(b.n for b in bases)
    fhat = np.asarray(fhat)
    if fhat.shape != expected:
        raise DimensionError(f"spectrum shape {fhat.shape}, expected {expected}")
    out = fhat
    for axis, b in enumerate(bases):
        out = np.moveaxis(np.tensordot(b.vectors, out, axes=(1, axis)), 0, axis)
    return out


def _require_adjacency(b: EigenBasis, name: str) -> None:
    if b.source != "adjacency":
        raise SpectrumError(f"{name} must be built from an adjacency matrix, got source={b.source!r}")


def adjacency_gft_2d(f: Signal2D, w1: EigenBasis, w2: EigenBasis) -> Spectrum2D:
    """2-D transform in the factor adjacency eigenbases.

    The adjacency-based transform is defined through its synthesis
    equation; with symmetric adjacency matrices the analysis operator is
    the adjoint, so the matrix form matches the Laplacian-based one.
    """
    _require_adjacency(w1, "w1")
    _require_adjacency(w2, "w2")
    f = _check_signal(f, (w1.n, w2.n))
    fhat = w1.vectors.conj().T @ f @ w2.vectors.conj()
    return Spectrum2D(values=fhat, lambdas1=w1.values, lambdas2=w2.values)


def inverse_adjacency_gft_2d(s: Spectrum2D, w1: EigenBasis, w2: EigenBasis) -> Signal2D:
    _require_adjacency(w1, "w1")
    _require_adjacency(w2, "w2")
    if s.values.shape != (w1.n, w2.n):
        raise DimensionError(f"spectrum shape {s.values.shape} does not match bases ({w1.n}, {w2.n})")
    return w1.vectors @ s.values @ w2.vectors.T


def aggregate_to_1d(s: Spectrum2D, tol_mult: float) -> SpectrumGroup1D:
    """Group 2-D spectral power by coincident sum frequency lam1 + lam2.

    This reproduces the product-graph 1-D spectrum view. Group powers are
    invariant under re-basis inside degenerate eigenspaces, and their sum
    equals the total spectral power.
    """
    if tol_mult <= 0:
        raise SpectrumError(f"tol_mult must be positive, got {tol_mult}")
    n1, n2 = s.shape
    sums = np.add.outer(s.lambdas1, s.lambdas2).ravel()
    power = s.power().ravel()
    order = np.argsort(sums, kind="stable")
    idx_groups = partition_values(sums[order], tol_mult)
    groups = []
    for g in idx_groups:
        flat = order[g]
        members = [(int(v // n2), int(v % n2)) for v in flat]
        groups.append(
            SpectralGroup(
                frequency=float(np.mean(sums[flat])),
                power=float(np.sum(power[flat])),
                members=members,
            )
        )
    total = float(np.sum(power))
    grouped = sum(g.power for g in groups)
    if abs(grouped - total) > 1e-10 * max(1.0, total):
        raise SpectrumError("grouped power does not match total spectral power")
    return SpectrumGroup1D(groups=groups)


def aggregate_to_csv(grouped: SpectrumGroup1D) -> str:
    """CSV rows (frequency, power, size) of the 1-D aggregated view."""
    lines = ["frequency,power,size"]
    lines += [f"{g.frequency!r},{g.power!r},{len(g.members)}" for g in grouped.groups]
    return "\n".join(lines) + "\n"


def group_power_2d(s: Spectrum2D, groups1: list[list[int]], groups2: list[list[int]]) -> np.ndarray:
    """Spectral power pooled over per-axis multiplicity groups.

    Entry (a, b) sums |fhat|^2 over indices k1 in groups1[a], k2 in
    groups2[b]. Pooled powers are basis-invariant within degenerate
    eigenspaces, unlike individual spectrum entries.
    """
    p = s.power()
    out = np.empty((len(groups1), len(groups2)))
    for a, g1 in enumerate(groups1):
        for b, g2 in enumerate(groups2):
            out[a, b] = p[np.ix_(g1, g2)].sum()
    return out


def multivariate_gft(f: np.ndarray, basis: EigenBasis) -> np.ndarray:
    """Variable-wise transform of a p-variate signal: Fhat = U^H F.

    Rows index vertices, columns index variables. Equivalent to the 2-D
    transform on the product with a p-vertex edgeless graph, whose zero
    Laplacian has the standard basis as eigenvectors.
    """
    f = np.asarray(f)
    if f.ndim != 2 or f.shape[0] != basis.n:
        raise DimensionError(f"signal shape {f.shape} does not match basis size {basis.n}")
    if not np.all(np.isfinite(f)):
        raise DimensionError("signal has non-finite entries")
    return basis.vectors.conj().T @ f


def inverse_multivariate_gft(fhat: np.ndarray, basis: EigenBasis) -> np.ndarray:
    fhat = np.asarray(fhat)
    if fhat.ndim != 2 or fhat.shape[0] != basis.n:
        raise DimensionError(f"spectrum shape {fhat.shape} does not match basis size {basis.n}")
    return basis.vectors @ fhat


def signal_to_csv(f: Signal2D) -> str:
    """Plain CSV, n1 rows by n2 columns, shortest round-trip floats."""
    f = np.asarray(f)
    if f.ndim != 2:
        raise FormatError(f"expected a 2-D signal, got ndim={f.ndim}")
    return "\n".join(",".join(repr(float(v)) for v in row) for row in f) + "\n"


def signal_from_csv(text: str) -> Signal2D:
    rows = []
    for ln, line in enumerate(text.strip().splitlines(), start=1):
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise FormatError(f"signal CSV line {ln}: {exc}") from exc
    if not rows:
        raise FormatError("signal CSV is empty")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FormatError("signal CSV rows have inconsistent lengths")
    f = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(f)):
        raise FormatError("signal CSV has non-finite entries")
    return f


def save_signal(f: Signal2D, path: str | Path) -> None:
    Path(path).write_text(signal_to_csv(f))


def load_signal(path: str | Path) -> Signal2D:
    return signal_from_csv(Path(path).read_text())


def spectrum_to_csv(s: Spectrum2D) -> str:
    """CSV rows (k1, k2, lambda1, lambda2, re, im, power) in index order."""
    lines = ["k1,k2,lambda1,lambda2,re,im,power"]
    vals = s.values
    for k1 in range(vals.shape[0]):
        for k2 in range(vals.shape[1]):
            v = complex(vals[k1, k2])
            lines.append(
                f"{k1},{k2},{float(s.lambdas1[k1])!r},{float(s.lambdas2[k2])!r},"
                f"{v.real!r},{v.imag!r},{abs(v) ** 2!r}"
            )
    return "\n".join(lines) + "\n"


def spectrum_from_csv(text: str) -> Spectrum2D:
    lines = text.strip().splitlines()
    if not lines or lines[0] != "k1,k2,lambda1,lambda2,re,im,power":
        raise FormatError("spectrum CSV missing expected header")
    entries = []
    for ln, line in enumerate(lines[1:], start=2):
        tok = line.split(",")
        if len(tok) != 7:
            raise FormatError(f"spectrum CSV line {ln}: expected 7 columns")
        try:
            entries.append((int(tok[0]), int(tok[1]), float(tok[2]), float(tok[3]),
                            float(tok[4]), float(tok[5])))
        except ValueError as exc:
            raise FormatError(f"spectrum CSV line {ln}: {exc}") from exc
    n1 = 1 + max(e[0] for e in entries)
    n2 = 1 + max(e[1] for e in entries)
    if len(entries) != n1 * n2:
        raise FormatError(f"spectrum CSV has {len(entries)} rows, expected {n1 * n2}")
    vals = np.zeros((n1, n2), dtype=np.complex128)
    lam1 = np.zeros(n1)
    lam2 = np.zeros(n2)
    for k1, k2, l1, l2, re, im in entries:
        vals[k1, k2] = complex(re, im)
        lam1[k1] = l1
        lam2[k2] = l2
    if np.all(vals.imag == 0.0):
        vals = vals.real
    return Spectrum2D(values=vals, lambdas1=lam1, lambdas2=lam2)


def save_spectrum(s: Spectrum2D, path: str | Path) -> None:
    Path(path).write_text(spectrum_to_csv(s))


def load_spectrum(path: str | Path) -> Spectrum2D:
    return spectrum_from_csv(Path(path).read_text())
