"""Acceptance gate: one test per criterion, at the stated tolerances.

Each test prints a single pass line (visible with pytest -s) and enforces
its runtime budget. Tolerances are pinned here and must not be loosened.
"""

import time

import numpy as np
import pytest

import mdgsp as M
from mdgsp import test_directional_stationarity as directional_report
from mdgsp import test_fgw_stationarity as fgw_report
from mdgsp.bench import bench_sizes

from helpers import distinct_spectrum_graph, laplacian_basis, random_graph


class budget:
    """Context guard asserting the criterion finished inside its budget."""

    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is not None:
            print(f"criterion {self.name}: FAIL ({elapsed:.2f}s)")
            return False
        assert elapsed < self.seconds, (
            f"{self.name} exceeded its {self.seconds}s budget: {elapsed:.1f}s"
        )
        print(f"criterion {self.name}: PASS ({elapsed:.2f}s)")
        return False


def test_criterion_01_kronecker_structure():
    with budget("1 kronecker-structure", 5.0):
        rng = np.random.default_rng(1001)
        for _ in range(200):
            g1 = random_graph(rng, int(rng.integers(2, 7)))
            g2 = random_graph(rng, int(rng.integers(2, 7)))
            pg = M.cartesian_product(g1, g2)
            m1, m2 = M.matrices(g1), M.matrices(g2)
            i1, i2 = np.eye(g1.n), np.eye(g2.n)
            # materialized product Laplacian equals the Kronecker sum exactly
            left = M.matrices(pg).L
            right = np.kron(m1.L, i2) + np.kron(i1, m2.L)
            assert np.array_equal(left, right)
            # weight rule, checked independently of the kron construction
            for v in range(pg.graph.n):
                a1, a2 = pg.vertex_pair(v)
                for u in range(pg.graph.n):
                    b1, b2 = pg.vertex_pair(u)
                    expected = (g1.w[a1, b1] if a2 == b2 else 0.0) + (
                        g2.w[a2, b2] if a1 == b1 else 0.0)
                    assert pg.graph.w[v, u] == expected
            # spectrum of the product equals the multiset of frequency sums
            got = np.linalg.eigvalsh(left)
            sums = np.sort(np.add.outer(
                np.linalg.eigvalsh(m1.L), np.linalg.eigvalsh(m2.L)).ravel())
            assert np.abs(got - sums).max() <= 1e-8


def test_criterion_02_transform_equivalence():
    with budget("2 transform-equivalence", 10.0):
        rng = np.random.default_rng(1002)
        done = 0
        while done < 100:
            g1 = distinct_spectrum_graph(rng, int(rng.integers(3, 7)))
            g2 = distinct_spectrum_graph(rng, int(rng.integers(3, 7)))
            b1, b2 = laplacian_basis(g1), laplacian_basis(g2)
            big = np.kron(b1.vectors, b2.vectors)
            for _ in range(10):
                f = rng.standard_normal((g1.n, g2.n))
                s = M.gft_2d(f, b1, b2)
                flat = big.T @ f.reshape(-1)
                assert np.abs(s.values.reshape(-1) - flat).max() <= 1e-9
                done += 1


def test_criterion_03_round_trip_and_parseval():
    with budget("3 round-trip-parseval", 10.0):
        rng = np.random.default_rng(1003)
        g1 = M.standard_graph("path", 5)
        g2 = M.standard_graph("wheel", 6)
        g3 = M.standard_graph("cycle", 4)
        b1, b2, b3 = (laplacian_basis(g) for g in (g1, g2, g3))
        w1 = M.eigenbasis(M.matrices(g1).W, "adjacency")
        w2 = M.eigenbasis(M.matrices(g2).W, "adjacency")
        for _ in range(100):
            f = rng.standard_normal(5)
            fh = M.gft_1d(f, b1)
            assert np.abs(M.inverse_gft_1d(fh, b1) - f).max() <= 1e-10
            assert abs(np.linalg.norm(f) - np.linalg.norm(fh)) <= 1e-10

            f = rng.standard_normal((5, 6))
            s = M.gft_2d(f, b1, b2)
            assert np.abs(M.inverse_gft_2d(s, b1, b2) - f).max() <= 1e-10
            assert abs(np.linalg.norm(f) - np.linalg.norm(s.values)) <= 1e-10

            f = rng.standard_normal((5, 6, 4))
            sh = M.gft_nd(f, [b1, b2, b3])
            assert np.abs(M.inverse_gft_nd(sh, [b1, b2, b3]) - f).max() <= 1e-10
            assert abs(np.linalg.norm(f) - np.linalg.norm(sh)) <= 1e-10

            f = rng.standard_normal((5, 6))
            sa = M.adjacency_gft_2d(f, w1, w2)
            assert np.abs(M.inverse_adjacency_gft_2d(sa, w1, w2) - f).max() <= 1e-10
            assert abs(np.linalg.norm(f) - np.linalg.norm(sa.values)) <= 1e-10

            f = rng.standard_normal((5, 3))
            mh = M.multivariate_gft(f, b1)
            assert np.abs(M.inverse_multivariate_gft(mh, b1) - f).max() <= 1e-10
            assert abs(np.linalg.norm(f) - np.linalg.norm(mh)) <= 1e-10


def test_criterion_04_dft_consistency():
    with budget("4 dft-consistency", 1.0):
        rng = np.random.default_rng(1004)
        g = M.standard_graph("cycle", 8)
        b = laplacian_basis(g)
        part = M.multiplicity_partition(b, 1e-8).groups
        # DFT bins grouped by the same frequencies lambda = 2 - 2cos(2 pi k / 8)
        lam_dft = 2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(8) / 8)
        dft_groups = []
        for grp in part:
            target = b.values[grp[0]]
            dft_groups.append([k for k in range(8) if abs(lam_dft[k] - target) <= 1e-9])
        assert sorted(k for grp in dft_groups for k in grp) == list(range(8))
        for _ in range(5):
            f = rng.standard_normal((8, 8))
            s = M.gft_2d(f, b, b)
            gp = M.group_power_2d(s, part, part)
            dft = np.fft.fft2(f) / 8.0  # unitary normalization
            dft_power = np.abs(dft) ** 2
            for a, ga in enumerate(dft_groups):
                for c, gc in enumerate(dft_groups):
                    oracle = dft_power[np.ix_(ga, gc)].sum()
                    assert abs(gp[a, c] - oracle) <= 1e-9 * max(oracle, 1e-12)


def test_criterion_05_directional_variation_identity():
    with budget("5 directional-variation", 5.0):
        rng = np.random.default_rng(1005)
        g1 = M.standard_graph("path", 5)
        g2 = M.standard_graph("wheel", 9)
        b1, b2 = laplacian_basis(g1), laplacian_basis(g2)
        for _ in range(100):
            f = rng.standard_normal((5, 9))
            for d in (1, 2):
                rep = M.total_directional_variation(f, g1, g2, d, b1, b2)
                scale = max(1.0, abs(rep.total))
                assert abs(rep.total - rep.trace_total) <= 1e-8 * scale
                assert abs(rep.total - rep.spectral_total) <= 1e-8 * scale


def test_criterion_06_polynomial_filtering_and_locality():
    with budget("6 filter-equivalence-locality", 10.0):
        rng = np.random.default_rng(1006)
        g1 = M.standard_graph("path", 4)
        g2 = M.standard_graph("path", 5)
        pg = M.cartesian_product(g1, g2)
        L1, L2 = M.matrices(g1).L, M.matrices(g2).L
        b1, b2 = laplacian_basis(g1), laplacian_basis(g2)
        for _ in range(50):
            s1 = int(rng.integers(1, 4))
            s2 = int(rng.integers(1, 5))
            H = rng.standard_normal((s1, s2))
            H *= rng.random((s1, s2)) < 0.7
            if not H.any():
                H[0, 0] = 1.0
            k = M.PolyKernel2D(H=H)
            f = rng.standard_normal((4, 5))
            v = M.polynomial_filter_vertex(f, k, L1, L2)
            s = M.spectral_filter_2d(f, k.as_spectral(), b1, b2)
            assert np.abs(v - s).max() <= 1e-9
            for vert in [(0, 0), (1, 2), (3, 4)]:
                imp = np.zeros((4, 5))
                imp[vert] = 1.0
                out = M.polynomial_filter_vertex(imp, k, L1, L2)
                hood = M.locality_neighborhood(pg, k, vert)
                for a in range(4):
                    for c in range(5):
                        if (a, c) not in hood:
                            assert abs(out[a, c]) <= 1e-10


def test_criterion_07_ebem():
    with budget("7 ebem", 30.0):
        rng = np.random.default_rng(1007)
        g1 = M.standard_graph("path", 4)
        g2 = M.standard_graph("path", 5)
        L1, L2 = M.matrices(g1).L, M.matrices(g2).L
        for _ in range(10):
            y = rng.standard_normal((4, 5))
            gamma1, gamma2 = rng.uniform(0.1, 2.0, 2)
            params = M.EbemParams(p=2, gamma1=gamma1, gamma2=gamma2, q1=2, q2=2)
            rep = M.ebem_minimize(y, g1, g2, params)
            system = (np.eye(20) + gamma1 * np.kron(L1, np.eye(5))
                      + gamma2 * np.kron(np.eye(4), L2))
            oracle = np.linalg.solve(system, y.reshape(-1)).reshape(4, 5)
            assert np.abs(rep.minimizer - oracle).max() <= 1e-8
            grad = M.ebem_minimize(y, g1, g2, params, force_gradient=True)
            assert abs(grad.energy - rep.energy) <= 1e-4 * max(1.0, rep.energy)
        y = rng.standard_normal((4, 5))
        big = M.EbemParams(p=2, gamma1=1e6, gamma2=1e6, q1=2, q2=2)
        rep = M.ebem_minimize(y, g1, g2, big)
        assert np.abs(rep.minimizer - y.mean()).max() <= 1e-4


def test_criterion_08_stationarity_synthesis_and_tests():
    with budget("8 stationarity", 120.0):
        count = 20_000
        mc = 5.0 / np.sqrt(count)
        g1 = M.standard_graph("path", 3)
        g2 = M.standard_graph("path", 4)
        L1, L2 = M.matrices(g1).L, M.matrices(g2).L
        b1, b2 = laplacian_basis(g1), laplacian_basis(g2)

        # (a) gamma recovery
        rng = np.random.default_rng(42)
        Gamma = 0.2 + rng.random((3, 4))
        proc = M.construct_H_from_gamma(Gamma, b1, b2)
        samples = np.asarray(M.sample_fgw(proc, L1, L2, seed=7, count=count))
        spec_cov = M.estimate_cov(M.spectra_of(samples, b1, b2))
        var = np.einsum("ijij->ij", spec_cov.values)
        tol_a = 5.0 * np.sqrt(2.0 / count) * (Gamma + 0.1 * Gamma.max())
        assert np.all(np.abs(var - Gamma) <= tol_a)

        # (b) normalized off-diagonal spectral covariances
        assert M.max_offdiag_correlation(spec_cov) < mc

        # (c) the three equivalent covariance conditions agree, on
        # stationary and non-stationary data alike
        rep = fgw_report(samples, b1, b2, tol=mc * 2)
        verdicts = [r.verdict for r in rep.sub[:3]]
        assert rep.verdict and len(set(verdicts)) == 1
        broken = M.WhiteNoise2D(3, 4, seed=77).batch(count).copy()
        broken[:, 0, :] = 0.0
        rep_bad = fgw_report(broken, b1, b2, tol=mc * 2)
        bad_verdicts = [r.verdict for r in rep_bad.sub[:3]]
        assert not rep_bad.verdict and len(set(bad_verdicts)) == 1

        # (d) directional targets recovered
        rng_d = np.random.default_rng(29)
        targets = np.stack([a @ a.T + 0.3 * np.eye(4)
                            for a in rng_d.standard_normal((3, 4, 4))])
        dproc = M.construct_directional_from_gamma(targets, b1)
        dsamples = np.asarray(M.sample_directional(dproc, L1, seed=31, count=count))
        half_cov = M.estimate_cov(M.half_spectra_of(dsamples, b1, 1))
        for k1 in range(3):
            got = half_cov.values[k1, :, k1, :]
            G = targets[k1]
            tol_d = 5.0 * np.sqrt((np.outer(np.diag(G), np.diag(G)) + G**2) / count)
            assert np.all(np.abs(got - G) <= tol_d)
        assert directional_report(dsamples, 1, b1, tol=mc * 2).verdict


def test_criterion_09_multivariate_consistency():
    with budget("9 multivariate", 60.0):
        count = 20_000
        g = M.standard_graph("cycle", 6)
        L = M.matrices(g).L
        rng = np.random.default_rng(123)
        Hs = np.zeros((6, 3, 3))
        Hs[0] = np.eye(3)
        Hs[1] = 0.3 * rng.standard_normal((3, 3))
        Hs[2] = 0.15 * rng.standard_normal((3, 3))

        mv = M.sample_multivariate(Hs, L, seed=97, count=count)
        # bit-for-bit correspondence with direction-1 sampling on G x K_p
        direct = M.sample_directional(M.DirectionalProcess(1, Hs), L, seed=97,
                                      count=count)
        assert np.array_equal(np.asarray(mv), np.asarray(direct))

        # empirical circulant structure of Cov(x_a, x_b)
        cov = M.estimate_cov(np.asarray(mv))
        maxdiag = max(cov.values[i, a, i, a] for i in range(6) for a in range(3))
        worst = 0.0
        for a in range(3):
            for b in range(3):
                cab = cov.values[:, a, :, b]
                shifted = np.roll(np.roll(cab, 1, axis=0), 1, axis=1)
                worst = max(worst, float(np.abs(cab - shifted).max()) / maxdiag)
        assert worst < 5.0 / np.sqrt(count)


def test_criterion_10_performance_scaling():
    with budget("10 performance", 180.0):
        rep = bench_sizes([(256, 256)], repetitions=3)
        r = rep.results[0]
        assert r.naive_seconds is not None
        assert r.naive_seconds >= 10.0 * r.fast_seconds
        sweep = bench_sizes([(128, 128), (256, 256), (512, 512)],
                            repetitions=9, naive=False)
        assert sweep.scaling_slope is not None
        assert 1.0 / 1.5 <= sweep.scaling_slope <= 1.5
