import math

import numpy as np
import pytest
from scipy.optimize import lsq_linear

from smallslice import polytope as pt
from smallslice.errors import UndersampledError


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(1234)


def random_symmetric_polytope(n, pairs, rng, radius=1.0):
    half = rng.standard_normal((pairs, n))
    half *= radius / np.abs(np.linalg.norm(half, axis=1, keepdims=True))
    return pt.VPolytope(vertices=np.concatenate([half, -half]))


class TestVPolytopeInvariants:
    def test_requires_symmetry(self):
        verts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.5, 0.5]])
        with pytest.raises(ValueError):
            pt.VPolytope(vertices=verts)

    def test_requires_enough_vertices(self):
        with pytest.raises(ValueError):
            pt.VPolytope(vertices=np.array([[1.0, 0.0], [-1.0, 0.0]]))

    def test_circumradius_floor(self):
        with pytest.raises(ValueError):
            pt.VPolytope(vertices=np.vstack([np.eye(3), -np.eye(3)]), circumradius=0.5)

    def test_default_circumradius(self):
        p = pt.cross_polytope(4, scale=3.0)
        assert p.circumradius == pytest.approx(3.0)


class TestContains:
    def test_origin_and_vertices(self, rng):
        p = random_symmetric_polytope(4, 10, rng)
        assert pt.contains(p, np.zeros(4))
        for v in p.vertices:
            assert pt.contains(p, v)

    def test_strictly_outside_vertex_direction(self):
        p = pt.cross_polytope(5, scale=5.0)
        v = p.vertices[0]
        assert not pt.contains(p, 1.0001 * v)
        assert pt.contains(p, 0.9999 * v)

    def test_random_convex_combinations(self, rng):
        # oracle: build the certificate lambda directly
        p = random_symmetric_polytope(5, 12, rng)
        for _ in range(200):
            lam = rng.random(p.n_vertices)
            lam /= lam.sum()
            x = lam @ p.vertices
            assert pt.contains(p, x)

    def test_agrees_with_reference_solver(self, rng):
        # bounded least squares as an independent feasibility oracle
        p = random_symmetric_polytope(4, 8, rng)
        a = np.vstack([p.vertices.T, np.ones(p.n_vertices)])
        for _ in range(200):
            x = rng.standard_normal(4) * rng.random()
            ref = lsq_linear(a, np.concatenate([x, [1.0]]), bounds=(0, np.inf), tol=1e-13)
            ref_inside = np.linalg.norm(a @ ref.x - np.concatenate([x, [1.0]])) <= 1e-8
            assert pt.contains(p, x) == ref_inside

    def test_monotone_in_scale(self, rng):
        p = random_symmetric_polytope(3, 8, rng)
        for _ in range(100):
            x = rng.standard_normal(3)
            inside = [pt.contains(p, x, scale=s) for s in (0.5, 1.0, 2.0, 4.0)]
            # once inside, stays inside at larger scales
            assert all(b or not a for a, b in zip(inside, inside[1:]))

    def test_symmetric_in_x(self, rng):
        p = random_symmetric_polytope(4, 9, rng)
        for _ in range(100):
            x = rng.standard_normal(4)
            assert pt.contains(p, x) == pt.contains(p, -x)

    def test_dimension_mismatch(self):
        p = pt.cross_polytope(3)
        with pytest.raises(ValueError):
            pt.contains(p, np.zeros(4))
        with pytest.raises(ValueError):
            pt.contains(p, np.zeros(3), scale=0.0)


class TestContainsBall:
    def test_cross_polytope_contains_sqrt_n_ball(self, rng):
        n = 4
        p = pt.cross_polytope(n, scale=float(n))
        assert pt.contains_ball_check(p, math.sqrt(n), 2000, rng)

    def test_radius_beyond_circumradius_fails(self, rng):
        n = 4
        p = pt.cross_polytope(n, scale=float(n))
        assert not pt.contains_ball_check(p, n + 1e-6, 50, rng)

    def test_zero_radius(self, rng):
        p = pt.cross_polytope(3)
        assert pt.contains_ball_check(p, 0.0, 10, rng)


class TestVolumeEstimate:
    def test_cross_polytope_3d(self, rng):
        p = pt.cross_polytope(3)
        est = pt.volume_estimate(p, rng, 200_000)
        assert abs(est.estimate - 8.0 / 6.0) <= 3.0 * est.std_error

    def test_cube_3d(self, rng):
        est = pt.volume_estimate(pt.hypercube(3), rng, 200_000)
        assert abs(est.estimate - 8.0) <= 3.0 * est.std_error

    def test_scaling_homogeneity(self):
        p = pt.cross_polytope(3)
        a = pt.volume_estimate(p, np.random.default_rng(77), 50_000)
        b = pt.volume_estimate(p.scaled(2.0), np.random.default_rng(77), 50_000)
        # identical streams sample proportional points, so the ratio is exact
        assert b.estimate == pytest.approx(8.0 * a.estimate, rel=1e-12)

    def test_independent_streams_scaling(self):
        p = pt.cross_polytope(3)
        a = pt.volume_estimate(p, np.random.default_rng(7), 150_000)
        b = pt.volume_estimate(p.scaled(2.0), np.random.default_rng(8), 150_000)
        pooled = math.hypot(8.0 * a.std_error, b.std_error)
        assert abs(b.estimate - 8.0 * a.estimate) <= 3.0 * pooled

    def test_trials_floor(self, rng):
        with pytest.raises(ValueError):
            pt.volume_estimate(pt.cross_polytope(3), rng, 5000)

    def test_undersampled_guard(self, rng):
        # a needle: cross-polytope squashed to 1e-3 in all but one axis,
        # with two far vertices forcing a huge circumscribed ball
        eye = np.eye(6) * 1e-3
        eye[0, 0] = 10.0
        verts = np.concatenate([eye, -eye])
        needle = pt.VPolytope(vertices=verts)
        with pytest.raises(UndersampledError):
            pt.volume_estimate(needle, rng, 20_000)


class TestGluskinRatio:
    def test_definition(self):
        # vol^{1/n} equal to sqrt(log(m/n)) normalizes the ratio to 1
        assert pt.gluskin_ratio(3, 6, math.log(2.0) ** 1.5) == pytest.approx(1.0, rel=1e-12)

    def test_cross_polytope_value(self):
        # scaled cross polytope in n B_n: vol = (2n)^n / n!, m = 2n vertices;
        # oracle via Stirling: (n!)^{1/n} ~= (n/e) (2 pi n)^{1/(2n)}
        n = 8
        vol = (2.0 * n) ** n / math.factorial(n)
        ratio = pt.gluskin_ratio(n, 2 * n, vol)
        stirling_root = (n / math.e) * (2.0 * math.pi * n) ** (1.0 / (2 * n))
        oracle = (2.0 * n / stirling_root) / math.sqrt(math.log(2.0))
        assert ratio == pytest.approx(oracle, rel=0.01)
        assert ratio < 2.0 * math.e / math.sqrt(math.log(2.0)) * 1.5

    def test_sweep_bounded(self):
        # hulls of m = 4n sphere points at radius n: ratios stay within a
        # factor 3 across n; hit rates sink below 1e-3 past n = 8, so the
        # trial count (and the pilot guard) scale up there
        ratios = []
        for n in range(4, 11):
            rng = np.random.default_rng(1000 + n)
            m = 4 * n
            half = rng.standard_normal((m // 2, n))
            half *= n / np.linalg.norm(half, axis=1, keepdims=True)
            poly = pt.VPolytope(vertices=np.concatenate([half, -half]), circumradius=float(n))
            trials = 150_000 if n <= 8 else 1_000_000
            est = pt.volume_estimate(poly, rng, trials, pilot=trials // 20)
            ratios.append(pt.gluskin_ratio(n, m, est.estimate))
        assert max(ratios) / min(ratios) < 3.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            pt.gluskin_ratio(3, 3, 1.0)
        with pytest.raises(ValueError):
            pt.gluskin_ratio(3, 7, 0.0)


def test_every_vertex_inside(rng):
    p = random_symmetric_polytope(6, 20, rng, radius=2.5)
    for v in p.vertices:
        assert pt.contains(p, v, scale=1.0)


def test_json_round_trip(rng):
    import json

    p = random_symmetric_polytope(3, 8, rng)
    back = pt.VPolytope.from_dict(json.loads(json.dumps(p.to_dict())))
    assert np.array_equal(back.vertices, p.vertices)
    assert back.circumradius == p.circumradius
