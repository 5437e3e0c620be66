"""Oracle dispatch, both flow cases, direction machinery, certificates."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hyperspars.flownet import FlowAssignment
from hyperspars.oracle import (
    DualCertificate,
    OracleConfig,
    OracleFailure,
    ball,
    case1,
    certificate_check,
    certificate_hypergraph,
    direction_split,
    find_violated_path,
    path_triangles,
    path_violation,
    preprocess_wellspread,
    run_oracle,
)
from hyperspars.reference import GeneratorSpec, brute_force_sparsest, generate
from hyperspars.sdpcore import GramState, Side, TriangleId, mat_K, mat_T, spectral_norm

from conftest import integral_state, make_h, normalized_state, random_hypergraph


def planted():
    h = generate(
        GeneratorSpec(
            n=8, m=12, model="planted-cut", balance=0.5,
            inside_w=4, crossing_w=Fraction(1, 20), seed=5,
        )
    )
    s_star, theta = brute_force_sparsest(h)
    assert theta > 0
    return h, s_star, theta


def expanderish():
    h = generate(GeneratorSpec(n=6, m=10, model="expander-like", seed=9))
    _, theta = brute_force_sparsest(h)
    assert theta > 0
    return h, theta


class TestConfig:
    def test_beta_consistency(self):
        cfg = OracleConfig()
        assert cfg.beta == pytest.approx(
            32 * cfg.c_path / (9 * cfg.mu * cfg.s_viol * cfg.c_frac)
        )
        assert cfg.eta_stretch == pytest.approx(cfg.mu * cfg.s_viol / (4 * cfg.c_path))

    def test_n_dirs_default(self):
        cfg = OracleConfig()
        assert cfg.n_dirs_for(2) == 8
        assert cfg.n_dirs_for(9) == 8 * 4
        assert OracleConfig(n_dirs=3).n_dirs_for(9) == 3

    def test_rho_formula(self):
        h = make_h(4, [({0}, {1}, 1)], weights=[1, 2, 1, 1])
        cfg = OracleConfig()
        expected = 16.0 * 0.5 * 5**2 * math.sqrt(math.log2(2 * 4))
        assert cfg.rho(0.5, h) == pytest.approx(expected)


class TestBall:
    def test_radius_zero_collects_coincident(self, rng):
        v = np.array([[0.0], [0.0], [1.0]])
        st = GramState(v @ v.T, v)
        assert ball(st, 0, 0.0) == {0, 1}

    def test_radius_beyond_diameter_is_everything(self, rng):
        h = random_hypergraph(rng, n=5)
        st = normalized_state(rng, h)
        assert ball(st, 2, 1e6) == frozenset(range(5))

    def test_matches_exhaustive_definition(self, rng):
        h = random_hypergraph(rng, n=6)
        st = normalized_state(rng, h)
        for i in range(6):
            r = float(rng.uniform(0, 2))
            expected = frozenset(
                j for j in range(6) if st.dist2(i, j) <= r * r
            )
            assert ball(st, i, r) == expected


class TestDispatch:
    def test_integral_state_goes_to_case1(self):
        h, s_star, theta = planted()
        st = integral_state(h, s_star)
        out = run_oracle(2 * float(theta), st, h, OracleConfig(), np.random.default_rng(0))
        assert out.case.startswith("1")

    def test_unnormalized_rejected(self):
        h, s_star, _ = planted()
        st = integral_state(h, s_star)
        bad = GramState(st.x * 0.5, st.vectors * math.sqrt(0.5), st.side)
        with pytest.raises(ValueError, match="not normalized"):
            run_oracle(1.0, bad, h, OracleConfig(), np.random.default_rng(0))

    def test_nonpositive_alpha_rejected(self):
        h, s_star, _ = planted()
        st = integral_state(h, s_star)
        with pytest.raises(ValueError):
            run_oracle(0.0, st, h)

    def test_spread_state_goes_to_case2(self, rng):
        h, _ = expanderish()
        st = normalized_state(rng, h, dim=6)
        out = run_oracle(0.5, st, h, OracleConfig(), rng)
        assert out.case.startswith("2")

    def test_exactly_one_case_predicate(self, rng):
        # ball test is a total predicate: preprocessing requires exactly
        # the complement of the case-1 condition
        for _ in range(20):
            h = random_hypergraph(rng, max_n=7)
            st = normalized_state(rng, h)
            omega = np.array(h.vertex_weights, float)
            total = float(h.total_weight)
            d2 = st.pairwise_dist2()
            ballw = (d2 <= 1.0 / (8 * total * total)) @ omega
            concentrated = ballw.max() >= total / 4.0
            if concentrated:
                with pytest.raises(ValueError):
                    preprocess_wellspread(st, h)
            else:
                s, i0 = preprocess_wellspread(st, h)
                assert i0 in s


class TestCase1:
    def test_planted_optimum_recovered_at_2theta(self):
        h, s_star, theta = planted()
        st = integral_state(h, s_star)
        cfg = OracleConfig()
        alpha = 2 * float(theta)
        out = run_oracle(alpha, st, h, cfg, np.random.default_rng(0))
        assert out.kind == "cut"
        assert out.case == "1A"
        assert float(out.cut.sparsity) <= cfg.c_A * alpha
        assert out.cut.sparsity >= theta
        assert out.cut.subset == s_star

    def test_gamma_bounded_by_three(self, rng):
        for _ in range(25):
            h = random_hypergraph(rng, max_n=8)
            st = normalized_state(rng, h, dim=1)  # rank-1 states concentrate
            try:
                out = run_oracle(0.3, st, h, OracleConfig(), rng)
            except OracleFailure:
                continue
            if "gamma" in out.diagnostics:
                assert out.diagnostics["gamma"] <= 3.0 + 1e-9

    def test_dual_branch_at_small_alpha(self):
        h, theta = expanderish()
        st = integral_state(h, frozenset({0, 1, 2}))
        cfg = OracleConfig()
        alpha = 0.002
        out = run_oracle(alpha, st, h, cfg, np.random.default_rng(0))
        assert out.kind == "dual"
        assert out.case == "1B"
        ok, report = certificate_check(out.dual, alpha, st, h, cfg.rho(alpha, h))
        assert ok, report

    def test_dual_dot_reduces_to_demand_bound(self):
        # with K . X = 1, the dual dot bullet is exactly D . X >= alpha
        h, theta = expanderish()
        st = integral_state(h, frozenset({0, 1, 2}))
        alpha = 0.002
        out = run_oracle(alpha, st, h, OracleConfig(), np.random.default_rng(0))
        cert = out.dual
        k = mat_K(h.vertex_weights)
        t_sum = sum(
            (f * mat_T(h.n, tri) for tri, f in cert.triangle_weights.items()),
            np.zeros((h.n, h.n)),
        )
        lhs = float(np.tensordot(t_sum + cert.z * k, st.x))
        f_dot = float(np.tensordot(cert.flow_matrix_dense(h.n), st.x))
        d_dot = f_dot - float(np.tensordot(t_sum, st.x))
        assert lhs <= f_dot + 1e-7
        assert d_dot >= alpha - 1e-9

    def test_precondition_checked(self, rng):
        h, _ = expanderish()
        st = normalized_state(rng, h, dim=6)  # well spread
        with pytest.raises(ValueError, match="concentrated"):
            case1(0.5, st, h, OracleConfig())


class TestPreprocess:
    def test_bullets_on_simplex_like_state(self, rng):
        for _ in range(30):
            h = random_hypergraph(rng, max_n=8, max_m=5)
            st = normalized_state(rng, h, dim=h.n)
            total = float(h.total_weight)
            omega = np.array(h.vertex_weights, float)
            d2 = st.pairwise_dist2()
            if ((d2 <= 1 / (8 * total * total)) @ omega).max() >= total / 4:
                continue
            s, i0 = preprocess_wellspread(st, h)
            members = sorted(s)
            assert sum(h.vertex_weights[v] for v in members) >= total / 2
            assert all(st.dist2(i0, i) <= 9 / total**2 + 1e-12 for i in members)
            spread = sum(
                h.vertex_weights[i] * h.vertex_weights[j] * st.dist2(i, j)
                for i in members
                for j in members
                if i < j
            )
            assert spread >= 1.0 / 128.0 - 1e-9

    def test_concentrated_input_rejected(self):
        h, s_star, _ = planted()
        st = integral_state(h, s_star)
        with pytest.raises(ValueError):
            preprocess_wellspread(st, h)


class TestDirectionSplit:
    def test_antipodal_clusters_split(self, rng):
        # two clusters far apart along one axis: any direction near the
        # axis separates them (the member set is supplied directly)
        h = make_h(6, [({0}, {3}, 1)], weights=[1] * 6)
        total = 6.0
        base = np.zeros((6, 3))
        base[:3, 0] = -0.4
        base[3:, 0] = 0.4
        base += rng.normal(0, 0.02, size=base.shape)
        norm = math.sqrt(GramState(base @ base.T, base).k_dot(h.vertex_weights))
        vectors = base / norm
        st = GramState(vectors @ vectors.T, vectors)
        s, i0 = frozenset(range(6)), 0
        u_eff, left, right = direction_split(st, h, s, i0, OracleConfig(), rng)
        assert left and right
        vhat = (total / 3.0) * (st.vectors - st.vectors[i0])
        sigma = OracleConfig().sigma
        for i in left:
            for j in right:
                assert float((vhat[j] - vhat[i]) @ u_eff) >= sigma / math.sqrt(total) - 1e-12
                # directed-distance guarantee d(i, j) >= |v_i - v_j|^2
                d0 = float((vhat[i] - vhat[0]) @ (vhat[i] - vhat[0]))
                d1 = float((vhat[j] - vhat[0]) @ (vhat[j] - vhat[0]))
                assert d1 >= d0 - 1e-12

    def test_coincident_vectors_fail(self, rng):
        h = make_h(4, [({0}, {1}, 1)])
        vectors = np.ones((4, 2))
        st = GramState(vectors @ vectors.T, vectors)
        with pytest.raises(OracleFailure):
            direction_split(st, h, frozenset(range(4)), 0, OracleConfig(n_dirs=4), rng)


class TestFindViolatedPath:
    def test_collinear_chain_found_and_verified(self, rng):
        # equally spaced points along a line: hop distances shrink
        # quadratically relative to the endpoint distance
        h = make_h(7, [({0}, {1}, 1)], weights=[1] * 7)
        cfg = OracleConfig()
        # hop distance just inside the stretched-pair filter; the best
        # triple violates by only 18 delta^2 < s_viol, so only the chained
        # search can close the gap
        delta2 = 0.009
        delta = math.sqrt(delta2)
        u = np.zeros(3)
        u[0] = 1.0
        vhat = np.array([[k * delta, 0.0, 0.0] for k in range(7)])
        omega = np.ones(7)
        assert 18 * delta2 < cfg.s_viol
        path = find_violated_path(vhat, omega, {}, u, cfg, h)
        assert path is not None
        assert len(path) >= 4
        assert path_violation(vhat, path) <= -cfg.s_viol
        assert len(path) - 1 <= cfg.path_cap(h)

    def test_two_points_no_path(self, rng):
        h = make_h(2, [({0}, {1}, 1)])
        vhat = np.array([[0.0], [1.0]])
        cfg = OracleConfig()
        assert find_violated_path(vhat, np.ones(2), {}, np.ones(1), cfg, h) is None

    def test_returned_path_scales_to_triangle_sum(self, rng):
        # the path triangles evaluated on X match the rescaled violation
        h = make_h(7, [({0}, {1}, 1)], weights=[1] * 7)
        cfg = OracleConfig()
        total = float(h.total_weight)
        positions = np.array([[k / 14.0, 0.0] for k in range(7)])
        st = GramState(positions @ positions.T, positions)
        assert st.k_dot(h.vertex_weights) == pytest.approx(1.0, abs=1e-9)
        vhat = (total / 3.0) * (positions - positions[0])
        path = find_violated_path(vhat, np.ones(7), {}, np.array([1.0, 0.0]), cfg, h)
        assert path is not None
        tri_sum = sum(
            float(np.tensordot(mat_T(7, tri), st.x)) for tri in path_triangles(path)
        )
        assert tri_sum == pytest.approx(
            (9.0 / total**2) * path_violation(vhat, path), rel=1e-9
        )
        assert tri_sum <= -9.0 * cfg.s_viol / total**2


class TestCase2:
    def test_spread_state_cut_or_dual(self, rng):
        h, theta = expanderish()
        cfg = OracleConfig()
        for alpha in (0.6, 0.05, 0.004):
            st = normalized_state(rng, h, dim=6)
            out = run_oracle(alpha, st, h, cfg, rng)
            assert out.case.startswith("2")
            if out.kind == "cut":
                assert float(out.cut.sparsity) <= cfg.ratio_bound(alpha, h, out.case) * (1 + 1e-9)
            else:
                ok, rep = certificate_check(out.dual, alpha, st, h, cfg.rho(alpha, h))
                assert ok, rep

    def test_case_c_certificate_on_planted_chain(self):
        # collinear equally spaced embedding, normalized: the triangle
        # chain certificate closes the <= 0 display exactly
        h = make_h(7, [({0}, {6}, 2)], weights=[1] * 7)
        cfg = OracleConfig()
        total = float(h.total_weight)
        positions = np.array([[k / 14.0] for k in range(7)])
        st = GramState(positions @ positions.T, positions)
        path = [0, 3, 6]
        tris = path_triangles(path)
        tri_sum = sum(float(np.tensordot(mat_T(7, t), st.x)) for t in tris)
        assert tri_sum <= -9.0 * cfg.s_viol / total**2
        alpha = 0.31
        f_val = total * total * alpha / (9.0 * cfg.s_viol)
        cert = DualCertificate(alpha, {t: f_val for t in tris}, None, 0.0)
        k = mat_K(h.vertex_weights)
        width = spectral_norm(cert.residual_matrix(k))
        cert = DualCertificate(alpha, cert.triangle_weights, None, width)
        lhs = float(np.tensordot(cert.residual_matrix(k) + cert.flow_matrix_dense(7), st.x))
        assert lhs <= 0.0 + 1e-9
        ok, report = certificate_check(cert, alpha, st, h, cfg.rho(alpha, h))
        assert ok, report
        # width components: ||sum T_p|| small, ||K|| within the corollary
        t_norm = spectral_norm(sum(mat_T(7, t) for t in tris))
        assert t_norm <= cfg.c_T
        assert spectral_norm(k) <= h.kappa * total**2 / h.n + 1e-9


class TestCertificateCheck:
    def setup_cert(self):
        h, theta = expanderish()
        st = integral_state(h, frozenset({0, 1, 2}))
        alpha = 0.002
        out = run_oracle(alpha, st, h, OracleConfig(), np.random.default_rng(0))
        assert out.kind == "dual"
        return h, st, alpha, out.dual

    def test_valid_certificate_passes(self):
        h, st, alpha, cert = self.setup_cert()
        ok, _ = certificate_check(cert, alpha, st, h, OracleConfig().rho(alpha, h))
        assert ok

    def test_z_below_alpha_fails(self):
        h, st, alpha, cert = self.setup_cert()
        low = DualCertificate(alpha / 2, cert.triangle_weights, cert.flow, cert.width)
        ok, report = certificate_check(low, alpha, st, h, OracleConfig().rho(alpha, h))
        assert not ok and report["first_failure"] == "z_below_alpha"

    def test_negative_triangle_weight_fails(self):
        h, st, alpha, cert = self.setup_cert()
        tris = dict(cert.triangle_weights)
        if not tris:
            tris[TriangleId.make(0, 2, 1)] = 0.0
        key = next(iter(tris))
        tris[key] = -abs(tris[key]) - 1e-6
        bad = DualCertificate(cert.z, tris, cert.flow, cert.width)
        ok, report = certificate_check(bad, alpha, st, h, OracleConfig().rho(alpha, h))
        assert not ok and report["first_failure"] == "negative_triangle_weight"

    def test_over_capacity_flow_fails(self):
        h, st, alpha, cert = self.setup_cert()
        totals = cert.flow.per_edge_totals()
        factor = 3.0 * max(
            float(h.edges[e].weight) / 2.0 / tot for e, tot in totals.items() if tot > 0
        )
        inflated = FlowAssignment(
            tuple((e, i, j, f * factor) for e, i, j, f in cert.flow)
        )
        bad = DualCertificate(cert.z, cert.triangle_weights, inflated, cert.width)
        ok, report = certificate_check(bad, alpha, st, h, OracleConfig().rho(alpha, h))
        assert not ok and report["first_failure"] in ("flow_capacity", "dual_dot_bound")

    def test_width_budget_fails_when_rho_too_small(self):
        h, st, alpha, cert = self.setup_cert()
        ok, report = certificate_check(cert, alpha, st, h, cert.width / 2.0)
        assert not ok and report["first_failure"] == "width_bound"


class TestZeroOutSide:
    def test_cut_is_complemented_and_equal_value(self):
        h, s_star, theta = planted()
        comp = frozenset(range(h.n)) - s_star
        st = integral_state(h, comp, Side.ZERO_OUT)
        alpha = 2 * float(theta)
        out = run_oracle(alpha, st, h, OracleConfig(), np.random.default_rng(0))
        if out.kind == "cut":
            from hyperspars.hypergraph import sparsity

            assert sparsity(h, out.cut.subset) == out.cut.sparsity

    def test_certificate_refers_to_reversed_hypergraph(self, rng):
        h, theta = expanderish()
        st = integral_state(h, frozenset({3, 4, 5}), Side.ZERO_OUT)
        alpha = 0.002
        out = run_oracle(alpha, st, h, OracleConfig(), rng)
        assert out.kind == "dual"
        h_cert = certificate_hypergraph(h, "out")
        inner = GramState(st.x, st.vectors, Side.ZERO_IN)
        ok, report = certificate_check(
            out.dual, alpha, inner, h_cert, OracleConfig().rho(alpha, h)
        )
        assert ok, report


class TestOracleContractSweep:
    def test_outcomes_always_valid(self, rng):
        cfg = OracleConfig()
        cases = {}
        for _ in range(120):
            h = random_hypergraph(rng, max_n=10, max_m=8)
            side = Side.ZERO_IN if rng.integers(2) else Side.ZERO_OUT
            st = normalized_state(rng, h, side=side)
            alpha = float(rng.uniform(0.001, 2.0))
            try:
                out = run_oracle(alpha, st, h, cfg, rng)
            except OracleFailure:
                cases["fail"] = cases.get("fail", 0) + 1
                continue
            cases[out.case] = cases.get(out.case, 0) + 1
            if out.kind == "cut":
                bound = cfg.ratio_bound(alpha, h, out.case)
                assert float(out.cut.sparsity) <= bound * (1 + 1e-9)
                if out.case == "2A":
                    lo_side = min(out.diagnostics["side_weights"])
                    assert lo_side >= cfg.c_frac * h.total_weight / 4 - 1e-9
            else:
                h_eff = certificate_hypergraph(h, st.side)
                inner = GramState(st.x, st.vectors, Side.ZERO_IN)
                ok, rep = certificate_check(out.dual, alpha, inner, h_eff, cfg.rho(alpha, h))
                assert ok, rep
        assert cases.get("fail", 0) == 0
