"""
Tests for the coadjoint operator, the truncated Lie bracket and the
semi-discrete right-hand side
"""

import numpy as np
import pytest
from pydantic import ValidationError

from epdiff_spectral.dynamics import (
    CoadjointGrouping,
    DynamicsConfig,
    GeodesicState,
    ad_tilde,
    coadjoint_star,
    discrete_rhs,
    is_translation,
    jacobiator,
    lie_bracket_truncated,
    metric_energy,
    momentum,
    weak_pairing,
)
from epdiff_spectral.errors import GridMismatchError, InvalidArgumentError
from epdiff_spectral.experiments import sine_mode_field
from epdiff_spectral.spectral import (
    FourierMultiplier,
    FrequencyGrid,
    SpectralField,
    apply_multiplier,
    convolve_direct,
    convolve_fft,
    sobolev_norm,
    truncate,
)


def L_at(k, m):
    return (1.0 + 4.0 * np.pi**2 * k**2) ** m


def max_abs(f):
    return float(np.max(np.abs(f.coeffs)))


class TestDynamicsConfig:
    """Test the problem configuration"""

    def test_multipliers_are_inverse(self):
        """Test L^ R^ = 1 on Z_{d,2R}"""
        cfg = DynamicsConfig(d=2, m=3, R=4)
        xi = FrequencyGrid(d=2, R=8).frequencies()
        np.testing.assert_allclose(cfg.L_hat.evaluate(xi) * cfg.R_hat.evaluate(xi), 1.0, rtol=1e-14)

    def test_invalid_order(self):
        """Test that m >= 1 and 1 <= d <= 3 are enforced"""
        with pytest.raises(ValidationError):
            DynamicsConfig(d=2, m=0, R=4)
        with pytest.raises(ValidationError):
            DynamicsConfig(d=4, m=1, R=4)

    def test_zero_cutoff(self):
        """Test that R = 0 gives a vanishing right-hand side"""
        cfg = DynamicsConfig(d=2, m=2, R=0)
        V = SpectralField.constant(cfg.grid, [0.3, -0.7])
        rhs = discrete_rhs(V, cfg)
        assert rhs.R == 0
        assert not np.any(np.abs(rhs.coeffs) > 1e-15)

    def test_geodesic_state(self):
        """Test that a state carries P = L V"""
        cfg = DynamicsConfig(d=1, m=2, R=2)
        V = sine_mode_field(1, 2)
        state = GeodesicState.from_velocity(0.5, V, cfg)
        assert state.t == 0.5
        assert state.P.coefficient((1,)) == pytest.approx(-0.5j * L_at(1, 2), rel=1e-15)


class TestCoadjoint:
    """Test ad*_V P = div(P (x) V) + (DV)^T P"""

    def test_constant_velocity(self):
        """Test that a constant V leaves a constant P invariant"""
        grid = FrequencyGrid(d=2, R=3)
        P = SpectralField.constant(grid, [1.0, 2.0])
        V = SpectralField.constant(grid, [0.5, -0.5])
        assert not np.any(np.abs(coadjoint_star(P, V, 6).coeffs) > 1e-14)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {},
            {"grouping": CoadjointGrouping.DIVERGENCE},
            {"convolution": convolve_fft},
            {"convolution": convolve_direct},
            {"convolution": convolve_direct, "grouping": CoadjointGrouping.DIVERGENCE},
        ],
    )
    def test_single_sine(self, kwargs):
        """Test ad*_V P for V = sin(2 pi x), P = L V in one dimension

        The result is 3 pi lambda_1 sin(4 pi x), so the +-2 coefficients are
        -+ i 3 pi lambda_1 / 2.
        """
        m, R = 2, 2
        lam1 = L_at(1, m)
        V = sine_mode_field(1, R)
        P = apply_multiplier(V, FourierMultiplier.sobolev_L(m))
        result = coadjoint_star(P, V, 2 * R, **kwargs)
        expected = 3.0 * np.pi * lam1 * sine_mode_field(1, 2 * R, k=2)
        np.testing.assert_allclose(
            result.coeffs, expected.coeffs, rtol=0, atol=1e-12 * 3.0 * np.pi * lam1
        )
        assert result.coefficient((2,)) == pytest.approx(-1.5j * np.pi * lam1, rel=1e-12)

    def test_single_sine_truncated_below_output(self):
        """Test that r_out = 1 drops the doubled frequency"""
        V = sine_mode_field(1, 2)
        P = apply_multiplier(V, FourierMultiplier.sobolev_L(2))
        result = coadjoint_star(P, V, 1)
        assert max_abs(result) <= 1e-12 * L_at(1, 2)

    def test_groupings_agree(self, random_field):
        """Test both groupings and the termwise paths on random 2-D fields"""
        V = random_field(2, 4, seed=1)
        P = random_field(2, 4, seed=2)
        reference = coadjoint_star(P, V, 8, convolution=convolve_direct)
        scale = max_abs(reference)
        for kwargs in (
            {},
            {"grouping": CoadjointGrouping.DIVERGENCE},
            {"convolution": convolve_fft},
            {"convolution": convolve_fft, "grouping": CoadjointGrouping.DIVERGENCE},
        ):
            result = coadjoint_star(P, V, 8, **kwargs)
            np.testing.assert_allclose(result.coeffs, reference.coeffs, rtol=0, atol=1e-12 * scale)

    def test_three_dimensions(self, random_field):
        """Test the fast path against the direct sums in 3-D"""
        V = random_field(3, 1, seed=3)
        P = random_field(3, 1, seed=4)
        fast = coadjoint_star(P, V, 2)
        exact = coadjoint_star(P, V, 2, convolution=convolve_direct)
        np.testing.assert_allclose(fast.coeffs, exact.coeffs, rtol=0, atol=1e-12 * max_abs(exact))

    def test_argument_checks(self, random_field):
        """Test grid, component and output-cutoff validation"""
        V = random_field(2, 2)
        with pytest.raises(GridMismatchError):
            coadjoint_star(random_field(2, 3), V, 4)
        with pytest.raises(GridMismatchError):
            coadjoint_star(random_field(2, 2, ncomp=1), V, 4)
        with pytest.raises(InvalidArgumentError):
            coadjoint_star(V, V, 5)


class TestDiscreteRhs:
    """Test dV/dt = -Pi_R R ad*_V (L V)"""

    @pytest.mark.parametrize("m", [2, 3])
    @pytest.mark.parametrize("R", [2, 3, 4])
    def test_single_sine(self, m, R):
        """Test rhs(sin(2 pi x)) = -3 pi (lambda_1 / lambda_2) sin(4 pi x)"""
        cfg = DynamicsConfig(d=1, m=m, R=R)
        lam1, lam2 = L_at(1, m), L_at(2, m)
        rhs = discrete_rhs(sine_mode_field(1, R), cfg)
        amplitude = -3.0 * np.pi * lam1 / lam2
        expected = amplitude * sine_mode_field(1, R, k=2)
        assert rhs.coefficient((2,)) == pytest.approx(expected.coefficient((2,)), rel=1e-12)
        assert rhs.coefficient((-2,)) == pytest.approx(expected.coefficient((-2,)), rel=1e-12)
        np.testing.assert_allclose(
            rhs.coeffs, expected.coeffs, rtol=0, atol=1e-12 * 3.0 * np.pi * lam1
        )

    def test_single_sine_below_doubled_frequency(self):
        """Test that R = 1 truncates the whole response away"""
        cfg = DynamicsConfig(d=1, m=2, R=1)
        rhs = discrete_rhs(sine_mode_field(1, 1), cfg)
        assert max_abs(rhs) <= 1e-12 * L_at(1, 2)

    def test_energy_orthogonality(self, random_field):
        """Test <L V, rhs(V)> = 0 for random 2-D data"""
        cfg = DynamicsConfig(d=2, m=2, R=8)
        for seed in range(5):
            V = random_field(2, 8, seed=seed, decay=3.0)
            P = momentum(V, cfg)
            rhs = discrete_rhs(V, cfg)
            scale = sobolev_norm(P, 0.0) * sobolev_norm(rhs, 0.0)
            assert abs(weak_pairing(P, rhs)) <= 1e-12 * scale

    def test_weak_form_duality(self, random_field):
        """Test <dP/dt, W> + <P, ad~_V W> = 0 for 20 random pairs"""
        cfg = DynamicsConfig(d=2, m=3, R=8)
        for trial in range(20):
            V = random_field(2, 8, seed=2 * trial, decay=3.0)
            W = random_field(2, 8, seed=2 * trial + 1, decay=3.0)
            P = momentum(V, cfg)
            P_dot = momentum(discrete_rhs(V, cfg), cfg)
            adW = ad_tilde(V, W, cfg.R)
            lhs = weak_pairing(P_dot, W)
            rhs = weak_pairing(P, adW)
            scale = sobolev_norm(P, 0.0) * sobolev_norm(adW, 0.0)
            assert abs(lhs + rhs) <= 1e-10 * scale

    def test_quadratic_scaling(self, random_field):
        """Test rhs(alpha V) = alpha^2 rhs(V)"""
        cfg = DynamicsConfig(d=2, m=2, R=5)
        V = random_field(2, 5, seed=7)
        rhs = discrete_rhs(V, cfg)
        scaled = discrete_rhs(0.5 * V, cfg)
        np.testing.assert_allclose(scaled.coeffs, 0.25 * rhs.coeffs, rtol=0, atol=1e-14 * max_abs(rhs))

    def test_truncation_commutes_with_riesz(self, random_field):
        """Test Pi_R R A = R Pi_R A for the diagonal R"""
        cfg = DynamicsConfig(d=2, m=3, R=4)
        V = random_field(2, 4, seed=8)
        ad = coadjoint_star(momentum(V, cfg), V, 8)
        first = truncate(apply_multiplier(ad, cfg.R_hat), 4)
        second = apply_multiplier(truncate(ad, 4), cfg.R_hat)
        np.testing.assert_array_equal(first.coeffs, second.coeffs)

    def test_assembly_cutoff_is_immaterial(self, random_field):
        """Test assembling ad* at R instead of 2R"""
        V = random_field(2, 4, seed=9)
        full = discrete_rhs(V, DynamicsConfig(d=2, m=3, R=4))
        direct = discrete_rhs(V, DynamicsConfig(d=2, m=3, R=4, assemble_at_full=False))
        np.testing.assert_allclose(direct.coeffs, full.coeffs, rtol=0, atol=1e-12 * max_abs(full))

    def test_constant_velocity(self):
        """Test that translations are stationary"""
        cfg = DynamicsConfig(d=3, m=1, R=2)
        V = SpectralField.constant(cfg.grid, [1.0, -1.0, 0.5])
        assert is_translation(V)
        np.testing.assert_array_equal(discrete_rhs(V, cfg).coeffs, 0.0)

    def test_translation_detection(self, random_field):
        """Test that any populated nonzero mode rules out a translation"""
        grid = FrequencyGrid(d=2, R=3)
        assert is_translation(SpectralField.zeros(grid, 2))
        assert is_translation(SpectralField.constant(grid, [0.0, 2.0]))
        assert not is_translation(random_field(2, 3))
        nudged = SpectralField.constant(grid, [1.0, 1.0]).coeffs.copy()
        nudged[1, grid.enumerate((0, 1))] = 1e-300
        assert not is_translation(SpectralField(grid=grid, coeffs=nudged))

    def test_config_mismatch(self, random_field):
        """Test that V must live on the configured grid"""
        cfg = DynamicsConfig(d=2, m=2, R=4)
        with pytest.raises(GridMismatchError):
            discrete_rhs(random_field(2, 3), cfg)


class TestLieBracket:
    """Test [V, W]_r = Pi_r((DW) V - (DV) W)"""

    def test_self_bracket(self, random_field):
        """Test [V, V] = 0"""
        V = random_field(2, 3)
        assert max_abs(lie_bracket_truncated(V, V, 6)) <= 1e-14 * sobolev_norm(V, 1.0) ** 2

    def test_constants_commute(self):
        """Test that constant fields have a vanishing bracket"""
        grid = FrequencyGrid(d=2, R=2)
        V = SpectralField.constant(grid, [1.0, 0.0])
        W = SpectralField.constant(grid, [0.0, 2.0])
        assert max_abs(lie_bracket_truncated(V, W, 4)) <= 1e-15

    @pytest.mark.parametrize("convolution", [None, convolve_direct])
    def test_sine_cosine(self, convolution):
        """Test [sin(2 pi x), cos(2 pi x)] = -2 pi"""
        grid = FrequencyGrid(d=1, R=1)
        V = sine_mode_field(1, 1)
        W = SpectralField.from_modes(grid, {(1,): 0.5, (-1,): 0.5})
        for r in (0, 1, 2):
            bracket = lie_bracket_truncated(V, W, r, convolution=convolution)
            assert bracket.coefficient((0,)) == pytest.approx(-2.0 * np.pi, rel=1e-14)
            others = np.delete(bracket.coeffs[0], bracket.grid.enumerate((0,)))
            assert not np.any(np.abs(others) > 1e-14)

    def test_antisymmetry_and_bilinearity(self, random_field):
        """Test [V, W] = -[W, V] and linearity in the first slot"""
        U = random_field(2, 4, seed=1)
        V = random_field(2, 4, seed=2)
        W = random_field(2, 4, seed=3)
        VW = lie_bracket_truncated(V, W, 8)
        WV = lie_bracket_truncated(W, V, 8)
        scale = max_abs(VW)
        np.testing.assert_allclose(VW.coeffs, -WV.coeffs, rtol=0, atol=1e-13 * scale)
        sum_first = lie_bracket_truncated(U + 2.0 * V, W, 8)
        split = lie_bracket_truncated(U, W, 8) + 2.0 * VW
        np.testing.assert_allclose(sum_first.coeffs, split.coeffs, rtol=0, atol=1e-13 * max_abs(split))

    def test_ad_tilde_is_negated_bracket(self, random_field):
        """Test ad~_V W = -[V, W]_r"""
        V = random_field(2, 3, seed=4)
        W = random_field(2, 3, seed=5)
        np.testing.assert_array_equal(ad_tilde(V, W, 3).coeffs, -lie_bracket_truncated(V, W, 3).coeffs)

    def test_fast_path_against_direct(self, random_field):
        """Test the default path against termwise direct sums"""
        V = random_field(2, 3, seed=6)
        W = random_field(2, 3, seed=7)
        fast = lie_bracket_truncated(V, W, 5)
        exact = lie_bracket_truncated(V, W, 5, convolution=convolve_direct)
        np.testing.assert_allclose(fast.coeffs, exact.coeffs, rtol=0, atol=1e-12 * max_abs(exact))


class TestJacobiator:
    """Test the failure of the Jacobi identity under truncation"""

    def modes(self):
        grid = FrequencyGrid(d=1, R=2)
        U = SpectralField.from_modes(grid, {(2,): 1.0})
        V = SpectralField.from_modes(grid, {(1,): 1.0})
        W = SpectralField.from_modes(grid, {(-2,): 1.0})
        return U, V, W

    def test_truncated_counterexample(self):
        """Test J_2(e_2, e_1, e_-2) = -20 pi^2 e_1"""
        U, V, W = self.modes()
        result = jacobiator(U, V, W, 2)
        assert result.coefficient((1,)) == pytest.approx(-20.0 * np.pi**2, rel=1e-12)
        others = np.delete(result.coeffs[0], result.grid.enumerate((1,)))
        assert not np.any(np.abs(others) > 1e-10)

    def test_untruncated_identity_holds(self):
        """Test that the same triple satisfies Jacobi when r = 2R"""
        U, V, W = self.modes()
        assert max_abs(jacobiator(U, V, W, 4)) <= 1e-10

    def test_random_fields_at_full_cutoff(self, random_field):
        """Test the Jacobi identity for random fields when nothing is dropped"""
        U = random_field(1, 2, seed=1)
        V = random_field(1, 2, seed=2)
        W = random_field(1, 2, seed=3)
        result = jacobiator(U, V, W, 6)
        scale = sobolev_norm(U, 2.0) * sobolev_norm(V, 2.0) * sobolev_norm(W, 2.0)
        assert max_abs(result) <= 1e-12 * scale


class TestPairings:
    """Test the weak pairing and the metric energy"""

    def test_cosine_pairing(self):
        """Test <cos, cos> = 1/2"""
        grid = FrequencyGrid(d=1, R=2)
        f = SpectralField.from_modes(grid, {(1,): 0.5, (-1,): 0.5})
        assert weak_pairing(f, f) == pytest.approx(0.5, rel=1e-15)

    def test_pairing_uses_common_support(self, random_field):
        """Test that modes beyond the smaller cutoff do not contribute"""
        P = random_field(2, 5, seed=1)
        W = random_field(2, 2, seed=2)
        assert weak_pairing(P, W) == pytest.approx(weak_pairing(truncate(P, 2), W), rel=1e-15)

    def test_pairing_mismatch(self, random_field):
        """Test that component counts must agree"""
        with pytest.raises(GridMismatchError):
            weak_pairing(random_field(2, 2), random_field(2, 2, ncomp=1))

    def test_energy_of_sine(self):
        """Test <L sin, sin> = lambda_1 / 2"""
        cfg = DynamicsConfig(d=1, m=3, R=2)
        assert metric_energy(sine_mode_field(1, 2), cfg) == pytest.approx(L_at(1, 3) / 2, rel=1e-14)
