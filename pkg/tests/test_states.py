import numpy as np
import pytest

from spinorbit.qstate import fidelity, is_density, ket, projector, random_density
from spinorbit.states import (
    Bell,
    Family,
    bell_like,
    family,
    is_x_state,
    mean_fidelity,
    perturb,
)

S = 1 / np.sqrt(2)
C_GRID = np.round(np.linspace(0, 1, 11), 10)


class TestBellLike:

    def test_phi_plus(self):
        np.testing.assert_allclose(bell_like(Bell.PHI_PLUS), [S, 0, 0, S])

    def test_psi_minus(self):
        np.testing.assert_allclose(bell_like(Bell.PSI_MINUS), [0, S, -S, 0])

    @pytest.mark.parametrize("kind", list(Bell))
    def test_normalized(self, kind):
        assert abs(np.linalg.norm(bell_like(kind)) - 1) < 1e-15


class TestFamily:

    def test_rho1_endpoints(self):
        np.testing.assert_allclose(family(Family.RHO1, 1.0), projector(bell_like(Bell.PHI_PLUS)))
        np.testing.assert_allclose(family(Family.RHO1, 0.0), np.diag([0, 0, 0, 1]))

    def test_rho3_half(self):
        # 2/3 of the weight split evenly over Hh and Vv, 1/3 on psi-
        rho = family(Family.RHO3, 0.5)
        np.testing.assert_allclose(np.diag(rho).real, [1 / 3, 1 / 6, 1 / 6, 1 / 3], atol=1e-15)
        assert rho[1, 2] == pytest.approx(-1 / 6)
        assert rho[2, 1] == pytest.approx(-1 / 6)

    def test_werner(self):
        c = 0.4
        expected = c * projector(bell_like(Bell.PSI_MINUS)) + (1 - c) * np.eye(4) / 4
        np.testing.assert_allclose(family("werner", c), expected, atol=1e-15)

    @pytest.mark.parametrize("fam", list(Family))
    @pytest.mark.parametrize("c", C_GRID)
    def test_valid_x_state(self, fam, c):
        rho = family(fam, c)
        assert is_density(rho)
        assert is_x_state(rho, 1e-10)

    @pytest.mark.parametrize("fam", [Family.RHO1, Family.RHO2])
    def test_affine_in_c(self, fam):
        for c in C_GRID:
            expected = c * family(fam, 1) + (1 - c) * family(fam, 0)
            np.testing.assert_allclose(family(fam, c), expected, rtol=0, atol=1e-12)

    def test_rho3_psi_minus_weight(self):
        psi = bell_like(Bell.PSI_MINUS)
        for c in C_GRID:
            assert abs((psi.conj() @ family(Family.RHO3, c) @ psi).real - 1 / 3) < 1e-12

    @pytest.mark.parametrize("c", [-0.1, 1.1, np.nan])
    def test_out_of_range(self, c):
        with pytest.raises(ValueError):
            family(Family.RHO1, c)

    def test_parse(self):
        assert Family.parse("RHO2") is Family.RHO2
        with pytest.raises(ValueError):
            Family.parse("rho9")


class TestPerturb:

    def test_zero_is_identity(self, rng):
        rho = random_density(rng)
        np.testing.assert_allclose(perturb(rho, 0), rho)

    def test_one_is_maximally_mixed(self, rng):
        np.testing.assert_allclose(perturb(random_density(rng), 1), np.eye(4) / 4)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            perturb(np.eye(4) / 4, 1.5)

    def test_commutes_with_mixing(self, rng):
        for _ in range(20):
            rho, sigma = random_density(rng), random_density(rng)
            c, a = rng.uniform(), rng.uniform()
            lhs = perturb(c * rho + (1 - c) * sigma, a)
            rhs = c * perturb(rho, a) + (1 - c) * perturb(sigma, a)
            np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)

    def test_mean_fidelity_rho1(self):
        # oracle: direct fidelity evaluation on the five-point grid
        vals = [fidelity(family("rho1", c), perturb(family("rho1", c), 0.1))
                for c in (0, 0.25, 0.5, 0.75, 1)]
        assert np.mean(vals) == pytest.approx(mean_fidelity("rho1", 0.1))
        assert abs(np.mean(vals) - 0.92) <= 0.02

    def test_pure_endpoint_fidelity(self):
        rho = family("rho1", 1.0)
        assert fidelity(rho, perturb(rho, 0.1)) == pytest.approx(0.925, abs=1e-9)


class TestIsXState:

    def test_rho2(self):
        assert is_x_state(family(Family.RHO2, 0.3), 1e-10)

    def test_full_matrix(self):
        dd = np.full(4, 0.5)
        assert not is_x_state(np.outer(dd, dd), 1e-6)

    def test_perturbed(self):
        assert is_x_state(perturb(family(Family.RHO1, 0.7), 0.2), 1e-10)

    def test_hh_basis(self):
        assert is_x_state(projector(ket("Hh")))
