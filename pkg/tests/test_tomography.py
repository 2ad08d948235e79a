import json

import numpy as np
import pytest
from scipy.stats import mannwhitneyu

from spinorbit.qstate import density_from_pure, fidelity, is_density, ket, random_density
from spinorbit.states import Bell, bell_like, family
from spinorbit.tomography import (
    ALL_SETTINGS,
    IntensityRecord,
    MeasurementSetting,
    RecordError,
    TomographyReport,
    forward_probabilities,
    ideal_records,
    negative_eigenvalue_mass,
    project_physical,
    reconstruct,
    records_from_json,
    records_to_json,
    stokes_from_records,
)

PHI_PLUS = density_from_pure(bell_like(Bell.PHI_PLUS))


def scaled(records, factor):
    return [IntensityRecord(r.setting, tuple(factor * np.asarray(r.intensities))) for r in records]


class TestSettings:

    def test_nine_distinct(self):
        assert len(set(ALL_SETTINGS)) == 9

    def test_rejects_bad_index(self):
        with pytest.raises(ValueError):
            MeasurementSetting(0, 1)


class TestForwardProbabilities:

    def test_computational_eigenstate(self):
        np.testing.assert_allclose(forward_probabilities(np.diag([1, 0, 0, 0]),
                                                         MeasurementSetting(3, 3)), [1, 0, 0, 0])

    @pytest.mark.parametrize("setting", ALL_SETTINGS)
    def test_maximally_mixed(self, setting):
        np.testing.assert_allclose(forward_probabilities(np.eye(4) / 4, setting), [0.25] * 4,
                                   atol=1e-15)

    def test_bell_circular(self):
        np.testing.assert_allclose(forward_probabilities(PHI_PLUS, MeasurementSetting(2, 2)),
                                   [0, 0.5, 0.5, 0], atol=1e-15)

    def test_conservation(self, rng):
        for _ in range(20):
            rho = random_density(rng)
            for s in ALL_SETTINGS:
                assert abs(forward_probabilities(rho, s).sum() - 1) < 1e-12


class TestStokes:

    def test_maximally_mixed(self):
        s = stokes_from_records(ideal_records(np.eye(4) / 4))
        expected = np.zeros((4, 4))
        expected[0, 0] = 1
        np.testing.assert_allclose(s, expected, atol=1e-12)

    def test_bell(self):
        s = stokes_from_records(ideal_records(PHI_PLUS))
        assert s[1, 1] == pytest.approx(1)
        assert s[2, 2] == pytest.approx(-1)
        assert s[3, 3] == pytest.approx(1)

    def test_vv_computational(self):
        rec = {r.setting: r for r in ideal_records(family("rho1", 0))}
        np.testing.assert_allclose(rec[MeasurementSetting(3, 3)].intensities, [0, 0, 0, 1])

    def test_average_agrees_when_noiseless(self, rng):
        recs = ideal_records(random_density(rng))
        np.testing.assert_allclose(stokes_from_records(recs, average=True),
                                   stokes_from_records(recs), atol=1e-12)

    def test_missing(self):
        with pytest.raises(RecordError):
            stokes_from_records(ideal_records(PHI_PLUS)[:8])

    def test_duplicate(self):
        recs = ideal_records(PHI_PLUS)
        with pytest.raises(RecordError):
            stokes_from_records(recs[:8] + [recs[0]])

    def test_all_zero_record(self):
        with pytest.raises(RecordError):
            IntensityRecord(MeasurementSetting(1, 1), (0, 0, 0, 0))

    @pytest.mark.parametrize("vals", [(1, 2, 3), (1, -1, 0, 0), (1, np.nan, 0, 0)])
    def test_bad_intensities(self, vals):
        with pytest.raises(RecordError):
            IntensityRecord(MeasurementSetting(1, 1), vals)


class TestProjectPhysical:

    def test_psd_unchanged(self, rng):
        rho = random_density(rng)
        np.testing.assert_allclose(project_physical(rho), rho, atol=1e-12)

    def test_hand_example(self):
        out = project_physical(np.diag([1.1, 0.2, -0.2, -0.1]))
        np.testing.assert_allclose(out, np.diag([1.1, 0.2, 0, 0]) / 1.3, atol=1e-12)
        assert is_density(out)

    def test_idempotent(self, rng):
        for _ in range(20):
            raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            raw = raw + raw.conj().T
            raw = raw - (np.trace(raw) - 1) / 4 * np.eye(4)
            once = project_physical(raw)
            assert is_density(once)
            np.testing.assert_allclose(project_physical(once), once, atol=1e-12)

    def test_rejects_non_hermitian(self):
        m = np.eye(4, dtype=complex) / 4
        m[0, 1] = 0.1
        with pytest.raises(ValueError):
            project_physical(m)

    def test_negative_mass(self):
        assert negative_eigenvalue_mass(np.diag([1.1, 0.2, -0.2, -0.1])) == pytest.approx(0.3)
        assert negative_eigenvalue_mass(np.eye(4) / 4) == 0.0


class TestReconstruct:

    def test_round_trip(self, rng):
        for rank in (1, 2, 3, 4):
            for _ in range(50):
                rho = random_density(rng, rank=rank)
                rep = reconstruct(ideal_records(rho), target=rho)
                assert np.max(np.abs(rep.rho_raw - rho)) < 1e-10
                assert rep.fidelity_vs_target >= 1 - 1e-9

    def test_scale_invariance(self, rng):
        rho = random_density(rng)
        recs = ideal_records(rho, total_intensity=3.0)
        base = reconstruct(recs).rho_raw
        for factor in (1e-3, 0.7, 250.0):
            np.testing.assert_allclose(reconstruct(scaled(recs, factor)).rho_raw, base,
                                       rtol=0, atol=1e-12)

    def test_perturbed_intensity(self):
        # setting (1, 2) has four equal outputs for phi+, so the bump shows up in s[1][2]
        recs = ideal_records(PHI_PLUS)
        assert recs[1].setting == MeasurementSetting(1, 2)
        bumped = list(recs[1].intensities)
        bumped[0] *= 1.05
        recs[1] = IntensityRecord(recs[1].setting, tuple(bumped))
        rep = reconstruct(recs, target=PHI_PLUS)
        assert is_density(rep.rho_physical)
        assert rep.negative_eigenvalue_mass > 0
        assert rep.fidelity_vs_target < 1

    def test_no_target(self):
        assert reconstruct(ideal_records(PHI_PLUS)).fidelity_vs_target is None

    def test_monotone_degradation(self, rng):
        rho = random_density(rng, rank=2)
        recs = ideal_records(rho)
        levels = (0.0, 0.02, 0.05, 0.1)
        samples = []
        for sigma in levels:
            fids = []
            for _ in range(100):
                noisy = [IntensityRecord(r.setting, tuple(np.clip(
                    np.asarray(r.intensities) * (1 + sigma * rng.normal(size=4)), 0, None)))
                    for r in recs]
                fids.append(reconstruct(noisy, target=rho).fidelity_vs_target)
            samples.append(np.array(fids))
        medians = [np.median(f) for f in samples]
        assert all(a >= b for a, b in zip(medians, medians[1:]))
        for less, more in zip(samples[1:], samples[2:]):
            assert mannwhitneyu(less, more, alternative="greater").pvalue < 0.05


class TestJson:

    def test_records_round_trip(self, rng):
        recs = ideal_records(random_density(rng), total_intensity=2.5)
        text = json.dumps(records_to_json(recs))
        assert records_from_json(text) == recs
        assert records_from_json(json.loads(text)) == recs

    def test_records_malformed(self):
        with pytest.raises(RecordError):
            records_from_json([{"pol_basis": 1}])

    def test_report_round_trip(self, rng):
        rho = random_density(rng)
        rep = reconstruct(ideal_records(rho), target=rho)
        back = TomographyReport.from_json(json.loads(json.dumps(rep.to_json())))
        np.testing.assert_array_equal(back.rho_raw, rep.rho_raw)
        np.testing.assert_array_equal(back.rho_physical, rep.rho_physical)
        np.testing.assert_array_equal(back.stokes, rep.stokes)
        assert back.fidelity_vs_target == rep.fidelity_vs_target

    def test_vv_fidelity(self):
        rho = density_from_pure(ket("Vv"))
        assert fidelity(rho, reconstruct(ideal_records(rho)).rho_physical) == pytest.approx(1)
