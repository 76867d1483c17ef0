"""Threshold estimation, normalization, calibration, prediction, CSV round trip."""

import numpy as np
import pytest

from saclat import latency, rbf, wald
from saclat.latency import (
    LatencyDataset,
    LatencyRecord,
    OutOfDomainError,
    TaskDescription,
    calibrate,
    condition_rate_labels,
    estimate_alpha,
    load_dataset_csv,
    normalize_dataset,
    predict,
    write_dataset_csv,
)
from saclat.rbf import RBFNetwork, StimulusFeatures
from saclat.wald import IGParams
from tests.helpers import condition_id, pilot_grid, synth_pilot_dataset, ushaped_rate


def constant_rate_net(value: float) -> RBFNetwork:
    """Single enormous bump: evaluates to ~value everywhere on the domain."""
    return RBFNetwork(
        centers=np.zeros((1, 3)),
        widths=np.array([1e6]),
        weights=np.array([value]),
        feature_scales=np.ones(3),
    )


def record(subject, cond, lat, norm=None, block="b0", c=1.0, f=1.0, e=0.0):
    return LatencyRecord(
        subject_id=subject,
        block_id=block,
        condition_id=cond,
        features=StimulusFeatures(contrast=c, frequency=f, eccentricity=e),
        latency=lat,
        latency_norm=norm,
    )


class TestEstimateAlpha:
    def test_exact_on_matched_moments(self):
        # two-point sample with mean 0.5 and unbiased variance 1/32, the
        # moments of (alpha, nu) = (2, 4); the estimator must return 2
        assert estimate_alpha([0.375, 0.625]) == pytest.approx(2.0, rel=1e-14)

    def test_monte_carlo_recovery(self):
        p = IGParams(3.0, 3.5)
        draws = wald.sample(p, np.random.default_rng(0), size=10**6)
        assert 2.91 <= estimate_alpha(draws) <= 3.09

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError):
            estimate_alpha([0.4, 0.4, 0.4])

    def test_small_sample_rejected(self):
        with pytest.raises(ValueError):
            estimate_alpha([0.4])

    def test_scale_covariance(self):
        draws = wald.sample(IGParams(2.0, 2.0), np.random.default_rng(3), size=5000)
        a1 = estimate_alpha(draws)
        for k in (0.25, 3.0, 10.0):
            assert estimate_alpha(k * draws) == pytest.approx(np.sqrt(k) * a1, rel=1e-10)


class TestNormalize:
    def test_single_subject_scale(self):
        data = LatencyDataset(
            records=(
                record("s1", "ped", 0.2),
                record("s1", "ped", 0.3),
                record("s1", "other", 0.25, c=0.5),
            )
        )
        out = normalize_dataset(data, "ped")
        by_cond = {(r.condition_id, r.latency): r.latency_norm for r in out.records}
        assert by_cond[("other", 0.25)] == pytest.approx(1.0, rel=1e-12)
        assert out.latencies(condition_id="ped", normalized=True).mean() == pytest.approx(1.0)

    def test_idempotent_on_normalized_values(self):
        data = LatencyDataset(
            records=(record("s1", "ped", 0.8), record("s1", "ped", 1.2), record("s1", "x", 0.9))
        )
        once = normalize_dataset(data, "ped")
        rebuilt = LatencyDataset(
            records=tuple(
                record(r.subject_id, r.condition_id, r.latency_norm) for r in once.records
            )
        )
        twice = normalize_dataset(rebuilt, "ped")
        for r1, r2 in zip(once.records, twice.records):
            assert r2.latency_norm == pytest.approx(r1.latency_norm, rel=1e-12)

    def test_two_subject_scales(self):
        data = LatencyDataset(
            records=(
                record("s1", "ped", 0.25),
                record("s1", "x", 0.5),
                record("s2", "ped", 0.30),
                record("s2", "x", 0.5),
            )
        )
        out = normalize_dataset(data, "ped")
        s1 = {r.condition_id: r.latency_norm for r in out.records if r.subject_id == "s1"}
        s2 = {r.condition_id: r.latency_norm for r in out.records if r.subject_id == "s2"}
        assert s1["x"] == pytest.approx(0.5 * 4.0)
        assert s2["x"] == pytest.approx(0.5 * 10.0 / 3.0)
        for subject in ("s1", "s2"):
            ped = out.latencies(condition_id="ped", subject_id=subject, normalized=True)
            assert ped.mean() == pytest.approx(1.0, rel=1e-12)

    def test_missing_pedestal(self):
        data = LatencyDataset(records=(record("s1", "x", 0.5),))
        with pytest.raises(ValueError):
            normalize_dataset(data, "ped")

    def test_subject_scale_equivariance(self):
        base = synth_pilot_dataset(n_subjects=2, trials_per_condition=5, seed=1)
        scaled_records = tuple(
            LatencyRecord(
                subject_id=r.subject_id,
                block_id=r.block_id,
                condition_id=r.condition_id,
                features=r.features,
                latency=r.latency * (7.0 if r.subject_id == "s00" else 1.0),
            )
            for r in base.records
        )
        ped = condition_id(1.0, 1.0, 0.0)
        a = normalize_dataset(base, ped)
        b = normalize_dataset(LatencyDataset(records=scaled_records), ped)
        for r1, r2 in zip(a.records, b.records):
            assert r2.latency_norm == pytest.approx(r1.latency_norm, rel=1e-12)


class TestCalibrate:
    def test_round_trip_mean(self):
        p = IGParams(3.21, 3.0)
        draws = wald.sample(p, np.random.default_rng(4), size=20_000)
        net = constant_rate_net(1.7)
        condition = StimulusFeatures(0.5, 2.0, 5.0)
        task, rescale = calibrate(draws, net, condition)
        predicted = predict(task, condition, net)
        assert wald.mean(predicted) == pytest.approx(float(draws.mean()), rel=0.02)
        assert task.nu_rescale == rescale

    def test_rescale_is_unity_for_matching_units(self):
        p = IGParams(3.0, 1.4)
        draws = wald.sample(p, np.random.default_rng(5), size=200_000)
        net = constant_rate_net(1.4)  # surface already speaks the sample's units
        _, rescale = calibrate(draws, net, StimulusFeatures(1.0, 1.0, 0.0))
        assert rescale == pytest.approx(1.0, abs=0.02)

    def test_rejects_degenerate_sample(self):
        net = constant_rate_net(1.0)
        with pytest.raises(ValueError):
            calibrate([0.5, 0.5], net, StimulusFeatures(1.0, 1.0, 0.0))


class TestPredict:
    def test_unit_mean(self):
        task = TaskDescription(task_id="t", alpha=1.0)
        params = predict(task, StimulusFeatures(1.0, 1.0, 0.0), constant_rate_net(1.0))
        assert wald.mean(params) == pytest.approx(1.0, rel=1e-9)

    def test_monotone_in_rate(self):
        task = TaskDescription(task_id="t", alpha=2.0)
        fast = predict(task, StimulusFeatures(1.0, 1.0, 0.0), constant_rate_net(2.0))
        slow = predict(task, StimulusFeatures(1.0, 1.0, 0.0), constant_rate_net(1.0))
        assert wald.mean(fast) < wald.mean(slow)

    def test_out_of_domain_reported(self):
        task = TaskDescription(task_id="t", alpha=1.0)
        with pytest.raises(OutOfDomainError):
            predict(task, StimulusFeatures(1.0, 1.0, 0.0), constant_rate_net(-0.5))

    def test_calibrate_predict_alpha_round_trip(self):
        # data generated from predict's own law recovers the threshold
        net = constant_rate_net(1.25)
        condition = StimulusFeatures(0.5, 2.0, 10.0)
        task = TaskDescription(task_id="gen", alpha=2.6, nu_rescale=1.0)
        rng = np.random.default_rng(6)
        draws = wald.sample(predict(task, condition, net), rng, size=10**5)
        recovered, _ = calibrate(draws, net, condition)
        assert recovered.alpha == pytest.approx(task.alpha, rel=0.03)


class TestPipelineOnSyntheticPilot:
    def test_predicted_means_and_ushape(self):
        alpha_true = 3.0
        data = synth_pilot_dataset(alpha=alpha_true, n_subjects=3, trials_per_condition=200, seed=7)
        ped = condition_id(1.0, 1.0, 0.0)
        normalized = normalize_dataset(data, ped)
        labels = condition_rate_labels(normalized)
        result = rbf.train([labels[c] for c in sorted(labels)], rbf.TrainConfig(seed=2))
        task, _ = calibrate(
            normalized.latencies(condition_id=ped, normalized=True),
            result.network,
            normalized.condition_features(ped),
        )

        nu_ped = float(ushaped_rate(1.0, 1.0, 0.0))
        rel_errors = []
        for c, f, e in pilot_grid():
            params = predict(task, StimulusFeatures(c, f, e), result.network)
            true_mean_norm = nu_ped / float(ushaped_rate(c, f, e))
            rel_errors.append(abs(wald.mean(params) - true_mean_norm) / true_mean_norm)
        assert max(rel_errors) < 0.05

        means_by_e = {
            e: wald.mean(predict(task, StimulusFeatures(0.53, 1.0, e), result.network))
            for e in (0.0, 10.0, 20.0)
        }
        assert means_by_e[10.0] < means_by_e[0.0]
        assert means_by_e[10.0] < means_by_e[20.0]


class TestCsv:
    def test_round_trip(self, tmp_path):
        data = synth_pilot_dataset(n_subjects=2, trials_per_condition=3, seed=9)
        normalized = normalize_dataset(data, condition_id(1.0, 1.0, 0.0))
        path = tmp_path / "trials.csv"
        write_dataset_csv(normalized, path)
        back = load_dataset_csv(path)
        assert len(back.records) == len(normalized.records)
        for r1, r2 in zip(normalized.records, back.records):
            assert r2.subject_id == r1.subject_id
            assert r2.condition_id == r1.condition_id
            assert r2.latency == r1.latency
            assert r2.latency_norm == r1.latency_norm
            assert r2.features == r1.features

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("subject_id,latency_ms\ns1,200\n")
        with pytest.raises(ValueError):
            load_dataset_csv(path)

    def test_bad_value(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "subject_id,block_id,condition_id,contrast,frequency_cpd,eccentricity_deg,latency_ms\n"
            "s1,b0,c0,0.5,2.0,0.0,not_a_number\n"
        )
        with pytest.raises(ValueError):
            load_dataset_csv(path)


class TestValidation:
    def test_record(self):
        with pytest.raises(ValueError):
            record("s1", "c", -0.5)
        with pytest.raises(ValueError):
            record("", "c", 0.5)

    def test_task(self):
        with pytest.raises(ValueError):
            TaskDescription(task_id="t", alpha=0.0)
        with pytest.raises(ValueError):
            TaskDescription(task_id="t", alpha=1.0, nu_rescale=-1.0)

    def test_empty_dataset(self):
        with pytest.raises(ValueError):
            LatencyDataset(records=())
