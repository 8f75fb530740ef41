import json
import math

import numpy as np
import pytest

from helpers import two_blob_dataset
from wmrmr.dataset import Dataset, FoldAssignment, NormalizationRecord, \
    stratified_kfold
from wmrmr.svm import (
    SubsetEvaluation,
    SvmConfig,
    SvmModel,
    cross_validated_accuracy,
    decision_function,
    grid_search,
    model_from_dict,
    model_to_dict,
    predict,
    rbf_kernel,
    train,
)


class TestRbfKernel:
    def test_identical_vectors_give_one(self):
        assert rbf_kernel([1.0, 2.0], [1.0, 2.0], gamma=0.7) == 1.0

    def test_known_value(self):
        assert abs(rbf_kernel([1.0, 0.0], [0.0, 0.0], 0.5) - math.exp(-0.5)) < 1e-15

    def test_decays_with_distance(self):
        near = rbf_kernel([0.0], [0.5], 1.0)
        far = rbf_kernel([0.0], [2.0], 1.0)
        assert 1.0 > near > far > 0.0

    def test_gamma_validated(self):
        with pytest.raises(ValueError, match="gamma"):
            rbf_kernel([0.0], [1.0], 0.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            rbf_kernel([0.0], [1.0, 2.0], 1.0)


class TestSvmConfig:
    def test_validation(self):
        with pytest.raises(ValueError, match="c_param"):
            SvmConfig(c_param=0.0, gamma=1.0)
        with pytest.raises(ValueError, match="gamma"):
            SvmConfig(c_param=1.0, gamma=-1.0)
        with pytest.raises(ValueError, match="tolerance"):
            SvmConfig(c_param=1.0, gamma=1.0, tolerance=0.0)
        with pytest.raises(ValueError, match="max_passes"):
            SvmConfig(c_param=1.0, gamma=1.0, max_passes=0)


class TestTrainTwoPoints:
    """One point per class at distance 1; the dual optimum is analytic."""

    def _model(self):
        x = np.array([[0.0], [1.0]])
        y = np.array([-1.0, 1.0])
        return train(x, y, SvmConfig(c_param=1000.0, gamma=1.0))

    def test_alphas_hit_analytic_optimum(self):
        model = self._model()
        # minimizing a^2 (1 - e^-1) - 2a gives alpha = 1 / (1 - e^-1)
        expected = 1.0 / (1.0 - math.exp(-1.0))
        assert np.abs(np.abs(model.dual_coefficients) - expected).max() < 1e-9

    def test_training_points_sit_on_the_margin(self):
        model = self._model()
        assert abs(decision_function(model, [0.0]) + 1.0) < 1e-9
        assert abs(decision_function(model, [1.0]) - 1.0) < 1e-9
        assert abs(model.bias) < 1e-9

    def test_diagnostics_report_convergence(self):
        model = self._model()
        assert model.diagnostics["converged"]
        assert model.diagnostics["kkt_gap"] <= 1e-3
        assert model.diagnostics["n_support"] == 2


class TestTrainXor:
    def test_rbf_separates_xor(self):
        x = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        y = np.array([1.0, 1.0, -1.0, -1.0])
        model = train(x, y, SvmConfig(c_param=100.0, gamma=1.0))
        assert (predict(model, x) == y).all()
        scores = decision_function(model, x)
        assert (np.sign(scores) == y).all()


class TestTrainProperties:
    def _random_problem(self, rng, n=40, d=3):
        x = rng.normal(size=(n, d))
        y = np.where(x.sum(axis=1) + 0.3 * rng.normal(size=n) > 0, 1.0, -1.0)
        if np.unique(y).size < 2:
            y[0] = -y[0]
        return x, y

    def test_box_and_equality_constraints(self):
        rng = np.random.default_rng(30)
        for c_param, gamma in ((0.5, 0.1), (8.0, 1.0), (512.0, 0.01)):
            x, y = self._random_problem(rng)
            model = train(x, y, SvmConfig(c_param=c_param, gamma=gamma))
            magnitudes = np.abs(model.dual_coefficients)
            assert (magnitudes > 0).all()
            assert (magnitudes <= c_param + 1e-12).all()
            assert abs(model.dual_coefficients.sum()) <= 1e-6

    def test_objective_path_non_decreasing(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            x, y = self._random_problem(rng, n=30)
            model = train(x, y, SvmConfig(c_param=10.0, gamma=0.5),
                          track_objective=True)
            path = np.array(model.diagnostics["objective_path"])
            assert path.size == model.diagnostics["n_iter"]
            assert (np.diff(path) >= -1e-9).all()

    def test_deterministic(self):
        rng = np.random.default_rng(32)
        x, y = self._random_problem(rng)
        a = train(x, y, SvmConfig(c_param=4.0, gamma=0.25))
        b = train(x, y, SvmConfig(c_param=4.0, gamma=0.25))
        assert (a.dual_coefficients == b.dual_coefficients).all()
        assert a.bias == b.bias

    def test_separable_blobs_fit_perfectly(self):
        d = two_blob_dataset(n_per_class=25, seed=33)
        y = 2.0 * d.labels - 1.0
        model = train(d.values, y, SvmConfig(c_param=8.0, gamma=0.5))
        assert (predict(model, d.values) == y).all()

    def test_support_vectors_come_from_training_rows(self):
        d = two_blob_dataset(n_per_class=20, seed=34)
        model = train(d.values, 2.0 * d.labels - 1.0,
                      SvmConfig(c_param=8.0, gamma=0.5),
                      feature_subset=(0, 1))
        rows = {tuple(r) for r in d.values}
        assert all(tuple(sv) in rows for sv in model.support_vectors)
        assert model.training_feature_subset == (0, 1)

    def test_input_validation(self):
        x = np.zeros((4, 2))
        with pytest.raises(ValueError, match="labels must be -1/\\+1"):
            train(x, np.array([0.0, 1.0, 0.0, 1.0]),
                  SvmConfig(c_param=1.0, gamma=1.0))
        with pytest.raises(ValueError, match="both present"):
            train(x, np.array([1.0, 1.0, 1.0, 1.0]),
                  SvmConfig(c_param=1.0, gamma=1.0))
        with pytest.raises(ValueError, match="2-D"):
            train(np.zeros(4), np.array([1.0, -1.0, 1.0, -1.0]),
                  SvmConfig(c_param=1.0, gamma=1.0))
        bad = x.copy()
        bad[0, 0] = np.nan
        with pytest.raises(ValueError, match="NaN"):
            train(bad, np.array([1.0, -1.0, 1.0, -1.0]),
                  SvmConfig(c_param=1.0, gamma=1.0))

    def test_max_passes_cap_reported(self):
        rng = np.random.default_rng(35)
        x, y = self._random_problem(rng, n=60)
        model = train(x, y, SvmConfig(c_param=2048.0, gamma=0.001, max_passes=3))
        assert model.diagnostics["n_iter"] == 3
        assert not model.diagnostics["converged"]


class TestDecisionAndPredict:
    def test_single_equals_batch(self):
        d = two_blob_dataset(n_per_class=15, seed=36)
        model = train(d.values, 2.0 * d.labels - 1.0,
                      SvmConfig(c_param=4.0, gamma=0.5))
        batch = decision_function(model, d.values)
        assert isinstance(decision_function(model, d.values[0]), float)
        for row in (0, 5, 11):
            assert abs(decision_function(model, d.values[row]) - batch[row]) < 1e-12

    def test_boundary_score_maps_to_plus_one(self):
        model = SvmModel(
            support_vectors=np.array([[0.0]]),
            dual_coefficients=np.array([1.0]),
            bias=-1.0,  # decision at the support vector is exactly 0
            config=SvmConfig(c_param=1.0, gamma=1.0),
        )
        assert predict(model, [0.0]) == 1

    def test_feature_count_checked(self):
        d = two_blob_dataset(n_per_class=10, seed=37)
        model = train(d.values, 2.0 * d.labels - 1.0,
                      SvmConfig(c_param=4.0, gamma=0.5))
        with pytest.raises(ValueError, match="expects 2 features"):
            decision_function(model, [0.0, 0.0, 0.0])


class TestModelSerialization:
    def test_json_round_trip_preserves_decisions(self):
        d = two_blob_dataset(n_per_class=12, seed=38)
        model = train(d.values, 2.0 * d.labels - 1.0,
                      SvmConfig(c_param=2.0, gamma=0.3), feature_subset=(0, 1))
        payload = json.loads(json.dumps(model_to_dict(model)))
        restored = model_from_dict(payload)
        assert (decision_function(restored, d.values)
                == decision_function(model, d.values)).all()
        assert restored.config == model.config
        assert restored.training_feature_subset == (0, 1)

    def test_missing_field_rejected(self):
        with pytest.raises(ValueError, match="missing field"):
            model_from_dict({"bias": 0.0})


class TestCrossValidation:
    def test_fold_accuracies_match_manual_replay(self):
        """Each fold must behave exactly like a hand-built train/score split."""
        d = two_blob_dataset(n_per_class=20, seed=40, scale=2.5)
        folds = stratified_kfold(d, 4, seed=1)
        config = SvmConfig(c_param=8.0, gamma=0.125)
        evaluation = cross_validated_accuracy(d, (0, 1), config, folds)
        for f in range(folds.k):
            train_rows = folds.train_indices(f)
            val_rows = folds.val_indices(f)
            x_train = d.values[train_rows]
            record = NormalizationRecord(mean=x_train.mean(axis=0),
                                         stddev=x_train.std(axis=0))
            model = train(record.apply(x_train),
                          2.0 * d.labels[train_rows] - 1.0, config)
            scores = decision_function(model, record.apply(d.values[val_rows]))
            accuracy = float(np.mean(
                (scores >= 0).astype(int) == d.labels[val_rows]))
            assert evaluation.fold_accuracies[f] == accuracy
        assert evaluation.j_score == float(np.mean(evaluation.fold_accuracies))

    def test_separable_data_scores_one(self):
        d = two_blob_dataset(n_per_class=20, seed=41)
        folds = stratified_kfold(d, 5, seed=2)
        evaluation = cross_validated_accuracy(
            d, (0, 1), SvmConfig(c_param=8.0, gamma=0.5), folds)
        assert evaluation.j_score == 1.0

    def test_constant_subset_falls_back_to_majority(self):
        rng = np.random.default_rng(42)
        values = np.hstack([np.full((30, 1), 3.0), rng.normal(size=(30, 1))])
        d = Dataset(values=values, labels=[0, 0, 1] * 10,
                    feature_names=("const", "x"))
        folds = stratified_kfold(d, 3, seed=3)
        evaluation = cross_validated_accuracy(
            d, (0,), SvmConfig(c_param=1.0, gamma=1.0), folds)
        assert len(evaluation.notes) == 3
        assert all("constant" in note for note in evaluation.notes)
        # majority class is 0 at 2/3 of each training part
        assert all(abs(a - 2 / 3) < 0.1 for a in evaluation.fold_accuracies)

    def test_single_class_training_part_noted(self):
        d = two_blob_dataset(n_per_class=4, seed=43)
        # fold 0 holds every unstable sample, so its training part is pure
        fold_of_sample = np.where(d.labels == 1, 0, 1)
        folds = FoldAssignment(fold_of_sample=fold_of_sample, k=2, seed=0)
        evaluation = cross_validated_accuracy(
            d, (0, 1), SvmConfig(c_param=1.0, gamma=1.0), folds)
        assert any("single-class" in note for note in evaluation.notes)

    def test_subset_validation(self):
        d = two_blob_dataset(n_per_class=10, seed=44)
        folds = stratified_kfold(d, 2, seed=0)
        config = SvmConfig(c_param=1.0, gamma=1.0)
        with pytest.raises(ValueError, match="empty"):
            cross_validated_accuracy(d, (), config, folds)
        with pytest.raises(ValueError, match="outside"):
            cross_validated_accuracy(d, (0, 5), config, folds)
        with pytest.raises(ValueError, match="duplicate"):
            cross_validated_accuracy(d, (0, 0), config, folds)

    def test_fold_dataset_size_mismatch(self):
        d = two_blob_dataset(n_per_class=10, seed=45)
        folds = FoldAssignment(fold_of_sample=np.zeros(5, dtype=int), k=2, seed=0)
        with pytest.raises(ValueError, match="does not match dataset"):
            cross_validated_accuracy(d, (0,), SvmConfig(c_param=1.0, gamma=1.0),
                                     folds)


class TestGridSearch:
    def test_ties_prefer_small_c_then_small_gamma(self):
        # hugely separated blobs: every cell scores 1.0
        d = two_blob_dataset(n_per_class=15, separation=50.0, scale=0.1, seed=46)
        folds = stratified_kfold(d, 3, seed=4)
        best = grid_search(d, (0, 1), c_grid=(8.0, 1.0), gamma_grid=(1.0, 0.1),
                           folds=folds)
        assert best.j_score == 1.0
        assert best.chosen_config.c_param == 1.0
        assert best.chosen_config.gamma == 0.1

    def test_grid_order_does_not_matter(self):
        d = two_blob_dataset(n_per_class=12, seed=47, scale=2.0)
        folds = stratified_kfold(d, 3, seed=5)
        a = grid_search(d, (0, 1), (0.5, 8.0), (0.1, 1.0), folds)
        b = grid_search(d, (0, 1), (8.0, 0.5), (1.0, 0.1), folds)
        assert a.chosen_config == b.chosen_config
        assert a.j_score == b.j_score

    def test_empty_grid_rejected(self):
        d = two_blob_dataset(n_per_class=10, seed=48)
        folds = stratified_kfold(d, 2, seed=0)
        with pytest.raises(ValueError, match="non-empty"):
            grid_search(d, (0, 1), (), (1.0,), folds)


class TestSubsetEvaluation:
    def test_j_score_consistency_enforced(self):
        with pytest.raises(ValueError, match="mean of fold_accuracies"):
            SubsetEvaluation(subset=(0,), fold_accuracies=(1.0, 0.5),
                             j_score=0.9,
                             chosen_config=SvmConfig(c_param=1.0, gamma=1.0))
