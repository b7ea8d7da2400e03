"""Training harness: tasks, sampling, objective wiring, determinism, leakage
guards, and checkpoint roundtrips. Model sizes are shrunk hard so each training
run stays in the low seconds."""

import json
from dataclasses import asdict, replace

import numpy as np
import pytest
import torch

from mmdg.augment import MixConfig
from mmdg.disentangle import KernelSpec
from mmdg.encoders import EncoderConfig
from mmdg.harness import (
    VARIANTS,
    EvalReport,
    StratifiedSampler,
    TaskSpec,
    TrainConfig,
    _substream,
    apply_variant,
    evaluate,
    holdout_split,
    load_checkpoint,
    run_ablation,
    standard_tasks,
    sweep,
    total_loss,
    train,
    train_config_from_dict,
)
from mmdg.model import FusionConfig, ModelConfig, build_model

TASK = TaskSpec("TT", ("C1", "C2"), "C3")

TINY_MODEL = ModelConfig(
    encoder=EncoderConfig(widths=(4, 4, 8, 8), feature_dim=32),
    embed_dim=16,
    fusion=FusionConfig(mode="attention", heads=2, head_dim=8, tokens=4),
)


def tiny_train_cfg(**kw) -> TrainConfig:
    base = dict(
        batch_per_domain=24,
        epochs=5,
        seed=0,
        model=TINY_MODEL,
        patience=10,
    )
    base.update(kw)
    return TrainConfig(**base)


@pytest.fixture(scope="module")
def trained(trio_prepared):
    return train(TASK, tiny_train_cfg(), trio_prepared)


class TestTaskSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            TaskSpec("X", ("C1",), "C2")
        with pytest.raises(ValueError):
            TaskSpec("X", ("C1", "C1"), "C2")
        with pytest.raises(ValueError):
            TaskSpec("X", ("C1", "C2"), "C2")

    def test_standard_tasks(self):
        tasks = standard_tasks()
        assert set(tasks) == {f"T{i}" for i in range(1, 10)}
        assert tasks["T1"].source_conditions == ("C2", "C3", "C4")
        assert tasks["T1"].target_condition == "C1"
        assert tasks["T4"].source_conditions == ("C1", "C2", "C3")
        assert tasks["T4"].target_condition == "C4"
        for i, target in zip(range(5, 10), ("C5", "C6", "C7", "C8", "C9")):
            assert tasks[f"T{i}"].source_conditions == ("C1", "C2", "C3")
            assert tasks[f"T{i}"].target_condition == target


class TestTrainConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(lambda_m=-0.1)
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(variant="fancy")
        with pytest.raises(ValueError):
            TrainConfig(holdout_fraction=1.0)
        with pytest.raises(ValueError):
            TrainConfig(ortho_norm="nuclear")
        with pytest.raises(ValueError):
            TrainConfig(patience=0)

    def test_dict_roundtrip_survives_json(self):
        cfg = tiny_train_cfg(lambda_m=0.3, variant="concat_emb")
        back = train_config_from_dict(json.loads(json.dumps(asdict(cfg))))
        assert back == cfg


class TestApplyVariant:
    def test_catalog_is_closed(self):
        for v in VARIANTS:
            apply_variant(tiny_train_cfg(variant=v))  # must not raise

    def test_full_is_identity(self):
        cfg = tiny_train_cfg()
        assert apply_variant(cfg) == cfg

    def test_wo_dis_zeroes_both_weights_only(self):
        cfg = tiny_train_cfg(variant="wo_dis")
        out = apply_variant(cfg)
        assert out.lambda_m == 0.0 and out.lambda_d == 0.0
        assert out.mix.enabled
        assert out.model == cfg.model

    def test_wo_single_level(self):
        out_m = apply_variant(tiny_train_cfg(variant="wo_modality_dis"))
        assert out_m.lambda_m == 0.0 and out_m.lambda_d == 0.5
        out_d = apply_variant(tiny_train_cfg(variant="wo_domain_dis"))
        assert out_d.lambda_m == 0.1 and out_d.lambda_d == 0.0

    def test_wo_mix_disables_mixing_only(self):
        out = apply_variant(tiny_train_cfg(variant="wo_mix"))
        assert not out.mix.enabled
        assert out.lambda_m == 0.1 and out.lambda_d == 0.5

    def test_baseline_strips_everything(self):
        out = apply_variant(tiny_train_cfg(variant="baseline"))
        assert out.lambda_m == 0.0 and out.lambda_d == 0.0
        assert not out.mix.enabled
        assert out.model.fusion.mode == "concat"

    def test_fusion_variants_change_mode_only(self):
        for v in ("concat", "concat_emb", "add", "add_emb"):
            out = apply_variant(tiny_train_cfg(variant=v))
            assert out.model.fusion.mode == v
            assert out.lambda_m == 0.1 and out.lambda_d == 0.5
            assert out.mix.enabled

    def test_single_modality_keeps_domain_level_and_mixing(self):
        out = apply_variant(tiny_train_cfg(variant="single_cur"))
        assert out.model.modalities == ("current",)
        assert not out.model.use_modality_disentangle
        assert out.lambda_m == 0.0
        assert out.lambda_d == 0.5  # domain level stays on
        assert out.mix.enabled  # cross-domain mixing stays on


class TestSubstreams:
    def test_named_streams_disjoint_and_stable(self):
        a1 = _substream(0, "sampler").integers(2**32, size=4)
        a2 = _substream(0, "sampler").integers(2**32, size=4)
        b = _substream(0, "mix").integers(2**32, size=4)
        c = _substream(1, "sampler").integers(2**32, size=4)
        assert np.array_equal(a1, a2)
        assert not np.array_equal(a1, b)
        assert not np.array_equal(a1, c)


class TestHoldoutSplit:
    def test_stratified_one_per_cell(self, trio_prepared):
        train_idx, val_idx = holdout_split(trio_prepared, 0.1, np.random.default_rng(0))
        # 3 domains x 8 classes x 10 samples: round(0.1 * 10) = 1 each
        assert val_idx.size == 24
        assert np.intersect1d(train_idx, val_idx).size == 0
        assert np.array_equal(np.sort(np.concatenate([train_idx, val_idx])), np.arange(trio_prepared.n))
        val = trio_prepared.subset(val_idx)
        for d in ("C1", "C2", "C3"):
            for c in range(1, 9):
                assert int(((val.domains == d) & (val.labels == c)).sum()) == 1

    def test_zero_fraction_returns_everything(self, trio_prepared):
        train_idx, val_idx = holdout_split(trio_prepared, 0.0, np.random.default_rng(0))
        assert train_idx.size == trio_prepared.n
        assert val_idx.size == 0

    def test_rng_controls_selection(self, trio_prepared):
        _, v1 = holdout_split(trio_prepared, 0.1, np.random.default_rng(1))
        _, v2 = holdout_split(trio_prepared, 0.1, np.random.default_rng(2))
        assert not np.array_equal(v1, v2)


class TestStratifiedSampler:
    def _toy(self, per_class=6, classes=4, domains=("A", "B")):
        labels, doms = [], []
        for d in domains:
            for c in range(1, classes + 1):
                labels += [c] * per_class
                doms += [d] * per_class
        return np.array(labels), np.array(doms)

    def test_batch_structure(self):
        labels, doms = self._toy()
        s = StratifiedSampler(labels, doms, 8, np.random.default_rng(0))
        assert s.batches_per_epoch == 3  # 24 per domain // 8
        epoch = s.epoch()
        assert len(epoch) == 3
        for batch in epoch:
            assert set(batch) == {"A", "B"}
            for d, idx in batch.items():
                assert idx.size == 8
                assert (doms[idx] == d).all()

    def test_interleaving_covers_all_classes(self):
        labels, doms = self._toy(per_class=6, classes=4)
        s = StratifiedSampler(labels, doms, 8, np.random.default_rng(1))
        for batch in s.epoch():
            for idx in batch.values():
                # balanced pools + batch a multiple of the class count:
                # every class appears exactly batch/classes times
                counts = np.bincount(labels[idx], minlength=5)[1:]
                assert (counts == 2).all()

    def test_epoch_uses_each_sample_once(self):
        labels, doms = self._toy()
        s = StratifiedSampler(labels, doms, 8, np.random.default_rng(2))
        seen = np.concatenate([idx for b in s.epoch() for idx in b.values()])
        assert np.unique(seen).size == seen.size

    def test_oversized_batch_rejected(self):
        labels, doms = self._toy()
        with pytest.raises(ValueError):
            StratifiedSampler(labels, doms, 25, np.random.default_rng(0))

    def test_seeded_determinism(self):
        labels, doms = self._toy()
        e1 = StratifiedSampler(labels, doms, 8, np.random.default_rng(3)).epoch()
        e2 = StratifiedSampler(labels, doms, 8, np.random.default_rng(3)).epoch()
        for b1, b2 in zip(e1, e2):
            for d in b1:
                assert np.array_equal(b1[d], b2[d])


class TestTotalLoss:
    def _outputs(self, cfg_model, batch, seed=0):
        torch.manual_seed(seed)
        model = build_model(cfg_model)
        rng = np.random.default_rng(seed)
        inputs = {
            "vibration": torch.tensor(
                rng.standard_normal((batch, 3, 64, 32)), dtype=torch.float32
            ),
            "current": torch.tensor(rng.standard_normal((batch, 3, 1024)), dtype=torch.float32),
            "acoustic": torch.tensor(
                rng.standard_normal((batch, 6, 64, 64)), dtype=torch.float32
            ),
        }
        inputs = {m: inputs[m] for m in cfg_model.modalities}
        return model(inputs)

    def test_weighted_composition(self):
        out = self._outputs(TINY_MODEL, 8)
        labels = torch.tensor([1, 2, 3, 4, 5, 6, 7, 8])
        domains = np.array(["A"] * 4 + ["B"] * 4)
        cfg = tiny_train_cfg(lambda_m=0.25, lambda_d=2.0)
        kernel = KernelSpec(bandwidths=(1.0,))
        b = total_loss(out, labels, domains, cfg, kernel)
        assert torch.allclose(b.total, b.cls + 0.25 * b.modality + 2.0 * b.domain, atol=1e-6)
        assert float(b.modality.detach()) > 0.0
        assert float(b.domain.detach()) > 0.0

    def test_cls_is_mean_of_per_domain_ce(self):
        out = self._outputs(TINY_MODEL, 6)
        labels = torch.tensor([1, 2, 3, 4, 5, 6])
        domains = np.array(["A", "A", "A", "B", "B", "B"])
        b = total_loss(out, labels, domains, tiny_train_cfg(), KernelSpec(bandwidths=(1.0,)))
        ce_a = torch.nn.functional.cross_entropy(out.logits[:3], labels[:3] - 1)
        ce_b = torch.nn.functional.cross_entropy(out.logits[3:], labels[3:] - 1)
        assert torch.allclose(b.cls, (ce_a + ce_b) / 2, atol=1e-6)

    def test_single_domain_skips_domain_term(self):
        out = self._outputs(TINY_MODEL, 4)
        labels = torch.tensor([1, 2, 3, 4])
        domains = np.array(["A"] * 4)
        b = total_loss(out, labels, domains, tiny_train_cfg(), KernelSpec(bandwidths=(1.0,)))
        assert float(b.domain.detach()) == 0.0
        assert float(b.modality.detach()) > 0.0

    def test_single_modality_skips_modality_term(self):
        cfg_model = replace(TINY_MODEL, modalities=("current",), use_modality_disentangle=False)
        out = self._outputs(cfg_model, 4)
        labels = torch.tensor([1, 2, 3, 4])
        domains = np.array(["A", "A", "B", "B"])
        b = total_loss(out, labels, domains, tiny_train_cfg(), KernelSpec(bandwidths=(1.0,)))
        assert out.modality_pairs is None
        assert float(b.modality.detach()) == 0.0
        assert float(b.domain.detach()) > 0.0


class TestTrain:
    def test_guards(self, trio_prepared, tiny_raw):
        with pytest.raises(ValueError):
            train(TASK, tiny_train_cfg(), tiny_raw)  # raw, not prepared
        from mmdg.preprocess import fit_norm_stats, normalize

        normed = normalize(trio_prepared, fit_norm_stats(trio_prepared))
        with pytest.raises(ValueError):
            train(TASK, tiny_train_cfg(), normed)  # already normalized
        with pytest.raises(KeyError):
            train(TaskSpec("X", ("C1", "C7"), "C3"), tiny_train_cfg(), trio_prepared)

    def test_loss_decreases(self, trained):
        steps = [r for r in trained.history if r["kind"] == "step"]
        first_epoch = [r["total"] for r in steps if r["epoch"] == 0]
        last_epoch = [r["total"] for r in steps if r["epoch"] == steps[-1]["epoch"]]
        assert np.mean(last_epoch) < np.mean(first_epoch)
        assert all(np.isfinite(r["total"]) for r in steps)

    def test_audit_trail(self, trained):
        audit = trained.audit
        assert audit.conditions_batched == ("C1", "C2")
        assert audit.stats_sources == ("C1", "C2")
        # 2 domains x 8 classes x 10 minus one holdout per cell
        assert audit.n_train == 144
        assert audit.n_val == 16
        assert audit.mix["samples"] == len(trained.history) * 2 * 24
        assert audit.mix["fallback"] == 0
        gates = sum(audit.mix["modality_mixed"].values())
        assert audit.mix["external"] + audit.mix["internal"] == gates
        assert gates > 0

    def test_validation_history(self, trained):
        assert len(trained.val_history) == trained.epochs_run
        assert all(0.0 <= r["val_accuracy"] <= 100.0 for r in trained.val_history)
        assert trained.best_epoch >= 0

    def test_metrics_jsonl(self, trio_prepared, tmp_path):
        path = tmp_path / "metrics.jsonl"
        train(TASK, tiny_train_cfg(epochs=1), trio_prepared, metrics_path=path)
        records = [json.loads(line) for line in path.read_text().splitlines()]
        kinds = {r["kind"] for r in records}
        assert kinds == {"step", "epoch"}
        step = next(r for r in records if r["kind"] == "step")
        assert {"epoch", "step", "cls", "modality", "domain", "total"} <= set(step)


class TestEvaluate:
    def test_target_report(self, trained, trio_prepared):
        rep = evaluate(trained, trio_prepared.for_conditions(["C3"]))
        assert rep.n == 80
        assert rep.conditions == ("C3",)
        assert rep.confusion.shape == (8, 8)
        assert rep.confusion.sum() == 80
        assert 0.0 <= rep.accuracy <= 100.0
        pc = rep.per_class_accuracy()
        assert pc.shape == (8,)
        got = EvalReport.from_dict(rep.to_dict())
        assert got.accuracy == rep.accuracy
        assert np.array_equal(got.confusion, rep.confusion)

    def test_source_overlap_refused(self, trained, trio_prepared):
        with pytest.raises(ValueError):
            evaluate(trained, trio_prepared.for_conditions(["C1"]))
        with pytest.raises(ValueError):
            evaluate(trained, trio_prepared)  # contains both sources

    def test_mix_counters_untouched_by_eval(self, trained, trio_prepared):
        before = (trained.counters.samples, trained.counters.external, trained.counters.internal)
        evaluate(trained, trio_prepared.for_conditions(["C3"]))
        after = (trained.counters.samples, trained.counters.external, trained.counters.internal)
        assert before == after


class TestDeterminism:
    def test_same_seed_bitwise(self, trio_prepared, trained):
        again = train(TASK, tiny_train_cfg(), trio_prepared)
        assert [r["total"] for r in again.history] == [r["total"] for r in trained.history]
        s1, s2 = trained.model.state_dict(), again.model.state_dict()
        assert set(s1) == set(s2)
        assert all(torch.equal(s1[k], s2[k]) for k in s1)

    def test_different_seed_differs(self, trio_prepared, trained):
        other = train(TASK, tiny_train_cfg(seed=7), trio_prepared)
        assert [r["total"] for r in other.history] != [r["total"] for r in trained.history]

    def test_wo_dis_equals_full_with_zero_weights(self, trio_prepared):
        cfg_a = tiny_train_cfg(epochs=2, variant="wo_dis")
        cfg_b = tiny_train_cfg(epochs=2, lambda_m=0.0, lambda_d=0.0)
        res_a = train(TASK, cfg_a, trio_prepared)
        res_b = train(TASK, cfg_b, trio_prepared)
        assert [r["total"] for r in res_a.history] == [r["total"] for r in res_b.history]
        sa, sb = res_a.model.state_dict(), res_b.model.state_dict()
        assert all(torch.equal(sa[k], sb[k]) for k in sa)


class TestAblationAndSweep:
    def test_run_ablation_single_modality(self, trio_prepared):
        rep = run_ablation("single_cur", TASK, tiny_train_cfg(epochs=1), trio_prepared)
        assert rep.variant == "single_cur"
        assert rep.conditions == ("C3",)
        assert rep.n == 80

    def test_sweep_records(self, trio_prepared):
        recs = sweep(TASK, [0.2], [0.4], tiny_train_cfg(epochs=1), trio_prepared)
        assert len(recs) == 1
        r = recs[0]
        assert r["task"] == "TT"
        assert r["lambda_m"] == 0.2 and r["lambda_d"] == 0.4
        assert r["config"]["lambda_m"] == 0.2
        assert 0.0 <= r["accuracy"] <= 100.0


class TestCheckpoint:
    def test_roundtrip_preserves_predictions(self, trained, trio_prepared, tmp_path):
        out = trained.save(tmp_path / "ckpt")
        assert (out / "params.npz").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["format"] == "mmdg-checkpoint-v1"
        assert manifest["task"]["target_condition"] == "C3"
        assert manifest["audit"]["stats_sources"] == ["C1", "C2"]

        loaded = load_checkpoint(out)
        s1, s2 = trained.model.state_dict(), loaded.model.state_dict()
        assert all(torch.equal(s1[k], s2[k]) for k in s1)
        target = trio_prepared.for_conditions(["C3"])
        r1 = evaluate(trained, target)
        r2 = evaluate(loaded, target)
        assert r1.accuracy == r2.accuracy
        assert np.array_equal(r1.confusion, r2.confusion)

    def test_shape_mismatch_detected(self, trained, tmp_path):
        out = trained.save(tmp_path / "ckpt2")
        manifest = json.loads((out / "manifest.json").read_text())
        key = next(iter(manifest["param_shapes"]))
        manifest["param_shapes"][key] = [1, 1, 1]
        (out / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(ValueError):
            load_checkpoint(out)
