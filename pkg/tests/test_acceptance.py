"""Acceptance suite: one test per criterion, tolerances pinned in each test.

1. loss primitives vs brute-force double-loop oracles (1e-10)
2. analytic vs finite-difference gradients, double precision (1e-4)
3. mixing coefficient distribution and label preservation (exact / KS 0.01)
4. end-to-end tensor shape contract (exact)
5. synthetic cross-condition ordering experiment (seed-averaged means)
6. ablation wiring equivalences (bitwise / exact)
7. leakage audit (zero violations)

Criterion 5 trains 4 variants x 4 tasks x 5 seeds at the desk-scale defaults
and dominates the suite's runtime (CPU-only budget: under 3 hours).
"""

import math
from dataclasses import replace

import numpy as np
import pytest
import torch
from scipy import stats as scipy_stats

from mmdg import datasets, preprocess
from mmdg.augment import ClassDomainIndex, MixConfig, MixCounters, mix_sample, sample_mix_coefficient
from mmdg.disentangle import DisentangledPair, KernelSpec, covariance_penalty, domain_loss, mmd, modality_loss
from mmdg.encoders import EncoderConfig
from mmdg.fusion import CrossAttentionPair
from mmdg.harness import (
    StratifiedSampler,
    TaskSpec,
    TrainConfig,
    evaluate,
    run_ablation,
    standard_tasks,
    sweep,
    total_loss,
    train,
)
from mmdg.model import DiagnosisModel, FusionConfig, ModelConfig, build_model
from mmdg.synthgen import DEFAULT_FAULT_CLASSES, generate_samples, standard_conditions

from _helpers import relative_grad_error


# --------------------------------------------------------------------------
# criterion 1: loss primitives vs brute-force double-loop oracles
# --------------------------------------------------------------------------


def _loop_mmd(x: np.ndarray, y: np.ndarray, bandwidths) -> float:
    """Literal double-loop V-statistic, nothing shared with the implementation."""

    def k(a, b):
        d2 = float(((a - b) ** 2).sum())
        return sum(math.exp(-d2 / (2.0 * s * s)) for s in bandwidths)

    def mean_k(aa, bb):
        total = 0.0
        for i in range(aa.shape[0]):
            for j in range(bb.shape[0]):
                total += k(aa[i], bb[j])
        return total / (aa.shape[0] * bb.shape[0])

    return mean_k(x, x) + mean_k(y, y) - 2.0 * mean_k(x, y)


def _loop_cov_fro(a: np.ndarray, b: np.ndarray) -> float:
    n, da = a.shape
    db = b.shape[1]
    am = [sum(a[r, i] for r in range(n)) / n for i in range(da)]
    bm = [sum(b[r, j] for r in range(n)) / n for j in range(db)]
    acc = 0.0
    for i in range(da):
        for j in range(db):
            c = sum((a[r, i] - am[i]) * (b[r, j] - bm[j]) for r in range(n)) / (n - 1)
            acc += c * c
    return math.sqrt(acc)


def test_1_loss_primitive_oracles():
    """mmd and covariance_penalty match double-loop oracles to 1e-10;
    mmd(X, X) <= 1e-6; covariance translation invariance <= 1e-10."""
    rng = np.random.default_rng(101)
    worst_mmd = worst_cov = worst_shift = 0.0
    for trial in range(5):
        nx, ny = rng.integers(2, 9, size=2)
        d = int(rng.integers(2, 9))
        x = rng.standard_normal((nx, d))
        y = rng.standard_normal((ny, d)) + 0.5
        bw = tuple(float(b) for b in rng.uniform(0.3, 3.0, size=3))
        got = float(mmd(torch.tensor(x), torch.tensor(y), KernelSpec(bandwidths=bw)))
        worst_mmd = max(worst_mmd, abs(got - _loop_mmd(x, y, bw)))

        n = int(rng.integers(3, 9))
        a = rng.standard_normal((n, int(rng.integers(2, 9))))
        b = rng.standard_normal((n, int(rng.integers(2, 9))))
        got_cov = float(covariance_penalty(torch.tensor(a), torch.tensor(b)))
        worst_cov = max(worst_cov, abs(got_cov - _loop_cov_fro(a, b)))
        shifted = float(covariance_penalty(torch.tensor(a + 3.7), torch.tensor(b - 1.2)))
        worst_shift = max(worst_shift, abs(got_cov - shifted))

    x = torch.tensor(rng.standard_normal((8, 8)))
    self_mmd = abs(float(mmd(x, x.clone())))

    assert worst_mmd <= 1e-10, f"mmd oracle mismatch {worst_mmd:.2e}"
    assert worst_cov <= 1e-10, f"covariance oracle mismatch {worst_cov:.2e}"
    assert worst_shift <= 1e-10, f"covariance translation variance {worst_shift:.2e}"
    assert self_mmd <= 1e-6, f"mmd(X, X) = {self_mmd:.2e}"
    print(
        f"[criterion 1] PASS: mmd dev {worst_mmd:.1e}, cov dev {worst_cov:.1e}, "
        f"shift dev {worst_shift:.1e}, self-mmd {self_mmd:.1e}"
    )


# --------------------------------------------------------------------------
# criterion 2: analytic vs finite-difference gradients (double precision)
# --------------------------------------------------------------------------

GRAD_TOL = 1e-4


def _micro_model() -> DiagnosisModel:
    torch.manual_seed(202)
    cfg = ModelConfig(
        encoder=EncoderConfig(widths=(2, 2, 4, 4), feature_dim=8),
        embed_dim=4,
        fusion=FusionConfig(mode="attention", heads=1, head_dim=4, tokens=2),
    )
    return build_model(cfg).double()


def test_2_gradient_suite():
    """Relative error of autograd vs central differences <= 1e-4 for every
    differentiable building block and for the full composite objective."""
    rng = np.random.default_rng(202)
    t = lambda *s: torch.tensor(rng.standard_normal(s), dtype=torch.float64)
    spec = KernelSpec(bandwidths=(0.8, 1.6))
    errs = {}

    errs["mmd"] = relative_grad_error(lambda a, b: mmd(a, b, spec), (t(4, 3), t(4, 3)))
    errs["covariance_penalty"] = relative_grad_error(covariance_penalty, (t(4, 3), t(4, 4)))

    def f_modality(ai, asp, bi, bsp):
        pairs = {
            "a": DisentangledPair(ai, asp, "modality", "a"),
            "b": DisentangledPair(bi, bsp, "modality", "b"),
        }
        return modality_loss(pairs, spec)

    errs["modality_loss"] = relative_grad_error(f_modality, tuple(t(4, 3) for _ in range(4)))

    def f_domain(ai, asp, bi, bsp):
        pairs = {
            "A": DisentangledPair(ai, asp, "domain", "A"),
            "B": DisentangledPair(bi, bsp, "domain", "B"),
        }
        return domain_loss(pairs, spec)

    errs["domain_loss"] = relative_grad_error(f_domain, tuple(t(4, 3) for _ in range(4)))

    torch.manual_seed(203)
    pair = CrossAttentionPair(dim=8, heads=2, head_dim=3, tokens=2).double()
    c_pair = t(4, 6)
    errs["pair_fuse"] = relative_grad_error(
        lambda zq, zk: (pair(zq, zk) * c_pair).sum(), (t(4, 8), t(4, 8))
    )

    model = _micro_model()
    c_cls = t(4, 8)
    errs["classify"] = relative_grad_error(
        lambda hi, hs: (model.classify(hi, hs) * c_cls).sum(), (t(4, 4), t(4, 4))
    )

    labels = torch.tensor([1, 2, 3, 4])
    domains = np.array(["A", "A", "B", "B"])
    cfg = TrainConfig(lambda_m=0.1, lambda_d=0.5, model=model.cfg)
    model.train()

    def f_composite(vib, cur, aco):
        out = model({"vibration": vib, "current": cur, "acoustic": aco})
        return total_loss(out, labels, domains, cfg, spec).total

    errs["composite"] = relative_grad_error(
        f_composite, (t(4, 3, 8, 6), t(4, 3, 16), t(4, 6, 8, 8))
    )

    bad = {k: v for k, v in errs.items() if v > GRAD_TOL}
    assert not bad, f"gradient mismatches over {GRAD_TOL}: {bad}"
    print("[criterion 2] PASS: " + ", ".join(f"{k}={v:.1e}" for k, v in errs.items()))


# --------------------------------------------------------------------------
# criterion 3: mixing distribution and label preservation
# --------------------------------------------------------------------------


def test_3_mixing_distribution(trio_prepared):
    """10^5 draws: external fraction in 50% +- 1%, alpha range (0, 1.5] with
    zero violations, internal KS vs Beta(0.2, 0.2) at level 0.01; zero label
    or condition changes over one full epoch of mixing."""
    rng = np.random.default_rng(303)
    cfg = MixConfig()
    n = 100_000
    alphas = np.empty(n)
    ext = np.empty(n, dtype=bool)
    for i in range(n):
        alphas[i], ext[i] = sample_mix_coefficient(rng, cfg)

    frac = float(ext.mean())
    internal = alphas[~ext]
    external = alphas[ext]
    range_violations = int(
        (internal <= 0.0).sum() + (internal >= 1.0).sum()
        + (external <= 1.0).sum() + (external > 1.5).sum()
    )
    ks_p = float(scipy_stats.kstest(internal, scipy_stats.beta(0.2, 0.2).cdf).pvalue)

    index = ClassDomainIndex.build(trio_prepared.labels, trio_prepared.domains)
    counters = MixCounters()
    mix_rng = np.random.default_rng(304)
    label_violations = 0
    for i in range(trio_prepared.n):
        anchor = trio_prepared.sample(i)
        mixed = mix_sample(anchor, index, trio_prepared, cfg, mix_rng, counters)
        if mixed.label != anchor.label or mixed.condition_id != anchor.condition_id:
            label_violations += 1

    assert abs(frac - 0.5) <= 0.01, f"external fraction {frac:.4f}"
    assert range_violations == 0, f"{range_violations} coefficient range violations"
    assert ks_p > 0.01, f"KS p-value {ks_p:.4f}"
    assert label_violations == 0, f"{label_violations} label changes under mixing"
    assert sum(counters.modality_mixed.values()) > 0, "mixing never engaged"
    print(
        f"[criterion 3] PASS: external {100 * frac:.2f}%, range violations 0, "
        f"KS p={ks_p:.3f}, label violations 0 over {trio_prepared.n} samples"
    )


# --------------------------------------------------------------------------
# criterion 4: shape contract end to end
# --------------------------------------------------------------------------


def test_4_shape_contract():
    """Raw windows 1024x3 / 1024x3 / 8820x6 -> prepared 64x32x3 / 1024x3 /
    64x64x6; modality embeddings 128 + 128; fused width 768; logits 8."""
    conds = standard_conditions(2.0)
    raw = generate_samples(conds["C2"], DEFAULT_FAULT_CLASSES[0], n=2, seed=0)
    assert raw[0].vibration.shape == (1024, 3)
    assert raw[0].current.shape == (1024, 3)
    assert raw[0].acoustic.shape == (8820, 6)

    prepared = preprocess.prepare(datasets.from_samples(raw))
    assert prepared.arrays["vibration"].shape == (2, 64, 32, 3)
    assert prepared.arrays["current"].shape == (2, 1024, 3)
    assert prepared.arrays["acoustic"].shape == (2, 64, 64, 6)

    torch.manual_seed(404)
    model = build_model(ModelConfig())  # paper-scale defaults
    from mmdg.model import to_torch

    with torch.no_grad():
        out = model(to_torch(prepared.arrays))
    for m, p in out.modality_pairs.items():
        assert p.invariant.shape == (2, 128), m
        assert p.specific.shape == (2, 128), m
    assert out.fused.shape == (2, 768)
    assert out.domain_pair.invariant.shape == (2, 128)
    assert out.logits.shape == (2, 8)
    print(
        "[criterion 4] PASS: raw (1024x3, 1024x3, 8820x6) -> prepared "
        "(64x32x3, 1024x3, 64x64x6), embeddings 128+128, fused 768, logits 8"
    )


# --------------------------------------------------------------------------
# criterion 6: ablation wiring equivalences
# --------------------------------------------------------------------------

TINY_TRAIN = TrainConfig(
    batch_per_domain=24,
    epochs=2,
    model=ModelConfig(
        encoder=EncoderConfig(widths=(4, 4, 8, 8), feature_dim=32),
        embed_dim=16,
        fusion=FusionConfig(mode="attention", heads=2, head_dim=8, tokens=4),
    ),
)

TINY_TASK = TaskSpec("A6", ("C1", "C2"), "C3")


def test_6_ablation_wiring_equivalences(trio_prepared):
    """wo_dis produces bitwise the loss trace of full-with-zero-weights at a
    fixed seed; the (0, 0) sweep cell equals the wo_dis evaluation accuracy."""
    res_wo = train(TINY_TASK, replace(TINY_TRAIN, variant="wo_dis"), trio_prepared)
    res_zero = train(TINY_TASK, replace(TINY_TRAIN, lambda_m=0.0, lambda_d=0.0), trio_prepared)
    trace_wo = [r["total"] for r in res_wo.history]
    trace_zero = [r["total"] for r in res_zero.history]
    assert trace_wo == trace_zero, "loss traces differ between wo_dis and full-with-zero-weights"
    s1, s2 = res_wo.model.state_dict(), res_zero.model.state_dict()
    assert all(torch.equal(s1[k], s2[k]) for k in s1), "final weights differ"

    cell = sweep(TINY_TASK, [0.0], [0.0], TINY_TRAIN, trio_prepared)[0]
    rep_wo = run_ablation("wo_dis", TINY_TASK, TINY_TRAIN, trio_prepared)
    assert cell["accuracy"] == rep_wo.accuracy, (
        f"sweep(0,0) {cell['accuracy']} != wo_dis {rep_wo.accuracy}"
    )
    print(
        f"[criterion 6] PASS: bitwise trace over {len(trace_wo)} steps, "
        f"sweep(0,0) == wo_dis == {rep_wo.accuracy:.2f}%"
    )


# --------------------------------------------------------------------------
# criterion 7: no-leakage audit
# --------------------------------------------------------------------------


def test_7_no_leakage_audit(trio_prepared):
    """Training touches only source conditions; evaluation reuses the
    source-fitted statistics and never mixes; zero violations."""
    result = train(TINY_TASK, TINY_TRAIN, trio_prepared)

    assert result.audit.conditions_batched == TINY_TASK.source_conditions
    assert result.audit.stats_sources == TINY_TASK.source_conditions
    assert result.stats.source_conditions == TINY_TASK.source_conditions

    before = (
        result.counters.samples,
        dict(result.counters.modality_mixed),
        result.counters.external,
        result.counters.internal,
        result.counters.fallback,
    )
    report = evaluate(result, trio_prepared.for_conditions([TINY_TASK.target_condition]))
    after = (
        result.counters.samples,
        dict(result.counters.modality_mixed),
        result.counters.external,
        result.counters.internal,
        result.counters.fallback,
    )
    assert before == after, "mix counters moved during evaluation"
    assert report.conditions == ("C3",)

    with pytest.raises(ValueError):
        evaluate(result, trio_prepared.for_conditions(["C1"]))

    print(
        "[criterion 7] PASS: batched conditions == sources == stats provenance, "
        "mix counters frozen at eval, source eval refused"
    )


# --------------------------------------------------------------------------
# criterion 5: synthetic cross-condition ordering experiment
# --------------------------------------------------------------------------
# 4 constant-speed conditions, 100 samples/class/condition, 8 classes, 5 seeds,
# default (desk-scale) training config. Trains 4 variants x 4 tasks x 5 seeds,
# so this test dominates the suite's runtime (CPU-only budget: under 3 hours).

EXP_SEEDS = (0, 1, 2, 3, 4)
EXP_TASKS = ("T1", "T2", "T3", "T4")
EXP_VARIANTS = ("full", "baseline", "single_vib", "single_cur")


@pytest.fixture(scope="module")
def battery():
    conds = standard_conditions()
    samples = []
    for cid in ("C1", "C2", "C3", "C4"):
        for f in DEFAULT_FAULT_CLASSES:
            samples.extend(generate_samples(conds[cid], f, n=100, seed=0))
    return preprocess.prepare(datasets.from_samples(samples))


def test_5_dg_ordering_experiment(battery):
    """Seed-averaged orderings: (a) full on T3 at least 30 points over the
    12.5% chance level; (b) full >= baseline on every task and strictly
    greater averaged over tasks; (c) vibration-only >= current-only."""
    import time

    t0 = time.time()
    tasks = standard_tasks()
    acc: dict[tuple[str, str], list[float]] = {}
    for tid in EXP_TASKS:
        task = tasks[tid]
        target = battery.for_conditions([task.target_condition])
        for variant in EXP_VARIANTS:
            for seed in EXP_SEEDS:
                res = train(task, TrainConfig(seed=seed, variant=variant), battery)
                rep = evaluate(res, target)
                acc.setdefault((variant, tid), []).append(rep.accuracy)
                print(
                    f"    {tid} {variant:10s} seed {seed}: {rep.accuracy:6.2f}%  "
                    f"({time.time() - t0:6.0f}s elapsed)",
                    flush=True,
                )

    def mean(variant, tid):
        vals = acc[(variant, tid)]
        return sum(vals) / len(vals)

    def grand(variant):
        return sum(mean(variant, t) for t in EXP_TASKS) / len(EXP_TASKS)

    for v in EXP_VARIANTS:
        row = "  ".join(f"{t}={mean(v, t):5.1f}" for t in EXP_TASKS)
        print(f"    mean over seeds: {v:10s} {row}  | avg {grand(v):5.1f}")

    t3_full = mean("full", "T3")
    assert t3_full >= 42.5, (
        f"(a) full on T3 = {t3_full:.2f}%, needs >= 42.5% (chance 12.5 + 30); "
        f"per-seed {acc[('full', 'T3')]}"
    )
    for tid in EXP_TASKS:
        assert mean("full", tid) >= mean("baseline", tid), (
            f"(b) full {mean('full', tid):.2f}% < baseline {mean('baseline', tid):.2f}% on {tid}"
        )
    assert grand("full") > grand("baseline"), (
        f"(b) task-averaged full {grand('full'):.2f}% not strictly above "
        f"baseline {grand('baseline'):.2f}%"
    )
    assert grand("single_vib") >= grand("single_cur"), (
        f"(c) vibration-only {grand('single_vib'):.2f}% < current-only {grand('single_cur'):.2f}%"
    )
    print(
        f"[criterion 5] PASS: full T3 {t3_full:.1f}% (>= 42.5), task-avg full "
        f"{grand('full'):.1f}% > baseline {grand('baseline'):.1f}%, single_vib "
        f"{grand('single_vib'):.1f}% >= single_cur {grand('single_cur'):.1f}%; "
        f"{time.time() - t0:.0f}s"
    )
