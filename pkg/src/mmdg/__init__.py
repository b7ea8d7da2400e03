"""Multi-modal domain-generalization fault diagnosis toolkit.

Pipeline: synthesize raw motor signals (synthgen), turn them into model
tensors (preprocess), augment across source domains (augment), encode and
disentangle (encoders, disentangle), fuse (fusion, model), and train/evaluate
on cross-condition tasks (harness). The `mmdg` command drives the same steps
from the shell.
"""

from .augment import ClassDomainIndex, MixConfig, MixCounters, mix_coefficient, mix_sample, sample_mix_coefficient
from .datasets import Sample, SignalDataset, from_samples, load, merge, save
from .disentangle import (
    DisentangledPair,
    EmbedPair,
    KernelSpec,
    covariance_penalty,
    domain_loss,
    median_bandwidths,
    mmd,
    modality_loss,
)
from .encoders import EncoderConfig, ImageEncoder, WaveEncoder, build_encoder
from .fusion import CrossAttentionPair, TripleFusion
from .harness import (
    EvalReport,
    LossBundle,
    TaskSpec,
    TrainConfig,
    TrainResult,
    apply_variant,
    evaluate,
    load_checkpoint,
    run_ablation,
    save_checkpoint,
    standard_tasks,
    sweep,
    total_loss,
    train,
)
from .model import DiagnosisModel, FusionConfig, ModelConfig, build_model, to_torch
from .preprocess import NormStats, fit_norm_stats, mel_filterbank, mel_image, normalize, prepare, stft_image
from .synthgen import (
    ConditionSpec,
    FaultClass,
    Profile,
    RawMultiModalSample,
    SpectralComponent,
    fault_class,
    generate_samples,
    make_condition,
    standard_conditions,
)

__version__ = "0.1.0"
