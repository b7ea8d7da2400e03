import numpy as np
import pytest

from mmdg import datasets, preprocess
from mmdg.synthgen import DEFAULT_FAULT_CLASSES, generate_samples, standard_conditions

CONDS = standard_conditions(10.0)


def build_raw(condition_ids, per_class, seed=0):
    chunks = []
    for cid in condition_ids:
        for f in DEFAULT_FAULT_CLASSES:
            chunks.append(datasets.from_samples(generate_samples(CONDS[cid], f, per_class, seed)))
    return datasets.merge(chunks)


@pytest.fixture(scope="session")
def tiny_raw():
    """Two conditions x 8 classes x 6 windows."""
    return build_raw(("C2", "C3"), per_class=6)


@pytest.fixture(scope="session")
def tiny_prepared(tiny_raw):
    return preprocess.prepare(tiny_raw)


@pytest.fixture(scope="session")
def trio_prepared():
    """Three conditions x 8 classes x 10 windows, for harness-level tests."""
    return preprocess.prepare(build_raw(("C1", "C2", "C3"), per_class=10))
