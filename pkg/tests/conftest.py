import numpy as np
import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record a one-line acceptance verdict, printed in the terminal summary."""

    def _report(criterion: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f" -- {detail}" if detail else ""))

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# -- desk-scale trained networks, shared by the fit and acceptance tests --------

DESK_ROWS = 20_000
DESK_DATA_SEED = 11
DESK_SPLIT_SEED = 12
DESK_TRAIN_SEED = 3
DESK_BATCH = 256

_DESK_CACHE: dict = {}


def train_desk(kind_text: str):
    """Train (once per session) the desk-scale network for a feature-set kind.

    Returns ``(model, trace, split, seconds)``.
    """
    import time

    from garchnet import dataset as ds
    from garchnet.mlp import DESK_HIDDEN, MlpArchitecture, TrainConfig, train
    from garchnet.params import FeatureSetKind, sample_params

    if kind_text not in _DESK_CACHE:
        kind = FeatureSetKind.parse(kind_text)
        rows = ds.build_rows(sample_params(kind, DESK_ROWS, DESK_DATA_SEED), kind)
        split = ds.split_40_40_20(rows, DESK_SPLIT_SEED)
        cfg = TrainConfig(learning_rate=0.01, max_epochs=1000, patience=100, batch_size=DESK_BATCH, seed=DESK_TRAIN_SEED)
        t0 = time.perf_counter()
        model, trace = train(MlpArchitecture(3, DESK_HIDDEN, 1), cfg, split, ds.fit_scaler(split.train), kind=kind)
        _DESK_CACHE[kind_text] = (model, trace, split, time.perf_counter() - t0)
    return _DESK_CACHE[kind_text]


@pytest.fixture(scope="session")
def desk_g6():
    return train_desk("g6")
