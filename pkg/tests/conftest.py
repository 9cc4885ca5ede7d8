import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hybridface import synthetic
from hybridface.dataset_io import DatasetSplit, TestSet
from hybridface.mlp import MlpConfig
from hybridface.pipeline import SystemConfig, train_system
from hybridface.preprocess import PreprocessConfig

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


TOY_CFG = SystemConfig(preprocess=PreprocessConfig(12, 12),
                       mlp=MlpConfig(hidden_units=8, max_epochs=400))


@pytest.fixture(scope="session")
def toy_split():
    """Three synthetic subjects, three training poses each."""
    gen = synthetic.SyntheticFaces(size=12, seed=3)
    train = [im for s in range(3) for im in gen.labeled(s, range(3))]
    known = TestSet("known", True, [im for s in range(3) for im in gen.labeled(s, [3])])
    unknown = TestSet("unknown", False, gen.labeled(7, range(2)))
    return DatasetSplit(train, [known, unknown])


@pytest.fixture(scope="session")
def toy_model(toy_split):
    return train_system(toy_split, TOY_CFG)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record a criterion outcome; the lines are printed after the run."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number, title, ok, detail=""):
        lines.append(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}"
                     + (f"  [{detail}]" if detail else ""))
        assert ok, f"criterion {number} failed: {detail}"
    record.skip = lambda number, title, why: (
        lines.append(f"SKIP  criterion {number:>2}: {title}  [{why}]"), pytest.skip(why))
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
