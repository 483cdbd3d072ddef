import pytest

# Noise pairs of the gated error study.  The full default grid has six
# cells; these three carry the banded-mean and ordering checks, and each
# takes several minutes at 20 replicates, so the study runs once per
# session on first use.
ACCEPTANCE_PAIRS = ((1e-3, 1e-3), (1e-4, 1e-3), (1e-4, 1e-4))


@pytest.fixture(scope="session")
def study_report():
    from sphdeconv.bench import run_study

    return run_study(pairs=ACCEPTANCE_PAIRS, n_replicates=20, master_seed=1234)
