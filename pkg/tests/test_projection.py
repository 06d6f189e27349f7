import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamforge.clock import penalty_weight
from hamforge.projection import (
    PreconditionError,
    ProjectionInstance,
    canned_instance,
    penalty_instance,
    projection_bounds,
    random_instance,
)
from hamforge.spectral import Subspace


def test_canned_instance():
    res = projection_bounds(canned_instance(10.0))
    assert res.ok
    assert res.lower == pytest.approx(-0.125)
    assert res.lambda_restricted == pytest.approx(0.0)
    # exact: lowest eigenvalue of [[0, 1], [1, 10]]
    assert res.lambda_H == pytest.approx(5 - np.sqrt(26))
    assert res.to_text().startswith("projlemma lower -0.125 lambda ")


def test_penalty_weight_gives_one_eighth():
    K = 1.0
    res = projection_bounds(canned_instance(penalty_weight(K)))
    assert res.offset == pytest.approx(1 / 8, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_sandwich_random(seed):
    res = projection_bounds(random_instance(np.random.default_rng(seed)))
    assert res.ok


def test_bound_tightens_with_J():
    # small K keeps the 1e-7 gap visible at J = 1e6 K
    rng = np.random.default_rng(7)
    inst = random_instance(rng, dim=6, J_factor=3.0, max_norm=0.1)
    gaps = []
    for factor in (3.0, 30.0, 3e3, 1e6):
        res = projection_bounds(penalty_instance(inst.H1, inst.S, factor * res_K(inst)))
        gaps.append(res.lambda_restricted - res.lambda_H)
    assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-7


def res_K(inst):
    return float(np.abs(np.linalg.eigvalsh(inst.H1)).max())


def test_preconditions():
    H1 = np.array([[0, 1], [1, 0]], dtype=complex)
    S = Subspace.standard(2, [0])
    with pytest.raises(PreconditionError):
        projection_bounds(penalty_instance(H1, S, 1.5))  # J <= 2K
    leaky = ProjectionInstance(H1, np.eye(2), S, 1.0)
    with pytest.raises(PreconditionError):
        projection_bounds(leaky)
    weak = ProjectionInstance(H1, np.diag([0.0, 5.0]), S, 10.0)
    with pytest.raises(PreconditionError):
        projection_bounds(weak)
