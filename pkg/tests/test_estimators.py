import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hamforge.clock import build_history_state
from hamforge.estimators import ClockCompiler, GadgetReducer, LowEnergySpectrum
from hamforge.pauli import PauliSum

from conftest import CIRCUITS


def test_clock_compiler_energies():
    c = CIRCUITS["accepting_x"]()
    est = ClockCompiler(form="log-local").fit(c)
    eta = build_history_state(c, [1.0]).vector
    E = est.transform(eta[None, :])
    assert E.shape == (1, 1) and abs(E[0, 0]) < 1e-9
    assert est.get_params() == {"form": "log-local", "weights": "auto"}


def test_clock_compiler_manual_weights_and_clone():
    est = ClockCompiler(form="two-local", weights=(1, 2, 3, 4))
    fitted = est.fit(CIRCUITS["entangling"]())
    assert fitted.weights_ == {"J_in": 1.0, "J_2": 3.0, "J_1": 2.0, "J_clock": 4.0}
    assert clone(est).get_params()["weights"] == (1, 2, 3, 4)


def test_not_fitted_and_bad_input():
    with pytest.raises(NotFittedError):
        ClockCompiler().transform(np.zeros((1, 2)))
    with pytest.raises(TypeError):
        ClockCompiler().fit(np.zeros((2, 2)))
    est = ClockCompiler(form="log-local").fit(CIRCUITS["accepting_x"]())
    with pytest.raises(ValueError):
        est.transform(np.zeros((1, 3)))


def test_gadget_reducer():
    H3 = PauliSum(3, [(1.0, {0: "Z", 1: "Z", 2: "Z"})])
    red = GadgetReducer(delta=0.1).fit(H3)
    assert red.c_r_ == 2.0 ** 17 and red.n_triples_ == 1
    assert red.transform(H3).locality == 2
    with pytest.raises(ValueError):
        red.transform(PauliSum(3))


def test_low_energy_spectrum():
    H = PauliSum(1, [(1.0, {0: "Z"})])
    est = LowEnergySpectrum(k=1).fit(H)
    assert est.eigenvalues_[0] == pytest.approx(-1.0)
    amps = est.transform(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(np.abs(amps[:, 0]), [1.0, 0.0])
