import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from crossdiff.errors import ValidationError
from crossdiff.estimators import FemSolver, ParticleSolver
from crossdiff.model import ModelCoefficients

CO = ModelCoefficients.from_matrix([[1, 1], [1, 1]])
GRID = np.linspace(0, 1, 41)
X0 = np.column_stack([np.exp(-((GRID - 0.4) / 0.08) ** 2), np.exp(-((GRID - 0.6) / 0.08) ** 2)])


def particle(**kw):
    params = dict(coeffs=CO, domain=(0, 1), epsilon=0.03, dt=2e-4, T=2e-3)
    params.update(kw)
    return ParticleSolver(**params)


def fem(**kw):
    params = dict(coeffs=CO, domain=(0, 1), dt=2e-4, T=2e-3, delta=1e-3)
    params.update(kw)
    return FemSolver(**params)


@pytest.mark.parametrize("make", [particle, fem])
def test_params_and_clone(make):
    est = make()
    params = est.get_params()
    assert params["T"] == 2e-3 and params["coeffs"] is CO
    twin = clone(est)
    assert twin.get_params()["dt"] == est.dt
    est.set_params(T=1e-3)
    assert est.T == 1e-3


@pytest.mark.parametrize("make", [particle, fem])
def test_not_fitted(make):
    with pytest.raises(NotFittedError):
        make().predict(GRID)


@pytest.mark.parametrize("make", [particle, fem])
def test_fit_predict_shapes(make):
    est = make(snapshot_times=(0.0, 1e-3)).fit(X0)
    assert est.n_steps_ == 10 and est.dt_ == pytest.approx(2e-4)
    assert est.predict(np.linspace(0, 1, 7)).shape == (7, 2)
    assert est.predict(np.linspace(0, 1, 7)[:, None]).shape == (7, 2)
    assert sorted(est.snapshots_) == pytest.approx([0.0, 1e-3])
    g = est.grid_function()
    assert g.grid.size == 41


def test_particle_mass_and_initializers():
    for init in ("nnls", "simple"):
        est = particle(init=init).fit(X0)
        assert est.ensemble_.mass == est.initial_ensemble_.mass
    with pytest.raises(ValidationError):
        particle(init="random").fit(X0)


def test_fem_predict_interpolates_nodes():
    est = fem().fit(X0)
    assert np.array_equal(est.predict(GRID)[:, 0], est.state_.u1)


@pytest.mark.parametrize("X", [np.ones((5, 3)), -np.ones((5, 2)), np.ones((1, 2)), np.full((4, 2), np.nan)])
def test_rejects_bad_initial_samples(X):
    with pytest.raises(ValueError):
        fem().fit(X)


def test_rejects_bad_coefficients_and_domain():
    with pytest.raises(ValidationError):
        fem(coeffs={"a11": 1}).fit(X0)
    with pytest.raises(ValidationError):
        fem(domain=(1, 0)).fit(X0)
