import numpy as np
import pytest
from hypothesis import given, strategies as st

from crossdiff.errors import ValidationError
from crossdiff.model import (ConstantDrift, Ellipticity, LinearDrift, ModelCoefficients,
                             classify_matrix, flux, make_drift, reaction)

nonneg = st.floats(0, 50, allow_nan=False)
real = st.floats(-50, 50, allow_nan=False)


@pytest.mark.parametrize("A, disc, det, label", [
    ([[3, 3], [1, 1]], -4.0, 0.0, Ellipticity.DEGENERATE),
    ([[1, 0], [0, 1]], 4.0, 1.0, Ellipticity.ELLIPTIC),
    ([[1, 1], [1, 1]], 0.0, 0.0, Ellipticity.DEGENERATE),
])
def test_classify_examples(A, disc, det, label):
    cls = classify_matrix(ModelCoefficients.from_matrix(A))
    assert cls.discriminant == disc
    assert cls.detA == det
    assert cls.label is label
    assert len(cls.eigenvalues) == 2


def test_eigenvalues_are_those_of_A():
    cls = classify_matrix(ModelCoefficients.from_matrix([[3, 3], [1, 1]]))
    assert sorted(np.real(cls.eigenvalues)) == pytest.approx([0.0, 4.0], abs=1e-12)


@pytest.mark.parametrize("field", ["a11", "a12", "c1", "alpha2", "beta21"])
def test_negative_coefficients_rejected(field):
    with pytest.raises(ValidationError) as err:
        ModelCoefficients(**{field: -1.0})
    assert field in err.value.fields


def test_drift_weight_may_be_negative():
    assert ModelCoefficients(b1=-2.0).b1 == -2.0


def test_non_finite_rejected():
    with pytest.raises(ValidationError):
        ModelCoefficients(a11=np.inf)


def test_flux_examples():
    co = ModelCoefficients()
    assert flux(co, 1.0, 1.0, 0.0, 0.0, 0.0) == (0.0, 0.0)
    co = ModelCoefficients.from_matrix([[1, 1], [1, 1]], b=(1, 10))
    assert flux(co, 2.0, 0.0, 1.0, 0.0, 1.0) == (4.0, 0.0)
    co = ModelCoefficients.from_matrix(np.zeros((2, 2)), c=(1, 1))
    assert flux(co, 0.3, 0.7, 5.0, -3.0, 0.0) == (5.0, -3.0)


def test_reaction_examples():
    co = ModelCoefficients(alpha1=1, alpha2=1, beta11=1, beta22=1)
    assert reaction(co, 0.0, 0.0) == (0.0, 0.0)
    assert reaction(co, 1.0, 1.0) == (0.0, 0.0)
    co = ModelCoefficients(alpha1=2, beta11=1, beta12=1)
    assert reaction(co, 1.0, 0.5) == (0.5, 0.0)


def test_drift_presets():
    q = make_drift("linear", slope=-3.0, center=0.5)
    assert isinstance(q, LinearDrift)
    assert q(np.array([0.0, 0.5, 1.0])) == pytest.approx([1.5, 0.0, -1.5])
    assert make_drift("constant", value=2.0)(0.3, 1.0) == 2.0
    assert ConstantDrift(0.0)(np.zeros(3)).shape == (3,)
    with pytest.raises(ValidationError):
        make_drift("spiral")


coeff_sets = st.builds(
    lambda a, c, b, al, be: ModelCoefficients.from_matrix(np.reshape(a, (2, 2)), c, b, al, np.reshape(be, (2, 2))),
    st.lists(nonneg, min_size=4, max_size=4), st.tuples(nonneg, nonneg), st.tuples(real, real),
    st.tuples(nonneg, nonneg), st.lists(nonneg, min_size=4, max_size=4))


@pytest.mark.invariant
@given(st.lists(nonneg, min_size=4, max_size=4), st.floats(0.01, 100))
def test_classification_scale_consistent(a, lam):
    A = np.reshape(a, (2, 2))
    base = classify_matrix(ModelCoefficients.from_matrix(A))
    scaled = classify_matrix(ModelCoefficients.from_matrix(lam * A))
    assert scaled.discriminant == pytest.approx(lam ** 2 * base.discriminant, rel=1e-9, abs=1e-9)
    if abs(base.discriminant) > 1e-9 * max(1.0, max(a)) ** 2:
        assert scaled.label is base.label


@pytest.mark.invariant
@given(coeff_sets, nonneg, nonneg, real, real, real, real, real, real, st.floats(-3, 3))
def test_flux_linear_in_gradients(co, u1, u2, g1, g2, q, h1, h2, r, s):
    J_a = np.array(flux(co, u1, u2, g1, g2, q))
    J_b = np.array(flux(co, u1, u2, h1, h2, r))
    J_c = np.array(flux(co, u1, u2, g1 + s * h1, g2 + s * h2, q + s * r))
    assert J_c == pytest.approx(J_a + s * J_b, rel=1e-9, abs=1e-6)


@pytest.mark.invariant
@given(coeff_sets, nonneg)
def test_no_spontaneous_species(co, u):
    assert reaction(co, u, 0.0)[1] == 0.0
    assert reaction(co, 0.0, u)[0] == 0.0
