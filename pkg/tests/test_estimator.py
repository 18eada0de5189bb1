import numpy as np
import pytest
from sklearn.base import clone

from capclosure.constructions import extraspecial_subspace
from capclosure.estimator import CapabilityClassifier, check_subspaces, infer_n
from capclosure.spaces import make_context


def samples():
    ctx = make_context(4, 3)
    return [extraspecial_subspace(ctx), ctx.zero_v(), np.array([[1, 0, 0, 0, 0, 0]])]


def test_fit_predict_transform():
    clf = CapabilityClassifier(p=3).fit(samples())
    assert clf.n_ == 4
    assert list(clf.predict(samples())) == [False, True, True]
    feats = clf.transform(samples())
    assert feats.shape == (3, 5) and feats[0].tolist() == [5, 20, 6, 1, 0]
    assert clf.score(samples(), [False, True, True]) == 1.0
    assert list(clf.get_feature_names_out())[0] == "dim_X"


def test_params_and_clone():
    clf = CapabilityClassifier(p=5, certified_only=True)
    assert clf.get_params() == {"p": 5, "n": None, "certified_only": True}
    assert clone(clf).get_params() == clf.get_params()


def test_validation():
    with pytest.raises(ValueError):
        check_subspaces([], 3)
    with pytest.raises(ValueError):
        check_subspaces(np.zeros((2, 6), dtype=int), 3)
    with pytest.raises(ValueError):
        check_subspaces([np.zeros((1, 5), dtype=int)], 3)
    with pytest.raises(ValueError):
        check_subspaces([np.zeros((1, 6), dtype=int), np.zeros((1, 10), dtype=int)], 3)
    with pytest.raises(ValueError):
        check_subspaces([np.zeros((1, 6))], 3)
    with pytest.raises(ValueError):
        check_subspaces([make_context(4, 5).zero_v()], 3)
    with pytest.raises(ValueError):
        CapabilityClassifier(p=3, n=5).fit(samples())
    assert infer_n(15) == 6


def test_predict_before_fit():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        CapabilityClassifier().predict(samples())
