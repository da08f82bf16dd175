import numpy as np
import pandas as pd
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hnreserve import HalfNormalChainLadder, MackChainLadder, TriangleCumulator
from hnreserve.exceptions import ContractError, ShapeError
from hnreserve.reserving import compare, elicit_prior
from hnreserve.triangle import INCREMENTAL, decumulate

from conftest import square


def test_params_and_clone():
    est = HalfNormalChainLadder(alpha=3.0, beta=0.5)
    assert est.get_params() == {"alpha": 3.0, "beta": 0.5, "input_kind": "cumulative"}
    twin = clone(est).set_params(beta="auto")
    assert twin.beta == "auto" and est.beta == 0.5


def test_mack_fit_predict(fixture3):
    est = MackChainLadder().fit(fixture3)
    assert est.factors_ == pytest.approx([304 / 210, 1.1])
    assert est.ibnr_ == pytest.approx(86.4857142857, abs=1e-9)
    full = est.predict(fixture3)
    assert full.shape == (3, 3) and not np.isnan(full).any()
    assert full[2, 2] == pytest.approx(191.0857142857, abs=1e-9)
    assert est.reserve(fixture3) == pytest.approx(est.ibnr_)


def test_bayes_matches_engine(fixture3):
    est = HalfNormalChainLadder(alpha=3.0).fit(fixture3)
    ref = compare(fixture3, elicit_prior(fixture3, 3.0)).bayes
    assert est.ibnr_ == ref.total_reserve
    assert est.prior_.mode == "auto_eq24"
    ci = est.credible_intervals(0.9)
    assert ci.shape == (2, 2) and np.all(ci[:, 0] < ci[:, 1])


def test_explicit_prior(fixture3):
    est = HalfNormalChainLadder(alpha=2.0, beta=[1.0, 2.0]).fit(fixture3)
    assert est.prior_.beta == (1.0, 2.0)
    with pytest.raises(ValueError):
        HalfNormalChainLadder(beta="nope").fit(fixture3)


def test_array_and_dataframe_inputs(fixture3):
    arr = fixture3.values.copy()
    frame = pd.DataFrame(arr, index=["2019", "2020", "2021"])
    a = MackChainLadder().fit(arr)
    b = MackChainLadder().fit(frame)
    assert a.ibnr_ == b.ibnr_
    assert b.report_.accident_years == ("2020", "2021")


def test_incremental_input(fixture3):
    inc = decumulate(fixture3).values
    est = MackChainLadder(input_kind=INCREMENTAL).fit(inc)
    assert est.ibnr_ == pytest.approx(86.4857142857, abs=1e-9)


def test_errors(fixture3):
    with pytest.raises(NotFittedError):
        MackChainLadder().predict(fixture3)
    est = MackChainLadder().fit(fixture3)
    with pytest.raises(ContractError):
        est.predict(square([[1, 2], [3]]))
    with pytest.raises(ShapeError):
        MackChainLadder().fit(np.ones((2, 3)))


def test_cumulator_round_trip(fixture3):
    inc = decumulate(fixture3)
    tr = TriangleCumulator().fit(inc)
    assert tr.transform(inc) == fixture3
    assert tr.inverse_transform(fixture3) == inc
    assert TriangleCumulator().fit_transform(inc.values) == fixture3
