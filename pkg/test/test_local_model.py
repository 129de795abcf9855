import numpy as np
import pytest
from pydantic import ValidationError

from sym_workbench.errors import InputError
from sym_workbench.local_model import (
    ChartPoint,
    ChartSpec,
    chart_presentation,
    equivalence_report,
    membership_check,
    perturb,
    sample_point,
)

CHARTS = [
    ChartSpec(n=n, k=k, nu=nu, mu=mu)
    for n in range(2, 5)
    for k in range(1, n)
    for nu in range(1, k + 1)
    for mu in range(k + 1, n + 1)
]


@pytest.mark.parametrize("spec", CHARTS, ids=lambda s: f"n{s.n}-k{s.k}-nu{s.nu}-mu{s.mu}")
def test_formulations_agree(spec):
    report = equivalence_report(spec, 3, 4, samples=20, rng=np.random.default_rng(spec.n * 100 + spec.mu))
    assert report.disagreements == 0
    assert report.passed


@pytest.mark.parametrize("payload", [
    {"n": 3, "k": 1, "nu": 2, "mu": 3},
    {"n": 3, "k": 2, "nu": 1, "mu": 2},
    {"n": 3, "k": 1, "nu": 1, "mu": 4},
    {"n": 1, "k": 1, "nu": 1, "mu": 2},
])
def test_invalid_charts(payload):
    with pytest.raises(ValidationError):
        ChartSpec.model_validate(payload)


def test_chart_needs_precision_two():
    with pytest.raises(InputError):
        equivalence_report(ChartSpec(n=2, k=1, nu=1, mu=2), 3, 1)


def test_presentation():
    presentation = chart_presentation(ChartSpec(n=3, k=1, nu=1, mu=2), 5)
    assert len(presentation.variables) == 3
    assert list(presentation.dependent) == ["s3/s1"]
    assert "5" in presentation.relation
    assert chart_presentation(ChartSpec(n=2, k=1, nu=1, mu=2), 3).dependent == {}


def test_sample_and_perturbation():
    spec = ChartSpec(n=4, k=2, nu=1, mu=4)
    rng = np.random.default_rng(5)
    point = sample_point(spec, 5, 3, rng)
    assert membership_check(spec, point).accepted
    other = membership_check(spec, perturb(spec, point, rng, exponent=1))
    assert other.agree
    assert not other.accepted


def test_pivots_must_be_units():
    spec = ChartSpec(n=2, k=1, nu=1, mu=2)
    with pytest.raises(InputError):
        membership_check(spec, ChartPoint(p=3, N=3, s=[3, 1], t=[1, 1]))
    with pytest.raises(InputError):
        membership_check(spec, ChartPoint(p=3, N=3, s=[1, 3], t=[1]))
