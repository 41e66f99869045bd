import math

import numpy as np
import pytest

from etalab.decay import DecayError, decay_check
from etalab.spectral import CoverSpec, ModelOperator, heat_kernel, line_gap

GAPPED = ModelOperator(2, 1.0, 0.3, 0.25)
WITH_V = ModelOperator(2, 1.0, 0.3, 0.25, cos_terms=((1, 0.2),))


@pytest.mark.parametrize("op,cover", [(GAPPED, CoverSpec.line()), (WITH_V, CoverSpec.finite(8)), (WITH_V, CoverSpec.line())])
def test_fit_dominates_with_gap_rate(op, cover):
    fit = decay_check(op, cover)
    assert fit.violations == [] and fit.min_margin >= 0
    assert fit.eps >= 0.95 * fit.gap
    assert fit.eps1 > 0 and fit.c6 > 0
    kinds = {s.kind for s in fit.samples}
    assert kinds == {"large-t", "small-t", "offdiag"}


def test_line_gap_used_on_line():
    assert decay_check(GAPPED, CoverSpec.line()).gap == pytest.approx(line_gap(GAPPED))


def test_offdiagonal_ratio():
    mu, t = 1.5, 0.5
    k1 = abs(np.trace(heat_kernel(GAPPED, CoverSpec.line(), t, 0.25, 1.25).value))
    k3 = abs(np.trace(heat_kernel(GAPPED, CoverSpec.line(), t, 0.25, 3.25).value))
    assert k3 / k1 <= math.exp(-(9 - 1) / (4 * mu * t * t)) * (1 + 3) / (1 + 1)


def test_chirality_trivial_fit():
    fit = decay_check(ModelOperator(2, 1.0, 0.0, 0.25, cos_terms=((1, 0.2),)), CoverSpec.finite(4))
    assert fit.all_zero and fit.c5 == 0 and fit.c6 == 0 and fit.violations == []


def test_negative_margin_is_reported():
    fit = decay_check(GAPPED, CoverSpec.finite(6), raise_on_violation=False)
    s = next(x for x in fit.samples if x.kind == "large-t" and x.value > 1e-6)
    s.bound = 0.0
    assert s in fit.violations


def test_argument_checks():
    with pytest.raises(ValueError):
        decay_check(GAPPED, CoverSpec.finite(2), mu=1.0)
    with pytest.raises(ValueError):
        decay_check(GAPPED, CoverSpec.finite(2), a_grid=())



def test_violation_raises(monkeypatch):
    import etalab.decay as decay

    # a dominating function that cannot dominate: every prefactor forced to 0
    monkeypatch.setattr(decay, "_dominate", lambda samples, shape: 0.0)
    with pytest.raises(DecayError, match="negative margin"):
        decay_check(GAPPED, CoverSpec.finite(4))
