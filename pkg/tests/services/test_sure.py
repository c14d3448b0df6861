from __future__ import annotations

import numpy as np
import pytest

from vesselseg.models import Image, SureMode, TransformKind
from vesselseg.services.sure import (
    SureDataError,
    SureParameterError,
    dump_risk_curve,
    estimate_noise_sigma,
    select_threshold,
    sure_threshold,
    threshold_source,
)
from vesselseg.services.tight_frame import decompose


def _oracle_index(values: np.ndarray) -> int:
    """1-based index minimizing the risk, summed term by term for every candidate."""
    squares = sorted(float(v) ** 2 for v in values)
    size = len(squares)
    best_index, best_risk = 0, None
    for j in range(1, size + 1):
        candidate = squares[j - 1]
        total = 0.0
        for square in squares:
            total += min(square, candidate)
        risk = (size - 2 * j + total) / size
        if best_risk is None or risk < best_risk:
            best_index, best_risk = j, risk
    return best_index


def _random_sequence(rng: np.random.Generator) -> np.ndarray:
    size = int(rng.integers(1, 513))
    values = rng.integers(-20, 21, size=size).astype(float)
    if rng.random() < 0.5:
        values[rng.random(size) < 0.8] = 0.0
    return values


def test_matches_term_by_term_oracle(rng) -> None:
    for _ in range(200):
        values = _random_sequence(rng)
        lam, curve = sure_threshold(values)
        assert curve.i_best == _oracle_index(values)
        assert lam == np.sqrt(curve.a[curve.i_best - 1])


def test_worked_example() -> None:
    lam, curve = sure_threshold(np.array([0.0, 0.0, 0.0, 10.0]))
    assert curve.a.tolist() == [0.0, 0.0, 0.0, 100.0]
    assert curve.s.tolist() == [0.0, 0.0, 0.0, 100.0]
    assert curve.risk.tolist() == pytest.approx([0.5, 0.0, -0.5, 24.0])
    assert curve.i_best == 3
    assert lam == 0.0


def test_all_zero_input_selects_last_index() -> None:
    lam, curve = sure_threshold(np.zeros(4))
    assert curve.risk.tolist() == pytest.approx([0.5, 0.0, -0.5, -1.0])
    assert curve.i_best == 4
    assert lam == 0.0


def test_bookkeeping_arrays(rng) -> None:
    values = rng.normal(size=64)
    lam, curve = sure_threshold(values)
    assert np.all(np.diff(curve.a) >= 0)
    assert np.allclose(curve.b, np.cumsum(np.sort(values**2)))
    assert np.all(np.diff(curve.c) == -1)
    assert curve.c[0] == 63
    assert lam**2 == pytest.approx(curve.a[curve.i_best - 1])
    assert np.any(np.isclose(values**2, lam**2))


def test_permutation_and_sign_invariance(rng) -> None:
    values = rng.integers(-9, 10, size=100).astype(float)
    lam, curve = sure_threshold(values)

    shuffled_lam, shuffled_curve = sure_threshold(rng.permutation(values))
    assert shuffled_lam == lam
    assert shuffled_curve.i_best == curve.i_best

    negated_lam, negated_curve = sure_threshold(-values)
    assert negated_lam == lam
    assert negated_curve.i_best == curve.i_best


def test_scaling_scales_threshold_when_index_is_unchanged(rng) -> None:
    values = rng.normal(size=200)
    lam, curve = sure_threshold(values)
    scaled_lam, scaled_curve = sure_threshold(0.5 * values)
    if scaled_curve.i_best == curve.i_best:
        assert scaled_lam == pytest.approx(0.5 * lam)


def test_rejects_empty_and_non_finite_values() -> None:
    with pytest.raises(SureParameterError):
        sure_threshold(np.array([]))
    with pytest.raises(SureDataError):
        sure_threshold(np.array([1.0, np.nan]))
    with pytest.raises(SureDataError):
        sure_threshold(np.array([np.inf]))


def test_threshold_source_modes(rng) -> None:
    img = Image(rng.random((3, 3)))
    coeffs = decompose(Image(rng.random((32, 32))), TransformKind())
    assert threshold_source(coeffs, img, SureMode.IMAGE).shape == (9,)
    assert threshold_source(coeffs, img, "coefficients").size == 8 * 32 * 32


def test_zero_image_yields_zero_threshold() -> None:
    img = Image(np.zeros((32, 32)))
    coeffs = decompose(img, TransformKind())
    lam, _ = select_threshold(coeffs, img, SureMode.COEFFICIENTS)
    assert lam == 0.0


def test_both_sources_give_nonnegative_thresholds(rng) -> None:
    img = Image.clamped(0.5 + 0.1 * rng.normal(size=(32, 32)))
    coeffs = decompose(img, TransformKind())
    from_coefficients, _ = select_threshold(coeffs, img, SureMode.COEFFICIENTS)
    from_image, _ = select_threshold(coeffs, img, SureMode.IMAGE)
    assert from_coefficients >= 0.0
    assert from_image >= 0.0


def test_noise_estimate_tracks_noise_level(rng) -> None:
    quiet = decompose(0.5 + 0.01 * rng.normal(size=(64, 64)), TransformKind())
    loud = decompose(0.5 + 0.1 * rng.normal(size=(64, 64)), TransformKind())
    assert estimate_noise_sigma(loud) > 5 * estimate_noise_sigma(quiet)
    assert estimate_noise_sigma(decompose(np.zeros((32, 32)), TransformKind())) == 1.0


def test_dump_risk_curve_writes_csv(tmp_path) -> None:
    _, curve = sure_threshold(np.array([0.0, 0.0, 0.0, 10.0]))
    path = tmp_path / "debug" / "risk_curve.csv"
    dump_risk_curve(curve, path)

    lines = path.read_text().splitlines()
    assert lines[0] == "j,a,risk"
    assert len(lines) == 5
    assert lines[4].split(",")[0] == "4"
