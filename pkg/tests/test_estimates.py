import numpy as np
import pytest

from zkstrip.dispersion import propagation_omega
from zkstrip.errors import ConfigError
from zkstrip.estimates import (
    COARSE,
    ESTIMATES,
    EstimateConfig,
    _duhamel_two_sided,
    _Draw,
    grid_study,
    run_sweep,
)
from zkstrip.norms import BourgainParams

CFG = EstimateConfig()


@pytest.mark.parametrize("name", sorted(ESTIMATES))
def test_sweep_is_finite_and_replayable(name):
    sweep = run_sweep(name, 6, CFG)
    assert sweep.finite and sweep.max_ratio > 0
    again = run_sweep(name, 2, CFG, seeds=sweep.seeds[3:5])
    assert np.array_equal(again.ratios, sweep.ratios[3:5])
    rec = next(sweep.records())
    assert set(rec) == {"estimate_id", "seed", "ratio", "kind", "b", "alpha", "T"}


@pytest.mark.parametrize("name", sorted(ESTIMATES))
def test_ratios_are_scale_invariant(name):
    fn = ESTIMATES[name]
    draw = _Draw(11, CFG)
    assert fn(draw, CFG, scale=3.0) == pytest.approx(fn(draw, CFG), rel=1e-10)


def test_draws_cover_all_kinds():
    kinds = {_Draw(s, CFG).kind for s in range(12)}
    assert kinds == {"gaussian", "packet", "rough"}


def test_zero_samples():
    sweep = run_sweep("group", 0, CFG)
    assert sweep.samples == 0 and sweep.max_ratio == 0.0 and sweep.finite


def test_group_max_grows_with_b():
    lo = run_sweep("group", 10, EstimateConfig(params=BourgainParams(b=0.4, alpha=0.6)))
    hi = run_sweep("group", 10, EstimateConfig(params=BourgainParams(b=0.48, alpha=0.6)))
    assert hi.max_ratio > lo.max_ratio


def test_config_errors():
    with pytest.raises(ConfigError):
        run_sweep("bogus", 1, CFG)
    with pytest.raises(ConfigError):
        run_sweep("bilinear", 1, EstimateConfig(params=BourgainParams(b=0.3)))
    with pytest.raises(ConfigError):
        run_sweep("strichartz", 1, EstimateConfig(params=BourgainParams(b=0.35, alpha=0.6)))
    with pytest.raises(ConfigError):
        EstimateConfig(nt=15)
    with pytest.raises(ConfigError):
        EstimateConfig(band=20.0)


def test_two_sided_duhamel_constant_source():
    geom = COARSE
    m = geom.Nx // 2 + 1
    src = np.zeros((CFG.nt, geom.K, m), dtype=complex)
    src[:, 1, 3] = 1.0
    out = _duhamel_two_sided(src, CFG)[:, 1, 3]
    om = propagation_omega(geom, real=True)[1, 3]
    exact = (np.exp(1j * om * CFG.t) - 1) / (1j * om)
    assert np.allclose(out, exact, atol=1e-12)
    assert out[CFG.zero_index] == 0


def test_grid_study_small():
    study = grid_study("trace", 4, CFG)
    assert study.fine.grid[0] == 2 * study.coarse.grid[0]
    assert not study.flagged
