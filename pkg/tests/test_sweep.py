import math

import numpy as np
import pytest

from supoptics.errors import InvalidArgumentError
from supoptics.sweep_api import (PRESETS, SweepAPI, SweepJob, eta_report, husimi_grid, klyshko_table, pair_sweep,
                                 run_preset)
from supoptics.validate_api import CheckResult, Validator, rel_err, standard_grid


def test_sweep_job_validation():
    with pytest.raises(InvalidArgumentError):
        SweepJob('socs', (('q', 2),), axis='phase')
    with pytest.raises(InvalidArgumentError):
        SweepJob('socs', (('wigner', 2),))
    with pytest.raises(InvalidArgumentError):
        SweepJob('socs', (('q', 2),), span=(0.0, 1.0, 1))
    with pytest.raises(InvalidArgumentError):
        SweepJob('coherent', (('q', 2),))


def test_sweep_columns_and_order():
    job = SweepJob('socs', (('q', 2), ('hoa', 3)), span=(0.5, 2.0, 7), backend='both')
    assert job.columnNames() == ['q_l2_closed', 'hoa_l3_closed', 'q_l2_oracle', 'hoa_l3_oracle']
    api = SweepAPI(job, workers=3, show_progress=False)
    df = api.run()
    np.testing.assert_allclose(df['gamma'], np.linspace(0.5, 2.0, 7))
    np.testing.assert_allclose(df['q_l2_closed'], df['q_l2_oracle'], rtol=1e-9, atol=1e-12)
    assert api.undefined == 0


def test_sweep_counts_undefined_cells():
    api = SweepAPI(SweepJob('socs', (('q', 2),), span=(0.0, 1.0, 3)), workers=1, show_progress=False)
    df = api.run()
    assert math.isnan(df['q_l2_closed'][0])
    assert api.undefined == 1


def test_s_axis_sweep():
    job = SweepJob('sots', (('hoa', 2),), span=(0.0, 1.0, 5), gamma=1.0, axis='s')
    df = SweepAPI(job, show_progress=False).run()
    assert list(df.columns) == ['s', 'hoa_l2_closed']
    # s = 0, t = 1, nbar = 1
    assert df['hoa_l2_closed'][0] == pytest.approx(17 / 9)


def test_pair_sweep_prefixes_families():
    df = pair_sweep([('q', 2)], s=0.5)
    assert list(df.columns) == ['gamma', 'socs_q_l2_closed', 'sots_q_l2_closed']
    assert len(df) == 81


def test_klyshko_and_husimi_tables():
    df = klyshko_table(2.0, 0.2, m_max=6)
    assert (df['socs_klyshko'] < 0).all()
    grid = husimi_grid(1.0, 0.2)
    assert list(grid.columns) == ['re_beta', 'im_beta', 'socs_q', 'sots_q']
    assert len(grid) == 61 * 61
    assert (grid[['socs_q', 'sots_q']] >= 0).all().all()


def test_eta_report():
    df = eta_report()
    assert len(df) == 2 * 27 * 3
    socs0 = df[(df['params'] == 'socs s=0.2 gamma=1 eta=0') & (df['m'] == 0) & (df['n'] == 0)].iloc[0]
    assert socs0['paper_value'] == pytest.approx(4 / 3)
    assert socs0['definition_value'] == pytest.approx(1)
    sots0 = df[df['params'].str.startswith('sots') & df['params'].str.endswith('eta=0')]
    assert sots0['note'].str.startswith('degenerate').all()
    assert sots0['paper_value'].isna().all()


def test_presets_are_complete():
    for n in range(1, 14):
        assert f'fig{n}' in PRESETS
    for n in range(1, 8):
        assert f'fig-eta{n}' in PRESETS
    with pytest.raises(InvalidArgumentError):
        run_preset('fig0')


def test_eta_report_preset_file_name(tmp_path):
    paths = run_preset('eta-report', tmp_path)
    assert [p.name for p in paths] == ['eta-report.csv']


# -- VALIDATION PIECES -- #
def test_rel_err_floor():
    assert rel_err(1.0 + 1e-10, 1.0) == pytest.approx(1e-10)
    assert rel_err(1e-13, 0.0) <= 1e-9


def test_standard_grid_labels():
    labels = [label for _, label in standard_grid()]
    assert len(labels) == 3 * 3 * (6 + 3)
    assert 'socs s=0.5 alpha=1+0i' in labels
    assert 'sots s=0.8 nbar=2 eta=0.25' in labels


def test_check_result_records_failures():
    res = CheckResult('demo', 1e-9)
    res.record(1e-12, 'fine')
    res.record(1e-3, 'broken')
    assert not res.passed
    assert res.failures == ['broken err=0.001']
    assert res.max_err == 1e-3


def test_individual_checks_pass():
    v = Validator()
    for check in (v.checkCrossWitness, v.checkKlyshko, v.checkAgarwalTara, v.checkLowerOrderSqueezing,
                  v.checkDetectorReduction, v.checkEtaReport):
        result = check()
        assert result.passed, result.failures[:5]


def test_higher_order_search_is_informational():
    res = Validator().searchHigherOrderOnly()
    assert res.passed
    assert res.info
