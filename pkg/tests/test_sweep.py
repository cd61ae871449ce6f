import pytest
from hypothesis import given, settings, strategies as st

from aidelegation import core
from aidelegation.core import DelegationParams, FSStatus, Mode, Region
from aidelegation.errors import GridSpecError
from aidelegation.sweep import (
    GRID_COLUMNS,
    AxisRange,
    GridSpec,
    boundary_curves,
    linspace,
    region_grid,
)

from oracles import best_mode, ev_fs, ev_ps


def grid(v=0.5, a=(0.25, 0.75, 3), b=(0.25, 0.75, 3), **kw):
    return region_grid(GridSpec(AxisRange(*a), AxisRange(*b), v, **kw))


def test_three_by_three_example():
    cells = {(c.alpha, c.beta): c for c in grid()}
    assert len(cells) == 9
    for beta in (0.25, 0.5, 0.75):
        assert cells[0.25, beta].region.region is Region.A
    # alpha == alpha*_FS == v: FS infeasible, so region A
    c = cells[0.5, 0.75]
    assert c.region.region is Region.A
    assert c.region.fs_status is FSStatus.NOT_APPLICABLE
    assert c.on_boundary
    # alpha == alpha*_PS: still region B; E_FS == v == E_PS
    c = cells[0.75, 0.75]
    assert c.region.region is Region.B
    assert c.region.fs_status is FSStatus.FS_LOSES
    assert c.chosen is Mode.ENGINEER
    assert c.on_boundary
    assert c.e_fs == pytest.approx(0.5) and c.e_ps == pytest.approx(0.5)


def test_row_major_alpha_outer():
    cells = grid(a=(0.1, 0.9, 5), b=(0.2, 0.8, 4))
    coords = [(c.alpha, c.beta) for c in cells]
    expected = [(a, b) for a in linspace(0.1, 0.9, 5) for b in linspace(0.2, 0.8, 4)]
    assert coords == expected


def test_cells_match_fresh_evaluation():
    for c in grid(v=0.4, a=(0.05, 0.95, 13), b=(0.05, 0.95, 13), gain=1.5, loss=-2):
        p = DelegationParams(c.alpha, c.beta, 0.4, 1.5, -2)
        d = core.decide_policy(p)
        assert c.region == core.classify_region(p)
        assert c.chosen is d.chosen
        assert c.e_ps == d.expected_ps and c.e_fs == d.expected_fs
        assert c.e_ps == pytest.approx(ev_ps(c.alpha, 1.5, -2))
        assert c.e_fs == pytest.approx(ev_fs(c.alpha, c.beta, 1.5, -2))
        if not c.on_boundary:
            assert c.chosen.value == best_mode(c.alpha, c.beta, 0.4, 1.5, -2)


@settings(max_examples=50)
@given(st.floats(0.01, 0.99), st.integers(2, 25))
def test_alpha_below_v_is_region_a_and_monotone(v, steps):
    order = {Region.A: 0, Region.B: 1, Region.C: 2}
    cells = grid(v=v, a=(0.01, 0.99, steps), b=(0.5, 0.5, 2))
    for c in cells:
        if c.alpha <= v:
            assert c.region.region is Region.A
    by_beta = [c for c in cells if c.beta == 0.5][::2]
    labels = [order[c.region.region] for c in by_beta]
    assert labels == sorted(labels)


def test_diagonal_in_region_c_is_fs_ps_indifference():
    for a in (0.8, 0.85, 0.9, 0.95):
        d = core.decide_policy(DelegationParams(a, a, 0.5))
        assert d.expected_fs == pytest.approx(d.expected_ps, abs=1e-12)
        assert d.on_boundary and d.chosen is Mode.PS


def test_linspace_exact_endpoints():
    xs = linspace(0.05, 0.95, 19)
    assert xs[0] == 0.05 and xs[-1] == 0.95 and len(xs) == 19
    assert xs[9] == pytest.approx(0.5)


@pytest.mark.parametrize(
    "a",
    [(0.0, 0.5, 3), (0.5, 1.0, 3), (0.6, 0.5, 3), (0.1, 0.5, 1), (0.1, 0.5, 2.5), (float("nan"), 0.5, 3)],
)
def test_invalid_ranges(a):
    with pytest.raises(GridSpecError):
        AxisRange(*a)


def test_invalid_payoffs_are_spec_errors():
    with pytest.raises(GridSpecError):
        GridSpec(AxisRange(0.1, 0.9, 3), AxisRange(0.1, 0.9, 3), v=1.5)


@pytest.mark.parametrize("text", ["0.1:0.9", "a:b:c", "0.1:0.9:3:4"])
def test_parse_rejects_bad_syntax(text):
    with pytest.raises(GridSpecError):
        AxisRange.parse(text)


def test_parse_roundtrip():
    r = AxisRange.parse("0.05:0.95:19")
    assert r == AxisRange(0.05, 0.95, 19)
    assert AxisRange.parse(str(r)) == r


def test_columns():
    assert GRID_COLUMNS == ("alpha", "beta", "region", "fs_status", "chosen", "e_ps", "e_fs", "on_boundary")
    cell = grid()[0]
    assert list(cell.as_dict()) == list(GRID_COLUMNS)


class TestBoundaryCurves:
    def test_intersection_at_alpha_star_ps(self):
        t = boundary_curves(0.5, samples=99)
        assert t.alpha_star_ps == 0.75 and t.alpha_star_fs == 0.5
        row = min(t.rows, key=lambda r: abs(r.alpha - 0.75))
        assert row.alpha == pytest.approx(0.75)
        assert row.beta_star == pytest.approx(0.75, abs=1e-12)
        assert row.beta_double_star == pytest.approx(0.75, abs=1e-12)

    def test_alpha_star_ps_shifts_right_with_v(self):
        assert boundary_curves(0.2).alpha_star_ps == pytest.approx(0.6)
        assert boundary_curves(0.6).alpha_star_ps == pytest.approx(0.8)

    def test_beta_star_tends_to_v(self):
        t = boundary_curves(0.3, alpha_min=0.5, alpha_max=1 - 1e-9, samples=2)
        assert t.rows[-1].beta_star == pytest.approx(0.3, abs=1e-8)

    def test_infeasible_marking(self):
        t = boundary_curves(0.5, samples=99)
        for r in t.rows:
            assert r.beta_star_feasible == (r.alpha > 0.5)
            assert r.beta_star_feasible == (r.beta_star < 1)

    def test_flip_eq2_across_curve(self):
        v = 0.4
        for r in boundary_curves(v, samples=37).rows:
            if not r.beta_star_feasible or not 1e-6 < r.beta_star < 1 - 1e-6:
                continue
            above = core.evaluate_conditions(DelegationParams(r.alpha, r.beta_star + 1e-6, v))[0]
            below = core.evaluate_conditions(DelegationParams(r.alpha, r.beta_star - 1e-6, v))[0]
            assert above["eq2"] and not below["eq2"]

    def test_samples_validated(self):
        with pytest.raises(GridSpecError):
            boundary_curves(0.5, samples=1)
