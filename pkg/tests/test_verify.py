"""Experiment harnesses: configs, frozen rows, recomputation, serialization."""

from __future__ import annotations

import json
import math

import pytest

from semiorbits import (
    ConfigError,
    EmptyReport,
    ExperimentConfig,
    ExperimentReport,
    EXPERIMENTS,
    GeneratorSet,
    SpecialGenerator,
    TooLarge,
    b_tree_size,
    build_graph,
    count_small_order_points,
    fit_constants,
    height,
    m_count,
    make_prime_field,
    parse_poly,
    run_experiment,
    small_order_set,
    stream_from_config,
)
from oracles import compose_word, naive_l_n_count, rational_gcd_is_nonconstant


def _cfg(**kw):
    return ExperimentConfig.from_dict(kw)


def _col(report, name):
    return report.columns.index(name)


def _by_col(report, row, name):
    return row[_col(report, name)]


# -- configuration -----------------------------------------------------------


def test_config_rejects_unknown_fields():
    with pytest.raises(ConfigError) as err:
        _cfg(experiment="thm44i", generators=["X^2 + 1"], bogus=1, extra=2)
    assert "bogus" in str(err.value) and "extra" in str(err.value)


def test_config_requires_experiment():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"generators": ["X^2 + 1"]})


def test_config_unknown_experiment_lists_ids():
    with pytest.raises(ConfigError) as err:
        _cfg(experiment="thm99", generators=["X^2 + 1"])
    msg = str(err.value)
    for name in EXPERIMENTS:
        assert name in msg


def test_config_validation():
    with pytest.raises(ConfigError):
        _cfg(experiment="thm44i", generators=["X^2 + 1"], t=0)
    for bad_e in (0.0, 0.5, 0.7, -0.1):
        with pytest.raises(ConfigError):
            _cfg(experiment="thm44i", generators=["X^2 + 1"], t_exponent=bad_e)
    with pytest.raises(ConfigError):
        _cfg(experiment="thm44i", generators=[])
    with pytest.raises(ConfigError):
        _cfg(experiment="thm44i", generators=["X^2 + 1"], s=0)
    with pytest.raises(ConfigError):
        _cfg(experiment="thm44i", generators=["X^2 + 1"], loglog_floor=0.0)
    cfg = _cfg(experiment="thm44i", generators=["X^2 + 1"], primes=[11], t=2, N=6)
    assert cfg.to_dict()["generators"] == ["X^2 + 1"]


def test_config_needs_some_t_rule():
    cfg = _cfg(experiment="thm44i", generators=["X^2 + 1"], primes=[11], N=6)
    with pytest.raises(ConfigError):
        run_experiment(cfg)


def test_config_rejects_composite_primes():
    cfg = _cfg(experiment="thm44i", generators=["X^2 + 1"], primes=[11, 12], t=2, N=6)
    with pytest.raises(ConfigError) as err:
        run_experiment(cfg)
    assert "12" in str(err.value)


def test_config_needs_prime_range():
    cfg = _cfg(experiment="thm44i", generators=["X^2 + 1"], t=2, N=6)
    with pytest.raises(ConfigError):
        run_experiment(cfg)


# -- thm44i ------------------------------------------------------------------


def test_thm44i_frozen_row():
    rep = run_experiment(
        _cfg(
            experiment="thm44i",
            generators=["X^2 + 1"],
            primes=[11],
            starts=[3],
            t=2,
            N=6,
        )
    )
    assert len(rep.rows) == 1
    row = rep.rows[0]
    # iterates 3,10,2,5,4,6 mod 11: only 10 = -1 has order <= 2
    assert _by_col(rep, row, "M") == 1
    assert _by_col(rep, row, "word") == "1-1-1-1-1-1"
    bound = max(math.sqrt(6), 6 / math.log(math.log(11)))
    assert _by_col(rep, row, "bound") == pytest.approx(bound)
    assert _by_col(rep, row, "ratio") == pytest.approx(1 / bound)
    assert rep.summary["rows"] == 1
    assert rep.summary["max"] == pytest.approx(1 / bound)


def test_thm44i_rejects_special_generators():
    with pytest.raises(SpecialGenerator) as err:
        run_experiment(
            _cfg(experiment="thm44i", generators=["X^2"], primes=[7], t=2, N=3)
        )
    assert "monomial_conjugate" in str(err.value)
    rep = run_experiment(
        _cfg(
            experiment="thm44i",
            generators=["X^2"],
            primes=[7],
            starts=[3],
            t=2,
            N=3,
            allow_special=True,
        )
    )
    assert "monomial_conjugate" in rep.summary["special_generators"]


def test_thm44i_empty_grid():
    rep = run_experiment(
        _cfg(experiment="thm44i", generators=["X^2 + 1"], primes=[], t=2, N=6)
    )
    assert rep.rows == []
    assert rep.summary == {"rows": 0}
    assert rep.to_csv() == ",".join(rep.columns) + "\n"
    with pytest.raises(EmptyReport):
        fit_constants(rep)


# -- thm44ii -----------------------------------------------------------------


def test_thm44ii_needs_stream_and_bound():
    base = dict(experiment="thm44ii", generators=["X^2 + 1"], N=8, t=2)
    with pytest.raises(ConfigError):
        run_experiment(_cfg(**base, prime_max=20))
    with pytest.raises(ConfigError):
        run_experiment(_cfg(**base, stream={"kind": "periodic", "period": [1]}))


def test_thm44ii_full_recount():
    cfg = _cfg(
        experiment="thm44ii",
        generators=["X^2 + 1"],
        prime_max=100,
        N=8,
        t=2,
        stream={"kind": "periodic", "period": [1]},
    )
    rep = run_experiment(cfg)
    assert len(rep.rows) == 25  # primes up to 100
    F = GeneratorSet([parse_poly("X^2 + 1")])
    stream = stream_from_config(cfg.stream)
    exceptional = []
    for row in rep.rows:
        p = _by_col(rep, row, "p")
        ctx = make_prime_field(p)
        counts = [m_count(F, stream, ctx.element(w), 2, 8) for w in range(p)]
        best = max(counts)
        assert _by_col(rep, row, "max_M") == best
        assert _by_col(rep, row, "argmax_w") == counts.index(best)
        bound = max(math.sqrt(8), 8 / math.log(p))
        assert _by_col(rep, row, "bound") == pytest.approx(bound)
        flag = _by_col(rep, row, "exceptional")
        assert flag == (1 if best > bound else 0)
        if flag:
            exceptional.append(p)
    assert exceptional == [3]
    assert rep.summary["exceptional"] == 1
    assert rep.summary["p_over_log_p"] == pytest.approx(100 / math.log(100))
    assert rep.summary["exceptional_fraction"] == pytest.approx(
        1 / (100 / math.log(100))
    )


def test_thm44ii_generous_constant_has_no_exceptions():
    rep = run_experiment(
        _cfg(
            experiment="thm44ii",
            generators=["X^2 + 1"],
            prime_max=50,
            N=8,
            t=2,
            C=100.0,
            stream={"kind": "periodic", "period": [1]},
        )
    )
    assert rep.summary["exceptional"] == 0


def test_thm44ii_degenerate_prime_range():
    rep = run_experiment(
        _cfg(
            experiment="thm44ii",
            generators=["X^2 + 1"],
            prime_max=1,
            N=8,
            t=2,
            stream={"kind": "periodic", "period": [1]},
        )
    )
    assert rep.rows == []
    assert "p_over_log_p" not in rep.summary


# -- cor45 -------------------------------------------------------------------


def test_cor45_frozen_count():
    rep = run_experiment(
        _cfg(
            experiment="cor45",
            generators=["X^2", "X^2 + 1"],
            primes=[5],
            starts=[0],
            t=4,
            N=3,
        )
    )
    assert len(rep.rows) == 1
    row = rep.rows[0]
    # levels reach {0,1,2,4}; the three nonzero points all have order <= 4
    assert _by_col(rep, row, "count") == 3
    assert _by_col(rep, row, "q") == 5
    kN = 2.0**3
    bound = max(math.sqrt(3) * kN, 3 * kN / math.log(math.log(5)))
    assert _by_col(rep, row, "bound") == pytest.approx(bound)
    # monomial generator: warned about, not fatal here
    assert "monomial_conjugate" in rep.summary.get("special_generators", "")
    assert rep.summary["bound_note"].startswith("count <= q")


def test_cor45_include_level_0():
    base = dict(
        experiment="cor45", generators=["X^2"], primes=[7], starts=[3], t=6, N=2
    )
    without = run_experiment(_cfg(**base))
    with_start = run_experiment(_cfg(**base, include_level_0=True))
    # start 3 has order 6; reachable {2,4} both order 3
    assert _by_col(without, without.rows[0], "count") == 2
    assert _by_col(with_start, with_start.rows[0], "count") == 3


# -- thm46 -------------------------------------------------------------------


def test_thm46_frozen_row_with_diagnostics():
    rep = run_experiment(
        _cfg(
            experiment="thm46",
            generators=["X^2"],
            primes=[7],
            starts=[3],
            diagnostics=True,
        )
    )
    assert len(rep.rows) == 1
    row = rep.rows[0]
    assert _by_col(rep, row, "T") == 3
    assert _by_col(rep, row, "tau") == 6
    assert _by_col(rep, row, "s_cover") == 1
    lhs = 3 * math.log(2) + math.log(6)
    assert _by_col(rep, row, "lhs") == pytest.approx(lhs)
    assert _by_col(rep, row, "rhs") == pytest.approx(math.log(math.log(7)))
    assert _by_col(rep, row, "exception") == 0
    # walk 3 -> 2 -> 4 -> 2 collides at step 3 with step 1; X^(2^3) - X^(2^1)
    # shares its nonzero sixth-order roots with the n=6 cyclotomic
    assert _by_col(rep, row, "coll_m") == 3
    assert _by_col(rep, row, "coll_l") == 1
    assert _by_col(rep, row, "ord_n") == 6
    assert _by_col(rep, row, "res_mod_p") == 0
    assert rep.summary["exceptions"] == 0
    assert rep.summary["zeros_skipped"] == 0
    assert rep.summary["min_margin"] == pytest.approx(lhs - math.log(math.log(7)))


def test_thm46_fixed_point_and_zero_start():
    rep = run_experiment(
        _cfg(experiment="thm46", generators=["X^2"], primes=[7], starts=[1, 0])
    )
    assert len(rep.rows) == 1
    row = rep.rows[0]
    assert _by_col(rep, row, "T") == 1
    assert _by_col(rep, row, "tau") == 1
    assert _by_col(rep, row, "lhs") == pytest.approx(math.log(2))
    assert rep.summary["zeros_skipped"] == 1


def test_thm46_huge_constant_forces_exceptions():
    rep = run_experiment(
        _cfg(experiment="thm46", generators=["X^2"], primes=[7], starts=[3], c=1e9)
    )
    assert rep.summary["exceptions"] == 1


def test_thm46_rejects_nonpositive_c():
    with pytest.raises(ConfigError):
        run_experiment(
            _cfg(experiment="thm46", generators=["X^2"], primes=[7], c=0.0)
        )


def test_thm46_diagnostic_degree_cap():
    rep = run_experiment(
        _cfg(
            experiment="thm46",
            generators=["X^2"],
            primes=[101],
            starts=[3],
            diagnostics=True,
            diag_degree_cap=4,
        )
    )
    row = rep.rows[0]
    # collisions past degree 2^2 skip the resultant, keeping m, l, n
    if 2 ** _by_col(rep, row, "coll_m") > 4:
        assert _by_col(rep, row, "res_mod_p") is None


# -- thm61 -------------------------------------------------------------------


def test_thm61_row_consistency():
    cfg = _cfg(
        experiment="thm61",
        generators=["X^2", "X^2 + 1"],
        primes=[11],
        starts=[2],
        t=10,
        N=4,
        h=3,
        l=1,
    )
    rep = run_experiment(cfg)
    assert len(rep.rows) == 1
    row = rep.rows[0]
    F = GeneratorSet([parse_poly("X^2"), parse_poly("X^2 + 1")])
    ctx = make_prime_field(11)
    gamma = small_order_set(ctx, 10)
    graph = build_graph(F, ctx)
    assert _by_col(rep, row, "B") == b_tree_size(2, 3) == 7
    assert _by_col(rep, row, "count") == count_small_order_points(
        F, ctx.element(2), 10, 4
    )
    words = [
        tuple(int(c) for c in part.split("-"))
        for part in _by_col(rep, row, "words").split("|")
    ]
    assert len(words) == 1 and 1 <= len(words[0]) <= 3
    # the reported L_N is the count the reported words actually achieve
    assert _by_col(rep, row, "L_N") == naive_l_n_count(graph, 2, gamma, 4, words)
    target = _by_col(rep, row, "target")
    assert target > 0
    assert _by_col(rep, row, "eq61_ratio") == pytest.approx(
        _by_col(rep, row, "L_N") / target
    )
    assert _by_col(rep, row, "hypothesis") in (0, 1)
    bound = max(7.0**2 / 3, 7.0**2 / math.log(math.log(11)))
    assert _by_col(rep, row, "bound") == pytest.approx(bound)


def test_thm61_h_from_n():
    rep = run_experiment(
        _cfg(
            experiment="thm61",
            generators=["X^2", "X^2 + 1"],
            primes=[5],
            starts=[2],
            t=4,
            N=4,
            h_from_n=True,
            l=1,
        )
    )
    assert _by_col(rep, rep.rows[0], "h") == 1
    with pytest.raises(ConfigError):
        run_experiment(
            _cfg(
                experiment="thm61",
                generators=["X^2 + 1"],
                primes=[5],
                t=4,
                N=4,
                h_from_n=True,
                l=1,
            )
        )


def test_thm61_requires_h_and_l():
    base = dict(
        experiment="thm61", generators=["X^2", "X^2 + 1"], primes=[5], t=4, N=4
    )
    with pytest.raises(ConfigError):
        run_experiment(_cfg(**base, l=1))
    with pytest.raises(ConfigError):
        run_experiment(_cfg(**base, h=2))


# -- lemma41 -----------------------------------------------------------------


def test_lemma41_frozen_values():
    rep = run_experiment(
        _cfg(experiment="lemma41", generators=["X^2 + 1"], r_max=2, s_max=1)
    )
    rows = {( _by_col(rep, r, "r"), _by_col(rep, r, "s")): r for r in rep.rows}
    # Res(X-1, X^2) = 1 and Res(X+1, X^2) = 1: both give log 0
    r11 = rows[(1, 1)]
    assert _by_col(rep, r11, "zero") == 0
    assert _by_col(rep, r11, "log_abs_res") == 0.0
    assert _by_col(rep, r11, "constant") == 0.0
    r21 = rows[(2, 1)]
    assert _by_col(rep, r21, "log_abs_res") == 0.0
    assert rep.summary["zero_resultants"] == 0


def test_lemma41_zero_flags_match_gcd():
    rep = run_experiment(
        _cfg(experiment="lemma41", generators=["X^2"], r_max=3, s_max=3)
    )
    from semiorbits import cyclotomic

    F = parse_poly("X^2")
    zero_at = set()
    for row in rep.rows:
        r, s = _by_col(rep, row, "r"), _by_col(rep, row, "s")
        flagged = _by_col(rep, row, "zero") == 1
        assert flagged == rational_gcd_is_nonconstant(
            cyclotomic(r), cyclotomic(s).compose(F)
        )
        if flagged:
            assert _by_col(rep, row, "log_abs_res") is None
            zero_at.add((r, s))
    # X = 1 is a shared root of X-1 and X^2-1
    assert (1, 1) in zero_at
    assert rep.summary["zero_resultants"] == len(zero_at)


def test_lemma41_guards():
    with pytest.raises(ConfigError):
        run_experiment(_cfg(experiment="lemma41", generators=["3"], r_max=2, s_max=2))
    with pytest.raises(TooLarge):
        run_experiment(
            _cfg(experiment="lemma41", generators=["X^2"], r_max=1, s_max=4096)
        )


# -- prop21 ------------------------------------------------------------------


def test_prop21_rows_recompute():
    cfg = _cfg(
        experiment="prop21", generators=["2X^2 + 1"], n_max=2, trials=20, seed=3
    )
    rep = run_experiment(cfg)
    assert len(rep.rows) == 20
    F = GeneratorSet([parse_poly("2X^2 + 1")])
    saw_n2 = False
    for row in rep.rows:
        word = tuple(
            int(c) for c in _by_col(rep, row, "word").split("-")
        )
        comp = compose_word(F, word)
        assert _by_col(rep, row, "degree") == comp.degree
        assert _by_col(rep, row, "height") == pytest.approx(height(comp))
        ratio = _by_col(rep, row, "ratio")
        assert ratio is not None and ratio <= 1 + 1e-9
        if _by_col(rep, row, "n") == 2:
            saw_n2 = True
            assert comp == parse_poly("8X^4 + 8X^2 + 3")
    assert saw_n2
    assert rep.summary["violations"] == 0


def test_prop21_single_step_ratio_is_one():
    rep = run_experiment(
        _cfg(experiment="prop21", generators=["2X^2 + 1"], n_max=1, trials=3)
    )
    for row in rep.rows:
        assert _by_col(rep, row, "ratio") == pytest.approx(1.0)


def test_prop21_monomial_tower_heights():
    rep = run_experiment(
        _cfg(experiment="prop21", generators=["X^2"], n_max=3, trials=10)
    )
    for row in rep.rows:
        assert _by_col(rep, row, "height") == 0.0
        ratio = _by_col(rep, row, "ratio")
        if _by_col(rep, row, "n") == 1:
            assert ratio is None  # bound collapses to h(F) = 0
        else:
            assert ratio == 0.0


def test_prop21_guards():
    with pytest.raises(TooLarge):
        run_experiment(
            _cfg(experiment="prop21", generators=["X^3"], n_max=6, trials=1)
        )
    rep = run_experiment(
        _cfg(experiment="prop21", generators=["X^2 + 1"], n_max=2, trials=0)
    )
    assert rep.rows == [] and rep.summary["rows"] == 0


# -- fit + serialization -----------------------------------------------------


def _tiny_report(values):
    return ExperimentReport(
        config={"experiment": "x"},
        columns=("ratio",),
        rows=[(v,) for v in values],
        summary={},
    )


def test_fit_constants():
    assert fit_constants(_tiny_report([0.5])) == {"max": 0.5, "p95": 0.5, "n": 1}
    fit = fit_constants(_tiny_report([3.0, 1.0, 2.0]))
    assert fit == {"max": 3.0, "p95": 3.0, "n": 3}
    vals = [float(i) for i in range(1, 21)]
    assert fit_constants(_tiny_report(vals))["p95"] == 19.0
    with pytest.raises(EmptyReport):
        fit_constants(_tiny_report([None, None]))
    with pytest.raises(EmptyReport):
        fit_constants(_tiny_report([1.0]), "missing")


def test_report_formats():
    rep = ExperimentReport(
        config={"experiment": "x"},
        columns=("a", "b", "c"),
        rows=[(1, None, 0.123456789012345), (2, "txt", 1.0)],
        summary={"note": "n"},
    )
    csv = rep.to_csv()
    lines = csv.splitlines()
    assert lines[0] == "a,b,c"
    assert lines[1] == "1,.,0.123456789012"
    assert lines[2] == "2,txt,1"
    body = json.loads(rep.body_json())
    assert set(body) == {"config", "columns", "rows", "summary"}
    assert "created" not in rep.body_json()
    doc = json.loads(rep.to_json())
    assert doc["header"]["created"] == rep.created
    assert "experiment=x" in rep.summary_line()
    assert "rows=2" in rep.summary_line()


def test_determinism_same_config_same_body():
    cfg = dict(
        experiment="thm44i",
        generators=["X^2 + 1"],
        prime_min=3,
        prime_max=23,
        sample=4,
        seed=9,
        t_exponent=0.4,
        N=6,
    )
    a = run_experiment(_cfg(**cfg))
    b = run_experiment(_cfg(**cfg))
    assert a.body_json() == b.body_json()
    assert a.to_csv() == b.to_csv()
    # the sampler really did subsample
    assert all(row[_col(a, "s")] == 1 for row in a.rows)
    starts = {row[_col(a, "w")] for row in a.rows if row[0] == 23}
    assert len(starts) == 4
