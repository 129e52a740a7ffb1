"""Condition search: filters, verification, enumeration, checkpoints."""

import json

import pytest

import isekit as ik
from isekit.discovery import full_name_universe, _layer_candidates


def rule_of(text):
    u = ik.Universe()
    return ik.parse_program(text, u).rules[0]


def test_is_semi_valid():
    assert not ik.is_semi_valid(rule_of("a."))
    assert ik.is_semi_valid(rule_of("a :- not a."))
    assert ik.is_semi_valid(rule_of("a :- a."))
    assert ik.is_semi_valid(rule_of("b :- a, not a."))
    assert ik.is_semi_valid(rule_of(":- a."))
    assert not ik.is_semi_valid(rule_of("a :- b."))


def test_full_and_filtered_universe_sizes():
    assert len(full_name_universe((0, 1, 0))) == 7
    assert len(ik.base_name_universe((0, 1, 1))) == 24
    assert len(ik.base_name_universe((1, 1, 0))) == 24
    assert len(ik.base_name_universe((0, 2, 1))) == 63
    assert len(ik.base_name_universe((1, 1, 1))) == 63
    # keeping digit-5 names enlarges the three-rule universe
    assert len(ik.base_name_universe((1, 1, 1), drop_i5=False)) == 124


def test_filtered_universe_content():
    names = ik.base_name_universe((0, 1, 1))
    assert 36 in names and 9 in names
    assert all(d not in (3, 6, 7) for v in names
               for d in ik.locals_from_name(v, 2))


def test_sic2_excluded():
    shape = (0, 1, 1)
    # 36 has digit 4 in both rules: fully covered
    assert not ik.sic2_excluded(ik.make_condition(shape, {36}))
    # 32 covers rule 1 only
    assert ik.sic2_excluded(ik.make_condition(shape, {32}))
    assert not ik.sic2_excluded(ik.make_condition(shape, {32, 4}))
    assert ik.sic2_excluded(ik.make_condition(shape, {9}))


def test_verify_fact_against_empty_fails():
    assert ik.verify_and_compute_mgse((0, 1, 0), {4}, {4}) is None


def test_verify_tautology_generalizes_singleton():
    res = ik.verify_and_compute_mgse((0, 1, 0), {3}, {3})
    assert res is not None
    assert res.nis == frozenset({3})
    assert res.sis == frozenset()


def test_verify_retains_load_bearing_singletons():
    # x0. vs x0. with matching heads: the pair stays equivalent however the
    # shared set grows, so no singleton is retained
    res = ik.verify_and_compute_mgse((0, 1, 1), {36}, {36})
    assert res is not None and res.sis == frozenset()


def test_verify_known_se_condition():
    cond_names = {36, 9, 13, 18, 41, 45}
    res = ik.verify_and_compute_mgse((0, 1, 1), cond_names, cond_names)
    assert res is not None


def test_mnse_insert_minimal():
    shape = (0, 1, 0)
    mk = lambda names: ik.make_condition(shape, names)
    mnse = ik.mnse_insert_minimal([], mk({4}))
    assert [sorted(c.nis) for c in mnse] == [[4]]
    # supersets of a recorded failure are ignored
    assert ik.mnse_insert_minimal(mnse, mk({4, 2})) == mnse
    # a smaller failure evicts its supersets
    mnse2 = ik.mnse_insert_minimal([mk({4, 2})], mk({4}))
    assert [sorted(c.nis) for c in mnse2] == [[4]]
    # incomparable failures accumulate
    mnse3 = ik.mnse_insert_minimal(mnse, mk({2, 1}))
    assert len(mnse3) == 2


def test_basic_counts_single_fact_problem(sound_reports):
    report, _ = sound_reports[(0, 1, 0)]
    assert report.stats["is"] == 7
    assert report.tr == 7
    assert len(report.mgic) == 120
    assert len(report.mnse) == 1
    assert report.mnse[0].nis == frozenset({4})
    assert report.max_nse == 1


def test_basic_guard_on_large_spaces():
    with pytest.raises(ik.discovery.SearchSpaceError):
        ik.discover_basic((0, 1, 1))


def test_layer_candidates_respects_coverage_and_failures():
    names = [36, 9, 18, 33]
    # layer 1: only names covering both rules with a head-only digit survive
    ones = _layer_candidates(names, 1, 2, [])
    assert ones == [(36,)]
    # a recorded failure removes its supersets
    pruned = _layer_candidates(names, 2, 2, [frozenset({36, 9})])
    assert (36, 9) not in set(pruned)
    assert all(36 in c for c in pruned)


def test_improved_matches_known_counts(sound_reports):
    for shape in [(0, 1, 1), (1, 1, 0), (0, 2, 1)]:
        report, _ = sound_reports[shape]
        expect = ik.KNOWN_COUNTS[shape]
        assert report.stats["is"] == expect["is"]
        assert report.stats["is_prime"] == expect["is_prime"]
        assert report.stats["is_dprime"] == expect["is_dprime"]
        assert report.tr == expect["tr"]
        assert len(report.mgic) == expect["mgic"]
        assert len(report.mnse) == expect["mnse"]
        assert report.max_nse == expect["max_nse"]


def test_report_json_round_trip(sound_reports):
    report, _ = sound_reports[(0, 1, 1)]
    again = ik.SearchReport.from_json(json.loads(report.dumps()))
    assert again.same_findings(report)
    assert again.dumps() == report.dumps()


def test_conjectural_agrees_with_sound(sound_reports):
    for shape in [(0, 1, 1), (1, 1, 0)]:
        sound, _ = sound_reports[shape]
        conj = ik.discover_conjectural(shape)
        assert conj.mode == "conjectural"
        assert conj.same_findings(sound)


def test_checkpoint_resume_reproduces_report(tmp_path, sound_reports):
    sound, _ = sound_reports[(0, 1, 1)]
    path = str(tmp_path / "ck.jsonl")
    first = ik.discover_improved((0, 1, 1), ik.RunConfig(checkpoint_path=path))
    assert first.dumps() == sound.dumps()
    # a resumed run replays the log instead of re-verifying, byte-identically
    again = ik.discover_improved((0, 1, 1), ik.RunConfig(checkpoint_path=path))
    assert again.dumps() == first.dumps()


def test_checkpoint_rejects_other_run(tmp_path):
    path = str(tmp_path / "ck.jsonl")
    ik.discover_improved((0, 1, 1), ik.RunConfig(checkpoint_path=path))
    with pytest.raises(ik.discovery.CheckpointError):
        ik.discover_improved((1, 1, 0), ik.RunConfig(checkpoint_path=path))


def test_max_layer_marks_partial():
    report = ik.discover_improved((0, 1, 1), ik.RunConfig(max_layer=2))
    assert report.stats.get("partial") is True
    assert all(len(c.nis) <= 2 for c in report.mgic)


def test_parallel_run_is_byte_identical(sound_reports):
    sound, _ = sound_reports[(0, 1, 1)]
    parallel = ik.discover_improved((0, 1, 1), ik.RunConfig(jobs=4))
    assert parallel.dumps() == sound.dumps()
