"""Flags, measures, full training and the two experiment protocols."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ceglearn import (
    EngineState,
    FlagCounts,
    UndefinedMeasuresError,
    aggregate_prf,
    check_invariants,
    compute_measures,
    full_train,
    load_artifact,
    report_to_csv,
    report_to_doc,
    run_rq1,
    run_rq2,
)
from ceglearn.corpus import Artifact, record_from_obj
from ceglearn.harness import RunReport, derive_seed, permuted_indices


class TestComputeMeasures:
    def test_single_creation_no_recognition(self):
        # 40 sentences, 1 causal: 39 discards and one created pattern
        counts = FlagCounts(disc_plus=39, crea_plus=1, n_causal=1)
        measures = compute_measures(counts)
        assert measures.tcdr == pytest.approx(0.975)
        assert measures.alcdr == pytest.approx(1.0)
        assert measures.recr == 0.0

    def test_all_discard_artifact(self):
        counts = FlagCounts(disc_plus=10, n_causal=0)
        measures = compute_measures(counts)
        assert measures.tcdr == 1.0 and measures.alcdr == 1.0
        assert measures.recr == 0.0

    def test_arithmetic(self):
        counts = FlagCounts(rec_plus=7, disc_plus=150, crea_plus=21, n_causal=28)
        measures = compute_measures(counts)
        assert measures.tcdr == pytest.approx(157 / 178)
        assert measures.alcdr == pytest.approx(1.0)
        assert measures.recr == pytest.approx(0.25)

    def test_zero_flags_undefined(self):
        with pytest.raises(UndefinedMeasuresError):
            compute_measures(FlagCounts(n_causal=3))

    @settings(max_examples=300, deadline=None)
    @given(
        st.tuples(*[st.integers(0, 50) for _ in range(6)]),
        st.integers(0, 60),
    )
    def test_tcdr_never_exceeds_alcdr(self, flags, n_causal):
        counts = FlagCounts(*flags, n_causal=n_causal)
        if counts.total_flags == 0:
            return
        measures = compute_measures(counts)
        assert 0.0 <= measures.tcdr <= measures.alcdr <= 1.0


class TestAggregatePrf:
    def _report(self, **kwargs):
        counts = FlagCounts(**kwargs)
        return RunReport(
            artifact="a", seed=1, ordering=(), log=(),
            counts=counts, measures=compute_measures(counts),
        )

    def test_arithmetic(self):
        report = self._report(rec_plus=5, spec_plus=3, spec_minus=2, n_causal=20)
        prf = aggregate_prf([report])
        assert prf.precision == pytest.approx(0.5)
        assert prf.recall == pytest.approx(0.25)
        assert prf.f1 == pytest.approx(1 / 3)
        assert prf.degenerate == ()

    def test_all_zero_recognitions(self):
        report = self._report(disc_plus=10, n_causal=5)
        prf = aggregate_prf([report])
        assert prf.precision == prf.recall == prf.f1 == 0.0
        assert "precision" in prf.degenerate and "f1" in prf.degenerate

    def test_perfect_run(self):
        report = self._report(rec_plus=8, crea_plus=0, n_causal=8)
        prf = aggregate_prf([report])
        assert prf.precision == prf.recall == prf.f1 == 1.0

    def test_pools_across_reports(self):
        a = self._report(rec_plus=5, spec_plus=3, spec_minus=2, n_causal=20)
        b = self._report(rec_plus=5, n_causal=5)
        prf = aggregate_prf([a, b])
        assert prf.precision == pytest.approx(10 / 15)
        assert prf.recall == pytest.approx(10 / 25)


def noncausal_record(rid, noun, verb):
    return record_from_obj(
        {
            "id": rid,
            "text": f"The {noun} {verb}.",
            "ptb": f"(S (NP (DT The) (NN {noun})) (VP (VBZ {verb})) (. .))",
            "label": "noncausal",
        }
    )


class TestFullTrain:
    def test_ifclauses_one_creation_then_recognition(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "ifclauses.jsonl")
        for seed in (1, 7, 42):
            report = full_train(EngineState.empty(), artifact, seed)
            flags = [flag for _, flag in report.log]
            assert flags[0] == "crea+"
            assert flags[1:] == ["rec+"] * 9
            assert report.measures.recr == pytest.approx(0.9)

    def test_diverse_noncausal_all_discarded(self):
        records = [
            noncausal_record("n1", "parser", "reads"),
            noncausal_record("n2", "gauge", "ticks"),
            noncausal_record("n3", "light", "blinks"),
        ]
        artifact = Artifact(name="neg", records=tuple(records))
        report = full_train(EngineState.empty(), artifact, 5)
        assert [flag for _, flag in report.log] == ["disc+"] * 3
        assert report.measures.tcdr == 1.0

    def test_same_seed_same_log(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "requirements.jsonl")
        a = full_train(EngineState.empty(), artifact, 99)
        b = full_train(EngineState.empty(), artifact, 99)
        assert a == b

    def test_flag_count_conservation(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "requirements.jsonl")
        for seed in (1, 2, 3):
            report = full_train(EngineState.empty(), artifact, seed)
            assert len(report.log) == artifact.n
            assert (
                report.counts.total_flags + report.counts.n_unprocessable
                == artifact.n
            )
            assert report.counts.rec_plus <= report.counts.n_causal

    def test_unprocessable_records_tallied_separately(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "requirements.jsonl")
        report = full_train(EngineState.empty(), artifact, 1)
        assert report.counts.n_unprocessable == 1
        entries = dict(report.log)
        frag_id = next(
            r.id for r in artifact.records if not r.engine_processable
        )
        assert entries[frag_id] == "unprocessable"

    def test_principles_hold_after_run(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "requirements.jsonl")
        state = EngineState.empty()
        full_train(state, artifact, 11)
        assert check_invariants(state) == []

    def test_permutation_is_stable(self):
        assert permuted_indices(10, 42) == permuted_indices(10, 42)
        assert permuted_indices(10, 42) != permuted_indices(10, 43)
        rng_based = list(range(10))
        random.Random(42).shuffle(rng_based)
        assert permuted_indices(10, 42) == rng_based


class TestRq1:
    def test_single_run_matches_report(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "ifclauses.jsonl")
        experiment = run_rq1([artifact], [3])
        assert len(experiment.runs) == 1
        summary = experiment.per_artifact["ifclauses"]
        assert summary.mean_measures == experiment.runs[0].measures

    def test_repeat_is_identical(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "requirements.jsonl")
        seeds = list(range(1, 6))
        a = run_rq1([artifact], seeds)
        b = run_rq1([artifact], seeds)
        assert report_to_doc(a) == report_to_doc(b)
        assert report_to_csv(a) == report_to_csv(b)

    def test_if_heavy_mean_recognition(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "ifclauses.jsonl")
        experiment = run_rq1([artifact], list(range(1, 11)))
        mean_recr = experiment.per_artifact["ifclauses"].mean_measures.recr
        # one creation unlocks all remaining sentences on every ordering
        assert mean_recr == pytest.approx(0.9)
        assert mean_recr >= 0.8

    def test_requires_input(self):
        with pytest.raises(ValueError):
            run_rq1([], [1])


class TestRq2:
    def test_needs_two_artifacts(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "ifclauses.jsonl")
        with pytest.raises(ValueError, match="two artifacts"):
            run_rq2([artifact], [1])

    def test_target_starts_with_patterns(self, fixtures_dir):
        target = load_artifact(fixtures_dir / "rq2_target.jsonl")
        ifclauses = load_artifact(fixtures_dir / "ifclauses.jsonl")
        experiment = run_rq2([ifclauses, target], [4])
        target_run = next(r for r in experiment.runs if r.artifact == "rq2_target")
        # the if-pattern learned from pretraining covers the target's
        # causal sentences: nothing is created, everything is recognized
        assert target_run.counts.crea_plus == 0
        assert target_run.counts.rec_plus == target_run.counts.n_causal

    def test_zero_causal_pretraining_only_swaps_spec_for_disc(self, fixtures_dir):
        negatives = load_artifact(fixtures_dir / "rq2_negatives.jsonl")
        target = load_artifact(fixtures_dir / "rq2_target.jsonl")
        seeds = list(range(1, 11))
        rq1 = run_rq1([negatives, target], seeds)
        rq2 = run_rq2([negatives, target], seeds)
        for seed in seeds:
            one = next(
                r for r in rq1.runs if r.artifact == "rq2_target" and r.seed == seed
            )
            two = next(
                r for r in rq2.runs if r.artifact == "rq2_target" and r.seed == seed
            )
            # pretraining on pure negatives cannot change what is recognized
            # or created, only how intruding negatives are handled
            assert one.counts.rec_plus == two.counts.rec_plus
            assert one.counts.crea_plus == two.counts.crea_plus
            assert one.counts.crea_minus == two.counts.crea_minus
            assert (
                one.counts.disc_plus + one.counts.spec_plus
                == two.counts.disc_plus + two.counts.spec_plus
            )
            assert two.counts.spec_plus == 0

    def test_precision_direction(self, fixtures_dir):
        negatives = load_artifact(fixtures_dir / "rq2_negatives.jsonl")
        target = load_artifact(fixtures_dir / "rq2_target.jsonl")
        seeds = list(range(1, 11))
        rq1 = run_rq1([negatives, target], seeds)
        rq2 = run_rq2([negatives, target], seeds)
        assert (
            rq2.per_artifact["rq2_target"].prf.precision
            >= rq1.per_artifact["rq2_target"].prf.precision
        )

    def test_repeat_is_identical(self, fixtures_dir):
        negatives = load_artifact(fixtures_dir / "rq2_negatives.jsonl")
        target = load_artifact(fixtures_dir / "rq2_target.jsonl")
        a = run_rq2([negatives, target], [1, 2])
        b = run_rq2([negatives, target], [1, 2])
        assert report_to_doc(a) == report_to_doc(b)

    def test_derived_seed_is_stable(self):
        assert derive_seed(3, "alpha") == derive_seed(3, "alpha")
        assert derive_seed(3, "alpha") != derive_seed(4, "alpha")
        assert derive_seed(3, "alpha") != derive_seed(3, "beta")


class TestReports:
    def test_csv_shape(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "ifclauses.jsonl")
        experiment = run_rq1([artifact], [1, 2])
        csv = report_to_csv(experiment)
        lines = csv.strip().splitlines()
        assert lines[0].startswith("artifact,seed,n,n_c,rec+")
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "ifclauses" and first[1] == "1"
        assert first[2] == "10" and first[3] == "10"

    def test_doc_contains_log(self, fixtures_dir):
        artifact = load_artifact(fixtures_dir / "ifclauses.jsonl")
        doc = report_to_doc(run_rq1([artifact], [1]))
        run = doc["runs"][0]
        assert len(run["log"]) == 10
        assert run["flags"]["rec+"] == 9
