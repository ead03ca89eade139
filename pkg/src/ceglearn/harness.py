"""Evaluation harness: flag-based full training, measures, experiments.

A full-training run randomly orders an artifact and feeds it to the engine
sentence by sentence; each processed record receives exactly one of six
flags (rec+, disc+, crea+, crea-, spec+, spec-). Records the engine cannot
ingest (parse root not S) are tallied separately and receive no flag.

Shuffling is a Fisher-Yates permutation drawn from Python's Mersenne
Twister seeded with the run's 64-bit seed, so identical inputs replay
identically. The pre-training passes of the with-prior-training experiment
shuffle each artifact with a seed derived as the first 8 bytes of
SHA-256("<seed>:<artifact name>").
"""

from __future__ import annotations

import enum
import hashlib
import io
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from . import engine as eng
from .corpus import Artifact, ArtifactRecord
from .engine import EngineState, TrainOutcome

UNPROCESSABLE = "unprocessable"


class Flag(enum.Enum):
    REC_PLUS = "rec+"
    DISC_PLUS = "disc+"
    CREA_PLUS = "crea+"
    CREA_MINUS = "crea-"
    SPEC_PLUS = "spec+"
    SPEC_MINUS = "spec-"


_CAUSAL_FLAGS = {
    TrainOutcome.ALREADY_COVERED: Flag.REC_PLUS,
    TrainOutcome.CREATED: Flag.CREA_PLUS,
    TrainOutcome.CREATION_FAILED: Flag.CREA_MINUS,
    TrainOutcome.SPECIFIED_AND_CREATED: Flag.SPEC_PLUS,
    TrainOutcome.SPECIFICATION_FAILED: Flag.SPEC_MINUS,
}

_NONCAUSAL_FLAGS = {
    TrainOutcome.DISCARDED: Flag.DISC_PLUS,
    TrainOutcome.SPECIFIED: Flag.SPEC_PLUS,
    TrainOutcome.SPECIFICATION_FAILED: Flag.SPEC_MINUS,
}


@dataclass(frozen=True)
class FlagCounts:
    rec_plus: int = 0
    disc_plus: int = 0
    crea_plus: int = 0
    crea_minus: int = 0
    spec_plus: int = 0
    spec_minus: int = 0
    n_causal: int = 0
    n_unprocessable: int = 0

    def __post_init__(self):
        for name in (
            "rec_plus", "disc_plus", "crea_plus", "crea_minus",
            "spec_plus", "spec_minus", "n_causal", "n_unprocessable",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total_flags(self) -> int:
        return (
            self.rec_plus + self.disc_plus + self.crea_plus
            + self.crea_minus + self.spec_plus + self.spec_minus
        )

    def count(self, flag: Flag) -> int:
        return getattr(self, flag.name.lower())

    def flag_dict(self) -> dict[str, int]:
        return {flag.value: self.count(flag) for flag in Flag}


class UndefinedMeasuresError(ValueError):
    """Measures are undefined when no record received a flag."""


@dataclass(frozen=True)
class Measures:
    tcdr: float
    alcdr: float
    recr: float


def compute_measures(counts: FlagCounts) -> Measures:
    """The three training-quality rates.

    tcdr: records handled correctly without intervention (rec+, disc+)
    over all flagged records. alcdr: additionally counts records the
    interaction fixed (crea+, spec+). recr: recognized causal sentences
    over causal sentences; 0 when the artifact has none.
    """
    total = counts.total_flags
    if total == 0:
        raise UndefinedMeasuresError("no flagged records; measures undefined")
    tcdr = (counts.rec_plus + counts.disc_plus) / total
    alcdr = (
        counts.rec_plus + counts.disc_plus + counts.crea_plus + counts.spec_plus
    ) / total
    recr = counts.rec_plus / counts.n_causal if counts.n_causal > 0 else 0.0
    return Measures(tcdr=tcdr, alcdr=alcdr, recr=recr)


@dataclass(frozen=True)
class RunReport:
    artifact: str
    seed: int
    ordering: tuple[str, ...]
    log: tuple[tuple[str, str], ...]  # (record id, flag value or "unprocessable")
    counts: FlagCounts
    measures: Measures


def permuted_indices(n: int, seed: int) -> list[int]:
    """The run's deterministic record order (documented in module docs)."""
    order = list(range(n))
    random.Random(seed).shuffle(order)
    return order


def derive_seed(seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _counts_from_log(
    log: Sequence[tuple[str, str]], artifact: Artifact
) -> FlagCounts:
    tallies = {flag: 0 for flag in Flag}
    unprocessable = 0
    for _, flag_value in log:
        if flag_value == UNPROCESSABLE:
            unprocessable += 1
        else:
            tallies[Flag(flag_value)] += 1
    return FlagCounts(
        rec_plus=tallies[Flag.REC_PLUS],
        disc_plus=tallies[Flag.DISC_PLUS],
        crea_plus=tallies[Flag.CREA_PLUS],
        crea_minus=tallies[Flag.CREA_MINUS],
        spec_plus=tallies[Flag.SPEC_PLUS],
        spec_minus=tallies[Flag.SPEC_MINUS],
        n_causal=artifact.n_causal,
        n_unprocessable=unprocessable,
    )


StepHook = Callable[[EngineState, ArtifactRecord, str], None]


def full_train(
    state: EngineState,
    artifact: Artifact,
    seed: int,
    step_hook: StepHook | None = None,
) -> RunReport:
    """Replay one artifact through the training process, sentence by
    sentence in seeded random order, mutating ``state``.

    ``step_hook`` runs after every record with the state, the record and
    the assigned flag; tests use it to verify the maintenance principles
    after each step.
    """
    order = permuted_indices(len(artifact.records), seed)
    log: list[tuple[str, str]] = []
    for index in order:
        record = artifact.records[index]
        if not record.engine_processable:
            log.append((record.id, UNPROCESSABLE))
            if step_hook is not None:
                step_hook(state, record, UNPROCESSABLE)
            continue
        if record.is_causal:
            outcome = eng.train_causal(state, record.sentence, record.gold)
            flag = _CAUSAL_FLAGS[outcome]
        else:
            outcome = eng.train_noncausal(state, record.sentence)
            flag = _NONCAUSAL_FLAGS[outcome]
        log.append((record.id, flag.value))
        if step_hook is not None:
            step_hook(state, record, flag.value)
    counts = _counts_from_log(log, artifact)
    return RunReport(
        artifact=artifact.name,
        seed=seed,
        ordering=tuple(record_id for record_id, _ in log),
        log=tuple(log),
        counts=counts,
        measures=compute_measures(counts),
    )


@dataclass(frozen=True)
class PrecisionRecallF1:
    precision: float
    recall: float
    f1: float
    degenerate: tuple[str, ...] = ()


def aggregate_prf(reports: Sequence[RunReport]) -> PrecisionRecallF1:
    """Pooled precision/recall/F1 over runs.

    Recall pools recognized causal sentences over causal sentences.
    Precision pools them over all pattern-compliance events whose outcome
    required correction (rec+, spec+, spec-). Zero denominators yield 0
    and are listed in ``degenerate``.
    """
    if not reports:
        raise ValueError("aggregate_prf requires at least one report")
    rec = sum(r.counts.rec_plus for r in reports)
    spec = sum(r.counts.spec_plus + r.counts.spec_minus for r in reports)
    causal = sum(r.counts.n_causal for r in reports)
    degenerate = []
    if rec + spec > 0:
        precision = rec / (rec + spec)
    else:
        precision, degenerate = 0.0, degenerate + ["precision"]
    if causal > 0:
        recall = rec / causal
    else:
        recall, degenerate = 0.0, degenerate + ["recall"]
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1, degenerate = 0.0, degenerate + ["f1"]
    return PrecisionRecallF1(precision, recall, f1, tuple(degenerate))


@dataclass(frozen=True)
class ArtifactSummary:
    mean_measures: Measures
    prf: PrecisionRecallF1


@dataclass(frozen=True)
class ExperimentReport:
    mode: str  # "rq1" or "rq2"
    seeds: tuple[int, ...]
    artifact_names: tuple[str, ...]
    runs: tuple[RunReport, ...]
    per_artifact: dict[str, ArtifactSummary]
    prf: PrecisionRecallF1


def _summarize(runs: Sequence[RunReport], names: Sequence[str]):
    per_artifact: dict[str, ArtifactSummary] = {}
    for name in names:
        mine = [r for r in runs if r.artifact == name]
        per_artifact[name] = ArtifactSummary(
            mean_measures=Measures(
                tcdr=sum(r.measures.tcdr for r in mine) / len(mine),
                alcdr=sum(r.measures.alcdr for r in mine) / len(mine),
                recr=sum(r.measures.recr for r in mine) / len(mine),
            ),
            prf=aggregate_prf(mine),
        )
    return per_artifact


def run_rq1(corpus: Sequence[Artifact], seeds: Sequence[int]) -> ExperimentReport:
    """Train every artifact from an empty engine, once per seed."""
    if not corpus or not seeds:
        raise ValueError("rq1 needs at least one artifact and one seed")
    runs: list[RunReport] = []
    for artifact in corpus:
        for seed in seeds:
            state = EngineState.empty()
            runs.append(full_train(state, artifact, seed))
    names = tuple(a.name for a in corpus)
    return ExperimentReport(
        mode="rq1",
        seeds=tuple(seeds),
        artifact_names=names,
        runs=tuple(runs),
        per_artifact=_summarize(runs, names),
        prf=aggregate_prf(runs),
    )


def run_rq2(corpus: Sequence[Artifact], seeds: Sequence[int]) -> ExperimentReport:
    """Train each artifact after pre-training on all other artifacts.

    For every (target, seed) a fresh engine is pre-trained over the other
    artifacts in corpus order, each internally shuffled by a seed derived
    from (seed, artifact name); measures come from the target's run only.
    """
    if len(corpus) < 2:
        raise ValueError("rq2 needs at least two artifacts")
    if not seeds:
        raise ValueError("rq2 needs at least one seed")
    runs: list[RunReport] = []
    for target in corpus:
        for seed in seeds:
            state = EngineState.empty()
            for other in corpus:
                if other.name == target.name:
                    continue
                full_train(state, other, derive_seed(seed, other.name))
            runs.append(full_train(state, target, seed))
    names = tuple(a.name for a in corpus)
    return ExperimentReport(
        mode="rq2",
        seeds=tuple(seeds),
        artifact_names=names,
        runs=tuple(runs),
        per_artifact=_summarize(runs, names),
        prf=aggregate_prf(runs),
    )


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------

CSV_HEADER = (
    "artifact,seed,n,n_c,rec+,disc+,crea+,crea-,spec+,spec-,"
    "unprocessable,tcdr,alcdr,recr"
)


def report_to_csv(report: ExperimentReport) -> str:
    """One row per run, matching the per-artifact results table layout."""
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for run in report.runs:
        c = run.counts
        out.write(
            f"{run.artifact},{run.seed},{len(run.log)},{c.n_causal},"
            f"{c.rec_plus},{c.disc_plus},{c.crea_plus},{c.crea_minus},"
            f"{c.spec_plus},{c.spec_minus},{c.n_unprocessable},"
            f"{run.measures.tcdr:.6f},{run.measures.alcdr:.6f},"
            f"{run.measures.recr:.6f}\n"
        )
    return out.getvalue()


def report_to_doc(report: ExperimentReport) -> dict:
    """Full JSON document for one experiment (deterministic)."""
    return {
        "mode": report.mode,
        "seeds": list(report.seeds),
        "artifacts": list(report.artifact_names),
        "aggregate": {
            "precision": report.prf.precision,
            "recall": report.prf.recall,
            "f1": report.prf.f1,
            "degenerate": list(report.prf.degenerate),
        },
        "per_artifact": {
            name: {
                "mean_tcdr": summary.mean_measures.tcdr,
                "mean_alcdr": summary.mean_measures.alcdr,
                "mean_recr": summary.mean_measures.recr,
                "precision": summary.prf.precision,
                "recall": summary.prf.recall,
                "f1": summary.prf.f1,
                "degenerate": list(summary.prf.degenerate),
            }
            for name, summary in report.per_artifact.items()
        },
        "runs": [
            {
                "artifact": run.artifact,
                "seed": run.seed,
                "n": len(run.log),
                "n_causal": run.counts.n_causal,
                "flags": run.counts.flag_dict(),
                "unprocessable": run.counts.n_unprocessable,
                "tcdr": run.measures.tcdr,
                "alcdr": run.measures.alcdr,
                "recr": run.measures.recr,
                "log": [[record_id, flag] for record_id, flag in run.log],
            }
            for run in report.runs
        ],
    }
