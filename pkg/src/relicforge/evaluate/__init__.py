"""Differential interpreters and translation scoring."""

from relicforge.evaluate.cobol_interp import build_environment, interpret_cobol
from relicforge.evaluate.java_interp import interpret_java
from relicforge.evaluate.scoring import (
    APPROACH_AI,
    APPROACH_RULES,
    DEFAULT_SEED,
    DEFAULT_TAU,
    INPUT_LENGTH,
    INPUT_VECTORS,
    LABEL_AGREEMENT_MIN,
    EvalSummary,
    FileScore,
    build_training_set,
    drop_pct,
    evaluate_corpus,
    has_goto,
    input_battery,
    label_agreement,
    load_oracle_labels,
    run_evaluation,
    score_file,
    traces_match,
    write_eval_json,
    write_file_scores,
    write_pairs,
)
from relicforge.evaluate.values import (
    MAX_CALL_DEPTH,
    MAX_STEPS,
    Budget,
    Cell,
    ExecError,
    Outcome,
    OutcomeKind,
    Trace,
    arith,
    compare,
    fit,
    store,
    to_num,
    to_str,
    wrap64,
)

__all__ = [
    "APPROACH_AI",
    "APPROACH_RULES",
    "DEFAULT_SEED",
    "DEFAULT_TAU",
    "INPUT_LENGTH",
    "INPUT_VECTORS",
    "LABEL_AGREEMENT_MIN",
    "MAX_CALL_DEPTH",
    "MAX_STEPS",
    "Budget",
    "Cell",
    "EvalSummary",
    "ExecError",
    "FileScore",
    "Outcome",
    "OutcomeKind",
    "Trace",
    "arith",
    "build_environment",
    "build_training_set",
    "compare",
    "drop_pct",
    "evaluate_corpus",
    "fit",
    "has_goto",
    "input_battery",
    "interpret_cobol",
    "interpret_java",
    "label_agreement",
    "load_oracle_labels",
    "run_evaluation",
    "score_file",
    "store",
    "to_num",
    "to_str",
    "traces_match",
    "wrap64",
    "write_eval_json",
    "write_file_scores",
    "write_pairs",
]
