"""Control-flow graphs, static metrics, and model step features."""

from relicforge.analysis.cfg import (
    Cfg,
    CfgEdge,
    CfgNode,
    CfgNodeKind,
    EdgeKind,
    build_cfg,
    cyclomatic,
    validate,
)
from relicforge.analysis.metrics import (
    FEATURE_NAMES,
    MetricsRecord,
    coupling,
    decision_complexity,
    file_features,
    measure,
)
from relicforge.analysis.steps import (
    EDGE_ORDER,
    StepFeatures,
    statement_mask,
    step_features,
)

__all__ = [
    "Cfg",
    "CfgEdge",
    "CfgNode",
    "CfgNodeKind",
    "EDGE_ORDER",
    "EdgeKind",
    "FEATURE_NAMES",
    "MetricsRecord",
    "StepFeatures",
    "build_cfg",
    "coupling",
    "cyclomatic",
    "decision_complexity",
    "file_features",
    "measure",
    "statement_mask",
    "step_features",
    "validate",
]
