from .models import ModelSplit, build_cnn, build_mlp
from .objectives import (
    LossComponents,
    ObjectiveConfig,
    consistency_total_loss,
    jsd_consistency,
    mixing_task_loss,
    mixing_total_loss,
)
from .loop import (
    EpochMetrics,
    NaNLossError,
    TrainResult,
    evaluate_ra,
    evaluate_sa,
    load_dataset,
    train_run,
)
from .studies import (
    BudgetRow,
    SweepRow,
    budget_epochs,
    epoch_budget_study,
    feature_geometry_stats,
    gamma_sweep,
    median_metric,
)

__all__ = [
    "ModelSplit", "build_cnn", "build_mlp",
    "LossComponents", "ObjectiveConfig", "consistency_total_loss",
    "jsd_consistency", "mixing_task_loss", "mixing_total_loss",
    "EpochMetrics", "NaNLossError", "TrainResult", "evaluate_ra", "evaluate_sa",
    "load_dataset", "train_run",
    "BudgetRow", "SweepRow", "budget_epochs", "epoch_budget_study",
    "feature_geometry_stats", "gamma_sweep", "median_metric",
]
