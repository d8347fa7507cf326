from .checkpoint import load_model, model_from_dict, model_to_dict, save_model
from .evaluation import EvalReport, STRATEGIES, evaluate, sample_accuracy, summarize
from .gradcheck import (
    GradientCheckReport,
    analytic_gradients,
    gradient_check,
    gradient_check_report,
)
from .mlp import MlpModel, PredictorError, predict, predict_many
from .training import AdamW, TrainConfig, fit, train

__all__ = [
    "AdamW",
    "EvalReport",
    "GradientCheckReport",
    "MlpModel",
    "PredictorError",
    "STRATEGIES",
    "TrainConfig",
    "analytic_gradients",
    "evaluate",
    "fit",
    "gradient_check",
    "gradient_check_report",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "predict",
    "predict_many",
    "sample_accuracy",
    "save_model",
    "summarize",
]
