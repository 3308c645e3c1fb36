from normlab.protocols.checkpoint import (
    load_checkpoint,
    normalized_from_checkpoint,
    save_checkpoint,
)
from normlab.protocols.config import (
    ExperimentConfig,
    config_from_dict,
    datasets_from_config,
    parse_config,
)
from normlab.protocols.runs import (
    RunRecord,
    derive_seed,
    point_plan,
    run_init_std_point,
    run_init_std_protocol,
    run_point,
    run_pretrain_point,
    run_pretrain_protocol,
    run_protocol,
    run_random_label_point,
)
from normlab.protocols.training import Snapshot, select_snapshot, train

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "Snapshot",
    "config_from_dict",
    "datasets_from_config",
    "derive_seed",
    "load_checkpoint",
    "normalized_from_checkpoint",
    "parse_config",
    "point_plan",
    "run_init_std_point",
    "run_init_std_protocol",
    "run_point",
    "run_pretrain_point",
    "run_pretrain_protocol",
    "run_protocol",
    "run_random_label_point",
    "save_checkpoint",
    "select_snapshot",
    "train",
]
