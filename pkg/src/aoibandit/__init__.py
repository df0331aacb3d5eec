"""Slotted-time edge-network AoI simulator with non-stationary bandit policies."""

from .config import (ConfigError, NetworkConfig, ProbabilityRange,
                     ResourceCapViolation, ZeroDimension, validate_config)
from .adwin import AdwinWindow, DetectorConfig, ZeroCount, epsilon_cut
from .simcore import (EnvDraws, SlotActions, SlotOutcome, WorldState,
                      expected_reward, initial_state, step_slot)
from .policies import (AbarConfig, AbarPolicy, DiscountedUcbPolicy,
                       OraclePolicy, PolicyObservation, RandomPolicy,
                       RequestPolicy, SlidingWindowUcbPolicy, block_bounds,
                       classify_slot, select_monitoring_arm, ucb_select)
from .metrics import (ChangePoint, EmptyLog, MissingMuTable, ResetEvent,
                      RunLog, average_aoi, classify_changes, classify_resets,
                      cumulative_regret, detectability_report,
                      drift_tolerant_regret, export_csv, pseudo_regret_slot)
from .scenarios import ScenarioPreset, builtin_scenarios
from .runner import (PolicyParams, RunSpec, RunSummary, UnknownPolicy,
                     UnknownScenario, run_experiment, run_simulation,
                     summarize, summarize_log)

__version__ = "0.1.0"
