"""Simulation-based multi-objective optimization workbench for
reconfigurable multi-part flow lines, with decision-rule mining."""

from .genome import Chromosome, EncodedSettings, InfeasibleDecodeError, decode, encode, random_chromosome
from .mining import FeatureTable, Rule, RuleInteraction, build_feature_table, evaluate_interaction, mine
from .model import (
    CaseGenSpec,
    ProblemInstance,
    ProductionMix,
    RmsConfiguration,
    StochasticParams,
    Task,
    Variant,
    check_configuration,
    generate_case,
    load_scenario,
    reference_case,
    save_scenario,
    validate_instance,
)
from .moea import (
    AlgorithmParams,
    Individual,
    RunArchive,
    dominates,
    fast_nondominated_sort,
    hypervolume,
    hypervolume_curve,
    run_baseline_smo,
    run_smo,
)
from .simulation import EvaluationResult, SimulationConfig, evaluate_population, simulate

__version__ = "0.1.0"
