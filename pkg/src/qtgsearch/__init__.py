"""Classical emulation and resource estimation for tree-generator quantum
search on 0-1 quadratic and multidimensional knapsack problems."""

from .amplify import (
    AmplificationConfig,
    QsearchResult,
    QMaxSearchResult,
    QuantumRunRecord,
    cycles_to_runtime,
    grover_success_probability,
    qmaxsearch,
    qsearch,
)
from .baseline import (
    SearchTrace,
    TraceEntry,
    TraceSource,
    exact_optimum,
    greedy_incumbent,
    greedy_trace,
    ingest_external_trace,
    write_trace_csv,
)
from .bench import (
    CampaignConfig,
    CampaignSummary,
    ComparisonRecord,
    GapUndefinedError,
    MatchResult,
    match_incumbents,
    relative_gap,
    run_campaign,
)
from .formats import ParseError, parse_instance, write_instance
from .instances import (
    InputError,
    KnapsackInstance,
    LimitExceededError,
    ProblemKind,
    ProfitBound,
    Solution,
    ValidationError,
    check_feasible,
    evaluate_profit,
    numbits,
    profit_upper_bound,
)
from .resources import (
    CostModel,
    DEFAULT_COST_MODEL,
    ResourceEstimate,
    break_item,
    estimate_qtg,
    grover_iteration_cost,
    load_cost_model,
    qubit_count_mdkp,
    qubit_count_qkp,
)
from .rng import name_seed, substream
from .sampler import (
    FOLLOW_INCUMBENT,
    QtgModel,
    SuccessMass,
    bias_for_distance,
    bits_to_code,
    branch_probability,
    code_to_bits,
    evaluate_profits_batch,
    feasible_batch,
    path_distribution,
    path_probability,
    residuals_batch,
    sample_path,
    sample_paths,
    success_mass,
)

__version__ = "0.1.0"

__all__ = [
    "AmplificationConfig",
    "CampaignConfig",
    "CampaignSummary",
    "ComparisonRecord",
    "CostModel",
    "DEFAULT_COST_MODEL",
    "FOLLOW_INCUMBENT",
    "GapUndefinedError",
    "InputError",
    "KnapsackInstance",
    "LimitExceededError",
    "MatchResult",
    "ParseError",
    "ProblemKind",
    "ProfitBound",
    "QsearchResult",
    "QMaxSearchResult",
    "QtgModel",
    "QuantumRunRecord",
    "ResourceEstimate",
    "SearchTrace",
    "Solution",
    "SuccessMass",
    "TraceEntry",
    "TraceSource",
    "ValidationError",
    "bias_for_distance",
    "bits_to_code",
    "branch_probability",
    "code_to_bits",
    "evaluate_profits_batch",
    "feasible_batch",
    "break_item",
    "check_feasible",
    "cycles_to_runtime",
    "estimate_qtg",
    "evaluate_profit",
    "exact_optimum",
    "greedy_incumbent",
    "greedy_trace",
    "grover_iteration_cost",
    "grover_success_probability",
    "ingest_external_trace",
    "load_cost_model",
    "match_incumbents",
    "name_seed",
    "numbits",
    "parse_instance",
    "path_distribution",
    "path_probability",
    "profit_upper_bound",
    "residuals_batch",
    "qmaxsearch",
    "qsearch",
    "qubit_count_mdkp",
    "qubit_count_qkp",
    "relative_gap",
    "run_campaign",
    "sample_path",
    "sample_paths",
    "substream",
    "success_mass",
    "write_instance",
    "write_trace_csv",
]
