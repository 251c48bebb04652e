"""Hinge-loss soft logic with a parametric soft conjunction, and audits of
the convex conjunction uniqueness result."""

from .conjunction import (
    AVERAGE,
    LUKASIEWICZ,
    FrechetInterval,
    SoftConjunction,
    eval_average,
    eval_family,
    eval_lukasiewicz,
    frechet_bounds,
    resolve_c1,
    satisfies_definition1,
)
from .convexity import (
    AuditReport,
    ConvexityCounterexample,
    VertexCombination,
    convexity_search,
    decompose,
    decompose_boundary,
    decompose_interior,
    decompose_upper,
    uniqueness_audit,
)
from .inference import (
    Interpretation,
    LossSpec,
    Solution,
    SolveConfig,
    evaluate_objective,
    export_lp,
    grid_oracle,
    parse_lp,
    rule_penalty,
    solve_subgradient,
)
from .joint import JointDistribution, construct_joint, joint_conjunction_prob, joint_marginal
from .rules import GroundModel, Program, format_program, ground, load_model, parse_program, validate

__version__ = "0.1.0"
