"""Approximate implication of probabilistic conditional independence statements.

Instances are falsified by semi-lattice inclusion and validated by exact
linear-program feasibility over a minimal 0-1 constraint matrix; both
outcomes come with certificates that can be checked independently.
"""

from .engine import Decision, DecideOptions, Outcome, combine, decide, decide_set, semigraphoid_closure
from .estimator import ImplicationEngine, check_statements
from .exceptions import (
    CapExceededError,
    CIError,
    ContractError,
    NodeBudgetExceeded,
    ParseError,
    UniverseMismatchError,
)
from .falsify import FalsificationResult, check_inclusion, relevant_elementary
from .io import InstanceFile, format_instance, parse_instance, parse_instance_file
from .lp import FeasibilityOutcome, SparseBinaryMatrix, ip_feasible, lp_feasible, verify_farkas, verify_solution
from .measure import (
    JointTable,
    SetFunction,
    lattice_sum_check,
    marginal,
    mobius_inversion,
    multiinformation,
    random_factorized_table,
    relative_entropy,
    satisfies,
)
from .model import (
    CIStatement,
    SemiLattice,
    VarSet,
    VarUniverse,
    enumerate_elementary,
    format_statement,
    parse_statement,
    semi_lattice,
    semi_lattice_union,
)
from .validate import (
    AntecedentSystem,
    ConstraintSystem,
    LatticeVector,
    ValidationCertificate,
    build_system,
    validate,
    validate_combinatorial,
    verify_certificate,
)

__version__ = "0.1.0"
