"""Stepanov and Weyl almost periodicity: seminorms, translation numbers, mild solutions."""

from .aptest import (ClassifyPolicy, TranslationQuery, classify, scan_translations,
                     translation_distance, ursell_agreement)
from .errors import *  # noqa: F401,F403
from .evolution import (MildSolution, SemigroupSpec, contraction_constant, gronwall_bound,
                        linear_mild_solution, linear_solution_bound, picard_solve,
                        semigroup_apply, translation_diagnostic, verify_stability,
                        weyl_condition_check)
from .seminorms import (ScanSpec, danilov_membership, danilov_tail, stepanov_distance,
                        stepanov_norm, weyl_norm)
from .signals import (ParametricSignal, Signal, constant, paper_ode_solution, paper_primitive,
                      paper_step, primitive, shift, sine)

__version__ = "0.1.0"
