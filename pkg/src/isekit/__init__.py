"""Equivalence checking and SE-condition discovery for ground logic programs."""

from .program import (Atom, Universe, Rule, Program, ProgramTuple,
                      parse_program, render_program, render_rule,
                      concat_tuple, atoms_of, ParseError, MixedUniverseError)
from .semantics import (Semantics, HTInterpretation, satisfies, gl_reduct,
                        lpmln_reduct, stable_models, weight_degree,
                        ht_satisfies, ht_models, equivalent,
                        CapExceededError, MissingWeightError)
from .isets import (ISCondition, locals_from_name, name_from_locals,
                    classify_locals, extract_isets, reconstruct_tuple,
                    canonical_tuple, relation, make_condition,
                    ShapeMismatchError)
from .transforms import (TransformKind, PreservationClass, apply_transform,
                         preservation_class, TransformGuardError,
                         UnknownAtomError, FreshAtomCollisionError)
from .discovery import (SearchReport, RunConfig, is_semi_valid,
                        base_name_universe, sic2_excluded,
                        verify_and_compute_mgse, mnse_insert_minimal,
                        discover, discover_basic, discover_improved,
                        discover_conjectural, KNOWN_COUNTS)
from .simplify import (Clique, SimplifiedCondition, SimplifyResult, cis,
                       sis_irrelevant_partition, find_max_cliques, simplify,
                       condition_holds, sim_holds)

__version__ = "0.1.0"
