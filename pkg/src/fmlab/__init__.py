"""fmlab: exact verification lab for functional modules and compact operators."""

from .exactkernel import (Matrix, RotScalar, Subspace, parse_rat, quotient,
                          rat, rat_str, rot_eval, rot_reduce, solve_linear,
                          span)
from .galgebra import (Algebra, AlgebraHom, FinGroup, check_hom,
                       check_quadratik, compose_hom, cyclic_group, find_unit,
                       group_algebra, rationals, symmetric_group_3,
                       trivial_group, validate_algebra)
from .fmod import (FunctionalModule, ModuleHom, check_cofull_functionals,
                   check_cofull_module, direct_sum, external_tensor,
                   internal_tensor, standard_module, validate_module,
                   zero_module)
from .kops import (CompactAlgebra, CompactOp, approx_unit_transfer_check,
                   corner_embedding, kalgebra, matrix_iso, theta)
from .funext import (FunPair, change_coefficients, check_functional_hom,
                     corner_module_composition, decide_functional_extension,
                     funpair_compose, funpair_direct_sum,
                     funpair_external_tensor, identity_pair,
                     induced_compact_hom)
from .equiv import (CornerWitness51, average_extension,
                    amplify_nonequivariant, corner51_witness,
                    plain_module_extension)
from .witness import (ClassCCertificate, ClosureTerm, Prop22Certificate,
                      RotationPath, certify_class_c, rotation_path,
                      verify_prop22)

__version__ = "0.1.0"
