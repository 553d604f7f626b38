from .block_attack import (
    block_pair_attack,
    construct_fixed_point_pairs,
    construct_periodic_state,
    fixed_point_search,
    keeloq_attack,
    pair_equations,
)
from .cipher import (
    BUILTINS,
    BlockCipher,
    CipherError,
    StreamCipher,
    block_decrypt,
    block_encrypt,
    build_builtin,
    keystream_gen,
    load_state,
    system_fingerprint,
)
from .cnf import CnfError, CnfFormula, export_cnf
from .equations import KeyEquations, key_equations, linear_slice, recover_initial
from .guessing import GuessPool, GuessSpec, GuessSpecError, attack_stream, solve_guess

__all__ = [
    "BUILTINS",
    "BlockCipher",
    "CipherError",
    "CnfError",
    "CnfFormula",
    "GuessPool",
    "GuessSpec",
    "GuessSpecError",
    "KeyEquations",
    "StreamCipher",
    "attack_stream",
    "block_decrypt",
    "block_encrypt",
    "block_pair_attack",
    "build_builtin",
    "construct_fixed_point_pairs",
    "construct_periodic_state",
    "export_cnf",
    "fixed_point_search",
    "keeloq_attack",
    "key_equations",
    "keystream_gen",
    "linear_slice",
    "load_state",
    "pair_equations",
    "recover_initial",
    "solve_guess",
    "system_fingerprint",
]
