"""Workbench for Li-type coefficients of weight-2 Hecke L-products.

The arithmetic side builds the coefficients from the Eichler-Selberg trace
formula (exact class-number-weighted sums); the zero side locates
critical-line zeros of the attached completed L-functions and sums the
coefficients directly over them.  Eta-product q-expansions at eight
genus-one levels tie the two sides together as an exact integer oracle.
"""

from .arith import (
    PrimeSieve,
    crt_solve,
    divisor_count,
    divisors,
    euler_phi,
    factorize,
    is_perfect_square,
    psi_index,
    sieve_primes,
    von_mangoldt,
)
from .quadform import (
    ClassNumberEntry,
    ClassNumberTable,
    batch_class_data,
    class_data,
    reduced_forms,
    square_divisor_decompositions,
)
from .modforms import (
    ETA_LEVELS,
    LevelData,
    QExpansion,
    b_from_eigen,
    conductor_log_term,
    dim_S2,
    eta_product_qexp,
    level_data,
    newform_dim,
)
from .trace import (
    BValue,
    B_value,
    TraceBProvider,
    TraceTerms,
    build_b_provider,
    mu_count,
    trace_T,
    trace_T_primepower,
)
from .li import (
    LiCoefficientReport,
    NewformLiReport,
    binomial_tail_term,
    conrey_asymptotic_check,
    constant_identity_511,
    hurwitz_tail,
    prime_sum_term,
    tau_N_arithmetic,
    tau_f_arithmetic,
    test_function_transform,
)
from .zeros import (
    CompletedLValue,
    ZeroList,
    completed_L,
    find_zeros,
    incomplete_gamma_upper,
    load_zeros,
    local_prime_side,
    local_zero_side,
    positivity_from_arithmetic,
    positivity_from_zeros,
    tau_from_zeros,
)

__version__ = "0.1.0"
