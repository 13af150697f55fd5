import math

TOLERANCES = {
    "algebra": 1e-12,
    "unitarity": 1e-12,
    "identity_residual": 1e-10,
    "norm_relative": 1e-10,
    "overlap": 1e-9,
    "rotation": 1e-9,
    "expectation": 1e-9,
    "uncertainty": 1e-10,
    "mellin": 1e-8,
    "unity_diagonal": 1e-4,
    "unity_off_diagonal": 1e-10,
    "unity_cross_check": 1e-3,
    "beta_profile": 1e-10,
    "zrep": 1e-10,
    "fidelity": 1e-6,
    "precession": 1e-6,
    "rotor_phase": 1e-10,
    "rotor_departure": 1e-3,
    "sigma_imaginary": 1e-12,
}

TRUNCATION = {
    "two_j_cap_unbounded": 30,
    "two_j_cap_disc": 80,
    "tail_tolerance": 1e-16,
    "state_tail_tolerance": 1e-14,
    "ratio_window": 5,
    "chunk_size": 64,
    "max_terms": 200000,
    "divergence_check_terms": 5000,
    "dropped_weight_warning": 1e-8,
}

QUADRATURE = {
    "radial_nodes": 200,
    "angular_nodes": 16,
    "quad_limit": 200,
    "quad_epsrel": 1e-12,
    "quad_epsabs": 0.0,
    "wavefunction_nodes": 12,
}

EVOLUTION = {
    "overflow_guard": 1e6,
    "step_tolerance": 1e-12,
    "max_halvings": 30,
    "default_dt": 1e-3,
    "default_t_end": 1.0,
    "rotor_sample_times": [0.25, 0.5, 0.75, 1.0],
    "finite_difference_step": 1e-4,
}

TABLE_SAMPLES = {
    "norm_points": 20,
    "expectation_points": 10,
    "unbounded_modulus_max": 4.0,
    "disc_modulus_max": 0.9,
    "oracle_unbounded_modulus_max": 1.0,
    "oracle_disc_modulus_max": 0.5,
    "tensor_modulus": 0.3,
    "mellin_two_j_max": 8,
}

CLI_DEFAULTS = {
    "format": "csv",
    "seed": 20240611,
    "two_j_max_unity": 4,
    "two_j_max_brute": 2,
    "two_j_max_algebra": 6,
    "random_draws": 50,
}

UNBOUNDED = math.inf
