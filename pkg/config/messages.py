ERROR_MESSAGES = {
    "space_mismatch": "States live on different spaces: {left} vs {right}",
    "label_outside_space": "Label {label} lies outside the truncated space {space}",
    "invalid_label": "Invalid basis label (two_j={two_j}, two_k={two_k}, two_m={two_m})",
    "invalid_operator": "Invalid operator indices for {tag}: two_q={two_q}, two_q_prime={two_q_prime}",
    "spinor_on_integer_tower": "The bi-spinor shifts j by 1/2 and needs the half-integer tower",
    "integer_tower_odd": "The integer tower admits only even two_j, got {two_j}",
    "outside_domain": "|z|^2 = {x} lies outside the convergence disc of family '{family}' (radius {radius})",
    "no_convergence": "Series for family '{family}' does not converge at x = {x}: ratio {ratio}",
    "beta_out_of_range": "beta = {beta} outside [0, pi]",
    "angle_out_of_range": "{name} = {value} outside its Euler range",
    "mobius_pole": "Rotation maps zeta = {zeta} onto the pole of the Mobius chart",
    "negative_exponent": "Differential operator {op} produced a negative exponent at {key}",
    "vanishing_coefficient": "Family '{family}' has c_j = 0 at two_j = {two_j} inside the state support",
    "missing_measure": "Family '{family}' has no resolution-of-unity measure",
    "evolution_pole": "Riccati flow left the chart at t = {t}: |zeta| = {modulus}",
    "config_format": "Malformed {kind} file {path}: {detail}",
    "unknown_family": "Unknown builtin family id {family_id} (expected 1..8)",
    "unknown_suite": "Unknown verification suite '{suite}'",
    "unknown_table": "Unknown table '{which}'",
}

STATUS_MESSAGES = {
    "initializing": "Services are still initializing",
    "ready": "Services ready",
    "suite_passed": "Suite '{suite}' passed in {elapsed:.2f}s",
    "suite_failed": "Suite '{suite}' failed: {count} defect(s) above tolerance",
}
