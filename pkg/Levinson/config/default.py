RUN_CONFIG = {
    "family": "bump",
    "depth": 1.0,
    "radius": 1.0,
    "dimension": 3,
    "table": None,
    "lambda_max": None,   # 400 * (max|V| + a^-2) when unset
    "l_max": None,        # ceil(sqrt(lambda_max) * a) + 20 when unset
    "grid_points": 240,
    "quad_tol": 1e-10,
    "step_tol": 1e-10,
    "phase_tol": 1e-8,
    "max_jump": 0.4 * 3.141592653589793,
    "tail_window": 0.15,
    "residual_tol": 0.05,
    "box_factor": 20.0,
    "box_points": 4000,
    "flow_seeds": 200,
    "flow_dim_min": 2,
    "flow_dim_max": 10,
    "flow_s": (0.75, 1.0, 2.0),
    "flow_box_length": 20.0,
    "flow_box_points": 2000,
    "scan_channel": 0,
    "scan_low": 0.1,
    "scan_high": 10.0,
    "scan_points": 64,
    "bk_low": -3.0,
    "bk_high": 9.0,
    "bk_box_length": 40.0,
    "bk_box_points": 4000,
}
