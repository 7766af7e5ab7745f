import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
    REGPROP_THREADS = max(1, int(os.getenv("REGPROP_THREADS", "1")))
    REGPROP_OUTPUT_DIR = os.getenv("REGPROP_OUTPUT_DIR", "output")
    SHOW_PROGRESS = os.getenv("REGPROP_PROGRESS", "1") not in ("0", "false", "False")
    REGPROP_SEED = int(os.getenv("REGPROP_SEED", "20240611"))
    VERIFY_PERIODS = float(os.getenv("REGPROP_VERIFY_PERIODS", "20"))

    # integrator defaults
    REL_TOL = float(os.getenv("REGPROP_REL_TOL", "1e-12"))
    ABS_TOL = float(os.getenv("REGPROP_ABS_TOL", "1e-12"))
    MAX_STEPS = int(os.getenv("REGPROP_MAX_STEPS", "1000000"))
    SAFETY = 0.9
    MIN_FACTOR = 0.2
    MAX_FACTOR = 5.0

    # numerical thresholds
    ANTISYMMETRY_TOL = 1e-12
    ZERO_AXIS = 1e-300
    DRIFT_TOL = 1e-9
    CONSTRAINT_TOL = 1e-8
    PARABOLIC_TOL = 1e-9
    CIRCULAR_TOL = 1e-12
    ASYMPTOTE_GUARD = 1e-12
    NEAR_PARABOLIC_BAND = 1e-2
    NEAR_PARABOLIC_RATIO = 0.25
    FD_STEP = 1e-6
    DEGENERATE_INCLINATION = 1e-10
    ROOT_XTOL = 1e-12

    # Earth (SI with km), used to normalize SI scenario input
    EARTH_MU = 398600.4418
    EARTH_RADIUS = 6378.137
    EARTH_J2 = 1.08262668e-3
