"""
Configuration for polarlab.
Tolerances, report layout, exit codes and generator constants in one place.
"""
from pathlib import Path

from pydantic import BaseModel, Field

VERSION = "1.0.0"

# Base paths
BASE_DIR = Path(__file__).parent.parent
DEFAULT_OUTPUT_DIR = BASE_DIR / "reports"

# Input files
SUPPORTED_INPUT_EXTENSIONS = [".csv", ".txt", ".json"]

# Spinor / unitary gates
NORM_TOL = 1e-9
UNITARY_TOL = 1e-10

# Eigensolver
HERMITIAN_TOL = 1e-8
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
DEGENERATE_GAP_TOL = 1e-12

# Polar factors and rotations
SINGULAR_TOL = 1e-10
ROTATION_TOL = 1e-8
ANTISYMMETRY_TOL = 1e-10
PI_BRANCH_TOL = 1e-6

# Physical realizability and characteristic analysis
CLAMP_TOL = 1e-9
SPECTRUM_SUM_TOL = 1e-9
COHERENT_CORE_TOL = 1e-9
PURE_TOL = 1e-12
NONREGULAR_TOL = 1e-9

# Interferometry
PHASE_UNDEFINED_TOL = 1e-12

# Channels
TP_TOL = 1e-9
KRAUS_COMPLETENESS_WARN = 1e-6
CHOI_HERMITIAN_TOL = 1e-8

# Ensembles
WEIGHT_SUM_TOL = 1e-12

# Seeded generator (64-bit LCG, high 53 bits -> [0, 1))
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
LCG_MODULUS = 2 ** 64

# Report layout
REPORT_SECTIONS = [
    "meta",
    "validity",
    "spectrum",
    "purity",
    "components",
    "discriminant",
    "holonomy",
    "phases",
    "channel",
    "sweep",
    "error",
]
SWEEP_CSV_HEADER = "param,re_v,im_v,arg_v,abs_v"

# Request modes and their CLI subcommand names
MODES = ["mueller-analyze", "channel-analyze", "synth", "validate", "sweep"]
SUBCOMMAND_MODES = {
    "validate": "validate",
    "analyze-mueller": "mueller-analyze",
    "analyze-channel": "channel-analyze",
    "synth": "synth",
    "sweep": "sweep",
}
BUILTIN_FAMILIES = ["retarder-pair", "retarder-triple"]

# Exit codes (error code -> process status)
EXIT_CODES = {
    "ok": 0,
    "nonphysical": 2,
    "no_coherent_core": 3,
    "parse_error": 4,
    "phase_undefined": 5,
}


class Tolerances(BaseModel):
    """Tolerances that can be overridden from the CLI or HTTP layer."""
    hermitian: float = Field(HERMITIAN_TOL, gt=0)
    clamp: float = Field(CLAMP_TOL, gt=0)
    degenerate_gap: float = Field(DEGENERATE_GAP_TOL, gt=0)
    singular: float = Field(SINGULAR_TOL, gt=0)
    pi_branch: float = Field(PI_BRANCH_TOL, gt=0)
    coherent_core: float = Field(COHERENT_CORE_TOL, gt=0)
    nonregular: float = Field(NONREGULAR_TOL, gt=0)
    phase_undefined: float = Field(PHASE_UNDEFINED_TOL, gt=0)
    tp: float = Field(TP_TOL, gt=0)


def get_exit_code(error_code: str) -> int:
    """Get process exit status for an error code"""
    return EXIT_CODES.get(error_code, 1)


def get_section_index(name: str) -> int:
    """Get position of a report section"""
    try:
        return REPORT_SECTIONS.index(name)
    except ValueError:
        return len(REPORT_SECTIONS)
