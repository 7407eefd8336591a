"""Loschmidt-echo rate functions and metamorphic transitions for
double-quenched 1D two-band models, at zero and finite temperature."""

from .critical import (
    CriticalBranch,
    CriticalReport,
    DeviationSample,
    check_metamorphic_conditions,
    critical_branches,
    deviation_gi,
    find_orthogonal_momenta,
    kitaev_critical_cos,
    metamorphic_tau,
    ordinary_dqpt_times,
    ssh_critical_cos,
)
from .loschmidt import (
    RateCurve,
    StageFrequencies,
    amplitude_full,
    amplitude_stage1_k,
    amplitude_stage2_k,
    detect_kinks,
    rate_function,
)
from .model import (
    BlochDispersion,
    BlochSample,
    KitaevParams,
    QuenchSchedule,
    SshParams,
    eval_dispersion,
    kitaev_bloch,
    momentum_grid,
    ssh_bloch,
    winding_number,
)
from .oracle import (
    amplitude_bruteforce,
    build_hk,
    expm_unitary,
    run_oracle_check,
    thermal_density,
)
from .sweep import (
    BatchItem,
    DiagramGrid,
    batch_rate_curves,
    kitaev_phase_diagram,
    ssh_phase_diagram,
)
from .thermal import Temperature, ThermalBlochField, bloch_vector, thermal_bloch

__version__ = "0.1.0"

__all__ = [
    "BlochDispersion",
    "BlochSample",
    "BatchItem",
    "CriticalBranch",
    "CriticalReport",
    "DeviationSample",
    "DiagramGrid",
    "KitaevParams",
    "QuenchSchedule",
    "RateCurve",
    "SshParams",
    "StageFrequencies",
    "Temperature",
    "ThermalBlochField",
    "amplitude_bruteforce",
    "amplitude_full",
    "amplitude_stage1_k",
    "amplitude_stage2_k",
    "batch_rate_curves",
    "bloch_vector",
    "build_hk",
    "check_metamorphic_conditions",
    "critical_branches",
    "detect_kinks",
    "deviation_gi",
    "eval_dispersion",
    "expm_unitary",
    "find_orthogonal_momenta",
    "kitaev_bloch",
    "kitaev_critical_cos",
    "kitaev_phase_diagram",
    "metamorphic_tau",
    "momentum_grid",
    "ordinary_dqpt_times",
    "rate_function",
    "run_oracle_check",
    "ssh_bloch",
    "ssh_critical_cos",
    "ssh_phase_diagram",
    "thermal_bloch",
    "thermal_density",
    "winding_number",
    "__version__",
]
