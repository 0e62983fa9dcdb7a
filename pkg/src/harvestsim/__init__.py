"""Models, closed-form gains, and a transient oracle for switched vibration harvesting."""

from .analytic import (
    Amplification,
    AnalyticParams,
    Formula,
    integrated_sshi_amplification,
    lc_half_period,
    sshc_amplification,
    sshi_amplification,
    sshi_event_params,
    sshi_params,
)
from .harvest import (
    CompareReport,
    Evaluator,
    PowerBudget,
    Quantity,
    SweepContext,
    SweepParam,
    SweepRow,
    SweepSpec,
    SweepTable,
    compare_sshc,
    compare_sshi,
    mean_load_power,
    power_budget,
    run_sweep,
)
from .models import (
    EmEquivalentCircuit,
    ExcitationSpec,
    IntegratedInductor,
    Load,
    PiezoEquivalentCircuit,
    PiezoMaterialGeometry,
    ValidationError,
    derive_equivalent_circuit,
    inductor_quality_factor,
    series_resistance_for_q,
)
from .transient import (
    CausalPeakDetector,
    CircuitState,
    Peak,
    SimConfig,
    SimResult,
    SwitchEvent,
    detect_peaks,
    simulate_baseline,
    simulate_em_sshc,
    simulate_sshc,
    simulate_sshi,
)

__version__ = "0.1.0"
