"""Lanchester-type free-radical/antioxidant attrition models.

Closed-form and integrated cell-culture survival, sensitivity sweeps,
least-squares fitting, and a per-minute organism apoptosis simulator.
"""
from ._accel import backend
from .errors import (ConfigError, DomainError, EndOfDayError, ModelError,
                     NoExtinctionError, NumericBlowUpError)
from .model import (PAPER_PARAMS, CultureParams, Trajectory, cell_survival,
                    closed_form_trajectory, effectiveness, extinction_time,
                    radical_level, survival_rate)
from .ode import IntegratorSpec, State, derivatives, integrate, max_error_vs_analytic
from .organism import (Activity, MinuteRecord, OrganismConfig, OrganismState,
                       Schedule, SimReport, positive_root, simulate_day,
                       step_minute, ticks_to_threshold)
from .sweep import FitSpec, SweepSpec, fit_parameters, run_sweep

__version__ = "0.1.0"
