"""Random triangular groups: models, collapse machinery, and experiments."""

from .words import (Letter, Word, count_cyclically_reduced,
                    count_length3_closed_form, inverse, is_cyclically_reduced,
                    rank, sample_word, unrank)
from .presentation import (Partition, Presentation, SplitSample,
                           default_partition, density, load_presentation,
                           sample_binomial, sample_two_stage, sample_uniform,
                           save_presentation, stage_of, universe_size)
from .intersection import (ComponentSummary, DerivedGraph, IntersectionGraph,
                           components, derive_rig, edge_probability,
                           gamma_solve, giant_fraction, sample_rig)
from .collapse import (Abelianization, Certificate, Saturator, Verdict,
                       WitnessResult, abelianization, euler_characteristic,
                       is_trivial_detected, parse_certificate,
                       pipeline_failure_bound, replay, replay_classes,
                       saturate, serialize_certificate, verdict,
                       witness_pipeline)
from .experiments import (SweepGrid, Table, TrialConfig, TrialRecord, emit,
                          giant_experiment, read_table, run_trial, sweep,
                          trial_seed)

__all__ = [name for name in dir() if not name.startswith("_")]
