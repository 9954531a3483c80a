"""Event-by-event simulation of single-neutron interferometry.

Each neutron is a message (a 2D complex unit vector) processed one at
a time by deterministic learning machines standing in for the beam
splitters; detector statistics are compared against a built-in
quantum-theory oracle.
"""

__version__ = "0.1.0"

from .dlm import ColdStartError, DlmSplitter, learning_trace  # noqa: F401
from .experiments import (ExperimentRecord, Interferometer,  # noqa: F401
                          run_absorber, run_bell, run_bell_random_chi,
                          run_low_count, run_mzi, run_rf, run_shutter)
from .messages import Message, make_message  # noqa: F401
from .oracle import (propagate, qt_bell_E, qt_bell_S, qt_mzi,  # noqa: F401
                     solve_shutter_params)
