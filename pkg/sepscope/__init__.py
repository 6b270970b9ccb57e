"""Realignment and PPT separability criteria for bipartite states."""

from .criteria import DensityMatrix, Verdict, full_report, ppt_test, rccn_test
from .matkernel import BipartiteIndex
from .states import StateFamily, StateSpec, build_state
from .truncation import SweepPlan, run_sweep, stability_report

__all__ = [
    'BipartiteIndex',
    'DensityMatrix',
    'StateFamily',
    'StateSpec',
    'SweepPlan',
    'Verdict',
    'build_state',
    'full_report',
    'ppt_test',
    'rccn_test',
    'run_sweep',
    'stability_report',
]
