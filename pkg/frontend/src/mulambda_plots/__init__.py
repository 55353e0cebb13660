"""Offline figure rendering for harness CSV outputs."""

from .csvio import SchemaError, read_summary, read_trace_summary
from .figures import plot_runtime_vs_k, plot_trajectory

__all__ = ["SchemaError", "plot_runtime_vs_k", "plot_trajectory",
           "read_summary", "read_trace_summary"]
