"""Verification harness: suites, corpus, constant fitting and reports."""

from .config import ConfigError, RunConfig, SuiteSpec, load_config, make_spec
from .corpus import CORPUS, CorpusEntry, corpus, falpha_handle
from .fitting import Fit, fit_constant, loglog_slope
from .registry import REGISTRY, SUITES, run_suite, suite_ids
from .report import Case, VerifyReport, emit_report, exit_code, to_csv, to_json

__all__ = [
    "CORPUS", "Case", "ConfigError", "CorpusEntry", "Fit", "REGISTRY", "RunConfig", "SUITES", "SuiteSpec",
    "VerifyReport", "corpus", "emit_report", "exit_code", "falpha_handle", "fit_constant", "load_config",
    "loglog_slope", "make_spec", "run_suite", "suite_ids", "to_csv", "to_json",
]
