from .config import ConfigError, StudyConfig, load_config, make_config, validate
from .report import TableReport, emit, emit_all, write_reports
from .studies import run_study, study_cex1_projection, study_cex1_rom, study_cex2

__all__ = [
    "ConfigError", "StudyConfig", "load_config", "make_config", "validate",
    "TableReport", "emit", "emit_all", "write_reports",
    "run_study", "study_cex1_projection", "study_cex1_rom", "study_cex2",
]
