"""Exception hierarchy shared by the library, the CLI and the report service."""
from typing import Dict, Optional


class HolderBoundError(Exception):
    """Base class for every error raised by holderbound"""


class CapMismatchError(HolderBoundError):
    """Operands carry different degree caps"""


class CapOverflowError(HolderBoundError):
    """A result needs more jet order than the cap allows"""


class ParseError(HolderBoundError):
    """Syntax error in a defining-function or curve expression"""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class NotRealValuedError(HolderBoundError):
    """Polynomial fails the Hermitian symmetry scan"""


class ConfigError(HolderBoundError):
    """Unknown configuration key or unparsable value"""


class StageError(HolderBoundError):
    """A pipeline stage failed; carries the stage name and diagnostics"""

    stage = 'pipeline'

    def __init__(self, message: str, diagnostics: Optional[Dict] = None, stage: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.diagnostics = diagnostics or {}
        if stage:
            self.stage = stage


class MissingNormalDirectionError(StageError):
    stage = 'normal_form'


class KrantzBranch(StageError):
    """No mixed term up to eta: the bound 1/eta holds without the slice machinery"""

    stage = 'normal_form'


class CurveError(StageError):
    stage = 'normal_form'


class ShearExhaustedError(StageError):
    stage = 'normal_form'


class DiagramError(StageError):
    stage = 'newton_diagram'


class WitnessInconclusiveError(StageError):
    stage = 'newton_diagram'


class ConvergenceError(StageError):
    stage = 'slice_analysis'


class DegenerateFitError(StageError):
    stage = 'slice_analysis'


class SamplingError(StageError):
    stage = 'domain_geometry'


class PrerequisiteError(StageError):
    stage = 'holder_pipeline'
