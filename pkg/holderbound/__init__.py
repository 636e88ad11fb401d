from .config import AnalysisConfig, load_config
from .errors import HolderBoundError, StageError
from .expression_parser import parse_curve, parse_defining_function

__version__ = '0.3.0'

__all__ = ['AnalysisConfig', 'HolderBoundError', 'StageError', 'load_config', 'parse_curve',
           'parse_defining_function', '__version__']
