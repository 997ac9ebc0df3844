"""Robinson dissimilarity spaces: recognition and tree representations."""

from .core import DissimilarityMatrix, NotRobinson, RobinsonError

__all__ = ["DissimilarityMatrix", "NotRobinson", "RobinsonError"]
__version__ = "0.1.0"
