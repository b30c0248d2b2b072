"""sprays - Tube formulas for graph-directed sprays, checked against an exact oracle."""

__version__ = "0.1.0"

from sprays.catalog import get_example
from sprays.loader import SprayModel, load_model
from sprays.spray import Spray

__all__ = ["Spray", "SprayModel", "get_example", "load_model"]
