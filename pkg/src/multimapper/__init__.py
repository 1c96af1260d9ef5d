"""Mapper / Multimapper engine.

Builds Mapper simplicial complexes from point clouds over overlapping
lens-space covers (cuboidal or brick), detects simplices whose underlying
intersections are disconnected, and supports region-local rescaling that
glues locally re-covered Mappers into one complex.
"""

from .errors import MultimapperError

__version__ = "0.1.0"

__all__ = ["MultimapperError", "__version__"]
