"""Relative Highway Crack Density (RHCD) pipeline.

Turns a road-network extract plus georeferenced orthophoto tiles into a
per-segment crack-density index and correlates it with traffic-volume and
land-surface-temperature covariates. See the ``rhcd`` CLI for the stage
orchestration.
"""

__version__ = "0.1.0"
