"""Separable p-harmonic exponents on arcs, caps and geodesic polygons."""

from loguru import logger

logger.disable("spheig")
