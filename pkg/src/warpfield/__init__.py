"""Certified scalar-curvature constructions for warped-product metrics."""
