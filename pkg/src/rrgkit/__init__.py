"""rrgkit: random regular graphs, switchings, size-biased tail bounds, and
second-eigenvalue statistics at desk scale."""

__version__ = "0.1.0"
