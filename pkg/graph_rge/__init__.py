"""Random graph embeddings: fixed-length vectors for sets of graphs."""

__version__ = "0.1.0"
