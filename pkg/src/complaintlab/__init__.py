"""Consumer-complaint text pipeline: ingestion, featurization, classification,
metrics and synthetic narrative generation."""

__version__ = "0.1.0"
