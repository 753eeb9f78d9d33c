"""Per-token embedding export from masked language models."""

from .exporter import ExportConfig, ExportError, export_embeddings, fine_tune_mlm

__version__ = "0.1.0"

__all__ = ["ExportConfig", "ExportError", "export_embeddings", "fine_tune_mlm"]
