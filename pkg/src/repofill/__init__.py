"""Repository-aware context retrieval and prompting for method body completion."""

__version__ = "0.1.0"
