"""chemvecrag: chemistry-aware semantic vector search with a self-reflective RAG orchestrator."""

__version__ = "0.1.0"
