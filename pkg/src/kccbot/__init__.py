"""Retrieval-based agricultural Q&A chatbot over the Kisan Call Center dataset."""

__version__ = "0.1.0"
