"""Data models and document schemas."""
