"""lexbridge: legislative XML conversion and cross-national provision
correspondence pipeline."""

__version__ = "0.1.0"
