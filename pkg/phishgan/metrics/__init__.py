"""This sub-package holds the evaluation metrics and their plain-text reports."""
