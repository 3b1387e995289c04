"""This sub-package is used to turn URLs into network inputs.

It holds the character vocabulary and one-hot codec, the class labels, and the
dataset helpers (CSV files, cross-validation folds, synthetic corpus).
"""
