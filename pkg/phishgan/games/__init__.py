"""This sub-package models the attacker-defender games around the detector.

`tree` builds the training-time and deployment-time games, `solver` finds
their subgame-perfect outcome and `utilities` measures the players' utilities
on real batches.
"""
