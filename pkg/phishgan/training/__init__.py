"""This sub-package holds the loss terms and the adversarial training loop."""
