"""Semi-supervised conditional GAN for phishing URLs.

The package trains a class-conditional generator that rewrites real URLs into
adversarial look-alikes, and a two-headed discriminator that both classifies a
URL as benign or malicious and flags adversarial examples. It also builds and
solves the attacker-defender games that frame that training and deployment.

Basically the package contains network code (source) and default settings
(data). The settings live as YAML files in the `parameters` folder, in the
same dated format as a rules-as-code parameter tree.
"""

import os

PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))

# Directory of the YAML parameter tree loaded by `phishgan.settings`.
PARAMETERS_DIR = os.path.join(PACKAGE_DIR, "parameters")
