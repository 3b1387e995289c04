"""This sub-package builds the generator and the two-headed discriminator.

Both networks are `Network` instances: an ordered list of `LayerSpec` plus
parameters and batch normalization statistics keyed `<layer>.<name>`. The
`checkpoint` module stores a generator/discriminator pair on disk.
"""
