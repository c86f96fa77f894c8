"""Swarm-based wrapper feature selection with an AdaBoost evaluator.

The package bundles four cooperating layers: labeled-dataset handling
(CSV I/O, synthesis, stratified splitting), a discrete AdaBoost
classifier over decision stumps, swarm optimizers on the unit box
(an improved fireworks algorithm plus fireworks, PSO and bat
baselines), and the wrapper that ties them together by discretizing
firework positions into feature masks.  A photoplethysmography
signal pipeline (band-pass filtering, spectral peak estimation,
frame-tensor I/O) produces the kind of feature tables the selector
was built for, and a small PCA implementation serves as a
dimensionality-reduction baseline.
"""

__version__ = "0.1.0"
