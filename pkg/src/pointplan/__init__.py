"""Rigid-body motion planning workbench.

Point-cloud obstacle representations encoded with a shared-MLP/max-pool
network, trained jointly with goal-conditioned policies (SAC + HER, or
behavioral cloning on Bi-RRT demonstrations), benchmarked against Bi-RRT
in procedurally generated 2D/3D environments.
"""

__version__ = "0.1.0"
