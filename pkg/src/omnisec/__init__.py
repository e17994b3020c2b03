"""Pose and power optimization for omnidirectional multirotor radio platforms.

Submodules: ``geometry`` (frames and rotations), ``antenna`` (gain
patterns), ``channel`` (link budgets, SINR, secrecy rate), ``netscene``
(scenarios and orientation rules), ``optimize`` (derivative-free search),
``actuation`` (rotor allocation and hover feasibility) and ``harness``
(configs, sweeps and the CLI).
"""
__version__ = "0.1.0"
