"""High percentiles of compound sums of heavy-tailed losses.

Submodules: ``specfun``, ``bell``, ``severity``, ``frequency``,
``perturbative``, ``baselines``, ``montecarlo``, ``levy``,
``pareto_asymptotics`` and ``cli``.
"""

__version__ = "0.1.0"
