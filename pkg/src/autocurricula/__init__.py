"""Autocurriculum training for decision-making agents.

A vectorized procedural maze plus curriculum baselines (domain
randomization, PAIRED, prioritized level replay and its robust, parallel
and evolutionary variants), driven by a declarative experiment CLI.
"""

__version__ = "0.1.0"
