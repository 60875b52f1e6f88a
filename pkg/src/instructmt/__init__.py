"""instructmt: corpus preparation and evaluation toolkit for
instruction-driven multilingual translation experiments.

Subpackage map:

- :mod:`instructmt.languages`    language registry and pairs
- :mod:`instructmt.corpus`       parallel corpus load/filter/sample
- :mod:`instructmt.instructions` instruction rendering and ICL prompts
- :mod:`instructmt.partitions`   train-pair partitions and data conditions
- :mod:`instructmt.metrics`      tokenizers, BLEU, Spearman, scaling fits
- :mod:`instructmt.langid`       character n-gram language identification
- :mod:`instructmt.errors`       instruction-following error detectors
- :mod:`instructmt.analysis`     grids, factor correlations, reports
- :mod:`instructmt.cli`          command-line pipeline
"""

__version__ = "0.1.0"
