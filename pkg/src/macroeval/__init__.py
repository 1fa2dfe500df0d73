"""Corpus-level MT evaluation with type-level macro/micro F, BLEU and chrF.

Also provides leave-one-out segment favoritism between two systems and a
Kendall tau harness for correlating metric scores with human judgments.
"""

__version__ = "0.1.0"
