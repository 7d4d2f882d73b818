"""csf: code-switch framework.

Converts English-Hindi code-switched social media text into its
monolingual (Devanagari Hindi, translated English) and mixed-script
cross-lingual forms, and trains/evaluates baseline classifiers for
sarcasm and hate-speech detection on the result.
"""

__version__ = "0.1.0"
