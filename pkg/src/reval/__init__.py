"""Semantic evaluation for hashtag recommendation.

Scores recommendation sets against ground truth with a synonym-aware
hit ratio: hashtags are embedded as centroids of their tweets' vectors,
a kNN thesaurus supplies each hashtag's synonyms, and a recommended
hashtag counts as a hit when any synonym appears in the ground truth.
Ships a baseline tweet-similarity recommender, a toy embedder, an HTTP
service and a CLI so the pipeline runs end to end on any corpus.
"""

__version__ = "0.1.0"
