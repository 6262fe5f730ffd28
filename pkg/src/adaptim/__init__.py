"""Adaptive influence maximization (AdaptGreedy + EPIC) under the IC model."""
