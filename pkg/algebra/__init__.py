"""
Cobordism Calculator - Algebra layer
Coefficient rings and truncated multivariate power series.
"""
