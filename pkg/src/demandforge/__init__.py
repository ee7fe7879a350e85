"""demandforge: panel demand forecasting workbench.

Library + batch CLI covering dataset ingestion, time-series feature
engineering, a model repository with cross-learning and per-series setups,
dual cross-validation configuration search, and evaluation with regression
and inventory-simulation metrics.
"""

__version__ = "0.1.0"
