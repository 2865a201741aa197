"""Feature selection and classification for categorical/numeric tables.

Modules
-------
ingest      parse, filter, encode and split delimited tables
featsel     Boruta shadow screening, ridge thresholding, random Fourier features
models      naive Bayes, kNN, CART, random forest, logistic regression, MLP
evaluation  metrics and the selection x classifier grid
rank        information-gain attribute ranking
experiment  JSON experiment configs and end-to-end runs
"""

__version__ = "0.1.0"

from .experiment import ExperimentConfig, load_config, run_experiment  # noqa: E402
from .ingest import ColumnSpec, Dataset, RawTable  # noqa: E402

__all__ = ["ColumnSpec", "Dataset", "ExperimentConfig", "RawTable", "load_config", "run_experiment"]
