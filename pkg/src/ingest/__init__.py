from .csv_loader import NAN_TOKENS, load_csv, load_features_csv, write_dataset_csv, write_matrix_csv
from .dataset import Dataset, split_train_valid
from .synthetic import generate_synthetic

__all__ = [
    "NAN_TOKENS",
    "Dataset",
    "generate_synthetic",
    "load_csv",
    "load_features_csv",
    "split_train_valid",
    "write_dataset_csv",
    "write_matrix_csv",
]
