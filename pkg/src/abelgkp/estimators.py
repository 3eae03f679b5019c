"""scikit-learn style wrapper around the coset decoders."""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .decode import DualCandidates, Periodizer, med_error_class, mld_error_class
from .gkpcode import GkpCode


class CosetDecoder(BaseEstimator):
    """Maps displacement errors (rows of X) to the index of the residual logical
    class in K; class 0 means the correction restored the code space.

    Parameters are the code, the decoder ("mld" or "med") and the Gaussian noise
    width used by MLD (None decodes as if the noise were uniform). ``fit`` only
    precomputes decoder tables; ``score`` is the fraction of rows decoded
    correctly, or of rows whose predicted class equals ``y`` when labels are given.
    """

    def __init__(self, code: Optional[GkpCode] = None, decoder: str = "mld",
                 sigma: Optional[float] = None):
        self.code = code
        self.decoder = decoder
        self.sigma = sigma

    def fit(self, X=None, y=None):
        if not isinstance(self.code, GkpCode):
            raise ValueError("code must be a GkpCode")
        if self.decoder not in ("mld", "med"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma must be positive")
        self.n_features_in_ = self.code.lattice.dim
        if self.decoder == "med":
            self.table_ = DualCandidates(self.code)
        else:
            self.table_ = (Periodizer(self.code.lattice.basis, self.sigma)
                           if self.sigma is not None else None)
        self.classes_ = np.arange(self.code.order_K)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        if self.decoder == "med":
            return med_error_class(self.code, X, self.table_)
        return mld_error_class(self.code, X, self.sigma, self.table_)

    def score(self, X, y=None) -> float:
        pred = self.predict(X)
        target = np.zeros_like(pred) if y is None else np.asarray(y)
        return float(np.mean(pred == target))
