"""Pure-numpy truncated-Taylor product (fallback for the compiled kernel)."""

import numpy as np


def truncated_mul(a, b, I, J, K, size):
    prod = a[I] * b[J]
    return np.bincount(K, prod.real, minlength=size) + 1j * np.bincount(
        K, prod.imag, minlength=size
    )


def truncated_mul_many(a, b, I, J, K, size):
    prod = a[:, I] * b[:, J]
    rows = a.shape[0]
    flat = (np.arange(rows)[:, None] * size + K[None, :]).ravel()
    re = np.bincount(flat, prod.real.ravel(), minlength=rows * size)
    im = np.bincount(flat, prod.imag.ravel(), minlength=rows * size)
    return (re + 1j * im).reshape(rows, size)
