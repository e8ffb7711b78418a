import numpy as np
import pytest

from fracsav.cq_weights import bdf6_symbol
from fracsav.legendre import build_space


@pytest.fixture(scope="session")
def space50():
    return build_space(50)


@pytest.fixture(scope="session")
def fft_weight_oracle():
    """Independent weight oracle: sample the symbol's alpha-power on a
    circle and invert the discrete Fourier transform.

    The contour is shrunk slightly (rho = 0.995): on the unit circle the
    2**14-point inverse transform aliases the slowly decaying coefficient
    tail at the 1e-5 level, which would swamp the comparison; at this
    radius the alias terms carry rho**16384 ~ 2e-36 and the rho**-j
    rescaling grows only to ~13 at j = 512.
    """

    def oracle(alpha, n_max, n_samples=2**14, radius=0.995):
        symbol = bdf6_symbol()
        z = radius * np.exp(2j * np.pi * np.arange(n_samples) / n_samples)
        values = symbol(z) ** alpha
        coeffs = (np.fft.fft(values) / n_samples).real[: n_max + 1]
        return coeffs / radius ** np.arange(n_max + 1)

    return oracle
