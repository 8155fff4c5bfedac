import numpy as np

from ..errors import SingularDeconvolutionError


def solve_diagonal(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Spectral division with the unobservable DC sample defined as 0.

    Raises
    ------
    SingularDeconvolutionError
        If the denominator vanishes anywhere other than DC.
    """
    zero = den == 0
    zero_ac = zero.copy()
    zero_ac[0, 0] = False
    if np.any(zero_ac):
        raise SingularDeconvolutionError(
            f"{int(np.count_nonzero(zero_ac))} non-DC denominator samples are zero"
        )
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=~zero)
    out[0, 0] = 0.0
    return out
