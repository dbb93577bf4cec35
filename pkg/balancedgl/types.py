import typing

import numpy as np

Array = np.ndarray
Seed = typing.Optional[int]
ArrayLike = typing.Union[np.ndarray, typing.Sequence[float], typing.Sequence[typing.Sequence[float]]]
