"""Published G-study estimates for the UCLA student panel (eight policy items,
five waves), kept as reference inputs for D-study projections.

``PRINTED`` holds values exactly as published. In the Asian American set the
person x item and item x occasion rows are transposed relative to the printed
reliabilities; ``CORRECTED`` swaps them back (see ``asian_swap_evidence`` in
the test-suite for the check).
"""
from .gstudy import VarianceComponents

# Header of each projected column as printed: (top row, bottom row).
COLUMN_HEADERS = ((2, 2), (3, 3), (4, 4), (5, 5), (5, 6), (5, 7), (5, 8))

_WHITE = dict(p=0.450, o=0.057, i=0.328, po=0.000, pi=0.275, io=1.139, pio=1.563)
_WHITE_SE = dict(p=0.059, o=0.148, i=0.275, po=0.013, pi=0.026, io=0.297, pio=0.032)

_ASIAN = dict(p=0.148, o=0.027, i=0.308, po=0.000, pi=0.806, io=0.212, pio=1.547)
_ASIAN_SE = dict(p=0.021, o=0.099, i=0.238, po=0.011, pi=0.210, io=0.018, pio=0.026)

_LATINO = dict(p=0.108, o=0.000, i=2.194, po=0.000, pi=0.753, io=0.027, pio=1.292)
_LATINO_SE = dict(p=0.040, o=0.002, i=1.044, po=0.013, pi=0.065, io=0.012, pio=0.041)

PRINTED = {
    "white": VarianceComponents.from_values(_WHITE, _WHITE_SE, n_p=172, n_i=8, n_o=5),
    "asian": VarianceComponents.from_values(_ASIAN, _ASIAN_SE, n_p=255, n_i=8, n_o=5),
    "latino": VarianceComponents.from_values(_LATINO, _LATINO_SE, n_p=85, n_i=8, n_o=5),
}

_swapped = dict(_ASIAN, pi=_ASIAN["io"], io=_ASIAN["pi"])
_swapped_se = dict(_ASIAN_SE, pi=_ASIAN_SE["io"], io=_ASIAN_SE["pi"])

CORRECTED = dict(PRINTED)
CORRECTED["asian"] = VarianceComponents.from_values(_swapped, _swapped_se,
                                                    n_p=255, n_i=8, n_o=5)

# Printed reliability rows: the single-item/single-occasion value followed by
# one value per COLUMN_HEADERS entry.
RELIABILITY_ROWS = {
    "white": (0.200, 0.460, 0.629, 0.730, 0.793, 0.808, 0.819, 0.827),
    "asian": (0.08, 0.231, 0.380, 0.498, 0.587, 0.612, 0.632, 0.647),
    "latino": (0.050, 0.134, 0.215, 0.286, 0.348, 0.390, 0.427, 0.460),
}

# Printed attenuated rows, one value per COLUMN_HEADERS entry.
ATTENUATED_ROWS = {
    "white": {
        "p": (0.450,) * 7,
        "o": (0.028, 0.019, 0.014, 0.011, 0.009, 0.008, 0.007),
        "i": (0.164, 0.109, 0.082, 0.066, 0.066, 0.066, 0.066),
        "po": (0.000,) * 7,
        "pi": (0.138, 0.092, 0.069, 0.055, 0.055, 0.055, 0.055),
        "io": (0.285, 0.127, 0.071, 0.046, 0.038, 0.033, 0.028),
        "pio": (0.391, 0.174, 0.098, 0.063, 0.052, 0.045, 0.039),
    },
    "asian": {
        "p": (0.148,) * 7,
        "o": (0.014, 0.009, 0.007, 0.005, 0.005, 0.004, 0.003),
        "i": (0.154, 0.103, 0.077, 0.062, 0.062, 0.062, 0.062),
        "po": (0.000,) * 7,
        "pi": (0.202, 0.090, 0.050, 0.032, 0.027, 0.023, 0.020),
        "io": (0.106, 0.071, 0.053, 0.042, 0.042, 0.042, 0.042),
        "pio": (0.387, 0.172, 0.097, 0.062, 0.052, 0.044, 0.039),
    },
    "latino": {
        "p": (0.108,) * 7,
        "o": (0.000,) * 7,
        "i": (1.097, 0.731, 0.549, 0.439, 0.366, 0.313, 0.274),
        "po": (0.000,) * 7,
        "pi": (0.377, 0.251, 0.188, 0.151, 0.126, 0.108, 0.094),
        "io": (0.007, 0.003, 0.002, 0.001, 0.001, 0.001, 0.001),
        "pio": (0.323, 0.144, 0.081, 0.052, 0.043, 0.037, 0.032),
    },
}
