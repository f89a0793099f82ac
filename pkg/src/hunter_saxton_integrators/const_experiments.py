"""
Named experiment settings that reproduce the published runs.

Each entry maps configuration keys to values and is used as the lowest
precedence layer by ``config.parse_config``; a configuration file and command
line flags override it.
"""

# Exact weak solution on [-6, 6] up to t = 0.5 with dx = 12/201 and dt = 0.01.
HALF_LINE_RUN = {
    "problem": "hs",
    "L": 6.0,
    "N": 201,
    "dt": 0.01,
    "tend": 0.5,
}

# Smooth mhs travelling wave (period 3.2151...) up to t = 3.5 with dx = L_per/256.
MHS_WAVE_RUN = {
    "problem": "mhs",
    "N": 256,
    "dt": 0.02,
    "tend": 3.5,
    "omega": 1.5,
    "m": -0.1,
    "M": 0.5,
    "c": 1.0,
}

# hs2 travelling wave (period 12.5663..., a = sqrt(3)) up to t = 1 with dx = L_per/512.
HS2_WAVE_RUN = {
    "problem": "hs2",
    "N": 512,
    "dt": 0.1,
    "tend": 1.0,
    "b": 1.0,
    "z": -1.0,
    "Z": 1.0,
    "c": 2.0,
    "kappa": 1,
}

EXPERIMENT_MAP = {
    "hs-eb1": {**HALF_LINE_RUN, "scheme": "eb1"},
    "hs-eb2": {**HALF_LINE_RUN, "scheme": "eb2"},
    "hs-h1": {**HALF_LINE_RUN, "scheme": "h1"},
    "hs-h2": {**HALF_LINE_RUN, "scheme": "h2"},
    "mhs-ms": {**MHS_WAVE_RUN, "scheme": "ms"},
    "mhs-h1": {**MHS_WAVE_RUN, "scheme": "h1"},
    "hs2-ms": {**HS2_WAVE_RUN, "scheme": "ms"},
    "hs2-h1": {**HS2_WAVE_RUN, "scheme": "h1"},
}
