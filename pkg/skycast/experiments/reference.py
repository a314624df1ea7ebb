"""
Skycast Experiments - Reference values
Published full-data results from the NREL SRRL protocol, used when the
real station export is available (SKYCAST_NREL_CSV).
"""

# Inclusive calendar dates of the three rolling steps
NREL_SPLITS = [
    {"name": "step1", "train": ["2017-09-27", "2019-09-26"], "validate": ["2019-09-27", "2020-09-26"],
     "description": "Time and irradiance representations"},
    {"name": "step2", "train": ["2017-09-27", "2020-09-26"], "validate": ["2020-09-27", "2021-09-26"],
     "description": "Input time horizon"},
    {"name": "step3", "train": ["2017-09-27", "2021-09-26"], "validate": ["2021-09-27", "2022-09-26"],
     "description": "Feature importance"},
]

WINDOW_COUNTS = {
    "step1": {"train": 21343, "validate": 12509},
    "step2": {"train": 33852, "validate": 13256},
    "step3": {"train": 47108, "validate": 9199},
}

FINAL_MAE = 75.20
HEADLINE_MAE = 74.34
POC_MAE = 134.35
EIGHT_FEATURE_MAE = 77.36

# Validation MAE (W/m²): (noise, feature set) -> steps 1..3
NOISE_ABLATION = {
    ("off", "all"): (89.35, 76.85, 75.20),
    ("off", "top10"): (94.61, 83.93, 77.36),
    ("on", "all"): (91.07, 76.01, 74.95),
    ("on", "top10"): (88.96, 76.01, 74.34),
}

# ΔMAE (W/m²) of the ten most important features
TOP10_IMPORTANCE = {
    "cdoc_total_cloud_cover": 37.76,
    "csi_ghi": 14.22,
    "dni_lag_4": 8.08,
    "photometer_940nm": 6.00,
    "cs_dev_mean_11_dni": 5.62,
    "photometer_675nm": 5.20,
    "csi_dni": 4.88,
    "elevation": 4.73,
    "cs_dev_dni": 4.08,
    "dni_lag_9": 3.06,
}

HORIZONS_MIN = tuple(range(10, 130, 10))

RMSE = {
    "poc": (264.56, 254.14, 258.72, 260.19, 264.17, 263.40, 263.86, 269.37, 268.16, 266.79, 265.10, 265.33),
    "model": (97.90, 111.19, 119.86, 126.00, 131.69, 136.66, 139.82, 143.48, 145.36, 148.65, 151.49, 153.52),
}

NMAP = {
    "poc": (21.5, 22.8, 24.6, 26.2, 27.8, 29.1, 30.1, 31.6, 32.6, 33.4, 34.1, 34.9),
    "model": (9.6, 11.9, 13.4, 14.7, 15.8, 16.8, 17.4, 18.0, 18.6, 19.2, 19.6, 20.0),
}
