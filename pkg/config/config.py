"""
Configuration settings for the tikband estimators, bands and Monte Carlo harness
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Application Settings
LOG_LEVEL = os.getenv("TIKBAND_LOG_LEVEL", "WARNING")
N_JOBS = int(os.getenv("TIKBAND_N_JOBS", "1"))

# Discretization
DEFAULT_GRID_M = int(os.getenv("TIKBAND_GRID_M", "100"))
DEFAULT_TRUNCATION = float(os.getenv("TIKBAND_TRUNCATION", "1.0"))

# Inference defaults
DEFAULT_GAMMA = 0.05
DEFAULT_C0 = 0.0
DEFAULT_GAUSS_DRAWS = int(os.getenv("TIKBAND_GAUSS_DRAWS", "2000"))
MIN_GAUSS_DRAWS = 100
DEFAULT_SEED = 0

# Monte Carlo
DEFAULT_REPLICATIONS = int(os.getenv("TIKBAND_REPLICATIONS", "200"))

# NPIV data-generating process: (Z, W, U) trivariate normal
SIGMA_Z = 0.3
SIGMA_W = 0.3
SIGMA_U_SQ = 0.03
SIGMA_ZU = 0.04
RHO = 0.3
PHI_SCALE_DENOM = 0.8

# Deconvolution data-generating process
DECONV_LATENT_SCALE = 0.3
DECONV_LATENT_BOUND = 0.6
DECONV_NOISE_SCALE = 0.3

# Tuning presets for the published Monte Carlo figures
MC_PRESETS = {
    "fig1a": {"n": 1000, "alpha": 0.14, "h": 1.0, "method": "gauss", "process_index": 1},
    "fig1b": {"n": 5000, "alpha": 0.10, "h": 1.0, "method": "gauss", "process_index": 1},
    "fig2a": {"n": 1000, "alpha": 0.24, "h": 1.0, "method": "concentration", "process_index": 1},
    "fig2b": {"n": 5000, "alpha": 0.17, "h": 0.6, "method": "concentration", "process_index": 1},
}
