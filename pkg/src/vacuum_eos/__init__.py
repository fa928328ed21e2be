"""Desk-scale simulator of electro-optic field correlations on vacuum and thermal THz fields."""

from .optics import (
    CrystalParams,
    DispersionModel,
    Responsivity,
    coherence_length,
    field_transmission,
    responsivity,
    thz_refractive_index,
)
from .correlation import (
    CorrelationTrace,
    FrequencyGrid,
    GridMismatchError,
    Spectrum,
    ThermalState,
    bose_einstein,
    calibrate_k_cal,
    extract_photon_number,
    g1_spatial,
    g1_temporal,
    lowpass_filter,
    peak_peak,
    power_spectrum,
)

__version__ = "0.1.0"
