"""Password-keyed speech scrambling, noise-robust pitch tracking and
closed-set speaker identification over an encrypted template store."""

__version__ = "0.1.0"

from .audio import WORKING_RATE, Signal, load, normalize_peak, read_wav, resample, write_wav
from .channel import ChannelConfig, awgn, mix_noise_file, run_mse_sweep, transmit
from .cipher import CipherText, decrypt, dct_forward, dct_inverse, encrypt, mse
from .errors import VoiceCryptError
from .features import METHODS, FeatureVector, extract
from .identify import RankedResult, TemplateDB, accuracy_bench, euclidean
from .keys import KeyPair, concat_and_split, derive_keys, split_digits, validate_password
from .pitch import FrameConfig, PitchTrack, amdf, autocorr, extract_pitch, refine_peak
from .prng import PrnStream

__all__ = [
    "WORKING_RATE", "Signal", "load", "normalize_peak", "read_wav", "resample", "write_wav",
    "ChannelConfig", "awgn", "mix_noise_file", "run_mse_sweep", "transmit",
    "CipherText", "decrypt", "dct_forward", "dct_inverse", "encrypt", "mse",
    "VoiceCryptError",
    "METHODS", "FeatureVector", "extract",
    "RankedResult", "TemplateDB", "accuracy_bench", "euclidean",
    "KeyPair", "concat_and_split", "derive_keys", "split_digits", "validate_password",
    "FrameConfig", "PitchTrack", "amdf", "autocorr", "extract_pitch", "refine_peak",
    "PrnStream",
]
