"""Learnable frequency-filter front-ends for speaker verification."""

from .filterbank import (
    FeatureMatrix,
    FilterBankParams,
    FilterShape,
    ParamGradients,
    apply_filters,
    backward,
    build_weight_matrix,
    filter_response,
    forward,
    mel_init,
    project_params,
)
from .signal_io import AudioBuffer, SyntheticSpeakerProfile, load_wav, synth_speaker_utterance, synth_tone
from .stft import SpectrumMatrix, StftConfig, compute_spectrum, compute_spectrum_conv, frame_signal

__version__ = "0.1.0"
