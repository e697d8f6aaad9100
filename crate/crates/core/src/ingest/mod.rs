//! Reading recordings and manifests, level calibration, voicing detection
//! and amplitude normalization.

mod calibration;
mod manifest;
mod normalize;
mod recording;
mod voicing;

pub use calibration::{apply_calibration, rms, scale_to_dbspl, unscale_recording, Calibration};
pub use manifest::{CohortManifest, ManifestEntry};
pub use normalize::{normalize_segments, zscore_in_place, NormalizationMode};
pub use recording::{
    load_recording, parse_csv_signal, read_csv, read_wav, write_csv, write_wav, RawRecording,
};
pub use voicing::{
    detect_voicing, frame_len, SilenceProfile, VoicedRegion, Voicing, SILENCE_BIN_EDGES_S,
};
