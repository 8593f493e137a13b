//! Ground truth in place of hardware: microphone audio for a finger moving
//! over static clutter, a virtual linear stage, and accelerometer streams
//! with pinch transients.

mod echo;
mod imu;
mod scene;
mod stage;

pub use echo::{synthesize_echo, EchoRecording, EchoSynth, TruthSample};
pub use imu::{synthesize_imu, ImuSample, ImuStream, ImuSynth, ImuSynthConfig, IMU_RATE_HZ};
pub use scene::{
    echo_gain, FingerConfig, FingerPath, Reflector, SceneConfig, Segment, SegmentKind, Trajectory, Walker,
    REFERENCE_RANGE_MM,
};
pub use stage::{linear_stage_protocol, run_stage_trial, NoiseCondition, StageOutcome, StageProtocol, StageTrial};
