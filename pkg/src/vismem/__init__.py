"""vismem: a self-contained engine for human-like image recall.

Images are perturbed (Gaussian noise or blur), projected into a latent
space by a pluggable encoder, and stored in an exact nearest-neighbor
k-d tree. Recall encodes a probe image clean and reads the distance to
its nearest stored neighbor; on top of that sit the forced-choice and
streaming repeat-detection protocols, threshold calibration, PCA
analysis, and a reproducible experiment runner.
"""

from .analysis import (
    DistanceSummary,
    FailureCase,
    PcaProjection,
    distance_stats,
    extract_failures,
    fit_pca,
    project,
    project_batch,
    summarize_distances,
)
from .config import (
    CONFIG_SCHEMA,
    DataSource,
    ExperimentConfig,
    Seeds,
    SplitFractions,
    SynthSpec,
    load_config,
    save_config,
)
from .dataset import (
    ManifestEntry,
    SplitResult,
    SplitSpec,
    load_manifest,
    split,
    synth_structured,
    synth_texture,
    write_manifest,
)
from .embedding import as_embedding, load_embedding_file, write_embedding_file
from .encoders import (
    DownsampleMeanEncoder,
    Encoder,
    EncoderDescriptor,
    EncoderKind,
    FileEncoder,
    RandomProjectionEncoder,
    StdioEncoder,
    downsample_mean_encode,
    encode,
    make_encoder,
    random_projection_encode,
)
from .errors import (
    BadMagicError,
    ConfigError,
    DegenerateCalibrationError,
    DegenerateVarianceError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyCalibrationSetError,
    EmptyPairsError,
    ExhaustedImagesError,
    ExternalUnavailableError,
    FractionError,
    GridTooFineError,
    InsufficientDataError,
    NoRecordsError,
    ParseError,
    ProtocolViolationError,
    TruncatedFileError,
    VismemError,
)
from .image import ImageBuffer, read_image, read_png, read_raw, write_png, write_raw
from .memory import (
    MemoryStore,
    NearestNeighborResult,
    load_snapshot,
    nearest_bruteforce,
    save_snapshot,
)
from .perturbation import (
    PerturbationKind,
    PerturbationSpec,
    add_gaussian_noise,
    gaussian_blur,
    gaussian_kernel,
    perturb,
)
from .stdio_client import ConformanceReport, StdioEncoderClient, run_conformance_check
from .tasks import (
    ForcedChoiceResult,
    ForcedChoiceTrial,
    LagBucketStats,
    RepeatDetectionMetrics,
    RepeatStream,
    StreamEvent,
    ThresholdCalibration,
    calibrate_threshold,
    forced_choice,
    make_repeat_stream,
    memorize,
    recall_distance,
    repeat_detection,
)

__version__ = "0.1.0"
