"""LZ78 incremental parsing and the universal algorithms built on it."""

from .channel import (
    Codebook,
    ExperimentReport,
    FsChannel,
    log_likelihood,
    ml_decode,
    run_experiment,
    transmit,
    ziv_decode,
)
from .codec import (
    BitStream,
    KeyStream,
    code_length,
    lz78_decode,
    lz78_encode,
    otp_apply,
    otp_decrypt,
)
from .divergence import LabeledCorpus, classify, lz_divergence
from .ensemble import (
    DistortionBall,
    UniversalDistribution,
    build_universal,
    rd_point,
    single_best_rate,
)
from .errors import (
    AlphabetMismatchError,
    DecodeError,
    EmptySequenceError,
    GuardrailError,
    InputError,
    KeyExhaustedError,
    LengthMismatchError,
    LZKitError,
)
from .inference import (
    EmpiricalModel,
    TestVerdict,
    empirical_entropy,
    estimate_markov_order,
    test_fair_coin,
    test_memoryless,
)
from .parsing import (
    CrossParseResult,
    JointParseResult,
    ParseResult,
    ParseTrie,
    conditional_metric,
    cross_parse,
    incremental_parse,
    joint_parse,
    lz_complexity,
)
from .sequence import Alphabet, Sequence
from .sequential import (
    PredictionReport,
    PredictorState,
    gamble_sequence,
    predict_sequence,
    sequential_code_length,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
