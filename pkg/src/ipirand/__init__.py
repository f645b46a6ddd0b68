"""Randomness evaluation of heartbeat interpulse intervals and a martingale extractor."""

from .bitstream import (
    BitStream,
    NgramDistribution,
    circular_ngram_distribution,
    concat_series,
    probabilities,
)
from .dependency import DependencyReport, PairSampleSummary, e_indp, joint_distribution, pair_sampling
from .errors import PreconditionError
from .extractor import (
    ExtractionResult,
    ExtractorConfig,
    MartingaleExtractor,
    MartingaleState,
    classify_triad,
    extract,
    extract_bits,
    extract_stream,
    gray_code_baseline,
    mre_step,
)
from .ingest import (
    IpiSeries,
    NormalizedIpi,
    SynthModel,
    k_lsb,
    normalize,
    parse_ipi_file,
    rr_times_to_ipi,
    serialize_ipi,
    synth_generate,
)
from .secrecy import EntropyReport, full_report
from .sv_delta import SvDeltaReport, sv_curve, sv_delta

__version__ = "0.1.0"
