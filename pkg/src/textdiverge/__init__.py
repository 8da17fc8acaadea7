"""textdiverge: quantify how two text corpora diverge.

Word-level Jensen-Shannon shift reports with context-diversity shading,
disparity-filtered hashtag topic networks with centrality rankings, and
volume-controlled effective-diversity comparisons.
"""

from .corpus import (
    CorpusWindow,
    EmptyCorpusError,
    StopList,
    Tweet,
    TokenBag,
    TokenDistribution,
    build_distribution,
    extract_hashtags,
    filter_window,
    frequency_timeseries,
    parse_tweet_stream,
    partition_by_anchor,
    tokenize,
)
from .diversity import (
    BoxplotStats,
    DiversitySampleSet,
    boxplot_stats,
    compare_diversity,
    subsample_diversity,
)
from .graphalgs import (
    CentralityTable,
    CommunityAssignment,
    betweenness,
    build_topic_network,
    louvain,
    pagerank,
    random_walk_betweenness,
)
from .hashnet import (
    BackboneStats,
    TopicNetwork,
    WeightedGraph,
    alpha_sweep,
    build_cooccurrence,
    disparity_filter,
    largest_component,
    network_stats,
)
from .infotheory import (
    Direction,
    JsdWeights,
    effective_diversity,
    jsd,
    jsd_contributions,
    kl_divergence,
    shannon_entropy,
    word_context_diversity,
)
from .wordshift import (
    ShiftConfig,
    ShiftEntry,
    WordShiftReport,
    build_word_shift,
    export_word_shift_json,
    import_word_shift_json,
    render_word_shift_svg,
)

__version__ = "0.1.0"
