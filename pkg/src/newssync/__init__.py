"""News event clustering and country-level news diversity / synchrony measures."""

from .agreement import (
    RatingsTable,
    gwet_ac1,
    intrusion_precision,
    intrusion_precision_by_rater,
    krippendorff_alpha,
)
from .config import PipelineConfig, derive_seed, load_config
from .corpus import (
    Article,
    Corpus,
    CorpusStats,
    corpus_stats,
    english_equivalent_length,
    filter_articles,
    load_corpus,
)
from .events import (
    ClusterSet,
    EventCluster,
    EventStats,
    IntrusionBundle,
    cluster_pair_counts,
    cluster_significance,
    detect_events,
    event_stats,
    intrusion_bundles,
)
from .graph import WeightedGraph, betweenness, build_graph, disparity_backbone, pagerank
from .measures import (
    CountryEventDistribution,
    SynchronyMatrix,
    baseline_diversity,
    baseline_synchrony,
    equal_weight_subsample,
    event_distribution,
    jsd,
    shannon_entropy,
    synchrony,
    synchrony_graph,
    synchrony_matrix,
)
from .pairs import CandidatePair, InvertedIndex, build_inverted_index, generate_candidates, jaccard
from .regression import (
    FeatureTable,
    RegressionModel,
    SelectionReport,
    aic,
    aic_stepwise_select,
    dummy_encode,
    ols_fit,
    pairwise_category,
    read_feature_csv,
    rescale01,
    vif,
    vif_select,
    write_feature_csv,
)
from .similarity import (
    AspectLabels,
    EmbeddingStore,
    LabelMapping,
    ScoredPair,
    cosine,
    cubic_transform,
    head_tail_select,
    integrated_label,
    map_label,
    pearson,
    score_pairs,
)

__version__ = "0.1.0"
