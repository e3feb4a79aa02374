"""User behaviour, overlap networks, community detection and small statistics."""

from .graph import (
    Graph,
    Partition,
    community_user_sets,
    cross_posters,
    jaccard,
    louvain,
    modularity,
    overlap_graph,
    write_edges_csv,
    write_partition_csv,
)
from .profiles import UserProfile, build_profiles, cohort_means, decile_assign, write_profiles_csv
from .stats import KMeansResult, OlsResult, PcaResult, kmeans, ols, pca, pearson

__all__ = [
    "Graph", "KMeansResult", "OlsResult", "Partition", "PcaResult", "UserProfile", "build_profiles",
    "cohort_means", "community_user_sets", "cross_posters", "decile_assign", "jaccard", "kmeans", "louvain",
    "modularity", "ols", "overlap_graph", "pca", "pearson", "write_edges_csv", "write_partition_csv",
    "write_profiles_csv",
]
