"""Principal components in phylogenetic tree space."""

from ._core import (
    DataError,
    LeafSet,
    Tree,
    TreeSpaceError,
    distance,
    fit_component,
    frechet_mean,
    geodesic_point,
    kingman_tree,
    parse_newick,
    project,
    read_trees,
    sum_sq_projected,
    surface_dataset,
    surface_point,
    write_trees,
)

__all__ = [
    "DataError",
    "LeafSet",
    "Tree",
    "TreeSpaceError",
    "distance",
    "fit_component",
    "frechet_mean",
    "geodesic_point",
    "kingman_tree",
    "parse_newick",
    "project",
    "read_trees",
    "sum_sq_projected",
    "surface_dataset",
    "surface_point",
    "write_trees",
]
