from .backbone import SbirModelConfig, SbirModel, ToyBackbone, embed_feature, fuse, toy_sbir_config
from .losses import decorrelation_loss, triplet_margin_loss, quadruplet_triplet_loss
from .train import SbirTrainConfig, train_sbir, synthesize_contours, toy_sbir_train_config
from .retrieval import GalleryIndex, RetrievalResult, retrieve, rank_gallery, query_features
from .gradcam import gradcam, top_contributing_dims

__all__ = [
    "SbirModelConfig",
    "SbirModel",
    "ToyBackbone",
    "embed_feature",
    "fuse",
    "toy_sbir_config",
    "decorrelation_loss",
    "triplet_margin_loss",
    "quadruplet_triplet_loss",
    "SbirTrainConfig",
    "train_sbir",
    "synthesize_contours",
    "toy_sbir_train_config",
    "GalleryIndex",
    "RetrievalResult",
    "retrieve",
    "rank_gallery",
    "query_features",
    "gradcam",
    "top_contributing_dims",
]
