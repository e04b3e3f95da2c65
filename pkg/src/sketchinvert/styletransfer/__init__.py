from .encoder import TapEncoder, SurrogateTapEncoder, VggTapEncoder, build_encoder
from .networks import (
    StyleModelConfig,
    StyleTransferModel,
    EmbeddingProjector,
    DomainDecoder,
    PatchDiscriminator,
    AttributeHead,
    build_style_model,
    toy_style_config,
)
from .losses import (
    embedding_consistency_loss,
    reconstruction_loss,
    attribute_loss,
    generator_adversarial_loss,
    discriminator_adversarial_loss,
)
from .train import StyleTrainConfig, train_style

__all__ = [
    "TapEncoder",
    "SurrogateTapEncoder",
    "VggTapEncoder",
    "build_encoder",
    "StyleModelConfig",
    "StyleTransferModel",
    "EmbeddingProjector",
    "DomainDecoder",
    "PatchDiscriminator",
    "AttributeHead",
    "build_style_model",
    "toy_style_config",
    "embedding_consistency_loss",
    "reconstruction_loss",
    "attribute_loss",
    "generator_adversarial_loss",
    "discriminator_adversarial_loss",
    "StyleTrainConfig",
    "train_style",
]
