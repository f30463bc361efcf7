"""Deep embedded clustering over dense embeddings.

Pipeline: pool token embeddings into vectors, pretrain a SeLU
autoencoder under a dynamically weighted MSE+cosine loss, fine-tune
network and centroids jointly against sharpened Student's-t soft
assignments, then refine labels by cosine-similarity margins. See the
`cli` module for the operator surface.
"""

__version__ = "0.1.0"

from ._kernels import backend_name

__all__ = ["backend_name", "__version__"]
